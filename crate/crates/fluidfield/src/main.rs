fn main() {
    std::process::exit(fluidfield::cli::main_entry());
}
