//! Discrete-scheme NMSE as the port grid densifies. The continuous curve is
//! exactly flat (ports play no role there); the discrete curve approaches it
//! from above, quantifying what port quantization costs.

use fluidfield::experiments::{run_sweep, ExperimentSpec, Scheme, SweepKind};

fn main() -> fluidfield::Result<()> {
    let mut spec = ExperimentSpec::defaults(17);
    spec.realizations = 40;
    spec.sweep = SweepKind::PortCount(vec![4, 8, 16, 32, 64]);

    let table = run_sweep(&spec)?;

    let continuous = table
        .summary
        .iter()
        .find(|s| s.scheme == Scheme::Continuous)
        .unwrap()
        .mean_nmse;
    println!("continuous baseline: mean NMSE {continuous:.4} at every port count");
    println!();
    println!("ports   discrete   excess over continuous");
    for s in table.summary.iter().filter(|s| s.scheme == Scheme::Discrete) {
        println!(
            "{:>5}    {:.4}        {:+.4}",
            s.sweep_value,
            s.mean_nmse,
            s.mean_nmse - continuous
        );
    }
    Ok(())
}
