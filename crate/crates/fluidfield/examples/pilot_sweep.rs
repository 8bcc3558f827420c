//! Mean NMSE of both schemes as the pilot sequence grows. Longer pilots give
//! the antenna more symbols to sample the field, so both curves fall;
//! continuous repositioning keeps its lead at every length.

use fluidfield::experiments::{run_sweep, ExperimentSpec, Scheme, SweepKind};

fn main() -> fluidfield::Result<()> {
    let mut spec = ExperimentSpec::defaults(17);
    spec.realizations = 40;
    spec.sweep = SweepKind::PilotLength(vec![5, 10, 20, 40]);

    let table = run_sweep(&spec)?;

    println!("tau_p   continuous   discrete");
    for s in table.summary.iter().filter(|s| s.scheme == Scheme::Continuous) {
        let d = table
            .summary
            .iter()
            .find(|d| d.scheme == Scheme::Discrete && d.sweep_value == s.sweep_value)
            .unwrap();
        println!(
            "{:>5}     {:.4}       {:.4}",
            s.sweep_value, s.mean_nmse, d.mean_nmse
        );
    }
    Ok(())
}
