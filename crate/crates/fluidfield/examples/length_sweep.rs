//! Mean NMSE versus the length of the line the antenna may move on. A longer
//! aperture spreads a fixed number of ports further apart, hurting the
//! discrete scheme, while the continuous scheme can always stay where it
//! wants to be.

use fluidfield::experiments::{run_sweep, ExperimentSpec, Scheme, SweepKind};

fn main() -> fluidfield::Result<()> {
    let mut spec = ExperimentSpec::defaults(17);
    spec.realizations = 40;
    spec.sweep = SweepKind::ApertureLength(vec![1.0, 2.0, 4.0]);

    let table = run_sweep(&spec)?;

    println!("aperture   continuous   discrete   gap");
    for s in table.summary.iter().filter(|s| s.scheme == Scheme::Continuous) {
        let d = table
            .summary
            .iter()
            .find(|d| d.scheme == Scheme::Discrete && d.sweep_value == s.sweep_value)
            .unwrap();
        println!(
            "{:>6.1}       {:.4}      {:.4}   {:.4}",
            s.sweep_value,
            s.mean_nmse,
            d.mean_nmse,
            d.mean_nmse - s.mean_nmse
        );
    }
    Ok(())
}
