//! Head-to-head NMSE distribution of the two spatial sampling schemes over
//! random network realizations: continuous repositioning versus hopping
//! between a fixed grid of ports.

use fluidfield::experiments::{run_cdf, ExperimentSpec, Scheme};

fn main() -> fluidfield::Result<()> {
    let mut spec = ExperimentSpec::defaults(17);
    spec.realizations = 40;

    let table = run_cdf(&spec)?;

    for s in &table.summary {
        println!(
            "{:<10}  mean {:.4}  p10 {:.4}  median {:.4}  p90 {:.4}",
            s.scheme.to_string(),
            s.mean_nmse,
            s.p10,
            s.p50,
            s.p90
        );
    }

    // coarse ECDF sketch: fraction of links at or below a few NMSE levels
    println!();
    println!("fraction of serving links with NMSE <= x");
    println!("     x     continuous   discrete");
    for target in [0.5, 0.8, 0.9, 0.95, 0.99] {
        let at = |scheme: Scheme| {
            table
                .ecdf
                .iter()
                .filter(|r| r.scheme == scheme && r.nmse_grid <= target)
                .map(|r| r.cdf)
                .fold(0.0, f64::max)
        };
        println!(
            "  {target:.2}       {:.3}        {:.3}",
            at(Scheme::Continuous),
            at(Scheme::Discrete)
        );
    }
    println!();
    println!(
        "{} serving links per scheme across {} network draws",
        table.rows.len() / 2,
        spec.realizations
    );
    Ok(())
}
