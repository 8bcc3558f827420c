//! Draw correlated channel realizations along a line of positions and compare
//! the empirical correlation between two of them with the kernel value.

use fluidfield::experiments::realization_rng;
use fluidfield::gaussfield::{joint_covariance, psd_factor, sample_field, PositionSet};
use fluidfield::kernel::SpatialKernel;

fn main() -> fluidfield::Result<()> {
    let ell = 2.0;
    let positions: Vec<f64> = (0..11).map(|i| i as f64 * 0.2).collect();
    let pset = PositionSet::new(positions, ell)?;
    let beta = 1.0;
    let x_target = 1.0;

    let cov = joint_covariance(&pset, x_target, beta, &SpatialKernel::Jakes)?;
    let factor = psd_factor(&cov)?;
    let mut rng = realization_rng(2024, 0);

    // a few draws, real parts only to keep the table readable
    println!("position:  {}", row(pset.positions()));
    for draw in 0..3 {
        let f = sample_field(&factor, &mut rng);
        let re: Vec<f64> = f.values.iter().map(|z| z.re).collect();
        println!("draw {draw} re: {}", row(&re));
    }

    // empirical vs kernel correlation between positions 0.0 and 0.2
    let n = 20_000;
    let mut acc = 0.0;
    for _ in 0..n {
        let f = sample_field(&factor, &mut rng);
        acc += (f.values[0] * f.values[1].conj()).re;
    }
    let kernel_value = SpatialKernel::Jakes.eval(0.0, 0.2)?;
    println!();
    println!("correlation at lag 0.2 wavelengths over {n} draws");
    println!("  empirical: {:+.4}", acc / n as f64);
    println!("  kernel:    {kernel_value:+.4}");
    Ok(())
}

fn row(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:+.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}
