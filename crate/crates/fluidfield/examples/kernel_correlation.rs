//! Print the spatial correlation of the isotropic-scattering channel as a
//! function of antenna displacement, and locate its first zero.
//!
//! Run with: cargo run --example kernel_correlation

use fluidfield::kernel::{bessel_j0, SpatialKernel};

fn main() -> fluidfield::Result<()> {
    let kernel = SpatialKernel::Jakes;

    println!("displacement (wavelengths)   correlation");
    for i in 0..=20 {
        let d = i as f64 * 0.05;
        let c = kernel.eval(0.0, d)?;
        println!("{d:>10.2}                   {c:>+.6}");
    }

    // First zero of J0(2*pi*d): bisect on the displacement axis.
    let (mut lo, mut hi) = (0.3, 0.5);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if kernel.eval(0.0, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let zero = 0.5 * (lo + hi);
    println!();
    println!("first decorrelation distance: {zero:.6} wavelengths");
    println!(
        "check: J0 at that argument = {:+.3e}",
        bessel_j0(2.0 * std::f64::consts::PI * zero)?
    );
    Ok(())
}
