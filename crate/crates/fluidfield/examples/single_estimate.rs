//! End-to-end estimation for one user: simulate the pilot phase along a
//! moving-antenna trajectory, form the LMMSE estimate of the channel at the
//! target position, and compare squared error against the closed form.

use fluidfield::estimator::{
    make_pilot_book, simulate_pilot_phase, EstimationProblem, PilotConfig,
};
use fluidfield::experiments::realization_rng;
use fluidfield::gaussfield::{joint_covariance, psd_factor, sample_field, PositionSet};
use fluidfield::kernel::SpatialKernel;
use fluidfield::trajectory::{oscillatory, MotionConstraint};

fn main() -> fluidfield::Result<()> {
    let pilot = PilotConfig::new(10, 10.0, 1.0)?;
    let constraint = MotionConstraint::new(0.3, 1.0, 2.0)?;
    let x_target = 1.0;
    let beta = 1.0;
    let kernel = SpatialKernel::Jakes;

    // antenna oscillates around the target while the pilot is transmitted
    let traj = oscillatory(&constraint, pilot.tau_p, x_target, 0.3)?;
    let pset = PositionSet::new(traj.positions().to_vec(), constraint.ell)?;

    let prob = EstimationProblem::new(pset.clone(), x_target, beta, kernel, pilot)?;
    let prepared = prob.prepare()?;
    println!("closed-form mse  {:.6}", prepared.mse());
    println!("closed-form nmse {:.6}", prepared.nmse()?);
    println!();

    let factor = psd_factor(&joint_covariance(&pset, x_target, beta, &kernel)?)?;
    let book = make_pilot_book(1, pilot.tau_p)?;
    let mut rng = realization_rng(11, 0);

    println!("trial   truth                estimate             |err|^2");
    let mut acc = 0.0;
    let trials = 10_000;
    for trial in 0..trials {
        let field = sample_field(&factor, &mut rng);
        let obs = simulate_pilot_phase(
            std::slice::from_ref(&field),
            &book,
            &[pilot.eta_p],
            pilot.sigma2,
            &mut rng,
        )?;
        let est = prepared.estimate(&obs[0])?;
        let err = (est - field.target_value).norm_sqr();
        acc += err;
        if trial < 5 {
            println!(
                "{trial:>5}   {:+.4}{:+.4}i      {:+.4}{:+.4}i      {err:.5}",
                field.target_value.re, field.target_value.im, est.re, est.im
            );
        }
    }
    println!("...");
    println!(
        "mean over {trials} trials: {:.6} (closed form {:.6})",
        acc / trials as f64,
        prepared.mse()
    );
    Ok(())
}
