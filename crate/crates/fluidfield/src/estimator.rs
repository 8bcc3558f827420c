//! Linear MMSE estimation of the channel at a target position from pilot
//! observations taken along the antenna trajectory.
//!
//! After per-user matched filtering the observation for one user at one AP is
//!
//! ```text
//! y(u) = √η_p · h(x(u)) + n(u),      n(u) ~ CN(0, σ²/τ_p)
//! ```
//!
//! Jointly Gaussian field and noise make the MMSE estimator linear:
//!
//! ```text
//! ĥ(x*) = (1/√η_p) · r(x*)ᵀ (R + λI)⁻¹ y,      λ = σ²/(η_p·τ_p)
//! MSE(x*) = β − r(x*)ᵀ (R + λI)⁻¹ r(x*),       NMSE = MSE/β
//! ```
//!
//! with R the field covariance over the sampled positions and r(x*) the
//! cross-covariance to the target. The solve goes through a Cholesky factor
//! (never an explicit inverse); σ² = 0 relies on the factor's jitter
//! escalation when revisited positions make R singular.

use crate::error::{Error, Result};
use crate::gaussfield::{
    build_covariance, cross_covariance, psd_factor, CovarianceMatrix, FieldRealization,
    PositionSet,
};
use crate::kernel::SpatialKernel;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

/// Pilot-phase parameters: sequence length, per-user transmit power, and
/// receiver noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotConfig {
    pub tau_p: usize,
    pub eta_p: f64,
    pub sigma2: f64,
}

impl PilotConfig {
    pub fn new(tau_p: usize, eta_p: f64, sigma2: f64) -> Result<Self> {
        if tau_p == 0 {
            return Err(Error::domain("pilot length must be >= 1"));
        }
        if !eta_p.is_finite() || eta_p <= 0.0 {
            return Err(Error::domain(format!(
                "pilot power must be positive, got {eta_p}"
            )));
        }
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::domain(format!(
                "noise variance must be >= 0, got {sigma2}"
            )));
        }
        Ok(PilotConfig {
            tau_p,
            eta_p,
            sigma2,
        })
    }

    /// Regularizer λ = σ²/(η_p·τ_p) applied to the covariance in the solve.
    pub fn loading(&self) -> f64 {
        self.sigma2 / (self.eta_p * self.tau_p as f64)
    }
}

/// Unit-modulus orthogonal pilot sequences, one column per user: the first K
/// columns of the τ_p-point DFT basis, so φ_kᴴφ_j = τ_p·δ_kj.
#[derive(Debug, Clone)]
pub struct PilotBook {
    seqs: DMatrix<Complex64>,
}

pub fn make_pilot_book(users: usize, tau_p: usize) -> Result<PilotBook> {
    if users == 0 {
        return Err(Error::domain("pilot book needs at least one user"));
    }
    if tau_p < users {
        return Err(Error::domain(format!(
            "pilot length {tau_p} shorter than user count {users}: orthogonal sequences need tau_p >= K"
        )));
    }
    let mut seqs = DMatrix::zeros(tau_p, users);
    for k in 0..users {
        for v in 0..tau_p {
            let phase = -2.0 * std::f64::consts::PI * (k * v) as f64 / tau_p as f64;
            seqs[(v, k)] = Complex64::from_polar(1.0, phase);
        }
    }
    Ok(PilotBook { seqs })
}

impl PilotBook {
    pub fn users(&self) -> usize {
        self.seqs.ncols()
    }

    pub fn tau_p(&self) -> usize {
        self.seqs.nrows()
    }

    /// Pilot symbol of user `k` at chip `v`.
    pub fn symbol(&self, v: usize, k: usize) -> Complex64 {
        self.seqs[(v, k)]
    }
}

/// Matched-filter output for one user at one AP: the channel along the
/// trajectory observed at noise variance σ²/τ_p per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedObservation {
    pub y: DVector<Complex64>,
    pub noise_var: f64,
}

/// Simulate the uplink training phase and per-user matched filtering.
///
/// While the antenna rests at its u-th stop, every user transmits its full
/// pilot sequence; the received chip vector is
/// Σ_k √η_k·h_k(x(u))·φ_k + noise with CN(0, σ²) entries. Correlating with
/// (1/τ_p)·φ_kᴴ rejects the other users exactly (orthogonal sequences) and
/// leaves y_k(u) = √η_k·h_k(x(u)) + n(u) with n ~ CN(0, σ²/τ_p).
#[allow(clippy::needless_range_loop)]
pub fn simulate_pilot_phase<R: Rng>(
    fields: &[FieldRealization],
    book: &PilotBook,
    powers: &[f64],
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<MatchedObservation>> {
    let users = book.users();
    let tau_p = book.tau_p();
    if fields.len() != users || powers.len() != users {
        return Err(Error::domain(format!(
            "pilot book covers {users} users, got {} fields and {} powers",
            fields.len(),
            powers.len()
        )));
    }
    for (k, f) in fields.iter().enumerate() {
        if f.values.len() != tau_p {
            return Err(Error::domain(format!(
                "field {k} has {} samples, pilot phase needs {tau_p}",
                f.values.len()
            )));
        }
    }
    for &p in powers {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::domain(format!(
                "pilot power must be positive, got {p}"
            )));
        }
    }
    if !sigma2.is_finite() || sigma2 < 0.0 {
        return Err(Error::domain(format!(
            "noise variance must be >= 0, got {sigma2}"
        )));
    }

    let amps: Vec<f64> = powers.iter().map(|p| p.sqrt()).collect();
    let noise_amp = (sigma2 / 2.0).sqrt();
    let mut obs: Vec<DVector<Complex64>> = (0..users).map(|_| DVector::zeros(tau_p)).collect();
    let mut chips = vec![Complex64::new(0.0, 0.0); tau_p];
    for u in 0..tau_p {
        for (v, chip) in chips.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..users {
                acc += amps[k] * fields[k].values[u] * book.symbol(v, k);
            }
            if sigma2 > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                acc += Complex64::new(noise_amp * re, noise_amp * im);
            }
            *chip = acc;
        }
        for k in 0..users {
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, chip) in chips.iter().enumerate() {
                acc += book.symbol(v, k).conj() * chip;
            }
            obs[k][u] = acc / tau_p as f64;
        }
    }
    Ok(obs
        .into_iter()
        .map(|y| MatchedObservation {
            y,
            noise_var: sigma2 / tau_p as f64,
        })
        .collect())
}

/// Everything the estimator needs about one user-AP link: where the channel
/// was sampled, where it is wanted, the link gain, and the pilot parameters.
#[derive(Debug, Clone)]
pub struct EstimationProblem {
    positions: PositionSet,
    x_target: f64,
    beta: f64,
    kernel: SpatialKernel,
    pilot: PilotConfig,
}

impl EstimationProblem {
    pub fn new(
        positions: PositionSet,
        x_target: f64,
        beta: f64,
        kernel: SpatialKernel,
        pilot: PilotConfig,
    ) -> Result<Self> {
        if !x_target.is_finite() || x_target < 0.0 || x_target > positions.ell() {
            return Err(Error::domain(format!(
                "target position {x_target} outside aperture [0, {}]",
                positions.ell()
            )));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::domain(format!(
                "large-scale gain must be finite and >= 0, got {beta}"
            )));
        }
        Ok(EstimationProblem {
            positions,
            x_target,
            beta,
            kernel,
            pilot,
        })
    }

    pub fn positions(&self) -> &PositionSet {
        &self.positions
    }

    pub fn x_target(&self) -> f64 {
        self.x_target
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kernel(&self) -> &SpatialKernel {
        &self.kernel
    }

    pub fn pilot(&self) -> &PilotConfig {
        &self.pilot
    }

    /// (R + λI) wrapped for factorization, plus the cross-covariance r(x*).
    fn regularized_system(&self) -> Result<(CovarianceMatrix, DVector<f64>)> {
        let r = build_covariance(&self.positions, self.beta, &self.kernel)?;
        let rv = cross_covariance(self.x_target, &self.positions, self.beta, &self.kernel)?;
        let lambda = self.pilot.loading();
        let n = r.dim();
        let mut entries = r.entries().clone();
        for i in 0..n {
            entries[(i, i)] += lambda;
        }
        let loaded = CovarianceMatrix::from_entries(entries, self.beta + lambda)?;
        Ok((loaded, rv))
    }

    /// Solve (R + λI)·w = r(x*); `None` when r is identically zero and no
    /// solve is needed (β = 0 or a fully decorrelated target).
    fn weights(&self) -> Result<Option<(DVector<f64>, DVector<f64>)>> {
        let (loaded, rv) = self.regularized_system()?;
        if rv.iter().all(|&v| v == 0.0) {
            return Ok(None);
        }
        let factor = psd_factor(&loaded)?;
        let w = factor.solve(&rv)?;
        Ok(Some((w, rv)))
    }

    /// Factor once, reuse across many observations of the same problem.
    pub fn prepare(&self) -> Result<PreparedEstimator> {
        let (weights, mse) = match self.weights()? {
            None => (None, self.beta),
            Some((w, rv)) => {
                let m = self.beta - rv.dot(&w);
                (Some(w), m.clamp(0.0, self.beta))
            }
        };
        Ok(PreparedEstimator {
            weights,
            inv_sqrt_eta: 1.0 / self.pilot.eta_p.sqrt(),
            n: self.positions.len(),
            beta: self.beta,
            mse,
        })
    }
}

/// Solved estimator weights for one [`EstimationProblem`], amortizing the
/// covariance factorization over repeated observations.
#[derive(Debug, Clone)]
pub struct PreparedEstimator {
    weights: Option<DVector<f64>>,
    inv_sqrt_eta: f64,
    n: usize,
    beta: f64,
    mse: f64,
}

impl PreparedEstimator {
    pub fn estimate(&self, obs: &MatchedObservation) -> Result<Complex64> {
        if obs.y.len() != self.n {
            return Err(Error::domain(format!(
                "observation has {} entries, problem has {} positions",
                obs.y.len(),
                self.n
            )));
        }
        match &self.weights {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(w) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, &wi) in w.iter().enumerate() {
                    acc += wi * obs.y[i];
                }
                Ok(acc * self.inv_sqrt_eta)
            }
        }
    }

    pub fn mse(&self) -> f64 {
        self.mse
    }

    pub fn nmse(&self) -> Result<f64> {
        if self.beta == 0.0 {
            return Err(Error::domain(
                "beta = 0: normalized MSE is undefined (nothing to normalize by)",
            ));
        }
        Ok(self.mse / self.beta)
    }
}

/// MMSE estimate of the channel at the problem's target position.
///
/// ĥ = (1/√η_p)·r(x*)ᵀ(R + λI)⁻¹·y. The observation length must match the
/// sampled position count.
pub fn lmmse_estimate(obs: &MatchedObservation, prob: &EstimationProblem) -> Result<Complex64> {
    prob.prepare()?.estimate(obs)
}

/// Closed-form estimation error β − r(x*)ᵀ(R + λI)⁻¹r(x*), clamped to [0, β]
/// against the 1e-10-scale negative excursions the solve can produce.
pub fn theoretical_mse(prob: &EstimationProblem) -> Result<f64> {
    Ok(prob.prepare()?.mse())
}

/// MSE normalized by the link gain; undefined when β = 0.
pub fn nmse(prob: &EstimationProblem) -> Result<f64> {
    if prob.beta == 0.0 {
        return Err(Error::domain(
            "beta = 0: normalized MSE is undefined (nothing to normalize by)",
        ));
    }
    Ok(theoretical_mse(prob)? / prob.beta)
}
