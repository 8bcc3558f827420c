//! Zero-mean proper complex Gaussian field over antenna positions.
//!
//! The channel h(x) along the antenna axis is a circularly symmetric complex
//! Gaussian process with
//!
//! ```text
//! E[h(x)·h*(x′)] = β·κ(x, x′),      E[h(x)·h(x′)] = 0
//! ```
//!
//! where β is the large-scale gain of the link and κ the spatial kernel.
//! Given a set of sampled positions this module assembles the covariance
//! matrix, factors it (with a diagonal jitter escalation for the positive
//! semidefinite boundary cases that exact kernels produce), and draws field
//! realizations through the factor.

use crate::error::{Error, Result};
use crate::kernel::SpatialKernel;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

/// Antenna positions (wavelengths) inside the aperture [0, ell].
///
/// Duplicates are permitted: sampling one location twice is physically valid
/// and simply produces a rank-deficient covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionSet {
    positions: Vec<f64>,
    ell: f64,
}

impl PositionSet {
    pub fn new(positions: Vec<f64>, ell: f64) -> Result<Self> {
        if !ell.is_finite() || ell <= 0.0 {
            return Err(Error::domain(format!(
                "aperture length must be positive and finite, got {ell}"
            )));
        }
        if positions.is_empty() {
            return Err(Error::domain("position set must not be empty"));
        }
        for (i, &x) in positions.iter().enumerate() {
            if !x.is_finite() || x < 0.0 || x > ell {
                return Err(Error::domain(format!(
                    "position {x} at index {i} outside aperture [0, {ell}]"
                )));
            }
        }
        Ok(PositionSet { positions, ell })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a PositionSet is non-empty by construction
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }
}

/// Covariance of the field over a position set, scale β folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
    beta: f64,
}

impl CovarianceMatrix {
    /// Wrap a precomputed covariance. The matrix must be square, finite,
    /// bitwise symmetric, and carry exactly `beta` on the diagonal.
    pub fn from_entries(entries: DMatrix<f64>, beta: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::domain("covariance must be square and non-empty"));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::domain(format!(
                "large-scale gain must be finite and >= 0, got {beta}"
            )));
        }
        let n = entries.nrows();
        for i in 0..n {
            if entries[(i, i)] != beta {
                return Err(Error::domain(format!(
                    "covariance diagonal must equal beta = {beta}, got {} at {i}",
                    entries[(i, i)]
                )));
            }
            for j in 0..i {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if !a.is_finite() || a.to_bits() != b.to_bits() {
                    return Err(Error::domain(format!(
                        "covariance must be finite and symmetric, mismatch at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(CovarianceMatrix { entries, beta })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.beta * self.dim() as f64
    }
}

/// C[u, v] = β·κ(x_u, x_v). The diagonal is exactly β and the matrix is
/// bitwise symmetric because only |x_u − x_v| enters the kernel.
pub fn build_covariance(
    set: &PositionSet,
    beta: f64,
    kernel: &SpatialKernel,
) -> Result<CovarianceMatrix> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::domain(format!(
            "large-scale gain must be finite and >= 0, got {beta}"
        )));
    }
    let xs = set.positions();
    let n = xs.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        entries[(i, i)] = beta;
        for j in 0..i {
            let v = beta * kernel.eval(xs[i], xs[j])?;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    Ok(CovarianceMatrix { entries, beta })
}

/// r[u] = β·κ(x_target, x_u), the covariance between the field at the target
/// position and at each sampled position.
pub fn cross_covariance(
    x_target: f64,
    set: &PositionSet,
    beta: f64,
    kernel: &SpatialKernel,
) -> Result<DVector<f64>> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::domain(format!(
            "large-scale gain must be finite and >= 0, got {beta}"
        )));
    }
    if !x_target.is_finite() {
        return Err(Error::domain(format!(
            "target position must be finite, got {x_target}"
        )));
    }
    let xs = set.positions();
    let mut r = DVector::zeros(xs.len());
    for (u, &x) in xs.iter().enumerate() {
        r[u] = beta * kernel.eval(x_target, x)?;
    }
    Ok(r)
}

/// Covariance over the sampled positions with the target position appended as
/// the final point, for drawing the channel vector and its value at the
/// target jointly.
pub fn joint_covariance(
    set: &PositionSet,
    x_target: f64,
    beta: f64,
    kernel: &SpatialKernel,
) -> Result<CovarianceMatrix> {
    if !x_target.is_finite() || x_target < 0.0 || x_target > set.ell() {
        return Err(Error::domain(format!(
            "target position {x_target} outside aperture [0, {}]",
            set.ell()
        )));
    }
    let mut joined = set.positions().to_vec();
    joined.push(x_target);
    let joint = PositionSet::new(joined, set.ell())?;
    build_covariance(&joint, beta, kernel)
}

/// Lower-triangular factor L with L·Lᵀ = C + δI for the smallest δ in the
/// escalation schedule that renders the matrix positive definite.
#[derive(Debug, Clone)]
pub struct PsdFactor {
    l: DMatrix<f64>,
    chol: Option<Cholesky<f64, Dyn>>,
    jitter: f64,
}

impl PsdFactor {
    /// The lower-triangular factor.
    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Jitter δ that was added to the diagonal; 0 for PD inputs.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solve (C + δI)·w = b through the factor.
    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.chol {
            Some(ch) => Ok(ch.solve(b)),
            // Only the all-zero covariance carries no factorization; it has no
            // usable inverse and callers short-circuit that case.
            None => Err(Error::Factorization {
                n: self.dim(),
                trace: 0.0,
                jitter: 0.0,
            }),
        }
    }
}

/// Factor a covariance matrix, escalating diagonal jitter from
/// 1e-12·trace(C)/n by decades up to 1e-6·trace(C)/n until the Cholesky
/// succeeds. PD inputs factor at δ = 0; the all-zero covariance (β = 0) gets
/// the exact factor L = 0.
pub fn psd_factor(cov: &CovarianceMatrix) -> Result<PsdFactor> {
    let n = cov.dim();
    let trace = cov.trace();
    if trace == 0.0 {
        // β = 0: the field is deterministically zero.
        return Ok(PsdFactor {
            l: DMatrix::zeros(n, n),
            chol: None,
            jitter: 0.0,
        });
    }
    let base = trace / n as f64;
    let mut last = 0.0;
    for k in 0..8 {
        let delta = if k == 0 { 0.0 } else { 1e-12 * base * 10f64.powi(k - 1) };
        last = delta;
        let mut m = cov.entries().clone();
        for i in 0..n {
            m[(i, i)] += delta;
        }
        if let Some(ch) = Cholesky::new(m) {
            let l = ch.l();
            if l.iter().all(|v| v.is_finite()) {
                return Ok(PsdFactor {
                    l,
                    chol: Some(ch),
                    jitter: delta,
                });
            }
        }
    }
    Err(Error::Factorization {
        n,
        trace,
        jitter: last,
    })
}

/// One draw of the field over sampled positions plus the target position.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    /// Channel at each sampled position, in position order.
    pub values: Vec<Complex64>,
    /// Channel at the target position.
    pub target_value: Complex64,
}

/// Draw a field realization through a factor of the joint covariance built by
/// [`joint_covariance`] (target position last). The draw is L·z with z having
/// i.i.d. CN(0, 1) entries, so the realization has covariance C + δI and zero
/// pseudo-covariance.
pub fn sample_field<R: Rng>(factor: &PsdFactor, rng: &mut R) -> FieldRealization {
    let n = factor.dim();
    let mut re = DVector::zeros(n);
    let mut im = DVector::zeros(n);
    for i in 0..n {
        // Real and imaginary parts are N(0, 1/2) each, interleaved per entry
        // so the stream layout is independent of how the draw is consumed.
        re[i] = std::f64::consts::FRAC_1_SQRT_2 * rng.sample::<f64, _>(StandardNormal);
        im[i] = std::f64::consts::FRAC_1_SQRT_2 * rng.sample::<f64, _>(StandardNormal);
    }
    let vre = factor.l() * re;
    let vim = factor.l() * im;
    let mut values: Vec<Complex64> = (0..n).map(|i| Complex64::new(vre[i], vim[i])).collect();
    let target_value = values.pop().expect("factor dimension >= 1");
    FieldRealization {
        values,
        target_value,
    }
}
