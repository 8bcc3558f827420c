//! Monte Carlo comparison of continuous and discrete antenna sampling over
//! drawn network topologies.
//!
//! Two schemes are evaluated on identical networks (common random numbers):
//!
//! * continuous: a trajectory from the configured family, by default the
//!   target-holding trajectory (zero-amplitude oscillation at x*), which is
//!   the dense-port limit of the discrete policy below;
//! * discrete: the adjacent-step port sweep, started so that the τ_p-symbol
//!   window is centered on the target port (or pinned to the nearest port
//!   when the spacing exceeds the per-symbol travel budget).
//!
//! Per-pair NMSE is the closed form of the estimator module, so the only
//! randomness is network geometry and shadowing (and the trajectory itself
//! for the random family). Realizations are independent work units; each gets
//! its own counter-derived RNG stream, which makes results independent of
//! worker-thread count.

use crate::error::{Error, Result};
use crate::estimator::{
    make_pilot_book, nmse, simulate_pilot_phase, EstimationProblem, PilotConfig,
};
use crate::gaussfield::{joint_covariance, psd_factor, sample_field, PositionSet};
use crate::kernel::SpatialKernel;
use crate::network::{generate_network, NetworkConfig, NetworkRealization};
use crate::trajectory::{
    discrete_greedy, linear_sweep, oscillatory, random_admissible, MotionConstraint, PortSet,
    Trajectory, SPEED_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Continuous,
    Discrete,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Continuous => "continuous",
            Scheme::Discrete => "discrete",
        })
    }
}

/// Shape of the continuous-scheme trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryFamily {
    /// Max-speed reflecting sweep from x = 0.
    Sweep,
    /// Triangle wave about the target; amplitude 0 holds the target exactly.
    Oscillatory { amplitude: f64 },
    /// Speed-admissible uniform random walk, redrawn per realization.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaNormalization {
    None,
    /// Divide each realization's serving-pair gains by their median.
    MedianOne,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepKind {
    /// Single operating point; emits the pooled NMSE distribution.
    Cdf,
    PilotLength(Vec<usize>),
    ApertureLength(Vec<f64>),
    PortCount(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub network: NetworkConfig,
    pub pilot: PilotConfig,
    pub v_max: f64,
    pub t_s: f64,
    pub ell: f64,
    /// Estimation target; `None` tracks ℓ/2 (also across the aperture sweep).
    pub x_target: Option<f64>,
    /// Port count of the discrete scheme.
    pub ports: usize,
    pub kernel: SpatialKernel,
    pub family: TrajectoryFamily,
    pub normalization: BetaNormalization,
    pub sweep: SweepKind,
    pub realizations: usize,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// Operating point used throughout the numerical study: σ²=1, ℓ=2,
    /// τ_p=10, η_p=10, Q=8, T_s=1, v_max=0.3, target ℓ/2, 200 realizations.
    pub fn defaults(master_seed: u64) -> Self {
        ExperimentSpec {
            network: NetworkConfig::default(),
            pilot: PilotConfig::new(10, 10.0, 1.0).expect("default pilot"),
            v_max: 0.3,
            t_s: 1.0,
            ell: 2.0,
            x_target: None,
            ports: 8,
            kernel: SpatialKernel::Jakes,
            family: TrajectoryFamily::Oscillatory { amplitude: 0.0 },
            normalization: BetaNormalization::None,
            sweep: SweepKind::Cdf,
            realizations: 200,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.realizations == 0 {
            return Err(Error::domain("need at least one realization"));
        }
        if self.ports == 0 {
            return Err(Error::domain("port count must be >= 1"));
        }
        MotionConstraint::new(self.v_max, self.t_s, self.ell)?;
        let min_ell = match &self.sweep {
            SweepKind::ApertureLength(vals) => {
                require_increasing(vals, "aperture sweep")?;
                if vals.iter().any(|&v| !v.is_finite() || v <= 0.0) {
                    return Err(Error::domain("aperture sweep values must be positive"));
                }
                vals[0]
            }
            SweepKind::PilotLength(vals) => {
                require_increasing(vals, "pilot sweep")?;
                if vals[0] == 0 {
                    return Err(Error::domain("pilot lengths must be >= 1"));
                }
                self.ell
            }
            SweepKind::PortCount(vals) => {
                require_increasing(vals, "port sweep")?;
                if vals[0] == 0 {
                    return Err(Error::domain("port counts must be >= 1"));
                }
                self.ell
            }
            SweepKind::Cdf => self.ell,
        };
        if let Some(x) = self.x_target {
            if !x.is_finite() || x < 0.0 || x > min_ell {
                return Err(Error::domain(format!(
                    "target {x} outside [0, {min_ell}] for the smallest swept aperture"
                )));
            }
        }
        if let TrajectoryFamily::Oscillatory { amplitude } = self.family {
            if !amplitude.is_finite() || amplitude < 0.0 {
                return Err(Error::domain(format!(
                    "oscillation amplitude must be >= 0, got {amplitude}"
                )));
            }
        }
        Ok(())
    }

    /// Target position for a given aperture: explicit `x_target` or its
    /// midpoint.
    pub fn target_for(&self, ell: f64) -> f64 {
        self.x_target.unwrap_or(ell / 2.0)
    }
}

fn require_increasing<T: PartialOrd + fmt::Debug>(vals: &[T], what: &str) -> Result<()> {
    if vals.is_empty() {
        return Err(Error::domain(format!("{what} needs at least one value")));
    }
    if vals.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(format!(
            "{what} values must be strictly increasing, got {vals:?}"
        )));
    }
    Ok(())
}

/// RNG for one realization: one seed, one counter-derived stream per index.
pub fn realization_rng(master_seed: u64, realization: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(realization);
    rng
}

/// Start port of the discrete scheme: center the τ_p-symbol adjacent-step
/// window on the target port; when no neighboring port is reachable within
/// one symbol the antenna dwells, so start at the port nearest the target.
pub fn discrete_start_index(
    ps: &PortSet,
    c: &MotionConstraint,
    tau_p: usize,
    x_target: f64,
) -> usize {
    let q = ps.count();
    if q == 1 {
        return 0;
    }
    let target = x_target / ps.spacing();
    let reachable = ps.spacing() <= c.max_step() + SPEED_TOL;
    let start = if reachable {
        target - (tau_p as f64 - 1.0) / 2.0
    } else {
        target
    };
    start.round().clamp(0.0, (q - 1) as f64) as usize
}

/// Continuous-scheme trajectory for one aperture/pilot setting. The random
/// family consumes `rng`; the deterministic families ignore it.
pub fn continuous_trajectory(
    family: TrajectoryFamily,
    c: &MotionConstraint,
    tau_p: usize,
    x_target: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory> {
    match family {
        TrajectoryFamily::Sweep => linear_sweep(c, tau_p, 0.0),
        TrajectoryFamily::Oscillatory { amplitude } => {
            oscillatory(c, tau_p, x_target, amplitude)
        }
        TrajectoryFamily::Random => random_admissible(c, tau_p, rng),
    }
}

/// Discrete-scheme trajectory: Q uniform ports, centered adjacent-step sweep.
pub fn discrete_trajectory(
    ports: usize,
    c: &MotionConstraint,
    tau_p: usize,
    x_target: f64,
) -> Result<Trajectory> {
    let ps = PortSet::uniform(ports, c.ell)?;
    let start = discrete_start_index(&ps, c, tau_p, x_target);
    discrete_greedy(&ps, c, tau_p, start)
}

/// Closed-form NMSE of one serving pair for one trajectory.
pub fn evaluate_pair(
    beta: f64,
    traj: &Trajectory,
    pilot: &PilotConfig,
    kernel: &SpatialKernel,
    x_target: f64,
    ell: f64,
) -> Result<f64> {
    let positions = PositionSet::new(traj.positions().to_vec(), ell)?;
    let prob = EstimationProblem::new(positions, x_target, beta, *kernel, *pilot)?;
    nmse(&prob)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub realization: u64,
    /// 0-based user index; CSV output shifts to 1-based ids.
    pub ue: usize,
    /// 0-based AP index; CSV output shifts to 1-based ids.
    pub ap: usize,
    pub beta: f64,
    pub nmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub mean_nmse: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcdfRow {
    pub scheme: Scheme,
    pub nmse_grid: f64,
    pub cdf: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub ecdf: Vec<EcdfRow>,
}

/// Number of grid points in the pooled empirical CDF.
pub const ECDF_GRID: usize = 200;

/// Serving-pair gains of one realization in (ue, ap) iteration order,
/// after the configured normalization.
fn pair_betas(net: &NetworkRealization, normalization: BetaNormalization) -> Vec<(usize, usize, f64)> {
    let mut pairs = Vec::new();
    for (k, aps) in net.serving.iter().enumerate() {
        for &l in aps {
            pairs.push((k, l, net.beta[(k, l)]));
        }
    }
    if normalization == BetaNormalization::MedianOne {
        let mut vals: Vec<f64> = pairs.iter().map(|p| p.2).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite gains"));
        let n = vals.len();
        let median = if n % 2 == 1 {
            vals[n / 2]
        } else {
            0.5 * (vals[n / 2 - 1] + vals[n / 2])
        };
        for p in &mut pairs {
            p.2 /= median;
        }
    }
    pairs
}

/// Per-realization evaluation output: pair gains plus NMSE per sweep value
/// and scheme, indexed [value][scheme][pair].
struct RealizationResult {
    pairs: Vec<(usize, usize, f64)>,
    nmse: Vec<[Vec<f64>; 2]>,
}

/// Sweep settings resolved for one sweep value.
struct Setting {
    value: f64,
    ell: f64,
    x_target: f64,
    tau_p: usize,
    ports: usize,
}

fn settings_for(spec: &ExperimentSpec) -> Vec<Setting> {
    match &spec.sweep {
        SweepKind::Cdf => vec![Setting {
            value: 0.0,
            ell: spec.ell,
            x_target: spec.target_for(spec.ell),
            tau_p: spec.pilot.tau_p,
            ports: spec.ports,
        }],
        SweepKind::PilotLength(vals) => vals
            .iter()
            .map(|&t| Setting {
                value: t as f64,
                ell: spec.ell,
                x_target: spec.target_for(spec.ell),
                tau_p: t,
                ports: spec.ports,
            })
            .collect(),
        SweepKind::ApertureLength(vals) => vals
            .iter()
            .map(|&ell| Setting {
                value: ell,
                ell,
                x_target: spec.target_for(ell),
                tau_p: spec.pilot.tau_p,
                ports: spec.ports,
            })
            .collect(),
        SweepKind::PortCount(vals) => vals
            .iter()
            .map(|&q| Setting {
                value: q as f64,
                ell: spec.ell,
                x_target: spec.target_for(spec.ell),
                tau_p: spec.pilot.tau_p,
                ports: q,
            })
            .collect(),
    }
}

fn evaluate_realization(spec: &ExperimentSpec, realization: u64) -> Result<RealizationResult> {
    let mut rng = realization_rng(spec.master_seed, realization);
    let net = generate_network(&spec.network, &mut rng)?;
    let pairs = pair_betas(&net, spec.normalization);
    let settings = settings_for(spec);

    // Trajectories per sweep value. The pilot sweep evaluates prefixes of the
    // longest trajectory so position sets are nested; the port sweep keeps
    // one continuous trajectory so that scheme's rows repeat bit-identically.
    let mut trajs: Vec<[Trajectory; 2]> = Vec::with_capacity(settings.len());
    match &spec.sweep {
        SweepKind::PilotLength(vals) => {
            let tau_max = *vals.last().expect("validated non-empty");
            let c = MotionConstraint::new(spec.v_max, spec.t_s, spec.ell)?;
            let x_t = spec.target_for(spec.ell);
            let cont = continuous_trajectory(spec.family, &c, tau_max, x_t, &mut rng)?;
            let disc = discrete_trajectory(spec.ports, &c, tau_max, x_t)?;
            for &t in vals {
                trajs.push([cont.prefix(t)?, disc.prefix(t)?]);
            }
        }
        SweepKind::PortCount(vals) => {
            let c = MotionConstraint::new(spec.v_max, spec.t_s, spec.ell)?;
            let x_t = spec.target_for(spec.ell);
            let cont = continuous_trajectory(spec.family, &c, spec.pilot.tau_p, x_t, &mut rng)?;
            for &q in vals {
                let disc = discrete_trajectory(q, &c, spec.pilot.tau_p, x_t)?;
                trajs.push([cont.clone(), disc]);
            }
        }
        _ => {
            for s in &settings {
                let c = MotionConstraint::new(spec.v_max, spec.t_s, s.ell)?;
                let cont =
                    continuous_trajectory(spec.family, &c, s.tau_p, s.x_target, &mut rng)?;
                let disc = discrete_trajectory(s.ports, &c, s.tau_p, s.x_target)?;
                trajs.push([cont, disc]);
            }
        }
    }

    let mut nmse_out = Vec::with_capacity(settings.len());
    for (s, pair_trajs) in settings.iter().zip(&trajs) {
        let pilot = PilotConfig::new(s.tau_p, spec.pilot.eta_p, spec.pilot.sigma2)?;
        let mut per_scheme: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for (i, traj) in pair_trajs.iter().enumerate() {
            per_scheme[i] = pairs
                .iter()
                .map(|&(_, _, beta)| {
                    evaluate_pair(beta, traj, &pilot, &spec.kernel, s.x_target, s.ell)
                })
                .collect::<Result<_>>()?;
        }
        nmse_out.push(per_scheme);
    }
    Ok(RealizationResult {
        pairs,
        nmse: nmse_out,
    })
}

fn run(spec: &ExperimentSpec) -> Result<(Vec<Setting>, Vec<RealizationResult>)> {
    spec.validate()?;
    let per_real: Vec<RealizationResult> = (0..spec.realizations as u64)
        .into_par_iter()
        .map(|r| evaluate_realization(spec, r))
        .collect::<Result<_>>()?;
    Ok((settings_for(spec), per_real))
}

/// Linear-interpolation percentile of already sorted values, p in [0, 100].
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p / 100.0 * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn assemble(
    settings: &[Setting],
    per_real: &[RealizationResult],
    with_ecdf: bool,
) -> ResultTable {
    let schemes = [Scheme::Continuous, Scheme::Discrete];
    let mut table = ResultTable::default();
    for (vi, s) in settings.iter().enumerate() {
        for (si, &scheme) in schemes.iter().enumerate() {
            let mut values = Vec::new();
            for (r, real) in per_real.iter().enumerate() {
                for (pi, &(ue, ap, beta)) in real.pairs.iter().enumerate() {
                    let v = real.nmse[vi][si][pi];
                    table.rows.push(ResultRow {
                        sweep_value: s.value,
                        scheme,
                        realization: r as u64,
                        ue,
                        ap,
                        beta,
                        nmse: v,
                    });
                    values.push(v);
                }
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite nmse"));
            table.summary.push(SummaryRow {
                sweep_value: s.value,
                scheme,
                mean_nmse: mean,
                p10: percentile(&values, 10.0),
                p50: percentile(&values, 50.0),
                p90: percentile(&values, 90.0),
            });
        }
    }

    if with_ecdf {
        // Shared grid over the pooled range of both schemes, so the two CDFs
        // are directly comparable point by point.
        let all: Vec<f64> = table.rows.iter().map(|r| r.nmse).collect();
        let lo = all.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        for &scheme in &schemes {
            let vals: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.scheme == scheme)
                .map(|r| r.nmse)
                .collect();
            let n = vals.len() as f64;
            for g in 0..ECDF_GRID {
                let x = lo + span * g as f64 / (ECDF_GRID - 1) as f64;
                let count = vals.iter().filter(|&&v| v <= x).count();
                table.ecdf.push(EcdfRow {
                    scheme,
                    nmse_grid: x,
                    cdf: count as f64 / n,
                });
            }
        }
    }
    table
}

/// Fixed-point study: per-pair rows plus the pooled empirical CDF of both
/// schemes. The NMSE population is serving UE-AP pairs pooled across network
/// realizations; per-pair NMSE is deterministic given the geometry, so the
/// CDF randomness is geometry and shadowing only.
pub fn run_cdf(spec: &ExperimentSpec) -> Result<ResultTable> {
    if !matches!(spec.sweep, SweepKind::Cdf) {
        return Err(Error::domain("run_cdf needs sweep kind cdf"));
    }
    let (settings, per_real) = run(spec)?;
    Ok(assemble(&settings, &per_real, true))
}

/// Parameter sweep with common random numbers: the same network realizations
/// are reused for every sweep value and both schemes.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<ResultTable> {
    if matches!(spec.sweep, SweepKind::Cdf) {
        return Err(Error::domain("run_sweep needs a sweep kind"));
    }
    let (settings, per_real) = run(spec)?;
    Ok(assemble(&settings, &per_real, false))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalReport {
    pub trials: usize,
    pub empirical_mse: f64,
    pub closed_form_mse: f64,
    pub std_error: f64,
    /// |empirical − closed form| ≤ 5 standard errors.
    pub pass: bool,
}

impl fmt::Display for EmpiricalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "trials          {}", self.trials)?;
        writeln!(f, "empirical mse   {:e}", self.empirical_mse)?;
        writeln!(f, "closed-form mse {:e}", self.closed_form_mse)?;
        writeln!(f, "std error       {:e}", self.std_error)?;
        write!(f, "verdict         {}", if self.pass { "pass" } else { "FAIL" })
    }
}

/// Monte Carlo check that the closed-form error matches simulation: joint
/// field draws, the single-user pilot phase, and the prepared estimator on
/// one fixed problem (the continuous-scheme trajectory at gain `beta`).
pub fn empirical_check(spec: &ExperimentSpec, beta: f64, trials: usize) -> Result<EmpiricalReport> {
    spec.validate()?;
    if trials < 1000 {
        return Err(Error::domain(format!(
            "need at least 1000 trials for a stable standard error, got {trials}"
        )));
    }
    let mut rng = realization_rng(spec.master_seed, 0);
    let c = MotionConstraint::new(spec.v_max, spec.t_s, spec.ell)?;
    let x_t = spec.target_for(spec.ell);
    let traj = continuous_trajectory(spec.family, &c, spec.pilot.tau_p, x_t, &mut rng)?;
    empirical_check_on(&traj, spec, beta, trials, &mut rng)
}

/// Same check on an explicit trajectory.
pub fn empirical_check_on(
    traj: &Trajectory,
    spec: &ExperimentSpec,
    beta: f64,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EmpiricalReport> {
    let x_t = spec.target_for(spec.ell);
    let positions = PositionSet::new(traj.positions().to_vec(), spec.ell)?;
    let prob = EstimationProblem::new(
        positions.clone(),
        x_t,
        beta,
        spec.kernel,
        spec.pilot,
    )?;
    let prepared = prob.prepare()?;
    let cov = joint_covariance(&positions, x_t, beta, &spec.kernel)?;
    let factor = psd_factor(&cov)?;
    let book = make_pilot_book(1, spec.pilot.tau_p)?;
    let powers = [spec.pilot.eta_p];

    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for _ in 0..trials {
        let field = sample_field(&factor, rng);
        let obs = simulate_pilot_phase(
            std::slice::from_ref(&field),
            &book,
            &powers,
            spec.pilot.sigma2,
            rng,
        )?;
        let est = prepared.estimate(&obs[0])?;
        let err = (est - field.target_value).norm_sqr();
        acc += err;
        acc2 += err * err;
    }
    let mean = acc / trials as f64;
    let var = (acc2 / trials as f64 - mean * mean).max(0.0);
    let se = (var / trials as f64).sqrt();
    let closed = prepared.mse();
    Ok(EmpiricalReport {
        trials,
        empirical_mse: mean,
        closed_form_mse: closed,
        std_error: se,
        pass: (mean - closed).abs() <= 5.0 * se,
    })
}
