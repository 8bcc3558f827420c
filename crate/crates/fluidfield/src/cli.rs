//! Command-line front end: experiment configuration, execution, CSV output,
//! and single-shot estimation/validation utilities.
//!
//! Exit codes: 0 success, 1 inadmissible trajectory, 2 invalid
//! configuration, 3 I/O failure.

use crate::error::{Error, Result};
use crate::estimator::{theoretical_mse, EstimationProblem, PilotConfig};
use crate::experiments::{
    empirical_check_on, realization_rng, run_cdf, run_sweep, BetaNormalization, ExperimentSpec,
    ResultTable, SweepKind, TrajectoryFamily,
};
use crate::gaussfield::PositionSet;
use crate::kernel::SpatialKernel;
use crate::trajectory::{load_csv, validate, MotionConstraint, PortSet, Trajectory};
use clap::{Parser, Subcommand};
use rand::RngExt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(
    name = "fluidfield",
    version,
    about = "Channel estimation with a moving antenna: continuous vs discrete spatial sampling"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Key = value configuration file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed; omitted, a fresh seed is drawn and printed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread cap; results are identical for every value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Number of network realizations.
    #[arg(long, global = true)]
    realizations: Option<usize>,

    /// Continuous-scheme trajectory family: sweep, oscillatory, random.
    #[arg(long, global = true)]
    trajectory: Option<String>,

    /// Large-scale gain normalization: none, median-one.
    #[arg(long = "beta-normalization", global = true)]
    beta_normalization: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// NMSE distribution of both schemes at one operating point.
    Cdf,
    /// Mean NMSE versus pilot length, prefix-nested trajectories.
    SweepPilots {
        /// Comma-separated pilot lengths, strictly increasing.
        #[arg(long = "tau-p", value_delimiter = ',', required = true)]
        tau_p: Vec<usize>,
    },
    /// Mean NMSE versus aperture length.
    SweepLength {
        /// Comma-separated aperture lengths, strictly increasing.
        #[arg(long = "ell", value_delimiter = ',', required = true)]
        ell: Vec<f64>,
    },
    /// Mean NMSE versus discrete port count; the continuous curve is flat.
    SweepPorts {
        /// Comma-separated port counts, strictly increasing.
        #[arg(long = "q", value_delimiter = ',', required = true)]
        q: Vec<usize>,
    },
    /// Closed-form error for one explicit problem.
    Estimate {
        /// Comma-separated sample positions in [0, ell].
        #[arg(long, value_delimiter = ',', required = true)]
        positions: Vec<f64>,
        #[arg(long = "x-target")]
        x_target: f64,
        /// Large-scale channel gain; defaults to 1.
        #[arg(long)]
        beta: Option<f64>,
        /// Pilot power; defaults to the configured eta_p.
        #[arg(long)]
        eta: Option<f64>,
        /// Noise power; defaults to the configured sigma2.
        #[arg(long)]
        sigma2: Option<f64>,
        /// Pilot length; defaults to the configured tau_p.
        #[arg(long = "tau-p")]
        tau_p: Option<usize>,
        /// Also run a Monte Carlo cross-check with this many trials.
        #[arg(long)]
        empirical: Option<usize>,
    },
    /// Check a trajectory CSV against motion (and optional port) constraints.
    Validate {
        file: PathBuf,
        #[arg(long = "v-max", default_value_t = 0.3)]
        v_max: f64,
        #[arg(long = "t-s", default_value_t = 1.0)]
        t_s: f64,
        #[arg(long, default_value_t = 2.0)]
        ell: f64,
        /// Restrict positions to this many uniform ports.
        #[arg(long)]
        q: Option<usize>,
    },
}

fn parse_family(value: &str) -> Result<TrajectoryFamily> {
    match value {
        "sweep" => Ok(TrajectoryFamily::Sweep),
        "oscillatory" => Ok(TrajectoryFamily::Oscillatory { amplitude: 0.0 }),
        "random" => Ok(TrajectoryFamily::Random),
        other => Err(Error::config(
            "trajectory",
            format!("unknown family `{other}` (expected sweep, oscillatory, random)"),
        )),
    }
}

fn parse_normalization(value: &str) -> Result<BetaNormalization> {
    match value {
        "none" => Ok(BetaNormalization::None),
        "median-one" => Ok(BetaNormalization::MedianOne),
        other => Err(Error::config(
            "beta_normalization",
            format!("unknown mode `{other}` (expected none, median-one)"),
        )),
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

/// Apply one configuration key. Every [`ExperimentSpec`] field is
/// reachable; unknown keys are an error so typos never pass silently.
fn apply_key(spec: &mut ExperimentSpec, key: &str, value: &str) -> Result<()> {
    match key {
        "aps" => spec.network.aps = parse_num(key, value)?,
        "ues" => spec.network.ues = parse_num(key, value)?,
        "area_side" => spec.network.area_side = parse_num(key, value)?,
        "alpha" => spec.network.alpha = parse_num(key, value)?,
        "shadow_sigma_db" => spec.network.shadow_sigma_db = parse_num(key, value)?,
        "cluster_size" => spec.network.cluster_size = parse_num(key, value)?,
        "ref_distance" => spec.network.ref_distance = parse_num(key, value)?,
        "min_distance" => spec.network.min_distance = parse_num(key, value)?,
        "tau_p" => {
            spec.pilot = PilotConfig::new(
                parse_num(key, value)?,
                spec.pilot.eta_p,
                spec.pilot.sigma2,
            )?
        }
        "eta_p" => {
            spec.pilot = PilotConfig::new(
                spec.pilot.tau_p,
                parse_num(key, value)?,
                spec.pilot.sigma2,
            )?
        }
        "sigma2" => {
            spec.pilot = PilotConfig::new(
                spec.pilot.tau_p,
                spec.pilot.eta_p,
                parse_num(key, value)?,
            )?
        }
        "v_max" => spec.v_max = parse_num(key, value)?,
        "t_s" => spec.t_s = parse_num(key, value)?,
        "ell" => spec.ell = parse_num(key, value)?,
        "x_target" => spec.x_target = Some(parse_num(key, value)?),
        "ports" => spec.ports = parse_num(key, value)?,
        "kernel" => {
            spec.kernel = SpatialKernel::from_str(value)
                .map_err(|e| Error::config(key, e.to_string()))?
        }
        "trajectory" => spec.family = parse_family(value)?,
        "osc_amplitude" => {
            let amplitude = parse_num(key, value)?;
            spec.family = match spec.family {
                TrajectoryFamily::Oscillatory { .. } => {
                    TrajectoryFamily::Oscillatory { amplitude }
                }
                other => other,
            };
            if !matches!(spec.family, TrajectoryFamily::Oscillatory { .. }) {
                return Err(Error::config(
                    key,
                    "only meaningful with trajectory = oscillatory",
                ));
            }
        }
        "beta_normalization" => spec.normalization = parse_normalization(value)?,
        "realizations" => spec.realizations = parse_num(key, value)?,
        "seed" => spec.master_seed = parse_num(key, value)?,
        _ => return Err(Error::config(key, "unknown key")),
    }
    Ok(())
}

fn apply_config_file(spec: &mut ExperimentSpec, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                line,
                format!("line {}: expected `key = value`", lineno + 1),
            ));
        };
        apply_key(spec, key.trim(), value.trim())?;
    }
    Ok(())
}

/// Resolved run profile: the experiment spec plus process-level settings.
struct Profile {
    spec: ExperimentSpec,
    out: PathBuf,
    threads: Option<usize>,
    announce_seed: bool,
}

fn resolve(cli: &Cli) -> Result<Profile> {
    // file first, then flags, so flags win
    let mut spec = ExperimentSpec::defaults(0);
    let mut seeded = false;
    if let Some(path) = &cli.config {
        let before = spec.master_seed;
        apply_config_file(&mut spec, path)?;
        seeded = spec.master_seed != before || config_sets_seed(path)?;
    }
    if let Some(r) = cli.realizations {
        spec.realizations = r;
    }
    if let Some(t) = &cli.trajectory {
        spec.family = parse_family(t)?;
    }
    if let Some(b) = &cli.beta_normalization {
        spec.normalization = parse_normalization(b)?;
    }
    if let Some(s) = cli.seed {
        spec.master_seed = s;
        seeded = true;
    }
    if !seeded {
        spec.master_seed = rand::rng().random::<u64>();
    }
    Ok(Profile {
        spec,
        out: cli.out.clone(),
        threads: cli.threads,
        announce_seed: !seeded,
    })
}

fn config_sets_seed(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path)?;
    Ok(text.lines().any(|l| {
        l.trim()
            .split_once('=')
            .is_some_and(|(k, _)| k.trim() == "seed")
    }))
}

fn float_cell(v: f64) -> String {
    format!("{v}")
}

fn raw_csv(table: &ResultTable) -> String {
    let mut s = String::from("sweep_value,scheme,realization,ue,ap,beta,nmse\n");
    for r in &table.rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            float_cell(r.sweep_value),
            r.scheme,
            r.realization,
            r.ue + 1,
            r.ap + 1,
            float_cell(r.beta),
            float_cell(r.nmse)
        )
        .expect("string write");
    }
    s
}

fn summary_csv(table: &ResultTable) -> String {
    let mut s = String::from("sweep_value,scheme,mean_nmse,p10,p50,p90\n");
    for r in &table.summary {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            float_cell(r.sweep_value),
            r.scheme,
            float_cell(r.mean_nmse),
            float_cell(r.p10),
            float_cell(r.p50),
            float_cell(r.p90)
        )
        .expect("string write");
    }
    s
}

fn ecdf_csv(table: &ResultTable) -> String {
    let mut s = String::from("scheme,nmse_grid,cdf\n");
    for r in &table.ecdf {
        writeln!(
            s,
            "{},{},{}",
            r.scheme,
            float_cell(r.nmse_grid),
            float_cell(r.cdf)
        )
        .expect("string write");
    }
    s
}

fn write_outputs(table: &ResultTable, dir: &Path, with_ecdf: bool) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("raw.csv"), raw_csv(table))?;
    std::fs::write(dir.join("summary.csv"), summary_csv(table))?;
    if with_ecdf {
        std::fs::write(dir.join("ecdf.csv"), ecdf_csv(table))?;
    }
    Ok(())
}

fn run_experiment(profile: &Profile, sweep: SweepKind) -> Result<()> {
    let mut spec = profile.spec.clone();
    spec.sweep = sweep;
    let is_cdf = matches!(spec.sweep, SweepKind::Cdf);
    let table = with_pool(profile.threads, || {
        if is_cdf {
            run_cdf(&spec)
        } else {
            run_sweep(&spec)
        }
    })?;
    write_outputs(&table, &profile.out, is_cdf)?;
    print!("{}", summary_csv(&table));
    Ok(())
}

fn with_pool<T>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match threads {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
            pool.install(f)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_estimate(
    profile: &Profile,
    positions: &[f64],
    x_target: f64,
    beta: Option<f64>,
    eta: Option<f64>,
    sigma2: Option<f64>,
    tau_p: Option<usize>,
    empirical: Option<usize>,
) -> Result<()> {
    let mut spec = profile.spec.clone();
    let beta = beta.unwrap_or(1.0);
    let tau_p = tau_p.unwrap_or(spec.pilot.tau_p);
    spec.pilot = PilotConfig::new(
        tau_p,
        eta.unwrap_or(spec.pilot.eta_p),
        sigma2.unwrap_or(spec.pilot.sigma2),
    )?;
    spec.x_target = Some(x_target);
    let pset = PositionSet::new(positions.to_vec(), spec.ell)?;
    let prob = EstimationProblem::new(pset, x_target, beta, spec.kernel, spec.pilot)?;
    let prepared = prob.prepare()?;
    println!("samples  {}", positions.len());
    println!("x_target {}", float_cell(x_target));
    println!("mse      {}", float_cell(theoretical_mse(&prob)?));
    println!("nmse     {}", float_cell(prepared.nmse()?));
    if let Some(trials) = empirical {
        // one position per pilot symbol, so the counts must agree
        if positions.len() != tau_p {
            return Err(Error::config(
                "empirical",
                format!(
                    "the pilot phase visits one position per symbol: \
                     got {} positions but tau-p = {tau_p}",
                    positions.len()
                ),
            ));
        }
        let traj = Trajectory::from_positions(positions.to_vec());
        let mut rng = realization_rng(spec.master_seed, 0);
        let report = empirical_check_on(&traj, &spec, beta, trials, &mut rng)?;
        println!("{report}");
    }
    Ok(())
}

fn cmd_validate(
    file: &Path,
    v_max: f64,
    t_s: f64,
    ell: f64,
    q: Option<usize>,
) -> Result<i32> {
    let traj = load_csv(file).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", file.display()),
        )),
        other => other,
    })?;
    let constraint = MotionConstraint::new(v_max, t_s, ell)?;
    let ports = match q {
        Some(q) => Some(PortSet::uniform(q, ell)?),
        None => None,
    };
    match validate(&traj, &constraint, ports.as_ref()) {
        Ok(()) => {
            println!("admissible ({} positions)", traj.len());
            Ok(0)
        }
        Err(v) => {
            println!("{v}");
            Ok(1)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let profile = resolve(cli)?;
    let randomized = !matches!(
        cli.cmd,
        Cmd::Validate { .. } | Cmd::Estimate { empirical: None, .. }
    );
    if profile.announce_seed && randomized {
        println!("seed {}", profile.spec.master_seed);
    }
    match &cli.cmd {
        Cmd::Cdf => {
            run_experiment(&profile, SweepKind::Cdf)?;
            Ok(0)
        }
        Cmd::SweepPilots { tau_p } => {
            run_experiment(&profile, SweepKind::PilotLength(tau_p.clone()))?;
            Ok(0)
        }
        Cmd::SweepLength { ell } => {
            run_experiment(&profile, SweepKind::ApertureLength(ell.clone()))?;
            Ok(0)
        }
        Cmd::SweepPorts { q } => {
            run_experiment(&profile, SweepKind::PortCount(q.clone()))?;
            Ok(0)
        }
        Cmd::Estimate {
            positions,
            x_target,
            beta,
            eta,
            sigma2,
            tau_p,
            empirical,
        } => {
            cmd_estimate(
                &profile, positions, *x_target, *beta, *eta, *sigma2, *tau_p, *empirical,
            )?;
            Ok(0)
        }
        Cmd::Validate {
            file,
            v_max,
            t_s,
            ell,
            q,
        } => cmd_validate(file, *v_max, *t_s, *ell, *q),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
