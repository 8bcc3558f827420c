//! Antenna trajectories along the aperture under a per-symbol speed limit.
//!
//! The fluid antenna can move at most v_max·T_s wavelengths between
//! consecutive pilot symbols:
//!
//! ```text
//! |x(u+1) − x(u)| ≤ v_max·T_s,      x(u) ∈ [0, ell]
//! ```
//!
//! Continuous trajectories may stop anywhere in the aperture; discrete ones
//! are confined to a uniform grid of Q ports and obey the same speed limit
//! when switching ports. Every admissible discrete trajectory is therefore
//! also an admissible continuous trajectory, which is what makes the
//! continuous scheme's optimum a lower bound.

use crate::error::{Error, Result};
use rand::{Rng, RngExt};

/// Absolute slack applied to speed comparisons so that boundary-exact steps
/// survive rounding.
pub const SPEED_TOL: f64 = 1e-12;

/// Per-symbol motion limit inside an aperture of length `ell` (wavelengths).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionConstraint {
    pub v_max: f64,
    pub t_s: f64,
    pub ell: f64,
}

impl MotionConstraint {
    pub fn new(v_max: f64, t_s: f64, ell: f64) -> Result<Self> {
        if !v_max.is_finite() || v_max < 0.0 {
            return Err(Error::domain(format!(
                "v_max must be finite and >= 0, got {v_max}"
            )));
        }
        if !t_s.is_finite() || t_s <= 0.0 {
            return Err(Error::domain(format!(
                "symbol period must be positive, got {t_s}"
            )));
        }
        if !ell.is_finite() || ell <= 0.0 {
            return Err(Error::domain(format!(
                "aperture length must be positive, got {ell}"
            )));
        }
        Ok(MotionConstraint { v_max, t_s, ell })
    }

    /// Largest admissible per-symbol displacement, v_max·T_s.
    pub fn max_step(&self) -> f64 {
        self.v_max * self.t_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    Continuous,
    Discrete,
}

/// A position per pilot symbol, in symbol order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    positions: Vec<f64>,
    kind: TrajectoryKind,
}

impl Trajectory {
    /// Wrap raw positions as a continuous trajectory. No admissibility check
    /// is performed here; run [`validate`] for that.
    pub fn from_positions(positions: Vec<f64>) -> Self {
        Trajectory {
            positions,
            kind: TrajectoryKind::Continuous,
        }
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// First `n` symbols of this trajectory. A prefix of an admissible
    /// trajectory is itself admissible.
    pub fn prefix(&self, n: usize) -> Result<Trajectory> {
        if n == 0 || n > self.positions.len() {
            return Err(Error::domain(format!(
                "prefix length {n} outside 1..={}",
                self.positions.len()
            )));
        }
        Ok(Trajectory {
            positions: self.positions[..n].to_vec(),
            kind: self.kind,
        })
    }
}

/// Bounce walk shared by the sweep generators: step by `step` in the current
/// direction, clamp at the window edge, and reverse direction at an edge
/// before the next move.
fn reflect_walk(start: f64, lo: f64, hi: f64, step: f64, tau_p: usize) -> Vec<f64> {
    let mut xs = Vec::with_capacity(tau_p);
    let mut x = start;
    let mut dir = 1.0;
    xs.push(x);
    for _ in 1..tau_p {
        if x >= hi {
            dir = -1.0;
        } else if x <= lo {
            dir = 1.0;
        }
        x = (x + dir * step).clamp(lo, hi);
        xs.push(x);
    }
    xs
}

/// Maximum-speed sweep from `start`, reflecting at the aperture ends.
pub fn linear_sweep(c: &MotionConstraint, tau_p: usize, start: f64) -> Result<Trajectory> {
    if tau_p == 0 {
        return Err(Error::domain("trajectory needs at least one symbol"));
    }
    if !start.is_finite() || start < 0.0 || start > c.ell {
        return Err(Error::domain(format!(
            "start position {start} outside aperture [0, {}]",
            c.ell
        )));
    }
    Ok(Trajectory {
        positions: reflect_walk(start, 0.0, c.ell, c.max_step(), tau_p),
        kind: TrajectoryKind::Continuous,
    })
}

/// Triangle-wave motion about `center`, confined to
/// [center − amplitude, center + amplitude], same reflection dynamics as the
/// linear sweep. With the window spanning the whole aperture this reduces to
/// `linear_sweep` started at the center.
pub fn oscillatory(
    c: &MotionConstraint,
    tau_p: usize,
    center: f64,
    amplitude: f64,
) -> Result<Trajectory> {
    if tau_p == 0 {
        return Err(Error::domain("trajectory needs at least one symbol"));
    }
    if !center.is_finite() || !amplitude.is_finite() || amplitude < 0.0 {
        return Err(Error::domain(format!(
            "oscillation center {center} / amplitude {amplitude} invalid"
        )));
    }
    let (lo, hi) = (center - amplitude, center + amplitude);
    if lo < 0.0 || hi > c.ell {
        return Err(Error::domain(format!(
            "oscillation window [{lo}, {hi}] outside aperture [0, {}]",
            c.ell
        )));
    }
    Ok(Trajectory {
        positions: reflect_walk(center, lo, hi, c.max_step(), tau_p),
        kind: TrajectoryKind::Continuous,
    })
}

/// Positions drawn uniformly from the reachable interval each symbol; the
/// first symbol is uniform over the whole aperture.
pub fn random_admissible<R: Rng>(c: &MotionConstraint, tau_p: usize, rng: &mut R) -> Result<Trajectory> {
    if tau_p == 0 {
        return Err(Error::domain("trajectory needs at least one symbol"));
    }
    let d = c.max_step();
    let mut xs = Vec::with_capacity(tau_p);
    let mut x = rng.random_range(0.0..=c.ell);
    xs.push(x);
    for _ in 1..tau_p {
        let lo = (x - d).max(0.0);
        let hi = (x + d).min(c.ell);
        x = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        xs.push(x);
    }
    Ok(Trajectory {
        positions: xs,
        kind: TrajectoryKind::Continuous,
    })
}

/// Q candidate stopping points spread uniformly over the aperture:
/// `ell/(Q−1)` spacing with ports at both ends, or the single midpoint port
/// when Q = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PortSet {
    ports: Vec<f64>,
}

impl PortSet {
    pub fn uniform(q: usize, ell: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("port count must be >= 1"));
        }
        if !ell.is_finite() || ell <= 0.0 {
            return Err(Error::domain(format!(
                "aperture length must be positive, got {ell}"
            )));
        }
        let ports = if q == 1 {
            vec![ell / 2.0]
        } else {
            (0..q)
                .map(|i| {
                    if i == q - 1 {
                        ell // force the endpoint exactly
                    } else {
                        ell * i as f64 / (q - 1) as f64
                    }
                })
                .collect()
        };
        Ok(PortSet { ports })
    }

    pub fn count(&self) -> usize {
        self.ports.len()
    }

    pub fn ports(&self) -> &[f64] {
        &self.ports
    }

    pub fn position(&self, index: usize) -> f64 {
        self.ports[index]
    }

    /// Distance between adjacent ports (0 for a single-port set).
    pub fn spacing(&self) -> f64 {
        if self.ports.len() < 2 {
            0.0
        } else {
            self.ports[1] - self.ports[0]
        }
    }

    /// Exact membership: positions produced by indexing this set.
    pub fn contains(&self, x: f64) -> bool {
        self.ports.contains(&x)
    }
}

/// Port sweep under the switching constraint: walk port indices in the
/// current direction, moving one port per symbol while the neighbor is within
/// v_max·T_s, reversing at the last reachable index. When no other port is
/// reachable at all the antenna dwells where it is.
pub fn discrete_greedy(
    ps: &PortSet,
    c: &MotionConstraint,
    tau_p: usize,
    start: usize,
) -> Result<Trajectory> {
    if tau_p == 0 {
        return Err(Error::domain("trajectory needs at least one symbol"));
    }
    if start >= ps.count() {
        return Err(Error::domain(format!(
            "start port {start} outside 0..{}",
            ps.count()
        )));
    }
    let q = ps.count();
    let reachable = q >= 2 && ps.spacing() <= c.max_step() + SPEED_TOL;
    let mut xs = Vec::with_capacity(tau_p);
    let mut idx = start;
    let mut dir: isize = 1;
    xs.push(ps.position(idx));
    for _ in 1..tau_p {
        if reachable {
            if idx == q - 1 {
                dir = -1;
            } else if idx == 0 {
                dir = 1;
            }
            idx = (idx as isize + dir) as usize;
        }
        xs.push(ps.position(idx));
    }
    Ok(Trajectory {
        positions: xs,
        kind: TrajectoryKind::Discrete,
    })
}

/// Admissibility failure discovered by [`validate`]; `index` is the 1-based
/// symbol where the rule was first broken.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    Bounds { position: f64, ell: f64 },
    Speed { step: f64, limit: f64 },
    Port { position: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            ViolationKind::Bounds { position, ell } => write!(
                f,
                "bounds violation at index {}: position {} outside [0, {}]",
                self.index, position, ell
            ),
            ViolationKind::Speed { step, limit } => write!(
                f,
                "speed violation at index {}: step {} exceeds {}",
                self.index, step, limit
            ),
            ViolationKind::Port { position } => write!(
                f,
                "port-membership violation at index {}: position {} is not a port",
                self.index, position
            ),
        }
    }
}

/// Check a trajectory against the aperture bounds, the per-symbol speed
/// limit (with [`SPEED_TOL`] slack), and optionally exact port membership.
/// Violations are reported as a value, not an error; the first one found
/// wins, scanning in symbol order.
pub fn validate(
    t: &Trajectory,
    c: &MotionConstraint,
    ports: Option<&PortSet>,
) -> std::result::Result<(), Violation> {
    let limit = c.max_step();
    let mut prev: Option<f64> = None;
    for (i, &x) in t.positions().iter().enumerate() {
        let index = i + 1;
        if !x.is_finite() || x < 0.0 || x > c.ell {
            return Err(Violation {
                index,
                kind: ViolationKind::Bounds {
                    position: x,
                    ell: c.ell,
                },
            });
        }
        if let Some(p) = prev {
            let step = (x - p).abs();
            if step > limit + SPEED_TOL {
                return Err(Violation {
                    index,
                    kind: ViolationKind::Speed { step, limit },
                });
            }
        }
        if let Some(ps) = ports {
            if !ps.contains(x) {
                return Err(Violation {
                    index,
                    kind: ViolationKind::Port { position: x },
                });
            }
        }
        prev = Some(x);
    }
    Ok(())
}

/// Write a trajectory as a single-column CSV with header `position`, one
/// full-precision value per symbol.
pub fn save_csv(t: &Trajectory, path: &std::path::Path) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "position")?;
    for x in t.positions() {
        writeln!(out, "{x}")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a trajectory written by [`save_csv`]. Round-trips exactly: shortest
/// round-trip decimal formatting preserves every f64 bit pattern.
pub fn load_csv(path: &std::path::Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("position") => {}
        other => {
            return Err(Error::domain(format!(
                "trajectory csv must start with `position` header, got {other:?}"
            )))
        }
    }
    let mut positions = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| {
            Error::domain(format!("trajectory csv line {}: bad value `{line}`", i + 2))
        })?;
        positions.push(x);
    }
    if positions.is_empty() {
        return Err(Error::domain("trajectory csv contains no positions"));
    }
    Ok(Trajectory {
        positions,
        kind: TrajectoryKind::Continuous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(v_max: f64, t_s: f64, ell: f64) -> MotionConstraint {
        MotionConstraint::new(v_max, t_s, ell).unwrap()
    }

    fn assert_close(have: &[f64], want: &[f64]) {
        assert_eq!(have.len(), want.len());
        for (h, w) in have.iter().zip(want) {
            assert!((h - w).abs() < 1e-12, "have {have:?} want {want:?}");
        }
    }

    #[test]
    fn sweep_reflects_at_the_far_end() {
        let t = linear_sweep(&c(0.3, 1.0, 2.0), 10, 0.0).unwrap();
        assert_close(
            t.positions(),
            &[0.0, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.0, 1.7, 1.4],
        );
        assert_eq!(t.kind(), TrajectoryKind::Continuous);
        assert!(validate(&t, &c(0.3, 1.0, 2.0), None).is_ok());
    }

    #[test]
    fn sweep_ping_pongs_when_step_exceeds_aperture() {
        let t = linear_sweep(&c(2.5, 1.0, 2.0), 6, 0.0).unwrap();
        assert_close(t.positions(), &[0.0, 2.0, 0.0, 2.0, 0.0, 2.0]);
    }

    #[test]
    fn zero_speed_is_stationary() {
        let t = linear_sweep(&c(0.0, 1.0, 2.0), 5, 0.7).unwrap();
        assert_close(t.positions(), &[0.7; 5]);
    }

    #[test]
    fn sweep_rejects_bad_start_and_empty_horizon() {
        let cc = c(0.3, 1.0, 2.0);
        assert!(linear_sweep(&cc, 10, -0.1).is_err());
        assert!(linear_sweep(&cc, 10, 2.1).is_err());
        assert!(linear_sweep(&cc, 0, 0.0).is_err());
    }

    #[test]
    fn full_window_oscillation_equals_center_started_sweep() {
        let cc = c(0.3, 1.0, 2.0);
        let osc = oscillatory(&cc, 12, 1.0, 1.0).unwrap();
        let sweep = linear_sweep(&cc, 12, 1.0).unwrap();
        assert_close(osc.positions(), sweep.positions());
    }

    #[test]
    fn zero_amplitude_oscillation_is_constant() {
        let t = oscillatory(&c(0.3, 1.0, 2.0), 7, 0.8, 0.0).unwrap();
        assert_close(t.positions(), &[0.8; 7]);
    }

    #[test]
    fn oscillation_window_must_fit_the_aperture() {
        let cc = c(0.3, 1.0, 2.0);
        assert!(oscillatory(&cc, 5, 0.2, 0.5).is_err());
        assert!(oscillatory(&cc, 5, 1.9, 0.2).is_err());
        assert!(oscillatory(&cc, 5, 1.0, 1.0).is_ok());
    }

    #[test]
    fn oscillation_stays_inside_its_window() {
        let cc = c(0.3, 1.0, 2.0);
        let t = oscillatory(&cc, 40, 1.2, 0.35).unwrap();
        for &x in t.positions() {
            assert!((0.85 - 1e-12..=1.55 + 1e-12).contains(&x));
        }
        assert!(validate(&t, &cc, None).is_ok());
    }

    #[test]
    fn random_trajectories_are_admissible_and_reproducible() {
        let cc = c(0.3, 1.0, 2.0);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_admissible(&cc, 50, &mut rng).unwrap();
            assert!(validate(&t, &cc, None).is_ok(), "seed {seed}");
        }
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            random_admissible(&cc, 10, &mut a).unwrap(),
            random_admissible(&cc, 10, &mut b).unwrap()
        );
    }

    #[test]
    fn uniform_ports_cover_the_aperture() {
        let ps = PortSet::uniform(8, 2.0).unwrap();
        assert_eq!(ps.count(), 8);
        assert_eq!(ps.position(0), 0.0);
        assert_eq!(ps.position(7), 2.0);
        assert!((ps.spacing() - 2.0 / 7.0).abs() < 1e-15);
        let single = PortSet::uniform(1, 2.0).unwrap();
        assert_eq!(single.ports(), &[1.0]);
        assert!(PortSet::uniform(0, 2.0).is_err());
    }

    #[test]
    fn greedy_sweep_visits_ports_in_order_and_reflects() {
        let ps = PortSet::uniform(8, 2.0).unwrap();
        let cc = c(0.3, 1.0, 2.0);
        let t = discrete_greedy(&ps, &cc, 10, 0).unwrap();
        let want: Vec<f64> = [0, 1, 2, 3, 4, 5, 6, 7, 6, 5]
            .iter()
            .map(|&i| ps.position(i))
            .collect();
        assert_eq!(t.positions(), want.as_slice());
        assert_eq!(t.kind(), TrajectoryKind::Discrete);
        assert!(validate(&t, &cc, Some(&ps)).is_ok());
    }

    #[test]
    fn greedy_dwells_when_ports_are_too_far_apart() {
        // spacing 2/3 > 0.3: no other port reachable in one symbol
        let ps = PortSet::uniform(4, 2.0).unwrap();
        let t = discrete_greedy(&ps, &c(0.3, 1.0, 2.0), 6, 1).unwrap();
        assert_eq!(t.positions(), &[ps.position(1); 6]);
    }

    #[test]
    fn single_port_set_pins_the_antenna() {
        let ps = PortSet::uniform(1, 2.0).unwrap();
        let t = discrete_greedy(&ps, &c(0.3, 1.0, 2.0), 4, 0).unwrap();
        assert_eq!(t.positions(), &[1.0; 4]);
        assert!(discrete_greedy(&ps, &c(0.3, 1.0, 2.0), 4, 1).is_err());
    }

    #[test]
    fn boundary_start_reverses_immediately() {
        let ps = PortSet::uniform(8, 2.0).unwrap();
        let t = discrete_greedy(&ps, &c(0.3, 1.0, 2.0), 4, 7).unwrap();
        let want: Vec<f64> = [7, 6, 5, 4].iter().map(|&i| ps.position(i)).collect();
        assert_eq!(t.positions(), want.as_slice());
    }

    #[test]
    fn validate_reports_first_speed_violation() {
        let t = Trajectory::from_positions(vec![0.0, 0.31]);
        let v = validate(&t, &c(0.3, 1.0, 2.0), None).unwrap_err();
        assert_eq!(v.index, 2);
        assert!(matches!(v.kind, ViolationKind::Speed { .. }));
        assert!(v.to_string().contains("speed violation at index 2"));
    }

    #[test]
    fn validate_reports_bounds_and_port_violations() {
        let cc = c(0.3, 1.0, 2.0);
        let t = Trajectory::from_positions(vec![0.0, 0.3, 2.4]);
        let v = validate(&t, &cc, None).unwrap_err();
        assert!(matches!(v.kind, ViolationKind::Bounds { .. }));
        assert_eq!(v.index, 3);

        let ps = PortSet::uniform(3, 1.0).unwrap(); // ports {0, 0.5, 1.0}
        let t = Trajectory::from_positions(vec![0.0, 0.25]);
        let v = validate(&t, &c(0.3, 1.0, 1.0), Some(&ps)).unwrap_err();
        assert_eq!(v.index, 2);
        assert!(matches!(v.kind, ViolationKind::Port { .. }));
    }

    #[test]
    fn speed_tolerance_admits_boundary_exact_steps() {
        // step lands exactly on the limit modulo rounding
        let t = Trajectory::from_positions(vec![0.0, 0.1 + 0.1 + 0.1]);
        assert!(validate(&t, &c(0.3, 1.0, 2.0), None).is_ok());
    }

    #[test]
    fn prefix_preserves_admissibility() {
        let cc = c(0.3, 1.0, 2.0);
        let t = linear_sweep(&cc, 40, 0.0).unwrap();
        let p = t.prefix(10).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(p.positions(), &t.positions()[..10]);
        assert!(validate(&p, &cc, None).is_ok());
        assert!(t.prefix(0).is_err());
        assert!(t.prefix(41).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let cc = c(0.3, 1.0, 2.0);
        let t = linear_sweep(&cc, 10, 0.0).unwrap();
        save_csv(&t, &path).unwrap();
        let back = load_csv(&path).unwrap();
        for (a, b) in t.positions().iter().zip(back.positions()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn csv_load_rejects_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let bad_header = dir.path().join("a.csv");
        std::fs::write(&bad_header, "pos\n0.1\n").unwrap();
        assert!(load_csv(&bad_header).is_err());
        let bad_value = dir.path().join("b.csv");
        std::fs::write(&bad_value, "position\n0.1\nnope\n").unwrap();
        assert!(load_csv(&bad_value).is_err());
        let empty = dir.path().join("c.csv");
        std::fs::write(&empty, "position\n").unwrap();
        assert!(load_csv(&empty).is_err());
    }
}
