//! Cell-free network topology: AP/UE placement on a square service area,
//! distance-based large-scale fading with log-normal shadowing, and
//! user-centric serving clusters chosen by fading strength.
//!
//! Positions and distances here are in meters; they never mix with the
//! wavelength-normalized aperture coordinates used by the kernel and
//! trajectory modules.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub aps: usize,
    pub ues: usize,
    /// Side of the square service area, meters.
    pub area_side: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Shadowing standard deviation, dB.
    pub shadow_sigma_db: f64,
    /// APs serving each UE.
    pub cluster_size: usize,
    /// Distance at which the deterministic path loss is unity, meters.
    pub ref_distance: f64,
    /// Distances below this are clamped before the power law, meters.
    pub min_distance: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            aps: 64,
            ues: 10,
            area_side: 400.0,
            alpha: 3.2,
            shadow_sigma_db: 8.0,
            cluster_size: 8,
            ref_distance: 1.0,
            min_distance: 1.0,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cluster_size == 0 || self.aps < self.cluster_size {
            return Err(Error::domain(format!(
                "need aps >= cluster_size >= 1, got {} APs with cluster size {}",
                self.aps, self.cluster_size
            )));
        }
        if self.ues == 0 {
            return Err(Error::domain("need at least one user"));
        }
        if !self.area_side.is_finite() || self.area_side <= 0.0 {
            return Err(Error::domain(format!(
                "area side must be positive, got {}",
                self.area_side
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::domain(format!(
                "path-loss exponent must be positive, got {}",
                self.alpha
            )));
        }
        if !self.shadow_sigma_db.is_finite() || self.shadow_sigma_db < 0.0 {
            return Err(Error::domain(format!(
                "shadowing std must be >= 0 dB, got {}",
                self.shadow_sigma_db
            )));
        }
        if !self.ref_distance.is_finite()
            || self.ref_distance <= 0.0
            || !self.min_distance.is_finite()
            || self.min_distance < self.ref_distance
        {
            return Err(Error::domain(format!(
                "need min_distance >= ref_distance > 0, got {} and {}",
                self.min_distance, self.ref_distance
            )));
        }
        Ok(())
    }
}

/// One drawn topology. `beta` is users x APs; `serving[k]` lists the APs of
/// user k sorted ascending, `served[l]` is the exact inverse map.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub ap_xy: Vec<[f64; 2]>,
    pub ue_xy: Vec<[f64; 2]>,
    pub beta: DMatrix<f64>,
    pub serving: Vec<Vec<usize>>,
    pub served: Vec<Vec<usize>>,
}

/// β = (max(d, min_distance)/ref_distance)^(−α) · 10^(shadow_db/10).
///
/// The clamp keeps the power law finite when placement puts a user on top of
/// an AP; unit gain at the reference distance fixes the (otherwise arbitrary)
/// path-loss constant, which cancels out of every normalized error anyway.
pub fn large_scale_fading(d: f64, cfg: &NetworkConfig, shadow_db: f64) -> f64 {
    (d.max(cfg.min_distance) / cfg.ref_distance).powf(-cfg.alpha) * 10f64.powf(shadow_db / 10.0)
}

/// Serving sets: the `cluster_size` strongest APs per user, ties to the lower
/// AP index, each set sorted ascending.
pub fn cluster_users(beta: &DMatrix<f64>, cluster_size: usize) -> Result<Vec<Vec<usize>>> {
    let aps = beta.ncols();
    if cluster_size == 0 || cluster_size > aps {
        return Err(Error::domain(format!(
            "cluster size {cluster_size} not in 1..={aps}"
        )));
    }
    let mut serving = Vec::with_capacity(beta.nrows());
    for k in 0..beta.nrows() {
        let mut order: Vec<usize> = (0..aps).collect();
        order.sort_by(|&a, &b| {
            beta[(k, b)]
                .partial_cmp(&beta[(k, a)])
                .expect("non-NaN fading")
                .then(a.cmp(&b))
        });
        let mut chosen: Vec<usize> = order[..cluster_size].to_vec();
        chosen.sort_unstable();
        serving.push(chosen);
    }
    Ok(serving)
}

fn invert_clusters(serving: &[Vec<usize>], aps: usize) -> Vec<Vec<usize>> {
    let mut served = vec![Vec::new(); aps];
    for (k, aps_of_k) in serving.iter().enumerate() {
        for &l in aps_of_k {
            served[l].push(k);
        }
    }
    served
}

/// Draw a topology: AP positions, then UE positions, then the shadowing
/// matrix row by row (users outer, APs inner). The draw order is part of the
/// reproducibility contract.
pub fn generate_network<R: Rng>(cfg: &NetworkConfig, rng: &mut R) -> Result<NetworkRealization> {
    cfg.validate()?;
    let draw_xy = |rng: &mut R| {
        [
            rng.random_range(0.0..cfg.area_side),
            rng.random_range(0.0..cfg.area_side),
        ]
    };
    let ap_xy: Vec<[f64; 2]> = (0..cfg.aps).map(|_| draw_xy(rng)).collect();
    let ue_xy: Vec<[f64; 2]> = (0..cfg.ues).map(|_| draw_xy(rng)).collect();
    let mut beta = DMatrix::zeros(cfg.ues, cfg.aps);
    for k in 0..cfg.ues {
        for l in 0..cfg.aps {
            let shadow: f64 = rng.sample::<f64, _>(StandardNormal) * cfg.shadow_sigma_db;
            let d = (ue_xy[k][0] - ap_xy[l][0]).hypot(ue_xy[k][1] - ap_xy[l][1]);
            beta[(k, l)] = large_scale_fading(d, cfg, shadow);
        }
    }
    let serving = cluster_users(&beta, cfg.cluster_size)?;
    let served = invert_clusters(&serving, cfg.aps);
    Ok(NetworkRealization {
        ap_xy,
        ue_xy,
        beta,
        serving,
        served,
    })
}

/// Write `aps.csv`, `ues.csv`, and `beta.csv` into `dir`. Ids are 1-based in
/// the files; floats keep full precision.
pub fn export_csv(real: &NetworkRealization, dir: &Path) -> Result<()> {
    let mut aps = String::from("ap_id,x,y\n");
    for (l, p) in real.ap_xy.iter().enumerate() {
        writeln!(aps, "{},{},{}", l + 1, p[0], p[1]).expect("string write");
    }
    std::fs::write(dir.join("aps.csv"), aps)?;

    let mut ues = String::from("ue_id,x,y\n");
    for (k, p) in real.ue_xy.iter().enumerate() {
        writeln!(ues, "{},{},{}", k + 1, p[0], p[1]).expect("string write");
    }
    std::fs::write(dir.join("ues.csv"), ues)?;

    let mut beta = String::from("ue_id,ap_id,beta\n");
    for k in 0..real.beta.nrows() {
        for l in 0..real.beta.ncols() {
            writeln!(beta, "{},{},{}", k + 1, l + 1, real.beta[(k, l)]).expect("string write");
        }
    }
    std::fs::write(dir.join("beta.csv"), beta)?;
    Ok(())
}
