//! Hexagonal multi-cell networks with wrap-around.
//!
//! Base stations sit on a hexagonal lattice of `n_rings` rings around a
//! center cell (2 rings = 19 cells). The cluster is tiled periodically over
//! the plane and every link uses the nearest periodic image of the base
//! station, so all cells see the same interference geometry. Link gains
//! combine COST-231-Hata path loss (medium city), log-normal shadowing and a
//! static Rayleigh power factor per (cell, user) pair. By default each user
//! is redrawn until the cell it was placed in is also its strongest link.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::model::{db_to_linear, NetworkModel};
use crate::{Error, Result};

/// Bound on redraws of one user under [`Association::StrongestLink`].
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;

/// How a user's home cell relates to its channel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Association {
    /// Home is the cell the user was placed in, whatever its channel.
    Geographic,
    /// Home is the cell the user was placed in, and a placement (position and
    /// channel) is redrawn until that cell also has the strongest link. Keeps
    /// the per-cell user count fixed while excluding users that a real
    /// network would hand over to a neighbor.
    #[default]
    StrongestLink,
}

/// Users at or beyond this fraction of the cell radius count as cell edge.
pub const EDGE_RADIUS_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub n_rings: usize,
    pub cell_radius_m: f64,
    pub carrier_ghz: f64,
    pub total_bw_hz: f64,
    /// Number of resource units per cell, `M`.
    pub n_ru: usize,
    /// Bandwidth per resource unit, `B`. Derived as `total_bw_hz / n_ru`
    /// when absent; must agree with it when given.
    pub ru_bandwidth_hz: Option<f64>,
    pub ru_power_mw: f64,
    pub noise_psd_dbm_hz: f64,
    pub shadowing_sigma_db: f64,
    pub rayleigh_fading: bool,
    pub ues_per_cell: usize,
    /// Common per-user demand.
    pub demand_bps: f64,
    pub load_limit: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    /// Path loss is evaluated no closer than this.
    pub min_distance_m: f64,
    /// When set, exactly `round(f * ues_per_cell)` users per cell are placed
    /// at or beyond 0.8 radius and the rest strictly inside it. When absent,
    /// users are uniform over the hexagon.
    pub edge_fraction: Option<f64>,
    pub association: Association,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_rings: 2,
            cell_radius_m: 500.0,
            carrier_ghz: 2.0,
            total_bw_hz: 20e6,
            n_ru: 100,
            ru_bandwidth_hz: None,
            ru_power_mw: 800.0,
            noise_psd_dbm_hz: -173.0,
            shadowing_sigma_db: 6.0,
            rayleigh_fading: true,
            ues_per_cell: 30,
            demand_bps: 1e6,
            load_limit: 1.0,
            bs_height_m: 30.0,
            ue_height_m: 1.5,
            min_distance_m: 20.0,
            edge_fraction: None,
            association: Association::StrongestLink,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn n_cells(&self) -> usize {
        3 * self.n_rings * self.n_rings + 3 * self.n_rings + 1
    }

    pub fn ru_bandwidth(&self) -> f64 {
        self.ru_bandwidth_hz
            .unwrap_or(self.total_bw_hz / self.n_ru as f64)
    }

    /// Noise power per resource unit in mW.
    pub fn noise_per_ru_mw(&self) -> f64 {
        db_to_linear(self.noise_psd_dbm_hz + 10.0 * self.ru_bandwidth().log10())
    }

    /// Per-user demand in bits/s converted to nats per RU, normalized by `M * B`.
    pub fn normalize_demand(&self, bps: f64) -> f64 {
        bps * LN_2 / (self.n_ru as f64 * self.ru_bandwidth())
    }

    /// Inverse of [`ScenarioConfig::normalize_demand`].
    pub fn demand_to_bps(&self, normalized: f64) -> f64 {
        normalized * self.n_ru as f64 * self.ru_bandwidth() / LN_2
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let positive = [
            ("cell_radius_m", self.cell_radius_m),
            ("carrier_ghz", self.carrier_ghz),
            ("total_bw_hz", self.total_bw_hz),
            ("ru_power_mw", self.ru_power_mw),
            ("bs_height_m", self.bs_height_m),
            ("ue_height_m", self.ue_height_m),
            ("min_distance_m", self.min_distance_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if self.n_ru == 0 {
            return bad("n_ru must be at least 1".into());
        }
        if self.shadowing_sigma_db.is_nan() || self.shadowing_sigma_db < 0.0 {
            return bad("shadowing_sigma_db must be nonnegative".into());
        }
        if self.demand_bps.is_nan() || self.demand_bps < 0.0 {
            return bad("demand_bps must be nonnegative".into());
        }
        if !(self.load_limit > 0.0 && self.load_limit <= 1.0) {
            return bad(format!("load_limit {} outside (0, 1]", self.load_limit));
        }
        if let Some(f) = self.edge_fraction {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("edge_fraction {f} outside [0, 1]"));
            }
        }
        if let Some(b) = self.ru_bandwidth_hz {
            let total = b * self.n_ru as f64;
            if (total - self.total_bw_hz).abs() > 1e-9 * self.total_bw_hz {
                return bad(format!(
                    "{} RUs x {b} Hz = {total} Hz differs from total bandwidth {} Hz",
                    self.n_ru, self.total_bw_hz
                ));
            }
        }
        Ok(())
    }
}

/// COST-231-Hata path loss in dB, medium-sized city (`C = 0`). Distances
/// below 20 m are clamped.
pub fn cost231_pl_db(d_km: f64, f_mhz: f64, hb_m: f64, hm_m: f64) -> f64 {
    let d = d_km.max(0.02);
    let lf = f_mhz.log10();
    let a_hm = (1.1 * lf - 0.7) * hm_m - (1.56 * lf - 0.8);
    46.3 + 33.9 * lf - 13.82 * hb_m.log10() - a_hm + (44.9 - 6.55 * hb_m.log10()) * d.log10()
}

/// Planar point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Base-station layout of a hexagonal cluster and its wrap-around images.
#[derive(Debug, Clone, PartialEq)]
pub struct HexLayout {
    pub radius_m: f64,
    pub sites: Vec<Point>,
    /// Translations to the six neighboring copies of the cluster.
    pub shifts: Vec<Point>,
}

impl HexLayout {
    pub fn new(n_rings: usize, radius_m: f64) -> Self {
        let isd = 3f64.sqrt() * radius_m;
        let to_xy = |q: i64, r: i64| Point {
            x: isd * (q as f64 + r as f64 / 2.0),
            y: isd * (r as f64) * 3f64.sqrt() / 2.0,
        };
        let n = n_rings as i64;
        let mut axial = vec![(0i64, 0i64)];
        // Ring by ring, so that cell 0 is the center.
        for ring in 1..=n {
            let dirs = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
            let (mut q, mut r) = (ring * dirs[4].0, ring * dirs[4].1);
            for dir in dirs {
                for _ in 0..ring {
                    axial.push((q, r));
                    q += dir.0;
                    r += dir.1;
                }
            }
        }
        let sites = axial.iter().map(|&(q, r)| to_xy(q, r)).collect();
        // Cluster translation (n + 1, n) and its rotations by 60 degrees.
        let (mut q, mut r) = (n + 1, n);
        let mut shifts = Vec::with_capacity(6);
        for _ in 0..6 {
            shifts.push(to_xy(q, r));
            (q, r) = (-r, q + r);
        }
        Self {
            radius_m,
            sites,
            shifts,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.sites.len()
    }

    /// Distance from site `cell` to `p` under wrap-around: the nearest of the
    /// site and its six periodic images.
    pub fn wrapped_distance(&self, cell: usize, p: Point) -> f64 {
        let s = self.sites[cell];
        let direct = s.dist(p);
        if self.sites.len() == 1 {
            return direct;
        }
        self.shifts
            .iter()
            .map(|t| {
                Point {
                    x: s.x + t.x,
                    y: s.y + t.y,
                }
                .dist(p)
            })
            .fold(direct, f64::min)
    }

    /// Whether `p` (relative to a site) lies in the pointy-top hexagon of
    /// circumradius `radius_m`.
    pub fn in_hexagon(&self, dx: f64, dy: f64) -> bool {
        let r = self.radius_m;
        let ax = dx.abs();
        ax <= 3f64.sqrt() / 2.0 * r && dy.abs() <= r - ax / 3f64.sqrt()
    }
}

/// A generated network together with its geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub layout: HexLayout,
    pub ue_positions: Vec<Point>,
    pub network: NetworkModel,
}

impl Scenario {
    /// Distance from each user to its home site.
    pub fn home_distances(&self) -> Vec<f64> {
        self.ue_positions
            .iter()
            .enumerate()
            .map(|(j, p)| self.layout.sites[self.network.home(j)].dist(*p))
            .collect()
    }
}

/// Uniform offset from a site inside its hexagon, restricted to the edge ring
/// (`Some(true)`) or the inner area (`Some(false)`).
fn draw_offset(
    rng: &mut ChaCha8Rng,
    layout: &HexLayout,
    want_edge: Option<bool>,
    edge_r: f64,
) -> (f64, f64) {
    let r_max = layout.radius_m;
    loop {
        let dx = rng.random_range(-r_max..=r_max);
        let dy = rng.random_range(-r_max..=r_max);
        if !layout.in_hexagon(dx, dy) {
            continue;
        }
        let r = dx.hypot(dy);
        match want_edge {
            Some(true) if r < edge_r => continue,
            Some(false) if r >= edge_r => continue,
            _ => return (dx, dy),
        }
    }
}

/// Generates the network described by `cfg`; deterministic in `cfg.seed`.
pub fn generate(cfg: &ScenarioConfig) -> Result<NetworkModel> {
    Ok(generate_scenario(cfg)?.network)
}

pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let layout = HexLayout::new(cfg.n_rings, cfg.cell_radius_m);
    let n_cells = layout.n_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let edge_r = EDGE_RADIUS_FRACTION * cfg.cell_radius_m;
    let n_edge = cfg
        .edge_fraction
        .map(|f| (f * cfg.ues_per_cell as f64).round() as usize);

    let f_mhz = cfg.carrier_ghz * 1e3;
    let shadow = Normal::new(0.0, cfg.shadowing_sigma_db)
        .map_err(|e| Error::InvalidConfig(format!("shadowing: {e}")))?;
    let mut ue_home = Vec::new();
    let mut ue_positions = Vec::new();
    // Column j holds the gains of user j from every cell.
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for cell in 0..n_cells {
        let site = layout.sites[cell];
        for k in 0..cfg.ues_per_cell {
            // None: anywhere; Some(true): edge ring; Some(false): inner area.
            let want_edge = n_edge.map(|e| k < e);
            let mut attempts = 0;
            let (pos, column) = loop {
                attempts += 1;
                if attempts > MAX_PLACEMENT_ATTEMPTS {
                    return Err(Error::InvalidConfig(format!(
                        "no placement in cell {cell} whose strongest link is its own cell after {MAX_PLACEMENT_ATTEMPTS} draws"
                    )));
                }
                let (dx, dy) = draw_offset(&mut rng, &layout, want_edge, edge_r);
                let pos = Point {
                    x: site.x + dx,
                    y: site.y + dy,
                };
                let column: Vec<f64> = (0..n_cells)
                    .map(|c| {
                        let d_m = layout.wrapped_distance(c, pos).max(cfg.min_distance_m);
                        let pl = cost231_pl_db(d_m / 1e3, f_mhz, cfg.bs_height_m, cfg.ue_height_m);
                        let shadow_db = if cfg.shadowing_sigma_db > 0.0 {
                            shadow.sample(&mut rng)
                        } else {
                            0.0
                        };
                        let fading: f64 = if cfg.rayleigh_fading {
                            Exp1.sample(&mut rng)
                        } else {
                            1.0
                        };
                        db_to_linear(-pl + shadow_db) * fading.max(f64::MIN_POSITIVE)
                    })
                    .collect();
                let accepted = match cfg.association {
                    Association::Geographic => true,
                    Association::StrongestLink => column.iter().all(|&g| g <= column[cell]),
                };
                if accepted {
                    break (pos, column);
                }
            };
            ue_home.push(cell);
            ue_positions.push(pos);
            columns.push(column);
        }
    }
    let n_ues = ue_home.len();
    let gain: Vec<Vec<f64>> = (0..n_cells)
        .map(|c| columns.iter().map(|col| col[c]).collect())
        .collect();

    let demand = vec![cfg.normalize_demand(cfg.demand_bps); n_ues];
    let network = NetworkModel::new(
        ue_home,
        gain,
        vec![cfg.ru_power_mw; n_cells],
        cfg.noise_per_ru_mw(),
        demand,
        cfg.load_limit,
    )?;
    Ok(Scenario {
        config: cfg.clone(),
        layout,
        ue_positions,
        network,
    })
}

/// Network JSON with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub generator: String,
    pub config: ScenarioConfig,
    pub network: NetworkModel,
}

impl ScenarioDocument {
    pub fn new(config: &ScenarioConfig, network: NetworkModel) -> Self {
        Self {
            generator: generator_version(),
            config: config.clone(),
            network,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn generator_version() -> String {
    format!("{} v{}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}
