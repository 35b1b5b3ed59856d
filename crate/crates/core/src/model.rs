//! Network data model and the per-resource-unit physical layer.
//!
//! All quantities are linear (mW, dimensionless gains) and rates are in nats
//! per resource unit. Demands are stored normalized by the cell bandwidth
//! `M * B`, so a demand `d` is met by a load `x` at rate `c` when `c * x >= d`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Cells, users, link gains, per-RU power, noise and demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkFile", into = "NetworkFile")]
pub struct NetworkModel {
    n_cells: usize,
    ue_home: Vec<usize>,
    gain: Vec<Vec<f64>>,
    p_ru: Vec<f64>,
    sigma2: f64,
    demand: Vec<f64>,
    load_limit: f64,
    cell_ues: Vec<Vec<usize>>,
}

impl NetworkModel {
    /// Builds a model from linear gains `gain[cell][ue]`.
    pub fn new(
        ue_home: Vec<usize>,
        gain: Vec<Vec<f64>>,
        p_ru: Vec<f64>,
        sigma2: f64,
        demand: Vec<f64>,
        load_limit: f64,
    ) -> Result<Self> {
        let n_cells = p_ru.len();
        let n_ues = ue_home.len();
        let invalid = |msg: String| Err(Error::InvalidModel(msg));
        if n_cells == 0 {
            return invalid("at least one cell is required".into());
        }
        if gain.len() != n_cells {
            return invalid(format!("gain has {} rows, expected {n_cells}", gain.len()));
        }
        if demand.len() != n_ues {
            return invalid(format!("{} demands for {n_ues} users", demand.len()));
        }
        for (i, row) in gain.iter().enumerate() {
            if row.len() != n_ues {
                return invalid(format!(
                    "gain row {i} has {} entries, expected {n_ues}",
                    row.len()
                ));
            }
            if let Some(j) = row.iter().position(|g| !(g.is_finite() && *g > 0.0)) {
                return invalid(format!("gain[{i}][{j}] = {} is not positive", row[j]));
            }
        }
        if let Some(i) = p_ru.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return invalid(format!("p_ru[{i}] = {} is not positive", p_ru[i]));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return invalid(format!("sigma2 = {sigma2} is not positive"));
        }
        if let Some(j) = demand.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return invalid(format!("demand[{j}] = {} is negative", demand[j]));
        }
        if !(load_limit > 0.0 && load_limit <= 1.0) {
            return invalid(format!("load limit {load_limit} outside (0, 1]"));
        }
        let mut cell_ues = vec![Vec::new(); n_cells];
        for (j, &home) in ue_home.iter().enumerate() {
            if home >= n_cells {
                return invalid(format!("user {j} has home cell {home} out of range"));
            }
            cell_ues[home].push(j);
        }
        Ok(Self {
            n_cells,
            ue_home,
            gain,
            p_ru,
            sigma2,
            demand,
            load_limit,
            cell_ues,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_ues(&self) -> usize {
        self.ue_home.len()
    }

    pub fn home(&self, ue: usize) -> usize {
        self.ue_home[ue]
    }

    pub fn ue_home(&self) -> &[usize] {
        &self.ue_home
    }

    /// Linear gain from `cell` to `ue`.
    pub fn gain(&self, cell: usize, ue: usize) -> f64 {
        self.gain[cell][ue]
    }

    pub fn gains(&self) -> &[Vec<f64>] {
        &self.gain
    }

    pub fn p_ru(&self, cell: usize) -> f64 {
        self.p_ru[cell]
    }

    pub fn p_ru_all(&self) -> &[f64] {
        &self.p_ru
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn demand(&self, ue: usize) -> f64 {
        self.demand[ue]
    }

    pub fn demands(&self) -> &[f64] {
        &self.demand
    }

    pub fn load_limit(&self) -> f64 {
        self.load_limit
    }

    /// Users homed in `cell`, ascending by id.
    pub fn cell_ues(&self, cell: usize) -> &[usize] {
        &self.cell_ues[cell]
    }

    /// Same network with every demand replaced.
    pub fn with_demands(&self, demand: Vec<f64>) -> Result<Self> {
        Self::new(
            self.ue_home.clone(),
            self.gain.clone(),
            self.p_ru.clone(),
            self.sigma2,
            demand,
            self.load_limit,
        )
    }

    /// Same network with one common demand for all users.
    pub fn with_uniform_demand(&self, demand: f64) -> Result<Self> {
        self.with_demands(vec![demand; self.n_ues()])
    }

    pub fn with_load_limit(&self, load_limit: f64) -> Result<Self> {
        Self::new(
            self.ue_home.clone(),
            self.gain.clone(),
            self.p_ru.clone(),
            self.sigma2,
            self.demand.clone(),
            load_limit,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Unit of the `gain` matrix in the JSON document.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainUnit {
    #[default]
    Linear,
    Db,
}

/// JSON shape of [`NetworkModel`]. Gains may be given in dB.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub n_cells: usize,
    pub ue_home: Vec<usize>,
    #[serde(default)]
    pub gain_unit: GainUnit,
    pub gain: Vec<Vec<f64>>,
    pub p_ru: Vec<f64>,
    pub sigma2: f64,
    pub demand: Vec<f64>,
    pub load_limit: f64,
}

impl TryFrom<NetworkFile> for NetworkModel {
    type Error = Error;

    fn try_from(file: NetworkFile) -> Result<Self> {
        if file.n_cells != file.p_ru.len() {
            return Err(Error::InvalidModel(format!(
                "n_cells = {} but {} per-RU powers given",
                file.n_cells,
                file.p_ru.len()
            )));
        }
        let gain = match file.gain_unit {
            GainUnit::Linear => file.gain,
            GainUnit::Db => file
                .gain
                .into_iter()
                .map(|row| row.into_iter().map(db_to_linear).collect())
                .collect(),
        };
        NetworkModel::new(
            file.ue_home,
            gain,
            file.p_ru,
            file.sigma2,
            file.demand,
            file.load_limit,
        )
    }
}

impl From<NetworkModel> for NetworkFile {
    fn from(net: NetworkModel) -> Self {
        NetworkFile {
            n_cells: net.n_cells,
            ue_home: net.ue_home,
            gain_unit: GainUnit::Linear,
            gain: net.gain,
            p_ru: net.p_ru,
            sigma2: net.sigma2,
            demand: net.demand,
            load_limit: net.load_limit,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Per-cell loads, the fixed-point variable. Entries may exceed 1 before the
/// load limit is checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LoadVector(Vec<f64>);

impl LoadVector {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if let Some(i) = rho.iter().position(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidLoad(format!("rho[{i}] = {}", rho[i])));
        }
        Ok(Self(rho))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, cell: usize) -> f64 {
        self.0[cell]
    }

    /// Replaces one entry. Panics on a negative or non-finite value.
    pub fn set(&mut self, cell: usize, value: f64) {
        assert!(
            value.is_finite() && value >= 0.0,
            "load {value} is not a valid load"
        );
        self.0[cell] = value;
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|r| r * alpha).collect())
    }

    /// `max_i |self_i - other_i|`.
    pub fn sup_distance(&self, other: &LoadVector) -> f64 {
        assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for LoadVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LoadVector> for Vec<f64> {
    fn from(v: LoadVector) -> Self {
        v.0
    }
}

/// Interference-plus-noise over own gain:
/// `(sum_{k != home} p_k g_k,ue rho_k + sigma2) / g_home,ue`.
pub fn effective_noise(net: &NetworkModel, rho: &LoadVector, ue: usize) -> f64 {
    assert_eq!(rho.len(), net.n_cells(), "load vector length mismatch");
    let home = net.home(ue);
    let interference: f64 = (0..net.n_cells())
        .filter(|&k| k != home)
        .map(|k| net.p_ru(k) * net.gain(k, ue) * rho.get(k))
        .sum();
    (interference + net.sigma2()) / net.gain(home, ue)
}

/// Effective noise of every user in the network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveNoise(Vec<f64>);

impl EffectiveNoise {
    pub fn compute(net: &NetworkModel, rho: &LoadVector) -> Self {
        Self(
            (0..net.n_ues())
                .map(|j| effective_noise(net, rho, j))
                .collect(),
        )
    }

    pub fn get(&self, ue: usize) -> f64 {
        self.0[ue]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Users sharing resource units, listed in SIC decoding order: the first
/// member has the smallest effective noise and cancels everyone after it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Group {
    pub members: Vec<usize>,
}

impl Group {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, ue: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == ue)
    }

    /// Whether `h` is decoded (and cancelled) before `j`'s own signal,
    /// i.e. `theta_hj = 1`.
    pub fn precedes(&self, h: usize, j: usize) -> bool {
        match (self.position(h), self.position(j)) {
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }
}

/// Compares `(w, id)` pairs: ascending effective noise, ties by ascending id.
pub fn order_cmp(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// SIC decoding order: ascending `w`, ties broken by ascending user id.
/// `w[k]` is the effective noise of `members[k]`.
pub fn decoding_order(w: &[f64], members: &[usize]) -> Group {
    assert_eq!(w.len(), members.len());
    assert!(!members.is_empty(), "a group needs at least one member");
    let mut keyed: Vec<(f64, usize)> = w.iter().copied().zip(members.iter().copied()).collect();
    keyed.sort_by(|a, b| order_cmp(*a, *b));
    Group {
        members: keyed.into_iter().map(|(_, id)| id).collect(),
    }
}

/// Per-RU capacity (nats) of member `j`: `ln(1 + q_j / (sum of earlier q + w_j))`.
/// `q` is aligned with `group.members`.
pub fn capacity(q: &[f64], w_j: f64, group: &Group, j: usize) -> f64 {
    assert_eq!(q.len(), group.len());
    let pos = group
        .position(j)
        .expect("user is not a member of the group");
    let intra: f64 = q[..pos].iter().sum();
    (q[pos] / (intra + w_j)).ln_1p()
}

/// Allocation of one cell: a partition of its users into groups, the RU
/// fraction `x` of each group and the per-member power split `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSolution {
    pub cell: usize,
    pub groups: Vec<Group>,
    pub x: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub load: f64,
}

impl CellSolution {
    pub fn empty(cell: usize) -> Self {
        Self {
            cell,
            groups: Vec::new(),
            x: Vec::new(),
            q: Vec::new(),
            load: 0.0,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
