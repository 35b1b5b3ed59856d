//! Experiment harness: throughput search, load reports, user-count and
//! edge-proportion sweeps, convergence traces and the `verify` suites.
//!
//! Every experiment writes CSV files with one row per (x-value, series) plus a
//! `manifest.json` listing each file with its SHA-256. Outputs contain no
//! timestamps, so the same spec produces byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fixed_point::{self, sif_probe, BoundedOutcome, SifProbeConfig, SolveConfig};
use crate::model::{capacity, LoadVector, NetworkModel};
use crate::rate_region::{recover_power_split, verify_order_optimality};
use crate::scenario::{generate, generator_version, ScenarioConfig};
use crate::single_cell::{solve_cell, GroupingMode, GroupingPolicy};
use crate::{Error, Result};

/// Relative width at which the demand bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ThroughputVsLoadlimit,
    CellLoads,
    UsersCdf,
    SpectralVsEdge,
    ConvergenceTrace,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ThroughputVsLoadlimit => "throughput_vs_loadlimit",
            Self::CellLoads => "cell_loads",
            Self::UsersCdf => "users_cdf",
            Self::SpectralVsEdge => "spectral_vs_edge",
            Self::ConvergenceTrace => "convergence_trace",
            Self::Verify => "verify",
        }
    }
}

/// One experiment. The grouping policy is the NOMA series; OMA is always run
/// alongside it as the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub scenario: ScenarioConfig,
    pub policy: GroupingPolicy,
    pub solver: SolveConfig,
    /// Scenarios use seeds `scenario.seed + i` for `i < seeds`.
    pub seeds: usize,
    pub load_limits: Vec<f64>,
    pub demand_grid_bps: Vec<f64>,
    pub users_per_cell: Vec<usize>,
    pub edge_fractions: Vec<f64>,
    /// Where results go; not part of the manifest, so results do not depend
    /// on it.
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self::new(ExperimentKind::ThroughputVsLoadlimit)
    }
}

impl ExperimentSpec {
    /// Defaults for `kind`, writing to `results/<kind>`.
    pub fn new(kind: ExperimentKind) -> Self {
        let mut solver = SolveConfig::default();
        let mut demand_grid_bps = vec![];
        let mut seeds = 5;
        match kind {
            ExperimentKind::ConvergenceTrace => {
                solver.epsilon = 1e-10;
                demand_grid_bps = vec![1.5e6, 0.75e6, 0.15e6];
            }
            ExperimentKind::UsersCdf => {
                demand_grid_bps = vec![0.5e6, 1.0e6];
                seeds = 20;
            }
            ExperimentKind::Verify => seeds = 1,
            _ => {}
        }
        Self {
            kind,
            scenario: ScenarioConfig::default(),
            policy: GroupingPolicy::pairs(),
            solver,
            seeds,
            load_limits: (1..=10).map(|k| k as f64 / 10.0).collect(),
            demand_grid_bps,
            users_per_cell: (2..=8).map(|k| 5 * k).collect(),
            edge_fractions: (0..=5).map(|k| k as f64 / 5.0).collect(),
            out_dir: PathBuf::from("results").join(kind.name()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        self.scenario.validate()?;
        self.policy.validate()?;
        if self.seeds == 0 {
            return bad("seeds (trials) must be at least 1");
        }
        let nonempty = match self.kind {
            ExperimentKind::ThroughputVsLoadlimit => !self.load_limits.is_empty(),
            ExperimentKind::UsersCdf => {
                !self.users_per_cell.is_empty() && !self.demand_grid_bps.is_empty()
            }
            ExperimentKind::SpectralVsEdge => !self.edge_fractions.is_empty(),
            ExperimentKind::ConvergenceTrace => !self.demand_grid_bps.is_empty(),
            ExperimentKind::CellLoads | ExperimentKind::Verify => true,
        };
        if !nonempty {
            return bad("the sweep grid for this experiment is empty");
        }
        if self.load_limits.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
            return bad("load limits must lie in (0, 1]");
        }
        if self.edge_fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return bad("edge fractions must lie in [0, 1]");
        }
        if self
            .demand_grid_bps
            .iter()
            .any(|&d| !(d > 0.0 && d.is_finite()))
        {
            return bad("demands must be positive");
        }
        if self.users_per_cell.contains(&0) {
            return bad("users per cell must be at least 1");
        }
        Ok(())
    }

    fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64)
            .map(|i| self.scenario.seed.wrapping_add(i))
            .collect()
    }
}

/// Short label of a policy used as a CSV series name.
pub fn policy_label(policy: &GroupingPolicy) -> String {
    match &policy.mode {
        GroupingMode::Oma => "oma".into(),
        GroupingMode::Pairs => "noma_pairs".into(),
        GroupingMode::Fixed { .. } => "noma_fixed".into(),
        GroupingMode::Exhaustive => format!("noma_exhaustive{}", policy.max_group_size),
    }
}

/// Whether uniform demand `d` (normalized) keeps every cell within `limit`.
/// Non-convergence and rate overflow count as infeasible.
pub fn demand_feasible(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    limit: f64,
    solver: &SolveConfig,
    d: f64,
) -> Result<bool> {
    let probe = net.with_uniform_demand(d)?;
    let cfg = SolveConfig {
        initial: None,
        ..solver.clone()
    };
    match fixed_point::solve_within_limit(&probe, policy, &cfg, limit) {
        Ok(BoundedOutcome::Converged(sol)) => Ok(sol.rho.max() <= limit),
        Ok(BoundedOutcome::ExceedsLimit { .. }) => Ok(false),
        Err(Error::NotConverged { .. } | Error::Overflow { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Largest common normalized per-user demand whose fixed point stays within
/// `limit` in every cell, to relative precision [`BISECTION_REL_TOL`].
/// Returns 0 if no positive demand is feasible.
pub fn max_demand(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    limit: f64,
    solver: &SolveConfig,
) -> Result<f64> {
    let feasible = |d: f64| demand_feasible(net, policy, limit, solver, d);
    let mut hi = 0.05;
    let mut lo;
    if feasible(hi)? {
        lo = hi;
        loop {
            hi *= 2.0;
            if !feasible(hi)? {
                break;
            }
            lo = hi;
            if hi > 1e3 {
                return Ok(lo);
            }
        }
    } else {
        loop {
            let mid = hi / 2.0;
            if mid < 1e-12 {
                return Ok(0.0);
            }
            if feasible(mid)? {
                lo = mid;
                break;
            }
            hi = mid;
        }
    }
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Maximum supported throughput per cell in Mbps: users per cell times the
/// largest common per-user demand.
pub fn max_throughput(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    limit: f64,
    solver: &SolveConfig,
    scenario: &ScenarioConfig,
) -> Result<f64> {
    let d = max_demand(net, policy, limit, solver)?;
    let users_per_cell = net.n_ues() as f64 / net.n_cells() as f64;
    Ok(users_per_cell * scenario.demand_to_bps(d) / 1e6)
}

/// Mean and range of a set of samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Band {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        Self {
            mean: samples.iter().sum::<f64>() / n as f64,
            min: samples.iter().copied().fold(f64::INFINITY, f64::min),
            max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            n,
        }
    }
}

/// A file produced by [`run`] and its content hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub kind: ExperimentKind,
    pub seeds: Vec<u64>,
    pub spec: ExperimentSpec,
    pub files: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Runs `spec`, writes its CSV files and `manifest.json` into
/// `spec.out_dir`, and returns the manifest. A failing `verify` run still
/// writes its report before returning [`Error::VerifyFailed`].
pub fn run(spec: &ExperimentSpec) -> Result<Manifest> {
    spec.validate()?;
    let mut verify_failure = None;
    let outputs: Vec<(String, String)> = match spec.kind {
        ExperimentKind::ThroughputVsLoadlimit => {
            vec![("throughput_vs_loadlimit.csv".into(), throughput_csv(spec)?)]
        }
        ExperimentKind::CellLoads => vec![("cell_loads.csv".into(), cell_loads_csv(spec)?)],
        ExperimentKind::UsersCdf => vec![("users_cdf.csv".into(), users_cdf_csv(spec)?)],
        ExperimentKind::SpectralVsEdge => {
            vec![("spectral_vs_edge.csv".into(), spectral_csv(spec)?)]
        }
        ExperimentKind::ConvergenceTrace => {
            vec![("convergence_trace.csv".into(), convergence_csv(spec)?)]
        }
        ExperimentKind::Verify => {
            let report = verify(spec.scenario.seed);
            if !report.all_passed() {
                verify_failure = Some(report.failures().join("; "));
            }
            vec![("verify.csv".into(), report.to_csv())]
        }
    };
    let manifest = write_outputs(spec, &outputs)?;
    match verify_failure {
        Some(msg) => Err(Error::VerifyFailed(msg)),
        None => Ok(manifest),
    }
}

fn write_outputs(spec: &ExperimentSpec, outputs: &[(String, String)]) -> Result<Manifest> {
    fs::create_dir_all(&spec.out_dir)?;
    let mut files = Vec::new();
    for (name, content) in outputs {
        fs::write(spec.out_dir.join(name), content)?;
        files.push(OutputFile {
            path: name.clone(),
            sha256: sha256_hex(content.as_bytes()),
            bytes: content.len(),
        });
    }
    let manifest = Manifest {
        version: generator_version(),
        kind: spec.kind,
        seeds: spec.seed_list(),
        spec: spec.clone(),
        files,
    };
    fs::write(
        manifest_path(&spec.out_dir),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}

pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}

fn series(spec: &ExperimentSpec) -> Vec<(String, GroupingPolicy)> {
    let mut out = vec![("oma".to_string(), GroupingPolicy::oma())];
    if !spec.policy.is_oma() {
        out.push((policy_label(&spec.policy), spec.policy.clone()));
    }
    out
}

fn networks(spec: &ExperimentSpec, scenario: &ScenarioConfig) -> Result<Vec<NetworkModel>> {
    spec.seed_list()
        .into_par_iter()
        .map(|seed| {
            generate(&ScenarioConfig {
                seed,
                ..scenario.clone()
            })
        })
        .collect()
}

fn band_row(out: &mut String, x: impl std::fmt::Display, series: &str, samples: &[f64]) {
    let b = Band::of(samples);
    out.push_str(&format!(
        "{x},{series},{},{},{},{}\n",
        b.mean, b.min, b.max, b.n
    ));
}

/// Max throughput (Mbps per cell) against the load limit.
fn throughput_csv(spec: &ExperimentSpec) -> Result<String> {
    let nets = networks(spec, &spec.scenario)?;
    let mut out = String::from("load_limit,series,mean_mbps,min_mbps,max_mbps,n_seeds\n");
    for &limit in &spec.load_limits {
        for (label, policy) in series(spec) {
            let samples: Vec<f64> = nets
                .par_iter()
                .map(|net| max_throughput(net, &policy, limit, &spec.solver, &spec.scenario))
                .collect::<Result<_>>()?;
            band_row(&mut out, limit, &label, &samples);
        }
    }
    Ok(out)
}

/// Per-cell loads of OMA and NOMA at the same demand, each sorted
/// ascending, at OMA's maximum supported demand for the scenario load limit.
pub fn loads_at_oma_capacity(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    scenario: &ScenarioConfig,
    solver: &SolveConfig,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let d = max_demand(net, &GroupingPolicy::oma(), scenario.load_limit, solver)?;
    let at = net.with_uniform_demand(d)?;
    let mut oma = fixed_point::solve(&at, &GroupingPolicy::oma(), solver)?
        .rho
        .into_vec();
    let mut noma = fixed_point::solve(&at, policy, solver)?.rho.into_vec();
    oma.sort_by(f64::total_cmp);
    noma.sort_by(f64::total_cmp);
    Ok((d, oma, noma))
}

fn cell_loads_csv(spec: &ExperimentSpec) -> Result<String> {
    let nets = networks(spec, &spec.scenario)?;
    let per_seed: Vec<(f64, Vec<f64>, Vec<f64>)> = nets
        .par_iter()
        .map(|net| loads_at_oma_capacity(net, &spec.policy, &spec.scenario, &spec.solver))
        .collect::<Result<_>>()?;
    let mut out = String::from("rank,series,mean_load,min_load,max_load,n_seeds\n");
    let n_cells = spec.scenario.n_cells();
    for rank in 0..n_cells {
        let oma: Vec<f64> = per_seed.iter().map(|s| s.1[rank]).collect();
        band_row(&mut out, rank + 1, "oma", &oma);
        if !spec.policy.is_oma() {
            let noma: Vec<f64> = per_seed.iter().map(|s| s.2[rank]).collect();
            band_row(&mut out, rank + 1, &policy_label(&spec.policy), &noma);
        }
    }
    Ok(out)
}

/// Fraction of trials in which every user is supported, against users per
/// cell, for each demand level and policy.
fn users_cdf_csv(spec: &ExperimentSpec) -> Result<String> {
    let mut out = String::from("users_per_cell,series,demand_bps,fraction_supported,n_trials\n");
    for &n in &spec.users_per_cell {
        let scenario = ScenarioConfig {
            ues_per_cell: n,
            ..spec.scenario.clone()
        };
        let nets = networks(spec, &scenario)?;
        for &bps in &spec.demand_grid_bps {
            let d = scenario.normalize_demand(bps);
            for (label, policy) in series(spec) {
                let ok: Vec<bool> = nets
                    .par_iter()
                    .map(|net| demand_feasible(net, &policy, scenario.load_limit, &spec.solver, d))
                    .collect::<Result<_>>()?;
                let frac = ok.iter().filter(|&&b| b).count() as f64 / ok.len() as f64;
                out.push_str(&format!("{n},{label}_{bps}bps,{bps},{frac},{}\n", ok.len()));
            }
        }
    }
    Ok(out)
}

/// Spectral efficiency (bits/s/Hz per cell) at maximum throughput against the
/// share of cell-edge users.
fn spectral_csv(spec: &ExperimentSpec) -> Result<String> {
    let mut out = String::from(
        "edge_fraction,series,mean_bps_per_hz,min_bps_per_hz,max_bps_per_hz,n_seeds\n",
    );
    for &frac in &spec.edge_fractions {
        let scenario = ScenarioConfig {
            edge_fraction: Some(frac),
            ..spec.scenario.clone()
        };
        let nets = networks(spec, &scenario)?;
        for (label, policy) in series(spec) {
            let samples: Vec<f64> = nets
                .par_iter()
                .map(|net| {
                    let mbps =
                        max_throughput(net, &policy, scenario.load_limit, &spec.solver, &scenario)?;
                    Ok(mbps * 1e6 / scenario.total_bw_hz)
                })
                .collect::<Result<_>>()?;
            band_row(&mut out, frac, &label, &samples);
        }
    }
    Ok(out)
}

/// Sup-norm step per iteration for each demand level, NOMA policy.
pub fn convergence_deltas(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    solver: &SolveConfig,
) -> Result<Vec<f64>> {
    match fixed_point::solve(net, policy, solver) {
        Ok(sol) => Ok(sol.trace.deltas),
        Err(Error::NotConverged { trace }) => Ok(trace.deltas),
        Err(e) => Err(e),
    }
}

fn convergence_csv(spec: &ExperimentSpec) -> Result<String> {
    let nets = networks(spec, &spec.scenario)?;
    let mut out = String::from("iteration,series,mean_delta,min_delta,max_delta,n_seeds\n");
    for &bps in &spec.demand_grid_bps {
        let d = spec.scenario.normalize_demand(bps);
        let traces: Vec<Vec<f64>> = nets
            .par_iter()
            .map(|net| convergence_deltas(&net.with_uniform_demand(d)?, &spec.policy, &spec.solver))
            .collect::<Result<_>>()?;
        let longest = traces.iter().map(Vec::len).max().unwrap_or(0);
        for k in 0..longest {
            let samples: Vec<f64> = traces.iter().filter_map(|t| t.get(k).copied()).collect();
            band_row(&mut out, k + 1, &format!("{bps}bps"), &samples);
        }
    }
    Ok(out)
}

/// Outcome of one property suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    /// First failure, if any.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites
            .iter()
            .all(|s| s.cases > 0 && s.passed == s.cases)
    }

    pub fn failures(&self) -> Vec<String> {
        self.suites
            .iter()
            .filter(|s| s.passed != s.cases || s.cases == 0)
            .map(|s| {
                format!(
                    "{}: {}/{} passed{}",
                    s.name,
                    s.passed,
                    s.cases,
                    s.failure
                        .as_deref()
                        .map(|f| format!(" ({f})"))
                        .unwrap_or_default()
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,cases,passed\n");
        for s in &self.suites {
            out.push_str(&format!("{},{},{}\n", s.name, s.cases, s.passed));
        }
        out
    }
}

fn suite(
    name: &str,
    cases: usize,
    mut check: impl FnMut(usize) -> std::result::Result<(), String>,
) -> SuiteResult {
    let mut passed = 0;
    let mut failure = None;
    for i in 0..cases {
        match check(i) {
            Ok(()) => passed += 1,
            Err(msg) => {
                failure.get_or_insert(format!("case {i}: {msg}"));
            }
        }
    }
    SuiteResult {
        name: name.into(),
        cases,
        passed,
        failure,
    }
}

/// Random multi-cell network with `n_cells` cells and 1 to `max_ues` users
/// per cell: home gains in `[0.5, 1]`, cross gains in `[0.001, 0.1]`, unit
/// power, noise 0.05 and demands in `[0.02, 0.2]`.
pub fn random_network<R: Rng>(rng: &mut R, n_cells: usize, max_ues: usize) -> Result<NetworkModel> {
    let mut ue_home = Vec::new();
    for cell in 0..n_cells {
        let k = rng.random_range(1..=max_ues);
        ue_home.extend(std::iter::repeat_n(cell, k));
    }
    let n_ues = ue_home.len();
    let gain = (0..n_cells)
        .map(|cell| {
            ue_home
                .iter()
                .map(|&home| {
                    if home == cell {
                        rng.random_range(0.5..=1.0)
                    } else {
                        rng.random_range(0.001..=0.1)
                    }
                })
                .collect()
        })
        .collect();
    let demand = (0..n_ues).map(|_| rng.random_range(0.02..=0.2)).collect();
    NetworkModel::new(ue_home, gain, vec![1.0; n_cells], 0.05, demand, 1.0)
}

/// Runs the property suites on randomized instances derived from `seed`.
pub fn verify(seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = Vec::new();

    suites.push(suite("order_optimality", 200, |_| {
        let k = rng.random_range(2..=5);
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(1e-3..=10.0)).collect();
        let c: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=3.0)).collect();
        let report = verify_order_optimality(&w, &c).map_err(|e| e.to_string())?;
        if report.sic_power <= report.min_power * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(format!(
                "sic {} > min {}",
                report.sic_power, report.min_power
            ))
        }
    }));

    suites.push(suite("power_rate_round_trip", 1000, |_| {
        let k = rng.random_range(1..=5);
        let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(1e-3..=10.0)).collect();
        w.sort_by(f64::total_cmp);
        let c: Vec<f64> = (0..k).map(|_| rng.random_range(1e-3..=3.0)).collect();
        let q = recover_power_split(&w, &c).map_err(|e| e.to_string())?;
        let group = crate::Group {
            members: (0..k).collect(),
        };
        for j in 0..k {
            let back = capacity(&q, w[j], &group, j);
            if ((back - c[j]) / c[j]).abs() > 1e-10 {
                return Err(format!("member {j}: {back} vs {}", c[j]));
            }
        }
        Ok(())
    }));

    suites.push(suite("interference_function", 20, |i| {
        let n_cells = rng.random_range(3..=7);
        let net = random_network(&mut rng, n_cells, 4).map_err(|e| e.to_string())?;
        let probe = SifProbeConfig {
            trials: 10,
            seed: seed.wrapping_add(i as u64),
            ..Default::default()
        };
        match sif_probe(&net, &GroupingPolicy::pairs(), &probe) {
            Ok(r) if r.worst_scalability_margin.is_none_or(|m| m > 0.0) => Ok(()),
            Ok(r) => Err(format!(
                "scalability margin {:?}",
                r.worst_scalability_margin
            )),
            Err(e) => Err(e.to_string()),
        }
    }));

    suites.push(suite("fixed_point_uniqueness", 10, |_| {
        let n_cells = rng.random_range(2..=5);
        let net = random_network(&mut rng, n_cells, 4).map_err(|e| e.to_string())?;
        let policy = GroupingPolicy::pairs();
        let tight = SolveConfig::default()
            .with_epsilon(1e-10)
            .with_max_iters(1000);
        let from_zero = fixed_point::solve(&net, &policy, &tight).map_err(|e| e.to_string())?;
        let ones = LoadVector::filled(net.n_cells(), 1.0).map_err(|e| e.to_string())?;
        let from_one = fixed_point::solve(&net, &policy, &tight.clone().with_initial(ones))
            .map_err(|e| e.to_string())?;
        let gap = from_zero.rho.sup_distance(&from_one.rho);
        if gap > 1e-6 {
            return Err(format!("starts disagree by {gap}"));
        }
        let eps = 1e-4;
        let jacobi = fixed_point::solve(&net, &policy, &SolveConfig::default().with_epsilon(eps))
            .map_err(|e| e.to_string())?;
        let gs = fixed_point::solve(
            &net,
            &policy,
            &SolveConfig::default()
                .with_epsilon(eps)
                .with_schedule(fixed_point::Schedule::GaussSeidel),
        )
        .map_err(|e| e.to_string())?;
        let gap = jacobi.rho.sup_distance(&gs.rho);
        if gap > 10.0 * eps {
            return Err(format!("schedules disagree by {gap}"));
        }
        Ok(())
    }));

    suites.push(suite("matching_exactness", 50, |_| {
        let net = random_network(&mut rng, 2, 8).map_err(|e| e.to_string())?;
        let rho = LoadVector::new(vec![
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
        ])
        .map_err(|e| e.to_string())?;
        let exhaustive = GroupingPolicy::exhaustive(2).map_err(|e| e.to_string())?;
        for cell in 0..2 {
            let pairs = solve_cell(&net, cell, &rho, &GroupingPolicy::pairs())
                .map_err(|e| e.to_string())?;
            let best = solve_cell(&net, cell, &rho, &exhaustive).map_err(|e| e.to_string())?;
            if (pairs.load - best.load).abs() > 1e-12 * best.load {
                return Err(format!(
                    "matching {} vs enumeration {}",
                    pairs.load, best.load
                ));
            }
        }
        Ok(())
    }));

    suites.push(suite("noma_dominance", 10, |_| {
        let n_cells = rng.random_range(2..=5);
        let net = random_network(&mut rng, n_cells, 6).map_err(|e| e.to_string())?;
        let cfg = SolveConfig::default()
            .with_epsilon(1e-10)
            .with_max_iters(1000);
        let oma =
            fixed_point::solve(&net, &GroupingPolicy::oma(), &cfg).map_err(|e| e.to_string())?;
        let noma =
            fixed_point::solve(&net, &GroupingPolicy::pairs(), &cfg).map_err(|e| e.to_string())?;
        for i in 0..net.n_cells() {
            if noma.rho.get(i) > oma.rho.get(i) + 1e-9 {
                return Err(format!(
                    "cell {i}: noma {} > oma {}",
                    noma.rho.get(i),
                    oma.rho.get(i)
                ));
            }
        }
        Ok(())
    }));

    VerifyReport { suites }
}
