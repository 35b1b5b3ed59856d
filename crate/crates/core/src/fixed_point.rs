//! The network-wide load-coupling iteration `rho <- f(rho)`.
//!
//! Each `f_i` is a standard interference function (positive, monotone,
//! strictly scalable), so the iteration converges to the unique fixed point
//! from any nonnegative start, whether cells update together (Jacobi) or one
//! after another (Gauss-Seidel). Decoding orders and groupings are re-derived
//! in every sweep and may differ between sweeps.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{CellSolution, Group, LoadVector, NetworkModel};
use crate::single_cell::{solve_cell, GroupingPolicy};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// All cells update from the previous iterate, in parallel.
    #[default]
    Jacobi,
    /// Cells update in index order, each seeing already-updated peers.
    GaussSeidel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub schedule: Schedule,
    /// Stop once the sup-norm change between iterates is strictly below this.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Starting loads; all zeros when absent.
    pub initial: Option<LoadVector>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::Jacobi,
            epsilon: 1e-4,
            max_iters: 200,
            initial: None,
        }
    }
}

impl SolveConfig {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_initial(mut self, initial: LoadVector) -> Self {
        self.initial = Some(initial);
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    fn validate(&self, n_cells: usize) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if let Some(init) = &self.initial {
            if init.len() != n_cells {
                return Err(Error::InvalidConfig(format!(
                    "initial load has {} entries for {n_cells} cells",
                    init.len()
                )));
            }
        }
        Ok(())
    }
}

/// Iterates, sup-norm steps and decoding orders of one solve.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    /// `loads[0]` is the start, `loads[k]` the k-th iterate.
    pub loads: Vec<LoadVector>,
    /// `deltas[k - 1] = ||loads[k] - loads[k - 1]||_inf`.
    pub deltas: Vec<f64>,
    /// Groups (in decoding order) chosen by each cell in each sweep.
    pub groups: Vec<Vec<Vec<Group>>>,
    /// Per sweep and cell: user pairs grouped together in this sweep and the
    /// previous one whose relative decoding order was reversed.
    pub order_flips: Vec<Vec<usize>>,
    pub converged: bool,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.deltas.len()
    }

    pub fn last_delta(&self) -> f64 {
        self.deltas.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn total_flips(&self) -> usize {
        self.order_flips.iter().flatten().sum()
    }

    /// Columns: `iteration,cell,rho,delta_sup_norm,order_flips`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,cell,rho,delta_sup_norm,order_flips\n");
        for k in 1..self.loads.len() {
            for (cell, rho) in self.loads[k].as_slice().iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{k},{cell},{rho},{},{}",
                    self.deltas[k - 1],
                    self.order_flips[k - 1][cell]
                );
            }
        }
        out
    }
}

fn count_flips(prev: &[Group], next: &[Group]) -> usize {
    let mut flips = 0;
    for g in next {
        for (a, &h) in g.members.iter().enumerate() {
            for &j in &g.members[a + 1..] {
                // h precedes j now; a flip if some earlier group had j before h.
                if prev.iter().any(|pg| pg.precedes(j, h)) {
                    flips += 1;
                }
            }
        }
    }
    flips
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSolution {
    pub rho: LoadVector,
    /// Per-cell allocations evaluated at the final loads.
    pub cells: Vec<CellSolution>,
    pub trace: IterationTrace,
}

/// Result of [`solve_within_limit`].
#[derive(Debug, Clone, PartialEq)]
pub enum BoundedOutcome {
    Converged(FixedPointSolution),
    /// An iterate already exceeds the limit; since iterates from zero only
    /// grow, so does the fixed point.
    ExceedsLimit {
        cell: usize,
        iteration: usize,
        rho: LoadVector,
    },
}

/// Iterates `rho <- f(rho)` until the sup-norm step is below `cfg.epsilon`.
/// Fails with [`Error::NotConverged`] (carrying the trace) after
/// `cfg.max_iters` sweeps.
pub fn solve(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    cfg: &SolveConfig,
) -> Result<FixedPointSolution> {
    match iterate(net, policy, cfg, None)? {
        BoundedOutcome::Converged(sol) => Ok(sol),
        BoundedOutcome::ExceedsLimit { .. } => unreachable!("no limit was set"),
    }
}

/// Like [`solve`] from the all-zero start, but stops as soon as any iterate
/// exceeds `limit`. Used by demand searches, where most probes are
/// infeasible and would otherwise iterate towards very large loads.
pub fn solve_within_limit(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    cfg: &SolveConfig,
    limit: f64,
) -> Result<BoundedOutcome> {
    if cfg.initial.as_ref().is_some_and(|r| r.max() > 0.0) {
        return Err(Error::InvalidConfig(
            "early stopping on the load limit needs the all-zero start".into(),
        ));
    }
    iterate(net, policy, cfg, Some(limit))
}

fn iterate(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    cfg: &SolveConfig,
    limit: Option<f64>,
) -> Result<BoundedOutcome> {
    policy.validate()?;
    cfg.validate(net.n_cells())?;
    let n = net.n_cells();
    let mut rho = cfg.initial.clone().unwrap_or_else(|| LoadVector::zeros(n));
    let mut trace = IterationTrace {
        loads: vec![rho.clone()],
        ..Default::default()
    };

    for k in 1..=cfg.max_iters {
        let sweep: Vec<CellSolution> = match cfg.schedule {
            Schedule::Jacobi => (0..n)
                .into_par_iter()
                .map(|i| solve_cell(net, i, &rho, policy))
                .collect::<Result<_>>()?,
            Schedule::GaussSeidel => {
                let mut current = rho.clone();
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let sol = solve_cell(net, i, &current, policy)?;
                    current.set(i, sol.load);
                    out.push(sol);
                }
                out
            }
        };
        let next = LoadVector::new(sweep.iter().map(|s| s.load).collect())?;
        let delta = next.sup_distance(&rho);
        let groups: Vec<Vec<Group>> = sweep.into_iter().map(|s| s.groups).collect();
        let flips = match trace.groups.last() {
            Some(prev) => prev
                .iter()
                .zip(&groups)
                .map(|(p, g)| count_flips(p, g))
                .collect(),
            None => vec![0; n],
        };
        trace.deltas.push(delta);
        trace.groups.push(groups);
        trace.order_flips.push(flips);
        trace.loads.push(next.clone());
        rho = next;

        if let Some(limit) = limit {
            if let Some(cell) = (0..n).find(|&i| rho.get(i) > limit) {
                return Ok(BoundedOutcome::ExceedsLimit {
                    cell,
                    iteration: k,
                    rho,
                });
            }
        }
        if delta < cfg.epsilon {
            trace.converged = true;
            let cells = (0..n)
                .into_par_iter()
                .map(|i| solve_cell(net, i, &rho, policy))
                .collect::<Result<_>>()?;
            return Ok(BoundedOutcome::Converged(FixedPointSolution {
                rho,
                cells,
                trace,
            }));
        }
    }
    Err(Error::NotConverged {
        trace: Box::new(trace),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Feasibility {
    Feasible,
    Infeasible { violating_cells: Vec<usize> },
}

/// Post-processing of the load limit: feasible iff every `rho_i <= limit`.
pub fn check_feasibility(rho: &LoadVector, limit: f64) -> Feasibility {
    let violating_cells: Vec<usize> = (0..rho.len()).filter(|&i| rho.get(i) > limit).collect();
    if violating_cells.is_empty() {
        Feasibility::Feasible
    } else {
        Feasibility::Infeasible { violating_cells }
    }
}

/// Cost functions of the cell loads, each increasing in every entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Sum,
    Max,
    Weighted(Vec<f64>),
}

pub fn objective(rho: &LoadVector, kind: &Objective) -> f64 {
    match kind {
        Objective::Sum => rho.as_slice().iter().sum(),
        Objective::Max => rho.max(),
        Objective::Weighted(weights) => {
            assert_eq!(weights.len(), rho.len());
            weights.iter().zip(rho.as_slice()).map(|(a, b)| a * b).sum()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SifProbeConfig {
    pub trials: usize,
    pub seed: u64,
    /// Loads are drawn uniformly from `[0, max_load]`.
    pub max_load: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl Default for SifProbeConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            max_load: 1.0,
            alpha_min: 1.0,
            alpha_max: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SifReport {
    pub trials: usize,
    pub evaluations: usize,
    /// Smallest `f_i(rho) - f_i(rho')` seen (rho' <= rho); never below
    /// `-1e-12 f_i(rho)`.
    pub worst_monotonicity_margin: f64,
    /// Smallest `(alpha f_i(rho) - f_i(alpha rho)) / (alpha f_i(rho))` over
    /// cells with positive load; `None` when every cell had zero load.
    pub worst_scalability_margin: Option<f64>,
}

/// Random check of monotonicity and strict scalability of every `f_i`.
/// Scalability is only asserted for cells with positive load, since a cell
/// without demand has `f_i = 0` everywhere.
pub fn sif_probe(
    net: &NetworkModel,
    policy: &GroupingPolicy,
    probe: &SifProbeConfig,
) -> Result<SifReport> {
    if probe.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if !(probe.alpha_min >= 1.0 && probe.alpha_max > probe.alpha_min) {
        return Err(Error::InvalidConfig(
            "alpha range must lie in (1, inf)".into(),
        ));
    }
    let n = net.n_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    let mut report = SifReport {
        trials: probe.trials,
        evaluations: 0,
        worst_monotonicity_margin: f64::INFINITY,
        worst_scalability_margin: None,
    };
    for _ in 0..probe.trials {
        let hi: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..=probe.max_load))
            .collect();
        let lo: Vec<f64> = hi.iter().map(|r| r * rng.random_range(0.0..=1.0)).collect();
        let mut alpha = rng.random_range(probe.alpha_min..=probe.alpha_max);
        if alpha <= 1.0 {
            alpha = probe.alpha_max;
        }
        let hi = LoadVector::new(hi)?;
        let lo = LoadVector::new(lo)?;
        let scaled = hi.scaled(alpha)?;
        for i in 0..n {
            let f_hi = solve_cell(net, i, &hi, policy)?.load;
            let f_lo = solve_cell(net, i, &lo, policy)?.load;
            let f_scaled = solve_cell(net, i, &scaled, policy)?.load;
            report.evaluations += 1;

            let mono = f_hi - f_lo;
            if mono < -1e-12 * f_hi {
                return Err(Error::SifViolation(format!(
                    "monotonicity: cell {i}, f(rho) = {f_hi} < f(rho') = {f_lo}"
                )));
            }
            report.worst_monotonicity_margin = report.worst_monotonicity_margin.min(mono);

            if f_hi > 0.0 {
                let margin = (alpha * f_hi - f_scaled) / (alpha * f_hi);
                if margin.is_nan() || margin <= 0.0 {
                    return Err(Error::SifViolation(format!(
                        "scalability: cell {i}, alpha = {alpha}, alpha f(rho) = {} <= f(alpha rho) = {f_scaled}",
                        alpha * f_hi
                    )));
                }
                let worst = report.worst_scalability_margin.get_or_insert(margin);
                *worst = worst.min(margin);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn two_cells() -> NetworkModel {
        NetworkModel::new(
            vec![0, 0, 1, 1],
            vec![vec![1.0, 0.4, 0.05, 0.2], vec![0.1, 0.3, 1.0, 0.5]],
            vec![1.0, 1.0],
            0.05,
            vec![0.2, 0.1, 0.15, 0.25],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn single_cell_network_reaches_its_optimum_after_one_sweep() {
        let net =
            NetworkModel::new(vec![0], vec![vec![1.0]], vec![1.0], 1.0, vec![LN_2], 1.0).unwrap();
        let sol = solve(&net, &GroupingPolicy::pairs(), &SolveConfig::default()).unwrap();
        assert!((sol.trace.loads[1].get(0) - 1.0).abs() < 1e-15);
        assert_eq!(sol.trace.deltas[1], 0.0);
        assert_eq!(sol.trace.iterations(), 2);
    }

    #[test]
    fn zero_demand_fixed_point_is_zero() {
        let net = two_cells().with_uniform_demand(0.0).unwrap();
        let sol = solve(&net, &GroupingPolicy::pairs(), &SolveConfig::default()).unwrap();
        assert_eq!(sol.rho.max(), 0.0);
    }

    #[test]
    fn schedules_agree() {
        let net = two_cells();
        let cfg = SolveConfig::default().with_epsilon(1e-12);
        let a = solve(&net, &GroupingPolicy::pairs(), &cfg).unwrap();
        let b = solve(
            &net,
            &GroupingPolicy::pairs(),
            &cfg.clone().with_schedule(Schedule::GaussSeidel),
        )
        .unwrap();
        assert!(a.rho.sup_distance(&b.rho) < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported_with_trace() {
        let cfg = SolveConfig::default()
            .with_epsilon(1e-300)
            .with_max_iters(3);
        match solve(&two_cells(), &GroupingPolicy::pairs(), &cfg) {
            Err(Error::NotConverged { trace }) => assert_eq!(trace.iterations(), 3),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn bounded_solve_stops_early() {
        let net = two_cells().with_uniform_demand(50.0).unwrap();
        let out =
            solve_within_limit(&net, &GroupingPolicy::oma(), &SolveConfig::default(), 1.0).unwrap();
        assert!(matches!(
            out,
            BoundedOutcome::ExceedsLimit { iteration: 1, .. }
        ));
        let cfg = SolveConfig::default().with_initial(LoadVector::filled(2, 1.0).unwrap());
        assert!(solve_within_limit(&net, &GroupingPolicy::oma(), &cfg, 1.0).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let v = |x: Vec<f64>| LoadVector::new(x).unwrap();
        assert_eq!(
            check_feasibility(&v(vec![0.5, 0.7]), 1.0),
            Feasibility::Feasible
        );
        assert_eq!(
            check_feasibility(&v(vec![0.5, 1.2]), 1.0),
            Feasibility::Infeasible {
                violating_cells: vec![1]
            }
        );
        assert_eq!(check_feasibility(&v(vec![1.0]), 1.0), Feasibility::Feasible);
    }

    #[test]
    fn objective_examples() {
        let rho = LoadVector::new(vec![0.2, 0.3]).unwrap();
        assert!((objective(&rho, &Objective::Sum) - 0.5).abs() < 1e-15);
        assert_eq!(objective(&rho, &Objective::Max), 0.3);
        let rho = LoadVector::new(vec![0.5, 0.25]).unwrap();
        assert_eq!(objective(&rho, &Objective::Weighted(vec![1.0, 2.0])), 1.0);
    }

    #[test]
    fn sif_probe_on_zero_demand_is_tight() {
        let net = two_cells().with_uniform_demand(0.0).unwrap();
        let report = sif_probe(&net, &GroupingPolicy::pairs(), &SifProbeConfig::default()).unwrap();
        assert_eq!(report.worst_monotonicity_margin, 0.0);
        assert_eq!(report.worst_scalability_margin, None);
    }

    #[test]
    fn sif_probe_holds_near_alpha_one() {
        let probe = SifProbeConfig {
            trials: 50,
            alpha_min: 1.0 + 1e-6,
            alpha_max: 1.0 + 2e-6,
            ..Default::default()
        };
        let report = sif_probe(&two_cells(), &GroupingPolicy::pairs(), &probe).unwrap();
        assert!(report.worst_scalability_margin.unwrap() > 0.0);
    }

    #[test]
    fn trace_csv_has_one_row_per_cell_and_iteration() {
        let sol = solve(
            &two_cells(),
            &GroupingPolicy::pairs(),
            &SolveConfig::default(),
        )
        .unwrap();
        let csv = sol.trace.to_csv();
        assert_eq!(csv.lines().count(), 1 + 2 * sol.trace.iterations());
        assert!(csv.starts_with("iteration,cell,rho,delta_sup_norm,order_flips"));
    }
}
