//! The per-cell map `f_i`: minimum load of one cell given the other cells'
//! loads.
//!
//! Every call recomputes each user's effective noise from the supplied loads,
//! orders each candidate group by it and re-optimizes the grouping. Nothing is
//! carried over between calls, so decoding orders are free to change between
//! fixed-point iterations.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::matching::max_weight_matching_f64;
use crate::model::{
    decoding_order, effective_noise, CellSolution, Group, LoadVector, NetworkModel,
};
use crate::rate_region::{min_group_load, GroupLoad};
use crate::{Error, Result};

/// Largest cell the exhaustive grouping (and [`enumerate_partitions`]) accepts.
pub const EXHAUSTIVE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GroupingMode {
    /// Every user alone on its resource units.
    Oma,
    /// Groups given up front, as lists of user ids.
    Fixed { partition: Vec<Vec<usize>> },
    /// Groups of at most two users, chosen by maximum-weight matching.
    Pairs,
    /// Best of all partitions with blocks up to `max_group_size`.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingPolicy {
    pub mode: GroupingMode,
    pub max_group_size: usize,
}

impl GroupingPolicy {
    pub fn oma() -> Self {
        Self {
            mode: GroupingMode::Oma,
            max_group_size: 1,
        }
    }

    pub fn pairs() -> Self {
        Self {
            mode: GroupingMode::Pairs,
            max_group_size: 2,
        }
    }

    pub fn exhaustive(max_group_size: usize) -> Result<Self> {
        let policy = Self {
            mode: GroupingMode::Exhaustive,
            max_group_size,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn fixed(partition: Vec<Vec<usize>>) -> Result<Self> {
        let max_group_size = partition.iter().map(Vec::len).max().unwrap_or(1);
        let policy = Self {
            mode: GroupingMode::Fixed { partition },
            max_group_size,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidPolicy(msg.to_string()));
        if self.max_group_size == 0 {
            return bad("max_group_size must be at least 1");
        }
        match &self.mode {
            GroupingMode::Pairs if self.max_group_size != 2 => {
                bad("pairs mode requires max_group_size = 2")
            }
            GroupingMode::Oma if self.max_group_size != 1 => {
                bad("oma mode requires max_group_size = 1")
            }
            GroupingMode::Fixed { partition } => {
                let mut seen = std::collections::HashSet::new();
                for block in partition {
                    if block.is_empty() {
                        return bad("fixed partition has an empty group");
                    }
                    for &ue in block {
                        if !seen.insert(ue) {
                            return Err(Error::InvalidPolicy(format!(
                                "user {ue} appears in two groups"
                            )));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_oma(&self) -> bool {
        matches!(self.mode, GroupingMode::Oma)
    }
}

/// Minimum load of `cell` when the other cells run at the loads in `rho`
/// (the cell's own entry is ignored).
pub fn solve_cell(
    net: &NetworkModel,
    cell: usize,
    rho: &LoadVector,
    policy: &GroupingPolicy,
) -> Result<CellSolution> {
    let ues = net.cell_ues(cell);
    let p = net.p_ru(cell);
    let w: HashMap<usize, f64> = ues
        .iter()
        .map(|&j| (j, effective_noise(net, rho, j)))
        .collect();

    let solve_group = |members: &[usize]| -> Result<(Group, GroupLoad)> {
        let wm: Vec<f64> = members.iter().map(|j| w[j]).collect();
        let group = decoding_order(&wm, members);
        let ws: Vec<f64> = group.members.iter().map(|j| w[j]).collect();
        let ds: Vec<f64> = group.members.iter().map(|&j| net.demand(j)).collect();
        let load = min_group_load(&ws, &ds, p)?;
        Ok((group, load))
    };

    let (active, idle): (Vec<usize>, Vec<usize>) = ues.iter().partition(|&&j| net.demand(j) > 0.0);
    let mut blocks: Vec<Vec<usize>> = idle.iter().map(|&j| vec![j]).collect();

    match &policy.mode {
        GroupingMode::Oma => blocks.extend(active.iter().map(|&j| vec![j])),
        GroupingMode::Fixed { partition } => {
            blocks.clear();
            let mut covered = 0;
            for block in partition {
                let inside = block
                    .iter()
                    .filter(|&&j| j < net.n_ues() && net.home(j) == cell)
                    .count();
                if inside == 0 {
                    continue;
                }
                if inside != block.len() {
                    return Err(Error::InvalidPolicy(format!(
                        "group {block:?} mixes cell {cell} with other cells"
                    )));
                }
                covered += block.len();
                blocks.push(block.clone());
            }
            if covered != ues.len() {
                return Err(Error::InvalidPolicy(format!(
                    "fixed partition covers {covered} of the {} users of cell {cell}",
                    ues.len()
                )));
            }
        }
        GroupingMode::Pairs => {
            let singles: Vec<f64> = active
                .iter()
                .map(|&j| solve_group(&[j]).map(|(_, l)| l.x))
                .collect::<Result<_>>()?;
            let n = active.len();
            let mut pair = vec![vec![0.0; n]; n];
            for a in 0..n {
                for b in a + 1..n {
                    let x = solve_group(&[active[a], active[b]])?.1.x;
                    pair[a][b] = x;
                    pair[b][a] = x;
                }
            }
            for local in optimal_pairing(&singles, &pair) {
                blocks.push(local.into_iter().map(|i| active[i]).collect());
            }
        }
        GroupingMode::Exhaustive => {
            if ues.len() > EXHAUSTIVE_CAP {
                return Err(Error::TooManyUsers {
                    n: ues.len(),
                    cap: EXHAUSTIVE_CAP,
                });
            }
            let local: Vec<usize> = (0..active.len()).collect();
            let mut cache: HashMap<u32, f64> = HashMap::new();
            let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
            for partition in enumerate_partitions(&local, policy.max_group_size)? {
                let mut total = 0.0;
                for block in &partition {
                    let mask = block.iter().fold(0u32, |m, &i| m | (1 << i));
                    let x = match cache.get(&mask) {
                        Some(x) => *x,
                        None => {
                            let members: Vec<usize> = block.iter().map(|&i| active[i]).collect();
                            let x = solve_group(&members)?.1.x;
                            cache.insert(mask, x);
                            x
                        }
                    };
                    total += x;
                }
                if best.as_ref().is_none_or(|(b, _)| total < *b) {
                    best = Some((total, partition));
                }
            }
            if let Some((_, partition)) = best {
                for block in partition {
                    blocks.push(block.into_iter().map(|i| active[i]).collect());
                }
            }
        }
    }

    // Canonical group order: by smallest member id.
    blocks.sort_by_key(|b| b.iter().copied().min());
    let mut solution = CellSolution::empty(cell);
    for block in blocks {
        let (group, load) = solve_group(&block)?;
        solution.x.push(load.x);
        solution.q.push(load.q);
        solution.groups.push(group);
    }
    solution.load = solution.x.iter().sum();
    Ok(solution)
}

/// Partition of `n` users into pairs and singletons minimizing total load.
/// `singles[j]` is user `j`'s load alone and `pair[h][j]` the load of the
/// pair `{h, j}`. Solved exactly as a maximum-weight matching with edge
/// weights `max(0, singles[h] + singles[j] - pair[h][j])`.
pub fn optimal_pairing(singles: &[f64], pair: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = singles.len();
    assert_eq!(pair.len(), n);
    let mut edges = Vec::new();
    for h in 0..n {
        for j in h + 1..n {
            let saving = singles[h] + singles[j] - pair[h][j];
            if saving > 0.0 {
                edges.push((h, j, saving));
            }
        }
    }
    let mate = max_weight_matching_f64(n, &edges);
    let mut blocks = Vec::new();
    for (v, m) in mate.iter().enumerate() {
        match *m {
            Some(u) if u > v => blocks.push(vec![v, u]),
            Some(_) => {}
            None => blocks.push(vec![v]),
        }
    }
    blocks
}

/// Every set partition of `items` whose blocks have at most
/// `max_group_size` elements, each exactly once.
pub fn enumerate_partitions(items: &[usize], max_group_size: usize) -> Result<Partitions> {
    if items.len() > EXHAUSTIVE_CAP {
        return Err(Error::TooManyUsers {
            n: items.len(),
            cap: EXHAUSTIVE_CAP,
        });
    }
    if max_group_size == 0 {
        return Err(Error::InvalidPolicy(
            "max_group_size must be at least 1".into(),
        ));
    }
    Ok(Partitions {
        items: items.to_vec(),
        max_group_size,
        rgs: vec![0; items.len()],
        started: false,
        done: false,
    })
}

/// Iterator over set partitions, driven by restricted growth strings.
#[derive(Debug, Clone)]
pub struct Partitions {
    items: Vec<usize>,
    max_group_size: usize,
    rgs: Vec<usize>,
    started: bool,
    done: bool,
}

impl Partitions {
    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        for i in (1..n).rev() {
            let prefix_max = self.rgs[..i].iter().copied().max().unwrap_or(0);
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                self.rgs[i + 1..].iter_mut().for_each(|v| *v = 0);
                return true;
            }
        }
        false
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        let n_blocks = self.rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); n_blocks];
        for (item, &b) in self.items.iter().zip(&self.rgs) {
            blocks[b].push(*item);
        }
        blocks
    }
}

impl Iterator for Partitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            if self.started {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            let blocks = self.blocks();
            if blocks.iter().all(|b| b.len() <= self.max_group_size) {
                return Some(blocks);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn one_cell(gains: Vec<f64>, demand: Vec<f64>, p: f64, sigma2: f64) -> NetworkModel {
        let n = gains.len();
        NetworkModel::new(vec![0; n], vec![gains], vec![p], sigma2, demand, 1.0).unwrap()
    }

    #[test]
    fn partitions_counts() {
        let p: Vec<_> = enumerate_partitions(&[0, 1, 2], 2).unwrap().collect();
        assert_eq!(p.len(), 4);
        assert!(!p.iter().any(|part| part.len() == 1));
        assert_eq!(enumerate_partitions(&[0, 1, 2], 3).unwrap().count(), 5);
        assert_eq!(enumerate_partitions(&[9], 1).unwrap().count(), 1);
        // Bell(6) = 203
        assert_eq!(
            enumerate_partitions(&[0, 1, 2, 3, 4, 5], 6)
                .unwrap()
                .count(),
            203
        );
        assert!(matches!(
            enumerate_partitions(&(0..11).collect::<Vec<_>>(), 2),
            Err(Error::TooManyUsers { n: 11, cap: 10 })
        ));
    }

    #[test]
    fn partitions_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for mut part in enumerate_partitions(&[0, 1, 2, 3, 4], 3).unwrap() {
            part.iter_mut().for_each(|b| b.sort());
            part.sort();
            assert!(seen.insert(part));
        }
    }

    #[test]
    fn pairing_examples() {
        let pair = vec![vec![0.0, 1.5], vec![1.5, 0.0]];
        assert_eq!(optimal_pairing(&[1.0, 1.0], &pair), vec![vec![0, 1]]);
        let pair = vec![vec![0.0, 2.5], vec![2.5, 0.0]];
        assert_eq!(optimal_pairing(&[1.0, 1.0], &pair), vec![vec![0], vec![1]]);
    }

    #[test]
    fn single_user_closed_form() {
        // w = sigma2 / g = 1, p = 1, d = ln 2 -> load 1
        let net = one_cell(vec![1.0], vec![LN_2], 1.0, 1.0);
        for policy in [
            GroupingPolicy::oma(),
            GroupingPolicy::pairs(),
            GroupingPolicy::exhaustive(3).unwrap(),
        ] {
            let sol = solve_cell(&net, 0, &LoadVector::zeros(1), &policy).unwrap();
            assert!((sol.load - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_users_pairs_takes_the_better_partition() {
        let net = one_cell(vec![1.0, 0.2], vec![0.3, 0.3], 1.0, 0.1);
        let rho = LoadVector::zeros(1);
        let w = [0.1, 0.5];
        let s0 = 0.3 / (1.0f64 / w[0]).ln_1p();
        let s1 = 0.3 / (1.0f64 / w[1]).ln_1p();
        let xp = min_group_load(&w, &[0.3, 0.3], 1.0).unwrap().x;
        let sol = solve_cell(&net, 0, &rho, &GroupingPolicy::pairs()).unwrap();
        assert!((sol.load - (s0 + s1).min(xp)).abs() < 1e-14);
        assert_eq!(sol.groups.len(), 1);
        assert_eq!(sol.groups[0].members, vec![0, 1]);
    }

    #[test]
    fn zero_demand_gives_zero_load() {
        let net = one_cell(vec![1.0, 0.5, 0.1], vec![0.0; 3], 1.0, 0.1);
        for policy in [
            GroupingPolicy::oma(),
            GroupingPolicy::pairs(),
            GroupingPolicy::exhaustive(3).unwrap(),
        ] {
            let sol = solve_cell(&net, 0, &LoadVector::zeros(1), &policy).unwrap();
            assert_eq!(sol.load, 0.0);
            assert!(sol.x.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn exhaustive_refuses_large_cells() {
        let net = one_cell(vec![1.0; 11], vec![0.1; 11], 1.0, 0.1);
        let err = solve_cell(
            &net,
            0,
            &LoadVector::zeros(1),
            &GroupingPolicy::exhaustive(2).unwrap(),
        );
        assert!(matches!(err, Err(Error::TooManyUsers { .. })));
    }

    #[test]
    fn policy_validation() {
        let bad = GroupingPolicy {
            mode: GroupingMode::Pairs,
            max_group_size: 3,
        };
        assert!(bad.validate().is_err());
        assert!(GroupingPolicy::fixed(vec![vec![0, 1], vec![1]]).is_err());
        assert!(GroupingPolicy::exhaustive(0).is_err());
    }

    #[test]
    fn fixed_partition_must_cover_the_cell() {
        let net = one_cell(vec![1.0, 0.5, 0.1], vec![0.1; 3], 1.0, 0.1);
        let policy = GroupingPolicy::fixed(vec![vec![0, 2]]).unwrap();
        assert!(solve_cell(&net, 0, &LoadVector::zeros(1), &policy).is_err());
        let policy = GroupingPolicy::fixed(vec![vec![2, 0], vec![1]]).unwrap();
        let sol = solve_cell(&net, 0, &LoadVector::zeros(1), &policy).unwrap();
        // user 0 has the larger gain, hence smaller w, and is decoded first
        assert_eq!(sol.groups[0].members, vec![0, 2]);
    }

    #[test]
    fn power_split_respects_budget() {
        let net = one_cell(
            vec![1.0, 0.3, 0.05, 0.6],
            vec![0.2, 0.1, 0.05, 0.3],
            2.0,
            0.1,
        );
        let sol = solve_cell(&net, 0, &LoadVector::zeros(1), &GroupingPolicy::pairs()).unwrap();
        for q in &sol.q {
            assert!(q.iter().sum::<f64>() <= 2.0 * (1.0 + 1e-12));
        }
        assert_eq!(sol.load, sol.x.iter().sum::<f64>());
    }
}
