//! Reference computations written directly from the model equations, kept
//! separate from the library's implementations.

#![allow(dead_code)]

use noma_lc::NetworkModel;
use rand::Rng;

/// Total power for rates `c` when members decode in the listed order, by the
/// successive rule: each member's power is set so that its SINR, counting
/// earlier-listed members' power as interference, hits `exp(c) - 1`.
pub fn power_sequential(w: &[f64], c: &[f64]) -> f64 {
    let mut earlier = 0.0;
    for (wt, ct) in w.iter().zip(c) {
        earlier += (earlier + wt) * (ct.exp() - 1.0);
    }
    earlier
}

/// Per-member powers by the same successive rule.
pub fn powers_sequential(w: &[f64], c: &[f64]) -> Vec<f64> {
    let mut earlier = 0.0;
    let mut q = Vec::new();
    for (wt, ct) in w.iter().zip(c) {
        let qt = (earlier + wt) * (ct.exp() - 1.0);
        q.push(qt);
        earlier += qt;
    }
    q
}

/// Capacity of position `pos` with powers `q` listed in decoding order.
pub fn capacity_at(q: &[f64], w: f64, pos: usize) -> f64 {
    let earlier: f64 = q[..pos].iter().sum();
    (1.0 + q[pos] / (earlier + w)).ln()
}

/// All permutations of `0..k` (Heap's algorithm).
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn heap(n: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..n - 1 {
            heap(n - 1, a, out);
            if n.is_multiple_of(2) {
                a.swap(i, n - 1);
            } else {
                a.swap(0, n - 1);
            }
        }
        heap(n - 1, a, out);
    }
    let mut a: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    heap(k, &mut a, &mut out);
    out
}

/// All partitions of `items` into blocks of one or two.
pub fn pairings(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let rest = &items[1..];
    let mut out = Vec::new();
    for mut p in pairings(rest) {
        p.push(vec![first]);
        out.push(p);
    }
    for (i, &other) in rest.iter().enumerate() {
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &v)| v)
            .collect();
        for mut p in pairings(&remaining) {
            p.push(vec![first, other]);
            out.push(p);
        }
    }
    out
}

/// Effective noise of `ue` under cell loads `rho`.
pub fn eff_noise(net: &NetworkModel, rho: &[f64], ue: usize) -> f64 {
    let home = net.home(ue);
    let interference: f64 = (0..net.n_cells())
        .filter(|&k| k != home)
        .map(|k| rho[k] * net.p_ru(k) * net.gain(k, ue))
        .sum();
    (interference + net.sigma2()) / net.gain(home, ue)
}

/// Smallest RU share `x` with `power_sequential(w, d / x) <= p`, members in
/// ascending `w`, by bisection on `x`.
pub fn block_load(w: &[f64], d: &[f64], p: f64) -> f64 {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    let ws: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
    let ds: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    if ds.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    let fits = |x: f64| {
        let c: Vec<f64> = ds.iter().map(|di| di / x).collect();
        let total: f64 = c.iter().sum();
        total < 700.0 && power_sequential(&ws, &c) <= p
    };
    let mut hi = 1.0;
    while !fits(hi) {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while fits(lo) {
        lo /= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Random network with `n_cells` cells and 1..=`max_ues` users per cell.
/// Home gains are log-uniform in `[0.3, 1]`, cross gains in `[1e-4, 3e-2]`.
pub fn random_network<R: Rng>(rng: &mut R, n_cells: usize, max_ues: usize) -> NetworkModel {
    let mut ue_home = Vec::new();
    for cell in 0..n_cells {
        for _ in 0..rng.random_range(1..=max_ues) {
            ue_home.push(cell);
        }
    }
    let log_uniform = |rng: &mut R, lo: f64, hi: f64| (rng.random_range(lo.ln()..=hi.ln())).exp();
    let gain: Vec<Vec<f64>> = (0..n_cells)
        .map(|cell| {
            ue_home
                .iter()
                .map(|&h| {
                    if h == cell {
                        log_uniform(rng, 0.3, 1.0)
                    } else {
                        log_uniform(rng, 1e-4, 3e-2)
                    }
                })
                .collect()
        })
        .collect();
    let p: Vec<f64> = (0..n_cells).map(|_| rng.random_range(0.5..=2.0)).collect();
    let sigma2 = rng.random_range(0.01..=0.1);
    let demand: Vec<f64> = ue_home
        .iter()
        .map(|_| rng.random_range(0.02..=0.3))
        .collect();
    NetworkModel::new(ue_home, gain, p, sigma2, demand, 1.0).unwrap()
}
