//! Power needed to carry a rate vector on one resource unit.
//!
//! Members are listed in the order their signals are decoded: member 1 cancels
//! everyone after it, member `t` sees the powers of members `1..t` as
//! interference. Solving the capacity equations one member at a time gives
//! `q_t = (q_1 + ... + q_{t-1} + w_t) (e^{c_t} - 1)` and, summed,
//!
//! ```text
//! R(c) = sum_{t=1..K} (w_t - w_{t-1}) e^{c_t + ... + c_K} - w_K,   w_0 = 0.
//! ```
//!
//! The same formula is defined for any ordering of the members. Ordering by
//! ascending `w` minimizes it, so the SIC order supports the largest set of
//! rate vectors under a power budget.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::model::decoding_order;
use crate::{Error, Result};

/// Largest exponent (nats) evaluated before reporting overflow.
pub const EXPONENT_CAP: f64 = 700.0;

/// Largest group the permutation oracle will enumerate by default.
pub const BRUTE_FORCE_CAP: usize = 7;

/// Per-member rates in nats per RU, aligned with a group's member order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if let Some(i) = c.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "rate c[{i}] = {} is not a valid rate",
                c[i]
            )));
        }
        Ok(Self(c))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn suffix_sums(c: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; c.len()];
    let mut acc = 0.0;
    for t in (0..c.len()).rev() {
        acc += c[t];
        s[t] = acc;
    }
    s
}

fn check_lengths(w: &[f64], c: &[f64]) {
    assert_eq!(w.len(), c.len(), "w and c must have one entry per member");
    assert!(!w.is_empty(), "a group needs at least one member");
}

/// Total power `R(c)` needed for rates `c` when members decode in the listed
/// order. Fails with [`Error::Overflow`] if `sum(c)` exceeds [`EXPONENT_CAP`].
pub fn required_power(w: &[f64], c: &[f64]) -> Result<f64> {
    required_power_with_cap(w, c, EXPONENT_CAP)
}

pub fn required_power_with_cap(w: &[f64], c: &[f64], cap: f64) -> Result<f64> {
    check_lengths(w, c);
    let s = suffix_sums(c);
    if s[0] > cap {
        return Err(Error::Overflow {
            exponent: s[0],
            cap,
        });
    }
    // The -w_K term telescopes against sum(w_t - w_{t-1}), leaving expm1 terms
    // that stay accurate for small rates.
    let mut prev = 0.0;
    let mut total = 0.0;
    for (wt, st) in w.iter().zip(&s) {
        total += (wt - prev) * st.exp_m1();
        prev = *wt;
    }
    Ok(total)
}

/// Per-member power split realizing rates `c` in the listed order.
pub fn recover_power_split(w: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    check_lengths(w, c);
    let total_rate: f64 = c.iter().sum();
    if total_rate > EXPONENT_CAP {
        return Err(Error::Overflow {
            exponent: total_rate,
            cap: EXPONENT_CAP,
        });
    }
    let mut q = Vec::with_capacity(w.len());
    let mut earlier = 0.0;
    for (wt, ct) in w.iter().zip(c) {
        let qt = (earlier + wt) * ct.exp_m1();
        q.push(qt);
        earlier += qt;
    }
    Ok(q)
}

/// Required power of one decoding order in an [`OrderReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderPower {
    /// Member indices (into the input `w`/`c`) in decoding order.
    pub order: Vec<usize>,
    pub power: f64,
}

/// Result of enumerating every decoding order of one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub sic_order: Vec<usize>,
    pub sic_power: f64,
    pub min_power: f64,
    /// Orders other than the SIC order whose power equals the minimum.
    pub ties: usize,
    pub table: Vec<OrderPower>,
}

impl OrderReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Relative slack used when comparing powers of different orders.
const ORDER_REL_TOL: f64 = 1e-12;

/// Enumerates all `K!` decoding orders of members with effective noise `w`
/// and rates `c`, and checks that the SIC order (ascending `w`, ties by index)
/// needs the least power.
pub fn verify_order_optimality(w: &[f64], c: &[f64]) -> Result<OrderReport> {
    verify_order_optimality_with_cap(w, c, BRUTE_FORCE_CAP)
}

pub fn verify_order_optimality_with_cap(
    w: &[f64],
    c: &[f64],
    max_members: usize,
) -> Result<OrderReport> {
    check_lengths(w, c);
    let k = w.len();
    if k > max_members {
        return Err(Error::TooManyUsers {
            n: k,
            cap: max_members,
        });
    }
    let ids: Vec<usize> = (0..k).collect();
    let sic_order = decoding_order(w, &ids).members;
    let power_of = |order: &[usize]| -> Result<f64> {
        let wo: Vec<f64> = order.iter().map(|&i| w[i]).collect();
        let co: Vec<f64> = order.iter().map(|&i| c[i]).collect();
        required_power(&wo, &co)
    };
    let sic_power = power_of(&sic_order)?;
    let slack = ORDER_REL_TOL * sic_power.abs();

    let mut table = Vec::new();
    let mut ties = 0;
    let mut min_power = sic_power;
    for order in ids.iter().copied().permutations(k) {
        let power = power_of(&order)?;
        if power < sic_power - slack {
            return Err(Error::OrderOptimalityViolated {
                permutation: order,
                power,
                noma_power: sic_power,
            });
        }
        if order != sic_order && (power - sic_power).abs() <= slack {
            ties += 1;
        }
        min_power = min_power.min(power);
        table.push(OrderPower { order, power });
    }
    Ok(OrderReport {
        sic_order,
        sic_power,
        min_power,
        ties,
        table,
    })
}

/// RU fraction and power split of one group at its minimum load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupLoad {
    pub x: f64,
    pub q: Vec<f64>,
}

/// Smallest RU fraction `x` such that rates `d / x` fit in power budget `p`
/// under the listed decoding order, together with the power split at that
/// point. Demands are met with equality.
pub fn min_group_load(w: &[f64], d: &[f64], p: f64) -> Result<GroupLoad> {
    check_lengths(w, d);
    assert!(p > 0.0 && p.is_finite(), "power budget must be positive");
    let d_max = d.iter().copied().fold(0.0, f64::max);
    if d_max == 0.0 {
        return Ok(GroupLoad {
            x: 0.0,
            q: vec![0.0; w.len()],
        });
    }
    if w.len() == 1 {
        let x = d[0] / (p / w[0]).ln_1p();
        return Ok(GroupLoad {
            x,
            q: recover_power_split(w, &[d[0] / x])?,
        });
    }

    // Work in s = 1/x: g(s) = R(d s) - p is increasing, and convex for the
    // SIC order, so Newton from the feasible side is monotone there.
    let dsum = suffix_sums(d);
    let mut coef = Vec::with_capacity(w.len());
    let mut prev = 0.0;
    for wt in w {
        coef.push(wt - prev);
        prev = *wt;
    }
    let eval = |s: f64| -> (f64, f64) {
        if dsum[0] * s > EXPONENT_CAP {
            return (f64::INFINITY, f64::INFINITY);
        }
        let mut g = -p;
        let mut dg = 0.0;
        for (a, dt) in coef.iter().zip(&dsum) {
            let e = dt * s;
            g += a * e.exp_m1();
            dg += a * dt * e.exp();
        }
        (g, dg)
    };

    let w_sum: f64 = w.iter().sum();
    let mut hi = (p / w_sum).ln_1p() / d_max;
    let mut lo = 0.0;
    let (mut g_hi, mut dg_hi) = eval(hi);
    while g_hi < 0.0 {
        lo = hi;
        hi *= 2.0;
        (g_hi, dg_hi) = eval(hi);
    }
    if g_hi == 0.0 {
        return finish(w, d, hi);
    }

    let mut s = hi;
    let (mut g, mut dg) = (g_hi, dg_hi);
    for _ in 0..200 {
        let newton = if g.is_finite() && dg.is_finite() && dg > 0.0 {
            s - g / dg
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - s).abs();
        s = next;
        (g, dg) = eval(s);
        if g > 0.0 {
            hi = s;
        } else if g < 0.0 {
            lo = s;
        } else {
            break;
        }
        if step <= 1e-15 * s || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    finish(w, d, s)
}

fn finish(w: &[f64], d: &[f64], s: f64) -> Result<GroupLoad> {
    let c: Vec<f64> = d.iter().map(|dj| dj * s).collect();
    Ok(GroupLoad {
        x: 1.0 / s,
        q: recover_power_split(w, &c)?,
    })
}
