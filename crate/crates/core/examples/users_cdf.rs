//! Fraction of random networks in which every user can be served, against
//! the number of users per cell.
//!
//! ```text
//! cargo run --release --example users_cdf -- [trials]
//! ```

use noma_lc::experiment::demand_feasible;
use noma_lc::scenario::{generate, ScenarioConfig};
use noma_lc::{GroupingPolicy, SolveConfig};

fn main() -> noma_lc::Result<()> {
    let trials: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);
    let bps = 1e6;
    println!("demand {:.2} Mbps per user, {trials} trials", bps / 1e6);
    println!("{:>6} {:>6} {:>6}", "users", "OMA", "NOMA");
    for users in (20..=45).step_by(5) {
        let mut supported = [0u32; 2];
        for seed in 0..trials {
            let cfg = ScenarioConfig {
                seed,
                ues_per_cell: users,
                ..Default::default()
            };
            let net = generate(&cfg)?;
            let d = cfg.normalize_demand(bps);
            for (k, policy) in [GroupingPolicy::oma(), GroupingPolicy::pairs()]
                .iter()
                .enumerate()
            {
                if demand_feasible(&net, policy, cfg.load_limit, &SolveConfig::default(), d)? {
                    supported[k] += 1;
                }
            }
        }
        let frac = |k: usize| supported[k] as f64 / trials as f64;
        println!("{users:>6} {:>6.2} {:>6.2}", frac(0), frac(1));
    }
    Ok(())
}
