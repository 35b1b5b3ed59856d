//! Per-cell loads of OMA and NOMA at the largest demand OMA supports, sorted
//! ascending.
//!
//! ```text
//! cargo run --release --example cell_loads -- [seed]
//! ```

use noma_lc::experiment::loads_at_oma_capacity;
use noma_lc::scenario::{generate, ScenarioConfig};
use noma_lc::{GroupingPolicy, SolveConfig};

fn main() -> noma_lc::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let cfg = ScenarioConfig {
        seed,
        ..Default::default()
    };
    let net = generate(&cfg)?;
    let (d, oma, noma) = loads_at_oma_capacity(
        &net,
        &GroupingPolicy::pairs(),
        &cfg,
        &SolveConfig::default(),
    )?;
    println!(
        "OMA capacity: {:.3} Mbps per user",
        cfg.demand_to_bps(d) / 1e6
    );
    println!("{:>4} {:>8} {:>8}", "rank", "OMA", "NOMA");
    for (k, (o, n)) in oma.iter().zip(&noma).enumerate() {
        println!("{:>4} {o:>8.4} {n:>8.4}", k + 1);
    }
    Ok(())
}
