//! Maximum per-cell throughput of OMA and NOMA pairing against the load limit
//! on the default 19-cell scenario.
//!
//! ```text
//! cargo run --release --example throughput_vs_load_limit -- [seed]
//! ```

use noma_lc::experiment::max_throughput;
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
    let solver = SolveConfig::default();
    println!(
        "{:>10} {:>10} {:>10} {:>7}",
        "limit", "OMA Mbps", "NOMA Mbps", "ratio"
    );
    for limit in [0.2, 0.4, 0.6, 0.8, 1.0] {
        let oma = max_throughput(&net, &GroupingPolicy::oma(), limit, &solver, &cfg)?;
        let noma = max_throughput(&net, &GroupingPolicy::pairs(), limit, &solver, &cfg)?;
        println!("{limit:>10.1} {oma:>10.2} {noma:>10.2} {:>7.3}", noma / oma);
    }
    Ok(())
}
