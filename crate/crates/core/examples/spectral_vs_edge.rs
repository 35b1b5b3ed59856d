//! Spectral efficiency at maximum throughput against the share of users at
//! 80% of the cell radius or beyond.
//!
//! ```text
//! cargo run --release --example spectral_vs_edge -- [seed]
//! ```

use noma_lc::experiment::max_throughput;
use noma_lc::scenario::{generate, ScenarioConfig};
use noma_lc::{GroupingPolicy, SolveConfig};

fn main() -> noma_lc::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    println!("{:>6} {:>8} {:>8} {:>6}", "edge", "OMA", "NOMA", "gain");
    for edge in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
        let cfg = ScenarioConfig {
            seed,
            edge_fraction: Some(edge),
            ..Default::default()
        };
        let net = generate(&cfg)?;
        let se = |policy: GroupingPolicy| -> noma_lc::Result<f64> {
            let mbps =
                max_throughput(&net, &policy, cfg.load_limit, &SolveConfig::default(), &cfg)?;
            Ok(mbps * 1e6 / cfg.total_bw_hz)
        };
        let (oma, noma) = (se(GroupingPolicy::oma())?, se(GroupingPolicy::pairs())?);
        println!(
            "{edge:>6.1} {oma:>8.3} {noma:>8.3} {:>5.1}%",
            100.0 * (noma / oma - 1.0)
        );
    }
    Ok(())
}
