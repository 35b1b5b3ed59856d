//! Random check that each cell's load map is monotone and strictly scalable
//! on a small generated network.
//!
//! ```text
//! cargo run --release --example interference_probe
//! ```

use noma_lc::fixed_point::{sif_probe, SifProbeConfig};
use noma_lc::scenario::{generate, ScenarioConfig};
use noma_lc::GroupingPolicy;

fn main() -> noma_lc::Result<()> {
    let cfg = ScenarioConfig {
        n_rings: 1,
        ues_per_cell: 6,
        ..Default::default()
    };
    let net = generate(&cfg)?;
    for policy in [GroupingPolicy::oma(), GroupingPolicy::pairs()] {
        let report = sif_probe(
            &net,
            &policy,
            &SifProbeConfig {
                trials: 50,
                ..Default::default()
            },
        )?;
        println!(
            "{:?}: {} evaluations, worst monotonicity margin {:.3e}, worst scalability margin {:.3e}",
            policy.mode,
            report.evaluations,
            report.worst_monotonicity_margin,
            report.worst_scalability_margin.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
