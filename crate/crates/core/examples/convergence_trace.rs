//! Sup-norm step per iteration on the default scenario for three demand
//! levels, with Jacobi and Gauss-Seidel sweeps, plus the per-cell trace CSV.
//!
//! ```text
//! cargo run --release --example convergence_trace -- [seed]
//! ```

use noma_lc::scenario::{generate, ScenarioConfig};
use noma_lc::{solve, GroupingPolicy, Schedule, SolveConfig};

fn main() -> noma_lc::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let policy = GroupingPolicy::pairs();
    for bps in [1.5e6, 0.75e6, 0.15e6] {
        let cfg = ScenarioConfig {
            seed,
            demand_bps: bps,
            ..Default::default()
        };
        let net = generate(&cfg)?;
        for schedule in [Schedule::Jacobi, Schedule::GaussSeidel] {
            let sol = solve(
                &net,
                &policy,
                &SolveConfig::default().with_schedule(schedule),
            )?;
            let deltas: Vec<String> = sol
                .trace
                .deltas
                .iter()
                .take(10)
                .map(|d| format!("{d:.1e}"))
                .collect();
            println!(
                "{:>5.2} Mbps {schedule:?}: {} iterations, max load {:.3}, flips {}, first steps {}",
                bps / 1e6,
                sol.trace.iterations(),
                sol.rho.max(),
                sol.trace.total_flips(),
                deltas.join(" ")
            );
        }
    }
    let cfg = ScenarioConfig {
        seed,
        demand_bps: 0.75e6,
        ..Default::default()
    };
    let sol = solve(&generate(&cfg)?, &policy, &SolveConfig::default())?;
    let csv = sol.trace.to_csv();
    println!("\nper-cell trace at 0.75 Mbps (first rows):");
    for line in csv.lines().take(6) {
        println!("{line}");
    }
    Ok(())
}
