//! Loads a network written by hand with gains in dB and solves it.
//!
//! ```text
//! cargo run --example network_json
//! ```

use noma_lc::{solve, GroupingPolicy, NetworkModel, SolveConfig};

const NETWORK: &str = r#"{
  "n_cells": 2,
  "ue_home": [0, 0, 1, 1, 1],
  "gain_unit": "db",
  "gain": [
    [-60.0, -75.0, -95.0, -100.0, -90.0],
    [-98.0, -92.0, -62.0, -70.0, -80.0]
  ],
  "p_ru": [1.0, 1.0],
  "sigma2": 1e-9,
  "demand": [0.3, 0.2, 0.25, 0.25, 0.1],
  "load_limit": 1.0
}"#;

fn main() -> noma_lc::Result<()> {
    let net = NetworkModel::from_json(NETWORK)?;
    let sol = solve(&net, &GroupingPolicy::pairs(), &SolveConfig::default())?;
    println!(
        "loads {:?} after {} iterations",
        sol.rho.as_slice(),
        sol.trace.iterations()
    );
    for cell in &sol.cells {
        let groups: Vec<&Vec<usize>> = cell.groups.iter().map(|g| &g.members).collect();
        println!(
            "cell {}: groups {groups:?}, RU shares {:?}",
            cell.cell, cell.x
        );
    }
    Ok(())
}
