//! One cell's minimum load under OMA, optimal pairing (maximum-weight
//! matching) and exhaustive grouping, at a given interference level.
//!
//! ```text
//! cargo run --example single_cell_pairing
//! ```

use noma_lc::{solve_cell, GroupingPolicy, LoadVector, NetworkModel};

fn main() -> noma_lc::Result<()> {
    // Six users in cell 0 with spread-out home gains; cell 1 only interferes.
    let home = [1.0, 0.6, 0.3, 0.12, 0.05, 0.02];
    let cross = [0.001, 0.004, 0.01, 0.008, 0.02, 0.01];
    let net = NetworkModel::new(
        vec![0; 6],
        vec![home.to_vec(), cross.to_vec()],
        vec![1.0, 1.0],
        0.01,
        vec![0.1; 6],
        1.0,
    )?;
    let rho = LoadVector::new(vec![0.0, 0.7])?;
    for (name, policy) in [
        ("oma", GroupingPolicy::oma()),
        ("pairs", GroupingPolicy::pairs()),
        ("exhaustive (size <= 2)", GroupingPolicy::exhaustive(2)?),
        ("exhaustive (size <= 3)", GroupingPolicy::exhaustive(3)?),
    ] {
        let sol = solve_cell(&net, 0, &rho, &policy)?;
        let groups: Vec<&Vec<usize>> = sol.groups.iter().map(|g| &g.members).collect();
        println!("{name:>24}: load {:.6}, groups {groups:?}", sol.load);
    }
    let sol = solve_cell(&net, 0, &rho, &GroupingPolicy::pairs())?;
    println!("{}", sol.to_json()?);
    Ok(())
}
