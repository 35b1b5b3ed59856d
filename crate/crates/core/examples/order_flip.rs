//! Two cells, four users: cell 0's strongest user at zero load sits close to
//! cell 1, so once cell 1 carries load the decoding order inside cell 0's
//! pair reverses. The iteration still converges to the unique fixed point.
//!
//! ```text
//! cargo run --example order_flip
//! ```

use noma_lc::{solve, GroupingPolicy, NetworkModel, SolveConfig};

fn main() -> noma_lc::Result<()> {
    // gain[cell][user]; users 0, 1 live in cell 0 and users 2, 3 in cell 1.
    let net = NetworkModel::new(
        vec![0, 0, 1, 1],
        vec![vec![1.0, 0.5, 0.05, 0.02], vec![0.5, 0.01, 0.3, 0.2]],
        vec![1.0, 1.0],
        0.1,
        vec![0.2, 0.2, 0.4, 0.4],
        1.0,
    )?;
    let policy = GroupingPolicy::fixed(vec![vec![0, 1], vec![2, 3]])?;
    let sol = solve(&net, &policy, &SolveConfig::default())?;

    println!(
        "{:>4} {:>10} {:>10} {:>12}  cell-0 order  flips",
        "k", "rho_0", "rho_1", "delta"
    );
    for k in 1..=sol.trace.iterations() {
        let rho = &sol.trace.loads[k];
        let order = &sol.trace.groups[k - 1][0][0].members;
        println!(
            "{k:>4} {:>10.6} {:>10.6} {:>12.3e}  {order:?}       {}",
            rho.get(0),
            rho.get(1),
            sol.trace.deltas[k - 1],
            sol.trace.order_flips[k - 1][0]
        );
    }
    println!(
        "converged after {} iterations with {} order flip(s); fixed point {:?}",
        sol.trace.iterations(),
        sol.trace.total_flips(),
        sol.rho.as_slice()
    );
    Ok(())
}
