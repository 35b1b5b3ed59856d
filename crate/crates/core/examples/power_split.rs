//! From rates to powers and back, and the smallest RU share that fits a
//! group's demands into the power budget.
//!
//! ```text
//! cargo run --example power_split
//! ```

use noma_lc::model::{capacity, Group};
use noma_lc::rate_region::{min_group_load, recover_power_split, required_power};

fn main() -> noma_lc::Result<()> {
    // Members listed in decoding order (ascending effective noise).
    let w = [0.05, 0.4];
    let c = [1.5, 0.7];
    let q = recover_power_split(&w, &c)?;
    let group = Group {
        members: vec![0, 1],
    };
    println!(
        "rates {c:?} need total power {:.6}",
        required_power(&w, &c)?
    );
    for j in 0..2 {
        println!(
            "  member {j}: power {:.6}, capacity {:.12}",
            q[j],
            capacity(&q, w[j], &group, j)
        );
    }

    let d = [0.3, 0.2];
    let p = 1.0;
    let load = min_group_load(&w, &d, p)?;
    let rates: Vec<f64> = d.iter().map(|di| di / load.x).collect();
    println!("demands {d:?} with budget {p}: RU share {:.6}", load.x);
    println!(
        "  rates at that share {rates:?}, power split {:?}, sum {:.12}",
        load.q,
        load.q.iter().sum::<f64>()
    );
    Ok(())
}
