//! Required power of every decoding order of a three-user group. The SIC
//! order (ascending effective noise) needs the least.
//!
//! ```text
//! cargo run --example order_optimality
//! ```

use noma_lc::rate_region::verify_order_optimality;

fn main() -> noma_lc::Result<()> {
    let w = [0.8, 0.1, 2.5];
    let c = [0.6, 1.2, 0.3];
    let report = verify_order_optimality(&w, &c)?;
    println!("effective noise {w:?}, rates {c:?} nats");
    for row in &report.table {
        let mark = if row.order == report.sic_order {
            "  <- SIC order"
        } else {
            ""
        };
        println!("  order {:?}: power {:.6}{mark}", row.order, row.power);
    }
    println!("minimum {:.6}, ties {}", report.min_power, report.ties);
    println!("{}", report.to_json()?);
    Ok(())
}
