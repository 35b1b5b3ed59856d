//! Generates the default 19-cell wrap-around network and writes it as JSON.
//!
//! ```text
//! cargo run --example generate_scenario -- [seed] [out.json]
//! ```

use noma_lc::model::{linear_to_db, EffectiveNoise, LoadVector};
use noma_lc::scenario::{generate_scenario, ScenarioConfig, ScenarioDocument};

fn main() -> noma_lc::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = args.next();
    let cfg = ScenarioConfig {
        seed,
        ..Default::default()
    };
    let sc = generate_scenario(&cfg)?;
    let net = &sc.network;
    println!(
        "{} cells, {} users, noise {:.3e} mW per RU, demand {:.4} nats per user",
        net.n_cells(),
        net.n_ues(),
        net.sigma2(),
        net.demand(0)
    );
    let dist = sc.home_distances();
    let full = EffectiveNoise::compute(net, &LoadVector::filled(net.n_cells(), 1.0)?);
    let mut sinr: Vec<f64> = (0..net.n_ues())
        .map(|j| linear_to_db(net.p_ru(net.home(j)) / full.get(j)))
        .collect();
    sinr.sort_by(f64::total_cmp);
    let n = sinr.len();
    println!(
        "home distance {:.0}..{:.0} m; full-load SINR dB: min {:.1}, median {:.1}, max {:.1}",
        dist.iter().copied().fold(f64::INFINITY, f64::min),
        dist.iter().copied().fold(0.0, f64::max),
        sinr[0],
        sinr[n / 2],
        sinr[n - 1]
    );
    if let Some(path) = out {
        std::fs::write(&path, ScenarioDocument::new(&cfg, sc.network).to_json()?)?;
        println!("written to {path}");
    }
    Ok(())
}
