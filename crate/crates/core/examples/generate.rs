//! Generate the default synthetic network and check it against the
//! calibration targets. Pass a firm count to generate a scaled-down network.

use std::time::Instant;

use supplynet::generator::{calibrate_check, default_targets, generate, GeneratorConfig};
use supplynet::metrics::PathMode;

fn main() -> supplynet::Result<()> {
    let mut cfg = GeneratorConfig::default();
    if let Some(n) = std::env::args()
        .nth(1)
        .and_then(|a| a.parse::<usize>().ok())
    {
        cfg.n_edges = cfg.n_edges * n / cfg.n_firms;
        cfg.n_planted_communities = (cfg.n_planted_communities * n / cfg.n_firms).max(1);
        cfg.n_firms = n;
    }
    let start = Instant::now();
    let net = generate(&cfg)?;
    println!(
        "generated {} firms, {} edges in {:.2?}",
        net.firm_count(),
        net.edge_count(),
        start.elapsed()
    );

    let report = calibrate_check(
        &net,
        &default_targets(),
        cfg.seed,
        PathMode::Sampled { k: 300 },
    )?;
    for row in &report.rows {
        println!(
            "{:<30} target {:>6} ± {:<6} achieved {:>8} {}",
            row.metric,
            row.target,
            row.tolerance,
            row.achieved
                .map_or("undefined".to_string(), |a| format!("{a:.4}")),
            if row.within_tolerance { "ok" } else { "off" }
        );
    }
    println!("{}", toml::to_string(&cfg).expect("config serializes"));
    Ok(())
}
