//! Structural measures and centralities of a generated network.

use supplynet::generator::{generate, GeneratorConfig};
use supplynet::metrics::{
    betweenness_centrality, closeness_centrality, detect_communities, eigenvector_centrality,
    metric_report, MetricReport, PathMode,
};

fn main() -> supplynet::Result<()> {
    let cfg = GeneratorConfig {
        n_firms: 1_500,
        n_edges: 4_700,
        n_products: 200,
        n_planted_communities: 20,
        ..GeneratorConfig::default()
    };
    let net = generate(&cfg)?;

    let report = metric_report(&net, 1, PathMode::Exact);
    for (label, v) in MetricReport::ROW_LABELS.iter().zip(report.values()) {
        match v {
            Some(v) => println!("{label:<32} {v:.4}"),
            None => println!("{label:<32} undefined"),
        }
    }

    let (partition, q) = detect_communities(&net, 1);
    println!("communities: {} (Q = {q:.3})", partition.community_count());

    let top = |m: std::collections::BTreeMap<_, f64>| {
        let mut v: Vec<_> = m.into_iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1));
        v.truncate(3);
        v
    };
    println!(
        "eigenvector top 3: {:?}",
        top(eigenvector_centrality(&net, 1e-9, 1_000)?)
    );
    println!("closeness top 3: {:?}", top(closeness_centrality(&net)));
    println!("betweenness top 3: {:?}", top(betweenness_centrality(&net)));
    Ok(())
}
