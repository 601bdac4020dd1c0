//! Run a scenario document end to end and write its reports.

use supplynet::sim::{parse_scenarios, run_suite, slug, write_reports};

const SCENARIOS: &str = r#"
selection = "sample:1"
iterations = 3
master_seed = 7
path_mode = "sampled:200"

[[scenario]]
name = "Low Risk Reshoring"
policy = "reshoring"
acting = "Low Risk"

[[scenario]]
name = "Low Risk Country+1"
policy = "country_plus_one"
acting = "Low Risk"
risky = "High Risk"

[network.generator]
n_firms = 2000
n_edges = 6200
n_products = 250
n_planted_communities = 20
seed = 3
"#;

fn main() -> supplynet::Result<()> {
    let scenarios = parse_scenarios(SCENARIOS, None)?;
    let out = std::env::temp_dir().join(format!("supplynet-sim-{}", std::process::id()));
    let net = scenarios[0].source.load()?;
    for (sc, res) in scenarios.iter().zip(run_suite(&scenarios)) {
        let agg = res?;
        println!("== {} ({} iterations)", agg.scenario, agg.iterations);
        for d in &agg.metrics {
            if let (Some(b), Some(s)) = (d.baseline, d.stats) {
                println!(
                    "  {:<32} {b:>10.4} -> {:>10.4} (sd {:.4})",
                    d.metric, s.mean, s.std
                );
            }
        }
        println!("  non-substitutable products: {:.1}", agg.ns_products_mean);
        println!("  top industries: {:?}", agg.affected.top_industries(3));
        write_reports(&agg, &net, out.join(slug(&sc.name)))?;
    }
    println!("reports in {}", out.display());
    std::fs::remove_dir_all(&out)?;
    Ok(())
}
