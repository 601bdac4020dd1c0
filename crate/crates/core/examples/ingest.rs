//! Export a network to tables, reload it with a broken row, and map raw
//! product names onto a category catalog.

use std::fs::OpenOptions;
use std::io::Write;

use supplynet::generator::{generate, GeneratorConfig};
use supplynet::io::{
    demo_catalog, load_dir, map_product_name, write_tables, DEFAULT_MAPPING_THRESHOLD, FIRMS_FILE,
};

fn main() -> supplynet::Result<()> {
    let net = generate(&GeneratorConfig {
        n_firms: 200,
        n_edges: 600,
        n_products: 50,
        n_planted_communities: 5,
        ..GeneratorConfig::default()
    })?;
    let dir = std::env::temp_dir().join(format!("supplynet-ingest-{}", std::process::id()));
    write_tables(&net, &dir)?;

    let mut firms = OpenOptions::new().append(true).open(dir.join(FIRMS_FILE))?;
    writeln!(firms, "X1,Nowhere Ltd,Atlantis,Auto Parts,,")?;
    drop(firms);

    let (back, report) = load_dir(&dir)?;
    println!(
        "reloaded {} firms, {} edges",
        back.firm_count(),
        back.edge_count()
    );
    for (table, line, reason) in report.reject_reasons() {
        println!("rejected {table}:{line}: {reason}");
    }
    println!("same network as exported: {}", back == net);

    let catalog = demo_catalog();
    for raw in [
        "Brake  Pedal ",
        "engine cooling module assembly",
        "Lithium-Carbonate",
        "zzqx",
    ] {
        match map_product_name(raw, &catalog, DEFAULT_MAPPING_THRESHOLD) {
            Some(c) => println!(
                "{raw:?} -> {} ({}, mining: {})",
                c.name, c.industry, c.is_mining
            ),
            None => println!("{raw:?} -> unmapped"),
        }
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
