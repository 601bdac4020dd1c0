//! Build a small network by hand and query it.

use supplynet::network::{build_network, Firm, Product, SupplyEdge};

fn main() -> supplynet::Result<()> {
    let firms = vec![
        Firm::new("cathodes-cn", "CN", "Chemicals", &["cathode"]),
        Firm::new("cells-kr", "KR", "Batteries", &["cell"]),
        Firm::new("cells-jp", "JP", "Batteries", &["cell", "cathode"]),
        Firm::new("packs-us", "US", "Batteries", &["pack"]),
        Firm::new("cars-us", "US", "Automotive", &["car"]),
    ];
    let products = vec![
        Product::new("cathode", "Chemicals", false),
        Product::new("cell", "Batteries", false),
        Product::new("pack", "Batteries", false),
        Product::new("car", "Automotive", false),
    ];
    let mut edges = vec![
        SupplyEdge::new("cathodes-cn", "cells-kr"),
        SupplyEdge::new("cells-kr", "packs-us"),
        SupplyEdge::new("packs-us", "cars-us"),
        // duplicate rows are merged
        SupplyEdge::new("packs-us", "cars-us"),
    ];
    edges[1].products = Some(["cell".into()].into());

    let (net, report) = build_network(firms, products, edges)?;
    println!(
        "{} firms, {} products, {} edges ({} duplicates merged)",
        net.firm_count(),
        net.product_count(),
        net.edge_count(),
        report.duplicates
    );
    println!("producers of cell: {:?}", net.producers_of(&"cell".into())?);
    println!(
        "suppliers of packs-us: {:?}",
        net.suppliers_of(&"packs-us".into())?
    );
    for e in net.edges() {
        println!(
            "{} -> {}: {:?}",
            e.supplier,
            e.customer,
            net.classify_edge(&e)?
        );
    }

    // an edge annotated with a product the supplier does not make is rejected
    let bad = build_network(
        vec![
            Firm::new("a", "US", "x", &["p"]),
            Firm::new("b", "US", "x", &["q"]),
        ],
        vec![Product::new("p", "x", false), Product::new("q", "x", false)],
        vec![SupplyEdge {
            products: Some(["q".into()].into()),
            ..SupplyEdge::new("a", "b")
        }],
    );
    println!("mismatched edge: {}", bad.unwrap_err());
    Ok(())
}
