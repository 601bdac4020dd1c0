//! The three rewiring policies on a hand-built network.

use supplynet::network::{build_network, Firm, Product, SupplyEdge};
use supplynet::policy::{
    apply_policy, mining_share, rank_vulnerable_industries, rank_vulnerable_products, PolicyScope,
    SelectionStrategy,
};
use supplynet::scopes::CountryCluster;

fn main() -> supplynet::Result<()> {
    let firms = vec![
        Firm::new(
            "magnets-cn",
            "CN",
            "Mining, Refining & Smelting",
            &["magnet", "graphite"],
        ),
        Firm::new(
            "magnets-jp",
            "JP",
            "Mining, Refining & Smelting",
            &["magnet"],
        ),
        Firm::new("motors-de", "DE", "Machinery", &["motor"]),
        Firm::new("motors-fr", "FR", "Machinery", &["motor"]),
        Firm::new("cars-fr", "FR", "Automotive", &["car"]),
        Firm::new("cars-us", "US", "Automotive", &["car"]),
    ];
    let products = vec![
        Product::new("magnet", "Mining, Refining & Smelting", true),
        Product::new("graphite", "Mining, Refining & Smelting", true),
        Product::new("motor", "Machinery", false),
        Product::new("car", "Automotive", false),
    ];
    let edges = [
        ("magnets-cn", "motors-de"),
        ("magnets-cn", "cars-us"),
        ("motors-de", "cars-fr"),
        ("motors-de", "cars-us"),
    ]
    .iter()
    .map(|(s, c)| SupplyEdge::new(s, c))
    .collect();
    let (net, _) = build_network(firms, products, edges)?;

    let allies = CountryCluster::new("Allies", &["US", "JP", "DE", "FR"]);
    let china = CountryCluster::new("China", &["CN"]);
    let scopes = [
        PolicyScope::country_plus_one(china, allies.clone()),
        PolicyScope::friendshoring(allies.clone()),
        PolicyScope::reshoring(allies),
    ];
    for scope in &scopes {
        let out = apply_policy(&net, scope, SelectionStrategy::All, 0)?;
        println!("== {}", scope.policy);
        println!("  added:   {:?}", out.added_edges);
        println!("  removed: {:?}", out.removed_edges);
        println!("  non-substitutable products: {:?}", out.ns_products);
        println!("  affected companies: {:?}", out.ns_companies);
        println!("  mining share: {:.2}", mining_share(&out));
        println!(
            "  top industries: {:?}",
            rank_vulnerable_industries(&out, 5)?
        );
        println!("  top products: {:?}", rank_vulnerable_products(&out, 5)?);
    }

    // sampling one alternative per product instead of all of them
    let sampled = apply_policy(&net, &scopes[2], SelectionStrategy::Sample { k: 1 }, 42)?;
    println!("sampled reshoring adds {} edges", sampled.added_edges.len());
    Ok(())
}
