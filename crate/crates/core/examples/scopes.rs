//! Builtin country clusters and a custom cluster file.

use supplynet::scopes::{builtin_scopes, load_scopes, LOW_AND_MEDIUM_RISK};

const CUSTOM: &str = r#"
kind = "geopolitical"

[[cluster]]
name = "Low Risk"
countries = ["United States", "Japan", "DE"]

[[cluster]]
name = "Medium Risk"
countries = ["Mexico", "India", "Japan"]

[[cluster]]
name = "High Risk"
countries = ["China", "Russian Federation"]
"#;

fn main() -> supplynet::Result<()> {
    let builtin = builtin_scopes();
    for name in builtin.names() {
        println!("{name}: {} countries", builtin.clusters[name].len());
    }
    let both = builtin.resolve(LOW_AND_MEDIUM_RISK)?;
    println!("{}: {} countries", both.name, both.len());

    let custom = load_scopes(CUSTOM)?;
    for w in &custom.warnings {
        println!("warning: {w}");
    }
    println!(
        "custom Medium Risk: {:?}",
        custom.resolve("Medium Risk")?.countries
    );
    println!("{}", custom.to_toml()?);

    let typo = load_scopes("[[cluster]]\nname = \"X\"\ncountries = [\"Atlantis\"]\n");
    println!("typo: {}", typo.unwrap_err());
    Ok(())
}
