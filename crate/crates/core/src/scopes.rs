//! Named country clusters used to parameterize policy runs.
//!
//! Two builtin families ship with the crate: the continental clusters
//! (American, European, Asian) and the three-tier chip-export risk tiers
//! (Low, Medium, High Risk). Custom sets load from TOML:
//!
//! ```toml
//! kind = "custom"          # or "geographical" / "geopolitical"
//!
//! [[cluster]]
//! name = "EU-mini"
//! countries = ["DE", "France"]
//! ```
//!
//! Country entries may be alpha-2 codes or names; both normalize to codes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::countries::normalize_country;
use crate::error::{Error, Result};

pub const LOW_RISK: &str = "Low Risk";
pub const MEDIUM_RISK: &str = "Medium Risk";
pub const HIGH_RISK: &str = "High Risk";
pub const LOW_AND_MEDIUM_RISK: &str = "Low & Medium Risk";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountryCluster {
    pub name: String,
    pub countries: BTreeSet<String>,
}

impl CountryCluster {
    pub fn new(name: &str, codes: &[&str]) -> Self {
        CountryCluster {
            name: name.to_string(),
            countries: codes.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.countries.contains(code)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScopeKind {
    Geographical,
    Geopolitical,
    #[default]
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeSet {
    pub kind: ScopeKind,
    pub clusters: BTreeMap<String, CountryCluster>,
    /// Non-fatal notes from loading (tier conflicts resolved, etc).
    pub warnings: Vec<String>,
}

impl ScopeSet {
    pub fn resolve(&self, name: &str) -> Result<CountryCluster> {
        if let Some(c) = self.clusters.get(name) {
            return Ok(c.clone());
        }
        if name == LOW_AND_MEDIUM_RISK {
            if let (Some(low), Some(med)) =
                (self.clusters.get(LOW_RISK), self.clusters.get(MEDIUM_RISK))
            {
                return Ok(union_cluster(low, med, LOW_AND_MEDIUM_RISK));
            }
        }
        Err(Error::UnknownCluster(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.clusters.keys().map(String::as_str)
    }

    /// Serializes to the TOML document format read by [`load_scopes`].
    pub fn to_toml(&self) -> Result<String> {
        let doc = ScopeDoc {
            kind: Some(self.kind),
            cluster: self
                .clusters
                .values()
                .map(|c| ClusterDoc {
                    name: c.name.clone(),
                    countries: c.countries.iter().cloned().collect(),
                })
                .collect(),
        };
        Ok(toml::to_string(&doc)?)
    }

    /// Union of every cluster's countries.
    pub fn all_countries(&self) -> BTreeSet<String> {
        self.clusters
            .values()
            .flat_map(|c| c.countries.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ScopeDoc {
    kind: Option<ScopeKind>,
    #[serde(default)]
    cluster: Vec<ClusterDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClusterDoc {
    name: String,
    countries: Vec<String>,
}

pub fn union_cluster(a: &CountryCluster, b: &CountryCluster, name: &str) -> CountryCluster {
    CountryCluster {
        name: name.to_string(),
        countries: a.countries.union(&b.countries).cloned().collect(),
    }
}

fn risk_rank(name: &str) -> Option<u8> {
    match name {
        LOW_RISK => Some(0),
        MEDIUM_RISK => Some(1),
        HIGH_RISK => Some(2),
        _ => None,
    }
}

fn line_of(source: &str, needle: &str, cluster: &str) -> usize {
    // First line mentioning the entry after the cluster's name line.
    let lines: Vec<&str> = source.lines().collect();
    let start = lines
        .iter()
        .position(|l| l.contains(&format!("\"{cluster}\"")))
        .unwrap_or(0);
    lines
        .iter()
        .enumerate()
        .skip(start)
        .find(|(_, l)| l.contains(needle))
        .map(|(i, _)| i + 1)
        .unwrap_or(start + 1)
}

pub fn load_scopes(source: &str) -> Result<ScopeSet> {
    let doc: ScopeDoc = toml::from_str(source)?;
    let kind = doc.kind.unwrap_or_default();
    let mut clusters: BTreeMap<String, CountryCluster> = BTreeMap::new();
    for c in doc.cluster {
        if clusters.contains_key(&c.name) {
            return Err(Error::DuplicateCluster(c.name));
        }
        if c.countries.is_empty() {
            return Err(Error::InvalidScope(format!(
                "cluster {} lists no countries",
                c.name
            )));
        }
        let mut codes = BTreeSet::new();
        for raw in &c.countries {
            let code = normalize_country(raw).ok_or_else(|| Error::UnknownCountry {
                name: raw.clone(),
                context: format!(
                    "cluster {:?}, line {}",
                    c.name,
                    line_of(source, raw, &c.name)
                ),
            })?;
            codes.insert(code.to_string());
        }
        clusters.insert(
            c.name.clone(),
            CountryCluster {
                name: c.name,
                countries: codes,
            },
        );
    }
    let mut set = ScopeSet {
        kind,
        clusters,
        warnings: Vec::new(),
    };
    resolve_tier_conflicts(&mut set);
    if kind == ScopeKind::Geopolitical {
        for tier in [LOW_RISK, MEDIUM_RISK, HIGH_RISK] {
            if !set.clusters.contains_key(tier) {
                return Err(Error::InvalidScope(format!(
                    "geopolitical scope set missing {tier}"
                )));
            }
        }
    }
    Ok(set)
}

/// A country listed in two risk tiers stays only in the lower-risk one.
fn resolve_tier_conflicts(set: &mut ScopeSet) {
    let mut tiers: Vec<(u8, String)> = set
        .clusters
        .keys()
        .filter_map(|n| risk_rank(n).map(|r| (r, n.clone())))
        .collect();
    tiers.sort();
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    for (_, tier) in tiers {
        let cluster = set.clusters.get_mut(&tier).expect("tier present");
        let mut keep = BTreeSet::new();
        for code in &cluster.countries {
            match seen.get(code) {
                Some(lower) => set.warnings.push(format!(
                    "{code} listed in {lower} and {tier}; kept in {lower}"
                )),
                None => {
                    seen.insert(code.clone(), tier.clone());
                    keep.insert(code.clone());
                }
            }
        }
        cluster.countries = keep;
    }
}

/// Raw country lists as printed for the builtin clusters (names, before normalization).
pub mod tables {
    pub const LOW_RISK: &[&str] = &[
        "Australia",
        "Belgium",
        "Canada",
        "Denmark",
        "Finland",
        "France",
        "Germany",
        "Ireland",
        "Italy",
        "Japan",
        "Netherlands",
        "New Zealand",
        "Norway",
        "South Korea",
        "Spain",
        "Sweden",
        "Taiwan",
        "United Kingdom",
        "United States",
    ];
    pub const MEDIUM_RISK: &[&str] = &[
        "Algeria",
        "Angola",
        "Argentina",
        "Aruba",
        "Austria",
        "Azerbaijan",
        "Bahrain",
        "Bangladesh",
        "Bermuda",
        "Bhutan",
        "Bolivia",
        "Bosnia-Herzegovina",
        "Brazil",
        "Bulgaria",
        "Burkina Faso",
        "Cameroon",
        "Cayman Islands",
        "Chad",
        "Chile",
        "Colombia",
        "Costa Rica",
        "Croatia",
        "Curaçao",
        "Cyprus",
        "Czech Republic",
        "Czechia",
        "Côte d'Ivoire",
        "Dominica",
        "Dominican Republic",
        "Ecuador",
        "Egypt",
        "El Salvador",
        "Estonia",
        "Ethiopia",
        "Fiji",
        "Ghana",
        "Ghana",
        "Greece",
        "Guatemala",
        "Guinea",
        "Guyana",
        "Honduras",
        "Hong Kong",
        "Hungary",
        "Iceland",
        "India",
        "Indonesia",
        "Israel",
        "Jamaica",
        "Jordan",
        "Kazakhstan",
        "Kenya",
        "Kuwait",
        "Kyrgyzstan",
        "Laos",
        "Latvia",
        "Liberia",
        "Liechtenstein",
        "Lithuania",
        "Luxembourg",
        "Madagascar",
        "Malaysia",
        "Mali",
        "Malta",
        "Marshall Islands",
        "Mauritania",
        "Mauritius",
        "Mexico",
        "Moldova",
        "Mongolia",
        "Morocco",
        "Mozambique",
        "Namibia",
        "New Caledonia",
        "Nigeria",
        "Oman",
        "Pakistan",
        "Panama",
        "Papua New Guinea",
        "Peru",
        "Philippines",
        "Poland",
        "Portugal",
        "Puerto Rico",
        "Qatar",
        "Romania",
        "Saudi Arabia",
        "Serbia",
        "Singapore",
        "Slovakia",
        "Slovenia",
        "South Africa",
        "Sri Lanka",
        "Suriname",
        "Switzerland",
        "Tanzania",
        "Thailand",
        "Tunisia",
        "Türkiye",
        "Uganda",
        "Ukraine",
        "United Arab Emirates",
        "Uruguay",
        "Uzbekistan",
        "Vietnam",
        "Virgin Islands",
        "Zambia",
    ];
    pub const HIGH_RISK: &[&str] = &[
        "Belarus",
        "Cambodia",
        "China",
        "DR Congo",
        "Cuba",
        "Iran",
        "Iran",
        "Iraq",
        "Lebanon",
        "Libya",
        "Myanmar",
        "North Korea",
        "Russian Federation",
        "Venezuela",
        "Zimbabwe",
    ];
    pub const ASIAN: &[&str] = &[
        "China",
        "Hong Kong",
        "India",
        "Indonesia",
        "Japan",
        "Malaysia",
        "Singapore",
        "South Korea",
        "Taiwan",
        "Vietnam",
    ];
    pub const AMERICAN: &[&str] = &["Canada", "Mexico", "United States"];
    pub const EUROPEAN: &[&str] = &[
        "Austria",
        "Belgium",
        "Bulgaria",
        "Croatia",
        "Cyprus",
        "Czech Republic",
        "Denmark",
        "Estonia",
        "Finland",
        "France",
        "Germany",
        "Greece",
        "Hungary",
        "Ireland",
        "Italy",
        "Latvia",
        "Lithuania",
        "Luxembourg",
        "Malta",
        "Netherlands",
        "Norway",
        "Poland",
        "Portugal",
        "Romania",
        "Slovakia",
        "Slovenia",
        "Spain",
        "Sweden",
        "Switzerland",
        "United Kingdom",
    ];
}

fn cluster_from_names(name: &str, names: &[&str]) -> CountryCluster {
    CountryCluster {
        name: name.to_string(),
        countries: names
            .iter()
            .map(|n| {
                normalize_country(n)
                    .unwrap_or_else(|| panic!("builtin country {n} missing from table"))
                    .to_string()
            })
            .collect(),
    }
}

pub fn geographical_scopes() -> ScopeSet {
    let clusters = [
        cluster_from_names("American", tables::AMERICAN),
        cluster_from_names("European", tables::EUROPEAN),
        cluster_from_names("Asian", tables::ASIAN),
    ];
    ScopeSet {
        kind: ScopeKind::Geographical,
        clusters: clusters.into_iter().map(|c| (c.name.clone(), c)).collect(),
        warnings: Vec::new(),
    }
}

pub fn geopolitical_scopes() -> ScopeSet {
    let clusters = [
        cluster_from_names(LOW_RISK, tables::LOW_RISK),
        cluster_from_names(MEDIUM_RISK, tables::MEDIUM_RISK),
        cluster_from_names(HIGH_RISK, tables::HIGH_RISK),
    ];
    let mut set = ScopeSet {
        kind: ScopeKind::Geopolitical,
        clusters: clusters.into_iter().map(|c| (c.name.clone(), c)).collect(),
        warnings: Vec::new(),
    };
    resolve_tier_conflicts(&mut set);
    set
}

/// All six builtin clusters.
pub fn builtin_scopes() -> ScopeSet {
    let mut set = geographical_scopes();
    let geo = geopolitical_scopes();
    set.clusters.extend(geo.clusters);
    set.warnings = geo.warnings;
    set.kind = ScopeKind::Custom;
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_cluster_contents() {
        let s = builtin_scopes();
        assert_eq!(s.clusters.len(), 6);
        assert_eq!(
            s.clusters["American"].countries,
            BTreeSet::from(["CA".to_string(), "MX".to_string(), "US".to_string()])
        );
        assert_eq!(s.clusters[LOW_RISK].len(), 19);
        assert_eq!(s.clusters["Asian"].len(), 10);
        assert!(s.clusters[HIGH_RISK].contains("CN"));
        assert!(s.clusters[HIGH_RISK].contains("RU"));
    }

    #[test]
    fn printed_lists_match_header_counts_where_they_can() {
        // Printed entry counts, duplicates included.
        assert_eq!(tables::LOW_RISK.len(), 19);
        assert_eq!(tables::MEDIUM_RISK.len(), 107);
        assert_eq!(tables::HIGH_RISK.len(), 15);
        assert_eq!(tables::ASIAN.len(), 10);
        assert_eq!(tables::AMERICAN.len(), 3);
        // Ghana twice, Czechia/Czech Republic, Iran twice collapse.
        let s = builtin_scopes();
        assert_eq!(s.clusters[MEDIUM_RISK].len(), 105);
        assert_eq!(s.clusters[HIGH_RISK].len(), 14);
        assert_eq!(s.clusters["European"].len(), 30);
    }

    #[test]
    fn tiers_are_disjoint() {
        let s = geopolitical_scopes();
        let l = &s.clusters[LOW_RISK].countries;
        let m = &s.clusters[MEDIUM_RISK].countries;
        let h = &s.clusters[HIGH_RISK].countries;
        assert!(l.is_disjoint(m) && l.is_disjoint(h) && m.is_disjoint(h));
    }

    #[test]
    fn low_and_medium_union_from_lists() {
        // Set-union oracle straight from the printed name lists.
        let mut names: BTreeSet<&str> = tables::LOW_RISK.iter().copied().collect();
        names.extend(tables::MEDIUM_RISK.iter().copied());
        let codes: BTreeSet<String> = names
            .iter()
            .map(|n| normalize_country(n).unwrap().to_string())
            .collect();
        let s = builtin_scopes();
        let u = s.resolve(LOW_AND_MEDIUM_RISK).unwrap();
        assert_eq!(u.countries, codes);
        assert_eq!(u.len(), 124);
    }

    #[test]
    fn union_properties() {
        let a = CountryCluster::new("a", &["DE"]);
        let b = CountryCluster::new("b", &["FR"]);
        assert_eq!(union_cluster(&a, &b, "ab").len(), 2);
        assert_eq!(union_cluster(&a, &a, "a").countries, a.countries);
    }

    #[test]
    fn load_one_cluster() {
        let s = load_scopes("[[cluster]]\nname = \"EU-mini\"\ncountries = [\"DE\", \"France\"]\n")
            .unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert_eq!(s.clusters["EU-mini"].len(), 2);
        assert!(s.clusters["EU-mini"].contains("FR"));
    }

    #[test]
    fn load_errors() {
        let dup = "[[cluster]]\nname = \"a\"\ncountries = [\"DE\"]\n[[cluster]]\nname = \"a\"\ncountries = [\"FR\"]\n";
        let err = load_scopes(dup).unwrap_err();
        assert!(err.to_string().contains("duplicate cluster"));

        let bad = "[[cluster]]\nname = \"a\"\ncountries = [\n  \"DE\",\n  \"Atlantis\",\n]\n";
        let err = load_scopes(bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Atlantis") && msg.contains("line 5"), "{msg}");

        assert!(matches!(load_scopes("[[cluster]\n"), Err(Error::TomlDe(_))));
        assert!(load_scopes("[[cluster]]\nname = \"a\"\ncountries = []\n").is_err());
        let geo =
            "kind = \"geopolitical\"\n[[cluster]]\nname = \"Low Risk\"\ncountries = [\"DE\"]\n";
        assert!(matches!(load_scopes(geo), Err(Error::InvalidScope(_))));
    }

    #[test]
    fn tier_conflict_goes_to_lower_risk() {
        let doc = "kind = \"geopolitical\"\n\
            [[cluster]]\nname = \"Low Risk\"\ncountries = [\"DE\"]\n\
            [[cluster]]\nname = \"Medium Risk\"\ncountries = [\"DE\", \"PL\"]\n\
            [[cluster]]\nname = \"High Risk\"\ncountries = [\"CN\"]\n";
        let s = load_scopes(doc).unwrap();
        assert!(!s.clusters[MEDIUM_RISK].contains("DE"));
        assert!(s.clusters[LOW_RISK].contains("DE"));
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn builtin_round_trip() {
        let s = builtin_scopes();
        let back = load_scopes(&s.to_toml().unwrap()).unwrap();
        assert_eq!(back.clusters, s.clusters);
        assert!(matches!(
            s.resolve("Nowhere"),
            Err(Error::UnknownCluster(_))
        ));
    }
}
