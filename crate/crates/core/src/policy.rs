//! Country+1, Friendshoring and Reshoring rewiring.
//!
//! All three policies share one loop: every acting customer looks at each of its
//! targeted suppliers, and for every product of that supplier searches the
//! admissible alternative producers. A product with no alternative is flagged
//! for that customer (non-substitutable). Otherwise selected alternatives are
//! attached as new suppliers. Friendshoring and Reshoring then drop the targeted
//! supplier when every one of its products found an alternative; Country+1
//! never removes anything.
//!
//! Substitutability is decided on supplier portfolios, never on per-edge
//! product annotations, and portfolios are never modified.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{FirmId, ProductId, SupplyNetwork};
use crate::scopes::CountryCluster;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    #[serde(alias = "country+1")]
    CountryPlusOne,
    Friendshoring,
    Reshoring,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [
        PolicyKind::CountryPlusOne,
        PolicyKind::Friendshoring,
        PolicyKind::Reshoring,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PolicyKind::CountryPlusOne => "Country+1",
            PolicyKind::Friendshoring => "Friendshoring",
            PolicyKind::Reshoring => "Reshoring",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which countries act, and for Country+1 which are risky.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyScope {
    pub policy: PolicyKind,
    /// Risky countries X (Country+1 only).
    pub risky: Option<CountryCluster>,
    /// Acting countries S (S1 for Reshoring).
    pub acting: CountryCluster,
}

impl PolicyScope {
    pub fn country_plus_one(risky: CountryCluster, acting: CountryCluster) -> Self {
        PolicyScope {
            policy: PolicyKind::CountryPlusOne,
            risky: Some(risky),
            acting,
        }
    }

    pub fn friendshoring(acting: CountryCluster) -> Self {
        PolicyScope {
            policy: PolicyKind::Friendshoring,
            risky: None,
            acting,
        }
    }

    pub fn reshoring(acting: CountryCluster) -> Self {
        PolicyScope {
            policy: PolicyKind::Reshoring,
            risky: None,
            acting,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.acting.is_empty() {
            return Err(Error::EmptyScope);
        }
        match (self.policy, &self.risky) {
            (PolicyKind::CountryPlusOne, None) => Err(Error::InvalidScope(
                "Country+1 needs a risky country set".into(),
            )),
            (PolicyKind::CountryPlusOne, Some(x)) => {
                if x.is_empty() {
                    return Err(Error::EmptyScope);
                }
                match x.countries.intersection(&self.acting.countries).next() {
                    Some(code) => Err(Error::ScopeOverlap(code.clone())),
                    None => Ok(()),
                }
            }
            (_, Some(_)) => Err(Error::InvalidScope(format!(
                "{} takes no risky country set",
                self.policy
            ))),
            (_, None) => Ok(()),
        }
    }
}

/// How many alternative suppliers get attached per substitutable product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    /// Every admissible alternative.
    #[default]
    All,
    /// `k` alternatives drawn uniformly without replacement.
    Sample { k: usize },
}

impl FromStr for SelectionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(SelectionStrategy::All);
        }
        s.strip_prefix("sample:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .map(|k| SelectionStrategy::Sample { k })
            .ok_or_else(|| Error::InvalidConfig(format!("selection {s:?}, expected all|sample:K")))
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionStrategy::All => f.write_str("all"),
            SelectionStrategy::Sample { k } => write!(f, "sample:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutcome {
    pub policy: PolicyKind,
    pub network_after: SupplyNetwork,
    /// Non-substitutable products.
    pub ns_products: BTreeSet<ProductId>,
    /// Customers holding at least one non-substitutable product.
    pub ns_companies: BTreeSet<FirmId>,
    /// (supplier, customer)
    pub added_edges: BTreeSet<(FirmId, FirmId)>,
    pub removed_edges: BTreeSet<(FirmId, FirmId)>,
    /// country → number of non-substitutable companies located there
    pub affected_by_country: BTreeMap<String, usize>,
    /// industry → number of non-substitutable products carrying that label
    pub affected_by_industry: BTreeMap<String, usize>,
    /// (customer, product)
    pub flagged_pairs: BTreeSet<(FirmId, ProductId)>,
}

/// Producers of `p` among `candidates`, other than `exclude`.
pub fn alternative_suppliers(
    net: &SupplyNetwork,
    p: &ProductId,
    candidates: &BTreeSet<FirmId>,
    exclude: &FirmId,
) -> Result<BTreeSet<FirmId>> {
    Ok(net
        .producers_of(p)?
        .into_iter()
        .filter(|k| k != exclude && candidates.contains(k))
        .collect())
}

pub fn apply_country_plus_one(
    net: &SupplyNetwork,
    scope: &PolicyScope,
    sel: SelectionStrategy,
    seed: u64,
) -> Result<PolicyOutcome> {
    expect_policy(scope, PolicyKind::CountryPlusOne)?;
    apply_policy(net, scope, sel, seed)
}

pub fn apply_friendshoring(
    net: &SupplyNetwork,
    scope: &PolicyScope,
    sel: SelectionStrategy,
    seed: u64,
) -> Result<PolicyOutcome> {
    expect_policy(scope, PolicyKind::Friendshoring)?;
    apply_policy(net, scope, sel, seed)
}

pub fn apply_reshoring(
    net: &SupplyNetwork,
    scope: &PolicyScope,
    sel: SelectionStrategy,
    seed: u64,
) -> Result<PolicyOutcome> {
    expect_policy(scope, PolicyKind::Reshoring)?;
    apply_policy(net, scope, sel, seed)
}

fn expect_policy(scope: &PolicyScope, kind: PolicyKind) -> Result<()> {
    if scope.policy != kind {
        return Err(Error::InvalidScope(format!(
            "expected a {kind} scope, got {}",
            scope.policy
        )));
    }
    Ok(())
}

/// Runs whichever policy `scope` names on a private copy of `net`.
pub fn apply_policy(
    net: &SupplyNetwork,
    scope: &PolicyScope,
    sel: SelectionStrategy,
    seed: u64,
) -> Result<PolicyOutcome> {
    scope.validate()?;
    if let SelectionStrategy::Sample { k: 0 } = sel {
        return Err(Error::InvalidConfig(
            "sample size must be at least 1".into(),
        ));
    }
    let n = net.firm_count();
    let in_set = |cluster: &CountryCluster| -> Vec<bool> {
        net.firms()
            .iter()
            .map(|f| cluster.contains(&f.country))
            .collect()
    };
    let acting = in_set(&scope.acting);
    let risky = scope
        .risky
        .as_ref()
        .map(in_set)
        .unwrap_or_else(|| vec![false; n]);

    let mut after = net.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flagged: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut added: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut removed: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut alts: Vec<usize> = Vec::new();

    for c in (0..n).filter(|&c| acting[c]) {
        let home = &net.firm(c).country;
        let targeted = |s: usize| match scope.policy {
            PolicyKind::CountryPlusOne => risky[s],
            PolicyKind::Friendshoring => !acting[s],
            PolicyKind::Reshoring => &net.firm(s).country != home,
        };
        let admissible = |k: usize| match scope.policy {
            PolicyKind::CountryPlusOne | PolicyKind::Friendshoring => acting[k],
            PolicyKind::Reshoring => acting[k] && &net.firm(k).country == home,
        };
        let suppliers: Vec<usize> = after
            .supplier_indices(c)
            .iter()
            .copied()
            .filter(|&s| targeted(s))
            .collect();
        for s in suppliers {
            let mut substitutable = true;
            for &p in net.portfolio(s) {
                alts.clear();
                alts.extend(
                    net.producers(p)
                        .iter()
                        .copied()
                        .filter(|&k| k != c && admissible(k)),
                );
                if alts.is_empty() {
                    flagged.insert((c, p));
                    substitutable = false;
                    continue;
                }
                let chosen: Vec<usize> = match sel {
                    SelectionStrategy::Sample { k } if k < alts.len() => {
                        alts.choose_multiple(&mut rng, k).copied().collect()
                    }
                    _ => alts.clone(),
                };
                for k in chosen {
                    if after.add_edge_idx(k, c, Some(p)) {
                        added.insert((k, c));
                    }
                }
            }
            if substitutable && scope.policy != PolicyKind::CountryPlusOne {
                after.remove_edge_idx(s, c);
                removed.insert((s, c));
            }
        }
    }

    let fid = |i: usize| net.firm(i).id.clone();
    let pid = |i: usize| net.product(i).id.clone();
    let ns_company_idx: BTreeSet<usize> = flagged.iter().map(|&(c, _)| c).collect();
    let ns_product_idx: BTreeSet<usize> = flagged.iter().map(|&(_, p)| p).collect();
    let mut affected_by_country = BTreeMap::new();
    for &c in &ns_company_idx {
        *affected_by_country
            .entry(net.firm(c).country.clone())
            .or_insert(0) += 1;
    }
    let mut affected_by_industry = BTreeMap::new();
    for &p in &ns_product_idx {
        *affected_by_industry
            .entry(net.product(p).industry.clone())
            .or_insert(0) += 1;
    }
    Ok(PolicyOutcome {
        policy: scope.policy,
        ns_products: ns_product_idx.iter().map(|&p| pid(p)).collect(),
        ns_companies: ns_company_idx.iter().map(|&c| fid(c)).collect(),
        added_edges: added.iter().map(|&(s, c)| (fid(s), fid(c))).collect(),
        removed_edges: removed.iter().map(|&(s, c)| (fid(s), fid(c))).collect(),
        flagged_pairs: flagged.iter().map(|&(c, p)| (fid(c), pid(p))).collect(),
        affected_by_country,
        affected_by_industry,
        network_after: after,
    })
}

fn top_k<K: Ord + Clone>(counts: BTreeMap<K, usize>, k: usize) -> Result<Vec<(K, usize)>> {
    if k < 1 {
        return Err(Error::InvalidConfig("top-k needs k >= 1".into()));
    }
    let mut ranked: Vec<(K, usize)> = counts.into_iter().collect();
    // BTreeMap order already breaks ties lexicographically; the sort is stable.
    ranked.sort_by_key(|r| std::cmp::Reverse(r.1));
    ranked.truncate(k);
    Ok(ranked)
}

/// Industries by number of distinct non-substitutable products.
pub fn rank_vulnerable_industries(
    outcome: &PolicyOutcome,
    k: usize,
) -> Result<Vec<(String, usize)>> {
    top_k(outcome.affected_by_industry.clone(), k)
}

/// Products by number of distinct customers that could not substitute them.
pub fn rank_vulnerable_products(
    outcome: &PolicyOutcome,
    k: usize,
) -> Result<Vec<(ProductId, usize)>> {
    let mut counts: BTreeMap<ProductId, usize> = BTreeMap::new();
    for (_, p) in &outcome.flagged_pairs {
        *counts.entry(p.clone()).or_default() += 1;
    }
    top_k(counts, k)
}

/// Share of non-substitutable products that are mined; 0 when there are none.
pub fn mining_share(outcome: &PolicyOutcome) -> f64 {
    if outcome.ns_products.is_empty() {
        return 0.0;
    }
    let net = &outcome.network_after;
    let mining = outcome
        .ns_products
        .iter()
        .filter(|p| {
            net.product_index(p)
                .map(|i| net.product(i).is_mining)
                .unwrap_or(false)
        })
        .count();
    mining as f64 / outcome.ns_products.len() as f64
}

/// Pre-policy total degree of each non-substitutable company, as degree → count.
pub fn affected_degree_distribution(
    net_before: &SupplyNetwork,
    outcome: &PolicyOutcome,
) -> Result<BTreeMap<usize, usize>> {
    let mut hist = BTreeMap::new();
    for c in &outcome.ns_companies {
        let i = net_before.firm_index(c)?;
        *hist.entry(net_before.total_degree(i)).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Affected-entity tallies for reporting. Built from one outcome, or averaged
/// over several with [`AffectedSummary::mean`] (absent keys count as zero).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AffectedSummary {
    /// country → non-substitutable companies
    pub by_country: BTreeMap<String, f64>,
    /// industry → non-substitutable products
    pub by_industry: BTreeMap<String, f64>,
    /// product → customers that could not substitute it
    pub by_product: BTreeMap<ProductId, f64>,
    /// pre-policy total degree → non-substitutable companies
    pub degree_histogram: BTreeMap<usize, f64>,
}

fn as_real<K: Ord>(m: BTreeMap<K, usize>) -> BTreeMap<K, f64> {
    m.into_iter().map(|(k, v)| (k, v as f64)).collect()
}

fn ranked<K: Ord + Clone>(m: &BTreeMap<K, f64>, k: usize) -> Vec<(K, f64)> {
    let mut v: Vec<(K, f64)> = m.iter().map(|(k, &x)| (k.clone(), x)).collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1));
    v.truncate(k);
    v
}

fn mean_maps<K: Ord + Clone>(maps: Vec<&BTreeMap<K, f64>>) -> BTreeMap<K, f64> {
    let n = maps.len().max(1) as f64;
    let mut out: BTreeMap<K, f64> = BTreeMap::new();
    for m in maps {
        for (k, v) in m {
            *out.entry(k.clone()).or_default() += v;
        }
    }
    out.values_mut().for_each(|v| *v /= n);
    out
}

impl AffectedSummary {
    pub fn from_outcome(net_before: &SupplyNetwork, outcome: &PolicyOutcome) -> Result<Self> {
        let mut by_product: BTreeMap<ProductId, usize> = BTreeMap::new();
        for (_, p) in &outcome.flagged_pairs {
            *by_product.entry(p.clone()).or_default() += 1;
        }
        Ok(AffectedSummary {
            by_country: as_real(outcome.affected_by_country.clone()),
            by_industry: as_real(outcome.affected_by_industry.clone()),
            by_product: as_real(by_product),
            degree_histogram: as_real(affected_degree_distribution(net_before, outcome)?),
        })
    }

    pub fn mean(items: &[AffectedSummary]) -> Self {
        AffectedSummary {
            by_country: mean_maps(items.iter().map(|s| &s.by_country).collect()),
            by_industry: mean_maps(items.iter().map(|s| &s.by_industry).collect()),
            by_product: mean_maps(items.iter().map(|s| &s.by_product).collect()),
            degree_histogram: mean_maps(items.iter().map(|s| &s.degree_histogram).collect()),
        }
    }

    /// Highest counts first, ties by name.
    pub fn top_industries(&self, k: usize) -> Vec<(String, f64)> {
        ranked(&self.by_industry, k)
    }

    pub fn top_products(&self, k: usize) -> Vec<(ProductId, f64)> {
        ranked(&self.by_product, k)
    }
}
