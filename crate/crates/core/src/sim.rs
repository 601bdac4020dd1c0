//! Seeded multi-iteration scenario runs and their reports.
//!
//! Seed derivation, all through [`derive_seed`]:
//!
//! - baseline metrics: `derive_seed(master_seed, SEED_TAG_BASELINE)`
//! - iteration `i` (0-based): `child = derive_seed(master_seed, SEED_TAG_ITERATION + i)`
//! - policy sampling in iteration `i`: `derive_seed(child, SEED_TAG_POLICY)`
//! - post-policy metrics in iteration `i`: `metric_report(after, child, ..)`,
//!   which derives its own community and path-sampling streams from `child`
//!
//! Generated networks use the generator config's own `seed`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::countries::normalize_country;
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratorConfig};
use crate::io::{self, load_tables};
use crate::metrics::{derive_seed, metric_report, MetricReport, PathMode};
use crate::network::{ProductId, SupplyNetwork};
use crate::policy::{
    apply_policy, mining_share, AffectedSummary, PolicyKind, PolicyScope, SelectionStrategy,
};
use crate::scopes::{
    builtin_scopes, load_scopes, CountryCluster, ScopeSet, HIGH_RISK, LOW_AND_MEDIUM_RISK, LOW_RISK,
};

pub const SEED_TAG_BASELINE: u64 = 10;
pub const SEED_TAG_POLICY: u64 = 11;
pub const SEED_TAG_ITERATION: u64 = 1 << 32;

pub const DEFAULT_ITERATIONS: usize = 5;
pub const DEFAULT_SELECTION: SelectionStrategy = SelectionStrategy::Sample { k: 1 };
pub const DEFAULT_PATH_MODE: PathMode = PathMode::Sampled { k: 1000 };

pub fn iteration_seed(master_seed: u64, i: usize) -> u64 {
    derive_seed(master_seed, SEED_TAG_ITERATION + i as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkSource {
    Files {
        firms: PathBuf,
        products: PathBuf,
        edges: PathBuf,
    },
    Generator(GeneratorConfig),
}

impl NetworkSource {
    pub fn from_dir(dir: impl AsRef<Path>) -> Self {
        let d = dir.as_ref();
        NetworkSource::Files {
            firms: d.join(io::FIRMS_FILE),
            products: d.join(io::PRODUCTS_FILE),
            edges: d.join(io::EDGES_FILE),
        }
    }

    /// Loads or generates. Ingestion rejects are tolerated; the caller can
    /// inspect them through [`io::load_tables`] directly.
    pub fn load(&self) -> Result<SupplyNetwork> {
        match self {
            NetworkSource::Files {
                firms,
                products,
                edges,
            } => Ok(load_tables(firms, products, edges)?.0),
            NetworkSource::Generator(cfg) => generate(cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub source: NetworkSource,
    pub scope: PolicyScope,
    pub selection: SelectionStrategy,
    pub iterations: usize,
    pub master_seed: u64,
    pub path_mode: PathMode,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        self.scope.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    // linear interpolation between closest ranks
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Stats {
            mean,
            std,
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

/// One metric's baseline value and its spread over the iterations. Undefined
/// iteration values are skipped; `stats` is `None` when every one was.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDistribution {
    pub metric: String,
    pub baseline: Option<f64>,
    pub samples: usize,
    pub stats: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub index: usize,
    pub seed: u64,
    pub report: MetricReport,
    pub ns_products: usize,
    pub ns_companies: usize,
    pub mining_share: f64,
    pub added_edges: usize,
    pub removed_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub scenario: String,
    pub policy: PolicyKind,
    pub selection: SelectionStrategy,
    pub iterations: usize,
    pub master_seed: u64,
    pub baseline: MetricReport,
    /// In [`MetricReport::ROW_LABELS`] order.
    pub metrics: Vec<MetricDistribution>,
    pub ns_products_mean: f64,
    pub ns_companies_mean: f64,
    pub mining_share_mean: f64,
    pub added_edges_mean: f64,
    pub removed_edges_mean: f64,
    pub ns_products_union: BTreeSet<ProductId>,
    pub ns_products_intersection: BTreeSet<ProductId>,
    /// Affected-entity tallies averaged over iterations.
    pub affected: AffectedSummary,
    pub per_iteration: Vec<IterationSummary>,
}

impl AggregateResult {
    /// Iteration means, for a before/after metric table.
    pub fn mean_column(&self) -> [Option<f64>; 10] {
        let mut out = [None; 10];
        for (o, d) in out.iter_mut().zip(&self.metrics) {
            *o = d.stats.map(|s| s.mean);
        }
        out
    }

    pub fn metric(&self, label: &str) -> Option<&MetricDistribution> {
        self.metrics.iter().find(|d| d.metric == label)
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn with_context<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Scenario {
        scenario: name.to_string(),
        source: Box::new(e),
    })
}

pub fn run_scenario(sc: &Scenario) -> Result<AggregateResult> {
    let net = with_context(&sc.name, sc.source.load())?;
    run_scenario_on(&net, sc)
}

/// Runs `sc` against an already loaded network, ignoring `sc.source`.
pub fn run_scenario_on(net: &SupplyNetwork, sc: &Scenario) -> Result<AggregateResult> {
    with_context(&sc.name, run_inner(net, sc))
}

fn run_inner(net: &SupplyNetwork, sc: &Scenario) -> Result<AggregateResult> {
    sc.validate()?;
    let baseline = metric_report(
        net,
        derive_seed(sc.master_seed, SEED_TAG_BASELINE),
        sc.path_mode,
    );

    let runs: Vec<(IterationSummary, AffectedSummary, BTreeSet<ProductId>)> = (0..sc.iterations)
        .into_par_iter()
        .map(|i| {
            let seed = iteration_seed(sc.master_seed, i);
            let outcome = apply_policy(
                net,
                &sc.scope,
                sc.selection,
                derive_seed(seed, SEED_TAG_POLICY),
            )?;
            let report = metric_report(&outcome.network_after, seed, sc.path_mode);
            let affected = AffectedSummary::from_outcome(net, &outcome)?;
            let summary = IterationSummary {
                index: i,
                seed,
                report,
                ns_products: outcome.ns_products.len(),
                ns_companies: outcome.ns_companies.len(),
                mining_share: mining_share(&outcome),
                added_edges: outcome.added_edges.len(),
                removed_edges: outcome.removed_edges.len(),
            };
            Ok((summary, affected, outcome.ns_products))
        })
        .collect::<Result<Vec<_>>>()?;

    let base_values = baseline.values();
    let metrics = MetricReport::ROW_LABELS
        .iter()
        .enumerate()
        .map(|(row, label)| {
            let samples: Vec<f64> = runs
                .iter()
                .filter_map(|(s, _, _)| s.report.values()[row])
                .collect();
            MetricDistribution {
                metric: label.to_string(),
                baseline: base_values[row],
                samples: samples.len(),
                stats: Stats::of(&samples),
            }
        })
        .collect();

    let mut union = BTreeSet::new();
    let mut intersection: Option<BTreeSet<ProductId>> = None;
    for (_, _, ns) in &runs {
        union.extend(ns.iter().cloned());
        intersection = Some(match intersection {
            None => ns.clone(),
            Some(acc) => acc.intersection(ns).cloned().collect(),
        });
    }
    let affected: Vec<AffectedSummary> = runs.iter().map(|(_, a, _)| a.clone()).collect();
    let per_iteration: Vec<IterationSummary> = runs.into_iter().map(|(s, _, _)| s).collect();
    let avg = |f: fn(&IterationSummary) -> f64| mean(per_iteration.iter().map(f));

    Ok(AggregateResult {
        scenario: sc.name.clone(),
        policy: sc.scope.policy,
        selection: sc.selection,
        iterations: sc.iterations,
        master_seed: sc.master_seed,
        baseline,
        metrics,
        ns_products_mean: avg(|s| s.ns_products as f64),
        ns_companies_mean: avg(|s| s.ns_companies as f64),
        mining_share_mean: avg(|s| s.mining_share),
        added_edges_mean: avg(|s| s.added_edges as f64),
        removed_edges_mean: avg(|s| s.removed_edges as f64),
        ns_products_union: union,
        ns_products_intersection: intersection.unwrap_or_default(),
        affected: AffectedSummary::mean(&affected),
        per_iteration,
    })
}

/// Runs scenarios concurrently, loading each distinct network source once.
/// Results come back in input order; a failing scenario does not stop the rest.
pub fn run_suite(scenarios: &[Scenario]) -> Vec<Result<AggregateResult>> {
    let mut sources: Vec<&NetworkSource> = Vec::new();
    for sc in scenarios {
        if !sources.contains(&&sc.source) {
            sources.push(&sc.source);
        }
    }
    let nets: Vec<std::result::Result<Arc<SupplyNetwork>, String>> = sources
        .par_iter()
        .map(|s| s.load().map(Arc::new).map_err(|e| e.to_string()))
        .collect();
    scenarios
        .par_iter()
        .map(|sc| {
            let at = sources
                .iter()
                .position(|s| *s == &sc.source)
                .expect("source registered");
            match &nets[at] {
                Ok(net) => run_scenario_on(net, sc),
                Err(msg) => with_context(
                    &sc.name,
                    Err(Error::InvalidConfig(format!("network source: {msg}"))),
                ),
            }
        })
        .collect()
}

/// The fifteen standard cells: three geographical clusters with China as the
/// risky set for Country+1, and the Low Risk and Low & Medium Risk tiers with
/// High Risk as the risky set, each under all three policies.
///
/// China is removed from the acting set of the Asian Country+1 cell, since
/// risky and acting countries must be disjoint.
pub fn standard_suite(
    source: &NetworkSource,
    scopes: &ScopeSet,
    selection: SelectionStrategy,
    iterations: usize,
    master_seed: u64,
    path_mode: PathMode,
) -> Result<Vec<Scenario>> {
    let china = CountryCluster::new("China", &["CN"]);
    let high = scopes.resolve(HIGH_RISK)?;
    let cells: [(&str, &CountryCluster); 5] = [
        ("American", &china),
        ("European", &china),
        ("Asian", &china),
        (LOW_RISK, &high),
        (LOW_AND_MEDIUM_RISK, &high),
    ];
    let mut out = Vec::new();
    for (name, risky) in cells {
        let acting = scopes.resolve(name)?;
        for policy in PolicyKind::ALL {
            let scope = match policy {
                PolicyKind::CountryPlusOne => {
                    let mut acting = acting.clone();
                    acting.countries.retain(|c| !risky.contains(c));
                    PolicyScope::country_plus_one(risky.clone(), acting)
                }
                PolicyKind::Friendshoring => PolicyScope::friendshoring(acting.clone()),
                PolicyKind::Reshoring => PolicyScope::reshoring(acting.clone()),
            };
            out.push(Scenario {
                name: format!("{name} {}", policy.label()),
                source: source.clone(),
                scope,
                selection,
                iterations,
                master_seed,
                path_mode,
            });
        }
    }
    Ok(out)
}

/// Lowercase, non-alphanumerics to `-`, for per-scenario output directories.
pub fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect();
    s.split('-')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

pub const METRICS_FILE: &str = "metrics.csv";
pub const BOXPLOT_FILE: &str = "boxplot.csv";
pub const SUBSTITUTABILITY_FILE: &str = "substitutability.csv";
pub const REPORT_FILE: &str = "report.json";

/// Everything written for one scenario, as one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    #[serde(flatten)]
    pub aggregate: AggregateResult,
    pub vulnerable_industries: Vec<(String, f64)>,
    pub vulnerable_products: Vec<(ProductId, f64)>,
}

/// Writes the metric table, box-plot data, substitutability counts, affected
/// tables and `report.json` into `dir`.
pub fn write_reports(
    agg: &AggregateResult,
    net: &SupplyNetwork,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    io::write_metric_columns(
        &[
            ("Baseline".to_string(), agg.baseline.values()),
            (agg.policy.label().to_string(), agg.mean_column()),
        ],
        dir.join(METRICS_FILE),
    )?;
    io::write_boxplot_data(agg, dir.join(BOXPLOT_FILE))?;
    io::write_substitutability(&[agg], dir.join(SUBSTITUTABILITY_FILE))?;
    io::write_affected(&agg.affected, net, dir)?;
    let report = ScenarioReport {
        aggregate: agg.clone(),
        vulnerable_industries: agg.affected.top_industries(io::TOP_K),
        vulnerable_products: agg.affected.top_products(io::TOP_K),
    };
    io::write_json(&report, dir.join(REPORT_FILE))
}

// ---- scenario documents ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    dir: Option<PathBuf>,
    firms: Option<PathBuf>,
    products: Option<PathBuf>,
    edges: Option<PathBuf>,
    generator: Option<GeneratorConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    name: String,
    policy: PolicyKind,
    acting: ScopeRef,
    risky: Option<ScopeRef>,
}

/// A cluster name, or an explicit list of country names or codes.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ScopeRef {
    Cluster(String),
    Countries(Vec<String>),
}

impl ScopeRef {
    fn label(&self) -> String {
        match self {
            ScopeRef::Cluster(name) => name.clone(),
            ScopeRef::Countries(list) => list.join("+"),
        }
    }

    fn resolve(&self, scopes: &ScopeSet) -> Result<CountryCluster> {
        match self {
            ScopeRef::Cluster(name) => scopes.resolve(name),
            ScopeRef::Countries(list) => {
                let codes = list
                    .iter()
                    .map(|raw| {
                        normalize_country(raw).ok_or_else(|| Error::UnknownCountry {
                            name: raw.clone(),
                            context: "scenario scope".into(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(CountryCluster::new(&self.label(), &codes))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: Option<String>,
    policy: Option<PolicyKind>,
    acting: Option<ScopeRef>,
    risky: Option<ScopeRef>,
    #[serde(default)]
    scenario: Vec<CellDoc>,
    suite: Option<String>,
    scope_set: Option<String>,
    selection: Option<String>,
    iterations: Option<usize>,
    master_seed: Option<u64>,
    path_mode: Option<String>,
    network: NetworkDoc,
}

fn resolve_path(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

fn network_source(doc: NetworkDoc, base: Option<&Path>) -> Result<NetworkSource> {
    let r = |p: &Path| resolve_path(base, p);
    match doc {
        NetworkDoc {
            generator: Some(cfg),
            dir: None,
            firms: None,
            products: None,
            edges: None,
        } => Ok(NetworkSource::Generator(cfg)),
        NetworkDoc {
            dir: Some(d),
            generator: None,
            firms: None,
            products: None,
            edges: None,
        } => Ok(NetworkSource::from_dir(r(&d))),
        NetworkDoc {
            firms: Some(f),
            products: Some(p),
            edges: Some(e),
            dir: None,
            generator: None,
        } => Ok(NetworkSource::Files {
            firms: r(&f),
            products: r(&p),
            edges: r(&e),
        }),
        _ => Err(Error::InvalidConfig(
            "[network] needs exactly one of: generator, dir, or firms+products+edges".into(),
        )),
    }
}

fn policy_scope(
    scopes: &ScopeSet,
    policy: PolicyKind,
    acting: &ScopeRef,
    risky: Option<&ScopeRef>,
) -> Result<PolicyScope> {
    let acting = acting.resolve(scopes)?;
    let scope = match (policy, risky) {
        (PolicyKind::CountryPlusOne, Some(x)) => {
            PolicyScope::country_plus_one(x.resolve(scopes)?, acting)
        }
        (PolicyKind::CountryPlusOne, None) => {
            return Err(Error::InvalidScope("Country+1 needs `risky`".into()))
        }
        (_, Some(_)) => return Err(Error::InvalidScope(format!("{policy} takes no `risky`"))),
        (PolicyKind::Friendshoring, None) => PolicyScope::friendshoring(acting),
        (PolicyKind::Reshoring, None) => PolicyScope::reshoring(acting),
    };
    scope.validate()?;
    Ok(scope)
}

/// Parses a scenario document. Relative paths resolve against `base`.
///
/// A document holds shared settings and a `[network]` table, plus either a
/// single top-level `name`/`policy`/`acting`/`risky`, any number of
/// `[[scenario]]` cells, or `suite = "standard"` for the fifteen standard cells.
pub fn parse_scenarios(text: &str, base: Option<&Path>) -> Result<Vec<Scenario>> {
    let doc: ScenarioDoc = toml::from_str(text)?;
    let scopes = match doc.scope_set.as_deref() {
        None | Some("builtin") => builtin_scopes(),
        Some(path) => load_scopes(&fs::read_to_string(resolve_path(base, Path::new(path)))?)?,
    };
    let selection = doc
        .selection
        .as_deref()
        .map_or(Ok(DEFAULT_SELECTION), str::parse)?;
    let path_mode = doc
        .path_mode
        .as_deref()
        .map_or(Ok(DEFAULT_PATH_MODE), str::parse)?;
    let iterations = doc.iterations.unwrap_or(DEFAULT_ITERATIONS);
    let master_seed = doc.master_seed.unwrap_or(0);
    let source = network_source(doc.network, base)?;

    let mut out = Vec::new();
    let make = |name: String, scope: PolicyScope| Scenario {
        name,
        source: source.clone(),
        scope,
        selection,
        iterations,
        master_seed,
        path_mode,
    };
    match (doc.policy, doc.suite.as_deref()) {
        (Some(policy), None) => {
            let acting = doc
                .acting
                .ok_or_else(|| Error::InvalidConfig("scenario needs `acting`".into()))?;
            let name = doc
                .name
                .unwrap_or_else(|| format!("{} {}", acting.label(), policy.label()));
            out.push(make(
                name,
                policy_scope(&scopes, policy, &acting, doc.risky.as_ref())?,
            ));
        }
        (None, Some("standard")) => {
            out.extend(standard_suite(
                &source,
                &scopes,
                selection,
                iterations,
                master_seed,
                path_mode,
            )?);
        }
        (None, Some(other)) => {
            return Err(Error::InvalidConfig(format!("unknown suite {other:?}")))
        }
        (Some(_), Some(_)) => {
            return Err(Error::InvalidConfig(
                "give either `policy` or `suite`, not both".into(),
            ))
        }
        (None, None) => {}
    }
    for cell in doc.scenario {
        out.push(make(
            cell.name,
            policy_scope(&scopes, cell.policy, &cell.acting, cell.risky.as_ref())?,
        ));
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("document defines no scenario".into()));
    }
    for sc in &out {
        sc.validate()?;
    }
    Ok(out)
}

pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    let path = path.as_ref();
    parse_scenarios(&fs::read_to_string(path)?, path.parent())
}
