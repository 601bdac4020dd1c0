//! Synthetic supply networks with planted community structure.
//!
//! Firms get a country and an industry by weight, then join a planted
//! community homed in their country (or, with small probability, a random one).
//! Portfolios are drawn from a product catalog, mostly from the firm's own
//! industry and its community's product pool. Edges are grown by
//! fitness-biased attachment: both endpoints are drawn proportional to a
//! Pareto fitness, the supplier's country is steered by `domestic_preference`
//! and its community by `community_locality`.

use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{metric_report, MetricReport, PathMode};
use crate::network::{build_network, Firm, Product, SupplyEdge, SupplyNetwork};

pub const MINING_INDUSTRY: &str = "Mining, Refining & Smelting";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSize {
    pub mean: f64,
    /// Gamma-Poisson overdispersion; 0 gives a fixed size.
    pub dispersion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n_firms: usize,
    /// Target number of distinct directed edges.
    pub n_edges: usize,
    pub country_weights: BTreeMap<String, f64>,
    pub industry_weights: BTreeMap<String, f64>,
    pub products_per_firm: PortfolioSize,
    pub n_products: usize,
    /// Power-law exponent of the attachment fitness (> 1).
    pub degree_exponent: f64,
    /// Probability that an edge joins two firms of the same country.
    pub domestic_preference: f64,
    /// Probability that an edge stays inside the customer's planted community.
    pub community_locality: f64,
    pub n_planted_communities: usize,
    /// Probability a firm joins a community homed in its own country.
    pub community_home_bias: f64,
    /// Share of a firm's products drawn from its community's pool.
    pub product_locality: f64,
    pub mining_fraction: f64,
    /// Zipf exponent of product popularity within an industry; larger values
    /// leave more tail products with only a handful of producers.
    pub product_popularity_exponent: f64,
    /// Share of products made in a single home country only.
    pub product_concentration: f64,
    pub seed: u64,
}

fn weights(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, w)| (k.to_string(), w)).collect()
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_firms: 18_000,
            n_edges: 56_000,
            country_weights: weights(&[
                ("US", 16.0),
                ("JP", 12.0),
                ("CN", 14.0),
                ("DE", 8.0),
                ("KR", 6.0),
                ("TW", 4.0),
                ("IN", 4.0),
                ("FR", 3.0),
                ("GB", 3.0),
                ("IT", 3.0),
                ("ES", 2.0),
                ("MX", 2.0),
                ("CA", 2.0),
                ("BR", 1.5),
                ("SE", 1.0),
                ("NL", 1.0),
                ("CH", 1.0),
                ("AT", 1.0),
                ("BE", 0.8),
                ("PL", 1.0),
                ("CZ", 0.8),
                ("TH", 1.0),
                ("MY", 0.8),
                ("ID", 0.8),
                ("VN", 0.8),
                ("SG", 0.6),
                ("HK", 0.6),
                ("AU", 1.0),
                ("RU", 0.8),
                ("TR", 0.8),
                ("ZA", 0.6),
                ("CL", 0.5),
                ("PE", 0.4),
                ("AR", 0.4),
                ("SA", 0.3),
                ("AE", 0.3),
                ("IL", 0.3),
                ("FI", 0.4),
                ("DK", 0.3),
                ("NO", 0.3),
                ("IE", 0.2),
                ("PT", 0.3),
                ("HU", 0.4),
                ("RO", 0.4),
                ("SK", 0.4),
                ("SI", 0.2),
                ("PH", 0.4),
                ("IR", 0.2),
                ("BY", 0.1),
                ("KZ", 0.2),
                ("CD", 0.2),
                ("ZW", 0.1),
                ("NZ", 0.2),
                ("MA", 0.2),
                ("UA", 0.2),
            ]),
            industry_weights: weights(&[
                ("Auto Parts", 20.0),
                ("Automotive", 6.0),
                ("Industrial Intermediate Products", 10.0),
                ("Machinery", 8.0),
                ("Electronic Components", 8.0),
                ("Semiconductors", 4.0),
                ("Chemicals", 6.0),
                ("Metals & Steel", 7.0),
                (MINING_INDUSTRY, 5.0),
                ("Batteries", 4.0),
                ("Software", 3.0),
                ("Cable & Satellite", 2.0),
                ("Rubber & Plastics", 5.0),
                ("Glass", 2.0),
                ("Logistics", 3.0),
                ("Textiles", 2.0),
                ("Energy", 3.0),
                ("Aerospace & Defense", 2.0),
            ]),
            products_per_firm: PortfolioSize {
                mean: 5.0,
                dispersion: 0.5,
            },
            n_products: 1_100,
            degree_exponent: 2.8,
            domestic_preference: 0.51,
            community_locality: 0.54,
            n_planted_communities: 150,
            community_home_bias: 0.9,
            product_locality: 0.5,
            mining_fraction: 0.13,
            product_popularity_exponent: 1.0,
            product_concentration: 0.3,
            seed: 1,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_firms < 2 {
            return bad("n_firms must be at least 2");
        }
        for (name, w) in [
            ("country", &self.country_weights),
            ("industry", &self.industry_weights),
        ] {
            if w.values().any(|&x| x < 0.0 || !x.is_finite()) || !w.values().any(|&x| x > 0.0) {
                return bad(&format!(
                    "{name} weights must be non-negative with one positive"
                ));
            }
        }
        for (name, p) in [
            ("domestic_preference", self.domestic_preference),
            ("community_locality", self.community_locality),
            ("community_home_bias", self.community_home_bias),
            ("product_locality", self.product_locality),
            ("mining_fraction", self.mining_fraction),
            ("product_concentration", self.product_concentration),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.product_popularity_exponent.is_nan() || self.product_popularity_exponent < 0.0 {
            return bad("product_popularity_exponent must be non-negative");
        }
        if self.degree_exponent <= 1.0 {
            return bad("degree_exponent must exceed 1");
        }
        if self.n_products == 0 || self.products_per_firm.mean < 1.0 {
            return bad("need at least one product per firm");
        }
        if self.n_planted_communities == 0 {
            return bad("need at least one planted community");
        }
        if self.n_edges > self.n_firms * (self.n_firms - 1) {
            return Err(Error::CannotSatisfy(format!(
                "{} edges on {} firms",
                self.n_edges, self.n_firms
            )));
        }
        Ok(())
    }
}

/// Weighted sampler over a fixed member list.
struct Pool {
    members: Vec<usize>,
    index: Option<WeightedIndex<f64>>,
}

impl Pool {
    fn new(members: Vec<usize>, fitness: &[f64]) -> Self {
        let index = if members.is_empty() {
            None
        } else {
            WeightedIndex::new(members.iter().map(|&m| fitness[m])).ok()
        };
        Pool { members, index }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        self.index.as_ref().map(|ix| self.members[ix.sample(rng)])
    }

    fn len(&self) -> usize {
        self.members.len()
    }
}

fn categorical(w: &BTreeMap<String, f64>) -> (Vec<&str>, WeightedIndex<f64>) {
    let names: Vec<&str> = w.keys().map(String::as_str).collect();
    let ix = WeightedIndex::new(w.values().copied()).expect("validated weights");
    (names, ix)
}

pub fn generate(cfg: &GeneratorConfig) -> Result<SupplyNetwork> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_firms;

    // product catalog: mining products first, the rest spread over other industries
    let (industries, industry_ix) = categorical(&cfg.industry_weights);
    let non_mining: BTreeMap<String, f64> = cfg
        .industry_weights
        .iter()
        .filter(|(k, w)| k.as_str() != MINING_INDUSTRY && **w > 0.0)
        .map(|(k, w)| (k.clone(), *w))
        .collect();
    let n_mining = (cfg.mining_fraction * cfg.n_products as f64).round() as usize;
    let mut products = Vec::with_capacity(cfg.n_products);
    let mut by_industry: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for i in 0..cfg.n_products {
        let (industry, mining) = if i < n_mining || non_mining.is_empty() {
            (MINING_INDUSTRY.to_string(), i < n_mining)
        } else {
            let (names, ix) = categorical(&non_mining);
            (names[ix.sample(&mut rng)].to_string(), false)
        };
        by_industry.entry(industry.clone()).or_default().push(i);
        products.push(Product {
            id: format!("P{i:05}").into(),
            category: format!("{industry} #{i}"),
            industry,
            is_mining: mining,
        });
    }
    // Zipf popularity inside each industry: a few products made by many firms
    let popularity: Vec<f64> = {
        let mut pop = vec![0.0; cfg.n_products];
        for list in by_industry.values() {
            for (rank, &p) in list.iter().enumerate() {
                pop[p] = (rank as f64 + 1.0).powf(-cfg.product_popularity_exponent);
            }
        }
        pop
    };
    let catalog_ix = WeightedIndex::new(&popularity).expect("non-empty catalog");

    // firms: country, industry, fitness
    let (countries, country_ix) = categorical(&cfg.country_weights);
    let firm_country: Vec<usize> = (0..n).map(|_| country_ix.sample(&mut rng)).collect();
    let firm_industry: Vec<&str> = (0..n)
        .map(|_| industries[industry_ix.sample(&mut rng)])
        .collect();
    let tail = 1.0 / (cfg.degree_exponent - 1.0);
    let cap = (n as f64).powf(tail);
    let fitness: Vec<f64> = (0..n)
        .map(|_| (1.0 - rng.gen::<f64>()).powf(-tail).min(cap))
        .collect();

    let mut country_count = vec![0usize; countries.len()];
    for &c in &firm_country {
        country_count[c] += 1;
    }
    if cfg.domestic_preference >= 1.0 && country_count.contains(&1) {
        return Err(Error::CannotSatisfy(
            "domestic_preference = 1 with a single-firm country".into(),
        ));
    }

    // planted communities homed by country weight
    let k = cfg.n_planted_communities;
    let community_home: Vec<usize> = (0..k).map(|_| country_ix.sample(&mut rng)).collect();
    let mut homed: Vec<Vec<usize>> = vec![Vec::new(); countries.len()];
    for (c, &h) in community_home.iter().enumerate() {
        homed[h].push(c);
    }
    let firm_comm: Vec<usize> = (0..n)
        .map(|f| {
            let home = &homed[firm_country[f]];
            if !home.is_empty() && rng.gen_bool(cfg.community_home_bias) {
                *home.choose(&mut rng).expect("non-empty")
            } else {
                rng.gen_range(0..k)
            }
        })
        .collect();

    // each community draws a product pool from the catalog
    let pool_size = (cfg.n_products / k).clamp(5, 60);
    let comm_pool: Vec<Vec<usize>> = (0..k)
        .map(|_| {
            (0..pool_size)
                .map(|_| catalog_ix.sample(&mut rng))
                .collect()
        })
        .collect();

    // concentrated products are only made in their home country
    let product_home: Vec<Option<usize>> = (0..cfg.n_products)
        .map(|_| {
            rng.gen_bool(cfg.product_concentration)
                .then(|| country_ix.sample(&mut rng))
        })
        .collect();

    // portfolios
    let size_dist = Gamma::new(
        1.0 / cfg.products_per_firm.dispersion.max(1e-9),
        (cfg.products_per_firm.mean - 1.0) * cfg.products_per_firm.dispersion.max(1e-9),
    )
    .ok();
    let mut firms = Vec::with_capacity(n);
    for f in 0..n {
        let extra_mean = cfg.products_per_firm.mean - 1.0;
        let extra = if extra_mean <= 0.0 {
            0
        } else if cfg.products_per_firm.dispersion <= 0.0 {
            extra_mean.round() as usize
        } else {
            let lambda = size_dist
                .as_ref()
                .map_or(extra_mean, |g| g.sample(&mut rng));
            if lambda <= 0.0 {
                0
            } else {
                Poisson::new(lambda).map_or(0, |p| p.sample(&mut rng) as usize)
            }
        };
        let size = (1 + extra).min(cfg.n_products);
        let own = by_industry.get(firm_industry[f]);
        let mut portfolio = BTreeSet::new();
        let mut fallback = None;
        let mut guard = 0;
        while portfolio.len() < size && guard < 50 * size {
            guard += 1;
            let r: f64 = rng.gen();
            let p = if r < cfg.product_locality {
                *comm_pool[firm_comm[f]]
                    .choose(&mut rng)
                    .expect("pool non-empty")
            } else if let Some(list) =
                own.filter(|_| r < cfg.product_locality + 0.8 * (1.0 - cfg.product_locality))
            {
                *list.choose(&mut rng).expect("industry non-empty")
            } else {
                catalog_ix.sample(&mut rng)
            };
            fallback.get_or_insert(p);
            if product_home[p].is_none_or(|h| h == firm_country[f]) {
                portfolio.insert(p);
            }
        }
        // every firm makes something, even if only foreign-homed products came up
        if portfolio.is_empty() {
            portfolio.extend(fallback);
        }
        firms.push(Firm {
            id: format!("F{f:06}").into(),
            name: format!("Firm {f}"),
            country: countries[firm_country[f]].to_string(),
            industry: firm_industry[f].to_string(),
            products: portfolio.iter().map(|&p| products[p].id.clone()).collect(),
            market_cap: None,
        });
    }

    // sampling pools
    let everyone = Pool::new((0..n).collect(), &fitness);
    let mut members_by: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut comm_members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut country_members: Vec<Vec<usize>> = vec![Vec::new(); countries.len()];
    for f in 0..n {
        members_by
            .entry((firm_comm[f], firm_country[f]))
            .or_default()
            .push(f);
        comm_members[firm_comm[f]].push(f);
        country_members[firm_country[f]].push(f);
    }
    let comm_country: BTreeMap<(usize, usize), Pool> = members_by
        .into_iter()
        .map(|(key, m)| (key, Pool::new(m, &fitness)))
        .collect();
    let comm_pools: Vec<Pool> = comm_members
        .into_iter()
        .map(|m| Pool::new(m, &fitness))
        .collect();
    let country_pools: Vec<Pool> = country_members
        .into_iter()
        .map(|m| Pool::new(m, &fitness))
        .collect();

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let max_attempts = 200 * cfg.n_edges.max(1) + 1000;
    let mut attempts = 0;
    while edges.len() < cfg.n_edges {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::CannotSatisfy(format!(
                "placed {} of {} edges",
                edges.len(),
                cfg.n_edges
            )));
        }
        let c = everyone.draw(&mut rng).expect("firms present");
        let (cc, cm) = (firm_country[c], firm_comm[c]);
        let domestic = rng.gen_bool(cfg.domestic_preference);
        let local = rng.gen_bool(cfg.community_locality);
        let s = match (domestic, local) {
            (true, true) => comm_country.get(&(cm, cc)).and_then(|p| {
                if p.len() > 1 {
                    p.draw(&mut rng)
                } else {
                    None
                }
            }),
            (true, false) => country_pools[cc].draw(&mut rng),
            (false, true) => {
                let pool = &comm_pools[cm];
                (0..20)
                    .filter_map(|_| pool.draw(&mut rng))
                    .find(|&s| firm_country[s] != cc)
            }
            (false, false) => (0..20)
                .filter_map(|_| everyone.draw(&mut rng))
                .find(|&s| firm_country[s] != cc),
        };
        let s = match s {
            Some(s) => s,
            // relax community constraint, keep the country constraint
            None if domestic => match country_pools[cc].draw(&mut rng) {
                Some(s) => s,
                None => continue,
            },
            None => match (0..20)
                .filter_map(|_| everyone.draw(&mut rng))
                .find(|&s| firm_country[s] != cc)
            {
                Some(s) => s,
                None => continue,
            },
        };
        if s != c {
            edges.insert((s, c));
        }
    }

    let edge_list = edges
        .into_iter()
        .map(|(s, c)| SupplyEdge {
            supplier: firms[s].id.clone(),
            customer: firms[c].id.clone(),
            products: None,
            weight: None,
        })
        .collect();
    Ok(build_network(firms, products, edge_list)?.0)
}

/// One calibration target: metric name, desired value, absolute tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub metric: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Target {
    pub fn new(metric: &str, value: f64, tolerance: f64) -> Self {
        Target {
            metric: metric.to_string(),
            value,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub metric: String,
    pub target: f64,
    pub tolerance: f64,
    pub achieved: Option<f64>,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub rows: Vec<CalibrationRow>,
}

impl CalibrationReport {
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.within_tolerance)
    }

    pub fn row(&self, metric: &str) -> Option<&CalibrationRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

/// Metric names accepted by [`calibrate_check`].
pub const TARGET_METRICS: &[&str] = &[
    "edge_count",
    "density",
    "degree_assortativity",
    "location_assortativity",
    "avg_shortest_path",
    "avg_domestic",
    "avg_international",
    "domestic_international_ratio",
    "clustering_coefficient",
    "modularity",
    "community_count",
    "mean_products_per_firm",
];

fn lookup(net: &SupplyNetwork, r: &MetricReport, metric: &str) -> Result<Option<f64>> {
    Ok(match metric {
        "edge_count" => Some(r.edge_count as f64),
        "density" => r.density,
        "degree_assortativity" => r.degree_assortativity,
        "location_assortativity" => r.location_assortativity,
        "avg_shortest_path" => r.avg_shortest_path,
        "avg_domestic" => Some(r.avg_domestic),
        "avg_international" => Some(r.avg_international),
        "domestic_international_ratio" => {
            (r.avg_international > 0.0).then(|| r.avg_domestic / r.avg_international)
        }
        "clustering_coefficient" => Some(r.clustering_coefficient),
        "modularity" => Some(r.modularity),
        "community_count" => Some(r.community_count as f64),
        "mean_products_per_firm" => (net.firm_count() > 0).then(|| {
            net.firms().iter().map(|f| f.products.len()).sum::<usize>() as f64
                / net.firm_count() as f64
        }),
        other => return Err(Error::UnknownTarget(other.to_string())),
    })
}

/// Default targets for the calibrated generator.
pub fn default_targets() -> Vec<Target> {
    vec![
        Target::new("modularity", 0.57, 0.05),
        Target::new("clustering_coefficient", 0.026, 0.01),
        Target::new("avg_shortest_path", 4.57, 0.5),
        Target::new("domestic_international_ratio", 1.0, 0.1),
        Target::new("mean_products_per_firm", 5.0, 0.5),
    ]
}

pub fn calibrate_check(
    net: &SupplyNetwork,
    targets: &[Target],
    seed: u64,
    path_mode: PathMode,
) -> Result<CalibrationReport> {
    for t in targets {
        if !TARGET_METRICS.contains(&t.metric.as_str()) {
            return Err(Error::UnknownTarget(t.metric.clone()));
        }
    }
    let report = metric_report(net, seed, path_mode);
    calibrate_against(net, &report, targets)
}

/// Compares an already computed report against targets.
pub fn calibrate_against(
    net: &SupplyNetwork,
    report: &MetricReport,
    targets: &[Target],
) -> Result<CalibrationReport> {
    let rows = targets
        .iter()
        .map(|t| {
            let achieved = lookup(net, report, &t.metric)?;
            Ok(CalibrationRow {
                metric: t.metric.clone(),
                target: t.value,
                tolerance: t.tolerance,
                achieved,
                within_tolerance: achieved.is_some_and(|a| (a - t.value).abs() <= t.tolerance),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibrationReport { rows })
}
