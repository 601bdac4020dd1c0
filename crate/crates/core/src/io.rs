//! Table ingestion and export, product-name mapping, and report writers.
//!
//! Tables are comma-separated UTF-8 with a header row:
//!
//! | file           | columns                                                   |
//! |----------------|-----------------------------------------------------------|
//! | `firms.csv`    | `id, name, country, industry, market_cap?, product_ids?`  |
//! | `products.csv` | `id, category, industry, is_mining`                       |
//! | `edges.csv`    | `supplier_id, customer_id, product_ids?, weight?`         |
//!
//! List cells (`product_ids`) are separated by `;`. Countries may be given as
//! ISO alpha-2 codes or English names. When `firms.csv` has no `product_ids`
//! column, each supplier's portfolio is inferred from the products listed on
//! its outgoing edges.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::countries::normalize_country;
use crate::error::{Error, Result};
use crate::metrics::MetricReport;
use crate::network::{
    build_network_lenient, Firm, FirmId, Product, ProductId, SupplyEdge, SupplyNetwork,
};
use crate::policy::AffectedSummary;
use crate::sim::AggregateResult;

pub const FIRMS_FILE: &str = "firms.csv";
pub const PRODUCTS_FILE: &str = "products.csv";
pub const EDGES_FILE: &str = "edges.csv";

const LIST_SEP: char = ';';
const UNDEFINED: &str = "NA";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    /// 1-based line in the source file (the header is line 1).
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub rejects: Vec<Reject>,
}

impl TableReport {
    fn reject(&mut self, line: u64, reason: impl Into<String>) {
        self.rejects.push(Reject {
            line,
            reason: reason.into(),
        });
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub firms: TableReport,
    pub products: TableReport,
    pub edges: TableReport,
    /// Edge rows merged into an earlier row for the same pair.
    pub duplicate_edges: usize,
    pub inferred_portfolios: bool,
}

impl IngestReport {
    pub fn rows_read(&self) -> usize {
        self.firms.rows_read + self.products.rows_read + self.edges.rows_read
    }

    pub fn rows_rejected(&self) -> usize {
        self.firms.rejects.len() + self.products.rejects.len() + self.edges.rejects.len()
    }

    /// (table, line, reason) for every rejected row.
    pub fn reject_reasons(&self) -> Vec<(&'static str, u64, &str)> {
        [
            ("firms", &self.firms),
            ("products", &self.products),
            ("edges", &self.edges),
        ]
        .into_iter()
        .flat_map(|(t, r)| {
            r.rejects
                .iter()
                .map(move |x| (t, x.line, x.reason.as_str()))
        })
        .collect()
    }
}

struct Table {
    cols: HashMap<String, usize>,
}

impl Table {
    fn new(name: &'static str, headers: &csv::StringRecord, required: &[&str]) -> Result<Self> {
        let cols: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_ascii_lowercase(), i))
            .collect();
        for &c in required {
            if !cols.contains_key(c) {
                return Err(Error::MissingColumn {
                    table: name.to_string(),
                    column: c.to_string(),
                });
            }
        }
        Ok(Table { cols })
    }

    fn has(&self, col: &str) -> bool {
        self.cols.contains_key(col)
    }

    fn get<'r>(&self, rec: &'r csv::StringRecord, col: &str) -> &'r str {
        self.cols
            .get(col)
            .and_then(|&i| rec.get(i))
            .map(str::trim)
            .unwrap_or("")
    }
}

/// Streams records; rows that fail to parse become rejects instead of errors.
fn for_each_row<R: Read>(
    source: R,
    name: &'static str,
    required: &[&str],
    report: &mut TableReport,
    mut f: impl FnMut(&Table, &csv::StringRecord, u64, &mut TableReport),
) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::None)
        .from_reader(source);
    let table = Table::new(name, rdr.headers()?, required)?;
    for rec in rdr.records() {
        report.rows_read += 1;
        match rec {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                let before = report.rejects.len();
                f(&table, &rec, line, report);
                if report.rejects.len() == before {
                    report.rows_accepted += 1;
                }
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                match e.kind() {
                    csv::ErrorKind::Io(_) => return Err(e.into()),
                    _ => report.reject(line, format!("malformed row: {e}")),
                }
            }
        }
    }
    Ok(())
}

fn split_list(cell: &str) -> impl Iterator<Item = &str> {
    cell.split(LIST_SEP)
        .map(str::trim)
        .filter(|s| !s.is_empty())
}

fn parse_bool(cell: &str) -> Option<bool> {
    match cell.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" => Some(true),
        "false" | "0" | "no" | "n" | "" => Some(false),
        _ => None,
    }
}

fn parse_opt_real(cell: &str) -> std::result::Result<Option<f64>, ()> {
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
        _ => Err(()),
    }
}

pub fn load_tables(
    firms: impl AsRef<Path>,
    products: impl AsRef<Path>,
    edges: impl AsRef<Path>,
) -> Result<(SupplyNetwork, IngestReport)> {
    load_tables_from(
        File::open(firms.as_ref())?,
        File::open(products.as_ref())?,
        File::open(edges.as_ref())?,
    )
}

/// Reads `firms.csv`, `products.csv` and `edges.csv` from one directory.
pub fn load_dir(dir: impl AsRef<Path>) -> Result<(SupplyNetwork, IngestReport)> {
    let d = dir.as_ref();
    load_tables(
        d.join(FIRMS_FILE),
        d.join(PRODUCTS_FILE),
        d.join(EDGES_FILE),
    )
}

pub fn load_tables_from<A: Read, B: Read, C: Read>(
    firms_src: A,
    products_src: B,
    edges_src: C,
) -> Result<(SupplyNetwork, IngestReport)> {
    let mut report = IngestReport::default();

    let mut products: Vec<Product> = Vec::new();
    let mut product_ids: BTreeSet<ProductId> = BTreeSet::new();
    for_each_row(
        products_src,
        "products",
        &["id", "category", "industry", "is_mining"],
        &mut report.products,
        |t, rec, line, rep| {
            let id = t.get(rec, "id");
            if id.is_empty() {
                return rep.reject(line, "empty id");
            }
            let Some(mining) = parse_bool(t.get(rec, "is_mining")) else {
                return rep.reject(
                    line,
                    format!("invalid is_mining: {:?}", t.get(rec, "is_mining")),
                );
            };
            if !product_ids.insert(id.into()) {
                return rep.reject(line, format!("duplicate product id: {id}"));
            }
            products.push(Product {
                id: id.into(),
                category: t.get(rec, "category").to_string(),
                industry: t.get(rec, "industry").to_string(),
                is_mining: mining,
            });
        },
    )?;

    let mut firms: Vec<Firm> = Vec::new();
    let mut firm_ids: BTreeSet<FirmId> = BTreeSet::new();
    let mut has_portfolios = false;
    for_each_row(
        firms_src,
        "firms",
        &["id", "name", "country", "industry"],
        &mut report.firms,
        |t, rec, line, rep| {
            has_portfolios = t.has("product_ids");
            let id = t.get(rec, "id");
            if id.is_empty() {
                return rep.reject(line, "empty id");
            }
            let raw_country = t.get(rec, "country");
            let Some(country) = normalize_country(raw_country) else {
                return rep.reject(line, format!("unknown country: {raw_country:?}"));
            };
            let Ok(market_cap) = parse_opt_real(t.get(rec, "market_cap")) else {
                return rep.reject(
                    line,
                    format!("invalid market_cap: {:?}", t.get(rec, "market_cap")),
                );
            };
            let mut portfolio = BTreeSet::new();
            for p in split_list(t.get(rec, "product_ids")) {
                let p: ProductId = p.into();
                if !product_ids.contains(&p) {
                    return rep.reject(line, format!("unknown product: {p}"));
                }
                portfolio.insert(p);
            }
            if !firm_ids.insert(id.into()) {
                return rep.reject(line, format!("duplicate firm id: {id}"));
            }
            firms.push(Firm {
                id: id.into(),
                name: t.get(rec, "name").to_string(),
                country: country.to_string(),
                industry: t.get(rec, "industry").to_string(),
                products: portfolio,
                market_cap,
            });
        },
    )?;
    report.inferred_portfolios = !has_portfolios;

    // edges: row-level checks here, graph-level checks in the lenient build
    let mut edges: Vec<SupplyEdge> = Vec::new();
    let mut edge_lines: Vec<u64> = Vec::new();
    for_each_row(
        edges_src,
        "edges",
        &["supplier_id", "customer_id"],
        &mut report.edges,
        |t, rec, line, rep| {
            let (s, c) = (t.get(rec, "supplier_id"), t.get(rec, "customer_id"));
            let Ok(weight) = parse_opt_real(t.get(rec, "weight")) else {
                return rep.reject(line, format!("invalid weight: {:?}", t.get(rec, "weight")));
            };
            let listed: BTreeSet<ProductId> = split_list(t.get(rec, "product_ids"))
                .map(ProductId::from)
                .collect();
            edges.push(SupplyEdge {
                supplier: s.into(),
                customer: c.into(),
                products: (!listed.is_empty()).then_some(listed),
                weight,
            });
            edge_lines.push(line);
        },
    )?;

    if report.inferred_portfolios {
        let index: HashMap<FirmId, usize> = firms
            .iter()
            .enumerate()
            .map(|(i, f)| (f.id.clone(), i))
            .collect();
        for e in &edges {
            if let (Some(&i), Some(ps)) = (index.get(&e.supplier), &e.products) {
                firms[i]
                    .products
                    .extend(ps.iter().filter(|p| product_ids.contains(*p)).cloned());
            }
        }
    }

    let (net, build) = build_network_lenient(firms, products, edges)?;
    for (pos, reason) in build.rejected {
        report.edges.reject(edge_lines[pos], reason);
        report.edges.rows_accepted -= 1;
    }
    report.edges.rejects.sort_by_key(|r| r.line);
    report.duplicate_edges = build.duplicates;
    Ok((net, report))
}

fn list_cell<'a>(items: impl Iterator<Item = &'a str>) -> String {
    items.collect::<Vec<_>>().join(&LIST_SEP.to_string())
}

fn opt_real(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the three tables into `dir` (created if missing).
pub fn write_tables(net: &SupplyNetwork, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_tables_to(
        net,
        File::create(dir.join(FIRMS_FILE))?,
        File::create(dir.join(PRODUCTS_FILE))?,
        File::create(dir.join(EDGES_FILE))?,
    )
}

pub fn write_tables_to<A: Write, B: Write, C: Write>(
    net: &SupplyNetwork,
    firms: A,
    products: B,
    edges: C,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(firms);
    w.write_record([
        "id",
        "name",
        "country",
        "industry",
        "market_cap",
        "product_ids",
    ])?;
    for f in net.firms() {
        w.write_record([
            f.id.as_str(),
            &f.name,
            &f.country,
            &f.industry,
            &opt_real(f.market_cap),
            &list_cell(f.products.iter().map(ProductId::as_str)),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(products);
    w.write_record(["id", "category", "industry", "is_mining"])?;
    for p in net.products() {
        w.write_record([
            p.id.as_str(),
            &p.category,
            &p.industry,
            if p.is_mining { "true" } else { "false" },
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(edges);
    w.write_record(["supplier_id", "customer_id", "product_ids", "weight"])?;
    for e in net.edges() {
        let products = e
            .products
            .as_ref()
            .map(|ps| list_cell(ps.iter().map(ProductId::as_str)))
            .unwrap_or_default();
        w.write_record([
            e.supplier.as_str(),
            e.customer.as_str(),
            &products,
            &opt_real(e.weight),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub industry: String,
    pub is_mining: bool,
}

/// Canonical product categories, unique after name normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryCatalog {
    categories: Vec<Category>,
    normalized: Vec<String>,
    tokens: Vec<BTreeSet<String>>,
    exact: HashMap<String, usize>,
}

impl CategoryCatalog {
    pub fn new(categories: Vec<Category>) -> Result<Self> {
        let mut exact = HashMap::new();
        let mut normalized = Vec::with_capacity(categories.len());
        let mut tokens = Vec::with_capacity(categories.len());
        for (i, c) in categories.iter().enumerate() {
            let norm = normalize_name(&c.name);
            if norm.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "blank category name {:?}",
                    c.name
                )));
            }
            if exact.insert(norm.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate category {:?}",
                    c.name
                )));
            }
            tokens.push(norm.split(' ').map(str::to_string).collect());
            normalized.push(norm);
        }
        Ok(CategoryCatalog {
            categories,
            normalized,
            tokens,
            exact,
        })
    }

    /// Reads a `name,industry,is_mining` table.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(source);
        let t = Table::new(
            "catalog",
            rdr.headers()?,
            &["name", "industry", "is_mining"],
        )?;
        let mut cats = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mining = t.get(&rec, "is_mining");
            cats.push(Category {
                name: t.get(&rec, "name").to_string(),
                industry: t.get(&rec, "industry").to_string(),
                is_mining: parse_bool(mining).ok_or_else(|| {
                    Error::InvalidConfig(format!("invalid is_mining: {mining:?}"))
                })?,
            });
        }
        Self::new(cats)
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

/// Lowercase, drop apostrophes, turn other punctuation into spaces, collapse whitespace.
pub fn normalize_name(raw: &str) -> String {
    let cleaned: String = raw
        .chars()
        .filter(|&c| c != '\'' && c != '\u{2019}')
        .flat_map(|c| {
            let c = if c.is_alphanumeric() { c } else { ' ' };
            c.to_lowercase()
        })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub const DEFAULT_MAPPING_THRESHOLD: f64 = 0.5;

/// Maps a raw product name to a catalog category, or `None` when nothing
/// scores at least `threshold`. An exact normalized match always wins;
/// otherwise the best token Jaccard score, ties to the shorter then
/// lexicographically smaller name.
pub fn map_product_name<'c>(
    raw: &str,
    catalog: &'c CategoryCatalog,
    threshold: f64,
) -> Option<&'c Category> {
    let norm = normalize_name(raw);
    if norm.is_empty() {
        return None;
    }
    if let Some(&i) = catalog.exact.get(&norm) {
        return Some(&catalog.categories[i]);
    }
    let tokens: BTreeSet<String> = norm.split(' ').map(str::to_string).collect();
    let mut best: Option<(f64, usize)> = None;
    for (i, cat_tokens) in catalog.tokens.iter().enumerate() {
        let score = jaccard(&tokens, cat_tokens);
        if score < threshold || score == 0.0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bs, bi)) => {
                let (name, best_name) = (&catalog.normalized[i], &catalog.normalized[bi]);
                score > bs
                    || (score == bs
                        && (name.len(), name.as_str()) < (best_name.len(), best_name.as_str()))
            }
        };
        if better {
            best = Some((score, i));
        }
    }
    best.map(|(_, i)| &catalog.categories[i])
}

const DEMO_CATALOG: &str = "\
name,industry,is_mining
brake pedal,Auto Parts,false
brake caliper,Auto Parts,false
brake disc,Auto Parts,false
engine cooling module,Auto Parts,false
engine,Automotive,false
radiator,Auto Parts,false
fuel pump,Auto Parts,false
steering wheel,Auto Parts,false
seat belt,Auto Parts,false
wiring harness,Electronic Components,false
electric motor,Machinery,false
inverter,Electronic Components,false
battery cell,Batteries,false
battery pack,Batteries,false
battery management system,Electronic Components,false
cathode material,Chemicals,false
anode material,Chemicals,false
electrolyte,Chemicals,false
separator film,Rubber & Plastics,false
microcontroller,Semiconductors,false
power semiconductor,Semiconductors,false
lidar sensor,Electronic Components,false
tire,Rubber & Plastics,false
windshield glass,Glass,false
aluminium sheet,Metals & Steel,false
steel coil,Metals & Steel,false
copper wire,Metals & Steel,false
lithium carbonate,\"Mining, Refining & Smelting\",true
cobalt,\"Mining, Refining & Smelting\",true
nickel ore,\"Mining, Refining & Smelting\",true
graphite,\"Mining, Refining & Smelting\",true
rare earth magnet,\"Mining, Refining & Smelting\",true
";

/// Small built-in catalog of vehicle and battery categories.
pub fn demo_catalog() -> CategoryCatalog {
    CategoryCatalog::from_csv(DEMO_CATALOG.as_bytes()).expect("demo catalog is valid")
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string())
        .unwrap_or_else(|| UNDEFINED.to_string())
}

fn create(path: &Path) -> Result<File> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(File::create(path)?)
}

/// One metric per row, one labeled column per report. Undefined values are `NA`.
pub fn write_metric_table(reports: &[(&str, &MetricReport)], path: impl AsRef<Path>) -> Result<()> {
    let columns: Vec<(String, [Option<f64>; 10])> = reports
        .iter()
        .map(|(l, r)| (l.to_string(), r.values()))
        .collect();
    write_metric_columns(&columns, path)
}

/// Same layout as [`write_metric_table`], from raw column values.
pub fn write_metric_columns(
    columns: &[(String, [Option<f64>; 10])],
    path: impl AsRef<Path>,
) -> Result<()> {
    if columns.is_empty() {
        return Err(Error::InvalidConfig(
            "metric table needs at least one column".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(create(path.as_ref())?);
    let mut header = vec!["metric".to_string()];
    header.extend(columns.iter().map(|(l, _)| l.clone()));
    w.write_record(&header)?;
    for (row, label) in MetricReport::ROW_LABELS.iter().enumerate() {
        let mut rec = vec![label.to_string()];
        rec.extend(columns.iter().map(|(_, v)| cell(v[row])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub const AFFECTED_COUNTRY_FILE: &str = "affected_by_country.csv";
pub const AFFECTED_INDUSTRY_FILE: &str = "affected_by_industry.csv";
pub const VULNERABLE_INDUSTRIES_FILE: &str = "vulnerable_industries.csv";
pub const VULNERABLE_PRODUCTS_FILE: &str = "vulnerable_products.csv";
pub const AFFECTED_DEGREES_FILE: &str = "affected_degrees.csv";
pub const TOP_K: usize = 5;

fn write_pairs<K: ToString>(
    path: &Path,
    header: [&str; 2],
    rows: impl Iterator<Item = (K, f64)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header)?;
    for (k, v) in rows {
        w.write_record([k.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Affected companies by country, non-substitutable products by industry,
/// top-5 industries and products, and the affected-degree histogram.
/// `net` supplies product categories and industries for the product ranking.
pub fn write_affected(
    summary: &AffectedSummary,
    net: &SupplyNetwork,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_pairs(
        &dir.join(AFFECTED_COUNTRY_FILE),
        ["country", "companies"],
        summary.by_country.iter().map(|(k, &v)| (k, v)),
    )?;
    write_pairs(
        &dir.join(AFFECTED_INDUSTRY_FILE),
        ["industry", "products"],
        summary.by_industry.iter().map(|(k, &v)| (k, v)),
    )?;
    write_pairs(
        &dir.join(AFFECTED_DEGREES_FILE),
        ["degree", "companies"],
        summary.degree_histogram.iter().map(|(k, &v)| (k, v)),
    )?;

    let mut w = csv::Writer::from_writer(create(&dir.join(VULNERABLE_INDUSTRIES_FILE))?);
    w.write_record(["rank", "industry", "products"])?;
    for (i, (ind, v)) in summary.top_industries(TOP_K).into_iter().enumerate() {
        w.write_record([(i + 1).to_string(), ind, v.to_string()])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(create(&dir.join(VULNERABLE_PRODUCTS_FILE))?);
    w.write_record(["rank", "product", "category", "industry", "customers"])?;
    for (i, (p, v)) in summary.top_products(TOP_K).into_iter().enumerate() {
        let (category, industry) = net
            .product_index(&p)
            .map(|ix| {
                let pr = net.product(ix);
                (pr.category.clone(), pr.industry.clone())
            })
            .unwrap_or_default();
        w.write_record([
            (i + 1).to_string(),
            p.to_string(),
            category,
            industry,
            v.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Five-number summary per metric over the iterations.
pub fn write_boxplot_data(agg: &AggregateResult, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path.as_ref())?);
    w.write_record(["metric", "min", "q1", "median", "q3", "max"])?;
    for d in &agg.metrics {
        let s = d.stats.as_ref();
        w.write_record([
            d.metric.clone(),
            cell(s.map(|s| s.min)),
            cell(s.map(|s| s.q1)),
            cell(s.map(|s| s.median)),
            cell(s.map(|s| s.q3)),
            cell(s.map(|s| s.max)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean non-substitutable counts and rewiring volume for one or more scenarios.
pub fn write_substitutability(aggs: &[&AggregateResult], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path.as_ref())?);
    w.write_record([
        "scenario",
        "policy",
        "iterations",
        "ns_products",
        "mining_share",
        "ns_companies",
        "added_edges",
        "removed_edges",
        "ns_products_union",
        "ns_products_intersection",
    ])?;
    for a in aggs {
        w.write_record([
            a.scenario.clone(),
            a.policy.label().to_string(),
            a.iterations.to_string(),
            a.ns_products_mean.to_string(),
            a.mining_share_mean.to_string(),
            a.ns_companies_mean.to_string(),
            a.added_edges_mean.to_string(),
            a.removed_edges_mean.to_string(),
            a.ns_products_union.len().to_string(),
            a.ns_products_intersection.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut f = create(path.as_ref())?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}
