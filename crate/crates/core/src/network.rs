//! Firm-level supply network.
//!
//! Firms are nodes, directed edges run supplier → customer. Every firm carries a
//! product portfolio, and the network keeps the inverse index (product → producers)
//! so substitutability searches are lookups instead of scans.
//!
//! Firms and products are stored sorted by id, so two networks built from the
//! same input lists in any order are identical, index for index.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FirmId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductId(pub String);

macro_rules! string_id {
    ($t:ident) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                $t(s.to_string())
            }
        }
        impl From<String> for $t {
            fn from(s: String) -> Self {
                $t(s)
            }
        }
        impl $t {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }
    };
}
string_id!(FirmId);
string_id!(ProductId);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Firm {
    pub id: FirmId,
    pub name: String,
    /// ISO 3166 alpha-2 code.
    pub country: String,
    pub industry: String,
    pub products: BTreeSet<ProductId>,
    pub market_cap: Option<f64>,
}

impl Firm {
    pub fn new(id: &str, country: &str, industry: &str, products: &[&str]) -> Self {
        Firm {
            id: id.into(),
            name: id.to_string(),
            country: country.to_string(),
            industry: industry.to_string(),
            products: products.iter().map(|&p| p.into()).collect(),
            market_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub id: ProductId,
    pub category: String,
    pub industry: String,
    pub is_mining: bool,
}

impl Product {
    pub fn new(id: &str, industry: &str, is_mining: bool) -> Self {
        Product {
            id: id.into(),
            category: id.to_string(),
            industry: industry.to_string(),
            is_mining,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplyEdge {
    pub supplier: FirmId,
    pub customer: FirmId,
    /// Products traded on this edge. `None` means the supplier's whole portfolio.
    pub products: Option<BTreeSet<ProductId>>,
    pub weight: Option<f64>,
}

impl SupplyEdge {
    pub fn new(supplier: &str, customer: &str) -> Self {
        SupplyEdge {
            supplier: supplier.into(),
            customer: customer.into(),
            products: None,
            weight: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Domestic,
    International,
}

/// Per-edge attributes, keyed by (supplier index, customer index).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeAttrs {
    pub products: Option<BTreeSet<usize>>,
    pub weight: Option<f64>,
}

/// Bookkeeping from a build.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildReport {
    pub edges_in: usize,
    pub duplicates: usize,
    /// (position in the input edge list, reason)
    pub rejected: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupplyNetwork {
    firms: Vec<Firm>,
    firm_lookup: HashMap<FirmId, usize>,
    products: Vec<Product>,
    product_lookup: HashMap<ProductId, usize>,
    portfolios: Vec<Vec<usize>>,
    producers: Vec<Vec<usize>>,
    edges: BTreeMap<(usize, usize), EdgeAttrs>,
    suppliers: Vec<BTreeSet<usize>>,
    customers: Vec<BTreeSet<usize>>,
}

/// Strict build: the first invalid edge aborts with an error.
pub fn build_network(
    firms: Vec<Firm>,
    products: Vec<Product>,
    edges: Vec<SupplyEdge>,
) -> Result<(SupplyNetwork, BuildReport)> {
    let (net, report, errors) = build_inner(firms, products, edges)?;
    match errors.into_iter().next() {
        Some(e) => Err(e),
        None => Ok((net, report)),
    }
}

/// Lenient build: invalid edges are skipped and listed in the report.
pub fn build_network_lenient(
    firms: Vec<Firm>,
    products: Vec<Product>,
    edges: Vec<SupplyEdge>,
) -> Result<(SupplyNetwork, BuildReport)> {
    let (net, report, _) = build_inner(firms, products, edges)?;
    Ok((net, report))
}

fn build_inner(
    mut firms: Vec<Firm>,
    mut products: Vec<Product>,
    edges: Vec<SupplyEdge>,
) -> Result<(SupplyNetwork, BuildReport, Vec<Error>)> {
    firms.sort_by(|a, b| a.id.cmp(&b.id));
    products.sort_by(|a, b| a.id.cmp(&b.id));

    let mut firm_lookup = HashMap::with_capacity(firms.len());
    for (i, f) in firms.iter().enumerate() {
        if firm_lookup.insert(f.id.clone(), i).is_some() {
            return Err(Error::DuplicateFirm(f.id.to_string()));
        }
    }
    let mut product_lookup = HashMap::with_capacity(products.len());
    for (i, p) in products.iter().enumerate() {
        if product_lookup.insert(p.id.clone(), i).is_some() {
            return Err(Error::DuplicateProduct(p.id.to_string()));
        }
    }

    let mut portfolios = Vec::with_capacity(firms.len());
    let mut producers = vec![Vec::new(); products.len()];
    for (fi, f) in firms.iter().enumerate() {
        let mut portfolio = Vec::with_capacity(f.products.len());
        for p in &f.products {
            let pi = *product_lookup
                .get(p)
                .ok_or_else(|| Error::UnknownProduct(p.to_string()))?;
            portfolio.push(pi);
            producers[pi].push(fi);
        }
        // BTreeSet iteration over ids matches index order since products are sorted.
        portfolios.push(portfolio);
    }

    let n = firms.len();
    let mut net = SupplyNetwork {
        firms,
        firm_lookup,
        products,
        product_lookup,
        portfolios,
        producers,
        edges: BTreeMap::new(),
        suppliers: vec![BTreeSet::new(); n],
        customers: vec![BTreeSet::new(); n],
    };

    let mut report = BuildReport {
        edges_in: edges.len(),
        ..Default::default()
    };
    let mut errors = Vec::new();
    for (pos, e) in edges.into_iter().enumerate() {
        match net.resolve_edge(&e) {
            Ok((s, c, attrs)) => {
                if let Some(existing) = net.edges.get_mut(&(s, c)) {
                    report.duplicates += 1;
                    existing.weight = match (existing.weight, attrs.weight) {
                        (Some(a), Some(b)) => Some(a + b),
                        (a, b) => a.or(b),
                    };
                    existing.products = match (existing.products.take(), attrs.products) {
                        (Some(mut a), Some(b)) => {
                            a.extend(b);
                            Some(a)
                        }
                        _ => None,
                    };
                } else {
                    net.insert_edge(s, c, attrs);
                }
            }
            Err(err) => {
                report.rejected.push((pos, err.to_string()));
                errors.push(err);
            }
        }
    }
    Ok((net, report, errors))
}

impl SupplyNetwork {
    pub fn empty() -> Self {
        build_network(Vec::new(), Vec::new(), Vec::new())
            .expect("empty network")
            .0
    }

    fn resolve_edge(&self, e: &SupplyEdge) -> Result<(usize, usize, EdgeAttrs)> {
        let s = self.firm_index(&e.supplier)?;
        let c = self.firm_index(&e.customer)?;
        if s == c {
            return Err(Error::SelfSupply(e.supplier.to_string()));
        }
        let products = match &e.products {
            None => None,
            Some(ps) => {
                let mut set = BTreeSet::new();
                for p in ps {
                    let pi = self.product_index(p)?;
                    if self.portfolios[s].binary_search(&pi).is_err() {
                        return Err(Error::EdgeProductMismatch {
                            supplier: e.supplier.to_string(),
                            product: p.to_string(),
                        });
                    }
                    set.insert(pi);
                }
                Some(set)
            }
        };
        Ok((
            s,
            c,
            EdgeAttrs {
                products,
                weight: e.weight,
            },
        ))
    }

    fn insert_edge(&mut self, s: usize, c: usize, attrs: EdgeAttrs) {
        self.edges.insert((s, c), attrs);
        self.suppliers[c].insert(s);
        self.customers[s].insert(c);
    }

    /// Adds supplier → customer unless already present. Returns whether it was added.
    pub(crate) fn add_edge_idx(&mut self, s: usize, c: usize, product: Option<usize>) -> bool {
        debug_assert!(s != c);
        if self.edges.contains_key(&(s, c)) {
            return false;
        }
        let attrs = EdgeAttrs {
            products: product.map(|p| BTreeSet::from([p])),
            weight: None,
        };
        self.insert_edge(s, c, attrs);
        true
    }

    pub(crate) fn remove_edge_idx(&mut self, s: usize, c: usize) -> Option<EdgeAttrs> {
        let attrs = self.edges.remove(&(s, c))?;
        self.suppliers[c].remove(&s);
        self.customers[s].remove(&c);
        Some(attrs)
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    pub fn firms(&self) -> &[Firm] {
        &self.firms
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn firm(&self, idx: usize) -> &Firm {
        &self.firms[idx]
    }

    pub fn product(&self, idx: usize) -> &Product {
        &self.products[idx]
    }

    pub fn firm_index(&self, id: &FirmId) -> Result<usize> {
        self.firm_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownFirm(id.to_string()))
    }

    pub fn product_index(&self, id: &ProductId) -> Result<usize> {
        self.product_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownProduct(id.to_string()))
    }

    /// Sorted product indices of a firm.
    pub fn portfolio(&self, firm: usize) -> &[usize] {
        &self.portfolios[firm]
    }

    pub fn makes(&self, firm: usize, product: usize) -> bool {
        self.portfolios[firm].binary_search(&product).is_ok()
    }

    /// Sorted firm indices producing a product.
    pub fn producers(&self, product: usize) -> &[usize] {
        &self.producers[product]
    }

    pub fn supplier_indices(&self, firm: usize) -> &BTreeSet<usize> {
        &self.suppliers[firm]
    }

    pub fn customer_indices(&self, firm: usize) -> &BTreeSet<usize> {
        &self.customers[firm]
    }

    pub fn has_edge(&self, supplier: usize, customer: usize) -> bool {
        self.edges.contains_key(&(supplier, customer))
    }

    /// Edges as (supplier, customer) index pairs in sorted order.
    pub fn edge_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge_attrs(&self, supplier: usize, customer: usize) -> Option<&EdgeAttrs> {
        self.edges.get(&(supplier, customer))
    }

    pub fn edges(&self) -> Vec<SupplyEdge> {
        self.edges
            .iter()
            .map(|(&(s, c), a)| self.materialize_edge(s, c, a))
            .collect()
    }

    pub(crate) fn materialize_edge(&self, s: usize, c: usize, a: &EdgeAttrs) -> SupplyEdge {
        SupplyEdge {
            supplier: self.firms[s].id.clone(),
            customer: self.firms[c].id.clone(),
            products: a
                .products
                .as_ref()
                .map(|ps| ps.iter().map(|&p| self.products[p].id.clone()).collect()),
            weight: a.weight,
        }
    }

    pub fn producers_of(&self, p: &ProductId) -> Result<BTreeSet<FirmId>> {
        let pi = self.product_index(p)?;
        Ok(self.producers[pi]
            .iter()
            .map(|&f| self.firms[f].id.clone())
            .collect())
    }

    pub fn suppliers_of(&self, f: &FirmId) -> Result<BTreeSet<FirmId>> {
        let fi = self.firm_index(f)?;
        Ok(self.ids(&self.suppliers[fi]))
    }

    pub fn customers_of(&self, f: &FirmId) -> Result<BTreeSet<FirmId>> {
        let fi = self.firm_index(f)?;
        Ok(self.ids(&self.customers[fi]))
    }

    fn ids(&self, set: &BTreeSet<usize>) -> BTreeSet<FirmId> {
        set.iter().map(|&i| self.firms[i].id.clone()).collect()
    }

    pub fn classify_edge(&self, e: &SupplyEdge) -> Result<EdgeKind> {
        let s = self.firm_index(&e.supplier)?;
        let c = self.firm_index(&e.customer)?;
        Ok(self.edge_kind(s, c))
    }

    pub fn edge_kind(&self, s: usize, c: usize) -> EdgeKind {
        if self.firms[s].country == self.firms[c].country {
            EdgeKind::Domestic
        } else {
            EdgeKind::International
        }
    }

    pub fn firms_in_countries(&self, countries: &BTreeSet<String>) -> Result<BTreeSet<FirmId>> {
        Ok(self
            .firm_indices_in(countries)?
            .into_iter()
            .map(|i| self.firms[i].id.clone())
            .collect())
    }

    /// Sorted indices of firms located in any of `countries`.
    pub fn firm_indices_in(&self, countries: &BTreeSet<String>) -> Result<Vec<usize>> {
        if countries.is_empty() {
            return Err(Error::EmptyScope);
        }
        Ok((0..self.firms.len())
            .filter(|&i| countries.contains(&self.firms[i].country))
            .collect())
    }

    /// Total (in + out) directed degree.
    pub fn total_degree(&self, firm: usize) -> usize {
        self.suppliers[firm].len() + self.customers[firm].len()
    }

    /// Distinct country codes present, sorted.
    pub fn countries(&self) -> BTreeSet<String> {
        self.firms.iter().map(|f| f.country.clone()).collect()
    }

    /// Undirected projection as sorted, deduplicated neighbour lists.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.firms.len())
            .map(|i| {
                let mut nb: Vec<usize> = self.suppliers[i]
                    .iter()
                    .chain(self.customers[i].iter())
                    .copied()
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect()
    }
}
