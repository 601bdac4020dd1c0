//! Test support: random small networks, literal policy transcriptions over
//! plain sets, and brute-force metric formulas.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod checks;
pub mod golden;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use supplynet::network::{build_network, Firm, Product, SupplyEdge, SupplyNetwork};
use supplynet::policy::{PolicyOutcome, PolicyScope};
use supplynet::scopes::CountryCluster;

pub const COUNTRY_POOL: [&str; 10] = ["US", "CN", "JP", "DE", "FR", "GB", "IN", "KR", "BR", "MX"];

/// A network in plain set form, shared by the library run and the oracle.
#[derive(Debug, Clone)]
pub struct Plain {
    pub country: BTreeMap<String, String>,
    pub products: BTreeMap<String, BTreeSet<String>>,
    pub edges: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub net: SupplyNetwork,
    pub plain: Plain,
    pub countries: Vec<String>,
}

/// Random network with 2..=50 firms, 2..=10 countries and 1..=30 products.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_firms = rng.gen_range(2..=50);
    let n_countries = rng.gen_range(2..=10);
    let n_products = rng.gen_range(1..=30);
    let countries: Vec<String> = COUNTRY_POOL[..n_countries]
        .iter()
        .map(|c| c.to_string())
        .collect();
    let product_ids: Vec<String> = (0..n_products).map(|p| format!("p{p:02}")).collect();

    let mut plain = Plain {
        country: BTreeMap::new(),
        products: BTreeMap::new(),
        edges: BTreeSet::new(),
    };
    let mut firms = Vec::new();
    for f in 0..n_firms {
        let id = format!("f{f:02}");
        let country = countries.choose(&mut rng).unwrap().clone();
        let k = rng.gen_range(1..=4.min(n_products));
        let portfolio: BTreeSet<String> =
            product_ids.choose_multiple(&mut rng, k).cloned().collect();
        let refs: Vec<&str> = portfolio.iter().map(String::as_str).collect();
        firms.push(Firm::new(&id, &country, "any", &refs));
        plain.country.insert(id.clone(), country);
        plain.products.insert(id, portfolio);
    }
    let p_edge = rng.gen_range(0.02..0.25);
    for s in 0..n_firms {
        for c in 0..n_firms {
            if s != c && rng.gen_bool(p_edge) {
                plain.edges.insert((format!("f{s:02}"), format!("f{c:02}")));
            }
        }
    }
    let products = product_ids
        .iter()
        .map(|p| Product::new(p, "any", false))
        .collect();
    let edges = plain
        .edges
        .iter()
        .map(|(s, c)| SupplyEdge::new(s, c))
        .collect();
    let net = build_network(firms, products, edges).unwrap().0;
    Case {
        net,
        plain,
        countries,
    }
}

/// Random non-empty acting set and a disjoint non-empty risky set.
pub fn random_scope_sets(seed: u64, countries: &[String]) -> (Vec<String>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    let mut shuffled = countries.to_vec();
    shuffled.shuffle(&mut rng);
    let cut = rng.gen_range(1..shuffled.len());
    let acting = shuffled[..cut].to_vec();
    let rest = &shuffled[cut..];
    let take = rng.gen_range(1..=rest.len());
    (acting, rest[..take].to_vec())
}

pub fn cluster(name: &str, codes: &[String]) -> CountryCluster {
    let refs: Vec<&str> = codes.iter().map(String::as_str).collect();
    CountryCluster::new(name, &refs)
}

pub fn scopes_for(acting: &[String], risky: &[String]) -> [PolicyScope; 3] {
    [
        PolicyScope::country_plus_one(cluster("X", risky), cluster("S", acting)),
        PolicyScope::friendshoring(cluster("S", acting)),
        PolicyScope::reshoring(cluster("S", acting)),
    ]
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleOutcome {
    pub edges: BTreeSet<(String, String)>,
    pub ns_p: BTreeSet<String>,
    pub ns_c: BTreeSet<String>,
    pub flagged: BTreeSet<(String, String)>,
}

fn companies_in(plain: &Plain, countries: &[String]) -> BTreeSet<String> {
    plain
        .country
        .iter()
        .filter(|(_, c)| countries.contains(c))
        .map(|(f, _)| f.clone())
        .collect()
}

fn get_suppliers(edges: &BTreeSet<(String, String)>, c: &str) -> BTreeSet<String> {
    edges
        .iter()
        .filter(|(_, k)| k == c)
        .map(|(s, _)| s.clone())
        .collect()
}

fn get_products<'a>(plain: &'a Plain, f: &str) -> &'a BTreeSet<String> {
    &plain.products[f]
}

/// Country+1. The inner supplier loop only acts on the risky firm `x` of the
/// outer loop; an alternative `s` is a supplier added to `c`.
pub fn oracle_country_plus_one(
    plain: &Plain,
    x_countries: &[String],
    s_countries: &[String],
) -> OracleOutcome {
    let c_x = companies_in(plain, x_countries);
    let c_s = companies_in(plain, s_countries);
    let mut out = OracleOutcome {
        edges: plain.edges.clone(),
        ..Default::default()
    };
    for x in &c_x {
        for c in &c_s {
            for supplier in get_suppliers(&out.edges, c) {
                if &supplier != x {
                    continue;
                }
                for p in get_products(plain, x) {
                    let mut alternative_suppliers = BTreeSet::new();
                    for s in &c_s {
                        if s != c && get_products(plain, s).contains(p) {
                            alternative_suppliers.insert(s.clone());
                        }
                    }
                    if alternative_suppliers.is_empty() {
                        out.ns_p.insert(p.clone());
                        out.ns_c.insert(c.clone());
                        out.flagged.insert((c.clone(), p.clone()));
                    } else {
                        for s in alternative_suppliers {
                            if !get_suppliers(&out.edges, c).contains(&s) {
                                out.edges.insert((s, c.clone()));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Friendshoring. Alternatives are collected afresh for every product.
pub fn oracle_friendshoring(plain: &Plain, s_countries: &[String]) -> OracleOutcome {
    let cs = companies_in(plain, s_countries);
    let mut out = OracleOutcome {
        edges: plain.edges.clone(),
        ..Default::default()
    };
    for c in &cs {
        for s in get_suppliers(&out.edges, c) {
            if cs.contains(&s) {
                continue;
            }
            let mut substitutable = true;
            for p in get_products(plain, &s) {
                let mut alternative_suppliers = BTreeSet::new();
                for k in &cs {
                    if k != c && get_products(plain, k).contains(p) {
                        alternative_suppliers.insert(k.clone());
                    }
                }
                if alternative_suppliers.is_empty() {
                    out.ns_p.insert(p.clone());
                    out.ns_c.insert(c.clone());
                    out.flagged.insert((c.clone(), p.clone()));
                    substitutable = false;
                } else {
                    for k in alternative_suppliers {
                        if !get_suppliers(&out.edges, c).contains(&k) {
                            out.edges.insert((k, c.clone()));
                        }
                    }
                }
            }
            if substitutable {
                out.edges.remove(&(s.clone(), c.clone()));
            }
        }
    }
    out
}

/// Reshoring: targets foreign suppliers, alternatives from the customer's own country.
pub fn oracle_reshoring(plain: &Plain, s1_countries: &[String]) -> OracleOutcome {
    let cs = companies_in(plain, s1_countries);
    let mut out = OracleOutcome {
        edges: plain.edges.clone(),
        ..Default::default()
    };
    for c in &cs {
        let home = &plain.country[c];
        for s in get_suppliers(&out.edges, c) {
            if &plain.country[&s] == home {
                continue;
            }
            let mut substitutable = true;
            for p in get_products(plain, &s) {
                let mut alternative_suppliers = BTreeSet::new();
                for k in &cs {
                    if &plain.country[k] == home && k != c && get_products(plain, k).contains(p) {
                        alternative_suppliers.insert(k.clone());
                    }
                }
                if alternative_suppliers.is_empty() {
                    out.ns_p.insert(p.clone());
                    out.ns_c.insert(c.clone());
                    out.flagged.insert((c.clone(), p.clone()));
                    substitutable = false;
                } else {
                    for k in alternative_suppliers {
                        if !get_suppliers(&out.edges, c).contains(&k) {
                            out.edges.insert((k, c.clone()));
                        }
                    }
                }
            }
            if substitutable {
                out.edges.remove(&(s.clone(), c.clone()));
            }
        }
    }
    out
}

/// Library outcome in the oracle's plain form.
pub fn plain_outcome(o: &PolicyOutcome) -> OracleOutcome {
    let net = &o.network_after;
    OracleOutcome {
        edges: net
            .edge_pairs()
            .map(|(s, c)| (net.firm(s).id.to_string(), net.firm(c).id.to_string()))
            .collect(),
        ns_p: o.ns_products.iter().map(|p| p.to_string()).collect(),
        ns_c: o.ns_companies.iter().map(|c| c.to_string()).collect(),
        flagged: o
            .flagged_pairs
            .iter()
            .map(|(c, p)| (c.to_string(), p.to_string()))
            .collect(),
    }
}

pub fn edge_set(net: &SupplyNetwork) -> BTreeSet<(usize, usize)> {
    net.edge_pairs().collect()
}

/// Checks the policy postconditions that hold for every selection mode.
/// Returns a description of the first violation.
pub fn check_invariants(
    before: &SupplyNetwork,
    scope: &PolicyScope,
    o: &PolicyOutcome,
) -> Result<(), String> {
    use supplynet::policy::PolicyKind;
    let after = &o.network_after;
    if after.firms() != before.firms() || after.products() != before.products() {
        return Err("firms or portfolios changed".into());
    }
    let e0 = edge_set(before);
    let e1 = edge_set(after);
    let acting = |i: usize| scope.acting.contains(&before.firm(i).country);
    for &(s, c) in e0.symmetric_difference(&e1) {
        if !acting(c) {
            return Err(format!("edge {s}->{c} of a non-acting customer changed"));
        }
    }
    let flagged: BTreeSet<(usize, usize)> = o
        .flagged_pairs
        .iter()
        .map(|(c, p)| {
            (
                before.firm_index(c).unwrap(),
                before.product_index(p).unwrap(),
            )
        })
        .collect();
    match scope.policy {
        PolicyKind::CountryPlusOne => {
            if !e0.is_subset(&e1) {
                return Err("Country+1 removed an edge".into());
            }
        }
        PolicyKind::Friendshoring | PolicyKind::Reshoring => {
            let targeted = |s: usize, c: usize| match scope.policy {
                PolicyKind::Friendshoring => !acting(s),
                _ => before.firm(s).country != before.firm(c).country,
            };
            for &(s, c) in &e0 {
                if !acting(c) || !targeted(s, c) {
                    if !e1.contains(&(s, c)) {
                        return Err(format!("untargeted edge {s}->{c} removed"));
                    }
                    continue;
                }
                let blocked = before
                    .portfolio(s)
                    .iter()
                    .any(|&p| flagged.contains(&(c, p)));
                if blocked != e1.contains(&(s, c)) {
                    return Err(format!(
                        "targeted edge {s}->{c}: retained={} blocked={blocked}",
                        e1.contains(&(s, c))
                    ));
                }
            }
        }
    }
    for &(s, c) in e1.difference(&e0) {
        let ok = match scope.policy {
            PolicyKind::Reshoring => acting(s) && before.firm(s).country == before.firm(c).country,
            _ => acting(s),
        };
        if !ok {
            return Err(format!("added edge {s}->{c} from an inadmissible supplier"));
        }
    }
    Ok(())
}

/// Random directed graph on n nodes whose undirected projection is connected,
/// with countries drawn from three codes.
pub fn random_connected(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (Vec<&'static str>, Vec<(usize, usize)>) {
    loop {
        let p = rng.gen_range(0.15..0.7);
        let mut edges = Vec::new();
        for s in 0..n {
            for c in 0..n {
                if s != c && rng.gen_bool(p) {
                    edges.push((s, c));
                }
            }
        }
        let countries: Vec<&'static str> = (0..n)
            .map(|_| *["US", "CN", "JP"].choose(rng).unwrap())
            .collect();
        let adj = Brute::new(n, &countries, &edges);
        if adj.connected() {
            return (countries, edges);
        }
    }
}

pub fn small_net(countries: &[&str], edges: &[(usize, usize)]) -> SupplyNetwork {
    let firms = countries
        .iter()
        .enumerate()
        .map(|(i, c)| Firm::new(&format!("f{i:02}"), c, "any", &["p"]))
        .collect();
    let edges = edges
        .iter()
        .map(|&(s, c)| SupplyEdge::new(&format!("f{s:02}"), &format!("f{c:02}")))
        .collect();
    build_network(firms, vec![Product::new("p", "any", false)], edges)
        .unwrap()
        .0
}

/// Dense-matrix formulas for small graphs.
pub struct Brute {
    pub n: usize,
    pub a: Vec<Vec<bool>>,
    pub countries: Vec<String>,
    pub directed_edges: usize,
}

impl Brute {
    pub fn new(n: usize, countries: &[&str], edges: &[(usize, usize)]) -> Self {
        let mut a = vec![vec![false; n]; n];
        let mut directed = BTreeSet::new();
        for &(s, c) in edges {
            a[s][c] = true;
            a[c][s] = true;
            directed.insert((s, c));
        }
        Brute {
            n,
            a,
            countries: countries.iter().map(|c| c.to_string()).collect(),
            directed_edges: directed.len(),
        }
    }

    pub fn degree(&self, i: usize) -> usize {
        self.a[i].iter().filter(|&&b| b).count()
    }

    pub fn m(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn distances(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for i in 0..n {
            d[i][i] = 0.0;
            for j in 0..n {
                if self.a[i][j] {
                    d[i][j] = 1.0;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    pub fn connected(&self) -> bool {
        self.distances()[0].iter().all(|d| d.is_finite())
    }

    pub fn density(&self) -> f64 {
        self.directed_edges as f64 / (self.n * (self.n - 1)) as f64
    }

    pub fn degree_assortativity(&self) -> Option<f64> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.a[i][j] {
                    xs.push(self.degree(i) as f64);
                    ys.push(self.degree(j) as f64);
                }
            }
        }
        pearson(&xs, &ys)
    }

    pub fn location_assortativity(&self) -> Option<f64> {
        let labels: Vec<&String> = self
            .countries
            .iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let idx = |c: &String| labels.iter().position(|l| *l == c).unwrap();
        let k = labels.len();
        let mut e = vec![vec![0.0; k]; k];
        let mut total = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if self.a[i][j] {
                    e[idx(&self.countries[i])][idx(&self.countries[j])] += 1.0;
                    total += 1.0;
                }
            }
        }
        if total == 0.0 {
            return None;
        }
        let trace: f64 = (0..k).map(|i| e[i][i] / total).sum();
        let ab: f64 = (0..k)
            .map(|i| {
                let a: f64 = e[i].iter().sum::<f64>() / total;
                let b: f64 = (0..k).map(|r| e[r][i]).sum::<f64>() / total;
                a * b
            })
            .sum();
        if (1.0 - ab).abs() < 1e-12 {
            return None;
        }
        Some((trace - ab) / (1.0 - ab))
    }

    pub fn clustering(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            let k = self.degree(i);
            if k < 2 {
                continue;
            }
            let mut t = 0;
            for j in 0..self.n {
                for l in j + 1..self.n {
                    if self.a[i][j] && self.a[i][l] && self.a[j][l] {
                        t += 1;
                    }
                }
            }
            sum += 2.0 * t as f64 / (k * (k - 1)) as f64;
        }
        sum / self.n as f64
    }

    /// Mean over ordered pairs; assumes the graph is connected.
    pub fn avg_shortest_path(&self) -> f64 {
        let d = self.distances();
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += d[i][j];
                }
            }
        }
        s / (self.n * (self.n - 1)) as f64
    }

    pub fn modularity(&self, labels: &[usize]) -> f64 {
        let two_m = 2.0 * self.m() as f64;
        if two_m == 0.0 {
            return 0.0;
        }
        let mut q = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if labels[i] == labels[j] {
                    let aij = if self.a[i][j] { 1.0 } else { 0.0 };
                    q += aij - (self.degree(i) * self.degree(j)) as f64 / two_m;
                }
            }
        }
        q / two_m
    }

    pub fn closeness(&self) -> Vec<f64> {
        let d = self.distances();
        (0..self.n)
            .map(|i| {
                let reach: Vec<f64> = d[i].iter().copied().filter(|x| x.is_finite()).collect();
                let total: f64 = reach.iter().sum();
                if total == 0.0 {
                    0.0
                } else {
                    (reach.len() - 1) as f64 / total
                }
            })
            .collect()
    }

    /// Shortest-path counts from explicit path enumeration by distance layers.
    pub fn betweenness(&self) -> Vec<f64> {
        let n = self.n;
        let d = self.distances();
        let mut sigma = vec![vec![0.0; n]; n];
        for s in 0..n {
            sigma[s][s] = 1.0;
            let mut order: Vec<usize> = (0..n).filter(|&v| d[s][v].is_finite()).collect();
            order.sort_by(|&a, &b| d[s][a].partial_cmp(&d[s][b]).unwrap());
            for &v in &order {
                if v == s {
                    continue;
                }
                sigma[s][v] = (0..n)
                    .filter(|&u| self.a[u][v] && d[s][u] + 1.0 == d[s][v])
                    .map(|u| sigma[s][u])
                    .sum();
            }
        }
        let mut bc = vec![0.0; n];
        for v in 0..n {
            for s in 0..n {
                for t in s + 1..n {
                    if s == v || t == v || !d[s][t].is_finite() {
                        continue;
                    }
                    if d[s][v] + d[v][t] == d[s][t] {
                        bc[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                    }
                }
            }
        }
        if n > 2 {
            let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
            bc.iter_mut().for_each(|b| *b /= pairs);
        }
        bc
    }

    /// Best modularity over every set partition of the nodes.
    pub fn best_modularity(&self) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut count = 0;
        for_each_partition(self.n, |labels| {
            count += 1;
            best = best.max(self.modularity(labels));
        });
        (best, count)
    }
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if vx < 1e-12 || vy < 1e-12 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

/// Visits every set partition of 0..n as a restricted growth string.
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, max: usize, f: &mut dyn FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        let next = if labels.is_empty() { 0 } else { max + 1 };
        for l in 0..=next {
            labels.push(l);
            rec(labels, n, max.max(l), f);
            labels.pop();
        }
    }
    if n == 0 {
        f(&[]);
        return;
    }
    rec(&mut Vec::with_capacity(n), n, 0, &mut f);
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn close_opt(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => close(a, b, tol),
        _ => false,
    }
}
