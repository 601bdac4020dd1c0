//! Topological measures of a supply network.
//!
//! Density and edge count use the directed graph. Everything else runs on the
//! undirected projection: one edge between two firms if either supplies the other.

mod centrality;
mod community;

use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::SupplyNetwork;

pub use centrality::{betweenness_centrality, closeness_centrality, eigenvector_centrality};
pub use community::{detect_communities, modularity_of_labels, modularity_of_partition, Partition};

/// One column of the before/after measure tables.
///
/// Assortativities and path length are `None` when undefined for the graph
/// (zero variance, single country, no component with a path). Averaging code
/// skips them instead of reading them as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub edge_count: usize,
    pub density: Option<f64>,
    pub degree_assortativity: Option<f64>,
    pub location_assortativity: Option<f64>,
    pub avg_shortest_path: Option<f64>,
    pub avg_domestic: f64,
    pub avg_international: f64,
    pub clustering_coefficient: f64,
    pub modularity: f64,
    pub community_count: usize,
}

impl MetricReport {
    /// Row labels, in field order.
    pub const ROW_LABELS: [&'static str; 10] = [
        "Avg. No. Edges",
        "Density",
        "Degree Assortativity",
        "Location Assortativity",
        "Avg. Shortest Path Length",
        "Avg. Domestic Connections",
        "Avg. International Connections",
        "Clustering Coefficient",
        "Modularity",
        "No. Communities",
    ];

    /// Field values in [`Self::ROW_LABELS`] order.
    pub fn values(&self) -> [Option<f64>; 10] {
        [
            Some(self.edge_count as f64),
            self.density,
            self.degree_assortativity,
            self.location_assortativity,
            self.avg_shortest_path,
            Some(self.avg_domestic),
            Some(self.avg_international),
            Some(self.clustering_coefficient),
            Some(self.modularity),
            Some(self.community_count as f64),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    Exact,
    /// BFS from `k` uniformly chosen sources in the largest component.
    Sampled {
        k: usize,
    },
}

impl std::str::FromStr for PathMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(PathMode::Exact);
        }
        s.strip_prefix("sampled:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .map(|k| PathMode::Sampled { k })
            .ok_or_else(|| {
                Error::InvalidConfig(format!("path mode {s:?}, expected exact|sampled:K"))
            })
    }
}

pub fn density(net: &SupplyNetwork) -> Result<f64> {
    let n = net.firm_count();
    if n < 2 {
        return Err(Error::DegenerateNetwork(format!("{n} firms")));
    }
    Ok(net.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)))
}

fn undirected_edges(adj: &[Vec<usize>]) -> impl Iterator<Item = (usize, usize)> + '_ {
    adj.iter()
        .enumerate()
        .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
}

/// Pearson correlation of endpoint degrees, each undirected edge counted in
/// both orientations. Exact integer sums, one division at the end.
pub fn degree_assortativity(net: &SupplyNetwork) -> Option<f64> {
    let adj = net.undirected_adjacency();
    let (mut n, mut sx, mut sxx, mut sxy) = (0i128, 0i128, 0i128, 0i128);
    for (u, v) in undirected_edges(&adj) {
        let (a, b) = (adj[u].len() as i128, adj[v].len() as i128);
        n += 2;
        sx += a + b;
        sxx += a * a + b * b;
        sxy += 2 * a * b;
    }
    let den = n * sxx - sx * sx;
    if n == 0 || den == 0 {
        return None;
    }
    Some((n * sxy - sx * sx) as f64 / den as f64)
}

/// Categorical assortativity on firm country:
/// r = (Σ e_ii − Σ a_i²) / (1 − Σ a_i²) over the symmetric mixing matrix.
pub fn location_assortativity(net: &SupplyNetwork) -> Option<f64> {
    let adj = net.undirected_adjacency();
    let countries: Vec<&str> = net.firms().iter().map(|f| f.country.as_str()).collect();
    let mut ends: std::collections::BTreeMap<&str, i128> = Default::default();
    let (mut n, mut same) = (0i128, 0i128);
    for (u, v) in undirected_edges(&adj) {
        n += 2;
        *ends.entry(countries[u]).or_default() += 1;
        *ends.entry(countries[v]).or_default() += 1;
        if countries[u] == countries[v] {
            same += 2;
        }
    }
    let s: i128 = ends.values().map(|d| d * d).sum();
    let den = n * n - s;
    if n == 0 || den == 0 {
        return None;
    }
    Some((same * n - s) as f64 / den as f64)
}

/// Connected components of an undirected adjacency; labels in order of smallest member.
pub(crate) fn components(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; adj.len()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..adj.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Sorted members of the largest component (ties: the one with the smallest member).
pub(crate) fn largest_component(adj: &[Vec<usize>]) -> Vec<usize> {
    let label = components(adj);
    let count = label.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    let Some(best) = (0..count).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))) else {
        return Vec::new();
    };
    (0..adj.len()).filter(|&i| label[i] == best).collect()
}

/// BFS distances from `src`; `u32::MAX` for unreachable.
pub(crate) fn bfs(adj: &[Vec<usize>], src: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) {
    dist.fill(u32::MAX);
    dist[src] = 0;
    queue.clear();
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        let d = dist[u] + 1;
        for &v in &adj[u] {
            if dist[v] == u32::MAX {
                dist[v] = d;
                queue.push_back(v);
            }
        }
    }
}

/// Mean pairwise distance inside the largest component of the undirected projection.
pub fn avg_shortest_path(net: &SupplyNetwork, mode: PathMode, seed: u64) -> Result<f64> {
    let adj = net.undirected_adjacency();
    let lcc = largest_component(&adj);
    if lcc.len() < 2 {
        return Err(Error::NoPaths);
    }
    let sources: Vec<usize> = match mode {
        PathMode::Sampled { k } if k < lcc.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<usize> = sample(&mut rng, lcc.len(), k)
                .into_iter()
                .map(|i| lcc[i])
                .collect();
            picked.sort_unstable();
            picked
        }
        _ => lcc.clone(),
    };
    let n = adj.len();
    let total: u64 = sources
        .par_iter()
        .map_init(
            || (vec![0u32; n], VecDeque::new()),
            |(dist, queue), &s| {
                bfs(&adj, s, dist, queue);
                dist.iter()
                    .filter(|&&d| d != u32::MAX)
                    .map(|&d| d as u64)
                    .sum::<u64>()
            },
        )
        .sum();
    let pairs = sources.len() as u64 * (lcc.len() as u64 - 1);
    Ok(total as f64 / pairs as f64)
}

/// Mean over all firms of distinct same-country and other-country neighbours.
pub fn avg_connection_split(net: &SupplyNetwork) -> (f64, f64) {
    let n = net.firm_count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let adj = net.undirected_adjacency();
    let (mut dom, mut intl) = (0usize, 0usize);
    for (u, nb) in adj.iter().enumerate() {
        let home = &net.firm(u).country;
        let d = nb.iter().filter(|&&v| &net.firm(v).country == home).count();
        dom += d;
        intl += nb.len() - d;
    }
    (dom as f64 / n as f64, intl as f64 / n as f64)
}

/// Mean local clustering; firms with fewer than two neighbours count as 0.
pub fn clustering_coefficient(net: &SupplyNetwork) -> f64 {
    let adj = net.undirected_adjacency();
    local_clustering(&adj).iter().sum::<f64>() / adj.len().max(1) as f64
}

pub(crate) fn local_clustering(adj: &[Vec<usize>]) -> Vec<f64> {
    adj.par_iter()
        .map(|nb| {
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &v) in nb.iter().enumerate() {
                links += sorted_intersection_count(&nb[i + 1..], &adj[v]);
            }
            links as f64 / (d * (d - 1) / 2) as f64
        })
        .collect()
}

fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Derives an independent stream seed from a parent seed and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer over the combined word
    let mut z = seed
        ^ tag
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const SEED_TAG_COMMUNITIES: u64 = 1;
pub const SEED_TAG_PATHS: u64 = 2;

pub fn metric_report(net: &SupplyNetwork, seed: u64, path_mode: PathMode) -> MetricReport {
    let (avg_domestic, avg_international) = avg_connection_split(net);
    let (partition, modularity) = detect_communities(net, derive_seed(seed, SEED_TAG_COMMUNITIES));
    MetricReport {
        edge_count: net.edge_count(),
        density: density(net).ok(),
        degree_assortativity: degree_assortativity(net),
        location_assortativity: location_assortativity(net),
        avg_shortest_path: avg_shortest_path(net, path_mode, derive_seed(seed, SEED_TAG_PATHS))
            .ok(),
        avg_domestic,
        avg_international,
        clustering_coefficient: clustering_coefficient(net),
        modularity,
        community_count: partition.community_count(),
    }
}
