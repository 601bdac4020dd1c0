//! Newman modularity and seeded Louvain community detection.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{FirmId, SupplyNetwork};

/// Community label per firm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub assignment: BTreeMap<FirmId, usize>,
}

impl Partition {
    pub fn from_labels(net: &SupplyNetwork, labels: &[usize]) -> Self {
        Partition {
            assignment: net
                .firms()
                .iter()
                .zip(labels)
                .map(|(f, &l)| (f.id.clone(), l))
                .collect(),
        }
    }

    pub fn community_count(&self) -> usize {
        let mut labels: Vec<usize> = self.assignment.values().copied().collect();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    /// Labels indexed by firm position; fails if any firm is missing.
    pub fn labels(&self, net: &SupplyNetwork) -> Result<Vec<usize>> {
        net.firms()
            .iter()
            .map(|f| {
                self.assignment
                    .get(&f.id)
                    .copied()
                    .ok_or_else(|| Error::PartitionNotTotal(f.id.to_string()))
            })
            .collect()
    }
}

pub fn modularity_of_partition(net: &SupplyNetwork, part: &Partition) -> Result<f64> {
    let labels = part.labels(net)?;
    Ok(modularity_of_labels(&net.undirected_adjacency(), &labels))
}

/// Q = Σ_c (L_c / m − (D_c / 2m)²). An edgeless graph scores 0.
pub fn modularity_of_labels(adj: &[Vec<usize>], labels: &[usize]) -> f64 {
    let two_m: usize = adj.iter().map(Vec::len).sum();
    if two_m == 0 {
        return 0.0;
    }
    let mut inner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for (u, nb) in adj.iter().enumerate() {
        *degree.entry(labels[u]).or_default() += nb.len();
        // counts each internal edge twice
        *inner.entry(labels[u]).or_default() +=
            nb.iter().filter(|&&v| labels[v] == labels[u]).count();
    }
    let two_m = two_m as f64;
    degree
        .iter()
        .map(|(c, &d)| {
            let l = *inner.get(c).unwrap_or(&0) as f64;
            l / two_m - (d as f64 / two_m).powi(2)
        })
        .sum()
}

/// Weighted undirected graph for one Louvain level. `loops[i]` holds twice the
/// internal edge weight collapsed into node i.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl Level {
    fn degree(&self, i: usize) -> f64 {
        self.loops[i] + self.adj[i].iter().map(|&(_, w)| w).sum::<f64>()
    }
}

const GAIN_EPS: f64 = 1e-12;

/// Local moving phase. Returns community per node and whether anything moved.
fn one_level(level: &Level, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = level.adj.len();
    let k: Vec<f64> = (0..n).map(|i| level.degree(i)).collect();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = k.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut weight_to = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    loop {
        let mut moves = 0usize;
        for &i in &order {
            if level.adj[i].is_empty() {
                continue;
            }
            let old = comm[i];
            tot[old] -= k[i];
            touched.clear();
            touched.push(old);
            seen[old] = true;
            for &(j, w) in &level.adj[i] {
                let c = comm[j];
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                weight_to[c] += w;
            }
            let gain = |c: usize| weight_to[c] - k[i] * tot[c] / two_m;
            let mut best = old;
            let mut best_gain = gain(old);
            for &c in &touched[1..] {
                let g = gain(c);
                if g > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = g;
                }
            }
            for &c in &touched {
                weight_to[c] = 0.0;
                seen[c] = false;
            }
            comm[i] = best;
            tot[best] += k[i];
            if best != old {
                moves += 1;
            }
        }
        if moves == 0 {
            break;
        }
        moved_any = true;
    }
    (comm, moved_any)
}

fn aggregate(level: &Level, comm: &[usize]) -> (Level, Vec<usize>) {
    // renumber in order of first appearance
    let mut remap = vec![usize::MAX; comm.len()];
    let mut next = 0;
    let dense: Vec<usize> = comm
        .iter()
        .map(|&c| {
            if remap[c] == usize::MAX {
                remap[c] = next;
                next += 1;
            }
            remap[c]
        })
        .collect();
    let mut loops = vec![0.0; next];
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); next];
    for (i, nb) in level.adj.iter().enumerate() {
        let ci = dense[i];
        loops[ci] += level.loops[i];
        for &(j, w) in nb {
            let cj = dense[j];
            if ci == cj {
                loops[ci] += w;
            } else {
                *links[ci].entry(cj).or_default() += w;
            }
        }
    }
    let adj = links.into_iter().map(|m| m.into_iter().collect()).collect();
    (Level { adj, loops }, dense)
}

/// Greedy multilevel modularity maximization on the undirected projection.
///
/// The node visit order at each level is shuffled from `seed`; a node moves
/// only on a strictly positive gain, ties going to the first community met.
/// The returned modularity is recomputed from the final labels.
pub fn detect_communities(net: &SupplyNetwork, seed: u64) -> (Partition, f64) {
    let adj = net.undirected_adjacency();
    let labels = louvain_labels(&adj, seed);
    let q = modularity_of_labels(&adj, &labels);
    let singletons: Vec<usize> = (0..adj.len()).collect();
    let q0 = modularity_of_labels(&adj, &singletons);
    if q < q0 {
        return (Partition::from_labels(net, &singletons), q0);
    }
    (Partition::from_labels(net, &labels), q)
}

pub(crate) fn louvain_labels(adj: &[Vec<usize>], seed: u64) -> Vec<usize> {
    let n = adj.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_m: f64 = adj.iter().map(Vec::len).sum::<usize>() as f64;
    let mut labels: Vec<usize> = (0..n).collect();
    if two_m == 0.0 {
        return labels;
    }
    let mut level = Level {
        adj: adj
            .iter()
            .map(|nb| nb.iter().map(|&v| (v, 1.0)).collect())
            .collect(),
        loops: vec![0.0; n],
    };
    loop {
        let (comm, moved) = one_level(&level, two_m, &mut rng);
        if !moved {
            break;
        }
        let (next, dense) = aggregate(&level, &comm);
        for l in labels.iter_mut() {
            *l = dense[*l];
        }
        if next.adj.len() == level.adj.len() {
            break;
        }
        level = next;
    }
    canonical(&labels)
}

/// Relabels so communities are numbered by their smallest member.
fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = remap.len();
            *remap.entry(l).or_insert(next)
        })
        .collect()
}
