//! Node centralities on the undirected projection.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use super::{bfs, largest_component};
use crate::error::{Error, Result};
use crate::network::{FirmId, SupplyNetwork};

fn to_map(net: &SupplyNetwork, values: Vec<f64>) -> BTreeMap<FirmId, f64> {
    net.firms()
        .iter()
        .zip(values)
        .map(|(f, v)| (f.id.clone(), v))
        .collect()
}

/// Power iteration on (A + I) restricted to the largest component, unit L2 norm.
/// Firms outside that component score 0.
pub fn eigenvector_centrality(
    net: &SupplyNetwork,
    tol: f64,
    max_iter: usize,
) -> Result<BTreeMap<FirmId, f64>> {
    let adj = net.undirected_adjacency();
    let lcc = largest_component(&adj);
    if lcc.is_empty() {
        return Err(Error::DegenerateNetwork("no firms".into()));
    }
    let n = adj.len();
    let mut x = vec![0.0; n];
    let start = 1.0 / (lcc.len() as f64).sqrt();
    for &i in &lcc {
        x[i] = start;
    }
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        for &i in &lcc {
            next[i] = x[i] + adj[i].iter().map(|&j| x[j]).sum::<f64>();
        }
        let norm = lcc.iter().map(|&i| next[i] * next[i]).sum::<f64>().sqrt();
        let mut delta: f64 = 0.0;
        for &i in &lcc {
            next[i] /= norm;
            delta = delta.max((next[i] - x[i]).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if delta < tol {
            return Ok(to_map(net, x));
        }
    }
    Err(Error::NoConvergence(max_iter))
}

/// (reachable − 1) / Σ distances, within each firm's own component.
pub fn closeness_centrality(net: &SupplyNetwork) -> BTreeMap<FirmId, f64> {
    let adj = net.undirected_adjacency();
    let n = adj.len();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], VecDeque::new()),
            |(dist, queue), s| {
                bfs(&adj, s, dist, queue);
                let (reach, total) = dist
                    .iter()
                    .filter(|&&d| d != u32::MAX)
                    .fold((0u64, 0u64), |(r, t), &d| (r + 1, t + d as u64));
                if total == 0 {
                    0.0
                } else {
                    (reach - 1) as f64 / total as f64
                }
            },
        )
        .collect();
    to_map(net, values)
}

/// Brandes accumulation, normalized by (n−1)(n−2)/2 unordered pairs.
pub fn betweenness_centrality(net: &SupplyNetwork) -> BTreeMap<FirmId, f64> {
    let adj = net.undirected_adjacency();
    let n = adj.len();
    // Fixed-size source chunks folded in order, so the float sum does not
    // depend on the number of worker threads.
    const CHUNK: usize = 64;
    let partials: Vec<Vec<f64>> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(CHUNK)
        .map(|sources| {
            let mut acc = vec![0.0; n];
            let mut sigma = vec![0.0f64; n];
            let mut dist = vec![-1i64; n];
            let mut delta = vec![0.0f64; n];
            let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut stack = Vec::with_capacity(n);
            let mut queue = VecDeque::new();
            for &s in sources {
                sigma.fill(0.0);
                dist.fill(-1);
                delta.fill(0.0);
                preds.iter_mut().for_each(Vec::clear);
                stack.clear();
                sigma[s] = 1.0;
                dist[s] = 0;
                queue.push_back(s);
                while let Some(v) = queue.pop_front() {
                    stack.push(v);
                    for &w in &adj[v] {
                        if dist[w] < 0 {
                            dist[w] = dist[v] + 1;
                            queue.push_back(w);
                        }
                        if dist[w] == dist[v] + 1 {
                            sigma[w] += sigma[v];
                            preds[w].push(v);
                        }
                    }
                }
                while let Some(w) = stack.pop() {
                    for &v in &preds[w] {
                        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                    }
                    if w != s {
                        acc[w] += delta[w];
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    // each unordered pair was counted from both ends
    let scale = if n > 2 {
        1.0 / ((n - 1) as f64 * (n - 2) as f64)
    } else {
        0.0
    };
    to_map(net, total.into_iter().map(|v| v * scale).collect())
}
