use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::Instance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMetric {
    RoutingCost,
    HopCount,
}

impl std::str::FromStr for PathMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cost" | "routing_cost" => Ok(PathMetric::RoutingCost),
            "hops" | "hop_count" => Ok(PathMetric::HopCount),
            other => Err(Error::InvalidArgument(format!("unknown path metric `{other}`"))),
        }
    }
}

const COST_TOL: f64 = 1e-9;

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn edge_weight(metric: PathMetric, cost: f64) -> f64 {
    match metric {
        PathMetric::RoutingCost => cost,
        PathMetric::HopCount => 1.0,
    }
}

/// Single-target Dijkstra: distance from every node to `target`.
fn distances_to(instance: &Instance, target: usize, metric: PathMetric) -> Vec<f64> {
    let adj = instance.adjacency();
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[target] = 0.0;
    heap.push(Entry(0.0, target));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(w, c) in &adj[u] {
            let nd = d + edge_weight(metric, c);
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry(nd, w));
            }
        }
    }
    dist
}

/// Shortest path from `src` to `dst`; among equal-cost paths the one whose
/// node-id sequence is lexicographically smallest.
pub(crate) fn shortest_path(
    instance: &Instance,
    src: usize,
    dst: usize,
    metric: PathMetric,
    dist_to_dst: &[f64],
) -> Option<Vec<usize>> {
    if !dist_to_dst[src].is_finite() {
        return None;
    }
    let adj = instance.adjacency();
    let mut path = vec![src];
    let mut on_path = vec![false; adj.len()];
    on_path[src] = true;
    let mut u = src;
    while u != dst {
        let slack = COST_TOL * dist_to_dst[u].abs().max(1.0);
        let next = adj[u]
            .iter()
            .filter(|&&(w, c)| {
                !on_path[w] && edge_weight(metric, c) + dist_to_dst[w] <= dist_to_dst[u] + slack
            })
            .map(|&(w, _)| w)
            .min_by(|&a, &b| instance.node_id(a).cmp(instance.node_id(b)))?;
        on_path[next] = true;
        path.push(next);
        u = next;
    }
    Some(path)
}

/// Fills every flow's path with a shortest path under `metric`.
pub fn compute_paths(instance: &Instance, metric: PathMetric) -> Result<Instance> {
    fill_paths(instance, metric, true)
}

/// Like [`compute_paths`] but keeps paths that were given explicitly.
pub fn compute_missing_paths(instance: &Instance, metric: PathMetric) -> Result<Instance> {
    if instance.has_paths() {
        return Ok(instance.clone());
    }
    fill_paths(instance, metric, false)
}

fn fill_paths(instance: &Instance, metric: PathMetric, overwrite: bool) -> Result<Instance> {
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; instance.num_nodes()];
    let mut paths = Vec::with_capacity(instance.num_flows());
    for (f, flow) in instance.flows().iter().enumerate() {
        if !overwrite {
            if let Some(p) = instance.path(f) {
                paths.push(p.to_vec());
                continue;
            }
        }
        let src = instance.node_index(&flow.src)?;
        let dst = instance.node_index(&flow.dst)?;
        let dist = cache[dst].get_or_insert_with(|| distances_to(instance, dst, metric));
        let p = shortest_path(instance, src, dst, metric, dist)
            .ok_or_else(|| Error::UnreachablePair(flow.id.clone()))?;
        paths.push(p);
    }
    instance.with_paths(paths)
}

/// Total cost of a node path under `metric` (the cheapest parallel link per hop).
pub fn path_cost(instance: &Instance, path: &[usize], metric: PathMetric) -> f64 {
    path.windows(2)
        .map(|w| {
            instance.adjacency()[w[0]]
                .iter()
                .filter(|&&(n, _)| n == w[1])
                .map(|&(_, c)| edge_weight(metric, c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}
