//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the code under test except to build
//! instances.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nfvplace::lp::LinearProgram;
use nfvplace::model::{Edge, Flow, InstanceData, NetworkFunction, Node};
use nfvplace::rng::SplitMix64;
use nfvplace::Instance;

// ---------------------------------------------------------------------------
// Random instances

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_nodes: usize,
    pub max_flows: usize,
    pub max_resources: usize,
    pub max_path_len: usize,
}

pub const SMALL: Shape = Shape {
    max_nodes: 6,
    max_flows: 10,
    max_resources: 2,
    max_path_len: 4,
};

/// A random connected graph with random simple paths (random walks that
/// never revisit a node), random demands, rates and capacities.
pub fn random_instance(seed: u64, shape: Shape) -> Instance {
    let mut rng = SplitMix64::new(seed);
    let n = 2 + rng.below((shape.max_nodes - 1) as u64) as usize;
    let num_flows = 1 + rng.below(shape.max_flows as u64) as usize;
    let num_res = 1 + rng.below(shape.max_resources as u64) as usize;
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let resources: Vec<String> = (1..=num_res).map(|r| format!("r{r}")).collect();

    let mut adj = vec![BTreeSet::new(); n];
    for i in 1..n {
        let j = rng.below(i as u64) as usize;
        adj[i].insert(j);
        adj[j].insert(i);
    }
    for _ in 0..n {
        let a = rng.below(n as u64) as usize;
        let b = rng.below(n as u64) as usize;
        if a != b {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for &b in &adj[a] {
            if a < b {
                edges.push(Edge {
                    u: names[a].clone(),
                    v: names[b].clone(),
                    cost: 1.0,
                });
            }
        }
    }

    let per_res = |rng: &mut SplitMix64, lo: f64, hi: f64| -> BTreeMap<String, f64> {
        resources.iter().map(|r| (r.clone(), rng.uniform(lo, hi))).collect()
    };
    let nodes = names
        .iter()
        .map(|id| Node {
            id: id.clone(),
            capacity: per_res(&mut rng, 1.0, 10.0),
        })
        .collect();
    let mut functions = Vec::new();
    let mut flows = Vec::new();
    for f in 0..num_flows {
        let len = 1 + rng.below(shape.max_path_len as u64) as usize;
        let mut path = vec![rng.below(n as u64) as usize];
        while path.len() < len {
            let last = *path.last().unwrap();
            let options: Vec<usize> = adj[last].iter().copied().filter(|v| !path.contains(v)).collect();
            if options.is_empty() {
                break;
            }
            path.push(options[rng.below(options.len() as u64) as usize]);
        }
        let fid = format!("f{f}");
        functions.push(NetworkFunction {
            id: format!("phi{f}"),
            beta: per_res(&mut rng, 0.0, 5.0),
        });
        flows.push(Flow {
            id: fid,
            src: names[path[0]].clone(),
            dst: names[*path.last().unwrap()].clone(),
            rate: rng.uniform(0.1, 3.0),
            functions: vec![format!("phi{f}")],
            path: Some(path.iter().map(|&v| names[v].clone()).collect()),
        });
    }
    Instance::new(InstanceData {
        resources,
        nodes,
        edges,
        functions,
        flows,
    })
    .expect("generated instance is valid")
}

/// A random sequence of distinct nodes of length `len` (capped at |V|).
pub fn random_sequence(rng: &mut SplitMix64, n: usize, len: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    while out.len() < len && !pool.is_empty() {
        let i = rng.below(pool.len() as u64) as usize;
        out.push(pool.swap_remove(i));
    }
    out
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// LP oracle: vertex enumeration

/// Rows `g·x ≤ h` describing the feasible region, including bounds.
fn as_inequalities(lp: &LinearProgram) -> Vec<(Vec<f64>, f64)> {
    let n = lp.num_vars;
    let mut rows = Vec::new();
    for c in &lp.leq {
        rows.push((c.coeffs.clone(), c.rhs));
    }
    for c in &lp.eq {
        rows.push((c.coeffs.clone(), c.rhs));
        rows.push((c.coeffs.iter().map(|a| -a).collect(), -c.rhs));
    }
    for j in 0..n {
        let mut unit = vec![0.0; n];
        unit[j] = -1.0;
        rows.push((unit, -lp.lower[j]));
        if let Some(u) = lp.upper[j] {
            let mut unit = vec![0.0; n];
            unit[j] = 1.0;
            rows.push((unit, u));
        }
    }
    rows
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` if (numerically) singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..n {
            if row != col {
                let factor = a[row][col] / a[col][col];
                if factor != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                        *x -= factor * p;
                    }
                    b[row] -= factor * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Maximum of the objective over the vertices of a bounded LP; `None` when
/// no vertex is feasible (infeasible program).
pub fn vertex_enumeration(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars;
    if n == 0 {
        let feasible = lp.leq.iter().all(|c| c.rhs >= -1e-9) && lp.eq.iter().all(|c| c.rhs.abs() <= 1e-9);
        return feasible.then_some(0.0);
    }
    let rows = as_inequalities(lp);
    let mut best: Option<f64> = None;
    for active in combinations(rows.len(), n) {
        let a = active.iter().map(|&i| rows[i].0.clone()).collect();
        let b = active.iter().map(|&i| rows[i].1).collect();
        let Some(x) = solve_square(a, b) else { continue };
        let feasible = rows
            .iter()
            .all(|(g, h)| g.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= h + 1e-8);
        if feasible {
            let val: f64 = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = Some(best.map_or(val, |b: f64| b.max(val)));
        }
    }
    best
}

/// A random bounded LP with `n ≤ 6` variables and at most 6 constraints, one
/// of which is `Σ x ≤ B` so every feasible region is bounded.
pub fn random_lp(rng: &mut SplitMix64) -> LinearProgram {
    let n = 1 + rng.below(6) as usize;
    let m = 1 + rng.below(5) as usize;
    let coef = |rng: &mut SplitMix64| {
        if rng.below(4) == 0 {
            0.0
        } else {
            (rng.uniform(-5.0, 5.0) * 4.0).round() / 4.0
        }
    };
    let objective = (0..n).map(|_| coef(rng)).collect();
    let mut lp = LinearProgram::new(n).maximize(objective);
    lp.add_leq(vec![1.0; n], rng.uniform(1.0, 20.0));
    for _ in 0..m {
        let row: Vec<f64> = (0..n).map(|_| coef(rng)).collect();
        let rhs = (rng.uniform(-3.0, 10.0) * 2.0).round() / 2.0;
        if rng.below(5) == 0 {
            lp.add_eq(row, rhs);
        } else {
            lp.add_leq(row, rhs);
        }
    }
    lp
}

// ---------------------------------------------------------------------------
// Shortest paths: Bellman-Ford

/// All distances from `src` with every link usable in both directions.
pub fn bellman_ford(instance: &Instance, src: usize, hops: bool) -> Vec<f64> {
    let n = instance.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    dist[src] = 0.0;
    for _ in 0..n {
        for e in instance.edges() {
            let u = instance.node_index(&e.u).unwrap();
            let v = instance.node_index(&e.v).unwrap();
            let w = if hops { 1.0 } else { e.cost };
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
            }
            if dist[v] + w < dist[u] {
                dist[u] = dist[v] + w;
            }
        }
    }
    dist
}

// ---------------------------------------------------------------------------
// Integral allocation oracles

/// Best total rate over all whole-flow assignments (each flow on at most one
/// node of its path inside `set`) that respect capacities.
pub fn best_whole_flow_assignment(instance: &Instance, set: &BTreeSet<usize>) -> f64 {
    let flows: Vec<(usize, Vec<usize>)> = (0..instance.num_flows())
        .map(|f| {
            let opts = instance.path(f).unwrap().iter().copied().filter(|v| set.contains(v)).collect();
            (f, opts)
        })
        .filter(|(_, opts): &(usize, Vec<usize>)| !opts.is_empty())
        .collect();
    let mut load = vec![vec![0.0; instance.num_resources()]; instance.num_nodes()];
    fn rec(instance: &Instance, flows: &[(usize, Vec<usize>)], i: usize, load: &mut Vec<Vec<f64>>, acc: f64, best: &mut f64) {
        if i == flows.len() {
            *best = best.max(acc);
            return;
        }
        let remaining: f64 = flows[i..].iter().map(|(f, _)| instance.rate(*f)).sum();
        if acc + remaining <= *best {
            return;
        }
        let (f, opts) = &flows[i];
        let need: Vec<f64> = instance.demand(*f).iter().map(|d| d * instance.rate(*f)).collect();
        for &v in opts {
            let fits = (0..need.len()).all(|r| load[v][r] + need[r] <= instance.capacity(v)[r] + 1e-9);
            if fits {
                for r in 0..need.len() {
                    load[v][r] += need[r];
                }
                rec(instance, flows, i + 1, load, acc + instance.rate(*f), best);
                for r in 0..need.len() {
                    load[v][r] -= need[r];
                }
            }
        }
        rec(instance, flows, i + 1, load, acc, best);
    }
    let mut best = 0.0;
    rec(instance, &flows, 0, &mut load, 0.0, &mut best);
    best
}

/// Straight-from-the-pseudocode simulation of the global primal-dual
/// allocator, keyed by string ids: returns `flow id → node id`.
pub fn simulate_pra(instance: &Instance, set: &[usize]) -> BTreeMap<String, String> {
    let nr = instance.num_resources();
    let d_max = (0..instance.num_flows())
        .flat_map(|f| instance.demand(f).iter().map(move |d| d * instance.rate(f)))
        .fold(0.0, f64::max);
    let cbar = |v: usize, r: usize| instance.capacity(v)[r] / d_max;
    let d = |f: usize, r: usize| instance.demand(f)[r] * instance.rate(f) / d_max;
    let z = set.iter().flat_map(|&v| (0..nr).map(move |r| cbar(v, r))).fold(f64::INFINITY, f64::min);
    let base = (z - 1.0).exp() * nr as f64 * set.len() as f64;
    let mut b: BTreeMap<String, Vec<f64>> = set
        .iter()
        .map(|&v| (instance.node_id(v).to_string(), (0..nr).map(|r| 1.0 / cbar(v, r)).collect()))
        .collect();
    let mut residual: BTreeMap<String, Vec<f64>> = set
        .iter()
        .map(|&v| (instance.node_id(v).to_string(), instance.capacity(v).to_vec()))
        .collect();
    let mut out = BTreeMap::new();
    let mut pending: BTreeMap<String, usize> = BTreeMap::new();
    for f in 0..instance.num_flows() {
        let on: Vec<usize> = instance.path(f).unwrap().iter().copied().filter(|v| set.contains(v)).collect();
        if on.is_empty() {
            continue;
        }
        if instance.demand(f).iter().all(|&x| x == 0.0) {
            out.insert(instance.flow_id(f).to_string(), instance.node_id(on[0]).to_string());
        } else {
            pending.insert(instance.flow_id(f).to_string(), f);
        }
    }
    let mut banned: BTreeSet<(String, String)> = BTreeSet::new();
    loop {
        let priced: f64 = set
            .iter()
            .map(|&v| {
                let id = instance.node_id(v);
                (0..nr).map(|r| cbar(v, r) * b[id][r]).sum::<f64>()
            })
            .sum();
        if priced >= base || pending.is_empty() {
            break;
        }
        let mut best: Option<(String, String, f64)> = None;
        let mut drop = Vec::new();
        for (fid, &f) in &pending {
            let mut cheapest: Option<(String, f64)> = None;
            let mut nodes: Vec<&str> = instance
                .path(f)
                .unwrap()
                .iter()
                .filter(|v| set.contains(v))
                .map(|&v| instance.node_id(v))
                .collect();
            nodes.sort();
            for vid in nodes {
                if banned.contains(&(fid.clone(), vid.to_string())) {
                    continue;
                }
                let s: f64 = b[vid].iter().sum();
                if cheapest.as_ref().is_none_or(|c| s < c.1) {
                    cheapest = Some((vid.to_string(), s));
                }
            }
            let Some((vid, _)) = cheapest else {
                drop.push(fid.clone());
                continue;
            };
            let cost: f64 = (0..nr).map(|r| d(f, r) * b[&vid][r]).sum();
            let ratio = instance.rate(f) / cost;
            if best.as_ref().is_none_or(|bb| ratio > bb.2) {
                best = Some((fid.clone(), vid, ratio));
            }
        }
        for fid in drop {
            pending.remove(&fid);
        }
        let Some((fid, vid, _)) = best else { break };
        let f = pending[&fid];
        let v = instance.node_index(&vid).unwrap();
        let fits = (0..nr).all(|r| {
            instance.demand(f)[r] * instance.rate(f) <= residual[&vid][r] + 1e-12 * instance.capacity(v)[r].max(1.0)
        });
        if !fits {
            banned.insert((fid, vid));
            continue;
        }
        for r in 0..nr {
            residual.get_mut(&vid).unwrap()[r] -= instance.demand(f)[r] * instance.rate(f);
            b.get_mut(&vid).unwrap()[r] *= base.powf(d(f, r) / (cbar(v, r) - 1.0));
        }
        pending.remove(&fid);
        out.insert(fid, vid);
    }
    out
}

/// Straight-from-the-pseudocode simulation of the node-by-node allocator.
pub fn simulate_nra(instance: &Instance, order: &[usize]) -> BTreeMap<String, String> {
    let nr = instance.num_resources();
    let d_max = (0..instance.num_flows())
        .flat_map(|f| instance.demand(f).iter().map(move |d| d * instance.rate(f)))
        .fold(0.0, f64::max);
    let cbar = |v: usize, r: usize| instance.capacity(v)[r] / d_max;
    let d = |f: usize, r: usize| instance.demand(f)[r] * instance.rate(f) / d_max;
    let z = order.iter().flat_map(|&v| (0..nr).map(move |r| cbar(v, r))).fold(f64::INFINITY, f64::min);
    let base = (z - 1.0).exp() * nr as f64;
    let mut out = BTreeMap::new();
    let mut pending: BTreeMap<String, usize> = BTreeMap::new();
    for f in 0..instance.num_flows() {
        let first = instance.path(f).unwrap().iter().copied().find(|v| order.contains(v));
        let Some(v0) = first else { continue };
        if instance.demand(f).iter().all(|&x| x == 0.0) {
            out.insert(instance.flow_id(f).to_string(), instance.node_id(v0).to_string());
        } else {
            pending.insert(instance.flow_id(f).to_string(), f);
        }
    }
    for &v in order {
        let vid = instance.node_id(v).to_string();
        let mut b: Vec<f64> = (0..nr).map(|r| 1.0 / cbar(v, r)).collect();
        let mut residual = instance.capacity(v).to_vec();
        let mut candidates: BTreeMap<String, usize> = pending
            .iter()
            .filter(|(_, &f)| instance.path(f).unwrap().contains(&v))
            .map(|(k, &f)| (k.clone(), f))
            .collect();
        loop {
            let priced: f64 = (0..nr).map(|r| cbar(v, r) * b[r]).sum();
            if priced >= base || candidates.is_empty() {
                break;
            }
            let mut best: Option<(String, f64)> = None;
            for (fid, &f) in &candidates {
                let cost: f64 = (0..nr).map(|r| d(f, r) * b[r]).sum();
                let ratio = instance.rate(f) / cost;
                if best.as_ref().is_none_or(|bb| ratio > bb.1) {
                    best = Some((fid.clone(), ratio));
                }
            }
            let (fid, _) = best.unwrap();
            let f = candidates.remove(&fid).unwrap();
            let fits = (0..nr).all(|r| {
                instance.demand(f)[r] * instance.rate(f) <= residual[r] + 1e-12 * instance.capacity(v)[r].max(1.0)
            });
            if !fits {
                continue;
            }
            for r in 0..nr {
                residual[r] -= instance.demand(f)[r] * instance.rate(f);
                b[r] *= base.powf(d(f, r) / (cbar(v, r) - 1.0));
            }
            pending.remove(&fid);
            out.insert(fid, vid.clone());
        }
    }
    out
}
