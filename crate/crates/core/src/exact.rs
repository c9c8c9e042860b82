//! Exhaustive-search baselines for small instances.
//!
//! [`optimal_allocation_exact`] serves the largest-rate subset of flows that
//! fits on a fixed node set; [`optimal_exact`] also chooses the node set.
//! Flow subsets are tried in decreasing total rate, so the first one that an
//! LP proves feasible is optimal. [`optimal_sequence_r4`] enumerates node
//! sequences for the sequential allocation value.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fractional::{full_fractional_allocation, AssignmentMatrix, NodeSequence, NodeSet, SequentialAllocator};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::model::Instance;

pub const MAX_NODES: usize = 12;
pub const MAX_FLOWS: usize = 14;
pub const MAX_SEQUENCES: u64 = 100_000;

/// Slack on upper bounds when pruning, so that LP round-off never prunes an
/// optimal candidate.
const BOUND_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub best_set: NodeSet,
    pub served_flows: BTreeSet<usize>,
    /// Total rate of the served flows.
    pub value: f64,
    /// Number of feasibility LPs solved.
    pub explored: usize,
    /// Assignment serving every served flow in full within capacities.
    pub certificate: AssignmentMatrix,
}

impl ExactResult {
    fn empty(set: NodeSet) -> Self {
        ExactResult {
            best_set: set,
            served_flows: BTreeSet::new(),
            value: 0.0,
            explored: 0,
            certificate: AssignmentMatrix::new(),
        }
    }
}

fn check_size(instance: &Instance) -> Result<()> {
    if instance.num_nodes() > MAX_NODES || instance.num_flows() > MAX_FLOWS {
        return Err(Error::TooLarge(format!(
            "{} nodes and {} flows (limits {MAX_NODES} and {MAX_FLOWS})",
            instance.num_nodes(),
            instance.num_flows()
        )));
    }
    instance.ensure_paths()
}

/// Solves the zero-objective LP that serves every flow of `flows` in full on
/// the nodes of `set`; returns the assignment if one exists.
pub fn serve_all(instance: &Instance, set: &NodeSet, flows: &[usize]) -> Result<Option<AssignmentMatrix>> {
    let mut vars = Vec::new();
    for &f in flows {
        for &v in instance.require_path(f)? {
            if set.contains(v) {
                vars.push((f, v));
            }
        }
    }
    let mut lp = LinearProgram::new(vars.len());
    for &f in flows {
        let terms: Vec<_> = (0..vars.len()).filter(|&k| vars[k].0 == f).map(|k| (k, 1.0)).collect();
        if terms.is_empty() {
            return Ok(None);
        }
        lp.add_eq_sparse(&terms, instance.rate(f));
    }
    for v in set.iter() {
        for (r, &cap) in instance.capacity(v).iter().enumerate() {
            let terms: Vec<_> = (0..vars.len())
                .filter(|&k| vars[k].1 == v)
                .map(|k| (k, instance.demand(vars[k].0)[r]))
                .collect();
            if !terms.is_empty() {
                lp.add_leq_sparse(&terms, cap);
            }
        }
    }
    let sol = lp::solve(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => {
            let mut x = AssignmentMatrix::new();
            for (k, &(f, v)) in vars.iter().enumerate() {
                x.add(f, v, sol.values[k]);
            }
            Some(x)
        }
        LpStatus::Infeasible => None,
        LpStatus::Unbounded => return Err(Error::UnexpectedLpStatus("unbounded")),
    })
}

/// Best flow subset on `set` whose total rate exceeds `floor` and stays within
/// `ceiling`; `None` if no such subset is feasible.
fn best_subset(
    instance: &Instance,
    set: &NodeSet,
    floor: f64,
    ceiling: f64,
    explored: &mut usize,
) -> Result<Option<(Vec<usize>, f64, AssignmentMatrix)>> {
    let covered = instance.covered_flows(&set.0);
    let mut subsets: Vec<(u32, f64)> = (1u32..(1 << covered.len()))
        .map(|mask| {
            let total = covered
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &f)| instance.rate(f))
                .sum();
            (mask, total)
        })
        .filter(|&(_, total)| total > floor && total <= ceiling)
        .collect();
    subsets.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (mask, total) in subsets {
        let flows: Vec<usize> = covered
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &f)| f)
            .collect();
        *explored += 1;
        if let Some(x) = serve_all(instance, set, &flows)? {
            return Ok(Some((flows, total, x)));
        }
    }
    Ok(None)
}

/// Largest total rate of fully served flows on the fixed node set `set`.
pub fn optimal_allocation_exact(instance: &Instance, set: &NodeSet) -> Result<ExactResult> {
    check_size(instance)?;
    let mut out = ExactResult::empty(set.clone());
    if let Some((flows, value, x)) = best_subset(instance, set, 0.0, f64::INFINITY, &mut out.explored)? {
        out.served_flows = flows.into_iter().collect();
        out.value = value;
        out.certificate = x;
    }
    Ok(out)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Best placement of at most `k` nodes together with its best allocation.
///
/// More nodes never hurt, so only sets of size `min(k, |V|)` are searched.
/// Sets are visited in decreasing order of their fractional value, which
/// bounds what they can serve; the search stops once that bound cannot beat
/// the best value found.
pub fn optimal_exact(instance: &Instance, k: usize) -> Result<ExactResult> {
    check_size(instance)?;
    let size = k.min(instance.num_nodes());
    if size == 0 {
        return Ok(ExactResult::empty(NodeSet::default()));
    }
    let mut candidates = subsets_of_size(instance.num_nodes(), size)
        .into_par_iter()
        .map(|nodes| {
            let set = NodeSet::new(nodes);
            full_fractional_allocation(instance, &set).map(|(bound, _)| (set, bound))
        })
        .collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0 .0.cmp(&b.0 .0)));

    let mut best = ExactResult::empty(candidates[0].0.clone());
    let mut explored = 0;
    for (set, bound) in candidates {
        let ceiling = bound + BOUND_TOL * bound.max(1.0);
        if ceiling <= best.value {
            break;
        }
        if let Some((flows, value, x)) = best_subset(instance, &set, best.value, ceiling, &mut explored)? {
            best = ExactResult {
                best_set: set,
                served_flows: flows.into_iter().collect(),
                value,
                explored: 0,
                certificate: x,
            };
        }
    }
    best.explored = explored;
    Ok(best)
}

fn count_sequences(n: usize, k: usize) -> u64 {
    let mut total = 0u64;
    let mut perms = 1u64;
    for j in 0..k.min(n) {
        perms = perms.saturating_mul((n - j) as u64);
        total = total.saturating_add(perms);
    }
    total
}

/// Best sequential allocation value over all node sequences of length at
/// most `k`. Ties keep the sequence that comes first in lexicographic order
/// of node indices.
pub fn optimal_sequence_r4(instance: &Instance, k: usize) -> Result<(NodeSequence, f64)> {
    let count = count_sequences(instance.num_nodes(), k);
    if count > MAX_SEQUENCES {
        return Err(Error::TooLarge(format!(
            "{count} sequences of length at most {k} (limit {MAX_SEQUENCES})"
        )));
    }
    let root = SequentialAllocator::new(instance)?;
    if k == 0 {
        return Ok((NodeSequence::default(), 0.0));
    }

    fn dfs(alloc: &SequentialAllocator<'_>, k: usize, best: &mut (NodeSequence, f64)) -> Result<()> {
        if alloc.value() > best.1 {
            *best = (alloc.sequence().clone(), alloc.value());
        }
        if alloc.sequence().len() == k {
            return Ok(());
        }
        for v in 0..alloc.instance().num_nodes() {
            if alloc.sequence().contains(v) {
                continue;
            }
            let mut next = alloc.clone();
            next.push(v)?;
            dfs(&next, k, best)?;
        }
        Ok(())
    }

    let branches = (0..instance.num_nodes())
        .into_par_iter()
        .map(|v| {
            let mut alloc = root.clone();
            alloc.push(v)?;
            let mut best = (alloc.sequence().clone(), alloc.value());
            dfs(&alloc, k, &mut best)?;
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(branches
        .into_iter()
        .fold((NodeSequence::default(), 0.0), |best, b| if b.1 > best.1 { b } else { best }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{backward_bound_instance, line_instance};

    const TOL: f64 = 1e-6;

    #[test]
    fn budget_zero() {
        let inst = backward_bound_instance();
        assert_eq!(optimal_exact(&inst, 0).unwrap().value, 0.0);
        assert_eq!(optimal_sequence_r4(&inst, 0).unwrap().1, 0.0);
    }

    #[test]
    fn fixture_budget_two() {
        let inst = backward_bound_instance();
        let r = optimal_exact(&inst, 2).unwrap();
        assert_eq!(r.best_set.ids(&inst), ["v2", "v3"]);
        assert!((r.value - 2.03).abs() < TOL);
        assert_eq!(r.served_flows.len(), 3);
        r.certificate.validate(&inst, &inst.rates(), crate::EPS_FEAS).unwrap();
        assert!(r.explored >= 1);
    }

    #[test]
    fn fixture_fixed_sets() {
        let inst = backward_bound_instance();
        assert_eq!(optimal_allocation_exact(&inst, &NodeSet::default()).unwrap().value, 0.0);
        let v2 = optimal_allocation_exact(&inst, &NodeSet::from_ids(&inst, &["v2"]).unwrap()).unwrap();
        assert!((v2.value - 1.02).abs() < TOL);
        assert_eq!(v2.served_flows, BTreeSet::from([0, 1]));
        let all = optimal_allocation_exact(&inst, &NodeSet::all(&inst)).unwrap();
        assert!((all.value - 2.03).abs() < TOL);
    }

    #[test]
    fn zero_capacity() {
        let inst = line_instance(
            &[("a", &[0.0]), ("b", &[0.0])],
            &[("f", &["a", "b"], 1.0, &[1.0])],
        );
        assert_eq!(optimal_exact(&inst, 2).unwrap().value, 0.0);
    }

    #[test]
    fn sequence_search_on_fixture() {
        let inst = backward_bound_instance();
        let (s, v) = optimal_sequence_r4(&inst, 1).unwrap();
        assert_eq!(s.ids(&inst), ["v2"]);
        assert!((v - 1.02).abs() < TOL);
        let (s, v) = optimal_sequence_r4(&inst, 2).unwrap();
        assert_eq!(s.ids(&inst), ["v2", "v3"]);
        assert!((v - 2.03).abs() < TOL);
        // (v1, v3, v2) ties with (v2, v3, v1); only (v1, v2, v3) falls to 1.03
        let (s, v) = optimal_sequence_r4(&inst, 3).unwrap();
        assert!((v - 2.03).abs() < TOL);
        assert_ne!(s.ids(&inst), ["v1", "v2", "v3"]);
    }

    #[test]
    fn guards() {
        let nodes: Vec<(String, Vec<f64>)> = (0..13).map(|i| (format!("n{i:02}"), vec![1.0])).collect();
        let node_refs: Vec<(&str, &[f64])> = nodes.iter().map(|(id, c)| (id.as_str(), c.as_slice())).collect();
        let inst = line_instance(&node_refs, &[("f", &["n00"], 1.0, &[1.0])]);
        assert!(matches!(optimal_exact(&inst, 1), Err(Error::TooLarge(_))));
        assert!(matches!(optimal_sequence_r4(&inst, 5), Err(Error::TooLarge(_))));
        assert!(optimal_sequence_r4(&inst, 2).is_ok());
    }

    #[test]
    fn sequence_counts() {
        assert_eq!(count_sequences(3, 2), 9);
        assert_eq!(count_sequences(3, 3), 15);
        assert_eq!(count_sequences(3, 7), 15);
    }
}
