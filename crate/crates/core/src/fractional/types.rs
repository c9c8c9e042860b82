use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::Instance;

/// An ordered selection of distinct nodes (by index).
///
/// Construction drops later repeats of a node, so `(a, b, a, c)` becomes
/// `(a, b, c)`; the sequential allocation value is defined that way.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NodeSequence(Vec<usize>);

impl NodeSequence {
    pub fn new(nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut seq = NodeSequence::default();
        for v in nodes {
            seq.push(v);
        }
        seq
    }

    pub fn from_ids(instance: &Instance, ids: &[&str]) -> Result<Self> {
        ids.iter()
            .map(|id| instance.node_index(id))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// Appends `v` unless it is already present; returns whether it was added.
    pub fn push(&mut self, v: usize) -> bool {
        if self.0.contains(&v) {
            false
        } else {
            self.0.push(v);
            true
        }
    }

    /// `self ⊕ other` with repeats removed.
    pub fn concat(&self, other: &NodeSequence) -> NodeSequence {
        NodeSequence::new(self.0.iter().chain(&other.0).copied())
    }

    pub fn is_prefix_of(&self, other: &NodeSequence) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefix(&self, len: usize) -> NodeSequence {
        NodeSequence(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_set(&self) -> NodeSet {
        NodeSet(self.0.iter().copied().collect())
    }

    pub fn ids<'a>(&self, instance: &'a Instance) -> Vec<&'a str> {
        self.0.iter().map(|&v| instance.node_id(v)).collect()
    }
}

impl FromIterator<usize> for NodeSequence {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSequence::new(iter)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NodeSet(pub BTreeSet<usize>);

impl NodeSet {
    pub fn new(nodes: impl IntoIterator<Item = usize>) -> Self {
        NodeSet(nodes.into_iter().collect())
    }

    pub fn from_ids(instance: &Instance, ids: &[&str]) -> Result<Self> {
        ids.iter()
            .map(|id| instance.node_index(id))
            .collect::<Result<BTreeSet<_>>>()
            .map(NodeSet)
    }

    pub fn all(instance: &Instance) -> Self {
        NodeSet((0..instance.num_nodes()).collect())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn with(&self, v: usize) -> NodeSet {
        let mut s = self.clone();
        s.0.insert(v);
        s
    }

    pub fn ids<'a>(&self, instance: &'a Instance) -> Vec<&'a str> {
        self.0.iter().map(|&v| instance.node_id(v)).collect()
    }
}

/// Traffic of flow `f` handled at node `v`, stored sparsely as `(f, v) → x`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssignmentMatrix {
    entries: BTreeMap<(usize, usize), f64>,
}

impl AssignmentMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `x` for `(flow, node)`; non-positive amounts clear the entry.
    pub fn set(&mut self, flow: usize, node: usize, x: f64) {
        if x > 0.0 {
            self.entries.insert((flow, node), x);
        } else {
            self.entries.remove(&(flow, node));
        }
    }

    pub fn add(&mut self, flow: usize, node: usize, x: f64) {
        let cur = self.get(flow, node);
        self.set(flow, node, cur + x);
    }

    pub fn get(&self, flow: usize, node: usize) -> f64 {
        self.entries.get(&(flow, node)).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(f, v), &x)| (f, v, x))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn flow_total(&self, flow: usize) -> f64 {
        self.entries
            .range((flow, 0)..=(flow, usize::MAX))
            .map(|(_, x)| x)
            .sum()
    }

    /// Per-flow totals `x̂_f`, indexed by flow.
    pub fn flow_totals(&self, num_flows: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_flows];
        for (&(f, _), x) in &self.entries {
            out[f] += x;
        }
        out
    }

    pub fn node_total(&self, node: usize) -> f64 {
        self.entries
            .iter()
            .filter(|((_, v), _)| *v == node)
            .map(|(_, x)| x)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Resource `r` consumed at node `v`.
    pub fn load(&self, instance: &Instance, node: usize, resource: usize) -> f64 {
        self.entries
            .iter()
            .filter(|((_, v), _)| *v == node)
            .map(|(&(f, _), x)| instance.demand(f)[resource] * x)
            .sum()
    }

    /// Checks the allocation invariants against `rates`: traffic only on path
    /// nodes, per-flow totals within the rate, per-node loads within capacity.
    pub fn validate(&self, instance: &Instance, rates: &[f64], tol: f64) -> Result<()> {
        for (&(f, v), &x) in &self.entries {
            if x < 0.0 {
                return Err(Error::Validation(format!("negative assignment for flow {f}")));
            }
            if !instance.require_path(f)?.contains(&v) {
                return Err(Error::Validation(format!(
                    "flow `{}` assigned to off-path node `{}`",
                    instance.flow_id(f),
                    instance.node_id(v)
                )));
            }
        }
        for (f, total) in self.flow_totals(instance.num_flows()).into_iter().enumerate() {
            if total > rates[f] + tol * rates[f].max(1.0) {
                return Err(Error::Validation(format!(
                    "flow `{}` assigned {total} > rate {}",
                    instance.flow_id(f),
                    rates[f]
                )));
            }
        }
        let nodes: BTreeSet<usize> = self.entries.keys().map(|&(_, v)| v).collect();
        for v in nodes {
            for (r, &cap) in instance.capacity(v).iter().enumerate() {
                let load = self.load(instance, v, r);
                if load > cap + tol * cap.max(1.0) {
                    return Err(Error::Validation(format!(
                        "node `{}` resource `{}` load {load} exceeds {cap}",
                        instance.node_id(v),
                        instance.resources()[r]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_drops_repeats() {
        let s = NodeSequence::new([2, 0, 2, 1, 0]);
        assert_eq!(s.as_slice(), [2, 0, 1]);
        let t = NodeSequence::new([1, 3]);
        assert_eq!(s.concat(&t).as_slice(), [2, 0, 1, 3]);
        assert!(s.prefix(2).is_prefix_of(&s));
        assert!(!t.is_prefix_of(&s));
        assert_eq!(s.to_set(), NodeSet::new([0, 1, 2]));
    }

    #[test]
    fn assignment_totals() {
        let mut x = AssignmentMatrix::new();
        x.set(0, 1, 0.5);
        x.set(0, 2, 0.25);
        x.set(1, 2, 1.0);
        x.set(2, 0, 0.0);
        assert_eq!(x.flow_total(0), 0.75);
        assert_eq!(x.node_total(2), 1.25);
        assert_eq!(x.flow_totals(3), vec![0.75, 1.0, 0.0]);
        assert_eq!(x.total(), 1.75);
        assert_eq!(x.entries().count(), 3);
    }
}
