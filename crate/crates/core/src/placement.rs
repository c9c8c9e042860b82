//! Greedy VNF-node placement.
//!
//! [`ssg`] grows a node sequence, each time appending the node with the
//! largest gain in the sequential allocation value. [`sg`] is the same loop
//! over the joint allocation value of a node set; that objective is not known
//! to be submodular, so its result carries no guarantee.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fractional::{full_fractional_allocation, NodeSequence, NodeSet, SequentialAllocator};
use crate::model::Instance;

/// Marginals at or below this are treated as zero; marginals within this of
/// the best are treated as ties (smallest node id wins).
pub const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementObjective {
    /// Sequential allocation value; greedy is within ½(1 − 1/e) of optimal.
    Sequence,
    /// Joint allocation value; heuristic.
    SetHeuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementResult {
    pub sequence: NodeSequence,
    pub set: NodeSet,
    pub value: f64,
    /// Gain of the node chosen at each iteration.
    pub marginals: Vec<f64>,
    pub objective: PlacementObjective,
}

impl PlacementResult {
    /// The first `k` picks. Greedy choices never depend on the budget, so this
    /// equals a fresh run with budget `k`.
    pub fn truncated(&self, k: usize) -> PlacementResult {
        let k = k.min(self.sequence.len());
        let sequence = self.sequence.prefix(k);
        let marginals = self.marginals[..k].to_vec();
        PlacementResult {
            set: sequence.to_set(),
            value: match self.objective {
                PlacementObjective::Sequence => marginals.iter().sum(),
                PlacementObjective::SetHeuristic => marginals.iter().sum(),
            },
            sequence,
            marginals,
            objective: self.objective,
        }
    }
}

/// Picks the node to add given `(node, marginal)` pairs of unselected nodes.
fn select(instance: &Instance, scored: &[(usize, f64)]) -> (usize, f64) {
    let by_id = |a: &&(usize, f64), b: &&(usize, f64)| instance.node_id(a.0).cmp(instance.node_id(b.0));
    let best = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let pick = if best <= TIE_EPS {
        scored.iter().min_by(by_id)
    } else {
        scored.iter().filter(|s| s.1 >= best - TIE_EPS).min_by(by_id)
    };
    *pick.expect("at least one candidate")
}

fn check_budget(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("budget k must be at least 1".into()));
    }
    Ok(())
}

/// Sequence submodular greedy over the sequential allocation value.
pub fn ssg(instance: &Instance, k: usize) -> Result<PlacementResult> {
    check_budget(k)?;
    let mut alloc = SequentialAllocator::new(instance)?;
    let mut marginals = Vec::new();
    let steps = k.min(instance.num_nodes());
    for _ in 0..steps {
        let candidates: Vec<usize> = (0..instance.num_nodes())
            .filter(|&v| !alloc.sequence().contains(v))
            .collect();
        let scored = candidates
            .par_iter()
            .map(|&v| alloc.marginal(v).map(|m| (v, m)))
            .collect::<Result<Vec<_>>>()?;
        let (v, _) = select(instance, &scored);
        marginals.push(alloc.push(v)?);
    }
    let sequence = alloc.sequence().clone();
    Ok(PlacementResult {
        set: sequence.to_set(),
        value: alloc.value(),
        sequence,
        marginals,
        objective: PlacementObjective::Sequence,
    })
}

/// Greedy over the joint allocation value `R3(U)` (heuristic).
pub fn sg(instance: &Instance, k: usize) -> Result<PlacementResult> {
    check_budget(k)?;
    instance.ensure_paths()?;
    let mut sequence = NodeSequence::default();
    let mut set = NodeSet::default();
    let mut value = 0.0;
    let mut marginals = Vec::new();
    let steps = k.min(instance.num_nodes());
    for _ in 0..steps {
        let candidates: Vec<usize> = (0..instance.num_nodes())
            .filter(|&v| !set.contains(v))
            .collect();
        let scored = candidates
            .par_iter()
            .map(|&v| full_fractional_allocation(instance, &set.with(v)).map(|(r3, _)| (v, r3)))
            .collect::<Result<Vec<_>>>()?;
        let gains: Vec<(usize, f64)> = scored.iter().map(|&(v, r3)| (v, r3 - value)).collect();
        let (v, gain) = select(instance, &gains);
        let new_value = scored.iter().find(|s| s.0 == v).expect("picked from candidates").1;
        marginals.push(gain);
        value = new_value;
        sequence.push(v);
        set = set.with(v);
    }
    Ok(PlacementResult {
        sequence,
        set,
        value,
        marginals,
        objective: PlacementObjective::SetHeuristic,
    })
}
