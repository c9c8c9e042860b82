//! Fractional allocation: the per-node LP, the sequential allocation that
//! defines the sequence value `R4(S)`, and the joint allocation `R3(U)`.
//!
//! Both allow partially processed flows. Traffic of flow `f` may only be
//! placed on nodes of its path; rather than adding explicit `x_f^v = 0`
//! constraints, off-path variables are never created.

mod types;

use std::borrow::Cow;

pub use types::{AssignmentMatrix, NodeSequence, NodeSet};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram};
use crate::model::Instance;

/// The per-node LP of one step of the sequential allocation, together with
/// the `(flow, position)` meaning of each LP variable.
/// Relative slack on earlier totals used when the exactly pinned node LP is
/// infeasible or numerically unstable.
pub const PIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct NodeLp {
    pub lp: LinearProgram,
    pub vars: Vec<(usize, usize)>,
}

/// Builds the LP that maximizes the traffic at position `j` (0-based) of
/// `seq`, holding the totals of every other position `i` at `y[i]`.
///
/// Constraints: per-flow rate caps over the sequence nodes on the flow's
/// path, per-node per-resource capacities, and `Σ_f x_f^{v_i} = y_i` for
/// every `i ≠ j`.
pub fn build_node_lp(
    instance: &Instance,
    seq: &NodeSequence,
    y: &[f64],
    j: usize,
) -> Result<NodeLp> {
    build_node_lp_with_rates(instance, seq, y, j, &instance.rates())
}

pub fn build_node_lp_with_rates(
    instance: &Instance,
    seq: &NodeSequence,
    y: &[f64],
    j: usize,
    rates: &[f64],
) -> Result<NodeLp> {
    build_node_lp_pinned(instance, seq, y, j, rates, 0.0)
}

/// Like [`build_node_lp_with_rates`], but with `pin_tol > 0` the totals of
/// the other positions become lower bounds `Σ_f x_f^{v_i} ≥ y_i − ε_i` with
/// `ε_i = pin_tol · max(1, y_i)`. Each earlier `y_i` is already the largest
/// total its position can reach, so the lower bound still pins it; the
/// slack keeps the program feasible when `y_i` carries rounding error from
/// the solve that produced it.
pub fn build_node_lp_pinned(
    instance: &Instance,
    seq: &NodeSequence,
    y: &[f64],
    j: usize,
    rates: &[f64],
    pin_tol: f64,
) -> Result<NodeLp> {
    let nodes = seq.as_slice();
    if j >= nodes.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: nodes.len(),
        });
    }
    if y.len() != nodes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} node totals for a sequence of {} nodes",
            y.len(),
            nodes.len()
        )));
    }
    instance.ensure_paths()?;

    let mut vars = Vec::new();
    let mut by_flow: Vec<Vec<usize>> = vec![Vec::new(); instance.num_flows()];
    let mut by_pos: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, &v) in nodes.iter().enumerate() {
        for (f, flow_vars) in by_flow.iter_mut().enumerate() {
            if instance.path(f).is_some_and(|p| p.contains(&v)) {
                flow_vars.push(vars.len());
                by_pos[i].push(vars.len());
                vars.push((f, i));
            }
        }
    }

    let n = vars.len();
    let objective = (0..n)
        .map(|k| if vars[k].1 == j { 1.0 } else { 0.0 })
        .collect();
    let mut lp = LinearProgram::new(n).maximize(objective);
    for (f, flow_vars) in by_flow.iter().enumerate() {
        if !flow_vars.is_empty() {
            let terms: Vec<_> = flow_vars.iter().map(|&k| (k, 1.0)).collect();
            lp.add_leq_sparse(&terms, rates[f]);
        }
    }
    for (i, &v) in nodes.iter().enumerate() {
        if by_pos[i].is_empty() {
            continue;
        }
        for (r, &cap) in instance.capacity(v).iter().enumerate() {
            let terms: Vec<_> = by_pos[i]
                .iter()
                .map(|&k| (k, instance.demand(vars[k].0)[r]))
                .collect();
            lp.add_leq_sparse(&terms, cap);
        }
    }
    for (i, pos_vars) in by_pos.iter().enumerate() {
        if i == j || (pos_vars.is_empty() && y[i] == 0.0) {
            continue;
        }
        if pin_tol > 0.0 {
            let terms: Vec<_> = pos_vars.iter().map(|&k| (k, -1.0)).collect();
            lp.add_leq_sparse(&terms, -(y[i] - pin_tol * y[i].abs().max(1.0)));
        } else {
            let terms: Vec<_> = pos_vars.iter().map(|&k| (k, 1.0)).collect();
            lp.add_eq_sparse(&terms, y[i]);
        }
    }
    Ok(NodeLp { lp, vars })
}

/// Result of the sequential allocation of a node sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialAllocation {
    /// Traffic assigned to each position, in sequence order (ŷ).
    pub node_totals: Vec<f64>,
    /// The assignment found by the last per-node LP (X̂).
    pub assignment: AssignmentMatrix,
    /// `R4(S) = Σ ŷ_i`.
    pub value: f64,
}

/// Incremental form of the sequential allocation.
///
/// Appending a node solves exactly one per-node LP: the LP for position `i`
/// only involves the first `i` nodes and their fixed totals, so appending to
/// a sequence never changes the totals of its prefix.
#[derive(Debug, Clone)]
pub struct SequentialAllocator<'a> {
    instance: &'a Instance,
    rates: Cow<'a, [f64]>,
    seq: NodeSequence,
    totals: Vec<f64>,
    assignment: AssignmentMatrix,
}

impl<'a> SequentialAllocator<'a> {
    pub fn new(instance: &'a Instance) -> Result<Self> {
        instance.ensure_paths()?;
        Ok(Self {
            instance,
            rates: Cow::Owned(instance.rates()),
            seq: NodeSequence::default(),
            totals: Vec::new(),
            assignment: AssignmentMatrix::new(),
        })
    }

    /// Uses `rates` in place of the flow rates. Entries must lie in
    /// `[0, λ_f]`; values outside by less than the feasibility tolerance are
    /// clamped.
    pub fn with_rates(instance: &'a Instance, rates: &[f64]) -> Result<Self> {
        let rates = checked_rates(instance, rates)?;
        let mut alloc = Self::new(instance)?;
        alloc.rates = Cow::Owned(rates);
        Ok(alloc)
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn sequence(&self) -> &NodeSequence {
        &self.seq
    }

    pub fn node_totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn value(&self) -> f64 {
        self.totals.iter().sum()
    }

    pub fn assignment(&self) -> &AssignmentMatrix {
        &self.assignment
    }

    /// Traffic node `v` would receive if appended: `R4(S ⊕ v) − R4(S)`.
    /// Nodes already in the sequence add nothing.
    pub fn marginal(&self, v: usize) -> Result<f64> {
        if self.seq.contains(v) {
            return Ok(0.0);
        }
        Ok(self.solve_append(v)?.0)
    }

    fn solve_append(&self, v: usize) -> Result<(f64, AssignmentMatrix)> {
        let mut seq = self.seq.clone();
        seq.push(v);
        let mut y = self.totals.clone();
        y.push(0.0);
        let j = seq.len() - 1;
        let solve_pinned = |pin_tol: f64| -> Result<(NodeLp, lp::LpSolution)> {
            let node_lp = build_node_lp_pinned(self.instance, &seq, &y, j, &self.rates, pin_tol)?;
            let sol = lp::solve(&node_lp.lp)?.optimal()?;
            Ok((node_lp, sol))
        };
        let (node_lp, sol) = match solve_pinned(0.0) {
            Err(Error::NumericalFailure(_) | Error::UnexpectedLpStatus("infeasible")) => solve_pinned(PIN_TOL)?,
            other => other?,
        };
        let mut x = AssignmentMatrix::new();
        let mut total = 0.0;
        for (k, &(f, i)) in node_lp.vars.iter().enumerate() {
            x.add(f, seq.as_slice()[i], sol.values[k]);
            if i == j {
                total += sol.values[k];
            }
        }
        Ok((total, x))
    }

    /// Appends `v` (no-op for repeats) and returns the traffic it received.
    pub fn push(&mut self, v: usize) -> Result<f64> {
        if self.seq.contains(v) {
            return Ok(0.0);
        }
        if v >= self.instance.num_nodes() {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: self.instance.num_nodes(),
            });
        }
        let (total, x) = self.solve_append(v)?;
        self.seq.push(v);
        self.totals.push(total);
        self.assignment = x;
        Ok(total)
    }

    pub fn finish(self) -> SequentialAllocation {
        SequentialAllocation {
            value: self.value(),
            node_totals: self.totals,
            assignment: self.assignment,
        }
    }
}

fn checked_rates(instance: &Instance, rates: &[f64]) -> Result<Vec<f64>> {
    if rates.len() != instance.num_flows() {
        return Err(Error::InvalidRates(format!(
            "expected {} rates, got {}",
            instance.num_flows(),
            rates.len()
        )));
    }
    rates
        .iter()
        .enumerate()
        .map(|(f, &x)| {
            let lambda = instance.rate(f);
            let tol = crate::EPS_FEAS * lambda.max(1.0);
            if !x.is_finite() || x < -tol || x > lambda + tol {
                Err(Error::InvalidRates(format!(
                    "rate {x} of flow `{}` outside [0, {lambda}]",
                    instance.flow_id(f)
                )))
            } else {
                Ok(x.clamp(0.0, lambda))
            }
        })
        .collect()
}

/// Runs the sequential allocation over `seq`, one per-node LP per position.
pub fn iterative_allocation(instance: &Instance, seq: &NodeSequence) -> Result<SequentialAllocation> {
    let mut alloc = SequentialAllocator::new(instance)?;
    for &v in seq.as_slice() {
        alloc.push(v)?;
    }
    Ok(alloc.finish())
}

/// `R4(S | rates)`: the sequential allocation value with flow rates replaced.
pub fn r4_with_rates(instance: &Instance, seq: &NodeSequence, rates: &[f64]) -> Result<f64> {
    let mut alloc = SequentialAllocator::with_rates(instance, rates)?;
    for &v in seq.as_slice() {
        alloc.push(v)?;
    }
    Ok(alloc.value())
}

/// `R3(U)`: the largest total traffic the nodes of `set` can process together,
/// partial flows allowed.
pub fn full_fractional_allocation(
    instance: &Instance,
    set: &NodeSet,
) -> Result<(f64, AssignmentMatrix)> {
    full_fractional_allocation_with_rates(instance, set, &instance.rates())
}

pub fn full_fractional_allocation_with_rates(
    instance: &Instance,
    set: &NodeSet,
    rates: &[f64],
) -> Result<(f64, AssignmentMatrix)> {
    instance.ensure_paths()?;
    let rates = checked_rates(instance, rates)?;
    let nodes: Vec<usize> = set.iter().collect();
    let mut vars = Vec::new();
    let mut by_flow: Vec<Vec<usize>> = vec![Vec::new(); instance.num_flows()];
    let mut by_node: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, &v) in nodes.iter().enumerate() {
        if v >= instance.num_nodes() {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: instance.num_nodes(),
            });
        }
        for (f, flow_vars) in by_flow.iter_mut().enumerate() {
            if instance.require_path(f)?.contains(&v) {
                flow_vars.push(vars.len());
                by_node[i].push(vars.len());
                vars.push((f, v));
            }
        }
    }
    let mut lp = LinearProgram::new(vars.len()).maximize(vec![1.0; vars.len()]);
    for (f, flow_vars) in by_flow.iter().enumerate() {
        if !flow_vars.is_empty() {
            let terms: Vec<_> = flow_vars.iter().map(|&k| (k, 1.0)).collect();
            lp.add_leq_sparse(&terms, rates[f]);
        }
    }
    for (i, &v) in nodes.iter().enumerate() {
        if by_node[i].is_empty() {
            continue;
        }
        for (r, &cap) in instance.capacity(v).iter().enumerate() {
            let terms: Vec<_> = by_node[i]
                .iter()
                .map(|&k| (k, instance.demand(vars[k].0)[r]))
                .collect();
            lp.add_leq_sparse(&terms, cap);
        }
    }
    let sol = lp::solve(&lp)?.optimal()?;
    let mut x = AssignmentMatrix::new();
    for (k, &(f, v)) in vars.iter().enumerate() {
        x.add(f, v, sol.values[k]);
    }
    Ok((sol.values.iter().sum(), x))
}
