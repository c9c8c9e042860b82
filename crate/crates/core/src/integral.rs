//! Integral allocation on placed nodes: every served flow is processed whole
//! at one node of its path.
//!
//! Both allocators are primal-dual: each resource of each placed node carries
//! a price, flows are picked by rate per unit of priced demand, and prices
//! grow exponentially with use. [`pra`] prices all nodes together; [`nra`]
//! handles one node at a time. Neither ever commits an assignment that would
//! exceed a capacity: a flow that does not fit at its chosen node is retried
//! elsewhere and dropped once no node of its path can take it.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fractional::{AssignmentMatrix, NodeSequence, NodeSet};
use crate::lp::{self, LinearProgram};
use crate::model::Instance;

/// `Z` must exceed `1 + Z_EPS`; the price exponents divide by `c̄ − 1`.
pub const Z_EPS: f64 = 1e-6;

/// Slack, relative to the capacity, when checking whether a flow still fits.
const FIT_TOL: f64 = 1e-12;

/// Demands and capacities scaled by the largest single-flow demand.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedInstance {
    /// `max_{f,r} δ_f^r λ_f` over all flows.
    pub d_max: f64,
    /// `d[f][r] = δ_f^r λ_f / d_max`.
    pub d: Vec<Vec<f64>>,
    /// `c_bar[v][r] = c_v^r / d_max`, for every node.
    pub c_bar: Vec<Vec<f64>>,
    /// Resource stretch: smallest `c̄_v^r` over the placed nodes.
    pub z: f64,
}

/// Normalizes the instance with the stretch taken over `set`.
pub fn normalize(instance: &Instance, set: &NodeSet) -> Result<NormalizedInstance> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("cannot normalize over an empty node set".into()));
    }
    if let Some(v) = set.iter().find(|&v| v >= instance.num_nodes()) {
        return Err(Error::IndexOutOfRange {
            index: v,
            len: instance.num_nodes(),
        });
    }
    let d_max = instance.max_flow_demand();
    if !(d_max > 0.0) {
        return Err(Error::DegenerateInstance("every flow has zero demand".into()));
    }
    let d = (0..instance.num_flows())
        .map(|f| {
            let rate = instance.rate(f);
            instance.demand(f).iter().map(|delta| delta * rate / d_max).collect()
        })
        .collect();
    let c_bar: Vec<Vec<f64>> = (0..instance.num_nodes())
        .map(|v| instance.capacity(v).iter().map(|c| c / d_max).collect())
        .collect();
    let z = set
        .iter()
        .flat_map(|v| c_bar[v].iter().copied())
        .fold(f64::INFINITY, f64::min);
    Ok(NormalizedInstance { d_max, d, c_bar, z })
}

/// One committed assignment and the assigned node's prices afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationStep {
    pub flow: usize,
    pub node: usize,
    pub prices: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralAssignment {
    pub assignment: AssignmentMatrix,
    /// Node serving each flow, if any.
    pub node_of: Vec<Option<usize>>,
    /// `c_v^r − load`, per node and resource.
    pub residual: Vec<Vec<f64>>,
    /// Final prices `b_v^r`; rows of nodes never priced are empty.
    pub prices: Vec<Vec<f64>>,
    /// Assignments in commit order (zero-demand flows excluded).
    pub steps: Vec<AllocationStep>,
    /// Whether a price threshold (rather than running out of flows) ended
    /// the run; for [`nra`], whether it ended any node's turn.
    pub hit_threshold: bool,
}

impl IntegralAssignment {
    fn empty(instance: &Instance) -> Self {
        IntegralAssignment {
            assignment: AssignmentMatrix::new(),
            node_of: vec![None; instance.num_flows()],
            residual: (0..instance.num_nodes())
                .map(|v| instance.capacity(v).to_vec())
                .collect(),
            prices: vec![Vec::new(); instance.num_nodes()],
            steps: Vec::new(),
            hit_threshold: false,
        }
    }

    pub fn assigned_flows(&self) -> BTreeSet<usize> {
        (0..self.node_of.len())
            .filter(|&f| self.node_of[f].is_some())
            .collect()
    }

    fn fits(&self, instance: &Instance, f: usize, v: usize) -> bool {
        let rate = instance.rate(f);
        instance
            .demand(f)
            .iter()
            .zip(&self.residual[v])
            .zip(instance.capacity(v))
            .all(|((delta, res), cap)| delta * rate <= res + FIT_TOL * cap.max(1.0))
    }

    fn commit(&mut self, instance: &Instance, f: usize, v: usize) {
        let rate = instance.rate(f);
        self.assignment.set(f, v, rate);
        self.node_of[f] = Some(v);
        for (res, delta) in self.residual[v].iter_mut().zip(instance.demand(f)) {
            *res -= delta * rate;
        }
    }

    /// Checks whole-flow placement on path nodes of `set` and capacities.
    pub fn validate(&self, instance: &Instance, set: &NodeSet) -> Result<()> {
        for (f, node) in self.node_of.iter().enumerate() {
            let row: Vec<(usize, f64)> = self
                .assignment
                .entries()
                .filter(|e| e.0 == f)
                .map(|e| (e.1, e.2))
                .collect();
            match node {
                None if !row.is_empty() => {
                    return Err(Error::Validation(format!(
                        "unassigned flow `{}` has traffic",
                        instance.flow_id(f)
                    )))
                }
                None => {}
                Some(v) => {
                    if row.len() != 1 || row[0].0 != *v || row[0].1 != instance.rate(f) {
                        return Err(Error::Validation(format!(
                            "flow `{}` is not placed whole on one node",
                            instance.flow_id(f)
                        )));
                    }
                    if !set.contains(*v) {
                        return Err(Error::Validation(format!(
                            "flow `{}` placed on unselected node `{}`",
                            instance.flow_id(f),
                            instance.node_id(*v)
                        )));
                    }
                }
            }
        }
        self.assignment.validate(instance, &instance.rates(), crate::EPS_FEAS)
    }
}

fn check_stretch(norm: &NormalizedInstance) -> Result<()> {
    if !(norm.z > 1.0 + Z_EPS) {
        return Err(Error::ZTooSmall(norm.z));
    }
    Ok(())
}

fn check_set(instance: &Instance, set: &NodeSet) -> Result<()> {
    instance.ensure_paths()?;
    match set.iter().find(|&v| v >= instance.num_nodes()) {
        Some(v) => Err(Error::IndexOutOfRange {
            index: v,
            len: instance.num_nodes(),
        }),
        None => Ok(()),
    }
}

fn by_id<'a>(ids: impl Fn(usize) -> &'a str) -> impl Fn(&usize, &usize) -> std::cmp::Ordering {
    move |a, b| ids(*a).cmp(ids(*b))
}

/// Flows covered by `set`, sorted by flow id. Zero-demand flows are committed
/// right away to their first path node in `set` and left out of the result.
fn initial_flows(instance: &Instance, set: &NodeSet, out: &mut IntegralAssignment) -> Vec<usize> {
    let mut flows = Vec::new();
    for f in instance.covered_flows(&set.0) {
        let path = instance.path(f).expect("paths checked");
        if instance.demand(f).iter().all(|&d| d == 0.0) {
            let v = *path.iter().find(|&&v| set.contains(v)).expect("covered flow");
            out.commit(instance, f, v);
        } else {
            flows.push(f);
        }
    }
    flows.sort_by(by_id(|f| instance.flow_id(f)));
    flows
}

/// Among `flows`, the first (in the given order) with the largest
/// `λ_f / Σ_r d_f^r b^r`, with `b` given per flow.
fn best_ratio<'p>(
    instance: &Instance,
    norm: &NormalizedInstance,
    flows: impl Iterator<Item = (usize, &'p [f64])>,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (f, prices) in flows {
        let cost: f64 = norm.d[f].iter().zip(prices).map(|(d, b)| d * b).sum();
        let ratio = instance.rate(f) / cost;
        if best.is_none_or(|(_, r)| ratio > r) {
            best = Some((f, ratio));
        }
    }
    best.map(|(f, _)| f)
}

fn raise_prices(prices: &mut [f64], d: &[f64], c_bar: &[f64], base: f64) {
    for ((b, d), c) in prices.iter_mut().zip(d).zip(c_bar) {
        *b *= base.powf(d / (c - 1.0));
    }
}

fn priced_capacity(prices: &[f64], c_bar: &[f64]) -> f64 {
    prices.iter().zip(c_bar).map(|(b, c)| b * c).sum()
}

/// Primal-dual allocation with prices shared across all nodes of `set`.
pub fn pra(instance: &Instance, norm: &NormalizedInstance, set: &NodeSet) -> Result<IntegralAssignment> {
    check_set(instance, set)?;
    check_stretch(norm)?;
    let mut out = IntegralAssignment::empty(instance);
    let mut flows = initial_flows(instance, set, &mut out);
    let nodes: Vec<usize> = {
        let mut n: Vec<usize> = set.iter().collect();
        n.sort_by(by_id(|v| instance.node_id(v)));
        n
    };
    for &v in &nodes {
        out.prices[v] = norm.c_bar[v].iter().map(|c| 1.0 / c).collect();
    }
    let r = instance.num_resources() as f64;
    let base = (norm.z - 1.0).exp() * r * nodes.len() as f64;
    let mut ineligible: BTreeSet<(usize, usize)> = BTreeSet::new();

    loop {
        let total: f64 = nodes
            .iter()
            .map(|&v| priced_capacity(&out.prices[v], &norm.c_bar[v]))
            .sum();
        if total >= base {
            out.hit_threshold = true;
            break;
        }
        // cheapest eligible node per flow; flows without one are dropped
        let mut choice = Vec::with_capacity(flows.len());
        flows.retain(|&f| {
            let path = instance.path(f).expect("paths checked");
            let cheapest = nodes
                .iter()
                .copied()
                .filter(|&v| path.contains(&v) && !ineligible.contains(&(f, v)))
                .map(|v| (v, out.prices[v].iter().sum::<f64>()))
                .fold(None, |best: Option<(usize, f64)>, (v, s)| match best {
                    Some((_, bs)) if bs <= s => best,
                    _ => Some((v, s)),
                });
            match cheapest {
                Some((v, _)) => {
                    choice.push((f, v));
                    true
                }
                None => false,
            }
        });
        let Some(f) = best_ratio(
            instance,
            norm,
            choice.iter().map(|&(f, v)| (f, out.prices[v].as_slice())),
        ) else {
            break;
        };
        let v = choice.iter().find(|c| c.0 == f).expect("chosen flow").1;
        if !out.fits(instance, f, v) {
            ineligible.insert((f, v));
            continue;
        }
        out.commit(instance, f, v);
        raise_prices(&mut out.prices[v], &norm.d[f], &norm.c_bar[v], base);
        out.steps.push(AllocationStep {
            flow: f,
            node: v,
            prices: out.prices[v].clone(),
        });
        flows.retain(|&g| g != f);
    }
    Ok(out)
}

/// Node-by-node primal-dual allocation, visiting the nodes of `set` in `order`.
pub fn nra(
    instance: &Instance,
    norm: &NormalizedInstance,
    set: &NodeSet,
    order: &NodeSequence,
) -> Result<IntegralAssignment> {
    check_set(instance, set)?;
    if order.to_set() != *set {
        return Err(Error::InvalidArgument(
            "node order must be a permutation of the placed nodes".into(),
        ));
    }
    check_stretch(norm)?;
    let mut out = IntegralAssignment::empty(instance);
    let mut remaining = initial_flows(instance, set, &mut out);
    let base = (norm.z - 1.0).exp() * instance.num_resources() as f64;

    for &v in order.as_slice() {
        let c_bar = &norm.c_bar[v];
        let mut prices: Vec<f64> = c_bar.iter().map(|c| 1.0 / c).collect();
        let mut candidates: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&f| instance.path(f).expect("paths checked").contains(&v))
            .collect();
        loop {
            if priced_capacity(&prices, c_bar) >= base {
                out.hit_threshold = true;
                break;
            }
            let Some(f) = best_ratio(instance, norm, candidates.iter().map(|&f| (f, prices.as_slice())))
            else {
                break;
            };
            candidates.retain(|&g| g != f);
            if !out.fits(instance, f, v) {
                continue;
            }
            out.commit(instance, f, v);
            raise_prices(&mut prices, &norm.d[f], c_bar, base);
            out.steps.push(AllocationStep {
                flow: f,
                node: v,
                prices: prices.clone(),
            });
            remaining.retain(|&g| g != f);
        }
        out.prices[v] = prices;
    }
    Ok(out)
}

/// Total rate of fully processed flows.
pub fn processed_traffic(instance: &Instance, assignment: &AssignmentMatrix) -> f64 {
    assignment
        .flow_totals(instance.num_flows())
        .iter()
        .enumerate()
        .filter(|&(f, &x)| x >= instance.rate(f) - crate::EPS_FEAS)
        .map(|(f, _)| instance.rate(f))
        .sum()
}

/// Optimum of the normalized fractional allocation LP over `set`: maximize
/// `Σ λ_f a_f^v` subject to `Σ_f d_f^r a_f^v ≤ c̄_v^r` and `Σ_v a_f^v ≤ 1`.
/// Diagnostic only; the allocators never solve it.
pub fn primal_lp_value(instance: &Instance, norm: &NormalizedInstance, set: &NodeSet) -> Result<f64> {
    check_set(instance, set)?;
    let mut vars = Vec::new();
    for f in 0..instance.num_flows() {
        for &v in instance.path(f).expect("paths checked") {
            if set.contains(v) {
                vars.push((f, v));
            }
        }
    }
    let objective = vars.iter().map(|&(f, _)| instance.rate(f)).collect();
    let mut lp = LinearProgram::new(vars.len()).maximize(objective);
    for f in 0..instance.num_flows() {
        let terms: Vec<_> = (0..vars.len()).filter(|&k| vars[k].0 == f).map(|k| (k, 1.0)).collect();
        if !terms.is_empty() {
            lp.add_leq_sparse(&terms, 1.0);
        }
    }
    for v in set.iter() {
        for r in 0..instance.num_resources() {
            let terms: Vec<_> = (0..vars.len())
                .filter(|&k| vars[k].1 == v)
                .map(|k| (k, norm.d[vars[k].0][r]))
                .collect();
            if !terms.is_empty() {
                lp.add_leq_sparse(&terms, norm.c_bar[v][r]);
            }
        }
    }
    Ok(lp::solve(&lp)?.optimal()?.objective_value)
}

/// Guarantee of [`pra`] relative to the sequential allocation value.
pub fn pra_ratio(z: f64, k: usize, num_resources: usize) -> f64 {
    (z - 1.0) / (std::f64::consts::E * z * ((k * num_resources) as f64).powf(1.0 / (z - 1.0)))
}

/// Guarantee of [`nra`] relative to the sequential allocation value.
pub fn nra_ratio(z: f64, num_resources: usize) -> f64 {
    let e = std::f64::consts::E;
    (z - 1.0) / (z - 1.0 + e * z * (num_resources as f64).powf(1.0 / (z - 1.0)))
}
