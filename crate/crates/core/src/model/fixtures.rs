//! Small hand-built instances with known answers.

use super::{Edge, Flow, Instance, InstanceData, NetworkFunction, Node};

/// Per-unit demand of the third flow, chosen so that `δ · λ = 10` fills a node.
pub const TIGHT_DEMAND: f64 = 10.0 / 1.01;

/// Three nodes `v1 - v2 - v3`, two resources, capacity 10 everywhere, and
/// three flows:
///
/// | flow | path     | rate | δ (r1, r2)     |
/// |------|----------|------|----------------|
/// | f1   | v1, v2   | 0.02 | 4, 10          |
/// | f2   | v2       | 1    | 9.92, 9.8      |
/// | f3   | v2, v3   | 1.01 | 10/1.01 (both) |
///
/// Ordering `v1` in front of `(v2, v3)` roughly halves the sequential
/// allocation value (2.03 down to 1.03), the worst case for prefixing nodes.
pub fn backward_bound_instance() -> Instance {
    backward_bound_with_demand(TIGHT_DEMAND)
}

/// Same as [`backward_bound_instance`] with δ_f3 rounded to 9.9009, which
/// leaves 9.1e-6 units of r1 unused at `v2` once f3 is placed there.
pub fn backward_bound_instance_rounded() -> Instance {
    backward_bound_with_demand(9.9009)
}

fn backward_bound_with_demand(f3_demand: f64) -> Instance {
    let res = |a: f64, b: f64| [("r1".to_string(), a), ("r2".to_string(), b)].into();
    let node = |id: &str| Node {
        id: id.into(),
        capacity: res(10.0, 10.0),
    };
    let edge = |u: &str, v: &str| Edge {
        u: u.into(),
        v: v.into(),
        cost: 1.0,
    };
    let func = |id: &str, a: f64, b: f64| NetworkFunction {
        id: id.into(),
        beta: res(a, b),
    };
    let flow = |id: &str, path: &[&str], rate: f64, phi: &str| Flow {
        id: id.into(),
        src: path[0].into(),
        dst: path[path.len() - 1].into(),
        rate,
        functions: vec![phi.into()],
        path: Some(path.iter().map(|s| s.to_string()).collect()),
    };
    Instance::new(InstanceData {
        resources: vec!["r1".into(), "r2".into()],
        nodes: vec![node("v1"), node("v2"), node("v3")],
        edges: vec![edge("v1", "v2"), edge("v2", "v3")],
        functions: vec![
            func("phi1", 4.0, 10.0),
            func("phi2", 9.92, 9.8),
            func("phi3", f3_demand, f3_demand),
        ],
        flows: vec![
            flow("f1", &["v1", "v2"], 0.02, "phi1"),
            flow("f2", &["v2"], 1.0, "phi2"),
            flow("f3", &["v2", "v3"], 1.01, "phi3"),
        ],
    })
    .expect("fixture is valid")
}

/// A path graph over `nodes` (linked in the given order) with one function
/// per flow. Nodes are `(id, capacity per resource)`; flows are
/// `(id, path, rate, δ per resource)`. Resources are named `r1, r2, …`.
pub fn line_instance(nodes: &[(&str, &[f64])], flows: &[(&str, &[&str], f64, &[f64])]) -> Instance {
    let num_resources = nodes.first().map_or(1, |n| n.1.len());
    let resources = super::resource_ids(num_resources);
    let per_resource = |values: &[f64]| resources.iter().cloned().zip(values.iter().copied()).collect();
    Instance::new(InstanceData {
        nodes: nodes
            .iter()
            .map(|(id, cap)| Node {
                id: id.to_string(),
                capacity: per_resource(cap),
            })
            .collect(),
        edges: nodes
            .windows(2)
            .map(|w| Edge {
                u: w[0].0.into(),
                v: w[1].0.into(),
                cost: 1.0,
            })
            .collect(),
        functions: flows
            .iter()
            .map(|(id, _, _, delta)| NetworkFunction {
                id: format!("phi_{id}"),
                beta: per_resource(delta),
            })
            .collect(),
        flows: flows
            .iter()
            .map(|(id, path, rate, _)| Flow {
                id: id.to_string(),
                src: path[0].into(),
                dst: path[path.len() - 1].into(),
                rate: *rate,
                functions: vec![format!("phi_{id}")],
                path: Some(path.iter().map(|s| s.to_string()).collect()),
            })
            .collect(),
        resources,
    })
    .expect("fixture is valid")
}
