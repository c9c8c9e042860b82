//! Synthetic instances: demand draws, capacities from a resource stretch, and
//! simple topologies with random traffic.
//!
//! All randomness comes from [`SplitMix64`](crate::rng::SplitMix64). Draw order
//! is part of the contract: flows in list order, and for each flow the
//! resources in order `r1..rR`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Edge, Flow, Instance, InstanceData, NetworkFunction, Node};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Resource ids used by generated instances.
pub fn resource_ids(num_resources: usize) -> Vec<String> {
    (1..=num_resources).map(|r| format!("r{r}")).collect()
}

/// Replaces resources and functions with synthetic ones.
///
/// Every flow gets its own function whose per-resource demand β is drawn
/// uniformly from `[lo, hi]`, and every node gets capacity `z · d_max` on every
/// resource, where `d_max = max_{f,r} δ_f^r λ_f`.
pub fn generate_demands(
    instance: &Instance,
    demand_range: (f64, f64),
    num_resources: usize,
    z: f64,
    seed: u64,
) -> Result<Instance> {
    let (lo, hi) = demand_range;
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidRange { lo, hi });
    }
    if num_resources == 0 {
        return Err(Error::InvalidArgument("at least one resource is required".into()));
    }
    if !(z > 1.0 && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("stretch Z = {z} must exceed 1")));
    }
    let resources = resource_ids(num_resources);
    let mut rng = SplitMix64::new(seed);
    let mut data = instance.data().clone();
    data.functions.clear();
    for flow in &mut data.flows {
        let id = format!("phi_{}", flow.id);
        let beta: BTreeMap<String, f64> = resources
            .iter()
            .map(|r| (r.clone(), rng.uniform(lo, hi)))
            .collect();
        data.functions.push(NetworkFunction {
            id: id.clone(),
            beta,
        });
        flow.functions = vec![id];
    }
    data.resources = resources.clone();
    let zeros: BTreeMap<String, f64> = resources.iter().map(|r| (r.clone(), 0.0)).collect();
    for n in &mut data.nodes {
        n.capacity = zeros.clone();
    }
    Instance::new(data)?.with_scaled_capacities(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Line,
    Ring,
    Random,
    /// The 12-node, 15-link Abilene backbone.
    Abilene,
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(Topology::Line),
            "ring" => Ok(Topology::Ring),
            "random" => Ok(Topology::Random),
            "abilene" => Ok(Topology::Abilene),
            other => Err(Error::InvalidArgument(format!("unknown topology `{other}`"))),
        }
    }
}

const ABILENE_NODES: [&str; 12] = [
    "ATLAM5", "ATLAng", "CHINng", "DNVRng", "HSTNng", "IPLSng", "KSCYng", "LOSAng", "NYCMng",
    "SNVAng", "STTLng", "WASHng",
];

// Link weights are synthetic, roughly proportional to geographic distance.
const ABILENE_LINKS: [(&str, &str, f64); 15] = [
    ("ATLAM5", "ATLAng", 1.0),
    ("ATLAng", "HSTNng", 1176.0),
    ("ATLAng", "IPLSng", 587.0),
    ("ATLAng", "WASHng", 846.0),
    ("CHINng", "IPLSng", 260.0),
    ("CHINng", "NYCMng", 700.0),
    ("DNVRng", "KSCYng", 639.0),
    ("DNVRng", "SNVAng", 1295.0),
    ("DNVRng", "STTLng", 2095.0),
    ("HSTNng", "KSCYng", 902.0),
    ("HSTNng", "LOSAng", 1893.0),
    ("IPLSng", "KSCYng", 548.0),
    ("LOSAng", "SNVAng", 366.0),
    ("NYCMng", "WASHng", 233.0),
    ("SNVAng", "STTLng", 861.0),
];

fn node_name(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("n{i:0width$}")
}

/// Node ids and links for a topology. `num_nodes` is ignored for Abilene.
pub fn topology(kind: Topology, num_nodes: usize, rng: &mut SplitMix64) -> (Vec<String>, Vec<Edge>) {
    let link = |u: &str, v: &str, cost: f64| Edge {
        u: u.to_string(),
        v: v.to_string(),
        cost,
    };
    match kind {
        Topology::Abilene => (
            ABILENE_NODES.iter().map(|s| s.to_string()).collect(),
            ABILENE_LINKS.iter().map(|(u, v, c)| link(u, v, *c)).collect(),
        ),
        Topology::Line | Topology::Ring => {
            let names: Vec<String> = (0..num_nodes).map(|i| node_name(i, num_nodes)).collect();
            let mut edges: Vec<Edge> = names.windows(2).map(|w| link(&w[0], &w[1], 1.0)).collect();
            if kind == Topology::Ring && num_nodes > 2 {
                edges.push(link(&names[num_nodes - 1], &names[0], 1.0));
            }
            (names, edges)
        }
        Topology::Random => {
            let names: Vec<String> = (0..num_nodes).map(|i| node_name(i, num_nodes)).collect();
            let mut pairs = std::collections::BTreeSet::new();
            for i in 1..num_nodes {
                let j = rng.below(i as u64) as usize;
                pairs.insert((j, i));
            }
            for _ in 0..num_nodes / 2 {
                if num_nodes < 2 {
                    break;
                }
                let a = rng.below(num_nodes as u64) as usize;
                let b = rng.below(num_nodes as u64) as usize;
                if a != b {
                    pairs.insert((a.min(b), a.max(b)));
                }
            }
            let edges = pairs
                .into_iter()
                .map(|(a, b)| link(&names[a], &names[b], (1 + rng.below(10)) as f64))
                .collect();
            (names, edges)
        }
    }
}

/// A topology with random traffic and a placeholder demand model
/// (one resource, unit demand, zero capacity). Paths are not computed.
///
/// For Abilene the flow set is the full 12×12 traffic matrix (144 flows,
/// including the node-local diagonal) with gravity-style rates
/// `w_src · w_dst · m`, where `w ~ U[0.5, 2]` per node and `m` is log-uniform
/// on `[0.1, 10]`. Other topologies draw `num_flows` endpoint pairs (distinct
/// when there are at least two nodes) with rates uniform on `[0.5, 5]`.
pub fn synthetic_instance(
    kind: Topology,
    num_nodes: usize,
    num_flows: usize,
    seed: u64,
) -> Result<Instance> {
    if kind != Topology::Abilene && num_nodes == 0 {
        return Err(Error::InvalidArgument("topology needs at least one node".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let (names, edges) = topology(kind, num_nodes, &mut rng);
    let n = names.len();
    let mut flows = Vec::new();
    let push = |src: usize, dst: usize, rate: f64, flows: &mut Vec<Flow>| {
        flows.push(Flow {
            id: format!("{}_{}", names[src], names[dst]),
            src: names[src].clone(),
            dst: names[dst].clone(),
            rate,
            functions: vec!["phi".into()],
            path: None,
        })
    };
    if kind == Topology::Abilene {
        let weights: Vec<f64> = (0..n).map(|_| rng.uniform(0.5, 2.0)).collect();
        for s in 0..n {
            for d in 0..n {
                let m = (rng.uniform(0.1f64.ln(), 10f64.ln())).exp();
                push(s, d, weights[s] * weights[d] * m, &mut flows);
            }
        }
    } else {
        for i in 0..num_flows {
            let s = rng.below(n as u64) as usize;
            let mut d = s;
            if n > 1 {
                while d == s {
                    d = rng.below(n as u64) as usize;
                }
            }
            let rate = rng.uniform(0.5, 5.0);
            push(s, d, rate, &mut flows);
            // pair ids may repeat; make them unique by position
            let last = flows.last_mut().expect("just pushed");
            last.id = format!("f{i}_{}", last.id);
        }
    }
    let config = super::CapacityConfig::placeholder();
    Instance::new(InstanceData {
        resources: config.resources.clone(),
        nodes: names
            .iter()
            .map(|id| Node {
                id: id.clone(),
                capacity: config.default_capacity.clone(),
            })
            .collect(),
        edges,
        functions: config.functions,
        flows,
    })
}
