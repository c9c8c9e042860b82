use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A network function with its per-resource demand per unit of traffic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFunction {
    pub id: String,
    pub beta: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub capacity: BTreeMap<String, f64>,
}

/// Undirected link with a routing cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: String,
    pub v: String,
    #[serde(default = "unit_cost")]
    pub cost: f64,
}

fn unit_cost() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub rate: f64,
    pub functions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
}

/// Plain serializable form of an instance; this is the JSON file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceData {
    pub resources: Vec<String>,
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    pub functions: Vec<NetworkFunction>,
    #[serde(default)]
    pub flows: Vec<Flow>,
}

/// A validated problem instance.
///
/// Ids are resolved once at construction; algorithms work on dense indices
/// (`node`, `flow`, `resource` positions in the respective lists).
#[derive(Debug, Clone)]
pub struct Instance {
    data: InstanceData,
    node_pos: HashMap<String, usize>,
    flow_pos: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    paths: Vec<Option<Vec<usize>>>,
    // delta[f][r]: resource r needed per unit of flow f
    delta: Vec<Vec<f64>>,
    capacity: Vec<Vec<f64>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self> {
        let InstanceData {
            resources,
            nodes,
            edges,
            functions,
            flows,
        } = &data;

        if resources.is_empty() {
            return Err(Error::Validation("resource list is empty".into()));
        }
        let res_set: HashSet<&str> = resources.iter().map(String::as_str).collect();
        if res_set.len() != resources.len() {
            return Err(Error::Validation("duplicate resource id".into()));
        }

        let mut node_pos = HashMap::new();
        let mut capacity = Vec::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if node_pos.insert(n.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate node id `{}`", n.id)));
            }
            for key in n.capacity.keys() {
                if !res_set.contains(key.as_str()) {
                    return Err(Error::Validation(format!(
                        "node `{}` has capacity for unknown resource `{key}`",
                        n.id
                    )));
                }
            }
            let mut row = Vec::with_capacity(resources.len());
            for r in resources {
                let c = *n.capacity.get(r).ok_or_else(|| {
                    Error::Validation(format!("node `{}` lacks capacity for `{r}`", n.id))
                })?;
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::Validation(format!(
                        "node `{}` has invalid capacity {c} for `{r}`",
                        n.id
                    )));
                }
                row.push(c);
            }
            capacity.push(row);
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in edges {
            let u = lookup(&node_pos, "node", &e.u)?;
            let v = lookup(&node_pos, "node", &e.v)?;
            if !(e.cost >= 0.0 && e.cost.is_finite()) {
                return Err(Error::Validation(format!(
                    "edge {}-{} has invalid cost {}",
                    e.u, e.v, e.cost
                )));
            }
            adjacency[u].push((v, e.cost));
            if u != v {
                adjacency[v].push((u, e.cost));
            }
        }

        let mut fn_pos = HashMap::new();
        for (i, f) in functions.iter().enumerate() {
            if fn_pos.insert(f.id.as_str(), i).is_some() {
                return Err(Error::Validation(format!("duplicate function id `{}`", f.id)));
            }
            if f.beta.is_empty() {
                return Err(Error::Validation(format!(
                    "function `{}` has no resource demand",
                    f.id
                )));
            }
            for (r, b) in &f.beta {
                if !res_set.contains(r.as_str()) {
                    return Err(Error::Validation(format!(
                        "function `{}` uses unknown resource `{r}`",
                        f.id
                    )));
                }
                if !(*b >= 0.0 && b.is_finite()) {
                    return Err(Error::Validation(format!(
                        "function `{}` has invalid demand {b} for `{r}`",
                        f.id
                    )));
                }
            }
        }

        let mut flow_pos = HashMap::new();
        let mut delta = Vec::with_capacity(flows.len());
        let mut paths = Vec::with_capacity(flows.len());
        for (i, f) in flows.iter().enumerate() {
            if flow_pos.insert(f.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate flow id `{}`", f.id)));
            }
            if !(f.rate > 0.0 && f.rate.is_finite()) {
                return Err(Error::Validation(format!(
                    "flow `{}` has non-positive rate {}",
                    f.id, f.rate
                )));
            }
            let src = lookup(&node_pos, "node", &f.src)?;
            let dst = lookup(&node_pos, "node", &f.dst)?;
            if f.functions.is_empty() {
                return Err(Error::Validation(format!(
                    "flow `{}` requires no functions",
                    f.id
                )));
            }
            let mut seen = HashSet::new();
            let mut row = vec![0.0; resources.len()];
            for fid in &f.functions {
                if !seen.insert(fid.as_str()) {
                    return Err(Error::Validation(format!(
                        "flow `{}` lists function `{fid}` twice",
                        f.id
                    )));
                }
                let func = &functions[*fn_pos.get(fid.as_str()).ok_or_else(|| {
                    Error::UnknownId {
                        kind: "function",
                        id: fid.clone(),
                    }
                })?];
                for (r, slot) in resources.iter().zip(row.iter_mut()) {
                    *slot += func.beta.get(r).copied().unwrap_or(0.0);
                }
            }
            delta.push(row);

            let path = match &f.path {
                None => None,
                Some(p) => Some(resolve_path(&node_pos, &adjacency, f, p, src, dst)?),
            };
            paths.push(path);
        }

        Ok(Self {
            data,
            node_pos,
            flow_pos,
            adjacency,
            paths,
            delta,
            capacity,
        })
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    pub fn into_data(self) -> InstanceData {
        self.data
    }

    pub fn resources(&self) -> &[String] {
        &self.data.resources
    }

    pub fn num_resources(&self) -> usize {
        self.data.resources.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.data.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.data.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.data.edges
    }

    pub fn functions(&self) -> &[NetworkFunction] {
        &self.data.functions
    }

    pub fn flows(&self) -> &[Flow] {
        &self.data.flows
    }

    pub fn num_flows(&self) -> usize {
        self.data.flows.len()
    }

    pub fn node_id(&self, v: usize) -> &str {
        &self.data.nodes[v].id
    }

    pub fn flow_id(&self, f: usize) -> &str {
        &self.data.flows[f].id
    }

    pub fn node_index(&self, id: &str) -> Result<usize> {
        lookup(&self.node_pos, "node", id)
    }

    pub fn flow_index(&self, id: &str) -> Result<usize> {
        lookup(&self.flow_pos, "flow", id)
    }

    pub fn resource_index(&self, id: &str) -> Result<usize> {
        self.data
            .resources
            .iter()
            .position(|r| r == id)
            .ok_or_else(|| Error::UnknownId {
                kind: "resource",
                id: id.to_string(),
            })
    }

    pub(crate) fn adjacency(&self) -> &[Vec<(usize, f64)>] {
        &self.adjacency
    }

    pub fn rate(&self, f: usize) -> f64 {
        self.data.flows[f].rate
    }

    pub fn rates(&self) -> Vec<f64> {
        self.data.flows.iter().map(|f| f.rate).collect()
    }

    pub fn total_rate(&self) -> f64 {
        self.data.flows.iter().map(|f| f.rate).sum()
    }

    /// Per-unit demand of flow `f` for every resource (δ_f).
    pub fn demand(&self, f: usize) -> &[f64] {
        &self.delta[f]
    }

    pub fn capacity(&self, v: usize) -> &[f64] {
        &self.capacity[v]
    }

    pub fn has_paths(&self) -> bool {
        self.paths.iter().all(Option::is_some)
    }

    pub fn path(&self, f: usize) -> Option<&[usize]> {
        self.paths[f].as_deref()
    }

    /// Path of flow `f`, failing if it has not been computed or given.
    pub fn require_path(&self, f: usize) -> Result<&[usize]> {
        self.path(f)
            .ok_or_else(|| Error::MissingPath(self.flow_id(f).to_string()))
    }

    /// Checks that every flow has a path.
    pub fn ensure_paths(&self) -> Result<()> {
        match self.paths.iter().position(Option::is_none) {
            Some(f) => Err(Error::MissingPath(self.flow_id(f).to_string())),
            None => Ok(()),
        }
    }

    /// δ_f^r: total resource `r` needed to process one unit of flow `f`.
    pub fn flow_total_demand(&self, flow_id: &str, resource_id: &str) -> Result<f64> {
        let f = self.flow_index(flow_id)?;
        let r = self.resource_index(resource_id)?;
        Ok(self.delta[f][r])
    }

    /// Flows whose path touches at least one node of `set`.
    pub fn covered_flows(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        (0..self.num_flows())
            .filter(|&f| {
                self.path(f)
                    .is_some_and(|p| p.iter().any(|v| set.contains(v)))
            })
            .collect()
    }

    /// Same as [`Instance::covered_flows`] but on ids.
    pub fn covered_flow_ids(&self, node_ids: &[&str]) -> Result<BTreeSet<String>> {
        let set = node_ids
            .iter()
            .map(|id| self.node_index(id))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(self
            .covered_flows(&set)
            .into_iter()
            .map(|f| self.flow_id(f).to_string())
            .collect())
    }

    /// d_max: the largest single-flow demand `δ_f^r λ_f` over all flows and resources.
    pub fn max_flow_demand(&self) -> f64 {
        self.data
            .flows
            .iter()
            .zip(&self.delta)
            .flat_map(|(f, d)| d.iter().map(move |x| x * f.rate))
            .fold(0.0, f64::max)
    }

    /// Returns a copy where every node has capacity `z · d_max` on every resource.
    pub fn with_scaled_capacities(&self, z: f64) -> Result<Instance> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidArgument(format!("stretch {z} must be positive")));
        }
        let cap = z * self.max_flow_demand();
        let mut data = self.data.clone();
        for n in &mut data.nodes {
            n.capacity = data.resources.iter().map(|r| (r.clone(), cap)).collect();
        }
        Instance::new(data)
    }

    /// Replaces the stored paths (node indices, one per flow).
    pub(crate) fn with_paths(&self, paths: Vec<Vec<usize>>) -> Result<Instance> {
        let mut data = self.data.clone();
        for (flow, p) in data.flows.iter_mut().zip(paths) {
            flow.path = Some(p.into_iter().map(|v| self.node_id(v).to_string()).collect());
        }
        Instance::new(data)
    }
}

fn lookup(map: &HashMap<String, usize>, kind: &'static str, id: &str) -> Result<usize> {
    map.get(id).copied().ok_or_else(|| Error::UnknownId {
        kind,
        id: id.to_string(),
    })
}

fn resolve_path(
    node_pos: &HashMap<String, usize>,
    adjacency: &[Vec<(usize, f64)>],
    flow: &Flow,
    path: &[String],
    src: usize,
    dst: usize,
) -> Result<Vec<usize>> {
    let idx = path
        .iter()
        .map(|id| lookup(node_pos, "node", id))
        .collect::<Result<Vec<_>>>()?;
    if idx.first() != Some(&src) || idx.last() != Some(&dst) {
        return Err(Error::Validation(format!(
            "path of flow `{}` does not run from `{}` to `{}`",
            flow.id, flow.src, flow.dst
        )));
    }
    let mut seen = HashSet::new();
    for &v in &idx {
        if !seen.insert(v) {
            return Err(Error::Validation(format!(
                "path of flow `{}` visits a node twice",
                flow.id
            )));
        }
    }
    for (i, w) in idx.windows(2).enumerate() {
        if !adjacency[w[0]].iter().any(|&(n, _)| n == w[1]) {
            return Err(Error::Validation(format!(
                "path of flow `{}` uses missing link {}-{}",
                flow.id,
                path[i],
                path[i + 1]
            )));
        }
    }
    Ok(idx)
}
