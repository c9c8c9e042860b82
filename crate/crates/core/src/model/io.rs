use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, Flow, Instance, InstanceData, NetworkFunction, Node};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    Json,
    SndlibNative,
}

impl std::str::FromStr for InstanceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(InstanceFormat::Json),
            "sndlib" | "sndlib_native" => Ok(InstanceFormat::SndlibNative),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// Functions and capacities merged into an SNDlib topology, which carries neither.
///
/// ```json
/// {
///   "resources": ["cpu", "mem"],
///   "functions": [{"id": "fw", "beta": {"cpu": 2.0, "mem": 1.0}}],
///   "default_capacity": {"cpu": 100.0, "mem": 80.0},
///   "capacity": {"ATLAM5": {"cpu": 50.0, "mem": 50.0}},
///   "default_functions": ["fw"],
///   "flow_functions": {"ATLAM5_CHINng": ["fw"]}
/// }
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CapacityConfig {
    pub resources: Vec<String>,
    pub functions: Vec<NetworkFunction>,
    #[serde(default)]
    pub default_capacity: BTreeMap<String, f64>,
    #[serde(default)]
    pub capacity: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    pub default_functions: Vec<String>,
    #[serde(default)]
    pub flow_functions: BTreeMap<String, Vec<String>>,
}

impl CapacityConfig {
    /// Placeholder used when an SNDlib file is loaded without a config: one
    /// resource `r1`, one unit-demand function, zero capacity everywhere.
    /// Capacities are expected to be re-derived from a stretch value later.
    pub fn placeholder() -> Self {
        let r = "r1".to_string();
        CapacityConfig {
            resources: vec![r.clone()],
            functions: vec![NetworkFunction {
                id: "phi".into(),
                beta: [(r.clone(), 1.0)].into(),
            }],
            default_capacity: [(r, 0.0)].into(),
            capacity: BTreeMap::new(),
            default_functions: vec!["phi".into()],
            flow_functions: BTreeMap::new(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| json_error(&e))
    }
}

fn json_error(e: &serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        reason: e.to_string(),
    }
}

pub fn parse_json(text: &str) -> Result<Instance> {
    let data: InstanceData = serde_json::from_str(text).map_err(|e| json_error(&e))?;
    Instance::new(data)
}

pub fn to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(instance.data()).expect("instance data is always serializable")
}

pub fn save_json(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(instance))?;
    Ok(())
}

/// Reads an instance from disk. `config` only applies to SNDlib files.
pub fn load_instance(
    path: impl AsRef<Path>,
    format: InstanceFormat,
    config: Option<&CapacityConfig>,
) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    match format {
        InstanceFormat::Json => parse_json(&text),
        InstanceFormat::SndlibNative => {
            let topo = parse_sndlib(&text)?;
            let placeholder;
            let config = match config {
                Some(c) => c,
                None => {
                    placeholder = CapacityConfig::placeholder();
                    &placeholder
                }
            };
            topo.into_instance(config)
        }
    }
}

/// Nodes, links and demands of an SNDlib native file.
#[derive(Debug, Clone, PartialEq)]
pub struct SndlibTopology {
    pub nodes: Vec<String>,
    pub links: Vec<Edge>,
    /// `(id, source, target, value)`
    pub demands: Vec<(String, String, String, f64)>,
}

impl SndlibTopology {
    pub fn into_instance(self, config: &CapacityConfig) -> Result<Instance> {
        let nodes = self
            .nodes
            .iter()
            .map(|id| {
                let capacity = config
                    .capacity
                    .get(id)
                    .unwrap_or(&config.default_capacity)
                    .clone();
                Node {
                    id: id.clone(),
                    capacity,
                }
            })
            .collect();
        let flows = self
            .demands
            .into_iter()
            // zero demands carry no traffic and would violate λ_f > 0
            .filter(|d| d.3 > 0.0)
            .map(|(id, src, dst, rate)| {
                let functions = config
                    .flow_functions
                    .get(&id)
                    .unwrap_or(&config.default_functions)
                    .clone();
                Flow {
                    id,
                    src,
                    dst,
                    rate,
                    functions,
                    path: None,
                }
            })
            .collect();
        Instance::new(InstanceData {
            resources: config.resources.clone(),
            nodes,
            edges: self.links,
            functions: config.functions.clone(),
            flows,
        })
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Nodes,
    Links,
    Demands,
    Skipped,
}

/// Parses the NODES, LINKS and DEMANDS sections; other sections are skipped.
pub fn parse_sndlib(text: &str) -> Result<SndlibTopology> {
    let mut topo = SndlibTopology {
        nodes: Vec::new(),
        links: Vec::new(),
        demands: Vec::new(),
    };
    let mut section = Section::None;
    let mut skip_depth = 0i32;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with('?') {
            continue;
        }
        let err = |reason: &str| Error::Parse {
            line: line_no,
            reason: reason.to_string(),
        };
        match section {
            Section::None => {
                let mut toks = line.split_whitespace();
                let name = toks.next().unwrap_or("");
                if toks.next() != Some("(") {
                    return Err(err("expected `<SECTION> (`"));
                }
                section = match name {
                    "NODES" => Section::Nodes,
                    "LINKS" => Section::Links,
                    "DEMANDS" => Section::Demands,
                    _ => {
                        skip_depth = 1 + paren_balance(toks);
                        if skip_depth <= 0 {
                            Section::None
                        } else {
                            Section::Skipped
                        }
                    }
                };
            }
            Section::Skipped => {
                skip_depth += paren_balance(line.split_whitespace());
                if skip_depth <= 0 {
                    section = Section::None;
                }
            }
            _ if line == ")" => section = Section::None,
            Section::Nodes => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.is_empty() || toks.get(1).is_some_and(|t| *t != "(") {
                    return Err(err("malformed NODES entry"));
                }
                topo.nodes.push(toks[0].to_string());
            }
            Section::Links => {
                // id ( u v ) pre_cap pre_cap_cost routing_cost setup_cost ( modules )
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < 8 || toks[1] != "(" || toks[4] != ")" {
                    return Err(err("malformed LINKS entry"));
                }
                let cost: f64 = toks[7]
                    .parse()
                    .map_err(|_| err("routing cost is not a number"))?;
                topo.links.push(Edge {
                    u: toks[2].to_string(),
                    v: toks[3].to_string(),
                    cost,
                });
            }
            Section::Demands => {
                // id ( u v ) routing_unit value max_path_length
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < 7 || toks[1] != "(" || toks[4] != ")" {
                    return Err(err("malformed DEMANDS entry"));
                }
                let value: f64 = toks[6]
                    .parse()
                    .map_err(|_| err("demand value is not a number"))?;
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(err("demand value must be non-negative"));
                }
                topo.demands.push((
                    toks[0].to_string(),
                    toks[2].to_string(),
                    toks[3].to_string(),
                    value,
                ));
            }
        }
    }
    if section != Section::None {
        return Err(Error::Parse {
            line: text.lines().count(),
            reason: "unterminated section".into(),
        });
    }
    Ok(topo)
}

fn paren_balance<'a>(toks: impl Iterator<Item = &'a str>) -> i32 {
    toks.map(|t| {
        t.chars()
            .map(|c| match c {
                '(' => 1,
                ')' => -1,
                _ => 0,
            })
            .sum::<i32>()
    })
    .sum()
}
