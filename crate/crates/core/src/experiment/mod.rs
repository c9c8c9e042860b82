//! Parameter sweeps over placement and allocation algorithms.
//!
//! A sweep visits every `(seed, Z, k, algorithm)` cell in that nested order.
//! For each seed the flows and their demands are fixed; each `Z` re-derives
//! every node capacity as `Z · d_max`. Each cell reports the processed
//! traffic, i.e. the total rate of flows served in full.

mod cli;
mod format;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cli::{main, run_cli};
pub use format::{format_float, write_csv, CSV_HEADER};

use crate::error::{Error, Result};
use crate::exact::optimal_exact;
use crate::integral::{normalize, nra, pra, processed_traffic};
use crate::model::{
    compute_missing_paths, compute_paths, generate_demands, load_instance, synthetic_instance,
    CapacityConfig, Instance, InstanceFormat, PathMetric, Topology,
};
use crate::placement::{sg, ssg, PlacementResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    SsgPra,
    SsgNra,
    SgPra,
    SgNra,
    Optimal,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::SsgPra,
        Algorithm::SsgNra,
        Algorithm::SgPra,
        Algorithm::SgNra,
        Algorithm::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SsgPra => "ssg-pra",
            Algorithm::SsgNra => "ssg-nra",
            Algorithm::SgPra => "sg-pra",
            Algorithm::SgNra => "sg-nra",
            Algorithm::Optimal => "optimal",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    /// An instance file. With `synthetic_demands`, functions are replaced by
    /// per-seed random draws; otherwise the file's demands are kept and only
    /// capacities follow `Z`.
    File {
        path: PathBuf,
        format: InstanceFormat,
        capacity_config: Option<PathBuf>,
        synthetic_demands: bool,
    },
    /// A generated topology with random traffic; demands are always drawn.
    Generate {
        topology: Topology,
        nodes: usize,
        flows: usize,
    },
    /// An instance already in memory (used by tests and bindings).
    Given { name: String, instance: Box<Instance> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: InstanceSource,
    pub budgets: Vec<usize>,
    /// Stretch values. Empty means "keep the instance's capacities", which is
    /// only allowed for file or in-memory instances without synthetic demands.
    pub z_values: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub demand_range: (f64, f64),
    pub num_resources: usize,
    pub path_metric: PathMetric,
    pub output: Option<PathBuf>,
    /// Record wall-clock time per cell; when off, `runtime_ms` is 0 so that
    /// identical configs give byte-identical CSV.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(source: InstanceSource) -> Self {
        ExperimentConfig {
            source,
            budgets: Vec::new(),
            z_values: Vec::new(),
            algorithms: Vec::new(),
            seeds: vec![1],
            demand_range: (0.0, 20.0),
            num_resources: 2,
            path_metric: PathMetric::RoutingCost,
            output: None,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.budgets.is_empty() {
            return bad("at least one budget is required");
        }
        if self.budgets.contains(&0) {
            return bad("budgets must be at least 1");
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if let Some(z) = self.z_values.iter().find(|z| !(**z > 1.0 && z.is_finite())) {
            return Err(Error::InvalidArgument(format!("stretch Z = {z} must exceed 1")));
        }
        let (lo, hi) = self.demand_range;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidRange { lo, hi });
        }
        if self.num_resources == 0 {
            return bad("at least one resource is required");
        }
        if self.z_values.is_empty() && self.synthetic_demands() {
            return bad("synthetic demands need at least one Z value to set capacities");
        }
        if let InstanceSource::Generate { nodes, topology, .. } = &self.source {
            if *nodes == 0 && *topology != Topology::Abilene {
                return bad("a generated topology needs at least one node");
            }
        }
        Ok(())
    }

    fn synthetic_demands(&self) -> bool {
        match &self.source {
            InstanceSource::File { synthetic_demands, .. } => *synthetic_demands,
            InstanceSource::Generate { .. } => true,
            InstanceSource::Given { .. } => false,
        }
    }

    /// Name written to the `instance` column.
    pub fn instance_name(&self) -> String {
        match &self.source {
            InstanceSource::File { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            InstanceSource::Generate {
                topology: Topology::Abilene,
                ..
            } => "abilene".into(),
            InstanceSource::Generate { topology, nodes, flows } => {
                let kind = match topology {
                    Topology::Line => "line",
                    Topology::Ring => "ring",
                    Topology::Random => "random",
                    Topology::Abilene => unreachable!(),
                };
                format!("{kind}-n{nodes}-f{flows}")
            }
            InstanceSource::Given { name, .. } => name.clone(),
        }
    }

    /// The instance a sweep cell with this `seed` and `z` runs on.
    pub fn cell_instance(&self, seed: u64, z: Option<f64>) -> Result<Instance> {
        cell_instance(self, &base_instance(self, seed)?, seed, z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub k: usize,
    /// `None` when the instance's own capacities were used.
    pub z: Option<f64>,
    pub seed: u64,
    /// `None` when the cell failed; see `status`.
    pub processed: Option<f64>,
    pub total: f64,
    pub pct: Option<f64>,
    pub runtime_ms: f64,
    pub placed_nodes: Vec<String>,
    /// `ok`, or the error that stopped this cell.
    pub status: String,
}

/// Base instance for one seed, with paths; capacities are set per `Z` later.
fn base_instance(config: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let inst = match &config.source {
        InstanceSource::File {
            path,
            format,
            capacity_config,
            ..
        } => {
            let cfg = capacity_config.as_ref().map(CapacityConfig::load).transpose()?;
            load_instance(path, *format, cfg.as_ref())?
        }
        InstanceSource::Generate { topology, nodes, flows } => {
            let inst = synthetic_instance(*topology, *nodes, *flows, seed)?;
            return compute_paths(&inst, config.path_metric);
        }
        InstanceSource::Given { instance, .. } => (**instance).clone(),
    };
    compute_missing_paths(&inst, config.path_metric)
}

/// The instance for one `(seed, Z)` group; `z = None` keeps capacities.
fn cell_instance(config: &ExperimentConfig, base: &Instance, seed: u64, z: Option<f64>) -> Result<Instance> {
    match z {
        None => Ok(base.clone()),
        Some(z) if config.synthetic_demands() => {
            generate_demands(base, config.demand_range, config.num_resources, z, seed)
        }
        Some(z) => base.with_scaled_capacities(z),
    }
}

fn placed_ids(instance: &Instance, nodes: impl IntoIterator<Item = usize>) -> Vec<String> {
    nodes.into_iter().map(|v| instance.node_id(v).to_string()).collect()
}

/// Outcome of one algorithm on one instance and budget.
struct CellOutcome {
    processed: f64,
    placed: Vec<String>,
}

fn allocate(instance: &Instance, placement: &PlacementResult, node_based: bool) -> Result<CellOutcome> {
    let norm = normalize(instance, &placement.set)?;
    let out = if node_based {
        nra(instance, &norm, &placement.set, &placement.sequence)?
    } else {
        pra(instance, &norm, &placement.set)?
    };
    Ok(CellOutcome {
        processed: processed_traffic(instance, &out.assignment),
        placed: placed_ids(instance, placement.sequence.as_slice().iter().copied()),
    })
}

/// Runs every algorithm for one `(seed, Z, k)` group, sharing placements
/// between the two allocators that use them.
fn run_group(
    config: &ExperimentConfig,
    instance: &Result<Instance>,
    seed: u64,
    z: Option<f64>,
    k: usize,
) -> Vec<RunRecord> {
    let name = config.instance_name();
    let total = instance.as_ref().map_or(0.0, |i| i.total_rate());
    let mut ssg_cache: Option<(Result<PlacementResult>, f64)> = None;
    let mut sg_cache: Option<(Result<PlacementResult>, f64)> = None;
    let mut records = Vec::new();
    for &alg in &config.algorithms {
        let start = Instant::now();
        // time of a placement computed for an earlier algorithm of this group
        let mut reused_ms = 0.0;
        let outcome = instance.as_ref().map_err(Clone::clone).and_then(|inst| {
            let mut placed = |cache: &mut Option<(Result<PlacementResult>, f64)>,
                              f: fn(&Instance, usize) -> Result<PlacementResult>| {
                if let Some((res, ms)) = cache {
                    reused_ms = *ms;
                    return res.clone();
                }
                let t = Instant::now();
                let res = f(inst, k);
                *cache = Some((res.clone(), t.elapsed().as_secs_f64() * 1e3));
                res
            };
            match alg {
                Algorithm::SsgPra => allocate(inst, &placed(&mut ssg_cache, ssg)?, false),
                Algorithm::SsgNra => allocate(inst, &placed(&mut ssg_cache, ssg)?, true),
                Algorithm::SgPra => allocate(inst, &placed(&mut sg_cache, sg)?, false),
                Algorithm::SgNra => allocate(inst, &placed(&mut sg_cache, sg)?, true),
                Algorithm::Optimal => optimal_exact(inst, k).map(|r| CellOutcome {
                    processed: r.value,
                    placed: placed_ids(inst, r.best_set.iter()),
                }),
            }
        });
        let runtime_ms = if config.timing {
            start.elapsed().as_secs_f64() * 1e3 + reused_ms
        } else {
            0.0
        };
        let record = match outcome {
            Ok(o) => RunRecord {
                instance: name.clone(),
                algorithm: alg,
                k,
                z,
                seed,
                processed: Some(o.processed),
                total,
                pct: Some(if total > 0.0 { o.processed / total } else { 0.0 }),
                runtime_ms,
                placed_nodes: o.placed,
                status: "ok".into(),
            },
            Err(e) => RunRecord {
                instance: name.clone(),
                algorithm: alg,
                k,
                z,
                seed,
                processed: None,
                total,
                pct: None,
                runtime_ms,
                placed_nodes: Vec::new(),
                status: format!("error: {e}"),
            },
        };
        records.push(record);
    }
    records
}

/// Runs the sweep and, if configured, writes the CSV. Cell failures are
/// recorded in the `status` column; only configuration and instance-loading
/// problems abort the sweep.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let zs: Vec<Option<f64>> = if config.z_values.is_empty() {
        vec![None]
    } else {
        config.z_values.iter().map(|&z| Some(z)).collect()
    };
    let bases = config
        .seeds
        .iter()
        .map(|&seed| base_instance(config, seed))
        .collect::<Result<Vec<_>>>()?;
    let groups: Vec<(usize, Option<f64>, usize)> = (0..config.seeds.len())
        .flat_map(|s| zs.iter().flat_map(move |&z| config.budgets.iter().map(move |&k| (s, z, k))))
        .collect();
    let records: Vec<RunRecord> = groups
        .par_iter()
        .map(|&(s, z, k)| {
            let seed = config.seeds[s];
            let instance = cell_instance(config, &bases[s], seed, z);
            run_group(config, &instance, seed, z, k)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    if let Some(path) = &config.output {
        let file = std::fs::File::create(path)?;
        write_csv(&records, file)?;
    }
    Ok(records)
}

#[cfg(test)]
mod tests;
