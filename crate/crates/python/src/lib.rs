//! Python bindings: instances, fractional allocation, placement, integral
//! allocation, exact baselines and sweeps. Nodes and flows are addressed by
//! their string ids on the Python side.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nfvplace::experiment::{self, Algorithm, ExperimentConfig, InstanceSource};
use nfvplace::fractional::{full_fractional_allocation, iterative_allocation};
use nfvplace::integral::{self, normalize, processed_traffic};
use nfvplace::model::{self, InstanceFormat, Topology};
use nfvplace::{exact, placement, Error, Instance, NodeSequence, NodeSet, PathMetric};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NumericalFailure(_) | Error::UnexpectedLpStatus(_) | Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

/// A validated problem instance.
#[pyclass(name = "Instance", module = "nfvplace", frozen)]
#[derive(Clone)]
struct PyInstance {
    inner: Instance,
}

impl PyInstance {
    fn sequence(&self, ids: Vec<String>) -> PyResult<NodeSequence> {
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        NodeSequence::from_ids(&self.inner, &refs).map_err(to_py)
    }

    fn set(&self, ids: Vec<String>) -> PyResult<NodeSet> {
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        NodeSet::from_ids(&self.inner, &refs).map_err(to_py)
    }

    fn ids(&self, nodes: impl IntoIterator<Item = usize>) -> Vec<String> {
        nodes.into_iter().map(|v| self.inner.node_id(v).to_string()).collect()
    }
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: model::parse_json(text).map_err(to_py)?,
        })
    }

    /// Loads a `json` or `sndlib` file; `capacity_config` applies to SNDlib.
    #[staticmethod]
    #[pyo3(signature = (path, format = "json", capacity_config = None))]
    fn load(path: PathBuf, format: &str, capacity_config: Option<PathBuf>) -> PyResult<Self> {
        let config = capacity_config
            .map(model::CapacityConfig::load)
            .transpose()
            .map_err(to_py)?;
        let inner = model::load_instance(path, parse::<InstanceFormat>(format)?, config.as_ref()).map_err(to_py)?;
        Ok(PyInstance { inner })
    }

    /// A synthetic topology with random traffic and demands drawn from
    /// `demand_range`, capacities `z · d_max`, and shortest paths.
    #[staticmethod]
    #[pyo3(signature = (topology, nodes, flows, z, seed, demand_range = (0.0, 20.0), resources = 2))]
    fn generate(
        topology: &str,
        nodes: usize,
        flows: usize,
        z: f64,
        seed: u64,
        demand_range: (f64, f64),
        resources: usize,
    ) -> PyResult<Self> {
        let base = model::synthetic_instance(parse::<Topology>(topology)?, nodes, flows, seed).map_err(to_py)?;
        let base = model::compute_paths(&base, PathMetric::RoutingCost).map_err(to_py)?;
        let inner = model::generate_demands(&base, demand_range, resources, z, seed).map_err(to_py)?;
        Ok(PyInstance { inner })
    }

    /// The three-node backward-bound instance with known allocation values.
    #[staticmethod]
    fn backward_bound() -> Self {
        PyInstance {
            inner: model::fixtures::backward_bound_instance(),
        }
    }

    fn to_json(&self) -> String {
        model::to_json(&self.inner)
    }

    #[pyo3(signature = (metric = "cost"))]
    fn compute_paths(&self, metric: &str) -> PyResult<Self> {
        let inner = model::compute_paths(&self.inner, parse::<PathMetric>(metric)?).map_err(to_py)?;
        Ok(PyInstance { inner })
    }

    fn with_scaled_capacities(&self, z: f64) -> PyResult<Self> {
        Ok(PyInstance {
            inner: self.inner.with_scaled_capacities(z).map_err(to_py)?,
        })
    }

    #[getter]
    fn node_ids(&self) -> Vec<String> {
        self.ids(0..self.inner.num_nodes())
    }

    #[getter]
    fn flow_ids(&self) -> Vec<String> {
        self.inner.flows().iter().map(|f| f.id.clone()).collect()
    }

    #[getter]
    fn resources(&self) -> Vec<String> {
        self.inner.resources().to_vec()
    }

    #[getter]
    fn total_rate(&self) -> f64 {
        self.inner.total_rate()
    }

    fn flow_total_demand(&self, flow: &str, resource: &str) -> PyResult<f64> {
        self.inner.flow_total_demand(flow, resource).map_err(to_py)
    }

    fn covered_flows(&self, nodes: Vec<String>) -> PyResult<Vec<String>> {
        let refs: Vec<&str> = nodes.iter().map(String::as_str).collect();
        Ok(self.inner.covered_flow_ids(&refs).map_err(to_py)?.into_iter().collect())
    }

    /// Sequential allocation of `sequence`: `(per-node totals, value)`.
    fn iterative_allocation(&self, sequence: Vec<String>) -> PyResult<(Vec<f64>, f64)> {
        let a = iterative_allocation(&self.inner, &self.sequence(sequence)?).map_err(to_py)?;
        Ok((a.node_totals, a.value))
    }

    /// Joint fractional allocation value of a node set.
    fn full_fractional_allocation(&self, nodes: Vec<String>) -> PyResult<f64> {
        Ok(full_fractional_allocation(&self.inner, &self.set(nodes)?).map_err(to_py)?.0)
    }

    /// Greedy placement: `(node ids in pick order, value, marginals)`.
    /// `objective` is `sequence` (SSG) or `set` (SG heuristic).
    #[pyo3(signature = (k, objective = "sequence"))]
    fn place(&self, py: Python<'_>, k: usize, objective: &str) -> PyResult<(Vec<String>, f64, Vec<f64>)> {
        let run = match objective {
            "sequence" => placement::ssg,
            "set" => placement::sg,
            other => return Err(PyValueError::new_err(format!("unknown objective `{other}`"))),
        };
        let r = py.allow_threads(|| run(&self.inner, k)).map_err(to_py)?;
        Ok((self.ids(r.sequence.as_slice().iter().copied()), r.value, r.marginals))
    }

    /// Whole-flow allocation on `nodes` with `pra` or `nra` (nodes visited
    /// in the given order). Returns `(processed traffic, {flow: node})`.
    #[pyo3(signature = (nodes, method = "pra"))]
    fn allocate(&self, nodes: Vec<String>, method: &str) -> PyResult<(f64, Vec<(String, String)>)> {
        let order = self.sequence(nodes)?;
        let set = order.to_set();
        let norm = normalize(&self.inner, &set).map_err(to_py)?;
        let out = match method {
            "pra" => integral::pra(&self.inner, &norm, &set),
            "nra" => integral::nra(&self.inner, &norm, &set, &order),
            other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
        }
        .map_err(to_py)?;
        let placed = out
            .node_of
            .iter()
            .enumerate()
            .filter_map(|(f, v)| v.map(|v| (self.inner.flow_id(f).to_string(), self.inner.node_id(v).to_string())))
            .collect();
        Ok((processed_traffic(&self.inner, &out.assignment), placed))
    }

    /// Exact optimum with at most `k` nodes: `(node ids, served flow ids, value)`.
    fn optimal(&self, py: Python<'_>, k: usize) -> PyResult<(Vec<String>, Vec<String>, f64)> {
        let r = py.allow_threads(|| exact::optimal_exact(&self.inner, k)).map_err(to_py)?;
        let flows = r.served_flows.iter().map(|&f| self.inner.flow_id(f).to_string()).collect();
        Ok((self.ids(r.best_set.iter()), flows, r.value))
    }

    /// Best sequential allocation value over sequences of length at most `k`.
    fn optimal_sequence(&self, py: Python<'_>, k: usize) -> PyResult<(Vec<String>, f64)> {
        let (s, v) = py.allow_threads(|| exact::optimal_sequence_r4(&self.inner, k)).map_err(to_py)?;
        Ok((self.ids(s.as_slice().iter().copied()), v))
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(nodes={}, flows={}, resources={})",
            self.inner.num_nodes(),
            self.inner.num_flows(),
            self.inner.num_resources()
        )
    }
}

/// Runs a sweep on `instance` and returns the CSV text. Without `z`, the
/// instance's capacities are used as given.
#[pyfunction]
#[pyo3(signature = (instance, budgets, algorithms, z = None, timing = false))]
fn sweep_csv(
    py: Python<'_>,
    instance: &PyInstance,
    budgets: Vec<usize>,
    algorithms: Vec<String>,
    z: Option<Vec<f64>>,
    timing: bool,
) -> PyResult<String> {
    let mut config = ExperimentConfig::new(InstanceSource::Given {
        name: "python".into(),
        instance: Box::new(instance.inner.clone()),
    });
    config.budgets = budgets;
    config.algorithms = algorithms
        .iter()
        .map(|a| parse::<Algorithm>(a))
        .collect::<PyResult<_>>()?;
    config.z_values = z.unwrap_or_default();
    config.timing = timing;
    let records = py.allow_threads(|| experiment::run_sweep(&config)).map_err(to_py)?;
    let mut buf = Vec::new();
    experiment::write_csv(&records, &mut buf).map_err(to_py)?;
    String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn nfvplace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    Ok(())
}
