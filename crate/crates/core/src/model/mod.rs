//! Problem instances: network, resources, functions and flows.

mod generate;
mod instance;
mod io;
mod paths;

pub mod fixtures;

pub use generate::{generate_demands, resource_ids, synthetic_instance, topology, Topology};
pub use instance::{Edge, Flow, Instance, InstanceData, NetworkFunction, Node};
pub use io::{
    load_instance, parse_json, parse_sndlib, save_json, to_json, CapacityConfig, InstanceFormat,
    SndlibTopology,
};
pub use paths::{compute_missing_paths, compute_paths, path_cost, PathMetric};
