use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser};

use super::{format_float, run_sweep, write_csv, Algorithm, ExperimentConfig, InstanceSource};
use crate::error::{Error, Result};
use crate::model::{InstanceFormat, PathMetric, Topology};

/// Place VNF-nodes and allocate flows; sweep budgets and resource stretch.
///
/// Without --output, a single-cell run prints the processed traffic and
/// larger sweeps print CSV to stdout.
#[derive(Debug, Parser)]
#[command(name = "nfvplace", version)]
#[command(group(ArgGroup::new("source").args(["instance", "generate"]).required(true)))]
struct Args {
    /// Instance file to load.
    #[arg(long, value_name = "PATH")]
    instance: Option<PathBuf>,

    /// Generate a synthetic topology instead of loading one.
    #[arg(long)]
    generate: bool,

    /// Node count for --generate (ignored for abilene).
    #[arg(long, value_name = "N", default_value_t = 12)]
    nodes: usize,

    /// Flow count for --generate (abilene always uses all 144 pairs).
    #[arg(long, value_name = "F", default_value_t = 20)]
    flows: usize,

    /// Topology for --generate: line, ring, random or abilene.
    #[arg(long, default_value = "random", value_parser = parse_via::<Topology>)]
    topology: Topology,

    /// Format of --instance: json or sndlib.
    #[arg(long, default_value = "json", value_parser = parse_via::<InstanceFormat>)]
    format: InstanceFormat,

    /// Functions and capacities for SNDlib files.
    #[arg(long, value_name = "PATH")]
    capacity_config: Option<PathBuf>,

    /// Replace the loaded instance's demands with random draws per seed.
    #[arg(long)]
    synthetic_demands: bool,

    /// Budgets k, comma separated.
    #[arg(long, value_name = "K[,K...]", value_delimiter = ',', required = true)]
    budget: Vec<usize>,

    /// Resource stretch values Z > 1, comma separated. Omit to keep the
    /// instance's capacities.
    #[arg(long, value_name = "Z[,Z...]", value_delimiter = ',')]
    z: Vec<f64>,

    /// Algorithms: ssg-pra, ssg-nra, sg-pra, sg-nra, optimal.
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "ssg-pra,ssg-nra",
          value_parser = parse_via::<Algorithm>)]
    algorithm: Vec<Algorithm>,

    /// Seeds, comma separated.
    #[arg(long, value_name = "S[,S...]", value_delimiter = ',', default_value = "1")]
    seed: Vec<u64>,

    /// Per-unit demand range for synthetic draws.
    #[arg(long, value_name = "LO:HI", default_value = "0:20", value_parser = parse_range)]
    demand_range: (f64, f64),

    /// Number of resources for synthetic draws.
    #[arg(long, value_name = "R", default_value_t = 2)]
    resources: usize,

    /// Shortest-path metric: cost or hops.
    #[arg(long, default_value = "cost", value_parser = parse_via::<PathMetric>)]
    path_metric: PathMetric,

    /// CSV output file.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Write 0 in the runtime column so identical runs give identical files.
    #[arg(long)]
    no_timing: bool,
}

fn parse_via<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(lo)?, num(hi)?))
}

impl Args {
    fn into_config(self) -> ExperimentConfig {
        let source = match self.instance {
            Some(path) => InstanceSource::File {
                path,
                format: self.format,
                capacity_config: self.capacity_config,
                synthetic_demands: self.synthetic_demands,
            },
            None => InstanceSource::Generate {
                topology: self.topology,
                nodes: self.nodes,
                flows: self.flows,
            },
        };
        ExperimentConfig {
            source,
            budgets: self.budget,
            z_values: self.z,
            algorithms: self.algorithm,
            seeds: self.seed,
            demand_range: self.demand_range,
            num_resources: self.resources,
            path_metric: self.path_metric,
            output: self.output,
            timing: !self.no_timing,
        }
    }
}

/// Runs the command line with explicit output streams. Returns the exit
/// code: 0 on success, 1 for usage or configuration errors, 2 when the run
/// itself fails.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let config = args.into_config();
    if let Err(e) = config.validate() {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    match execute(&config, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(config: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let records = run_sweep(config)?;
    if config.output.is_some() {
        return Ok(());
    }
    match records.as_slice() {
        [only] => {
            let value = only.processed.map(format_float).unwrap_or_else(|| only.status.clone());
            writeln!(out, "{value}")?;
        }
        _ => write_csv(&records, out)?,
    }
    Ok(())
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
