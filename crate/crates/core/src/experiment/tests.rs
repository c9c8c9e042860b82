use super::*;
use crate::model::fixtures::backward_bound_instance;

fn fixture_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::new(InstanceSource::Given {
        name: "fig4".into(),
        instance: Box::new(backward_bound_instance()),
    });
    c.budgets = vec![2];
    c.algorithms = vec![Algorithm::Optimal];
    c.timing = false;
    c
}

#[test]
fn single_cell_optimal_on_fixture() {
    let records = run_sweep(&fixture_config()).unwrap();
    assert_eq!(records.len(), 1);
    let r = &records[0];
    assert_eq!(r.status, "ok");
    assert_eq!(r.z, None);
    assert!((r.pct.unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r.placed_nodes, ["v2", "v3"]);
}

#[test]
fn empty_algorithm_list_rejected() {
    let mut c = fixture_config();
    c.algorithms.clear();
    assert!(matches!(run_sweep(&c), Err(Error::InvalidArgument(_))));
    let mut c = fixture_config();
    c.z_values = vec![1.0];
    assert!(run_sweep(&c).is_err());
}

#[test]
fn cartesian_count_and_order() {
    let mut c = ExperimentConfig::new(InstanceSource::Generate {
        topology: Topology::Ring,
        nodes: 5,
        flows: 6,
    });
    c.seeds = vec![3, 4];
    c.z_values = vec![1.5, 2.0, 4.0];
    c.budgets = vec![1, 2];
    c.algorithms = vec![Algorithm::SsgPra, Algorithm::SsgNra];
    c.timing = false;
    let records = run_sweep(&c).unwrap();
    assert_eq!(records.len(), 24);
    let keys: Vec<_> = records.iter().map(|r| (r.seed, r.z.unwrap().to_bits(), r.k, r.algorithm)).collect();
    let mut expected = Vec::new();
    for s in [3, 4] {
        for z in [1.5f64, 2.0, 4.0] {
            for k in [1, 2] {
                for a in [Algorithm::SsgPra, Algorithm::SsgNra] {
                    expected.push((s, z.to_bits(), k, a));
                }
            }
        }
    }
    assert_eq!(keys, expected);
    assert!(records.iter().all(|r| r.status == "ok"));
    assert!(records.iter().all(|r| (0.0..=1.0).contains(&r.pct.unwrap())));
}

#[test]
fn identical_configs_give_identical_csv() {
    let mut c = ExperimentConfig::new(InstanceSource::Generate {
        topology: Topology::Random,
        nodes: 6,
        flows: 8,
    });
    c.z_values = vec![2.0, 3.0];
    c.budgets = vec![2];
    c.algorithms = vec![Algorithm::SsgPra, Algorithm::SgNra];
    c.timing = false;
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_csv(&run_sweep(&c).unwrap(), &mut a).unwrap();
    write_csv(&run_sweep(&c).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("instance,algorithm,k,z,seed,processed,total,pct,runtime_ms,placed_nodes,status\n"));
}

#[test]
fn cell_errors_are_recorded_not_raised() {
    // Capacity equals the flow's demand: Z = 1, which the allocators reject.
    let mut c = ExperimentConfig::new(InstanceSource::Given {
        name: "tight".into(),
        instance: Box::new(crate::model::fixtures::line_instance(&[("a", &[2.0])], &[("f", &["a"], 1.0, &[2.0])])),
    });
    c.budgets = vec![1];
    c.algorithms = vec![Algorithm::SsgPra, Algorithm::Optimal];
    let records = run_sweep(&c).unwrap();
    assert!(records[0].status.starts_with("error:"), "{}", records[0].status);
    assert_eq!(records[0].processed, None);
    assert_eq!(records[1].status, "ok");
}

#[test]
fn cli_exit_codes() {
    let run = |args: &[&str]| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(std::iter::once("nfvplace").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    };
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("--budget"));
    assert_eq!(run(&["--budget", "2"]).0, 1);
    assert_eq!(run(&["--generate", "--budget", "2", "--bogus"]).0, 1);
    assert_eq!(run(&["--generate", "--budget", "2"]).0, 1, "generated demands need Z");
    assert_eq!(run(&["--instance", "/nonexistent/x.json", "--budget", "1"]).0, 2);
    let (code, out, _) = run(&["--generate", "--topology", "line", "--nodes", "4", "--flows", "3",
        "--budget", "1,2", "--z", "2", "--no-timing"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
}
