use std::path::Path;
use std::process::Command;

use nfvplace::experiment::CSV_HEADER;

fn nfvplace(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nfvplace")).args(args).output().unwrap()
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fig4.json").display().to_string()
}

#[test]
fn single_optimal_cell_prints_its_value() {
    let out = nfvplace(&["--instance", &fixture(), "--algorithm", "optimal", "--budget", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2.03\n");
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str| {
        vec![
            "--generate".to_string(),
            "--nodes".into(),
            "8".into(),
            "--flows".into(),
            "12".into(),
            "--budget".into(),
            "1,3".into(),
            "--z".into(),
            "1.5,3".into(),
            "--seed".into(),
            "1,2".into(),
            "--algorithm".into(),
            "ssg-pra,ssg-nra,sg-pra,sg-nra,optimal".into(),
            "--no-timing".into(),
            "--output".into(),
            dir.path().join(name).display().to_string(),
        ]
    };
    for name in ["a.csv", "b.csv"] {
        let a: Vec<String> = args(name);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let out = nfvplace(&refs);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);

    let mut reader = csv::Reader::from_reader(a.as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 2 * 2 * 5);
    for cell in rows.chunks(5) {
        // ssg-pra, ssg-nra, sg-pra, sg-nra, optimal for one (seed, z, k)
        let value = |r: &csv::StringRecord| r[5].parse::<f64>().unwrap();
        let pct = |r: &csv::StringRecord| r[7].parse::<f64>().unwrap();
        assert!(cell.iter().all(|r| &r[10] == "ok" && &r[8] == "0"));
        assert!(cell.iter().all(|r| (0.0..=1.0).contains(&pct(r))));
        let optimal = value(&cell[4]);
        assert!(cell[..4].iter().all(|r| value(r) <= optimal + 1e-6));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(nfvplace(&["--help"]).status.code(), Some(0));
    assert_eq!(nfvplace(&["--budget", "1"]).status.code(), Some(1));
    assert_eq!(nfvplace(&["--generate", "--budget", "1", "--z", "0.5"]).status.code(), Some(1));
    assert_eq!(nfvplace(&["--generate", "--budget", "1", "--algorithm", "magic"]).status.code(), Some(1));
    assert_eq!(nfvplace(&["--instance", "/nonexistent.json", "--budget", "1"]).status.code(), Some(2));
}
