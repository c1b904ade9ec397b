use std::process::Command;

use kenergy_lab::config::{BackendKind, RunConfig};
use kenergy_lab::io::{read_field, read_path};
use kenergy_lab::{run_suite, Check, Format, LabError, Report, Suite};

fn kenergy(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kenergy")).args(args).output().expect("binary runs")
}

#[test]
fn identities_on_the_fine_circle_torus_pass() {
    let out = kenergy(&["verify", "--suite", "identities", "--backend", "torus-n1", "--m", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,value,tolerance,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn every_suite_passes_on_its_backends() {
    let plan = [
        (BackendKind::TorusN1, vec![Suite::Identities, Suite::Variations, Suite::Geodesics, Suite::Solvers]),
        (BackendKind::TorusN2, vec![Suite::Identities, Suite::Variations, Suite::Solvers, Suite::Surface]),
        (BackendKind::Cp1, vec![Suite::Identities, Suite::Variations, Suite::Geodesics, Suite::Solvers, Suite::Futaki]),
    ];
    for (backend, list) in plan {
        let cfg = RunConfig::for_backend(backend);
        for suite in list {
            let r = run_suite(&cfg, suite).unwrap();
            assert!(r.all_pass(), "{} on {}: {}", suite.name(), backend.name(), r.to_csv().unwrap());
        }
    }
}

#[test]
fn unknown_suite_and_bad_flags_exit_with_two() {
    let out = kenergy(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("suite"));
    let out = kenergy(&["verify", "--suite", "identities", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kenergy(&["surface", "--backend", "cp1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_gives_exit_one() {
    // Three flow iterations cannot reach the tolerance.
    let out = kenergy(&["dhym", "--backend", "torus-n1", "--max-iters", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains(",false"));
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = kenergy(&["verify", "--suite", "variations", "--backend", "cp1", "--seed", seed, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let (a, b, c) = (run("a.csv", "7"), run("b.csv", "7"), run("c.csv", "8"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = kenergy(&["futaki", "--backend", "cp1", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.suite, "futaki");
    assert!(report.version.starts_with("kenergy "));
    assert_eq!(report.config["backend"], "cp1");
    assert_eq!(Report::from_json(&report.to_json().unwrap()).unwrap(), report);
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = Report::new("empty", serde_json::Value::Null);
    let path = dir.path().join("e.csv");
    r.export(&path, Format::Csv).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "check,value,tolerance,pass\n");
    r.push(Check::at_most("too big", 2.0, 1.0));
    assert_eq!(r.exit_code(), 1);
    r.export(&path, Format::Csv).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "check,value,tolerance,pass\ntoo big,2,1,false\n");
    let missing = dir.path().join("no/such/dir/r.csv");
    assert!(matches!(r.export(&missing, Format::Csv), Err(LabError::Io(_))));
}

#[test]
fn artifacts_are_readable() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("d.csv");
    let out = kenergy(&["dhym", "--backend", "torus-n2", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut f = std::fs::File::open(dir.path().join("d.csv.field.bin")).unwrap();
    let field = read_field(&mut f).unwrap();
    assert_eq!((field.shape.dim, field.shape.m), (2, 8));
    assert_eq!(field.values.len(), 8usize.pow(4));
    let history = std::fs::read_to_string(dir.path().join("d.csv.history.csv")).unwrap();
    assert!(history.starts_with("iteration,value\n0,"));

    let report = dir.path().join("g.csv");
    let out = kenergy(&["geodesic", "--backend", "torus-n1", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut f = std::fs::File::open(dir.path().join("g.csv.path.bin")).unwrap();
    let (shape, path) = read_path(&mut f).unwrap();
    assert_eq!((shape.dim, shape.m), (1, 16));
    assert_eq!(path.len(), 17);
    assert_eq!(path.times()[16], 1.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, r#"{"backend": "cp1", "m": 40, "alpha": {"re": [1.0]}, "beta": {"re": [0.25]}, "seed": 3}"#).unwrap();
    let out = kenergy(&["stability", "--config", cfg_path.to_str().unwrap(), "--seed", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.config["m"], 40);
    assert_eq!(report.config["seed"], 5);
    std::fs::write(&cfg_path, r#"{"backend": "cp1", "m": 40, "gamma_abs": -1.0}"#).unwrap();
    let out = kenergy(&["stability", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma_abs"));
}
