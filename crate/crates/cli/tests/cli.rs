use std::path::Path;
use std::process::{Command, Output};

fn sampler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sampler"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn mask_prints_the_bspline_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = sampler(&["mask", "--n", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["details"]["bspline_degree"], 3);
    assert!(dir.path().join("mask.txt").exists());
    assert!(dir.path().join("mask_report.json").exists());
}

#[test]
fn dualmask_matches_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = sampler(&["dualmask", "--n", "3", "--h", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let r = report(&out);
    let mask: Vec<&str> = r["details"]["mask"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(mask, ["5/96", "-5/12", "43/96", "11/6", "43/96", "-5/12", "5/96"]);
}

#[test]
fn restore_writes_grid_and_history() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = sampler(&[
        "restore", "--n", "3", "--level", "2", "--nodes", "jitter:24", "--seed", "3", "--tol", "1e-12", "--out", d,
        "--set", "function=x^3 - x",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r["final_error"].as_f64().unwrap() < 1e-8);
    let grid = read(&dir.path().join("grid.csv"));
    assert!(grid.starts_with("x,value\n"));
    assert_eq!(grid.lines().count(), 2 + 128);
    let history = read(&dir.path().join("history.csv"));
    assert_eq!(history.lines().count(), 2 + r["iterations"].as_u64().unwrap() as usize);
}

#[test]
fn restore_reads_nodes_and_values_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let nodes = dir.path().join("nodes.csv");
    let mut text = String::from("x,value\n");
    for i in 0..20 {
        let x = (i as f64 + 0.37) / 20.0;
        text.push_str(&format!("{x},{}\n", 2.0 * x - 1.0));
    }
    std::fs::write(&nodes, text).unwrap();
    let out = sampler(&[
        "restore", "--n", "2", "--level", "2", "--nodes", nodes.to_str().unwrap(), "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report(&out)["final_error"].is_null());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "command = condtable\nn = 3\nlevel = 3\nh_list = 3, 4, 5 # short list\n").unwrap();
    let out = sampler(&["condtable", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["details"]["rows"].as_array().unwrap().len(), 3);
    assert_eq!(r["details"]["strictly_decreasing"], true);
    assert_eq!(read(&dir.path().join("condtable.csv")).lines().count(), 4);
}

#[test]
fn integrate_reports_checkpoints_and_moments() {
    let dir = tempfile::tempdir().unwrap();
    let out = sampler(&[
        "integrate", "--n", "3", "--level", "3", "--nodes", "random:36", "--seed", "11", "--tol", "1e-12",
        "--set", "function=exp(x)", "--set", "moments=3", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let reference = r["details"]["reference"].as_f64().unwrap();
    assert!((reference - (1f64.exp() - 1.0)).abs() < 1e-12);
    for m in r["details"]["moments"].as_array().unwrap() {
        assert!(m["error"].as_f64().unwrap() < 1e-8);
    }
    assert!(read(&dir.path().join("trace.csv")).starts_with("iter,estimate,abs_error\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(sampler(&["restore", "--level", "x", "--out", d]).status.code(), Some(2));
    assert_eq!(sampler(&["restore", "--set", "nonsense=1", "--out", d]).status.code(), Some(2));
    // Two nodes on [0,1] leave most of the interval uncovered at δ = 0.05.
    let sparse = ["restore", "--n", "3", "--level", "3", "--nodes", "random:2", "--set", "delta=0.05", "--out", d];
    assert_eq!(sampler(&sparse).status.code(), Some(3));
    let mut forced = sparse.to_vec();
    forced.extend(["--set", "allow_sparse=true"]);
    assert_eq!(sampler(&forced).status.code(), Some(4));
}
