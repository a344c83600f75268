use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdetect")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn stat_on_identity_is_one() {
    let v = json(&run(&["stat", "--identity", "10", "--stat", "mdp", "--k", "3"]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "stat");
    assert_eq!(v["config"]["k"], 3);
    assert_eq!(v["result"]["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn exact_spiked_covariance_gives_one_plus_theta() {
    for stat in ["lambda_k", "mdp"] {
        let v = json(&run(&["stat", "--spiked", "p=12,k=3,theta=2,n=10", "--exact-cov", "--stat", stat, "--k", "3"]));
        assert!((v["result"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-9, "{stat}");
    }
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["stat", "--identity", "5", "--stat", "mdp"][..],
        &["stat", "--identity", "5", "--stat", "mdp", "--k", "9"],
        &["stat", "--identity", "5", "--stat", "nope", "--k", "2"],
        &["--threads", "0", "experiment", "mp-edge"],
        &["generate", "--model", "unknown:p=3"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn nonconvergence_exits_three_with_interval() {
    let out = run(&[
        "stat", "--spiked", "p=30,k=3,theta=2,n=50", "--stat", "sdp", "--k", "3", "--max-outer", "1", "--max-inner", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "not_converged");
    assert!(v["lower"].as_f64().unwrap() <= v["upper"].as_f64().unwrap());
}

#[test]
fn test_command_reports_decision() {
    let v = json(&run(&["test", "--model", "spiked:p=20,n=200,k=3,theta=3", "--stat", "mdp", "--k", "3"]));
    let r = &v["result"]["report"];
    assert_eq!(r["decision"], 1);
    assert!(r["stat"]["value"].as_f64().unwrap() > r["tau"].as_f64().unwrap());
}

#[test]
fn figure1_outputs_and_reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let go = |dir: &Path| {
        let out = run(&[
            "experiment", "figure1", "--p", "20", "--n", "40", "--k", "4", "--n-trials", "40", "--seed", "1", "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    go(&a);
    go(&b);
    assert_eq!(first_line(&a.join("figure1_draws.csv")), "trial_id,hypothesis,statistic,value");
    assert_eq!(first_line(&a.join("figure1_hist.csv")), "statistic,hypothesis,bin_lo,bin_hi,count");
    let draws = std::fs::read_to_string(a.join("figure1_draws.csv")).unwrap();
    // 40 trials x 2 hypotheses x 2 statistics
    assert_eq!(draws.lines().count(), 1 + 160);
    for f in ["figure1_draws.csv", "figure1_hist.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let v: Value = serde_json::from_slice(&std::fs::read(a.join("figure1.json")).unwrap()).unwrap();
    assert_eq!(v["command"], "experiment figure1");
}

#[test]
fn figure2_grid_and_plots() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "experiment", "figure2", "--p", "20", "--n-trials", "20", "--alpha", "0.05", "--eta-count", "3", "--plot",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = std::fs::read_to_string(tmp.path().join("figure2_grid.csv")).unwrap();
    assert_eq!(grid.lines().next().unwrap(), "p,k,n,theta,alpha,eta_star,eta_circ,p_ii,tau");
    // one row per grid point; each row carries both scalings
    assert_eq!(grid.lines().count(), 1 + 3);
    for f in ["figure2_star.svg", "figure2_circ.svg"] {
        assert!(std::fs::read_to_string(tmp.path().join(f)).unwrap().starts_with("<svg"));
    }
}

#[test]
fn generate_products() {
    let out = run(&["generate", "--model", "null:p=3,n=5", "--seed", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x1,x2,x3");
    assert_eq!(text.lines().count(), 6);
    assert_eq!(run(&["generate", "--model", "null:p=3,n=5", "--seed", "4"]).stdout, text.as_bytes());

    let out = run(&["generate", "--model", "clique:n=6,k=3", "--what", "graph"]);
    assert!(out.status.success());
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let v: Vec<usize> = line.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert!(v.len() == 2 && v[0] < v[1] && v[1] <= 6);
    }

    let out = run(&["generate", "--model", "{\"model\":\"null\",\"p\":4,\"n\":9}", "--what", "covariance"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next().unwrap().trim(), "4");
}

#[test]
fn clique_warns_for_odd_k() {
    let v = json(&run(&["clique", "--n", "12", "--k", "3", "--trials", "20"]));
    assert!(!v["result"]["warnings"].as_array().unwrap().is_empty());
    let out = run(&["clique", "--n", "12", "--k", "3", "--trials", "20", "--format", "csv"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("trial_id,hypothesis,statistic,value"));
}
