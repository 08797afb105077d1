use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn spca(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spca"))
        .args(args)
        .current_dir(dir)
        .env_remove("SPCA_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("two.txt"), "2\n2 1\n1 2\n").unwrap();
    // Gram matrix of six vectors in R^3
    fs::write(
        dir.path().join("psd.txt"),
        "6\n\
         2 1 1 2 2 2\n\
         1 2 1 2 2 1\n\
         1 1 2 0 2 3\n\
         2 2 0 4 2 0\n\
         2 2 2 2 3 3\n\
         2 1 3 0 3 5\n",
    )
    .unwrap();
    fs::write(dir.path().join("unit.txt"), "3\n1 0.5 0.2\n0.5 1 0.3\n0.2 0.3 1\n").unwrap();
    dir
}

#[test]
fn solve_exact_on_two_by_two() {
    let dir = setup();
    let r = report(&spca(dir.path(), &["solve", "--alg", "exact", "--k", "2", "--matrix", "two.txt"]));
    assert_eq!(r["schema"], 1);
    assert_eq!(r["results"]["alg"], "exact");
    assert!((r["results"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(r["results"]["support"], serde_json::json!([0, 1]));
    let digest = r["inputs"]["two.txt"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(r["version"].is_string() && r["wall_time_s"].is_number());
}

#[test]
fn approx_is_within_cube_root_of_exact() {
    let dir = setup();
    for k in 1..=6 {
        let ks = k.to_string();
        let exact = report(&spca(dir.path(), &["solve", "--alg", "exact", "--k", &ks, "--matrix", "psd.txt"]));
        let approx = report(&spca(dir.path(), &["solve", "--alg", "approx", "--k", &ks, "--matrix", "psd.txt"]));
        let opt = exact["results"]["value"].as_f64().unwrap();
        let v = approx["results"]["value"].as_f64().unwrap();
        assert!(v >= opt / 6f64.cbrt() - 1e-9, "k={k}: {v} vs {opt}");
        assert!(v <= opt + 1e-9);
        assert_eq!(approx["results"]["details"]["combination_holds"], true);
    }
}

#[test]
fn every_algorithm_writes_a_report_file() {
    let dir = setup();
    for alg in ["exact", "approx", "alg1", "alg2", "ptas"] {
        let out = format!("{alg}.json");
        let matrix = if alg == "ptas" { "unit.txt" } else { "psd.txt" };
        let o = spca(dir.path(), &["solve", "--alg", alg, "--k", "3", "--matrix", matrix, "--out", &out]);
        assert_eq!(code(&o), 0, "{alg}: {}", stderr(&o));
        let r = json_file(&dir.path().join(&out));
        assert_eq!(r["results"]["k"], 3);
        assert!(r["results"]["support"].as_array().unwrap().len() <= 3);
    }
}

#[test]
fn ptas_rejects_entries_outside_unit_interval() {
    let dir = setup();
    let o = spca(dir.path(), &["solve", "--alg", "ptas", "--k", "2", "--matrix", "psd.txt"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn input_errors_exit_one() {
    let dir = setup();
    let o = spca(dir.path(), &["solve", "--alg", "exact", "--k", "2", "--matrix", "missing.txt"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("missing.txt"));

    fs::write(dir.path().join("bad.txt"), "2\n2 1\n1 oops\n").unwrap();
    let o = spca(dir.path(), &["solve", "--alg", "exact", "--k", "2", "--matrix", "bad.txt"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = spca(dir.path(), &["solve", "--alg", "bogus", "--k", "2", "--matrix", "two.txt"]);
    assert_eq!(code(&o), 1);

    fs::write(dir.path().join("bad.cnf"), "p cnf 2 1\n1 x 0\n").unwrap();
    let o = spca(dir.path(), &["generate", "sat", "--cnf", "bad.cnf", "--out", "m.txt"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn budget_guard_exits_two_and_override_lifts_it() {
    let dir = setup();
    let args = ["generate", "shortcode", "--m", "4", "--d", "1", "--exact", "--out", "a.txt"];
    let o = spca(dir.path(), &args);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("budget"));

    let mut with_flag = args.to_vec();
    with_flag.extend(["--budget", "1e10"]);
    let r = report(&spca(dir.path(), &with_flag));
    let gap = &r["results"]["gap"];
    let exact = gap["rank1_exact_if_computed"].as_f64().unwrap();
    assert!(exact <= gap["rank1_upper_bound"].as_f64().unwrap());

    let o = Command::new(env!("CARGO_BIN_EXE_spca"))
        .args(["solve", "--alg", "exact", "--k", "2", "--matrix", "two.txt"])
        .current_dir(dir.path())
        .env("SPCA_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn generate_shortcode_m2() {
    let dir = setup();
    let r = report(&spca(dir.path(), &["generate", "shortcode", "--m", "2", "--d", "1", "--out", "sc.txt"]));
    let text = fs::read_to_string(dir.path().join("sc.txt")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("8"));
    assert_eq!(lines.count(), 8);
    let gap = json_file(&dir.path().join("gap.json"));
    assert!((gap["sdp_value"].as_f64().unwrap() - 0.36788).abs() < 1e-5);
    assert_eq!(gap["params"]["n"], 8);
    assert_eq!(r["results"]["gap"]["sdp_value"], gap["sdp_value"]);
}

#[test]
fn generate_sat_writes_matrix_and_alpha() {
    let dir = setup();
    fs::write(dir.path().join("f.cnf"), "c e2sat d=2\np cnf 3 3\n1 2 0\n-2 3 0\n-1 -3 0\n").unwrap();
    report(&spca(dir.path(), &["generate", "sat", "--cnf", "f.cnf", "--out", "sat.txt"]));
    let text = fs::read_to_string(dir.path().join("sat.txt")).unwrap();
    assert_eq!(text.lines().next(), Some("6"));
    let meta = json_file(&dir.path().join("meta.json"));
    let (d, c, s) = (2.0, 0.9, 0.8);
    let alpha = meta["alpha"].as_f64().unwrap();
    assert!((alpha - 144.0 * d * d / (c - s)).abs() < 1e-9 * alpha);
    assert_eq!(meta["dimension"], 6);
}

#[test]
fn generate_sat_rejects_irregular_formula_unless_regularized() {
    let dir = setup();
    fs::write(dir.path().join("g.cnf"), "p cnf 4 2\n1 2 0\n-1 3 0\n").unwrap();
    let o = spca(dir.path(), &["generate", "sat", "--cnf", "g.cnf", "--out", "m.txt"]);
    assert_eq!(code(&o), 1);
    let r = report(&spca(
        dir.path(),
        &["generate", "sat", "--cnf", "g.cnf", "--degree", "2", "--regularize", "--out", "m.txt", "--meta", "m.json"],
    ));
    let meta = json_file(&dir.path().join("m.json"));
    assert_eq!(meta["d"], 2);
    assert_eq!(meta["regularization"]["original_vars"], 4);
    assert_eq!(r["results"]["dimension"], 2 * meta["num_vars"].as_u64().unwrap());
}

#[test]
fn generate_sat_random_is_seeded() {
    let dir = setup();
    let run = |seed: &str, out: &str| {
        report(&spca(
            dir.path(),
            &["generate", "sat", "--vars", "8", "--degree", "3", "--seed", seed, "--out", out, "--meta", "r.json"],
        ));
        fs::read_to_string(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("5", "a.txt"), run("5", "b.txt"));
    assert_ne!(run("5", "a.txt"), run("6", "c.txt"));
}

#[test]
fn generate_sse_parameters() {
    let dir = setup();
    fs::write(dir.path().join("g.txt"), "# 4-cycle\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n").unwrap();
    report(&spca(dir.path(), &["generate", "sse", "--graph", "g.txt", "--eta", "0.5", "--out", "sse.txt"]));
    let p = json_file(&dir.path().join("params.json"));
    let t = (128.0 * 2f64.ln()).ceil();
    assert_eq!(p["t"].as_f64().unwrap(), t);
    assert!((p["eta_prime"].as_f64().unwrap() - 1.0 / t).abs() < 1e-15);
    assert_eq!(p["m"].as_f64().unwrap(), 8.0);
    assert!(fs::read_to_string(dir.path().join("sse.txt")).unwrap().starts_with("4\n"));
}

#[test]
fn verify_passing_checks() {
    let dir = setup();
    for args in [
        &["verify", "--check", "gadget"][..],
        &["verify", "--check", "shortcode-gap", "--m", "2", "--d", "1"],
        &["verify", "--check", "alg-ratios", "--trials", "200", "--seed", "1"],
        &["verify", "expansion", "--trials", "5"],
    ] {
        let r = report(&spca(dir.path(), args));
        assert_eq!(r["results"]["passed"], true, "{args:?}");
    }
}

#[test]
fn verify_failure_exits_three() {
    let dir = setup();
    // the A2 PSD sub-check fails on every formula with a clause
    let o = spca(dir.path(), &["verify", "--check", "sat-sandwich", "--trials", "3"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["results"]["passed"], false);
    assert!(stderr(&o).contains("FAIL sat-sandwich: A2 is PSD"));
}

#[test]
fn verify_unknown_names_exit_one() {
    let dir = setup();
    assert_eq!(code(&spca(dir.path(), &["verify", "--check", "nope"])), 1);
    assert_eq!(code(&spca(dir.path(), &["verify", "nogroup"])), 1);
}

#[test]
fn verify_uses_supplied_graph() {
    let dir = setup();
    fs::write(dir.path().join("g.txt"), "n 6\n0 1 1\n1 2 1\n2 0 1\n3 4 1\n4 5 1\n5 3 1\n2 3 0.1\n").unwrap();
    let r = report(&spca(dir.path(), &["verify", "--check", "cheeger", "--graph", "g.txt"]));
    assert!(r["inputs"]["g.txt"].is_string());
    assert_eq!(r["results"]["passed"], true);
}

#[test]
fn experiment_ratios_and_determinism() {
    let dir = setup();
    let r = report(&spca(dir.path(), &["experiment", "--trials", "100", "--n-min", "10", "--n-max", "10", "--csv", "a.csv"]));
    let summary = &r["results"]["summary"];
    assert_eq!(summary["trials"], 100);
    assert_eq!(summary["with_opt"], 100);
    assert!(summary["min_ratio_v"].as_f64().unwrap() >= 10f64.powf(-1.0 / 3.0));
    assert!(summary["max_ptas_gap_over_k"].as_f64().unwrap() <= 0.25 + 1e-9);

    let again = report(&spca(dir.path(), &["experiment", "--trials", "100", "--n-min", "10", "--n-max", "10", "--csv", "b.csv"]));
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert_eq!(a.lines().count(), 101);
    assert_eq!(r["results"]["rows"], again["results"]["rows"]);
}

#[test]
fn empty_experiment_writes_header_only() {
    let dir = setup();
    report(&spca(dir.path(), &["experiment", "--trials", "0", "--csv", "e.csv"]));
    let text = fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("trial,n,k,opt,v1,v2,v,ptas"));
}

#[test]
fn reports_are_deterministic_apart_from_wall_time() {
    let dir = setup();
    let run = || {
        let mut r = report(&spca(dir.path(), &["solve", "--alg", "ptas", "--k", "2", "--seed", "9", "--matrix", "unit.txt"]));
        r["wall_time_s"] = Value::Null;
        r
    };
    assert_eq!(run(), run());
    // k larger than n is an input error
    let o = spca(dir.path(), &["solve", "--alg", "alg1", "--k", "3", "--matrix", "two.txt"]);
    assert_eq!(code(&o), 1);
}
