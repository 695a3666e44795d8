use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

use copula_lab::cli::run_with;
use copula_lab::stats::{dependence_report, Sample};

fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("copula-lab").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn grid_csv(n: usize, f: impl Fn(usize, usize) -> f64) -> String {
    let mut s = String::from("u,v,value\n");
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            s.push_str(&format!("{u},{v},{}\n", f(i, j)));
        }
    }
    s
}

#[test]
fn verify_independence_passes() {
    let (code, out, _) = run(&["verify", "--builtin", "independence", "--grid-n", "11"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches(" pass ").count(), 5, "{out}");
}

#[test]
fn verify_max_counterexample_reports_negative_volume() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let (code, out, _) =
        run(&["verify", "--builtin", "max-counterexample", "--grid-n", "2", "--json", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("H-volume -1"), "{out}");
    let doc = read_json(&json);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["witness_h_volume"], -1.0);
    assert_eq!(doc["is_copula_claim"], false);
    assert_eq!(doc["reports"][1]["check_name"], "two_increasing");
    assert_eq!(doc["reports"][1]["witness"], serde_json::json!({"u1": 0.0, "u2": 1.0, "v1": 0.0, "v2": 1.0}));
}

#[test]
fn verify_fgm_theta_flag() {
    for theta in ["-1", "0.5", "1"] {
        let (code, _, _) = run(&["verify", "--builtin", "fgm", "--theta", theta, "--tol", "1e-12"]);
        assert_eq!(code, 0, "theta {theta}");
    }
    let (code, _, err) = run(&["verify", "--builtin", "fgm", "--theta", "1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("theta"), "{err}");
}

#[test]
fn perturbed_independence_grid_is_localized() {
    let dir = tempfile::tempdir().unwrap();
    let n = 21;
    let body = grid_csv(n, |i, j| {
        let base = (i as f64 / 20.0) * (j as f64 / 20.0);
        if (i, j) == (10, 10) { base - 0.05 } else { base }
    });
    let csv = write(dir.path(), "grid.csv", &body);
    let json = dir.path().join("out.json");
    let (code, out, _) = run(&["verify", "--csv", &csv, "--grid-n", "21", "--json", json.to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    let doc = read_json(&json);
    assert_eq!(doc["interpolation"], "bilinear");
    let two = &doc["reports"][1];
    assert_eq!(two["passed"], false);
    let w = &two["witness"];
    let corners = [w["u1"].as_f64(), w["u2"].as_f64(), w["v1"].as_f64(), w["v2"].as_f64()];
    assert!(corners[..2].contains(&Some(0.5)) && corners[2..].contains(&Some(0.5)), "{w}");

    let clean = write(dir.path(), "clean.csv", &grid_csv(n, |i, j| (i as f64 / 20.0) * (j as f64 / 20.0)));
    assert_eq!(run(&["verify", "--csv", &clean]).0, 0);
}

#[test]
fn verify_input_errors_exit_2() {
    let (code, _, err) = run(&["verify", "--builtin", "gumbel"]);
    assert_eq!(code, 2);
    assert!(err.contains("max-counterexample") && err.contains("independence"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "u,v,value\n0,0,0\n0,1,zero\n1,0,0\n1,1,1\n");
    let (code, _, err) = run(&["verify", "--csv", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");

    let (code, _, _) = run(&["verify", "--builtin", "independence", "--grid-n", "1"]);
    assert_eq!(code, 2);
    assert_eq!(run(&["verify"]).0, 2);
    assert_eq!(run(&["verify", "--builtin", "independence", "--csv", "x.csv"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["verify", "--builtin", "independence", "--tol", "-1"]).0, 2);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("counterexamples"));
}

#[test]
fn stats_examples() {
    let dir = tempfile::tempdir().unwrap();
    let up = write(dir.path(), "up.csv", "x,y\n1,1\n2,2\n3,3\n");
    let json = dir.path().join("s.json");
    let (code, out, _) = run(&["stats", "--csv", &up, "--json", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("kendall_tau: 1\n") && out.contains("pearson_rho: 1\n"), "{out}");
    let doc = read_json(&json);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!((doc["kendall_tau"].as_f64(), doc["spearman_rho"].as_f64()), (Some(1.0), Some(1.0)));
    assert_eq!(doc["n"], 3);

    let down = write(dir.path(), "down.csv", "1,3\n2,2\n3,1\n");
    let json = dir.path().join("d.json");
    assert_eq!(run(&["stats", "--csv", &down, "--json", json.to_str().unwrap()]).0, 0);
    let doc = read_json(&json);
    assert_eq!((doc["kendall_tau"].as_f64(), doc["spearman_rho"].as_f64()), (Some(-1.0), Some(-1.0)));

    let single = write(dir.path(), "one.csv", "x\n1\n2\n");
    let (code, _, err) = run(&["stats", "--csv", &single]);
    assert_eq!(code, 2);
    assert!(err.contains("missing column"), "{err}");

    let constant = write(dir.path(), "const.csv", "1,5\n2,5\n3,5\n");
    assert_eq!(run(&["stats", "--csv", &constant]).0, 2);
}

#[test]
fn stats_json_matches_library_serialization() {
    let dir = tempfile::tempdir().unwrap();
    let body = "0.3,1.7\n-2.5,0.25\n1e-3,3.14159\n7,2.718\n4.5,-1\n";
    let csv = write(dir.path(), "s.csv", body);
    let json = dir.path().join("s.json");
    run(&["stats", "--csv", &csv, "--json", json.to_str().unwrap()]);
    let doc = read_json(&json);
    let report = dependence_report(&Sample::read_csv(body.as_bytes()).unwrap()).unwrap();
    let lib = serde_json::to_value(report).unwrap();
    for key in ["kendall_tau", "spearman_rho", "pearson_rho", "n", "tie_adjusted"] {
        assert_eq!(doc[key], lib[key], "{key}");
    }
}

#[test]
fn shipped_configs_exit_zero() {
    for name in ["increasing.json", "square-breakage.json", "affine.json"] {
        let (code, out, err) = run(&["invariance", "--config", &config(name)]);
        assert_eq!(code, 0, "{name}: {out}{err}");
    }
    let (_, out, _) = run(&["invariance", "--config", &config("square-breakage.json")]);
    assert!(out.contains("within 3 standard errors"), "{out}");
    assert!(out.contains("not_at_all"), "{out}");
}

#[test]
fn invariance_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(config("affine.json")).unwrap();
    let zero = write(dir.path(), "zero.json", &base.replacen("\"repetitions\": 100", "\"repetitions\": 0", 1));
    let (code, _, err) = run(&["invariance", "--config", &zero]);
    assert_eq!(code, 2);
    assert!(err.contains("repetitions"), "{err}");

    let typo = write(dir.path(), "typo.json", &base.replacen("\"n_samples\"", "\"n_sample\"", 1));
    let (code, _, err) = run(&["invariance", "--config", &typo]);
    assert_eq!(code, 2);
    assert!(err.contains("n_sample"), "{err}");

    let version = write(dir.path(), "v.json", &base.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1));
    let (code, _, err) = run(&["invariance", "--config", &version]);
    assert_eq!(code, 2);
    assert!(err.contains("schema_version"), "{err}");

    assert_eq!(run(&["invariance", "--config", "/nonexistent/battery.json"]).0, 2);
}

#[test]
fn negating_both_coordinates_preserves_rank_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"schema_version": 1, "experiments": [
        {"experiment": "copula_invariance", "seed": 1, "n_samples": 50,
         "distribution": {"family": "uniform_square"},
         "transforms": {"x": {"kind": "negate"}, "y": {"kind": "negate"}}, "repetitions": 5}]}"#;
    let cfg = write(dir.path(), "neg.json", body);
    let json = dir.path().join("r.json");
    assert_eq!(run(&["invariance", "--config", &cfg, "--json", json.to_str().unwrap()]).0, 0);
    let doc = read_json(&json);
    for r in doc["experiments"][0]["results"].as_array().unwrap() {
        if r["statistic_name"] != "empirical_copula_distance" {
            assert_eq!(r["before"], r["after"]);
        }
    }
}

#[test]
fn seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let cfg = config("affine.json");
    run(&["invariance", "--config", &cfg, "--seed", "1", "--json", a.to_str().unwrap()]);
    run(&["invariance", "--config", &cfg, "--seed", "2", "--json", b.to_str().unwrap()]);
    let (a, b) = (read_json(&a), read_json(&b));
    assert_eq!(a["experiments"][0]["rng"]["seed"], 1);
    assert_ne!(a["experiments"][0]["results"], b["experiments"][0]["results"]);
}

#[test]
fn counterexamples_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let (code, out, _) = run(&["counterexamples", "--json", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("H-volume of [0,1] x [0,1]: -1"), "{out}");
    let doc = read_json(&json);
    assert_eq!(doc["schema_version"], 1);
    let entries = doc["counterexamples"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    let f = &entries[0];
    assert_eq!(f["name"], "fgm-counterexample-factor");
    assert_eq!(f["demonstrated"], true);
    let seg = &f["decreasing_segment"];
    assert_eq!(seg["from"]["v"], 0.0);
    assert_eq!(seg["to"]["v"], 0.0);
    assert!(seg["from_value"].as_f64() > seg["to_value"].as_f64());
    let g = &entries[1];
    assert_eq!(g["name"], "max-counterexample");
    assert_eq!(g["unit_square_h_volume"], -1.0);
    assert_eq!(g["demonstrated"], true);
    for e in entries {
        assert_eq!(e["reports"].as_array().unwrap().len(), 5);
    }
}

#[test]
fn repeated_runs_are_identical() {
    for args in [
        vec!["counterexamples"],
        vec!["verify", "--builtin", "w-copula", "--grid-n", "9"],
        vec!["invariance", "--config", "CONFIG"],
    ] {
        let cfg = config("square-breakage.json");
        let args: Vec<&str> = args.iter().map(|a| if *a == "CONFIG" { cfg.as_str() } else { a }).collect();
        assert_eq!(run(&args), run(&args));
    }
}

#[test]
fn binary_exit_codes_and_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_copula-lab");
    let status = Command::new(bin).args(["verify", "--builtin", "min-copula"]).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin)
        .args(["verify", "--builtin", "min-copula"])
        .env("COPULA_LAB_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let out = Command::new(bin)
        .args(["verify", "--builtin", "min-copula"])
        .env("COPULA_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("COPULA_LAB_THREADS"));
    let status = Command::new(bin).arg("--bogus").output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}
