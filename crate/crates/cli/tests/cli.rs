use std::process::{Command, Output};

use hulthen_core::exppoly::{ExpPoly, ExpPolyJson};
use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hulthen-lab"))
        .args(args)
        .env_remove("HULTHEN_MAX_CHAIN")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn spectrum_reduced() {
    let out = lab(&["spectrum", "--v", "12", "--q", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let energies: Vec<f64> = v["states"].as_array().unwrap().iter().map(|s| s["energy_reduced"].as_f64().unwrap()).collect();
    assert_eq!(energies, vec![-30.25, -4.0, -0.25]);
    assert!(v["states"][0].get("energy_physical").is_none());
    assert_eq!(v["params"]["arithmetic"], "float");
}

#[test]
fn spectrum_without_states_is_empty() {
    let out = lab(&["spectrum", "--v", "1", "--q", "1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["states"].as_array().unwrap().len(), 0);
    let out = lab(&["spectrum", "--v", "1", "--q", "1", "--format", "csv"]);
    assert_eq!(code(&out), 3);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "n,energy_reduced");
}

#[test]
fn spectrum_physical_halves_reduced() {
    let out = lab(&["spectrum", "--mu", "6", "--delta", "1", "--q", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["params"]["v"], 12.0);
    for s in v["states"].as_array().unwrap() {
        assert_eq!(s["energy_physical"].as_f64().unwrap(), s["energy_reduced"].as_f64().unwrap() / 2.0);
    }
    // δ = 2: E = δ² ℰ / 2 with v = 2μ/δ²
    let v = json(&lab(&["spectrum", "--mu", "24", "--delta", "2", "--q", "1"]));
    assert_eq!(v["params"]["v"], 12.0);
    assert_eq!(v["states"][1]["energy_physical"], -8.0);
}

#[test]
fn rational_mode() {
    let v = json(&lab(&["spectrum", "--v", "12", "--q", "1/2", "--rational"]));
    assert_eq!(v["params"]["arithmetic"], "rational");
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
    let out = lab(&["spectrum", "--v", "12.5", "--q", "1", "--rational"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["params"]["arithmetic"], "float");
    assert!(String::from_utf8_lossy(&out.stderr).contains("float"));
}

#[test]
fn state_normalization_and_boundary() {
    let s0 = json(&lab(&["state", "--v", "12", "--q", "1", "--n", "0"]));
    assert!((s0["norm_constant"].as_f64().unwrap() - 29.29164).abs() < 1e-5);
    assert!(close(s0["norm_constant"].as_f64().unwrap(), 858f64.sqrt(), 1e-13));
    assert_eq!(s0["samples"][0]["r"], 0.0);
    assert_eq!(s0["samples"][0]["value"], 0.0);
    let s1 = json(&lab(&["state", "--v", "12", "--q", "1", "--n", "1"]));
    assert!((s1["norm_constant"].as_f64().unwrap() - 24.49490).abs() < 1e-5);
    assert!(close(s1["norm_constant"].as_f64().unwrap(), 600f64.sqrt(), 1e-13));
}

#[test]
fn state_json_round_trips() {
    for args in [["state", "--v", "12", "--q", "1", "--n", "2"], ["state", "--v", "30", "--q", "1.7", "--n", "3"]] {
        let v = json(&lab(&args));
        let poly: ExpPolyJson = serde_json::from_value(v["exppoly"].clone()).unwrap();
        let f = ExpPoly::from_json(&poly).unwrap();
        let samples = v["samples"].as_array().unwrap();
        assert_eq!(samples.len(), 101);
        for s in samples {
            let (r, value) = (s["r"].as_f64().unwrap(), s["value"].as_f64().unwrap());
            assert!((f.evaluate(r).unwrap() - value).abs() <= 1e-12 * value.abs().max(1.0));
        }
    }
}

#[test]
fn state_out_of_range() {
    assert_eq!(code(&lab(&["state", "--v", "12", "--q", "1", "--n", "3"])), 3);
    assert_eq!(code(&lab(&["state", "--v", "12", "--q", "1", "--n", "x"])), 2);
    let all = json(&lab(&["state", "--v", "12", "--q", "1"]));
    assert_eq!(all.as_array().unwrap().len(), 3);
}

#[test]
fn csv_and_json_share_numbers() {
    let v = json(&lab(&["state", "--v", "30", "--q", "1.7", "--n", "1", "--samples", "7"]));
    let csv = lab(&["state", "--v", "30", "--q", "1.7", "--n", "1", "--samples", "7", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,r,value"));
    let raw = String::from_utf8(lab(&["state", "--v", "30", "--q", "1.7", "--n", "1", "--samples", "7"]).stdout).unwrap();
    for (line, s) in lines.zip(v["samples"].as_array().unwrap()) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], "1");
        assert_eq!(cells[1], serde_json::to_string(&s["r"]).unwrap());
        assert_eq!(cells[2], serde_json::to_string(&s["value"]).unwrap());
        // the same digits appear verbatim in the JSON text
        assert!(raw.contains(&format!("\"value\": {}", cells[2])));
        assert_eq!(cells[2].parse::<f64>().unwrap(), s["value"].as_f64().unwrap());
    }
}

#[test]
fn chain_first_level() {
    let out = lab(&["chain", "--v", "12", "--q", "1", "--j", "1", "--n", "1"]);
    assert_eq!(code(&out), 0);
    let c = json(&out);
    assert_eq!(c["barrier"], 2.0);
    assert!(close(c["norm_product"].as_f64().unwrap(), 0.04375, 1e-12));
    assert!(close(c["norm_alternate"]["prefactor"].as_f64().unwrap(), 26.25, 1e-12));
    assert!(close(c["norm_alternate"]["reading_b"].as_f64().unwrap(), 0.04375, 1e-12));
    let w: ExpPolyJson = serde_json::from_value(c["routes"]["wronskian"].clone()).unwrap();
    let k: ExpPolyJson = serde_json::from_value(c["routes"]["closed_form"].clone()).unwrap();
    let lambda = c["proportionality"].as_f64().unwrap();
    let (w, k) = (ExpPoly::from_json(&w).unwrap(), ExpPoly::from_json(&k).unwrap());
    for r in [0.1, 0.7, 2.0, 5.0] {
        assert!(close(w.evaluate(r).unwrap(), lambda * k.evaluate(r).unwrap(), 1e-12));
    }
}

#[test]
fn chain_second_level_shape() {
    let c = json(&lab(&["chain", "--v", "12", "--q", "1", "--j", "2", "--n", "2", "--rational"]));
    assert_eq!(c["barrier"], 6.0);
    let k = &c["routes"]["closed_form"]["terms"];
    assert_eq!(k.as_array().unwrap().len(), 1);
    assert_eq!(k[0]["alpha"], -0.5);
    let coeffs: Vec<f64> = k[0]["coeffs"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let lead = coeffs[0];
    assert_eq!(coeffs, vec![lead, -3.0 * lead, 3.0 * lead, -lead]);
}

#[test]
fn chain_level_zero_is_state() {
    let a = lab(&["chain", "--v", "12", "--q", "1", "--j", "0", "--n", "1"]);
    let b = lab(&["state", "--v", "12", "--q", "1", "--n", "1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn chain_limits() {
    assert_eq!(code(&lab(&["chain", "--v", "12", "--q", "1", "--j", "2", "--n", "1"])), 3);
    assert_eq!(code(&lab(&["chain", "--v", "12", "--q", "1", "--j", "3", "--n", "3"])), 3);
    let capped = Command::new(env!("CARGO_BIN_EXE_hulthen-lab"))
        .args(["chain", "--v", "12", "--q", "1", "--j", "2", "--n", "2"])
        .env("HULTHEN_MAX_CHAIN", "1")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 2);
    let bad = Command::new(env!("CARGO_BIN_EXE_hulthen-lab"))
        .args(["chain", "--v", "12", "--q", "1", "--j", "1", "--n", "1"])
        .env("HULTHEN_MAX_CHAIN", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
    let csv = lab(&["chain", "--v", "12", "--q", "1", "--j", "1", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 3);
}

#[test]
fn invalid_inputs() {
    for args in [
        vec!["spectrum", "--v", "12", "--q", "-1"],
        vec!["spectrum", "--v", "12", "--q", "0"],
        vec!["spectrum", "--v", "-3", "--q", "1"],
        vec!["spectrum", "--v", "abc", "--q", "1"],
        vec!["spectrum", "--q", "1"],
        vec!["spectrum", "--v", "12"],
        vec!["spectrum", "--v", "12", "--mu", "6", "--delta", "1", "--q", "1"],
        vec!["spectrum", "--mu", "6", "--q", "1"],
        vec!["spectrum", "--v", "12", "--q", "1", "--tol", "0"],
        vec!["spectrum", "--v", "12", "--q", "1/0", "--rational"],
        vec!["verify", "--v", "12", "--q", "-1"],
        vec!["bogus"],
    ] {
        let out = lab(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_reports() {
    let out = lab(&["verify", "--v", "12", "--q", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for c in checks {
        let (computed, expected, tol) =
            (c["computed"].as_f64().unwrap(), c["expected"].as_f64().unwrap(), c["tolerance"].as_f64().unwrap());
        assert_eq!(c["passed"].as_bool().unwrap(), (computed - expected).abs() <= tol * expected.abs().max(1.0));
    }
    for prefix in ["spectrum.fd", "norm.quadrature", "orthogonality", "residual.base", "residual.chain", "route", "curvature", "chain_norm"] {
        assert!(names.iter().any(|n| n.starts_with(prefix)), "{prefix}");
    }
}

#[test]
fn verify_physical_and_rational() {
    let out = lab(&["verify", "--mu", "6", "--delta", "1", "--q", "1", "--rational"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["arithmetic"], "rational");
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"].as_str().unwrap().starts_with("physical.energy")));
    for c in checks.iter().filter(|c| c["name"].as_str().unwrap().starts_with("residual")) {
        assert_eq!(c["computed"], 0.0);
        assert_eq!(c["tolerance"], 0.0);
    }
}

#[test]
fn verify_flags_corruption() {
    let out = lab(&["verify", "--v", "12", "--q", "1", "--perturb-energy", "1e-3"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    assert_eq!(report["passed"], false);
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().any(|n| n.starts_with("residual")));
    assert_eq!(code(&lab(&["verify", "--v", "12", "--q", "1", "--perturb-norm", "-1e-3"])), 1);
    assert_eq!(code(&lab(&["verify", "--v", "1", "--q", "1"])), 3);
}
