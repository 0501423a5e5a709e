use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proxy_belief_cli::sweep::median;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxy-belief"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn identify_file(input: &Path) -> (Output, Option<serde_json::Value>) {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.json");
    let o = run(&["identify", "--input", input.to_str().unwrap(), "--output", out_path.to_str().unwrap()]);
    let json = std::fs::read_to_string(&out_path)
        .ok()
        .map(|t| serde_json::from_str(&t).unwrap());
    (o, json)
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn identify_drug_trial_problem() {
    let (o, json) = identify_file(&fixture("drug_trial_problem.json"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let json = json.unwrap();
    let mu = floats(&json["mu"]);
    assert!((mu[0] - 0.10).abs() < 1e-9 && (mu[1] - 0.90).abs() < 1e-9);
    let pi_s = floats(&json["pi_S"]);
    assert!((pi_s[0] - 0.25).abs() < 1e-9);
    assert!(json["ground_truth"]["mu_err"].as_f64().unwrap() < 1e-9);
    assert!(json["ground_truth"]["joint_err"].as_f64().unwrap() < 1e-9);
    assert_eq!(json["joint"].as_array().unwrap().len(), 2);
}

#[test]
fn identify_equal_rows_is_rank_deficient() {
    let (o, json) = identify_file(&fixture("equal_rows.json"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(P3)"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    assert!(json.is_none());
}

#[test]
fn identify_outside_hull_is_not_identified() {
    let (o, _) = identify_file(&fixture("outside_hull.json"));
    assert_eq!(o.status.code(), Some(3));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn identify_malformed_json_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"s_labels\": [").unwrap();
    let (o, _) = identify_file(&bad);
    assert_eq!(o.status.code(), Some(1));
    let (o, _) = identify_file(&dir.path().join("missing.json"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments_exit_1_and_help_exits_0() {
    assert_eq!(run(&["identify"]).status.code(), Some(1));
    assert_eq!(run(&["demo", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn demos() {
    let o = run(&["demo", "ident-problem", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("equivalent on 1000/1000 pairs"));
    let o = run(&["demo", "utility-family"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("81"));
    assert!(stdout(&o).contains("(9.000000, 0.111111)"), "{}", stdout(&o));
    let o = run(&["demo", "elicit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mu = (0.10, 0.90)"), "{}", stdout(&o));
}

#[test]
fn elicit_drug_trial_agent() {
    let agent = fixture("drug_trial_agent.json");
    let o = run(&["elicit", "--agent", agent.to_str().unwrap(), "--objective", "0.5,0.5", "--event", "placebo"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mu = floats(&json["mu"]);
    assert!((mu[0] - 0.10).abs() < 1e-6);
    assert!(floats(&json["bias"]).iter().all(|b| *b < 1e-6));
}

#[test]
fn elicit_reports_bias_and_bad_event() {
    let agent = fixture("doubled_gap_agent.json");
    let path = agent.to_str().unwrap();
    let o = run(&["elicit", "--agent", path, "--objective", "0.6,0.4", "--event", "t2"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(floats(&json["bias"])[0] > 1e-3);
    let o = run(&["elicit", "--agent", path, "--objective", "0.6,0.4", "--event", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["elicit", "--agent", path, "--objective", "0.6,x", "--event", "t2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn axioms_verdicts() {
    let agent = fixture("drug_trial_agent.json");
    let o = run(&["axioms", "--rep", agent.to_str().unwrap(), "--objective", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["full_support", "local_state_monotonicity", "csi", "objective_marginal", "independent", "pc"] {
        assert_eq!(json[key], serde_json::Value::Bool(true), "{key}");
    }
    let biased = fixture("doubled_gap_agent.json");
    let o = run(&["axioms", "--rep", biased.to_str().unwrap(), "--objective", "0.6,0.4"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["csi"], serde_json::Value::Bool(false));
    assert_eq!(json["pc"], serde_json::Value::Bool(false));
}

#[test]
fn axioms_rejects_null_cells() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("rep.json");
    let text = std::fs::read_to_string(fixture("drug_trial_agent.json"))
        .unwrap()
        .replace("[[0.20, 0.05], [0.30, 0.45]]", "[[0.25, 0.0], [0.30, 0.45]]");
    std::fs::write(&rep, text).unwrap();
    let o = run(&["axioms", "--rep", rep.to_str().unwrap(), "--objective", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("(A0)"));
}

fn sweep(config: &Path) -> (Output, String) {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let o = run(&["sweep", "--config", config.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    (o, std::fs::read_to_string(&csv).unwrap_or_default())
}

fn records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn exact_sweep_recovers_every_trial() {
    let (o, text) = sweep(&fixture("sweep_exact.json"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(text.lines().next().unwrap(), "trial,K,N,noise,cond,residual,mu_err,verdict");
    let rows = records(&text);
    assert_eq!(rows.len(), 100);
    for r in &rows {
        assert!(r[6].parse::<f64>().unwrap() <= 1e-9, "{r:?}");
        assert_eq!(&r[7], "ok");
    }
}

#[test]
fn noisy_sweep_error_grows_with_condition_number() {
    let (o, text) = sweep(&fixture("sweep_noisy.json"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (mut low, mut high) = (Vec::new(), Vec::new());
    for r in records(&text) {
        let cond: f64 = r[4].parse().unwrap();
        let err: f64 = r[6].parse().unwrap();
        if cond < 10.0 {
            low.push(err);
        } else if cond > 100.0 {
            high.push(err);
        }
    }
    assert!(high.len() >= 5, "only {} ill-conditioned trials", high.len());
    assert!(median(high).unwrap() > median(low).unwrap());
}

#[test]
fn sweep_rejects_zero_trials() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"trials": 0, "noise_scale": 0.0}"#).unwrap();
    let (o, _) = sweep(&config);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
}

#[test]
fn outputs_are_deterministic() {
    let (_, a) = sweep(&fixture("sweep_noisy.json"));
    let (_, b) = sweep(&fixture("sweep_noisy.json"));
    assert_eq!(a, b);
    let (_, x) = identify_file(&fixture("drug_trial_problem.json"));
    let (_, y) = identify_file(&fixture("drug_trial_problem.json"));
    assert_eq!(x, y);
    assert_eq!(
        stdout(&run(&["demo", "ident-problem", "--seed", "3"])),
        stdout(&run(&["demo", "ident-problem", "--seed", "3"]))
    );
}
