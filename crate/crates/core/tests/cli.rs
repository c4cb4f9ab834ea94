use std::process::{Command, Output};

fn riskbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskbench")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn weights_json_round_trips() {
    let o = riskbench(&["weights", "--estimator", "es2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let w: Vec<f64> = serde_json::from_value(v["weights"]["weights"].clone()).unwrap();
    assert_eq!(w.len(), 250);
    assert_eq!(&w[..7], &[0.16, 0.16, 0.16, 0.16, 0.16, 0.16, 0.04]);
    assert_eq!(v["is_cre"], true);
}

#[test]
fn weights_csv_lists_every_position() {
    let o = riskbench(&["weights", "--estimator", "var_interp_1pct", "--csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("i,weight\n"));
    assert!(text.contains("\n2,0.49\n") && text.contains("\n3,0.51\n"));
}

#[test]
fn coherence_exit_codes() {
    let ok = riskbench(&["coherence", "--estimator", "es1", "--trials", "300"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = riskbench(&["coherence", "--estimator", "es4", "--trials", "300", "--json"]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert!(report.to_string().contains("FAIL"));
    let nonsense = riskbench(&["coherence", "--estimator", "es9"]);
    assert_eq!(nonsense.status.code(), Some(2));
}

#[test]
fn true_risk_prints_json() {
    let o = riskbench(&["true-risk", "--dist", "normal:0:1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["es_alpha"].as_f64().unwrap() - 2.3378).abs() < 1e-4);
    assert!((v["var_alpha"].as_f64().unwrap() - 1.96).abs() < 1e-3);
}

#[test]
fn consistency_prints_csv() {
    let o = riskbench(&["consistency", "--n", "100,1000", "--reps", "20", "--builder", "alt"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,reps,true_value,median_abs_error,q1,q3");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("100,20,"));
}

#[test]
fn bench_output_does_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"k": 200, "oracle_k": 100000, "distributions": ["normal", "nig:0.4:-0.14"], "estimators": ["ES1", "ES6"]}"#,
    )
    .unwrap();
    let run = |threads: &str| {
        let out = dir.path().join(format!("out{threads}.csv"));
        let o = riskbench(&[
            "bench",
            "--config",
            config.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("distribution,scheme,estimator,alpha,n,K,metric,value,mc_stderr\n"));
    // 2 distributions x 2 schemes x 2 estimators x 5 metrics
    assert_eq!(text.lines().count(), 1 + 40);
}

#[test]
fn bench_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"replications": 10}"#).unwrap();
    let o = riskbench(&["bench", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
