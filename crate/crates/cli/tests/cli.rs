use std::path::Path;
use std::process::{Command, Output};

use homemeg::fitting::trace_from_params;
use homemeg::presets::preset_by_name;
use serde_json::Value;

fn homemeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homemeg"))
        .args(args)
        .env_remove("HOMEMEG_SEED")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const MODEL: [&str; 8] = [
    "--p", "0.1", "--q", "0.1", "--alpha", "0.5", "--gamma", "0.05",
];

#[test]
fn flood_single_node_completes_immediately() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let mut args = vec!["flood", "--n", "1", "--trials", "5", "--out", out_dir];
    args.extend(MODEL);
    let out = homemeg(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("flood_n1.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["source", "trial", "completion_time", "censored"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| &r[2] == "0" && &r[3] == "false"));
    let summary = json(&dir.path().join("flood_summary.json"));
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["results"][0]["pooled"]["max"], 0.0);
}

#[test]
fn flood_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = homemeg(&[
            "flood",
            "--corollary-eps",
            "0.5",
            "--n",
            "32,48",
            "--trials",
            "30",
            "--seed",
            "7",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    for name in ["flood_n32.csv", "flood_n48.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    // summaries differ only in the output directory they record
    let mut s = json(&a.path().join("flood_summary.json"));
    let mut t = json(&b.path().join("flood_summary.json"));
    s["config"]["out"] = Value::Null;
    t["config"]["out"] = Value::Null;
    assert_eq!(s, t);
    assert_eq!(s["seed"], 7);
    assert!(s["results"][1]["bounds"]["corollary_regime"]
        .as_bool()
        .unwrap());
}

#[test]
fn bounds_mit_cell_lambda() {
    let out = homemeg(&["bounds", "--preset", "mit-cell", "--n", "1000"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let lambda = v["results"][0]["lambda"].as_f64().unwrap();
    assert!((lambda - 1000.0).abs() < 1e-9);
    assert_eq!(v["results"][0]["report"]["thm2_applicable"], true);
}

#[test]
fn ic_always_connected_has_unit_mass_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = homemeg(&[
        "ic",
        "--p",
        "0.3",
        "--q",
        "0.2",
        "--alpha",
        "1",
        "--gamma",
        "1",
        "--kmax",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("ic.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,pmf,ccdf");
    assert_eq!(lines[1], "1,1.0,0.0");
    assert_eq!(lines.len(), 5);
}

#[test]
fn ic_empirical_reports_tv() {
    let dir = tempfile::tempdir().unwrap();
    let out = homemeg(&[
        "ic",
        "--p",
        "0.3",
        "--q",
        "0.3",
        "--alpha",
        "0.8",
        "--gamma",
        "0.1",
        "--kmax",
        "50",
        "--empirical",
        "--steps",
        "1e6",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let s = json(&dir.path().join("ic_summary.json"));
    assert!(s["empirical"]["tv_truncated"].as_f64().unwrap() < 0.02);
}

#[test]
fn fit_writes_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let link = preset_by_name("infocom06").unwrap().link;
    let times: Vec<f64> = [1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0]
        .iter()
        .map(|k| k * 86.4)
        .collect();
    let trace = trace_from_params(&link, &times, 86.4, "synthetic").unwrap();
    let mut csv_text = String::from("t_seconds,ccdf\n");
    for (t, c) in &trace.points {
        csv_text.push_str(&format!("{t},{c:e}\n"));
    }
    let trace_path = dir.path().join("synthetic.csv");
    std::fs::write(&trace_path, csv_text).unwrap();
    let result = dir.path().join("result.json");
    let out = homemeg(&[
        "fit",
        "--trace",
        trace_path.to_str().unwrap(),
        "--out",
        result.to_str().unwrap(),
        "--grid-points",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&result);
    for key in [
        "p",
        "q",
        "alpha",
        "gamma",
        "p_H",
        "alpha_over_gamma",
        "p_plus_q",
        "objective",
    ] {
        assert!(v[key].is_number(), "{key}");
    }
    assert!(v["objective"].as_f64().unwrap() < 1e-3);
}

#[test]
fn verify_checks_pass_and_fail() {
    assert_eq!(
        code(&homemeg(&[
            "verify", "--check", "coupling", "--trials", "20"
        ])),
        0
    );
    assert_eq!(
        code(&homemeg(&[
            "verify", "--check", "lemma1", "--trials", "20000"
        ])),
        0
    );
    assert_eq!(
        code(&homemeg(&[
            "verify",
            "--check",
            "lambda-lb",
            "--trials",
            "20000"
        ])),
        0
    );
    assert_eq!(
        code(&homemeg(&[
            "verify", "--check", "oracle", "--trials", "20000", "--tv-tol", "0.05"
        ])),
        0
    );
    // no Monte Carlo estimate matches an exact law to zero total variation
    assert_eq!(
        code(&homemeg(&[
            "verify", "--check", "oracle", "--trials", "1000", "--tv-tol", "0"
        ])),
        1
    );
}

#[test]
fn couple_writes_ordered_times() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "couple",
        "--n",
        "24",
        "--trials",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ];
    args.extend(MODEL);
    assert_eq!(code(&homemeg(&args)), 0);
    let mut rdr = csv::Reader::from_path(dir.path().join("couple.csv")).unwrap();
    for r in rdr.records() {
        let r = r.unwrap();
        let (tp, th, tq): (u64, u64, u64) = (
            r[1].parse().unwrap(),
            r[2].parse().unwrap(),
            r[3].parse().unwrap(),
        );
        assert!(tq <= th && th <= tp);
    }
    let s = json(&dir.path().join("couple_summary.json"));
    assert_eq!(s["edge_violations"], 0);
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(
        code(&homemeg(&[
            "flood", "--n", "4", "--p", "2", "--q", "0.1", "--alpha", "0.5", "--gamma", "0.1"
        ])),
        2
    );
    assert_eq!(code(&homemeg(&["flood", "--n", "4"])), 2);
    assert_eq!(code(&homemeg(&["bounds"])), 2);
    assert_eq!(
        code(&homemeg(&[
            "couple", "--n", "4", "--p", "0.1", "--q", "0.1", "--alpha", "0.1", "--gamma", "0.5"
        ])),
        2
    );
    assert_eq!(
        code(&homemeg(&["fit", "--trace", "/definitely/missing.csv"])),
        3
    );
    assert_eq!(code(&homemeg(&["--help"])), 0);
}

#[test]
fn config_file_and_env_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# sweep\ncorollary_eps = 0.5\ntrials = 10\nseed = 3\n",
    )
    .unwrap();
    let run = |extra: &[&str], sub: &str, env: Option<&str>| {
        let out_dir = dir.path().join(sub);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_homemeg"));
        cmd.args([
            "flood",
            "--config",
            cfg.to_str().unwrap(),
            "--n",
            "16",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .args(extra)
        .env_remove("HOMEMEG_SEED");
        if let Some(v) = env {
            cmd.env("HOMEMEG_SEED", v);
        }
        assert!(cmd.output().unwrap().status.success());
        json(&out_dir.join("flood_summary.json"))
    };
    let from_file = run(&[], "a", None);
    assert_eq!(from_file["seed"], 3);
    assert_eq!(from_file["config"]["trials"], 10);
    let flag_wins = run(&["--seed", "5"], "b", None);
    assert_eq!(flag_wins["seed"], 5);
    let env_wins = run(&["--seed", "5"], "c", Some("42"));
    assert_eq!(env_wins["seed"], 42);
}
