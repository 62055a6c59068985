use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const ENV_VARS: &[&str] = &[
    "MEMS_OUT", "MEMS_FORMAT", "MEMS_DIM", "MEMS_DELTA", "MEMS_LAMBDA", "MEMS_RTOL", "MEMS_DIMS", "MEMS_DELTAS",
];

fn lab(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mems-lab"));
    c.args(args);
    for v in ENV_VARS {
        c.env_remove(v);
    }
    c
}

fn run(args: &[&str]) -> Output {
    lab(args).output().expect("binary runs")
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn summary_of_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".summary.json");
    s.into()
}

fn summary_of(csv: &Path) -> Value {
    json_file(&summary_of_path(csv))
}

#[test]
fn bifurcate_writes_curve_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = run(&["bifurcate", "--dim", "3", "--delta", "1", "--tail-samples", "60", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("alpha,lambda,s0,residual"));
    assert!(text.lines().count() > 150);
    let s = summary_of(&out);
    assert_eq!(s["schema"], 1);
    assert_eq!(s["lambda_star"], 1.0);
    assert_eq!(s["classification"], "TypeII");
    assert!(s["crossings"].as_u64().unwrap() >= 2);
    assert!(s["lambda_bar"].as_f64().unwrap() > 1.0);
    assert_eq!(s["bounds"]["satisfied"], true);
    for key in ["dim", "delta", "lambda_3star", "alpha_at_fold", "tolerances"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = run(&["bifurcate", "--dim", "3", "--delta", "2", "--body-samples", "30", "--tail-samples", "10", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(summary_of_path(&a)).unwrap(), fs::read(summary_of_path(&b)).unwrap());
}

#[test]
fn parabola_verification_meets_threshold() {
    let o = run(&["exact-verify", "--family", "parabola", "--dim", "4", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["members"], 20);
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn parabola_rejects_other_delta() {
    let o = run(&["exact-verify", "--family", "parabola", "--dim", "4", "--delta", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mu1_of_the_ball() {
    let o = run(&["mu1", "--dim", "3"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["mu1"].as_f64().unwrap() - std::f64::consts::PI.powi(2)).abs() <= 1e-10);
    assert_eq!(v["schema"], 1);
}

#[test]
fn flag_beats_environment_beats_default() {
    let from_env = lab(&["mu1"]).env("MEMS_DIM", "2").output().unwrap();
    let v: Value = serde_json::from_slice(&from_env.stdout).unwrap();
    assert!((v["mu1"].as_f64().unwrap() - 5.783185963).abs() <= 1e-8);
    let from_flag = lab(&["mu1", "--dim", "3"]).env("MEMS_DIM", "2").output().unwrap();
    let v: Value = serde_json::from_slice(&from_flag.stdout).unwrap();
    assert_eq!(v["dim"], 3);
    // critical defaults to N = 3
    let o = lab(&["critical", "--format", "json"]).output().unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 3);
}

#[test]
fn validation_failure_exits_one_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["bifurcate", "--dim", "1", "--delta", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_file(&out);
    assert_eq!(v["error"]["kind"], "InvalidParams");
    assert_eq!(v["error"]["exit_code"], 1);

    let o = run(&["bifurcate", "--delta", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "Usage");
}

#[test]
fn numerical_failure_exits_two_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["picard", "--dim", "2", "--delta", "2", "--lambda", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_file(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["error"]["kind"], "Infeasible");
}

fn check_profile(csv: &str) {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,U,dU"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.len() > 100);
    let last = rows.last().unwrap();
    assert_eq!((last[0], last[1]), (1.0, 0.0));
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    // the disk construction approaches U = 1 only like 1/ln(1/r)
    assert!(rows[0][1] > 0.9, "rupture profiles approach U = 1 at the origin");
}

#[test]
fn rupture_constructions_write_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["phase", "--dim", "4", "--delta", "2.5", "--lambda", "0.4"],
        &["picard", "--dim", "2", "--delta", "2", "--lambda", "0.01"],
        &["critical", "--dim", "3", "--lambda", "1e-3"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let out = dir.path().join(format!("p{k}.csv"));
        let mut a = args.to_vec();
        a.extend(["--out", out.to_str().unwrap()]);
        let o = run(&a);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        check_profile(&fs::read_to_string(&out).unwrap());
        let s = summary_of(&out);
        assert_eq!(s["schema"], 1);
        assert!(s["tolerances"].is_object());
    }
}

#[test]
fn phase_orbit_output() {
    let o = run(&["phase", "--dim", "4", "--delta", "2", "--lambda", "0.5", "--y0", "0.05", "--orbit"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,x,y,energy"));
    let s: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(s["diagnostics"]["energy_drift_rate"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn report_reproduces_table_cells() {
    let o = run(&["report", "--dims", "2,3,5", "--deltas", "1,1.75,2", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cells = v["rows"].as_array().unwrap();
    assert_eq!(cells.len(), 9);
    let find = |n: u64, d: f64| cells.iter().find(|c| c["dim"] == n && c["delta"] == d).unwrap();
    assert_eq!(find(2, 1.0)["regular"], "(0,1]");
    assert_eq!(find(2, 1.0)["rupture"], "(0,1)");
    assert_eq!(find(3, 1.75)["rupture"], "(0, 7/12)");
    assert_eq!(find(5, 2.0)["rupture"], "λ* = 2");
    let lb = find(3, 2.0)["lambda_bar"].as_f64().unwrap();
    assert!(lb >= 8.0 / 9.0 && lb < std::f64::consts::PI.powi(2) / 4.0);
}
