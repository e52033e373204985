use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TREFOIL: &str = r#"{
  "boundary": {"r0": 1.0, "epsilon": 1e-3, "modes": [{"index": 3, "amplitude": 1.0}]},
  "background": [{"degree": 1, "coeff": -1.0}],
  "eps_omega": 2.0, "eps_2omega": 3.0, "chi_perp": 1.0, "chi_par": 0.0,
  "grid_n": 128, "m_max": 6, "radii": [20, 40, 80],
  "scan": {"variable": "omega", "deltas": [1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5]}
}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn shg2d(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shg2d"));
    c.args(args);
    match threads {
        Some(t) => c.env("SHG2D_THREADS", t),
        None => c.env_remove("SHG2D_THREADS"),
    };
    c.output().unwrap()
}

fn run_to_file(cmd: &str, cfg: &Path, out: &Path, threads: Option<&str>) -> String {
    let o = shg2d(
        &[
            cmd,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        threads,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn compare_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", TREFOIL);
    let a = run_to_file("compare", &cfg, &dir.path().join("a.json"), Some("1"));
    let b = run_to_file("compare", &cfg, &dir.path().join("b.json"), Some("4"));
    let c = run_to_file("compare", &cfg, &dir.path().join("c.json"), None);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn outputs_round_trip_and_carry_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", TREFOIL);
    for cmd in ["analytic", "solve", "compare", "scan", "symmetry"] {
        let text = run_to_file(cmd, &cfg, &dir.path().join(format!("{cmd}.json")), None);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], "shg2d/1");
        assert_eq!(v["command"], cmd);
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(
            again, text,
            "{cmd} output does not re-serialize identically"
        );
    }
}

#[test]
fn compare_trefoil_dipole() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", TREFOIL);
    let o = shg2d(
        &[
            "compare",
            "--config",
            cfg.to_str().unwrap(),
            "--grid-n",
            "256",
        ],
        None,
    );
    assert!(o.status.success());
    let v = stdout_json(&o);
    let dipole = v["modes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["mode"] == 1)
        .unwrap();
    assert!(dipole["relative_error"].as_f64().unwrap() < 5e-3);
    assert_eq!(v["numeric"]["grid_n"], 256);
    assert_eq!(v["numeric"]["classification"]["label"], "dipole");
}

#[test]
fn symmetry_of_trefoil() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", TREFOIL);
    let o = shg2d(&["symmetry", "--config", cfg.to_str().unwrap()], None);
    let v = stdout_json(&o);
    assert_eq!(v["boundary"]["degree"], 6);
    assert_eq!(v["relative_degrees"][0]["degree"], 1);
}

#[test]
fn omega_scan_slope_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", TREFOIL);
    let csv_path = dir.path().join("scan.csv");
    let o = shg2d(
        &[
            "scan",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "csv",
            "--out",
            csv_path.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("delta,coefficient,mode,cond_number"));
    assert_eq!(lines.count(), 7);
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap())
            .unwrap();
    assert!((v["fitted_slope"].as_f64().unwrap() + 3.0).abs() < 0.05);
    assert_eq!(v["predicted_slope"], -3.0);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = TREFOIL.replace("\"chi_par\": 0.0,", "\"chi_par\": 0.0, \"extra\": 1,");
    let resonant = TREFOIL.replace("\"eps_omega\": 2.0", "\"eps_omega\": -1.0");
    let bad_grid = TREFOIL.replace("\"grid_n\": 128", "\"grid_n\": 63");
    for (name, text) in [
        ("u.json", unknown.as_str()),
        ("r.json", &resonant),
        ("g.json", &bad_grid),
    ] {
        let cfg = write_config(dir.path(), name, text);
        let o = shg2d(&["solve", "--config", cfg.to_str().unwrap()], None);
        assert_eq!(o.status.code(), Some(2), "{name}");
    }
    let cfg = write_config(dir.path(), "ok.json", TREFOIL);
    let o = shg2d(
        &[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "csv",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    let o = shg2d(
        &[
            "solve",
            "--config",
            dir.path().join("missing.json").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3_with_error_object() {
    let dir = tempfile::tempdir().unwrap();
    let text = TREFOIL.replace("\"eps_omega\": 2.0", "\"eps_omega\": -1.0000000000001");
    let cfg = write_config(dir.path(), "near.json", &text);
    let out = dir.path().join("never.json");
    let o = shg2d(
        &[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(3));
    let v = stdout_json(&o);
    assert_eq!(v["error"]["code"], "near-singular-system");
    assert_eq!(v["schema_version"], "shg2d/1");
    assert!(!out.exists());
}
