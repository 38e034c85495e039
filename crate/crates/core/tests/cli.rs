use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaudin-kp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const THREE_SITES: &str = "twist = [2, -1]\npositions = [\"0\", \"2\", \"5\"]\nseed = 3\n";

#[test]
fn default_verify_passes_and_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for dir in [&a, &b] {
        let o = run(&["verify", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ra = std::fs::read(a.join("verify.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("verify.json")).unwrap());
    let v: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["seed"], 0);
    assert_eq!(v["failed"], 0);
    assert!(!String::from_utf8_lossy(&ra).contains("elapsed_ms"));
}

#[test]
fn coincident_positions_are_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "seed = 2\npositions = [\"1/2\", \"2/4\"]\n");
    let o = run(&["verify", "--config", &c]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn check_filter() {
    let o = run(&["verify", "--check", "giambelli"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let results = v["results"].as_array().unwrap();
    assert!(!results.is_empty());
    assert!(results.iter().all(|r| r["name"] == "giambelli"));
    assert_eq!(run(&["verify", "--check", "giambelli,nonsense"]).status.code(), Some(2));
}

#[test]
fn float_mode_reports_float_results() {
    let o = run(&["verify", "--float", "--check", "fay,cm_structure", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 5);
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["exact"] == false));
}

#[test]
fn spectrum_uniform_sector_is_the_closed_form() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), THREE_SITES);
    let o = run(&["spectrum", "--config", &c, "--sector", "3,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let t = &v["tables"][0];
    // H_i = 2 + sum_{j != i} 1/(x_i - x_j) at x = (0, 2, 5)
    let expected = [2.0 - 0.5 - 0.2, 2.0 + 0.5 - 1.0 / 3.0, 2.0 + 0.2 + 1.0 / 3.0];
    for source in ["direct", "classical"] {
        let vals = t[source][0]["values"].as_array().unwrap();
        for (v, e) in vals.iter().zip(expected) {
            assert!((v[0].as_f64().unwrap() - e).abs() < 1e-12);
            assert!(v[1].as_f64().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn spectrum_three_matched_tuples() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), THREE_SITES);
    let out = d.path().join("s");
    let o = run(&["spectrum", "--config", &c, "--sector", "2,1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out.join("spectrum.json"));
    let m = &v["tables"][0]["matching"];
    assert_eq!(m["pairs"].as_array().unwrap().len(), 3);
    assert!(m["max_deviation"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn spectrum_rejects_bad_sectors() {
    assert_eq!(run(&["spectrum", "--sector", "2,1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--sector", "1,1,0"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--sector", "1,x"]).status.code(), Some(2));
}

#[test]
fn dynamics_zero_window_is_the_positions() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), THREE_SITES);
    let out = d.path().join("z");
    let o = run(&["dynamics", "--config", &c, "--sector", "2,1", "--window", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,root1_re,root1_im,root2_re,root2_im,root3_re,root3_im");
    assert_eq!(lines.len(), 2);
    let row: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
    for (i, x) in [0.0, 2.0, 5.0].iter().enumerate() {
        assert!((row[1 + 2 * i] - x).abs() < 1e-12);
        assert!(row[2 + 2 * i].abs() < 1e-12);
    }
}

#[test]
fn dynamics_default_window_follows_the_flow() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), THREE_SITES);
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for state in ["0", "1", "2"] {
        for dir in [&a, &b] {
            let o = run(&["dynamics", "--config", &c, "--sector", "2,1", "--state", state, "--out", dir.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        }
        let s = read_json(&a.join("summary.json"));
        assert_eq!(s["rows"], 101);
        assert!(s["tau_vs_flow"].as_f64().unwrap() < 1e-6);
        assert!(s["master_vs_flow"].as_f64().unwrap() < 1e-6);
        for f in ["summary.json", "trajectory.csv", "conservation.csv"] {
            assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
        }
    }
    let cons = std::fs::read_to_string(a.join("conservation.csv")).unwrap();
    assert!(cons.starts_with("t,drift,I1_re,I1_im,I2_re,I2_im,I3_re,I3_im\n"));
}

#[test]
fn dynamics_collision_aborts_with_partial_output() {
    // at x = (0, 1) the zeros of the first (1,1) state meet near t_2 = 0.089
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("c");
    let o = run(&["dynamics", "--sector", "1,1", "--state", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("near collision") && err.contains("rows"), "{err}");
    let s = read_json(&out.join("summary.json"));
    assert!(s["aborted"].is_string());
    let flow = std::fs::read_to_string(out.join("flow_trajectory.csv")).unwrap();
    let rows = flow.lines().count() - 1;
    assert!(rows > 1 && rows < 101, "{rows}");
}

#[test]
fn dynamics_state_out_of_range() {
    assert_eq!(run(&["dynamics", "--sector", "1,1", "--state", "2"]).status.code(), Some(2));
}
