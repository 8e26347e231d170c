use std::path::Path;
use std::process::Command;

use kdsim::cli::{main_with_args, EXIT_CONFIG, EXIT_OK};
use kdsim::config::Scenario;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kdsim"))
}

fn run(args: &[&str]) -> i32 {
    let mut v = vec!["kdsim"];
    v.extend_from_slice(args);
    main_with_args(v)
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

/// Every output listed in the manifest exists with the recorded checksum, and
/// every JSON output carries the manifest's scenario hash.
fn check_manifest(dir: &Path, command: &str) -> Value {
    let m = read_json(&dir.join(format!("{command}_manifest.json")));
    let hash = m["scenario_hash"].as_str().unwrap();
    let sc: Scenario = serde_json::from_value(m["scenario"].clone()).unwrap();
    assert_eq!(sc.hash(), hash);
    for o in m["outputs"].as_array().unwrap() {
        let name = o["file"].as_str().unwrap();
        let bytes = std::fs::read(dir.join(name)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), o["sha256"].as_str().unwrap(), "{name}");
        if name.ends_with(".json") {
            let v: Value = serde_json::from_slice(&bytes).unwrap();
            assert_eq!(v["scenario_hash"], hash, "{name}");
            assert_eq!(v["manifest"], format!("{command}_manifest.json"));
        }
    }
    m
}

fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let h = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (h, rows)
}

/// Short pulses and a small ladder so the ladder solver finishes in seconds.
fn quick() -> Value {
    let mut v = serde_json::to_value(Scenario::default()).unwrap();
    for p in v["pulses"].as_array_mut().unwrap() {
        p["duration"] = json!(1e-12);
    }
    v["solver"]["ladder_max"] = json!(8);
    v
}

#[test]
fn missing_config_is_a_config_error_with_no_output() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("out");
    let code = run(&["table1", "/nonexistent/scenario.json", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(!out.exists());
}

#[test]
fn invalid_configs_are_rejected_before_writing() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("out");
    let o = out.to_str().unwrap();
    let mut empty = quick();
    for k in ["skd", "depolarizer", "two_color_kd", "regular_kd"] {
        empty["figure3"][k] = Value::Null;
    }
    let cases = [
        ("empty grid", empty),
        ("unknown field", json!({"solver": {"tolerence": 1e-9}})),
        ("bad tolerance", json!({"solver": {"tolerance": 0.5}})),
        ("inverted grid", json!({"figure3": {"skd": {"min": 1e18, "max": 1e16, "points_per_decade": 4}}})),
        ("boundary initial state", json!({"electron": {"speed": 1e7, "initial_ladder_index": 11, "initial_spin": "up"}})),
    ];
    for (what, v) in cases {
        let p = write_json(t.path(), "bad.json", &v);
        assert_eq!(run(&["figure3", &p, "--out-dir", o]), EXIT_CONFIG, "{what}");
    }
    assert_eq!(run(&["table1", "--tolerance", "-1", "--out-dir", o]), EXIT_CONFIG);
    assert_eq!(run(&["table1", "--threads", "0", "--out-dir", o]), EXIT_CONFIG);
    assert_eq!(run(&["nosuchcommand"]), EXIT_CONFIG);
    assert!(!out.exists());
}

#[test]
fn table1_reproduces_scaling_values() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(run(&["table1", "--out-dir", t.path().to_str().unwrap()]), EXIT_OK);
    let (h, rows) = csv_rows(&t.path().join("table1.csv"));
    assert_eq!(h, ["process", "I", "v", "lambda", "tau", "P_scaling", "P_quadrature", "ratio"]);
    let want = [("depolarizer", 0.00576), ("skd", 0.00128), ("two_color_kd", 7.4e-4)];
    for (process, p) in want {
        let r = rows.iter().find(|r| r[0] == process).unwrap();
        let ps: f64 = r[5].parse().unwrap();
        assert!((ps / p - 1.0).abs() < 0.01, "{process}: {ps}");
        let ratio: f64 = r[7].parse().unwrap();
        assert!((0.5..=2.0).contains(&ratio), "{process}: ratio {ratio}");
    }
    let m = check_manifest(t.path(), "table1");
    assert!(m["runs"].as_array().unwrap().iter().all(|r| r["ok"] == true));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let t = tempfile::tempdir().unwrap();
    let mut v = quick();
    v["figure3"] = json!({
        "skd": {"min": 1e16, "max": 1e17, "points_per_decade": 2},
        "depolarizer": null, "two_color_kd": null,
        "regular_kd": {"min": 1e9, "max": 1e10, "points_per_decade": 2},
        "min_fit_points": 3
    });
    let cfg = write_json(t.path(), "s.json", &v);
    let a = t.path().join("a");
    let b = t.path().join("b");
    assert_eq!(run(&["figure3", &cfg, "--out-dir", a.to_str().unwrap(), "--threads", "1"]), EXIT_OK);
    assert_eq!(run(&["figure3", &cfg, "--out-dir", b.to_str().unwrap(), "--threads", "3"]), EXIT_OK);
    for f in ["figure3.csv", "figure3.gp"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let sa = read_json(&a.join("slopes.json"));
    let sb = read_json(&b.join("slopes.json"));
    assert_eq!(sa["slopes"], sb["slopes"]);
    check_manifest(&a, "figure3");

    let (h, rows) = csv_rows(&a.join("figure3.csv"));
    assert_eq!(h.len(), 10);
    assert_eq!(h[0], "intensity");
    assert_eq!(rows.len(), 6);
    let skd = rows.iter().find(|r| r[0].starts_with("1.0000000000000000e16")).unwrap();
    let (pt, se): (f64, f64) = (skd[1].parse().unwrap(), skd[2].parse().unwrap());
    assert!(((se - pt) / pt).abs() < 0.1, "pt {pt} se {se}");
    assert!(skd[3].is_empty() && skd[5].is_empty());
    let raw = std::fs::read_to_string(a.join("figure3.csv")).unwrap();
    assert!(!raw.contains('\r'));
}

#[test]
fn figure4_writes_the_momentum_distribution() {
    let t = tempfile::tempdir().unwrap();
    let mut v = quick();
    v["solver"]["ladder_max"] = json!(12);
    let cfg = write_json(t.path(), "s.json", &v);
    assert_eq!(run(&["figure4", &cfg, "--out-dir", t.path().to_str().unwrap()]), EXIT_OK);
    let (h, rows) = csv_rows(&t.path().join("figure4.csv"));
    assert_eq!(h, ["n", "p_up", "p_down"]);
    let ns: Vec<i32> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ns, (-7..=7).collect::<Vec<_>>());
    let up2: f64 = rows[9][1].parse().unwrap();
    assert!(up2 > 0.99);
    check_manifest(t.path(), "figure4");
}

#[test]
fn figure5_writes_nine_trajectories() {
    let t = tempfile::tempdir().unwrap();
    let mut v = quick();
    v["classical"]["lead_time"] = json!(200.0);
    v["classical"]["t_end"] = json!(300.0);
    v["solver"]["dt_divisor"] = json!(50.0);
    let cfg = write_json(t.path(), "s.json", &v);
    assert_eq!(run(&["figure5", &cfg, "--out-dir", t.path().to_str().unwrap()]), EXIT_OK);
    let d = read_json(&t.path().join("diagnostics.json"));
    let files = d["files"].as_array().unwrap();
    assert_eq!(files.len(), 9);
    assert_eq!(d["report"]["trajectories"].as_array().unwrap().len(), 9);
    for f in files {
        let (h, rows) = csv_rows(&t.path().join(f.as_str().unwrap()));
        assert_eq!(h, ["w0t", "k0x", "k0y", "k0z", "px_mc", "py_mc", "pz_mc", "gamma_minus_1"]);
        let t0: f64 = rows[0][0].parse().unwrap();
        assert_eq!(t0, -200.0);
    }
    check_manifest(t.path(), "figure5");
}

#[test]
fn run_compares_ladder_and_perturbation() {
    let t = tempfile::tempdir().unwrap();
    let mut v = quick();
    v["pulses"][0]["intensity"] = json!(1e16);
    v["pulses"][1]["intensity"] = json!(4e16);
    let cfg = write_json(t.path(), "s.json", &v);
    assert_eq!(run(&["run", &cfg, "--out-dir", t.path().to_str().unwrap()]), EXIT_OK);
    let (h, rows) = csv_rows(&t.path().join("run.csv"));
    assert_eq!(h, ["n", "p_up_se", "p_down_se", "p_up_pt", "p_down_pt"]);
    let r = rows.iter().find(|r| r[0] == "-2").unwrap();
    let (se, pt): (f64, f64) = (r[2].parse().unwrap(), r[4].parse().unwrap());
    assert!(pt > 0.0 && ((se - pt) / pt).abs() < 1e-3, "se {se} pt {pt}");
    let init = rows.iter().find(|r| r[0] == "2").unwrap();
    assert!(init[3].is_empty());
    check_manifest(t.path(), "run");
}

#[test]
fn field_snapshot_has_requested_shape() {
    let t = tempfile::tempdir().unwrap();
    let code = run(&["fields", "--times", "0,1e-12", "--points", "11", "--out-dir", t.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (h, rows) = csv_rows(&t.path().join("fields.csv"));
    assert_eq!(h, ["z", "t", "A_x", "A_y", "B_x", "B_y"]);
    assert_eq!(rows.len(), 22);
    assert_eq!(run(&["fields", "--points", "1", "--out-dir", t.path().to_str().unwrap()]), EXIT_CONFIG);
}

#[test]
fn out_dir_falls_back_to_environment() {
    let t = tempfile::tempdir().unwrap();
    let env_dir = t.path().join("from_env");
    let flag_dir = t.path().join("from_flag");
    let s = bin().arg("table1").env("KDSIM_OUT_DIR", &env_dir).status().unwrap();
    assert_eq!(s.code(), Some(EXIT_OK));
    assert!(env_dir.join("table1.csv").exists());
    let s = bin().args(["table1", "--out-dir", flag_dir.to_str().unwrap()]).env("KDSIM_OUT_DIR", &env_dir).status().unwrap();
    assert_eq!(s.code(), Some(EXIT_OK));
    assert!(flag_dir.join("table1.csv").exists());
    let s = bin().args(["table1", "/no/such/file.json"]).env("KDSIM_OUT_DIR", t.path().join("x")).status().unwrap();
    assert_eq!(s.code(), Some(EXIT_CONFIG));
    assert!(!t.path().join("x").exists());
}

/// Perturbs every leaf of the resolved scenario. Each accepted change must
/// show up in the manifest's scenario and its hash.
#[test]
fn manifest_records_every_parameter() {
    fn leaves(v: &Value, path: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    path.push(k.clone());
                    leaves(x, path, out);
                    path.pop();
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    path.push(i.to_string());
                    leaves(x, path, out);
                    path.pop();
                }
            }
            _ => out.push(path.clone()),
        }
    }
    fn at<'a>(v: &'a mut Value, path: &[String]) -> &'a mut Value {
        path.iter().fold(v, |v, k| match v {
            Value::Array(a) => &mut a[k.parse::<usize>().unwrap()],
            v => &mut v[k.as_str()],
        })
    }
    let base = Scenario::default();
    let base_v = serde_json::to_value(&base).unwrap();
    let mut paths = Vec::new();
    leaves(&base_v, &mut vec![], &mut paths);
    assert!(paths.len() > 60);
    let mut checked = 0;
    for p in &paths {
        let mut v = base_v.clone();
        let leaf = at(&mut v, p);
        *leaf = match leaf.clone() {
            Value::Number(n) if n.is_u64() => json!(n.as_u64().unwrap() + 1),
            Value::Number(n) if n.is_i64() => json!(n.as_i64().unwrap() - 1),
            Value::Number(n) if n.as_f64() == Some(0.0) => json!(0.1),
            Value::Number(n) => json!(n.as_f64().unwrap() * 1.01),
            Value::Bool(b) => json!(!b),
            Value::Null => continue,
            Value::String(_) => continue,
            _ => unreachable!(),
        };
        let Ok(sc) = Scenario::from_json(&v.to_string()) else { continue };
        assert_ne!(sc.hash(), base.hash(), "{}", p.join("."));
        let back = serde_json::to_value(&sc).unwrap();
        assert_eq!(back, v, "{}", p.join("."));
        checked += 1;
    }
    assert!(checked > 50, "{checked}");
}

#[test]
fn table1_output_follows_its_parameters() {
    let t = tempfile::tempdir().unwrap();
    let base = t.path().join("base");
    assert_eq!(run(&["table1", "--out-dir", base.to_str().unwrap()]), EXIT_OK);
    let base_csv = std::fs::read(base.join("table1.csv")).unwrap();
    for (row, key) in [(0, "intensity"), (0, "speed"), (1, "lambda"), (2, "tau")] {
        let mut v = serde_json::to_value(Scenario::default()).unwrap();
        let x = v["table1"][row][key].as_f64().unwrap();
        v["table1"][row][key] = json!(x * 1.1);
        let cfg = write_json(t.path(), "s.json", &v);
        let d = t.path().join(format!("{row}{key}"));
        assert_eq!(run(&["table1", &cfg, "--out-dir", d.to_str().unwrap()]), EXIT_OK);
        assert_ne!(std::fs::read(d.join("table1.csv")).unwrap(), base_csv, "{key}");
    }
}
