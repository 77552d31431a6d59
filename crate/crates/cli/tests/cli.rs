//! End-to-end runs of the `wplab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wplab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wplab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn ok(out: &Path, args: &[&str]) -> Output {
    let o = wplab(out, args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

const HARMONIC: &[&str] = &["--potential", "0,0,0.5", "--basis-size", "20"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn solve_on_the_harmonic_well() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("solve");
    ok(
        &out,
        &with(&["solve"], &with(HARMONIC, &["--states", "0,1,2,5"])),
    );

    let (header, rows) = csv(&out.join("energies.csv"));
    assert_eq!(header, "state,energy");
    let got: Vec<(usize, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(
        got.iter().map(|g| g.0).collect::<Vec<_>>(),
        vec![0, 1, 2, 5]
    );
    for (s, e) in got {
        assert!((e - (s as f64 + 0.5)).abs() < 1e-8, "s = {s}: {e}");
    }

    let (header, rows) = csv(&out.join("coefficients.csv"));
    assert_eq!(header, "state,k,coefficient");
    assert_eq!(rows.len(), 4 * 20);
    let (header, _) = csv(&out.join("densities.csv"));
    assert_eq!(header, "state,x,density");
    assert!(fs::read_to_string(out.join("densities.svg"))
        .unwrap()
        .starts_with("<svg"));
    assert!(!out.join(".wplab.lock").exists());
}

#[test]
fn config_json_is_the_effective_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cfg");
    ok(&out, &["solve", "--states", "1", "--format", "csv"]);
    let written = json(&out.join("config.json"));
    assert_eq!(written["states"], serde_json::json!([1]));
    assert_eq!(
        written["potential"],
        serde_json::json!([0.0, 0.0, 2.0, -0.2])
    );
    assert!(written["tolerances"]["negativity"].as_f64().unwrap() > 0.0);
    assert!(!out.join("densities.svg").exists());
    assert!(!out.join("solve.json").exists());

    // Feeding the written config back reproduces it byte for byte.
    let cfg = tmp.path().join("config.json");
    fs::copy(out.join("config.json"), &cfg).unwrap();
    let again = tmp.path().join("again");
    ok(&again, &["solve", "--config", cfg.to_str().unwrap()]);
    let mut a = json(&out.join("config.json"));
    let mut b = json(&again.join("config.json"));
    a["out_dir"] = Value::Null;
    b["out_dir"] = Value::Null;
    assert_eq!(a, b);
    assert_eq!(
        fs::read(out.join("energies.csv")).unwrap(),
        fs::read(again.join("energies.csv")).unwrap()
    );
}

#[test]
fn wigner_grid_of_the_harmonic_ground_state() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("grid");
    let args = with(
        &["wigner-grid"],
        &with(
            HARMONIC,
            &[
                "--states", "0,2", "--grid-x", "-5,5,81", "--grid-p", "-5,5,81",
            ],
        ),
    );
    let o = ok(&out, &args);
    assert!(!o.stdout.is_empty());

    let (header, rows) = csv(&out.join("wigner_s0.csv"));
    assert_eq!(header, "x,p,W");
    assert_eq!(rows.len(), 81 * 81);
    let w0 = json(&out.join("negativity_s0.json"));
    assert!((w0["integral"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(w0["negative_cells"], 0);
    assert_eq!(w0["x_intervals"].as_array().unwrap().len(), 0);
    assert_eq!(w0["p_intervals"].as_array().unwrap().len(), 0);
    assert!((w0["max"].as_f64().unwrap() - 1.0 / std::f64::consts::PI).abs() < 1e-10);

    let w2 = json(&out.join("negativity_s2.json"));
    assert_eq!(w2["x_intervals"].as_array().unwrap().len(), 2);
    assert!(w2["min"].as_f64().unwrap() < 0.0);
    assert!(out.join("wigner_s2.svg").exists());
}

#[test]
fn harmonic_profile_is_symmetric() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("profile");
    let args = with(
        &["energy-profile"],
        &with(
            HARMONIC,
            &[
                "--states",
                "2",
                "--profile-x",
                "-4,4,401",
                "--profile-p",
                "-4,4,401",
            ],
        ),
    );
    ok(&out, &args);
    for axis in ["x", "p"] {
        let (header, rows) = csv(&out.join(format!("profile_{axis}_s2.csv")));
        assert_eq!(header, "coord,energy,denominator,is_gap");
        assert_eq!(rows.len(), 401);
        for i in 0..200 {
            let (a, b) = (&rows[i], &rows[400 - i]);
            assert_eq!(a[3], b[3]);
            if a[3] == "0" {
                let (ea, eb): (f64, f64) = (a[1].parse().unwrap(), b[1].parse().unwrap());
                assert!(
                    (ea - eb).abs() <= 1e-8 * ea.abs().max(1.0),
                    "{axis}: {ea} vs {eb}"
                );
            } else {
                assert_eq!(a[1], "NaN");
            }
        }
        let meta = json(&out.join(format!("profile_{axis}_s2.json")));
        assert_eq!(meta["poles"].as_array().unwrap().len(), 2, "{axis}");
    }
}

#[test]
fn poles_of_the_cubic_well() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("poles");
    ok(&out, &["poles", "--states", "0,2"]);
    let (header, rows) = csv(&out.join("poles.csv"));
    assert_eq!(header, "state,axis,coord");
    let on_x = rows.iter().filter(|r| r[0] == "2" && r[1] == "x").count();
    assert_eq!(on_x, 2);
    assert!(rows.iter().all(|r| r[0] == "2"));
    let records = json(&out.join("poles.json"));
    assert_eq!(records.as_array().unwrap().len(), 4);
}

#[test]
fn report_summarizes_each_state() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("report");
    ok(&out, &["report", "--states", "1"]);
    let summary = json(&out.join("report.json"));
    let first = &summary[0];
    assert_eq!(first["state"], 1);
    let x = first["axes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["axis"] == "x")
        .unwrap();
    assert_eq!(x["poles"], 1);
    assert_eq!(x["bijection"], true);
    assert!(out.join("report_s1.json").exists());
    assert!(out.join("report_s1.svg").exists());

    let empty = tmp.path().join("empty");
    ok(&empty, &["report", "--states", ""]);
    assert_eq!(json(&empty.join("report.json")), serde_json::json!([]));
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good");
    ok(&good, &["verify", "--max-nk", "6", "--states", "0"]);
    let verdict = json(&good.join("verify.json"));
    assert_eq!(verdict["passed"], true);
    assert!(verdict["suites"].as_array().unwrap().len() >= 7);

    let bad = tmp.path().join("bad");
    let o = wplab(
        &bad,
        &[
            "verify",
            "--max-nk",
            "6",
            "--states",
            "",
            "--perturb-g",
            "1e-3",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let verdict = json(&bad.join("verify.json"));
    assert_eq!(verdict["passed"], false);
    let failed: Vec<&str> = verdict["suites"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["passed"] == false)
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert!(!failed.is_empty());
}

#[test]
fn usage_and_config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("err");
    for args in [
        vec!["solve", "--states", "a,b"],
        vec!["solve", "--states", "1,1"],
        vec!["solve", "--basis-size", "60"],
        vec!["solve", "--grid-x", "1,2"],
        vec!["solve", "--frame", "1,-1,1"],
        vec!["solve", "--format", "png"],
        vec!["frobnicate"],
    ] {
        let o = wplab(&out, &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }

    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"basis_sise": 10}"#).unwrap();
    assert_eq!(
        wplab(&out, &["solve", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        wplab(&out, &["solve", "--config", "/nonexistent/wplab.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn concurrent_writers_are_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("locked");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join(".wplab.lock"), "").unwrap();
    let o = wplab(&out, &["solve", "--states", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.join("energies.csv").exists());
    assert!(out.join(".wplab.lock").exists());
}
