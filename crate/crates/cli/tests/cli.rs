use std::path::Path;
use std::process::{Command, Output};

fn flr4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flr4"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn steady_state_reports_two_level_population() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "two.json", r#"{"omega": [7, 0, 0]}"#);
    let out = flr4(&["steady", "--config", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: {"));
    assert_eq!(lines.next().unwrap(), "label,re,im,element");
    let row = text.lines().find(|l| l.starts_with("psi7,")).unwrap();
    assert!(row.starts_with("psi7,0.45794392523364"), "{row}");
    let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 196.0 / 428.0).abs() < 1e-12);
    assert!(text.lines().any(|l| l.starts_with("rho11,")));

    let out = flr4(&["steady", "--config", &cfg, "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["psi"][6]["element"], "rho22");
    assert_eq!(doc["manifest"]["c_sign"], "+i*omega1");
    // defaults are echoed
    assert_eq!(doc["manifest"]["params"]["gamma_level"], serde_json::json!([6.0, 1.0, 1.0]));
}

#[test]
fn figure_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = flr4(&["figure", "fig2a", "--out-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    for f in ["fig2a_spectrum.csv", "fig2a_populations.csv", "fig2a_manifest.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let spectrum = std::fs::read_to_string(out_dir.join("fig2a_spectrum.csv")).unwrap();
    let mut lines = spectrum.lines();
    let header: serde_json::Value =
        serde_json::from_str(lines.next().unwrap().strip_prefix("# manifest: ").unwrap()).unwrap();
    assert_eq!(header["details"]["spectrum"]["method"], "eq10");
    assert_eq!(header["details"]["spectrum"]["nu_points_excluded"], 1);
    assert_eq!(lines.next().unwrap(), "nu,S1,S2,S3");
    assert_eq!(lines.count(), 2000);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("fig2a_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest, header);
}

#[test]
fn spectrum_methods_are_tagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig2.json", r#"{"omega": [7, 4, 1]}"#);
    for (method, tag) in [("eq10", "eq10"), ("qrt", "qrt-consistent"), ("timedomain", "timedomain")] {
        let path = dir.path().join(format!("{method}.csv"));
        let out = flr4(&[
            "spectrum", "--config", &cfg, "--nu-min", "-10", "--nu-max", "10", "--nu-points", "21", "--method", method,
            "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{method}: {}", stderr(&out));
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.lines().next().unwrap().contains(&format!("\"method\":\"{tag}\"")));
        let rows = text.lines().skip(2).count();
        assert_eq!(rows, if method == "eq10" { 20 } else { 21 });
    }
    let path = dir.path().join("single.csv");
    let out = flr4(&[
        "spectrum", "--config", &cfg, "--nu-min", "-5", "--nu-max", "5", "--nu-points", "10", "--method", "qrt",
        "--transition", "3", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().nth(1).unwrap(), "nu,S3");
}

#[test]
fn errors_are_single_machine_readable_lines() {
    let dir = tempfile::tempdir().unwrap();
    let leaky = write_config(dir.path(), "leak.json", r#"{"gamma_branch": [0.5, 1, 0]}"#);
    let out = flr4(&["validate", "--config", &leaky]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: TraceLeak: "), "{err}");

    let open = write_config(dir.path(), "open.json", r#"{"gamma_branch": [0.5, 1, 0], "allow_open_system": true}"#);
    let out = flr4(&["validate", "--config", &open]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("override gamma3 - gamma23 = 0.5"));

    let typo = write_config(dir.path(), "typo.json", r#"{"omgea": [1, 2, 3]}"#);
    let out = flr4(&["steady", "--config", &typo]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: ConfigError: "));

    let empty = write_config(
        dir.path(),
        "zero.json",
        r#"{"omega":[0,0,0],"gamma_level":[0,0,0],"gamma_branch":[0,0,0],"mu":[0,0,0]}"#,
    );
    let out = flr4(&["steady", "--config", &empty]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: SingularLiouvillian: "));

    assert_eq!(flr4(&["spectrum", "--config", &leaky]).status.code(), Some(2));
    assert_eq!(flr4(&["figure", "fig9", "--out-dir", "x"]).status.code(), Some(2));
    assert_eq!(flr4(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn eigenvalues_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", r#"{}"#);
    let out = flr4(&["eigs", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let re: Vec<f64> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(re.len(), 15);
    assert!(re.windows(2).all(|w| w[0] >= w[1]));
    assert!(re[0] < 0.0);
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", r#"{"omega": [7, 4, 3], "delta": [1, 0, -1]}"#);
    let first = dir.path().join("pop.csv");
    let out = flr4(&[
        "populations", "--config", &cfg, "--delta1-min", "-5", "--delta1-max", "5", "--points", "11", "--out",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&first).unwrap();
    let manifest_json = text.lines().next().unwrap().strip_prefix("# manifest: ").unwrap();
    let manifest_path = dir.path().join("m.json");
    std::fs::write(&manifest_path, manifest_json).unwrap();
    let second = dir.path().join("again.csv");
    let out = flr4(&["replay", "--manifest", manifest_path.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", r#"{"omega": [7, 4, 12]}"#);
    let mut outputs = Vec::new();
    for threads in ["1", "0", "3"] {
        let path = dir.path().join(format!("s{threads}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_flr4"))
            .env("FLR4_THREADS", threads)
            .args([
                "sweep-omega3", "--config", &cfg, "--min", "0.5", "--max", "20", "--points", "6", "--log", "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("omega3,peak_S1,peak_S2,peak_S3,argpeak_nu_S1"));

    let bad = Command::new(env!("CARGO_BIN_EXE_flr4"))
        .env("FLR4_THREADS", "many")
        .args(["eigs", "--config", &cfg])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
