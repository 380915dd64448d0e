//! End-to-end checks of the `gme` binary: output formats, exit codes, the
//! one-line `error[<kind>]:` stderr contract, and JSON emission.

use std::path::Path;
use std::process::{Command, Output};

fn gme<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_gme"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn bound_prints_four_decimals() {
    let out = gme(["bound", "2", "2", "2", "2", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1.2247\n");

    let out = gme(["bound", "4", "4", "4", "4"]);
    assert_eq!(stdout(&out), "1.3229\n");

    // a single mode admits no entanglement at all
    let out = gme(["bound", "2"]);
    assert_eq!(stdout(&out), "0.0000\n");

    let out = gme(["bound", "2", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[usage]:"));
}

#[test]
fn compute_catalog_state_reports_values() {
    let out = gme(["compute", "w3", "--restarts", "16"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("sigma: 0.6667"), "{text}");
    assert!(text.contains("GME:   0.8165"), "{text}");
    assert!(text.contains("bound: 1.0000"), "{text}");
    assert!(text.contains("slack:"), "{text}");
    assert!(text.contains("closest product state"), "{text}");
    assert!(text.contains("wall time:"), "{text}");
}

#[test]
fn compute_symmetric_flag() {
    let out = gme(["compute", "ghz:3", "--symmetric", "--restarts", "8"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("GME:   0.7654"));

    // het224 has unequal dims, so the shared-factor search must refuse it
    let out = gme(["compute", "het224", "--symmetric", "--restarts", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[usage]:"));
}

#[test]
fn compute_unknown_name_is_a_usage_error() {
    let out = gme(["compute", "no_such_state"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("error[usage]:"), "{err}");
    assert!(err.contains("no_such_state"), "{err}");
}

#[test]
fn compute_malformed_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.ket");
    std::fs::write(&path, "|01> + 0.5*\n").unwrap();
    let out = gme([Path::new("compute"), &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[parse]:"), "{}", stderr(&out));
}

#[test]
fn compute_flags_non_convergence_but_still_reports() {
    let out = gme([
        "compute", "w3", "--restarts", "2", "--max-iters", "1", "--tol", "1e-15",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("sigma:"), "results must still print");
    assert!(stderr(&out).starts_with("error[no-convergence]:"), "{}", stderr(&out));
}

#[test]
fn compute_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w3.json");
    let out = gme([
        "compute".as_ref(),
        "w3".as_ref(),
        "--restarts".as_ref(),
        "16".as_ref(),
        "--seed".as_ref(),
        "7".as_ref(),
        "--json".as_ref(),
        path.as_os_str(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["version"], "1");
    assert_eq!(v["input"]["source"], "w3");
    assert_eq!(v["input"]["kind"], "catalog");
    assert_eq!(v["config"]["restarts"], 16);
    assert_eq!(v["config"]["seed"], 7);
    let sigma = v["result"]["sigma"].as_f64().unwrap();
    assert!((sigma - 2.0 / 3.0).abs() < 1e-6);
    assert_eq!(v["result"]["closest"].as_array().unwrap().len(), 3);
    assert_eq!(v["expected"]["within_tolerance"], true);
    // full precision in JSON: more digits than the 4-decimal text rendering
    assert!(body.contains("0.66666666"), "{body}");
}

#[test]
fn compute_json_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = gme([
            "compute".as_ref(),
            "ghz:3".as_ref(),
            "--restarts".as_ref(),
            "12".as_ref(),
            "--json".as_ref(),
            path.as_os_str(),
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn export_then_compute_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("het233.ket");
    let out = gme([
        "catalog".as_ref(),
        "export".as_ref(),
        "het233".as_ref(),
        path.as_os_str(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("wrote"));

    let out = gme([
        Path::new("compute").as_os_str(),
        path.as_os_str(),
        "--restarts".as_ref(),
        "24".as_ref(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("(file)"), "{text}");
    assert!(text.contains("GME:   0.9194"), "{text}");
}

#[test]
fn catalog_listing_and_show() {
    let out = gme(["catalog", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["ghz:2", "w3", "ame5", "qutrit4", "het224", "uniform2_3x5_2", "sixqubit"] {
        assert!(text.contains(name), "listing must mention {name}");
    }
    assert!(text.contains("2x2x4"), "{text}");

    let out = gme(["catalog", "show", "het224"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(|000>+|011>+|102>+|113>)/2"));

    let out = gme(["catalog", "show", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[usage]:"));

    let out = gme(["catalog", "export", "sixqubit", "/tmp/never-written.ket"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reproduce_table_exits_zero_on_match() {
    let out = gme(["reproduce", "III", "--restarts", "24"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Table III"), "{text}");
    assert!(text.contains("pass"), "{text}");
    assert!(!text.contains("MISMATCH"), "{text}");
}

#[test]
fn help_and_version_exit_zero() {
    let out = gme(["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("compute"));

    let out = gme(["--version"]);
    assert!(out.status.success());

    let out = gme(["definitely-not-a-command"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[usage]:"), "{}", stderr(&out));

    let out = gme(["compute", "w3", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[usage]:"), "{}", stderr(&out));
}
