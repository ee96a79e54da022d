use std::path::PathBuf;
use std::process::{Command, Output};

use superkoszul_cli::report::{Report, COLOR_ENV};

fn manifest(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("manifests").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superkoszul"))
        .args(args)
        .env_remove(COLOR_ENV)
        .output()
        .expect("binary runs")
}

fn run_json(suite: &str, m: &str, extra: &[&str]) -> (i32, Report) {
    let path = manifest(m);
    let mut args = vec![suite, "--manifest", path.to_str().unwrap(), "--report", "json"];
    args.extend_from_slice(extra);
    let out = run(&args);
    let report: Report =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), report)
}

fn status_of<'a>(r: &'a Report, name: &str) -> &'a superkoszul_cli::report::CheckRecord {
    r.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn all_on_the_bundled_example_matches_the_golden_report() {
    let path = manifest("so3.json");
    let out = run(&["all", "--manifest", path.to_str().unwrap(), "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = include_str!("fixtures/so3_all.json");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
    let r: Report = serde_json::from_str(golden).unwrap();
    assert_eq!(r.summary.fail, 0);
    assert_eq!(r.summary.skipped, 0);
}

#[test]
fn pinfty_passes_on_a_constant_bivector() {
    let (code, r) = run_json("pinfty", "constant.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(status_of(&r, "pinfty.self_bracket").status, "pass");
}

#[test]
fn intertwine_without_potential_is_skipped_with_the_obstruction() {
    let (code, r) = run_json("intertwine", "obstructed.json", &[]);
    assert_eq!(code, 0);
    let c = status_of(&r, "intertwine.relation");
    assert_eq!(c.status, "skipped");
    let detail = c.detail.as_deref().unwrap();
    assert!(detail.contains("modular obstruction"), "{detail}");
    assert!(detail.contains("x2_star"), "{detail}");
}

#[test]
fn intertwine_with_potential_passes() {
    let (code, r) = run_json("intertwine", "potential.json", &[]);
    assert_eq!(code, 0, "{r:?}");
    for name in [
        "intertwine.relation",
        "intertwine.corrected.diagram",
        "intertwine.corrected.rules",
    ] {
        assert_eq!(status_of(&r, name).status, "pass");
    }
}

#[test]
fn broken_structure_exits_one() {
    let (code, r) = run_json("pinfty", "broken.json", &[]);
    assert_eq!(code, 1);
    assert_eq!(status_of(&r, "pinfty.self_bracket").status, "fail");
}

#[test]
fn mixed_parity_manifest_is_green() {
    let (code, r) = run_json("all", "mixed.json", &[]);
    assert_eq!(code, 0, "{r:?}");
    assert!(r.summary.pass > 30);
}

#[test]
fn reports_are_deterministic_and_echo_overrides() {
    let (_, a) = run_json("symbols", "so3.json", &["--seed", "7", "--hbar-order", "2"]);
    let (_, b) = run_json("symbols", "so3.json", &["--seed", "7", "--hbar-order", "2"]);
    assert_eq!(a, b);
    assert_eq!(a.seed, 7);
    assert_eq!(a.budgets.seed, 7);
    assert_eq!(a.budgets.hbar_order, 2);
    let (_, c) = run_json("thick", "so3.json", &["--momentum-order", "3"]);
    assert_eq!(c.budgets.momentum_order, 3);
}

#[test]
fn text_and_json_agree() {
    let path = manifest("obstructed.json");
    let (_, r) = run_json("all", "obstructed.json", &[]);
    let out = run(&["all", "--manifest", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, r.to_text(false));
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(" modular.") || l.contains(" mx."))
        .collect();
    let from_json: Vec<&str> = r
        .checks
        .iter()
        .filter(|c| c.name.starts_with("modular.") || c.name.starts_with("mx."))
        .map(|c| c.status.as_str())
        .collect();
    assert_eq!(lines.len(), from_json.len());
    for (l, s) in lines.iter().zip(from_json) {
        assert!(l.starts_with(s), "{l} vs {s}");
    }
}

#[test]
fn color_is_controlled_by_the_environment_only() {
    let path = manifest("constant.json");
    let plain = run(&["pinfty", "--manifest", path.to_str().unwrap()]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains('\x1b'));
    let colored = Command::new(env!("CARGO_BIN_EXE_superkoszul"))
        .args(["pinfty", "--manifest", path.to_str().unwrap()])
        .env(COLOR_ENV, "always")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&colored.stdout).contains("\x1b[32m"));
    let json = Command::new(env!("CARGO_BIN_EXE_superkoszul"))
        .args(["pinfty", "--manifest", path.to_str().unwrap(), "--report", "json"])
        .env(COLOR_ENV, "always")
        .output()
        .unwrap();
    assert!(!String::from_utf8_lossy(&json.stdout).contains('\x1b'));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let path = manifest("so3.json");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["nonsense", "--manifest", p]).status.code(), Some(2));
    assert_eq!(run(&["pinfty"]).status.code(), Some(2));
    assert_eq!(
        run(&["pinfty", "--manifest", p, "--report", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["pinfty", "--manifest", p, "--hbar-order", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["pinfty", "--manifest", "/nonexistent.json"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\n  \"base\": [\n    {\"name\": \"x1\" \"parity\": \"even\"}\n  ]\n}\n",
    )
    .unwrap();
    let out = run(&["pinfty", "--manifest", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column"), "{err}");

    let odd = dir.path().join("odd.json");
    std::fs::write(&odd, r#"{"base": [{"name": "x1", "parity": "even"}], "P": "x1_star"}"#).unwrap();
    let out = run(&["pinfty", "--manifest", odd.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("P must be even"));
}
