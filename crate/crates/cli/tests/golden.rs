//! End-to-end runs of the `linstab` binary against the checked-in reports.
//!
//! Set `LINSTAB_BLESS=1` to rewrite the golden files after an intended change.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use linstab_cli::scenario::parse_scenario;
use serde_json::Value;

fn docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs")
}

fn linstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linstab")).args(args).env_remove("LINSTAB_REPORT_DIR").output().unwrap()
}

fn examples() -> Vec<(String, PathBuf)> {
    let mut out: Vec<_> = std::fs::read_dir(docs().join("examples"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), p))
        .collect();
    out.sort();
    out
}

#[test]
fn reports_match_goldens() {
    let bless = std::env::var_os("LINSTAB_BLESS").is_some();
    let cases = examples();
    assert!(cases.len() >= 6);
    for (name, path) in cases {
        let out = linstab(&["run", path.to_str().unwrap(), "--json"]);
        let golden = docs().join("golden").join(format!("{name}.json"));
        if bless {
            std::fs::write(&golden, &out.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read(&golden).unwrap_or_else(|_| panic!("missing golden for {name}"));
        assert!(out.stdout == expected, "{name}: report differs from {}", golden.display());
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(v["exit_code"].as_i64().unwrap() as i32), "{name}");
    }
}

#[test]
fn echoed_scenario_reruns_identically() {
    for (name, path) in examples() {
        let first = linstab(&["run", path.to_str().unwrap(), "--json"]);
        let v: Value = serde_json::from_slice(&first.stdout).unwrap();
        let echoed = v["scenario"].as_str().unwrap();
        let sc = parse_scenario(echoed).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(linstab_cli::scenario::echo(&sc), echoed, "{name}");
        let dir = tempdir(&format!("echo-{name}"));
        let file = dir.join("echo.scn");
        std::fs::write(&file, echoed).unwrap();
        let second = linstab(&["run", file.to_str().unwrap(), "--json"]);
        assert!(first.stdout == second.stdout, "{name}: rerun differs");
    }
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("linstab-test-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exit_codes() {
    let ex = docs().join("examples");
    let code = |args: &[&str]| linstab(args).status.code();
    assert_eq!(code(&["dsb", ex.join("dsb.scn").to_str().unwrap()]), Some(0));
    assert_eq!(code(&["linstab", ex.join("linstab.scn").to_str().unwrap()]), Some(3));
    // The subcommand must agree with the scenario's own command.
    assert_eq!(code(&["linstab", ex.join("dsb.scn").to_str().unwrap()]), Some(4));
    assert_eq!(code(&["dsb", "/nonexistent/none.scn"]), Some(5));
    assert_eq!(code(&["frobnicate"]), Some(4));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["paper-verify", "thm-9.9"]), Some(4));
    assert_eq!(code(&["paper-verify", "thm-4.3", "--g", "5"]), Some(4));

    let dir = tempdir("codes");
    let bad = dir.join("bad.scn");
    std::fs::write(&bad, "command = dsb\nfield = q\nbundle = 1, x\nsections = random(2)\n").unwrap();
    let out = linstab(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 13"));

    let sampled = dir.join("sampled.scn");
    std::fs::write(&sampled, "command = linstab\nfield = q\nbundle = 2\nsections = random(3)\nsamples = 5\n").unwrap();
    assert_eq!(code(&["run", sampled.to_str().unwrap()]), Some(2));

    let nongen = dir.join("nongen.scn");
    std::fs::write(&nongen, "command = dsb\nfield = q\nbundle = 2\nsections:\n  - s^2\n  - s*t\n").unwrap();
    assert_eq!(code(&["run", nongen.to_str().unwrap()]), Some(1));

    let huge = dir.join("huge.scn");
    std::fs::write(&huge, "command = linstab\nfield = gf(13)\nbundle = 3, 4\nsections = random(8)\n").unwrap();
    assert_eq!(code(&["run", huge.to_str().unwrap()]), Some(4));
}

#[test]
fn report_files_honor_report_dir() {
    let dir = tempdir("reports");
    let scn = docs().join("examples/dsb.scn");
    let out = Command::new(env!("CARGO_BIN_EXE_linstab"))
        .args(["dsb", scn.to_str().unwrap(), "--json", "--report", "nested/dsb.json"])
        .env("LINSTAB_REPORT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read(dir.join("nested/dsb.json")).unwrap();
    assert_eq!(json, out.stdout);
    let text = std::fs::read_to_string(dir.join("nested/dsb.txt")).unwrap();
    assert!(text.contains("outcome: ok (exit 0)"));
}

#[test]
fn timing_is_opt_in() {
    let scn = docs().join("examples/dsb.scn");
    let plain: Value = serde_json::from_slice(&linstab(&["run", scn.to_str().unwrap(), "--json"]).stdout).unwrap();
    assert!(plain["timing_ms"].is_null());
    let timed: Value =
        serde_json::from_slice(&linstab(&["run", scn.to_str().unwrap(), "--json", "--timing"]).stdout).unwrap();
    assert!(timed["timing_ms"].is_u64());
}

#[test]
fn audit_all_is_deterministic() {
    let a = linstab(&["audit-all", "--json"]);
    let b = linstab(&["audit-all", "--grid", "default", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert!(a.stdout == b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let summaries = v["result"]["summaries"].as_array().unwrap();
    assert!(summaries.iter().all(|s| s["check_failures"] == 0));
    assert_eq!(linstab(&["audit-all", "--grid", "tiny"]).status.code(), Some(4));
    let golden = docs().join("golden/audit-all.json");
    if std::env::var_os("LINSTAB_BLESS").is_some() {
        std::fs::write(&golden, &a.stdout).unwrap();
    } else {
        assert!(a.stdout == std::fs::read(&golden).unwrap(), "audit-all report differs from its golden");
    }
}
