//! Black-box CLI tests: exit codes, schema rejection, artifact round
//! trips, and the wording of negative-control reports.

use std::path::Path;
use std::process::Output;

use cfh3::cf::{Schedule, ScheduleKind, StepAnnotation};
use cfh3::folner::BoxParams;
use cfh3::rat::rat_int;
use cfh3::GroupElement;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_cfh3"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("CLI spawns")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn build_then_validate_round_trips_cleanly() {
    let dir = tempfile::tempdir().expect("tempdir");
    let build = run_in(
        dir.path(),
        &["build", "--kind", "asymmetric", "--levels", "4", "--out", "art"],
    );
    assert_eq!(build.status.code(), Some(0), "{}", stderr_of(&build));
    assert!(stdout_of(&build).contains("built asymmetric schedule"));
    assert!(dir.path().join("art/schedule.json").exists());
    assert!(dir.path().join("art/build_report.csv").exists());

    let validate = run_in(
        dir.path(),
        &["validate", "--schedule", "art/schedule.json", "--out", "art"],
    );
    assert_eq!(validate.status.code(), Some(0), "{}", stderr_of(&validate));
    let text = stdout_of(&validate);
    assert!(text.contains("checks ok"), "got: {text}");
}

#[test]
fn unknown_config_keys_are_rejected_at_both_levels() {
    let dir = tempfile::tempdir().expect("tempdir");

    // Top-level stranger.
    std::fs::write(
        dir.path().join("top.json"),
        br#"{"kind": "mixing", "extra": {}}"#,
    )
    .expect("write");
    let top = run_in(dir.path(), &["build", "--config", "top.json"]);
    assert_eq!(top.status.code(), Some(2));
    assert!(stderr_of(&top).contains("extra"), "got: {}", stderr_of(&top));

    // Stranger nested inside a section, via TOML.
    std::fs::write(
        dir.path().join("nested.toml"),
        b"kind = \"asymmetric\"\n[asymmetric]\nlevels = 4\nbogus = 1\n",
    )
    .expect("write");
    let nested = run_in(dir.path(), &["build", "--config", "nested.toml"]);
    assert_eq!(nested.status.code(), Some(2));
    assert!(
        stderr_of(&nested).contains("bogus"),
        "got: {}",
        stderr_of(&nested)
    );
}

#[test]
fn build_without_a_kind_is_a_config_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = run_in(dir.path(), &["build"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--kind"), "got: {}", stderr_of(&out));
}

#[test]
fn validate_names_the_failing_condition() {
    // A hand-built two-level schedule whose central translates overlap:
    // shifting the unit box by c(1) only clears half its height.
    let f = vec![BoxParams::from_ints(1, 1, 1), BoxParams::from_ints(1, 1, 7)];
    let c = vec![vec![
        GroupElement::c(rat_int(0)),
        GroupElement::c(rat_int(1)),
    ]];
    let bad = Schedule::from_parts(ScheduleKind::Infinite, f, c, vec![StepAnnotation::Plain])
        .expect("shape is fine");

    let dir = tempfile::tempdir().expect("tempdir");
    std::fs::write(dir.path().join("bad.json"), bad.to_json()).expect("write");
    let out = run_in(
        dir.path(),
        &["validate", "--schedule", "bad.json", "--out", "art"],
    );
    assert_eq!(out.status.code(), Some(7));
    let text = stdout_of(&out);
    assert!(text.contains("translates overlap"), "got: {text}");
    assert!(text.contains("worst pair volume 4"), "got: {text}");
}

#[test]
fn tampered_schedule_artifacts_fail_the_hash_check() {
    let dir = tempfile::tempdir().expect("tempdir");
    let build = run_in(
        dir.path(),
        &["build", "--kind", "infinite", "--levels", "3", "--out", "art"],
    );
    assert_eq!(build.status.code(), Some(0), "{}", stderr_of(&build));

    let path = dir.path().join("art/schedule.json");
    let text = std::fs::read_to_string(&path).expect("read");
    let needle = "\"hash\": \"";
    let at = text.find(needle).expect("hash field present") + needle.len();
    let original = text.as_bytes()[at] as char;
    let swapped = if original == '0' { '1' } else { '0' };
    let mut tampered = text.clone();
    tampered.replace_range(at..at + 1, &swapped.to_string());
    std::fs::write(&path, tampered).expect("write");

    let out = run_in(
        dir.path(),
        &["validate", "--schedule", "art/schedule.json", "--out", "art"],
    );
    assert_eq!(out.status.code(), Some(7));
    assert!(
        stderr_of(&out).contains("hash mismatch"),
        "got: {}",
        stderr_of(&out)
    );

    // Structural damage (not valid JSON any more) is a format error
    // instead.
    std::fs::write(&path, &text.as_bytes()[..text.len() / 2]).expect("write");
    let out = run_in(
        dir.path(),
        &["validate", "--schedule", "art/schedule.json", "--out", "art"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tiling_reports_overlap_for_too_tight_spacing() {
    let dir = tempfile::tempdir().expect("tempdir");
    std::fs::write(
        dir.path().join("tight.json"),
        br#"{"spacing": "1/2"}"#,
    )
    .expect("write");
    let out = run_in(
        dir.path(),
        &["tiling", "--config", "tight.json", "--out", "art"],
    );
    assert_eq!(out.status.code(), Some(7));
    let text = stdout_of(&out);
    assert!(text.contains("overlap"), "got: {text}");

    // The default unit spacing tiles exactly.
    let ok = run_in(dir.path(), &["tiling", "--out", "art"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr_of(&ok));
}

#[test]
fn zero_centre_frequency_is_a_config_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    std::fs::write(dir.path().join("flat.json"), br#"{"gamma": 0.0}"#).expect("write");
    let out = run_in(
        dir.path(),
        &["spectral", "--config", "flat.json", "--out", "art"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn correlate_rejects_out_of_range_levels() {
    let dir = tempfile::tempdir().expect("tempdir");
    let build = run_in(
        dir.path(),
        &["build", "--kind", "asymmetric", "--levels", "3", "--out", "art"],
    );
    assert_eq!(build.status.code(), Some(0), "{}", stderr_of(&build));
    std::fs::write(
        dir.path().join("deep.json"),
        br#"{"schedule": {"path": "art/schedule.json"}, "level": 11}"#,
    )
    .expect("write");
    let out = run_in(
        dir.path(),
        &["correlate", "--config", "deep.json", "--out", "art"],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
}

#[test]
fn csv_and_json_formats_carry_the_same_rows() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv = run_in(dir.path(), &["folner", "--out", "csv_art"]);
    assert_eq!(csv.status.code(), Some(0), "{}", stderr_of(&csv));
    let json = run_in(
        dir.path(),
        &["folner", "--format", "json", "--out", "json_art"],
    );
    assert_eq!(json.status.code(), Some(0), "{}", stderr_of(&json));

    let csv_text =
        std::fs::read_to_string(dir.path().join("csv_art/folner.csv")).expect("csv artifact");
    let json_text =
        std::fs::read_to_string(dir.path().join("json_art/folner.json")).expect("json artifact");
    let doc: serde_json::Value = serde_json::from_str(&json_text).expect("valid json");
    let rows = doc["rows"].as_array().expect("rows array");
    // Header line plus one CSV line per JSON row.
    assert_eq!(csv_text.lines().count(), rows.len() + 1);
    // Spot-check one exact rational against the CSV text.
    assert!(csv_text.contains("4001/4000"));
    assert!(rows
        .iter()
        .any(|r| r["ratio"].as_str() == Some("4001/4000")));
}
