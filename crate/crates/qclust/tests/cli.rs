//! End-to-end checks of the `qc` binary: exit codes, file outputs, and
//! the generate-then-detect round trip.

use std::path::Path;
use std::process::{Command, Output};

fn qc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_then_detect_flags_the_planted_rows() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qc(
        &["gen", "--scenario", "A", "--seed", "1", "--out", "a.csv"],
        dir.path(),
    );
    assert_eq!(code(&gen), 0, "gen failed: {}", stderr(&gen));
    assert!(dir.path().join("a.csv").exists());

    let detect = qc(
        &["detect", "a.csv", "--k", "5", "--out", "report.json"],
        dir.path(),
    );
    assert_eq!(code(&detect), 0, "detect failed: {}", stderr(&detect));
    let text = stdout(&detect);
    assert!(text.contains("sigma"), "summary missing sigma: {text}");

    // Scenario A appends its five planted stragglers after 200 blob rows;
    // with k = 5 every one of them must be flagged.
    let report = qclust::io::read_report(dir.path().join("report.json")).unwrap();
    assert_eq!(report.n, 205);
    assert_eq!(report.k, 5);
    let flagged: Vec<usize> = report
        .points
        .iter()
        .filter(|p| p.outlier)
        .map(|p| p.index)
        .collect();
    for planted in 200..205 {
        assert!(flagged.contains(&planted), "planted row {planted} not flagged: {flagged:?}");
    }
}

#[test]
fn sigma_zero_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qc(
        &["gen", "--scenario", "A", "--seed", "0", "--out", "a.csv"],
        dir.path(),
    );
    assert_eq!(code(&gen), 0);

    let detect = qc(&["detect", "a.csv", "--sigma", "0"], dir.path());
    assert_eq!(code(&detect), 1, "stderr: {}", stderr(&detect));
    assert!(
        stderr(&detect).contains("sigma"),
        "error should name sigma: {}",
        stderr(&detect)
    );
}

#[test]
fn repeated_runs_write_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qc(
        &["gen", "--scenario", "C", "--seed", "4", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(code(&gen), 0);

    for name in ["r1.json", "r2.json"] {
        let run = qc(&["detect", "c.csv", "--out", name], dir.path());
        assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    }
    let r1 = std::fs::read(dir.path().join("r1.json")).unwrap();
    let r2 = std::fs::read(dir.path().join("r2.json")).unwrap();
    assert_eq!(r1, r2, "reports differ between identical runs");
}

#[test]
fn missing_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let detect = qc(&["detect", "no_such_file.csv"], dir.path());
    assert_eq!(code(&detect), 2);
    assert!(!stderr(&detect).is_empty());
}

#[test]
fn airquality_missing_file_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let run = qc(&["airquality", "no_such_file.csv"], dir.path());
    assert_eq!(code(&run), 2);
}

#[test]
fn grid_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qc(
        &["gen", "--scenario", "A", "--seed", "2", "--out", "a.csv"],
        dir.path(),
    );
    assert_eq!(code(&gen), 0);

    let grid = qc(
        &[
            "grid", "a.csv", "--sigma", "1.0", "--resolution", "2", "--out", "g.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&grid), 0, "stderr: {}", stderr(&grid));
    let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,v");
    assert_eq!(lines.len(), 5, "2x2 grid should emit 4 data rows:\n{text}");
}

#[test]
fn sigma_subcommand_prints_the_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qc(
        &["gen", "--scenario", "B", "--seed", "3", "--out", "b.csv"],
        dir.path(),
    );
    assert_eq!(code(&gen), 0);

    let sigma = qc(&["sigma", "b.csv", "--bins", "10"], dir.path());
    assert_eq!(code(&sigma), 0, "stderr: {}", stderr(&sigma));
    let text = stdout(&sigma);
    assert!(text.contains("sigma:"), "missing estimate line: {text}");
    assert!(text.contains("<- mode"), "missing mode marker: {text}");
}

#[test]
fn help_and_bad_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let help = qc(&["--help"], dir.path());
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("detect"));

    let unknown = qc(&["frobnicate"], dir.path());
    assert_eq!(code(&unknown), 1);
}
