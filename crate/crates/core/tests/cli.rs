use std::path::Path;
use std::process::{Command, Output};

use subspace_limits::cli::{read_json, AnalysisReport, BatteryReport, SuiteReport, TRACE_HEADER};
use subspace_limits::convergence::Verdict;
use subspace_limits::linalg::{gap, RealVector, Subspace};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subspace-limits"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_orthogonal_constant_under_density() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["analyze", "orthogonal-constant", "--ideal", "density", "--out-dir", "o"],
        tmp.path(),
    );
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let report: AnalysisReport = read_json(&tmp.path().join("o/report.json")).unwrap();
    assert_eq!(report.overall, Verdict::DoesNotConverge);
    assert_eq!(report.criteria.len(), 5);
    assert!(report.criteria.iter().all(|(_, v)| *v == Verdict::DoesNotConverge));
    assert_eq!(report.rows.len(), 5 * report.eps_grid.len());

    let trace = std::fs::read_to_string(tmp.path().join("o/trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1000);
    let fields: Vec<f64> = rows[0].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields, vec![1.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
}

#[test]
fn report_round_trips_through_the_parser() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["analyze", "odd-escape", "--ideal", "density", "--horizon", "2000"],
        tmp.path(),
    );
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let path = tmp.path().join("report.json");
    let report: AnalysisReport = read_json(&path).unwrap();
    let again = tmp.path().join("again.json");
    subspace_limits::cli::write_json(&report, &again).unwrap();
    let back: AnalysisReport = read_json(&again).unwrap();
    assert_eq!(back.criteria, report.criteria);
    assert_eq!(back.overall, report.overall);
    assert_eq!(back, report);
}

#[test]
fn analyze_amended_odd_escape_under_blocks_converges() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "analyze",
            "odd-escape",
            "--variant",
            "amended",
            "--ideal",
            "blocks",
            "--horizon",
            "10000",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("overall:  converges"));
}

#[test]
fn analyze_constant_config_converges() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("c.json"),
        r#"{"sequence": {"type": "constant", "basis": [[1, 1, 0], [0, 1, 1]]},
            "ideal": {"kind": "density", "tau": 0.02}, "horizon": 300, "eps_grid": [0.3, 0.03],
            "output": {"dir": "runs", "report": "r.json", "trace": "t.csv"}}"#,
    )
    .unwrap();
    let out = run(&["analyze", "--config", "c.json"], tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: AnalysisReport = read_json(&tmp.path().join("runs/r.json")).unwrap();
    assert_eq!(report.horizon, 300);
    assert_eq!(report.eps_grid, vec![0.3, 0.03]);
    assert!(tmp.path().join("runs/t.csv").exists());
}

#[test]
fn analyze_tilt_config_with_explicit_limit() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("c.json"),
        r#"{"sequence": {"type": "tilt", "ambient_dim": 3, "dim": 1,
                         "angles": [{"type": "constant", "angle": 1.0}], "support": {"type": "odds"}},
            "limit": [[2, 0, 0]], "ideal": {"kind": "blocks"}}"#,
    )
    .unwrap();
    let out = run(&["analyze", "--config", "c.json"], tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["analyze", "--config", "c.json", "--ideal", "finite"], tmp.path());
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn malformed_configs_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"sequence": {"type": "builtin", "name": "odd-escape"}, "horizon": -4}"#,
            "horizon",
        ),
        (
            r#"{"sequence": {"type": "builtin", "name": "odd-escape"}, "horizon": 4}"#,
            "horizon",
        ),
        (
            r#"{"sequence": {"type": "builtin", "name": "odd-escape"}, "eps_grid": [0.1, 0.2]}"#,
            "eps_grid",
        ),
        (
            r#"{"sequence": {"type": "constant", "basis": [[1, 0]]}, "limit": [[1, 0], [2, 0]]}"#,
            "limit",
        ),
        (
            r#"{"sequence": {"type": "builtin", "name": "odd-escape"}, "output": {"folder": "x"}}"#,
            "output.folder",
        ),
    ];
    for (text, field) in cases {
        std::fs::write(tmp.path().join("bad.json"), text).unwrap();
        let out = run(&["analyze", "--config", "bad.json"], tmp.path());
        assert_eq!(code(&out), 3, "{text}");
        assert!(stderr(&out).contains(&format!("`{field}`")), "{text}: {}", stderr(&out));
    }
    let out = run(&["analyze", "--config", "missing.json"], tmp.path());
    assert_eq!(code(&out), 3);
    let out = run(&["analyze"], tmp.path());
    assert_eq!(code(&out), 3);
}

#[test]
fn gap_command() {
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| std::fs::write(tmp.path().join(name), text).unwrap();
    write("e1", "1 0\n");
    write("e2", "0 1\n");
    write("diag", "# (e1 + e2)/sqrt 2\n0.7071067811865476, 0.7071067811865476\n");
    write("plane", "1 0 0\n0 1 0\n");
    write("dependent", "1 0 0\n2 0 0\n");
    write("line3", "1 0 0\n");

    let out = run(&["gap", "e1", "e1"], tmp.path());
    assert_eq!((code(&out), stdout(&out).trim()), (0, "0"));
    let out = run(&["gap", "e1", "e2"], tmp.path());
    assert_eq!((code(&out), stdout(&out).trim()), (0, "1"));

    let out = run(&["gap", "e1", "diag"], tmp.path());
    assert_eq!(code(&out), 0);
    let printed: f64 = stdout(&out).trim().parse().unwrap();
    let closed = gap(
        &Subspace::coordinate(2, &[0]).unwrap(),
        &Subspace::from_orthonormal(vec![RealVector::new(vec![1.0, 1.0]).unwrap().normalized().unwrap()]).unwrap(),
    )
    .unwrap();
    assert!((printed - closed).abs() <= 1e-9);
    assert_eq!(stdout(&out).trim(), "0.707106781187");

    for (u, v) in [
        ("plane", "dependent"),
        ("e1", "line3"),
        ("e1", "plane"),
        ("e1", "nowhere"),
    ] {
        let out = run(&["gap", u, v], tmp.path());
        assert_eq!(code(&out), 3, "{u} vs {v}");
        assert!(stderr(&out).starts_with("error:"));
    }
}

#[test]
fn suite_orthogonal_constant_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["suite", "orthogonal-constant"], tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let suite: SuiteReport = read_json(&tmp.path().join("report.json")).unwrap();
    assert!(suite.agreement.matrix.iter().flatten().all(|&x| x));
    assert!(suite.agreement.verdicts.iter().all(|&v| v == Verdict::DoesNotConverge));
    assert!(suite.pair_volume.converse_fails);
}

#[test]
fn suite_amended_odd_escape_under_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["suite", "odd-escape", "--variant", "amended", "--ideal", "blocks"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let suite: SuiteReport = read_json(&tmp.path().join("report.json")).unwrap();
    assert!(suite.agreement.verdicts.iter().all(|&v| v == Verdict::Converges));
    assert!(suite.pair_volume.implication_holds);
}

#[test]
fn suite_battery_agrees_under_each_ideal() {
    let tmp = tempfile::tempdir().unwrap();
    for ideal in ["finite", "density", "blocks"] {
        let out = run(&["suite", "battery", "--ideal", ideal, "--out-dir", ideal], tmp.path());
        assert_eq!(code(&out), 0, "{ideal}: {}", stderr(&out));
        let report: BatteryReport = read_json(&tmp.path().join(ideal).join("report.json")).unwrap();
        assert_eq!(report.members.len(), 20);
        assert!(report
            .members
            .iter()
            .all(|m| m.agree && m.matches_expected && m.implication_holds));
        assert!(tmp.path().join(ideal).join("trace-odd-escape.csv").exists());
    }
}

#[test]
fn traces_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = run(
            &["suite", "odd-escape", "--horizon", "3000", "--out-dir", dir],
            tmp.path(),
        );
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(tmp.path().join("a/trace.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("b/trace.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn thread_cap_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let single = Command::new(env!("CARGO_BIN_EXE_subspace-limits"))
        .args(["analyze", "odd-escape", "--horizon", "5000", "--out-dir", "one"])
        .env("SUBSPACE_LIMITS_THREADS", "1")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&single), 0);
    let many = run(
        &["analyze", "odd-escape", "--horizon", "5000", "--out-dir", "many"],
        tmp.path(),
    );
    assert_eq!(code(&many), 0);
    for f in ["trace.csv", "report.json"] {
        assert_eq!(
            std::fs::read(tmp.path().join("one").join(f)).unwrap(),
            std::fs::read(tmp.path().join("many").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn example_and_usage() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["example", "odd-escape", "--variant", "printed", "--show", "4"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("odd-escape-printed"));
    assert_eq!(stdout(&out).matches("gap(U_").count(), 4);
    let out = run(&["example", "battery"], tmp.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 21);
    let out = run(&["analyze", "battery"], tmp.path());
    assert_eq!(code(&out), 3);
    let out = run(&["frobnicate"], tmp.path());
    assert_eq!(code(&out), 3);
    let out = run(&["--help"], tmp.path());
    assert_eq!(code(&out), 0);
}
