//! The `fbl` binary: exit codes and file output.

use std::process::{Command, Output};

fn fbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbl")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn single_outage_to_stdout() {
    let o = fbl(&["outage", "--scenario", "uo", "--lambda", "1e-4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("series,"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&fbl(&["outage", "--scenario", "dsa"])), 1);
    assert_eq!(code(&fbl(&["outage", "--lambda", "1e-3", "--method", "bogus"])), 1);
    assert_eq!(code(&fbl(&["sweep", "--lambda", "1e-3", "--n", "lin:100:200:0"])), 1);
    assert_eq!(code(&fbl(&["figure", "fig99"])), 1);
    assert_eq!(code(&fbl(&["figure", "fig4"])), 1);
    assert_eq!(code(&fbl(&["--no-such-flag"])), 1);
    assert_eq!(code(&fbl(&["--help"])), 0);
}

#[test]
fn all_rows_failing_exits_two() {
    let o = fbl(&["sweep", "--lambda", "1e-3,1e-2", "--method", "closed_uo"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("class="));
}

#[test]
fn validation_exit_codes() {
    let ok = fbl(&[
        "mc-validate",
        "--scenario",
        "dsa",
        "--lambda",
        "1e-2",
        "--samples",
        "20000",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("status: PASS"));
    let control = fbl(&[
        "mc-validate",
        "--scenario",
        "dsa",
        "--lambda",
        "1e-2",
        "--samples",
        "20000",
        "--seed",
        "5",
        "--generate-lambda-scale",
        "2",
    ]);
    assert_eq!(code(&control), 3);
    assert!(String::from_utf8_lossy(&control.stdout).contains("status: FAIL"));
}

#[test]
fn unwritable_output_exits_four() {
    let o = fbl(&["outage", "--lambda", "1e-3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn figure_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig10.csv");
    let o = fbl(&["figure", "fig10", "--out", csv.to_str().unwrap(), "--format", "both"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 30);
    let svg = std::fs::read_to_string(csv.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("uo_m2"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        "name = \"s\"\n[[series]]\nlabel = \"a\"\nscenario = \"dsa\"\n[[axes]]\nparam = \"lambda\"\ngrid = { list = [1e-4, 1e-3] }\n",
    )
    .unwrap();
    let o = fbl(&["sweep", "--config", cfg.to_str().unwrap(), "--n", "300,400,500"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 6);
}

#[test]
fn delay_report() {
    let o = fbl(&["delay", "--eps", "0.1", "--m", "2", "--budget-ms", "5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("worst_case: channel_uses=400"), "{text}");
    assert!(text.contains("budget: max_attempts=3"), "{text}");
}
