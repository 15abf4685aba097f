use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bichromatic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn small_fig5(dir: &Path, name: &str, jobs: &str) -> String {
    let out = dir.join(name);
    let status = run(&[
        "--jobs",
        jobs,
        "fig5",
        "--out",
        out.to_str().unwrap(),
        "--set",
        "sweep_count=41",
        "--set",
        "series_values=0.25,1.75",
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn identical_csv_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_fig5(dir.path(), "a.csv", "1");
    let b = small_fig5(dir.path(), "b.csv", "1");
    let c = small_fig5(dir.path(), "c.csv", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let header = a.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "j1,nu_l,delta,value,background,deviation,peak_offset");
    assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 41);
}

#[test]
fn config_errors_exit_2() {
    let out = run(&["fig1", "--set", "no_such_key=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));

    let out = run(&["fig1", "--set", "kappa=-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));

    let out = run(&["run", "--config", "/nonexistent/file.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_errors_exit_3() {
    // the pump cannot be locked to a polariton that does not exist
    let out = run(&["fig1", "--set", "g=0.1", "--set", "gamma=5", "--set", "sweep_count=3"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_accepts_printed_config() {
    let dir = tempfile::tempdir().unwrap();
    let printed = run(&["config", "custom"]);
    assert!(printed.status.success());
    let text = String::from_utf8(printed.stdout).unwrap().replace("sweep_count = 401", "sweep_count = 5");
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, text).unwrap();
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn spectrum_dump() {
    let out = run(&["spectrum", "--from", "-40", "--to", "40", "--count", "161", "--set", "j1=0.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "nu_offset,nu_from_pump,s");
    assert_eq!(rows.len(), 162);
    assert!(csv.contains("# extrema: peak"));
}
