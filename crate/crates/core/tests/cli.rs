use std::path::Path;
use std::process::{Command, Output};

fn crossflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossflow"))
        .args(args)
        .env_remove("CROSSFLOW_OUTPUT_DIR")
        .output()
        .expect("spawn crossflow")
}

#[test]
fn run_prints_one_csv_row() {
    let out = crossflow(&["run", "--controller", "dt3p", "--demand", "375", "--seed", "4", "--header"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("controller,demand,seed,departure_arrival_pct"));
    assert!(lines[1].starts_with("DT3P,375,4,"));
    assert_eq!(lines[1].split(',').count(), 10);
}

#[test]
fn run_is_repeatable() {
    let args = ["run", "--controller", "bm2", "--demand", "750", "--seed", "11"];
    assert_eq!(crossflow(&args).stdout, crossflow(&args).stdout);
}

#[test]
fn unknown_controller_is_a_usage_error() {
    let out = crossflow(&["run", "--controller", "nm1", "--demand", "250"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown controller"));
}

#[test]
fn negative_demand_is_a_usage_error() {
    let out = crossflow(&["run", "--controller", "bm1", "--demand", "-5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_exits_one() {
    let out = crossflow(&["experiment", "--config", "/nonexistent/grid.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trace_file_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = crossflow(&[
        "run",
        "--controller",
        "bm1",
        "--demand",
        "250",
        "--duration",
        "60",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,lane,V_C,C_FVA,V_C%,L_W,responsible_rse"));
    assert!(lines.count() >= 60);
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("grid.json");
    let config = r#"{
        "controllers": [{"kind": "bm1"}, {"kind": "bm2"}, {"kind": "dt3p"}],
        "demand_levels": ["very-small", "medium"],
        "duration_s": 900,
        "seed_base": 5,
        "replications": {"fixed": 3}
    }"#;
    std::fs::write(&path, config).unwrap();
    path
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn experiment_reports_are_byte_identical_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = crossflow(&["experiment", "--config", config.to_str().unwrap(), "--output", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = crossflow(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--output",
        b.to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert!(out.status.success());

    let fa = read_dir_sorted(&a);
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"table_very-small.csv"));
    assert!(names.contains(&"table_medium.csv"));
    assert!(names.contains(&"ranking.csv"));
    assert!(names.contains(&"overall_scores.csv"));
    assert!(!names.contains(&"INCOMPLETE"));
    assert_eq!(fa, read_dir_sorted(&b));

    let table = String::from_utf8(fa.iter().find(|(n, _)| n == "table_medium.csv").unwrap().1.clone()).unwrap();
    assert!(table.starts_with("factor,BM1,BM2,DT3P\n"));
    assert_eq!(table.lines().count(), 8);
}

#[test]
fn output_dir_falls_back_to_env() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_crossflow"))
        .args(["experiment", "--config", config.to_str().unwrap()])
        .env("CROSSFLOW_OUTPUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("ranking.csv").exists());
}
