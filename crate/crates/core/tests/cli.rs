use std::path::Path;
use std::process::Command;

use serde_json::Value;
use suq2::cli::{Command as Sub, Pipelines, RunConfig};

fn run(args: &[&str], out: &Path) -> (i32, String) {
    let o =
        Command::new(env!("CARGO_BIN_EXE_suq2")).args(args).arg("--out-dir").arg(out).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn without_timing(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn index_example_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.json");
    let (code, stdout) = run(&["index", "--q", "0.5", "--n2max", "12"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("PASS -ind_tau(A) = 1"));
    let ra = without_timing(&path);
    assert_eq!(run(&["index", "--q", "1/2", "--n2max", "12"], dir.path()).0, 0);
    let rb = without_timing(&path);
    assert_eq!(ra, rb);
    assert_eq!(ra["config"]["q"], "1/2");
    assert_eq!(ra["status"], "PASS");
    assert_eq!(ra["schema_version"], 1);
}

#[test]
fn jlo_pair_oracle_record_on_tiny_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) =
        run(&["jlo-pair", "--q", "0.5", "--n2max", "2", "--terms", "1", "--u-margin", "2"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    let r = without_timing(&dir.path().join("jlo-pair.json"));
    let checks = r["checks"].as_array().unwrap();
    let oracle = checks.iter().find(|c| c["name"] == "oracle: engine S_N vs dense oracles").unwrap();
    assert_eq!(oracle["status"], "PASS");
    assert!(oracle["residual"].as_f64().unwrap() < 1e-8);
    let cocycle = checks.iter().find(|c| c["name"].as_str().unwrap().starts_with("(b+B)phi")).unwrap();
    assert_eq!(cocycle["status"], "INFO");
}

#[test]
fn failing_check_exits_1_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(&["rep-build", "--n2max", "2", "--tol", "1e-30", "--u-margin", "0"], dir.path());
    assert_eq!(code, 1);
    assert!(stdout.contains("status: FAIL (orthonormality"), "{stdout}");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["index", "--q", "0"], dir.path()).0, 2);
    assert_eq!(run(&["algebra-check", "--q", "5e-1"], dir.path()).0, 2);
    assert_eq!(run(&["jlo-pair", "--n2max", "20"], dir.path()).0, 2);
    assert_eq!(run(&["index", "--format", "xml"], dir.path()).0, 2);
    assert_eq!(run(&["algebra-check", "--mode", "float", "--q", "5e-1"], dir.path()).0, 0);
}

#[test]
fn config_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "q = 4/5\nn2max = 10\nformat = csv\n").unwrap();
    let (code, _) = run(&["index", "--config", cfg.to_str().unwrap(), "--n2max", "12"], dir.path());
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert!(csv.starts_with("command,name,status,value,residual,threshold,detail"));
    assert!(csv.lines().skip(1).all(|l| l.starts_with("index,")));
}

#[test]
fn all_is_the_union_of_the_subcommands() {
    let cfg = RunConfig { n2max: 2, terms: 1, u_margin: 2, ..RunConfig::default() };
    let all = Pipelines::new(cfg.clone()).run(Sub::All);
    let mut names = Vec::new();
    let mut single = Pipelines::new(cfg);
    for c in Sub::SINGLE {
        names.extend(single.run(c).checks.into_iter().map(|c| c.name));
    }
    let got: Vec<String> = all.checks.into_iter().map(|c| c.name).collect();
    assert_eq!(got, names);
    assert_eq!(all.command, "all");
}
