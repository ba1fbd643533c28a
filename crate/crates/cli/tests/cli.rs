use std::path::PathBuf;
use std::process::Command;

use kmslab_cli::{execute, CliError, Settings, Status};
use kmslab_core::ModelError;

fn settings(text: &str) -> Settings {
    Settings::parse(text).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kms-lab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kms-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gate_grid_matches_the_sign_conditions() {
    let out = execute("exists", &settings("betas = -1, 1\nthetas = -0.5, 0, 0.5")).unwrap();
    let r = &out.report;
    assert_eq!(r.records.len(), 6);
    assert!(!r.failed());
    for rec in &r.records {
        let exists = rec.detail.starts_with("exists");
        let positive = rec.name.contains("beta=1 ") && !rec.name.contains("theta=-0.5");
        assert_eq!(exists, positive, "{}", rec.name);
    }
}

#[test]
fn empty_grid_gives_empty_report() {
    let out = execute("exists", &settings("betas =\n")).unwrap();
    assert!(out.report.records.is_empty());
}

#[test]
fn zero_beta_rows_are_tracial() {
    let out = execute("exists", &settings("betas = 0\nthetas = 0.5")).unwrap();
    assert_eq!(out.report.records[0].detail, "tracial regime");
}

#[test]
fn same_config_same_report() {
    for (cmd, cfg) in [
        ("kms", "family = cond-exp\ntrials = 40\nseed = 9"),
        ("check", "target = real-line\nseed = 3"),
        ("ratio", "model = adding-machine\nsamples = 300\nseed = 4"),
    ] {
        let a = execute(cmd, &settings(cfg)).unwrap();
        let b = execute(cmd, &settings(cfg)).unwrap();
        assert_eq!(
            a.report.canonical_json(),
            b.report.canonical_json(),
            "{cmd}"
        );
        assert_eq!(a.csv, b.csv);
    }
}

#[test]
fn seed_changes_the_sampled_pairs() {
    let a = execute("kms", &settings("trials = 10\nseed = 1")).unwrap();
    let b = execute("kms", &settings("trials = 10\nseed = 2")).unwrap();
    assert_ne!(a.report.config_hash, b.report.config_hash);
    assert_ne!(a.report.canonical_json(), b.report.canonical_json());
}

#[test]
fn ratio_without_samples_is_an_error() {
    let err = execute("ratio", &settings("samples = 0")).err().unwrap();
    assert!(
        matches!(
            err,
            CliError::Model(ModelError::InsufficientRecurrences { .. })
        ),
        "{err}"
    );
}

#[test]
fn ratio_records_are_heuristic_with_csv() {
    let out = execute("ratio", &settings("model = real-line\nsamples = 200")).unwrap();
    assert!(out
        .report
        .records
        .iter()
        .all(|r| r.status == Status::Heuristic));
    assert!(out.csv.unwrap().starts_with("log_rn_value,count\n"));
}

#[test]
fn bad_parameters_surface_as_errors() {
    assert!(matches!(
        execute("check", &settings("target = orbit\nbeta = -1")),
        Err(CliError::Measure(_))
    ));
    assert!(matches!(
        execute("transport", &settings("p = 4\nq = 6")),
        Err(CliError::Lattice(_))
    ));
    assert!(matches!(
        execute("check", &settings("target = adding-machine\np = 3/4")),
        Err(CliError::Model(_))
    ));
    assert!(matches!(
        execute("kms", &settings("x = (0)*.(2)*")),
        Err(CliError::Parse(_))
    ));
    assert!(matches!(
        execute("kms", &settings("trials = many")),
        Err(CliError::Config(_))
    ));
}

#[test]
fn binary_writes_sorted_json_and_exit_code() {
    let out = scratch("exists.json");
    let status = bin()
        .args(["exists", "--betas", "1", "--thetas", "0,1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    // a window-limited injectivity record fails, so the run exits 1
    let status = bin()
        .args([
            "check",
            "adding-machine",
            "--p",
            "1/3",
            "--depth",
            "3",
            "--window",
            "2",
            "--set",
            "separation-depth=6",
            "--out",
        ])
        .arg(scratch("am.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    let status = bin()
        .args(["check", "orbit", "--beta", "-1"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("no conformal measure"));
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("run.conf");
    std::fs::write(&cfg, "# orbit run\nbeta = 5\ntheta = 0.7\nseed = 1\n").unwrap();
    let a = scratch("a.json");
    let b = scratch("b.json");
    assert!(bin()
        .args(["check", "orbit", "--beta", "1.3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&a)
        .status()
        .unwrap()
        .success());
    assert!(bin()
        .args(["check", "orbit", "--beta", "1.3", "--theta", "0.7", "--seed", "1", "--out"])
        .arg(&b)
        .status()
        .unwrap()
        .success());
    let strip = |p: &PathBuf| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        let o = v.as_object_mut().unwrap();
        o.remove("timing_ms");
        o["config"].as_object_mut().unwrap().remove("out");
        v
    };
    let (ja, jb) = (strip(&a), strip(&b));
    assert_eq!(ja["config"]["beta"], "1.3");
    assert_eq!(ja, jb);
}

#[test]
fn binary_runs_are_byte_identical_modulo_timing() {
    let run = |name: &str| {
        let p = scratch(name);
        assert!(bin()
            .args([
                "kms",
                "theta-zero",
                "--mu",
                "0.1:0.5,haar:0.5",
                "--trials",
                "30",
                "--seed",
                "5",
                "--out"
            ])
            .arg(&p)
            .status()
            .unwrap()
            .success());
        std::fs::read_to_string(&p)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("\"timing_ms\"") && !l.contains("\"out\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(run("r1.json"), run("r2.json"));
}

#[test]
fn ratio_csv_lands_next_to_report() {
    let out = scratch("ratio.json");
    assert!(bin()
        .args(["ratio", "adding-machine", "--samples", "200", "--out"])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert!(csv.starts_with("log_rn_value,count\n"));
    assert!(csv.lines().count() > 3);
}
