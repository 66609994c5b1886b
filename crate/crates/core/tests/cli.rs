//! End-to-end runs of the command-line tool.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn aivat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aivat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

fn simulate_kuhn(dir: &Path, workers: &str) -> String {
    let out = aivat(&[
        "simulate",
        "--game",
        "kuhn",
        "--x",
        "uniform",
        "--y",
        "callraise",
        "--games",
        "2000",
        "--seed",
        "9",
        "--workers",
        workers,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    read(&dir.join("episodes.txt"))
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&aivat(&[])), 1);
    assert_eq!(
        code(&aivat(&[
            "simulate", "--game", "holdem", "--x", "uniform", "--y", "uniform"
        ])),
        1
    );
    assert_eq!(code(&aivat(&["estimate", "--log", "/nonexistent/episodes.txt"])), 1);
    assert_eq!(code(&aivat(&["--help"])), 0);
}

#[test]
fn solve_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let out = aivat(&[
            "solve",
            "--game",
            "kuhn",
            "--iterations",
            "3000",
            "--seed",
            "4",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        assert!(String::from_utf8_lossy(&out.stdout).contains("exploitability"));
    }
    for file in ["strategy.txt", "values.txt", "values_exact.txt"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn simulation_ignores_worker_count() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let one = simulate_kuhn(a.path(), "1");
    let many = simulate_kuhn(b.path(), "4");
    assert_eq!(one, many);
    assert!(one.starts_with("# aivat-episodes v1\n"));
    assert_eq!(one.lines().filter(|l| !l.starts_with('#')).count(), 2000);
}

#[test]
fn estimate_replays_identically_and_report_matches() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    simulate_kuhn(dir.path(), "0");
    let run = |workers: &str| {
        let out = aivat(&[
            "estimate",
            "--out",
            d,
            "--workers",
            workers,
            "--decompose",
            "--dump-partitions",
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        (
            read(&dir.path().join("samples.txt")),
            read(&dir.path().join("report.csv")),
        )
    };
    let first = run("1");
    let second = run("3");
    assert_eq!(first, second);
    let csv = &first.1;
    assert!(csv.starts_with("estimator,n,mean,sd,stderr,ci_lo,ci_hi,sd_ratio,data_factor\n"));
    for label in ["chips,", "mivat,", "mivat_io:cx,", "aivat:cx,"] {
        assert!(csv.lines().any(|l| l.starts_with(label)), "{label} missing");
    }
    assert!(dir.path().join("decomposition.txt").exists());
    assert!(dir.path().join("partitions_cx.txt").exists());

    let again = TempDir::new().unwrap();
    let out = aivat(&[
        "report",
        "--samples",
        dir.path().join("samples.txt").to_str().unwrap(),
        "--out",
        again.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(read(&again.path().join("report.csv")), *csv);
}

#[test]
fn corrupted_log_exits_two() {
    let dir = TempDir::new().unwrap();
    let text = simulate_kuhn(dir.path(), "0");
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    let line = lines[i].clone();
    let (lhs, rhs) = line.split_once(" = ").unwrap();
    let outcome: f64 = rhs.parse().unwrap();
    lines[i] = format!("{lhs} = {}", outcome + 1.0);
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let out = aivat(&[
        "estimate",
        "--log",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));

    lines[i] = format!("{lhs} zz = {outcome}");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let out = aivat(&[
        "estimate",
        "--log",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_passes_and_detects_bias() {
    let ok = aivat(&["oracle", "--game", "kuhn", "--trials", "3"]);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));
    let biased = aivat(&["oracle", "--game", "kuhn", "--trials", "3", "--inject-bias", "0.01"]);
    assert_eq!(code(&biased), 3);
}

#[test]
fn values_file_feeds_estimation() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        code(&aivat(&[
            "solve",
            "--game",
            "kuhn",
            "--iterations",
            "20000",
            "--seed",
            "1",
            "--out",
            d
        ])),
        0
    );
    let strategy = dir.path().join("strategy.txt");
    let s = strategy.to_str().unwrap();
    let sim = aivat(&[
        "simulate", "--game", "kuhn", "--x", s, "--y", s, "--games", "3000", "--seed", "2", "--out", d,
    ]);
    assert_eq!(code(&sim), 0);
    for values in ["values.txt", "values_exact.txt"] {
        let path = dir.path().join(values);
        let out = aivat(&[
            "estimate",
            "--out",
            d,
            "--values",
            path.to_str().unwrap(),
            "--estimators",
            "chips,aivat:cx",
        ]);
        assert_eq!(code(&out), 0, "{values}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let wrong = aivat(&[
        "estimate",
        "--out",
        d,
        "--values",
        dir.path().join("values.txt").to_str().unwrap(),
        "--estimators",
        "aivat:cxy",
    ]);
    assert_eq!(code(&wrong), 1);
}
