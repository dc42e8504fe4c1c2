use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use parity_decode::experiments::BenchmarkReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parity-decode"))
        .args(args)
        .env_remove("PARITY_DECODE_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_matrix(dir: &Path, name: &str, rows: &[&[i8]]) -> String {
    let text: String = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect();
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

#[test]
fn code_info_reports_sizes() {
    let out = run(&["code-info", "--k", "5", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n_v"], 10);
    assert_eq!(v["checks4"], 6);
    assert_eq!(v["checks3"], 10);
    assert_eq!(v["d_v"], 3);

    let out = run(&["code-info", "--k", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["checks4"], 0);
    assert_eq!(v["checks3"], 0);
}

#[test]
fn code_info_k4_matrices() {
    let out = run(&["code-info", "--k", "4", "--json", "--matrices"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Pairs in order 12,13,14,23,24,34; columns of G mark the two logical spins.
    let g = serde_json::json!([
        [1, 1, 1, 0, 0, 0],
        [1, 0, 0, 1, 1, 0],
        [0, 1, 0, 1, 0, 1],
        [0, 0, 1, 0, 1, 1]
    ]);
    assert_eq!(v["generator"], g);
    let h4 = serde_json::json!([[1, 1, 0, 1, 0, 0], [0, 1, 1, 1, 1, 0], [0, 0, 0, 1, 1, 1]]);
    assert_eq!(v["parity_check4"], h4);
    let h3 = serde_json::json!([
        [1, 1, 0, 1, 0, 0],
        [1, 0, 1, 0, 1, 0],
        [0, 1, 1, 0, 0, 1],
        [0, 0, 0, 1, 1, 1]
    ]);
    assert_eq!(v["parity_check3"], h3);
}

#[test]
fn bad_k_is_a_usage_error() {
    assert_eq!(code(&run(&["code-info", "--k", "1"])), 2);
    assert_eq!(code(&run(&["code-info", "--k", "nope"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["code-info", "--k", "3", "--help"])), 0);
}

#[test]
fn decode_codeword_single_error_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    let ones = write_matrix(
        dir.path(),
        "ones.csv",
        &[&[1; 4], &[1; 4], &[1; 4], &[1; 4]],
    );
    let out = run(&["decode", "--input", &ones, "--target", &ones]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    assert!(body.lines().nth(1).unwrap().contains(",0,true,"), "{body}");

    let single = write_matrix(
        dir.path(),
        "single.csv",
        &[&[1, 1, 1, 1], &[1, 1, -1, 1], &[1, -1, 1, 1], &[1, 1, 1, 1]],
    );
    let out = run(&["decode", "--input", &single, "--target", &ones]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().nth(1).unwrap().contains(",1,true,"));

    // A codeword other than the target is decoded to itself, which misses the target.
    let other = write_matrix(
        dir.path(),
        "other.csv",
        &[
            &[1, -1, 1, 1],
            &[-1, 1, -1, -1],
            &[1, -1, 1, 1],
            &[1, -1, 1, 1],
        ],
    );
    let out = run(&["decode", "--input", &other, "--target", &ones]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("false"));

    for decoder in ["bp", "mwd", "mcmc"] {
        let out = run(&[
            "decode",
            "--input",
            &single,
            "--target",
            &ones,
            "--decoder",
            decoder,
            "--budget",
            "500",
        ]);
        assert_eq!(code(&out), 0, "{decoder}");
    }
}

#[test]
fn malformed_matrices_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let asym = write_matrix(
        dir.path(),
        "asym.csv",
        &[&[1, -1, 1], &[1, 1, 1], &[1, 1, 1]],
    );
    let out = run(&["decode", "--input", &asym]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "{err}");

    let bad = write_matrix(dir.path(), "bad.csv", &[&[1, 1], &[1, 3]]);
    assert_eq!(code(&run(&["decode", "--input", &bad])), 2);
    assert_eq!(
        code(&run(&["decode", "--input", "/nonexistent/matrix.csv"])),
        2
    );
}

#[test]
fn bench_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = run(&[
            "bench",
            "--k",
            "6,10",
            "--epsilon",
            "0.1,0.2",
            "--trials",
            "300",
            "--seed",
            "17",
            "--out",
            d.to_str().unwrap(),
            "--threads",
            "2",
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv_a = files_with_ext(&a, "csv");
    let csv_b = files_with_ext(&b, "csv");
    assert_eq!(csv_a.len(), 1);
    assert_eq!(csv_a[0].file_name(), csv_b[0].file_name());
    assert!(csv_a[0]
        .file_name()
        .unwrap()
        .to_str()
        .unwrap()
        .contains("seed17"));
    let text = fs::read(&csv_a[0]).unwrap();
    assert_eq!(text, fs::read(&csv_b[0]).unwrap());

    let json = fs::read_to_string(&files_with_ext(&a, "json")[0]).unwrap();
    let report = BenchmarkReport::from_json(&json).unwrap();
    assert_eq!(report.rows.len(), 4);
    assert_eq!(
        BenchmarkReport::read_csv_rows(text.as_slice()).unwrap(),
        report.rows
    );
    assert_eq!(report.to_json().unwrap(), json);
    assert_eq!(report.config["run"]["command"]["bench"]["trials"], 300);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_parity-decode"))
        .args([
            "bench",
            "--k",
            "5",
            "--epsilon",
            "0.1",
            "--trials",
            "10",
            "--out",
        ])
        .arg(dir.path())
        .env("PARITY_DECODE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let name = files_with_ext(dir.path(), "csv")[0]
        .file_name()
        .unwrap()
        .to_str()
        .unwrap()
        .to_string();
    assert!(name.ends_with("seed99.csv"), "{name}");
}

#[test]
fn zero_trials_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "bench",
        "--k",
        "6",
        "--epsilon",
        "0.1",
        "--trials",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(&files_with_ext(dir.path(), "csv")[0]).unwrap();
    assert!(csv.starts_with("decoder,k,epsilon"));
}

#[test]
fn bench_failure_falls_with_k() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "bench",
        "--k",
        "4,6,8,10,12",
        "--epsilon",
        "0.1",
        "--trials",
        "500",
        "--seed",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    assert!(files_with_ext(dir.path(), "csv").is_empty());
    let report = BenchmarkReport::from_json(
        &fs::read_to_string(&files_with_ext(dir.path(), "json")[0]).unwrap(),
    )
    .unwrap();
    let p: Vec<f64> = report.rows.iter().map(|r| r.failure_probability).collect();
    assert!(p.first().unwrap() > p.last().unwrap(), "{p:?}");
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("file");
    fs::write(&file, "x").unwrap();
    let out = run(&[
        "bench",
        "--k",
        "5",
        "--epsilon",
        "0.1",
        "--trials",
        "5",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn landscape_and_trajectory_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "landscape",
        "--k",
        "6",
        "--instances",
        "2",
        "--beta",
        "0,1",
        "--gamma",
        "0.5",
        "--trials",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(files_with_ext(dir.path(), "csv").len(), 2);

    let out = run(&["trajectory", "--k", "10", "--epsilon", "0.1", "--seed", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("# iteration=0"));
    let out = run(&[
        "trajectory",
        "--k",
        "8",
        "--instance-seed",
        "3",
        "--decoder",
        "bp",
    ]);
    assert_eq!(code(&out), 0);
}
