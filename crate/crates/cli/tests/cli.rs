use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use inflation::{jacobi_dense_eigen, read_matrix_market, read_trace, DenseMatrix, SparseSymMatrix};

fn inflate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inflate"))
        .args(args)
        .env_remove("INFLATE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn laplacian_ground(n: usize) -> f64 {
    2.0 - 2.0 * (std::f64::consts::PI / (n + 1) as f64).cos()
}

fn reported_value(o: &Output) -> f64 {
    let text = stdout(o);
    let line = text.lines().find(|l| l.starts_with("pair 0")).unwrap();
    line.split_whitespace().nth(3).unwrap().parse().unwrap()
}

fn write_mtx(path: &Path, a: &SparseSymMatrix) {
    let mut buf = Vec::new();
    inflation::write_matrix_market(a, &mut buf).unwrap();
    fs::write(path, buf).unwrap();
}

/// Summary rows keyed by method: (value, m at 1e-4, 1e-8, 1e-12).
fn summary(dir: &Path) -> Vec<(String, String, Vec<String>)> {
    let text = fs::read_to_string(dir.join("summary.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,converged,value,matvecs,m_1e-4,m_1e-8,m_1e-12"
    );
    lines
        .map(|l| {
            let f: Vec<String> = l.split(',').map(String::from).collect();
            (f[0].clone(), f[2].clone(), f[3..].to_vec())
        })
        .collect()
}

#[test]
fn solve_laplacian() {
    let o = inflate(&["solve", "--gen", "laplacian1d:100", "--method", "inflation", "--tol-mu", "1e-16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!((reported_value(&o) - laplacian_ground(100)).abs() < 1e-8);
    assert!(stdout(&o).contains("status     converged"));
}

#[test]
fn solve_with_one_step_does_not_converge() {
    let o = inflate(&["solve", "--gen", "laplacian1d:100", "--max-steps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("NOT converged"));
}

#[test]
fn solve_missing_file_is_input_error() {
    let o = inflate(&["solve", "missing-file.mtx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing-file.mtx"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(inflate(&["solve"]).status.code(), Some(1));
    assert_eq!(
        inflate(&["solve", "x.mtx", "--gen", "laplacian1d:3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        inflate(&["solve", "--gen", "laplacian1d:10", "--method", "nope"]).status.code(),
        Some(1)
    );
    assert_eq!(inflate(&["gen", "laplacian1d:1"]).status.code(), Some(1));
    assert_eq!(inflate(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_writes_trace_and_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let vectors = dir.path().join("v.csv");
    let o = inflate(&[
        "solve",
        "--gen",
        "random_sparse:40:0.2:3",
        "--method",
        "multi",
        "-k",
        "2",
        "--trace",
        trace.to_str().unwrap(),
        "--vectors",
        vectors.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let t = read_trace(fs::read(&trace).unwrap().as_slice()).unwrap();
    let m: u64 = stdout(&o)
        .lines()
        .find(|l| l.starts_with("matvecs"))
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(t.last().unwrap().m, m);
    let v = fs::read_to_string(&vectors).unwrap();
    let mut lines = v.lines();
    assert_eq!(lines.next(), Some("v0,v1"));
    assert_eq!(lines.count(), 40);
}

#[test]
fn traces_are_deterministic_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: Option<&str>| {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_inflate"));
        cmd.args(["solve", "--gen", "random_sparse:60:0.1:1", "--trace"])
            .arg(&path)
            .env_remove("INFLATE_SEED");
        if let Some(s) = seed {
            cmd.env("INFLATE_SEED", s);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
        fs::read(path).unwrap()
    };
    let a = run("a.csv", None);
    let b = run("b.csv", None);
    let c = run("c.csv", Some("17"));
    let d = run("d.csv", Some("17"));
    assert_eq!(a, b);
    assert_eq!(c, d);
    assert_ne!(a, c);
}

#[test]
fn bench_needs_two_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = inflate(&["bench", "--gen", "laplacian1d:20", "-m", "inflation", "-o", out]);
    assert_eq!(o.status.code(), Some(1));
    let o = inflate(&["bench", "--gen", "laplacian1d:20", "-m", "inflation,inflation", "-o", out]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_inflation_beats_first_order() {
    let g = 1e-2;
    let n = 100;
    let mut d = vec![0.0, g];
    d.extend((1..n - 1).map(|k| g + (4.0 - g) * k as f64 / (n - 2) as f64));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.mtx");
    write_mtx(&path, &SparseSymMatrix::diagonal(&d).unwrap());
    let out = dir.path().join("out");
    let o = inflate(&[
        "bench",
        path.to_str().unwrap(),
        "-m",
        "inflation,first-order",
        "--gap",
        "0.01",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(out.join("inflation.csv").exists());
    assert!(out.join("first-order.csv").exists());
    let rows = summary(&out);
    let m8 = |name: &str| -> f64 {
        rows.iter().find(|r| r.0 == name).unwrap().2[2].parse().unwrap()
    };
    let ratio = m8("first-order") / m8("inflation");
    // square-root against linear scaling predicts about sqrt(4 / g) = 20
    assert!((5.0..=80.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn bench_inflation_and_lanczos_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = inflate(&[
        "bench",
        "--gen",
        "laplacian1d:200",
        "-m",
        "inflation,lanczos",
        "--tol-mu",
        "1e-18",
        "-o",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let exact = laplacian_ground(200);
    for (name, value, _) in summary(dir.path()) {
        let v: f64 = value.parse().unwrap();
        assert!((v - exact).abs() < 1e-8, "{name}: {v}");
    }
    let again = tempfile::tempdir().unwrap();
    inflate(&[
        "bench",
        "--gen",
        "laplacian1d:200",
        "-m",
        "inflation,lanczos",
        "--tol-mu",
        "1e-18",
        "-o",
        again.path().to_str().unwrap(),
    ]);
    for f in ["inflation.csv", "lanczos.csv", "summary.csv"] {
        assert_eq!(
            fs::read(dir.path().join(f)).unwrap(),
            fs::read(again.path().join(f)).unwrap()
        );
    }
}

#[test]
fn bench_records_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = inflate(&[
        "bench",
        "--gen",
        "laplacian1d:30",
        "-m",
        "inflation,windowed",
        "-k",
        "0",
        "-o",
        out,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let rows = summary(dir.path());
    assert_eq!(rows.len(), 2);
    assert!(fs::read_to_string(dir.path().join("summary.csv"))
        .unwrap()
        .contains("windowed,error"));
}

#[test]
fn gen_laplacian() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.mtx");
    let o = inflate(&["gen", "laplacian1d:5", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nnz 13"));
    let a = read_matrix_market(fs::read(&path).unwrap().as_slice()).unwrap();
    assert_eq!(a.dim(), 5);
    assert_eq!(a.nnz(), 13);
}

#[test]
fn gen_is_deterministic() {
    let a = inflate(&["gen", "random_sparse:50:0.1:7"]);
    let b = inflate(&["gen", "random_sparse:50:0.1:7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn gen_near_degenerate_gap() {
    let o = inflate(&["gen", "near_degenerate:10:1e-6:3"]);
    let a = read_matrix_market(o.stdout.as_slice()).unwrap();
    let pairs = jacobi_dense_eigen(&DenseMatrix::from_rows(&a.to_dense()).unwrap()).unwrap();
    let gap = pairs.values[1] - pairs.values[0];
    assert!((0.5e-6..=1.5e-6).contains(&gap), "gap {gap}");
}

fn diag_file(dir: &Path) -> String {
    let path = dir.join("d.mtx");
    write_mtx(&path, &SparseSymMatrix::diagonal(&[0.0, 1.0, 10.0]).unwrap());
    path.to_str().unwrap().to_string()
}

#[test]
fn scan_gap_picks_true_gap() {
    let dir = tempfile::tempdir().unwrap();
    let f = diag_file(dir.path());
    let o = inflate(&["scan-gap", &f, "-c", "0.5,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("best 1 "), "{}", stdout(&o));

    let o = inflate(&["scan-gap", &f, "-c", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("best 2 "));

    assert_eq!(inflate(&["scan-gap", &f, "-c", ""]).status.code(), Some(1));
    assert_eq!(inflate(&["scan-gap", &f]).status.code(), Some(1));
}

#[test]
fn scan_gap_reports_universal_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let f = diag_file(dir.path());
    let o = inflate(&["scan-gap", &f, "-c", "0.5,1", "--dt", "5", "--probe-steps", "200"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(String::from_utf8_lossy(&o.stderr).contains("smaller"));
}
