mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::str::FromStr;

use common::{corpus, exact_rank, kalman_rank_oracle, random_int_matrix};
use minctrl::matcore::{format_rational, Matrix, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", self.stdout))
    }

    /// Report with the timing subobject removed.
    fn stable(&self) -> Value {
        let mut v = self.json();
        v.as_object_mut().unwrap().remove("timings");
        v
    }
}

fn minctrl(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_minctrl"));
    cmd.args(args);
    for key in ["MINCTRL_TOL_EIGEN", "MINCTRL_TOL_RANK", "MINCTRL_TOL_REAL"] {
        cmd.env_remove(key);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json_file(dir: &Path, name: &str, m: &Matrix<Rational>) -> PathBuf {
    let data: Vec<Value> = m.data().iter().map(|x| Value::String(format_rational(x))).collect();
    let path = dir.join(name);
    let doc = json!({ "rows": m.rows(), "cols": m.cols(), "data": data });
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

fn text_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn ints(rows: usize, cols: usize, v: &[i64]) -> Matrix<Rational> {
    Matrix::from_i64(rows, cols, v)
}

fn read_matrix(v: &Value) -> Matrix<Rational> {
    let rows = v["rows"].as_u64().unwrap() as usize;
    let cols = v["cols"].as_u64().unwrap() as usize;
    let data = v["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| match x {
            Value::String(s) => Rational::from_str(s).unwrap(),
            other => panic!("expected an exact entry, got {other}"),
        })
        .collect();
    Matrix::new(rows, cols, data).unwrap()
}

fn read_matrix_file(path: &Path) -> Matrix<Rational> {
    read_matrix(&serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_diagonal_needs_one_input() {
    let dir = TempDir::new().unwrap();
    let a = text_file(dir.path(), "a.txt", "1 0 0\n0 2 0\n0 0 3\n");
    let run = minctrl(&["analyze", s(&a)], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let r = run.json();
    assert_eq!(r["p_max"], 1);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["groups"].as_array().unwrap().len(), 3);
    assert_eq!(r["min_gap"], 1.0);
}

#[test]
fn analyze_identity_needs_four_inputs() {
    let dir = TempDir::new().unwrap();
    let a = json_file(dir.path(), "a.json", &Matrix::identity(4));
    let r = minctrl(&["analyze", s(&a)], &[]).json();
    assert_eq!(r["p_max"], 4);
    assert_eq!(r["groups"][0]["block_sizes"], json!([1, 1, 1, 1]));
}

#[test]
fn non_square_input_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let a = text_file(dir.path(), "a.txt", "1 2\n3 4\n5 6\n");
    let run = minctrl(&["analyze", s(&a)], &[]);
    assert_eq!(run.code, 2);
    assert!(run.stdout.is_empty());
    assert!(run.stderr.starts_with("error:"), "{}", run.stderr);
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = TempDir::new().unwrap();
    let a = text_file(dir.path(), "a.txt", "1 0\n0 x\n");
    let run = minctrl(&["analyze", s(&a)], &[]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("line 2"), "{}", run.stderr);
    assert!(run.stderr.contains("column"), "{}", run.stderr);
}

#[test]
fn missing_file_is_an_input_error() {
    assert_eq!(minctrl(&["analyze", "/nonexistent/a.json"], &[]).code, 2);
}

#[test]
fn plain_text_and_json_give_identical_reports() {
    let dir = TempDir::new().unwrap();
    let text = text_file(dir.path(), "a.txt", "2 1 0\n0 2 0\n0 0 -1/2\n");
    let mut m = ints(3, 3, &[2, 1, 0, 0, 2, 0, 0, 0, 0]);
    m[(2, 2)] = Rational::new((-1).into(), 2.into());
    let js = json_file(dir.path(), "a.json", &m);
    for args in [vec!["analyze", "--synth"], vec!["synth"], vec!["synth", "--kind", "output"]] {
        let mut a = args.clone();
        a.push(s(&text));
        let mut b = args.clone();
        b.push(s(&js));
        assert_eq!(minctrl(&a, &[]).stable(), minctrl(&b, &[]).stable(), "{args:?}");
    }
}

#[test]
fn reports_are_byte_stable_apart_from_timings() {
    let dir = TempDir::new().unwrap();
    let a = text_file(dir.path(), "a.txt", "0 -1 0\n1 0 0\n0 0 3\n");
    for args in [
        vec!["analyze", "--synth", s(&a)],
        vec!["synth", "--alpha-seed", "11", s(&a)],
        vec!["analyze", "--backend", "float", s(&a)],
    ] {
        let first = minctrl(&args, &[]);
        let second = minctrl(&args, &[]);
        let strip = |r: &Run| r.stdout[..r.stdout.find("\"timings\"").unwrap()].to_string();
        assert_eq!(strip(&first), strip(&second), "{args:?}");
    }
}

#[test]
fn synth_on_nilpotent_block() {
    let dir = TempDir::new().unwrap();
    let a_m = ints(2, 2, &[0, 1, 0, 0]);
    let a = json_file(dir.path(), "a.json", &a_m);
    let out = dir.path().join("b.json");
    let run = minctrl(&["synth", s(&a), "--out", s(&out)], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let r = run.json();
    assert_eq!(r["verification"]["verdict"], "controllable");
    let b = read_matrix_file(&out);
    assert_eq!(b.shape(), (2, 1));
    assert_eq!(kalman_rank_oracle(&a_m, &b), 2);
    assert_eq!(read_matrix(&r["matrix"]), b);
}

#[test]
fn synth_on_rotation_is_real() {
    let dir = TempDir::new().unwrap();
    let a_m = ints(2, 2, &[0, -1, 1, 0]);
    let a = json_file(dir.path(), "a.json", &a_m);
    let r = minctrl(&["synth", s(&a)], &[]).json();
    assert_eq!(r["imag_residue"], 0.0);
    let b = read_matrix(&r["matrix"]);
    assert_eq!(b.shape(), (2, 1));
    assert_eq!(kalman_rank_oracle(&a_m, &b), 2);
}

#[test]
fn synth_output_on_distinct_diagonal() {
    let dir = TempDir::new().unwrap();
    let a_m = ints(2, 2, &[1, 0, 0, 2]);
    let a = json_file(dir.path(), "a.json", &a_m);
    let run = minctrl(&["synth", "--kind", "output", s(&a)], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let r = run.json();
    assert_eq!(r["verification"]["verdict"], "observable");
    let c = read_matrix(&r["matrix"]);
    assert_eq!(c.shape(), (1, 2));
    assert_eq!(kalman_rank_oracle(&a_m.transpose(), &c.transpose()), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let i2 = json_file(dir.path(), "i2.json", &Matrix::identity(2));
    let ones = json_file(dir.path(), "ones.json", &ints(2, 1, &[1, 1]));
    let run = minctrl(&["verify", s(&i2), s(&ones)], &[]);
    assert_eq!(run.code, 1);
    let r = run.json();
    assert_eq!(r["report"]["verdict"], "uncontrollable");
    assert!(!r["report"]["witnesses"].as_array().unwrap().is_empty());

    let j2 = json_file(dir.path(), "j2.json", &ints(2, 2, &[0, 1, 0, 0]));
    let e2 = json_file(dir.path(), "e2.json", &ints(2, 1, &[0, 1]));
    assert_eq!(minctrl(&["verify", s(&j2), s(&e2)], &[]).code, 0);

    let wide = json_file(dir.path(), "wide.json", &ints(3, 1, &[1, 2, 3]));
    assert_eq!(minctrl(&["verify", s(&i2), s(&wide)], &[]).code, 2);

    // Observability of (J2(0), [1 0]) holds; of (J2(0), [0 1]) it does not.
    let c1 = json_file(dir.path(), "c1.json", &ints(1, 2, &[1, 0]));
    let c2 = json_file(dir.path(), "c2.json", &ints(1, 2, &[0, 1]));
    assert_eq!(minctrl(&["verify", "--mode", "obsv", s(&j2), s(&c1)], &[]).code, 0);
    assert_eq!(minctrl(&["verify", "--mode", "obsv", s(&j2), s(&c2)], &[]).code, 1);
}

#[test]
fn repeated_eigenvalue_rejects_every_single_input() {
    let dir = TempDir::new().unwrap();
    let a = json_file(dir.path(), "a.json", &ints(3, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 2]));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..8 {
        let b = json_file(dir.path(), &format!("b{k}.json"), &random_int_matrix(3, 1, 9, &mut rng));
        assert_eq!(minctrl(&["verify", s(&a), s(&b)], &[]).code, 1);
    }
}

#[test]
fn sample_is_deterministic_and_controllable() {
    let dir = TempDir::new().unwrap();
    let a_m = ints(3, 3, &[1, 0, 0, 0, 2, 0, 0, 0, 3]);
    let a = json_file(dir.path(), "a.json", &a_m);
    let (d1, d2) = (dir.path().join("one"), dir.path().join("two"));
    let r1 = minctrl(&["sample", s(&a), "--count", "3", "--seed", "7", "--out-dir", s(&d1)], &[]);
    let r2 = minctrl(&["sample", s(&a), "--count", "3", "--seed", "7", "--out-dir", s(&d2)], &[]);
    assert_eq!(r1.code, 0, "{}", r1.stderr);
    assert_eq!(r1.stable(), r2.stable());
    for i in 0..3 {
        let name = format!("sample_{i:03}.json");
        let f1 = std::fs::read(d1.join(&name)).unwrap();
        assert_eq!(f1, std::fs::read(d2.join(&name)).unwrap());
        let b = read_matrix_file(&d1.join(&name));
        assert_eq!(b.shape(), (3, 1));
        assert_eq!(kalman_rank_oracle(&a_m, &b), 3);
    }
    let other = dir.path().join("three");
    minctrl(&["sample", s(&a), "--count", "3", "--seed", "8", "--out-dir", s(&other)], &[]);
    assert_ne!(
        std::fs::read(d1.join("sample_000.json")).unwrap(),
        std::fs::read(other.join("sample_000.json")).unwrap()
    );
}

#[test]
fn samples_for_identity_have_full_rank() {
    let dir = TempDir::new().unwrap();
    let a = json_file(dir.path(), "a.json", &Matrix::identity(2));
    let out = dir.path().join("out");
    let run = minctrl(&["sample", s(&a), "--count", "4", "--out-dir", s(&out)], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    for i in 0..4 {
        let b = read_matrix_file(&out.join(format!("sample_{i:03}.json")));
        assert_eq!(b.shape(), (2, 2));
        assert_eq!(exact_rank(&b), 2);
    }
}

#[test]
fn synth_then_verify_round_trips_on_corpus() {
    let dir = TempDir::new().unwrap();
    for (k, inst) in corpus(99, 12).into_iter().enumerate() {
        let a = json_file(dir.path(), &format!("a{k}.json"), &inst.a);
        let b = dir.path().join(format!("b{k}.json"));
        let run = minctrl(&["synth", s(&a), "--alpha-seed", "3", "--out", s(&b)], &[]);
        assert_eq!(run.code, 0, "{}: {}", inst.label, run.stderr);
        assert_eq!(minctrl(&["verify", s(&a), s(&b)], &[]).code, 0, "{}", inst.label);
        assert_eq!(read_matrix_file(&b).cols(), inst.p_max);
    }
}

#[test]
fn tolerance_flags_override_environment() {
    let dir = TempDir::new().unwrap();
    let a = text_file(dir.path(), "a.txt", "1 0\n0 2\n");
    let bad = [("MINCTRL_TOL_RANK", "-1")];
    assert_eq!(minctrl(&["analyze", s(&a)], &bad).code, 2);
    assert_eq!(minctrl(&["analyze", "--tol-rank", "1e-9", s(&a)], &bad).code, 0);
    let r = minctrl(&["analyze", s(&a)], &[("MINCTRL_TOL_RANK", "1e-7")]).json();
    assert_eq!(r["tolerances"]["rank_tol"], 1e-7);
}

#[test]
fn rational_strings_cannot_use_the_float_backend() {
    let dir = TempDir::new().unwrap();
    let a = text_file(dir.path(), "a.txt", "1/3 0\n0 2\n");
    assert_eq!(minctrl(&["analyze", "--backend", "float", s(&a)], &[]).code, 2);
    let r = minctrl(&["analyze", s(&a)], &[]).json();
    assert_eq!(r["backend"], "exact");
}

#[test]
fn irrational_spectrum_falls_back_to_floats() {
    let dir = TempDir::new().unwrap();
    let a = text_file(dir.path(), "a.txt", "0 2\n1 0\n");
    let run = minctrl(&["analyze", s(&a)], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let r = run.json();
    assert_eq!(r["backend"], "float");
    assert_eq!(r["p_max"], 1);
    assert!(!r["warnings"].as_array().unwrap().is_empty());
    assert!(run.stderr.contains("warning:"));
    let explicit = minctrl(&["analyze", "--backend", "exact", s(&a)], &[]);
    assert_eq!(explicit.code, 0);
    assert_eq!(explicit.json()["backend"], "float");
}
