//! `minctrl {analyze|synth|verify|sample}`.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 input
//! error, 3 numerical ambiguity, 4 internal inconsistency.

pub mod io;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use self::io::{read_matrix, MatrixFile};
use self::report::{gap_json, groups_json, real_matrix_json, tolerances_json, verify_json, SCHEMA_VERSION};
use crate::error::Error;
use crate::matcore::{Backend, Field, GaussRational, Matrix, ToleranceConfig};
use crate::parametrize::sample_minimal;
use crate::spectral::{compute_eigenstructure, jordan_structure, Spectral};
use crate::synthesis::{synthesize_from_jordan, AlphaAssignment};
use crate::verify::{kalman_rank, pbh_controllable, pbh_controllable_with, pbh_observable, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Eigenvalues closer than this (relative to the spectral radius) make the
/// floating analysis fragile enough to warn about.
const NEAR_DEFECTIVE_GAP: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "minctrl", version, about = "Minimal inputs and outputs for controllability and observability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendChoice {
    Float,
    Exact,
    /// Exact when the spectrum is rational (or Gaussian rational), floating
    /// otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Ctrb,
    Obsv,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value = "auto")]
    backend: BackendChoice,
    /// Relative eigenvalue clustering tolerance.
    #[arg(long = "tol-eigen", allow_negative_numbers = true, env = "MINCTRL_TOL_EIGEN")]
    tol_eigen: Option<f64>,
    /// Relative singular-value cut-off for rank decisions.
    #[arg(long = "tol-rank", allow_negative_numbers = true, env = "MINCTRL_TOL_RANK")]
    tol_rank: Option<f64>,
    /// Absolute ceiling on imaginary residue of assembled real matrices.
    #[arg(long = "tol-real", allow_negative_numbers = true, env = "MINCTRL_TOL_REAL")]
    tol_real: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenstructure, Jordan blocks and the minimal input/output count.
    Analyze {
        matrix: PathBuf,
        /// Also synthesize a minimal input matrix and verify it.
        #[arg(long)]
        synth: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Construct a real minimal-width input (B) or output (C) matrix.
    Synth {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "input")]
        kind: Kind,
        /// Draw the block scalars at random from this seed instead of using 1.
        #[arg(long = "alpha-seed")]
        alpha_seed: Option<u64>,
        /// Write the matrix to this file as well.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Test controllability of (A, B) or observability of (A, C).
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "ctrb")]
        mode: Mode,
        #[command(flatten)]
        common: Common,
    },
    /// Draw random minimal-width input matrices from the full family.
    Sample {
        matrix: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for `sample_NNN.json` files.
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DataLength { .. }
        | Error::EmptyMatrix
        | Error::NotSquare { .. }
        | Error::DimensionMismatch { .. }
        | Error::NonRepresentable { .. }
        | Error::ZeroAlpha { .. }
        | Error::AlphaShape { .. }
        | Error::ParamShape { .. }
        | Error::InvalidTolerance { .. } => EXIT_INPUT,
        Error::Inconsistent { .. }
        | Error::IllConditionedSpectrum { .. }
        | Error::NotAnEigenvalue { .. }
        | Error::NoConvergence { .. }
        | Error::DefectiveStructure { .. }
        | Error::IrrationalSpectrum { .. } => EXIT_NUMERICAL,
        Error::RealnessViolation { .. }
        | Error::VerificationFailed { .. }
        | Error::RejectionBudgetExhausted { .. } => EXIT_INTERNAL,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(Value, i32), Failure>;

fn tolerances(common: &Common) -> Result<ToleranceConfig, Failure> {
    let d = ToleranceConfig::default();
    Ok(ToleranceConfig::new(
        common.tol_eigen.unwrap_or(d.eigen_cluster_tol),
        common.tol_rank.unwrap_or(d.rank_tol),
        common.tol_real.unwrap_or(d.realness_tol),
    )?)
}

fn load(path: &Path) -> Result<MatrixFile, Failure> {
    read_matrix(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_square(path: &Path) -> Result<MatrixFile, Failure> {
    let m = load(path)?;
    if !m.exact.is_square() {
        return Err(Failure::input(format!(
            "{}: state matrix must be square, got {}x{}",
            path.display(),
            m.exact.rows(),
            m.exact.cols()
        )));
    }
    Ok(m)
}

/// Runs `exact` or `float` according to the backend choice. The exact path
/// falls back to floating when the spectrum leaves the Gaussian rationals.
fn dispatch<T>(
    choice: BackendChoice,
    has_rational_strings: bool,
    warnings: &mut Vec<String>,
    exact: impl FnOnce() -> crate::Result<T>,
    float: impl FnOnce() -> crate::Result<T>,
) -> Result<(T, Backend), Failure> {
    if choice == BackendChoice::Float {
        if has_rational_strings {
            return Err(Failure::input(
                "rational entries require the exact backend; use --backend exact or auto",
            ));
        }
        return Ok((float()?, Backend::Float));
    }
    match exact() {
        Ok(v) => Ok((v, Backend::Exact)),
        Err(Error::IrrationalSpectrum { detail }) => {
            warnings.push(format!("exact spectrum unavailable ({detail}); fell back to floating point"));
            Ok((float()?, Backend::Float))
        }
        Err(e) => Err(e.into()),
    }
}

fn near_defective_warning<K: Field>(eigen: &crate::spectral::EigenStructure<K>, warnings: &mut Vec<String>) {
    if K::EXACT {
        return;
    }
    let radius = eigen
        .groups
        .iter()
        .map(|g| g.value.to_c64().norm())
        .fold(1.0, f64::max);
    if let Some(gap) = eigen.min_gap {
        if gap < NEAR_DEFECTIVE_GAP * radius {
            warnings.push(format!(
                "eigenvalues only {gap:.3e} apart; the floating structure may split a defective eigenvalue, consider --backend exact"
            ));
        }
    }
}

fn header(command: &str, file: &MatrixFile) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("schema_version".into(), SCHEMA_VERSION.into());
    obj.insert("command".into(), command.into());
    obj.insert(
        "input".into(),
        json!({ "sha256": file.digest(), "rows": file.exact.rows(), "cols": file.exact.cols() }),
    );
    obj
}

fn finish(mut obj: Map<String, Value>, backend: Backend, warnings: Vec<String>, tol: &ToleranceConfig, body: Map<String, Value>, started: Instant) -> Value {
    obj.insert("backend".into(), backend.to_string().into());
    obj.insert("warnings".into(), warnings.into());
    obj.insert("tolerances".into(), tolerances_json(tol));
    obj.extend(body);
    obj.insert(
        "timings".into(),
        json!({ "total_ms": started.elapsed().as_secs_f64() * 1e3 }),
    );
    Value::Object(obj)
}

fn analyze_with<K: Spectral>(
    a: &Matrix<K::Real>,
    synth: bool,
    tol: &ToleranceConfig,
    warnings: &mut Vec<String>,
) -> crate::Result<Map<String, Value>> {
    let eigen = compute_eigenstructure::<K>(a, tol)?;
    near_defective_warning(&eigen, warnings);
    let jordan = jordan_structure(a, &eigen, tol)?;
    let mut body = Map::new();
    body.insert("n".into(), eigen.n.into());
    body.insert("k_r".into(), eigen.k_r.into());
    body.insert("k_c".into(), eigen.k_c.into());
    body.insert("groups".into(), groups_json(&eigen, Some(&jordan)));
    body.insert("p_max".into(), eigen.p_max.into());
    body.insert("minimal_inputs".into(), eigen.p_max.into());
    body.insert("minimal_outputs".into(), eigen.p_max.into());
    body.insert("min_gap".into(), gap_json(eigen.min_gap));
    if synth {
        let s = synthesize_from_jordan(a, &jordan, &AlphaAssignment::ones(&jordan), tol)?;
        let verification = pbh_controllable_with(a, &s.b, &eigen, tol)?;
        body.insert("synthesized_input".into(), real_matrix_json::<K>(&s.b));
        body.insert("verification".into(), verify_json(&verification));
    }
    Ok(body)
}

fn cmd_analyze(matrix: &Path, synth: bool, common: &Common) -> CmdResult {
    let started = Instant::now();
    let tol = tolerances(common)?;
    let file = load_square(matrix)?;
    let mut warnings = Vec::new();
    let (exact, float) = (file.exact.clone(), file.float());
    let mut w_exact = Vec::new();
    let mut w_float = Vec::new();
    let (body, backend) = dispatch(
        common.backend,
        file.has_rational_strings,
        &mut warnings,
        || analyze_with::<GaussRational>(&exact, synth, &tol, &mut w_exact),
        || analyze_with::<Complex64>(&float, synth, &tol, &mut w_float),
    )?;
    warnings.extend(w_exact);
    warnings.extend(w_float);
    Ok((finish(header("analyze", &file), backend, warnings, &tol, body, started), EXIT_OK))
}

fn synth_with<K: Spectral>(
    a: &Matrix<K::Real>,
    kind: Kind,
    alpha_seed: Option<u64>,
    tol: &ToleranceConfig,
) -> crate::Result<(Map<String, Value>, Value)> {
    // An output matrix is the transpose of an input matrix for Aᵀ.
    let target = match kind {
        Kind::Input => a.clone(),
        Kind::Output => a.transpose(),
    };
    let eigen = compute_eigenstructure::<K>(&target, tol)?;
    let jordan = jordan_structure(&target, &eigen, tol)?;
    let alphas = match alpha_seed {
        Some(seed) => AlphaAssignment::random(&jordan, seed),
        None => AlphaAssignment::ones(&jordan),
    };
    let s = synthesize_from_jordan(&target, &jordan, &alphas, tol)?;
    let (matrix, verification) = match kind {
        Kind::Input => (s.b.clone(), pbh_controllable_with(a, &s.b, &eigen, tol)?),
        Kind::Output => {
            let c = s.b.transpose();
            let report = pbh_observable::<K>(a, &c, tol)?;
            (c, report)
        }
    };
    if !verification.verdict.is_affirmative() {
        return Err(Error::VerificationFailed {
            detail: format!("synthesized matrix fails its own check ({:?})", verification.verdict),
        });
    }
    let matrix_json = real_matrix_json::<K>(&matrix);
    let mut body = Map::new();
    body.insert(
        "kind".into(),
        match kind {
            Kind::Input => "input",
            Kind::Output => "output",
        }
        .into(),
    );
    body.insert("p_max".into(), eigen.p_max.into());
    body.insert("alpha_seed".into(), alpha_seed.map_or(Value::Null, Value::from));
    body.insert("matrix".into(), matrix_json.clone());
    body.insert("imag_residue".into(), io::f64_json(s.imag_residue));
    body.insert("verification".into(), verify_json(&verification));
    Ok((body, matrix_json))
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    std::fs::write(path, text).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn cmd_synth(matrix: &Path, kind: Kind, alpha_seed: Option<u64>, out: Option<&Path>, common: &Common) -> CmdResult {
    let started = Instant::now();
    let tol = tolerances(common)?;
    let file = load_square(matrix)?;
    let mut warnings = Vec::new();
    let ((body, matrix_json), backend) = dispatch(
        common.backend,
        file.has_rational_strings,
        &mut warnings,
        || synth_with::<GaussRational>(&file.exact, kind, alpha_seed, &tol),
        || synth_with::<Complex64>(&file.float(), kind, alpha_seed, &tol),
    )?;
    if let Some(path) = out {
        write_json(path, &matrix_json)?;
    }
    Ok((finish(header("synth", &file), backend, warnings, &tol, body, started), EXIT_OK))
}

fn verify_with<K: Spectral>(
    a: &Matrix<K::Real>,
    b: &Matrix<K::Real>,
    mode: Mode,
    tol: &ToleranceConfig,
) -> crate::Result<crate::verify::VerifyReport<K>> {
    match mode {
        Mode::Ctrb => pbh_controllable::<K>(a, b, tol),
        Mode::Obsv => pbh_observable::<K>(a, b, tol),
    }
}

fn cmd_verify(a_path: &Path, b_path: &Path, mode: Mode, common: &Common) -> CmdResult {
    let started = Instant::now();
    let tol = tolerances(common)?;
    let a = load_square(a_path)?;
    let b = load(b_path)?;
    let n = a.exact.rows();
    let compatible = match mode {
        Mode::Ctrb => b.exact.rows() == n,
        Mode::Obsv => b.exact.cols() == n,
    };
    if !compatible {
        return Err(Failure::input(format!(
            "{}x{} matrix does not fit a {n}x{n} state matrix",
            b.exact.rows(),
            b.exact.cols()
        )));
    }
    let mut warnings = Vec::new();
    let rational = a.has_rational_strings || b.has_rational_strings;
    let (body, backend) = dispatch(
        common.backend,
        rational,
        &mut warnings,
        || verify_with::<GaussRational>(&a.exact, &b.exact, mode, &tol).map(|r| (verify_json(&r), r.verdict, r.oracles_agree)),
        || verify_with::<Complex64>(&a.float(), &b.float(), mode, &tol).map(|r| (verify_json(&r), r.verdict, r.oracles_agree)),
    )?;
    let (report, verdict, agree) = body;
    let code = if !agree {
        let (code, what) = match backend {
            Backend::Exact => (EXIT_INTERNAL, "exact oracles disagree"),
            Backend::Float => (EXIT_NUMERICAL, "floating oracles disagree; rerun with --backend exact"),
        };
        warnings.push(what.into());
        code
    } else if verdict.is_affirmative() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let mut obj = header("verify", &a);
    obj.insert(
        "mode".into(),
        match mode {
            Mode::Ctrb => "ctrb",
            Mode::Obsv => "obsv",
        }
        .into(),
    );
    let mut body = Map::new();
    body.insert("report".into(), report);
    Ok((finish(obj, backend, warnings, &tol, body, started), code))
}

/// Sample matrices as JSON, per-sample verdict and Kalman rank, and `p_max`.
type SampleOutcome = (Vec<Value>, Vec<(Verdict, usize)>, usize);

fn sample_with<K: Spectral>(
    a: &Matrix<K::Real>,
    count: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> crate::Result<SampleOutcome> {
    let eigen = compute_eigenstructure::<K>(a, tol)?;
    let jordan = jordan_structure(a, &eigen, tol)?;
    let samples = sample_minimal(&jordan, seed, count, tol)?;
    let mut files = Vec::with_capacity(count);
    let mut checks = Vec::with_capacity(count);
    for b in &samples {
        let report = pbh_controllable_with(a, b, &eigen, tol)?;
        checks.push((report.verdict, kalman_rank(a, b, tol)?.rank));
        files.push(real_matrix_json::<K>(b));
    }
    Ok((files, checks, eigen.p_max))
}

fn cmd_sample(matrix: &Path, count: usize, seed: u64, out_dir: Option<&Path>, common: &Common) -> CmdResult {
    let started = Instant::now();
    let tol = tolerances(common)?;
    let file = load_square(matrix)?;
    let mut warnings = Vec::new();
    let ((files, checks, p_max), backend) = dispatch(
        common.backend,
        file.has_rational_strings,
        &mut warnings,
        || sample_with::<GaussRational>(&file.exact, count, seed, &tol),
        || sample_with::<Complex64>(&file.float(), count, seed, &tol),
    )?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut entries = Vec::with_capacity(count);
    for (i, (value, (verdict, rank))) in files.iter().zip(&checks).enumerate() {
        let name = format!("sample_{i:03}.json");
        if let Some(dir) = out_dir {
            write_json(&dir.join(&name), value)?;
        }
        entries.push(json!({ "index": i, "file": name, "verdict": verdict, "kalman_rank": rank }));
    }
    let all_pass = checks.iter().all(|(v, _)| v.is_affirmative());
    let mut body = Map::new();
    body.insert("p_max".into(), p_max.into());
    body.insert("count".into(), count.into());
    body.insert("seed".into(), seed.into());
    body.insert("all_controllable".into(), all_pass.into());
    body.insert("samples".into(), entries.into());
    let code = if all_pass { EXIT_OK } else { EXIT_INTERNAL };
    Ok((finish(header("sample", &file), backend, warnings, &tol, body, started), code))
}

/// Entry point shared by the binary and the tests. Reports go to `stdout`,
/// diagnostics to `stderr`; the return value is the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze { matrix, synth, common } => cmd_analyze(matrix, *synth, common),
        Command::Synth {
            matrix,
            kind,
            alpha_seed,
            out,
            common,
        } => cmd_synth(matrix, *kind, *alpha_seed, out.as_deref(), common),
        Command::Verify { a, b, mode, common } => cmd_verify(a, b, *mode, common),
        Command::Sample {
            matrix,
            count,
            seed,
            out_dir,
            common,
        } => match usize::try_from(*count) {
            Ok(count) => cmd_sample(matrix, count, *seed, out_dir.as_deref(), common),
            Err(_) => Err(Failure::input("--count is too large")),
        },
    };
    match result {
        Ok((value, code)) => {
            if let Some(warnings) = value.get("warnings").and_then(Value::as_array) {
                for w in warnings.iter().filter_map(Value::as_str) {
                    let _ = writeln!(stderr, "warning: {w}");
                }
            }
            let text = serde_json::to_string_pretty(&value).expect("serializable");
            let _ = writeln!(stdout, "{text}");
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

