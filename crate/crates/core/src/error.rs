use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected {expected} elements, found {found}")]
    DataLength { expected: usize, found: usize },

    #[error("matrix must be nonempty")]
    EmptyMatrix,

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("incompatible shapes for {op}: {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("entry ({row}, {col}) = {value} has no exact rational representation")]
    NonRepresentable { row: usize, col: usize, value: f64 },

    #[error("eigenvalue iteration did not converge for a {n}x{n} matrix")]
    NoConvergence { n: usize },

    #[error("linear system has no solution (residual norm {residual:.3e})")]
    Inconsistent { residual: f64 },

    #[error(
        "ill-conditioned spectrum near {near}: merged cluster diameter {diameter:.3e} \
         exceeds {limit:.3e} (smallest separating gap {gap:.3e})"
    )]
    IllConditionedSpectrum {
        near: String,
        diameter: f64,
        limit: f64,
        gap: f64,
    },

    #[error("{value} is not an eigenvalue (shifted matrix has full rank)")]
    NotAnEigenvalue { value: String },

    #[error(
        "numerically defective Jordan structure at {eigenvalue}: {detail}; \
         retry with the exact backend"
    )]
    DefectiveStructure { eigenvalue: String, detail: String },

    #[error("spectrum is not rational: {detail}")]
    IrrationalSpectrum { detail: String },

    #[error("alpha for group {group}, block {block} is zero")]
    ZeroAlpha { group: usize, block: usize },

    #[error("alpha assignment does not match the Jordan structure: {detail}")]
    AlphaShape { detail: String },

    #[error("imaginary residue {residue:.3e} exceeds realness tolerance {limit:.3e}{}", group_suffix(*.group))]
    RealnessViolation {
        group: Option<usize>,
        residue: f64,
        limit: f64,
    },

    #[error("parameter blocks do not match the Jordan structure: {detail}")]
    ParamShape { detail: String },

    #[error("post-hoc verification failed: {detail}")]
    VerificationFailed { detail: String },

    #[error("rejection budget exhausted: {accepted} of {requested} samples accepted after {draws} draws")]
    RejectionBudgetExhausted {
        requested: usize,
        accepted: usize,
        draws: usize,
    },

    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
}

fn group_suffix(group: Option<usize>) -> String {
    group.map(|g| format!(" at group {g}")).unwrap_or_default()
}
