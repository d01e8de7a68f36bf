//! Parametrization of every real input matrix of minimal width that makes
//! `(A, B)` controllable.
//!
//! Any `B` is written as `T·col{B̂_i}` with one parameter block `B̂_i` per
//! eigenvalue group. The pair is controllable exactly when, for every group,
//! the rows of `B̂_i` sitting at the ends of its Jordan chains form a matrix
//! of full column rank, and `B` is real exactly when partner blocks are
//! conjugate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::{Field, Matrix, Scalar, ToleranceConfig};
use crate::spectral::JordanStructure;
use crate::synthesis::{max_imag, real_part};

/// Parameter blocks `B̂_i` for all groups, conjugate partners included.
/// Block `i` is `m_i × q` where `m_i` is the algebraic multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBlockSet<K> {
    pub blocks: Vec<Matrix<K>>,
    pub q: usize,
}

impl<K: Scalar> ParamBlockSet<K> {
    pub fn new(blocks: Vec<Matrix<K>>, q: usize) -> Self {
        Self { blocks, q }
    }

    pub fn zeros(jordan: &JordanStructure<K>, q: usize) -> Self {
        let blocks = jordan.group_dims().into_iter().map(|m| Matrix::zeros(m, q)).collect();
        Self { blocks, q }
    }

    /// All blocks stacked in group order: `T⁻¹·B`.
    pub fn stacked(&self) -> Matrix<K> {
        let parts: Vec<&Matrix<K>> = self.blocks.iter().collect();
        Matrix::vcat(self.q, &parts).expect("blocks share the width")
    }

    fn max_modulus(&self) -> f64 {
        self.blocks.iter().map(Matrix::max_modulus).fold(0.0, f64::max)
    }
}

/// Why a parameter set does not describe a minimal controllable input.
#[derive(Debug, Clone, PartialEq)]
pub enum InvalidReason {
    WidthNotMinimal { q: usize, p_max: usize },
    NotReal { residue: f64, limit: f64 },
    RankDeficient { group: usize, rank: usize, required: usize },
}

impl std::fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvalidReason::WidthNotMinimal { q, p_max } => {
                write!(f, "width {q} differs from the minimal width {p_max}")
            }
            InvalidReason::NotReal { residue, limit } => {
                write!(f, "assembled matrix has imaginary residue {residue:.3e} above {limit:.1e}")
            }
            InvalidReason::RankDeficient {
                group,
                rank,
                required,
            } => write!(f, "group {group}: chain-end rows have rank {rank}, need {required}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// `Z_i`: block diagonal, block `j` the unit vector selecting the last row
/// of the `m_j`-row block (the row a left eigenvector of the Jordan block
/// sees).
pub fn build_selector<S: Scalar>(block_sizes: &[usize]) -> Matrix<S> {
    let rows: usize = block_sizes.iter().sum();
    let mut z = Matrix::zeros(rows, block_sizes.len());
    let mut end = 0;
    for (j, &m) in block_sizes.iter().enumerate() {
        end += m;
        z[(end - 1, j)] = S::one();
    }
    z
}

/// `B̂ᴴ·Z`, the `q × p` matrix whose full column rank decides
/// controllability at one group.
pub fn tilde<S: Scalar>(bhat: &Matrix<S>, block_sizes: &[usize]) -> Matrix<S> {
    &bhat.adjoint() * &build_selector::<S>(block_sizes)
}

fn check_shape<K: Scalar>(jordan: &JordanStructure<K>, params: &ParamBlockSet<K>) -> Result<()> {
    let dims = jordan.group_dims();
    if params.blocks.len() != dims.len() {
        return Err(Error::ParamShape {
            detail: format!("{} blocks for {} eigenvalue groups", params.blocks.len(), dims.len()),
        });
    }
    for (i, (block, m)) in params.blocks.iter().zip(dims).enumerate() {
        if block.shape() != (m, params.q) {
            return Err(Error::ParamShape {
                detail: format!(
                    "block {i} is {}x{}, expected {m}x{}",
                    block.rows(),
                    block.cols(),
                    params.q
                ),
            });
        }
    }
    Ok(())
}

/// First group whose blocks break conjugate pairing (or reality, for real
/// groups), if any.
fn pairing_violation<K: Field>(
    jordan: &JordanStructure<K>,
    params: &ParamBlockSet<K>,
    tol: &ToleranceConfig,
) -> Option<usize> {
    let eigen = &jordan.eigen;
    for i in eigen.representatives() {
        let block = &params.blocks[i];
        let bad = match eigen.groups[i].conjugate_partner {
            None => max_imag(block) > tol.realness_tol,
            Some(p) => {
                let diff = &params.blocks[p] - &block.conj();
                if K::EXACT {
                    !diff.is_zero()
                } else {
                    diff.max_modulus() > tol.realness_tol
                }
            }
        };
        if bad {
            return Some(i);
        }
    }
    None
}

/// `B = T·col{B̂_i}`, required to be real within the realness tolerance.
pub fn assemble_from_params<K: Field>(
    jordan: &JordanStructure<K>,
    params: &ParamBlockSet<K>,
    tol: &ToleranceConfig,
) -> Result<Matrix<K::Real>> {
    check_shape(jordan, params)?;
    let full = &jordan.transform * &params.stacked();
    let residue = max_imag(&full);
    if residue > tol.realness_tol {
        return Err(Error::RealnessViolation {
            group: pairing_violation(jordan, params, tol),
            residue,
            limit: tol.realness_tol,
        });
    }
    Ok(real_part(&full))
}

/// Row partition of `T⁻¹·B` into per-group blocks.
pub fn extract_params<K: Field>(jordan: &JordanStructure<K>, b: &Matrix<K::Real>) -> Result<ParamBlockSet<K>> {
    if b.rows() != jordan.n() {
        return Err(Error::DimensionMismatch {
            op: "extract parameters",
            left: (jordan.n(), jordan.n()),
            right: b.shape(),
        });
    }
    let bk = b.map(|x| K::from_real(x.clone()));
    let stacked = &jordan.transform_inverse * &bk;
    let blocks = jordan
        .group_offsets()
        .into_iter()
        .zip(jordan.group_dims())
        .map(|(start, m)| stacked.row_block(start, m))
        .collect();
    Ok(ParamBlockSet { blocks, q: b.cols() })
}

/// Reality plus full column rank of every tilde matrix, at any width
/// `q ≥ p_max`.
pub fn validate_width<K: Field>(
    jordan: &JordanStructure<K>,
    params: &ParamBlockSet<K>,
    tol: &ToleranceConfig,
) -> Result<Validity> {
    check_shape(jordan, params)?;
    let full = &jordan.transform * &params.stacked();
    let residue = max_imag(&full);
    if residue > tol.realness_tol {
        return Ok(Validity::Invalid(InvalidReason::NotReal {
            residue,
            limit: tol.realness_tol,
        }));
    }
    let threshold = tol.rank_tol * params.max_modulus().max(1.0);
    for (i, group) in jordan.eigen.groups.iter().enumerate() {
        let t = tilde(&params.blocks[i], &jordan.block_sizes[i]);
        let rank = t.rank_abs(threshold);
        if rank < group.geometric_multiplicity {
            return Ok(Validity::Invalid(InvalidReason::RankDeficient {
                group: i,
                rank,
                required: group.geometric_multiplicity,
            }));
        }
    }
    Ok(Validity::Valid)
}

/// Whether `params` describes a real input matrix of minimal width making
/// the pair controllable.
pub fn validate_minimal<K: Field>(
    jordan: &JordanStructure<K>,
    params: &ParamBlockSet<K>,
    tol: &ToleranceConfig,
) -> Result<Validity> {
    let p_max = jordan.eigen.p_max;
    if params.q != p_max {
        return Ok(Validity::Invalid(InvalidReason::WidthNotMinimal { q: params.q, p_max }));
    }
    validate_width(jordan, params, tol)
}

fn draw_params<K: Field>(jordan: &JordanStructure<K>, q: usize, rng: &mut ChaCha8Rng) -> ParamBlockSet<K> {
    let eigen = &jordan.eigen;
    let dims = jordan.group_dims();
    let mut params = ParamBlockSet::zeros(jordan, q);
    let mut uniform = || K::real_from_f64(rng.random_range(-1.0..=1.0));
    for i in eigen.representatives() {
        let complex = eigen.groups[i].conjugate_partner.is_some();
        let block = Matrix::from_fn(dims[i], q, |_, _| {
            if complex {
                let re = uniform();
                K::from_parts(re, uniform())
            } else {
                K::from_real(uniform())
            }
        });
        if let Some(p) = eigen.groups[i].conjugate_partner {
            params.blocks[p] = block.conj();
        }
        params.blocks[i] = block;
    }
    params
}

/// Seeded draws of valid parameter sets of width `q ≥ p_max`: entries
/// uniform on `[−1, 1]` (real and imaginary parts independently), partner
/// blocks conjugated, invalid draws rejected.
pub fn sample_params<K: Field>(
    jordan: &JordanStructure<K>,
    q: usize,
    seed: u64,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<ParamBlockSet<K>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 100 * count;
    let mut accepted = Vec::with_capacity(count);
    let mut draws = 0;
    while accepted.len() < count {
        if draws == budget {
            return Err(Error::RejectionBudgetExhausted {
                requested: count,
                accepted: accepted.len(),
                draws,
            });
        }
        draws += 1;
        let params = draw_params(jordan, q, &mut rng);
        if validate_width(jordan, &params, tol)?.is_valid() {
            accepted.push(params);
        }
    }
    Ok(accepted)
}

/// `count` random real input matrices of minimal width, each making the
/// pair controllable. Deterministic for a given seed.
pub fn sample_minimal<K: Field>(
    jordan: &JordanStructure<K>,
    seed: u64,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<Matrix<K::Real>>> {
    sample_params(jordan, jordan.eigen.p_max, seed, count, tol)?
        .iter()
        .map(|p| assemble_from_params(jordan, p, tol))
        .collect()
}
