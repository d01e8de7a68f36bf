//! Minimal input/output counts and construction of real minimal-width input
//! and output matrices from the Jordan structure.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::{Field, Matrix, Scalar, ToleranceConfig};
use crate::spectral::{compute_eigenstructure, jordan_structure, JordanStructure, Spectral};
use crate::verify::{lemma2_check, pbh_controllable_with, Verdict};

/// Nonzero scalars `α_{i,j}`, one per Jordan block of each group that
/// carries its own chains (real groups and complex representatives).
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaAssignment<K> {
    values: Vec<Vec<K>>,
}

impl<K: Field> AlphaAssignment<K> {
    pub fn new(values: Vec<Vec<K>>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Vec<K>] {
        &self.values
    }

    /// `α = 1` for every block.
    pub fn ones(jordan: &JordanStructure<K>) -> Self {
        let values = jordan
            .eigen
            .representatives()
            .map(|i| vec![K::one(); jordan.block_sizes[i].len()])
            .collect();
        Self { values }
    }

    /// Magnitudes uniform on `[0.5, 2]`; complex groups also get a uniform
    /// phase. Exact fields receive the draws rounded to a dyadic grid.
    pub fn random(jordan: &JordanStructure<K>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = jordan
            .eigen
            .representatives()
            .map(|i| {
                let complex = i >= jordan.eigen.k_r;
                (0..jordan.block_sizes[i].len())
                    .map(|_| {
                        let r: f64 = rng.random_range(0.5..=2.0);
                        if complex {
                            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                            let alpha = K::from_c64(Complex64::from_polar(r, phase));
                            if alpha.is_zero() {
                                K::from_c64(Complex64::new(r, 0.0))
                            } else {
                                alpha
                            }
                        } else {
                            K::from_c64(Complex64::new(r, 0.0))
                        }
                    })
                    .collect()
            })
            .collect();
        Self { values }
    }

    /// Checks the shape against `jordan`, that real groups get real scalars,
    /// and that no scalar is zero.
    pub fn check(&self, jordan: &JordanStructure<K>) -> Result<()> {
        let reps = jordan.eigen.representatives();
        if self.values.len() != reps.len() {
            return Err(Error::AlphaShape {
                detail: format!(
                    "{} groups of scalars for {} eigenvalue groups",
                    self.values.len(),
                    reps.len()
                ),
            });
        }
        for i in reps {
            let blocks = jordan.block_sizes[i].len();
            if self.values[i].len() != blocks {
                return Err(Error::AlphaShape {
                    detail: format!(
                        "group {i} has {blocks} blocks but {} scalars",
                        self.values[i].len()
                    ),
                });
            }
            for (j, alpha) in self.values[i].iter().enumerate() {
                if alpha.is_zero() {
                    return Err(Error::ZeroAlpha { group: i, block: j });
                }
                if i < jordan.eigen.k_r && !num_traits::Zero::is_zero(&alpha.im()) {
                    return Err(Error::AlphaShape {
                        detail: format!("scalar ({i}, {j}) of a real eigenvalue must be real"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Maximum geometric multiplicity of `A`: the least number of inputs that
/// can make `(A, B)` controllable, and the least number of outputs that can
/// make `(A, C)` observable.
pub fn minimal_input_count<K: Spectral>(a: &Matrix<K::Real>, tol: &ToleranceConfig) -> Result<usize> {
    Ok(compute_eigenstructure::<K>(a, tol)?.p_max)
}

/// `B̂` block for one group: `Σ m_j` rows, `p_max` columns, with `α_j` in
/// the last row of block `j` in column `j` and zeros elsewhere.
pub fn build_bhat_block<S: Scalar>(
    group: usize,
    block_sizes: &[usize],
    p_max: usize,
    alphas: &[S],
) -> Result<Matrix<S>> {
    if alphas.len() != block_sizes.len() {
        return Err(Error::AlphaShape {
            detail: format!("{} blocks but {} scalars", block_sizes.len(), alphas.len()),
        });
    }
    if block_sizes.len() > p_max {
        return Err(Error::AlphaShape {
            detail: format!("{} blocks exceed the width {p_max}", block_sizes.len()),
        });
    }
    if block_sizes.contains(&0) {
        return Err(Error::AlphaShape {
            detail: "block sizes must be positive".into(),
        });
    }
    let rows: usize = block_sizes.iter().sum();
    let mut out = Matrix::zeros(rows, p_max);
    let mut end = 0;
    for (j, (&m, alpha)) in block_sizes.iter().zip(alphas).enumerate() {
        if alpha.is_zero() {
            return Err(Error::ZeroAlpha { group, block: j });
        }
        end += m;
        out[(end - 1, j)] = alpha.clone();
    }
    Ok(out)
}

/// A real input matrix of minimal width together with the data it was
/// built from.
#[derive(Debug, Clone)]
pub struct InputSynthesis<K: Field> {
    pub b: Matrix<K::Real>,
    pub q: usize,
    pub alphas: AlphaAssignment<K>,
    pub jordan: JordanStructure<K>,
    /// Largest `|Im|` of `T·col{B̂}` before the real part was taken.
    pub imag_residue: f64,
}

impl<K: Field> InputSynthesis<K> {
    /// `B̂` for every group, partners included: representative blocks from
    /// the scalars, partner blocks as their conjugates.
    pub fn bhat_blocks(&self) -> Vec<Matrix<K>> {
        bhat_all(&self.jordan, &self.alphas, self.q).expect("validated at construction")
    }
}

fn bhat_all<K: Field>(
    jordan: &JordanStructure<K>,
    alphas: &AlphaAssignment<K>,
    q: usize,
) -> Result<Vec<Matrix<K>>> {
    let eigen = &jordan.eigen;
    let mut blocks = vec![Matrix::zeros(0, q); eigen.groups.len()];
    for i in eigen.representatives() {
        blocks[i] = build_bhat_block(i, &jordan.block_sizes[i], q, &alphas.values[i])?;
        if let Some(p) = eigen.groups[i].conjugate_partner {
            blocks[p] = blocks[i].conj();
        }
    }
    Ok(blocks)
}

pub(crate) fn real_part<K: Field>(m: &Matrix<K>) -> Matrix<K::Real> {
    m.map(|z| z.re())
}

/// Largest `|Im|`. On exact fields any nonzero imaginary part counts as
/// infinite so that no tolerance can absorb it.
pub(crate) fn max_imag<K: Field>(m: &Matrix<K>) -> f64 {
    m.data()
        .iter()
        .map(|z| {
            if K::EXACT && !num_traits::Zero::is_zero(&z.im()) {
                f64::INFINITY
            } else {
                z.to_c64().im.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Builds `B` from a precomputed Jordan structure of `A`.
///
/// Real groups contribute `[T_{i,1} … T_{i,p_i}]·B̂_i` and each complex
/// representative contributes `2·Re{[T_{i,1} … T_{i,p_i}]·B̂_i}`. The same
/// matrix is also formed as `T·col{B̂}` over all groups; its imaginary part
/// must vanish and its real part must match the sum.
pub fn synthesize_from_jordan<K: Field>(
    a: &Matrix<K::Real>,
    jordan: &JordanStructure<K>,
    alphas: &AlphaAssignment<K>,
    tol: &ToleranceConfig,
) -> Result<InputSynthesis<K>> {
    alphas.check(jordan)?;
    let eigen = &jordan.eigen;
    let n = eigen.n;
    let q = eigen.p_max;
    let blocks = bhat_all(jordan, alphas, q)?;

    let mut b = Matrix::<K::Real>::zeros(n, q);
    for i in eigen.representatives() {
        let term = &jordan.group_transform(i) * &blocks[i];
        let term = if i < eigen.k_r {
            real_part(&term)
        } else {
            let two = <K::Real as Scalar>::from_i64(2);
            real_part(&term).scale(&two)
        };
        b = &b + &term;
    }

    let parts: Vec<&Matrix<K>> = blocks.iter().collect();
    let full = &jordan.transform * &Matrix::vcat(q, &parts)?;
    let imag_residue = max_imag(&full);
    if imag_residue > tol.realness_tol {
        return Err(Error::RealnessViolation {
            group: None,
            residue: imag_residue,
            limit: tol.realness_tol,
        });
    }
    let mismatch = (&real_part(&full) - &b).max_modulus();
    let consistent = if K::EXACT {
        real_part(&full) == b
    } else {
        mismatch <= tol.realness_tol.max(f64::EPSILON) * full.max_modulus().max(1.0)
    };
    if !consistent {
        return Err(Error::VerificationFailed {
            detail: format!("block sum and T·col{{B̂}} differ by {mismatch:.3e}"),
        });
    }

    let ranks = lemma2_check(a, &b, eigen, tol)?;
    let report = pbh_controllable_with(a, &b, eigen, tol)?;
    if report.verdict != Verdict::Controllable || ranks.iter().any(|ok| !ok) {
        let failing: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passes || c.lemma2_rank != c.geometric_multiplicity)
            .map(|c| {
                format!(
                    "λ={}: pencil rank {} of {n}, rank(BᴴX) {} of {}",
                    crate::spectral::describe(&c.eigenvalue),
                    c.pencil_rank,
                    c.lemma2_rank,
                    c.geometric_multiplicity
                )
            })
            .collect();
        return Err(Error::VerificationFailed {
            detail: format!("synthesized pair is not controllable: {}", failing.join("; ")),
        });
    }

    Ok(InputSynthesis {
        b,
        q,
        alphas: alphas.clone(),
        jordan: jordan.clone(),
        imag_residue,
    })
}

/// Real input matrix with `p_max` columns making `(A, B)` controllable.
/// Without explicit scalars every `α` is 1.
pub fn synthesize_minimal_input<K: Spectral>(
    a: &Matrix<K::Real>,
    alphas: Option<&AlphaAssignment<K>>,
    tol: &ToleranceConfig,
) -> Result<InputSynthesis<K>> {
    let eigen = compute_eigenstructure::<K>(a, tol)?;
    let jordan = jordan_structure(a, &eigen, tol)?;
    let alphas = match alphas {
        Some(a) => a.clone(),
        None => AlphaAssignment::ones(&jordan),
    };
    synthesize_from_jordan(a, &jordan, &alphas, tol)
}

/// Output matrix built as the transpose of an input matrix for `Aᵀ`.
#[derive(Debug, Clone)]
pub struct OutputSynthesis<K: Field> {
    pub c: Matrix<K::Real>,
    /// The input synthesis for `Aᵀ` that `C` transposes.
    pub dual: InputSynthesis<K>,
}

/// Real output matrix with `p_max` rows making `(A, C)` observable. The
/// scalars, if given, refer to the Jordan structure of `Aᵀ`.
pub fn synthesize_minimal_output<K: Spectral>(
    a: &Matrix<K::Real>,
    alphas: Option<&AlphaAssignment<K>>,
    tol: &ToleranceConfig,
) -> Result<OutputSynthesis<K>> {
    let dual = synthesize_minimal_input(&a.transpose(), alphas, tol)?;
    Ok(OutputSynthesis {
        c: dual.b.transpose(),
        dual,
    })
}
