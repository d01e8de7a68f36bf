use super::eigen::{describe, EigenStructure, Spectral};
use crate::error::{Error, Result};
use crate::matcore::{Field, Matrix, Scalar, ToleranceConfig};

/// Chain residual ceiling for the floating backend, relative to `‖A‖·‖T‖`.
const CHAIN_RESIDUAL_TOL: f64 = 1e-8;

/// Candidate chain tops whose component outside the already-used subspace
/// falls below this fraction of their norm are treated as dependent
/// (floating backend only).
const TOP_INDEPENDENCE_TOL: f64 = 1e-6;

/// Jordan decomposition `A = T·J·T⁻¹` assembled group by group.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanStructure<K> {
    pub eigen: EigenStructure<K>,
    /// Per group, block sizes in descending order; one block per
    /// independent eigenvector.
    pub block_sizes: Vec<Vec<usize>>,
    /// Per group, per block, the `n × m` chain `T_{i,j}` with
    /// `A·T_{i,j} = T_{i,j}·J_m(λ_i)`; its first column is an eigenvector.
    pub chains: Vec<Vec<Matrix<K>>>,
    pub transform: Matrix<K>,
    pub transform_inverse: Matrix<K>,
}

/// `m × m` upper bidiagonal Jordan block.
pub fn jordan_block<S: Scalar>(lambda: &S, m: usize) -> Matrix<S> {
    Matrix::from_fn(m, m, |i, j| {
        if i == j {
            lambda.clone()
        } else if j == i + 1 {
            S::one()
        } else {
            S::zero()
        }
    })
}

impl<K: Scalar> JordanStructure<K> {
    pub fn n(&self) -> usize {
        self.eigen.n
    }

    /// Row (and column) offset of each group within `T⁻¹·A·T`.
    pub fn group_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.block_sizes.len());
        let mut acc = 0;
        for sizes in &self.block_sizes {
            offsets.push(acc);
            acc += sizes.iter().sum::<usize>();
        }
        offsets
    }

    /// `m_i = Σ_j m_{i,j}`, the algebraic multiplicity of each group.
    pub fn group_dims(&self) -> Vec<usize> {
        self.block_sizes.iter().map(|s| s.iter().sum()).collect()
    }

    /// Block-diagonal Jordan matrix in the same order as the transform.
    pub fn jordan_matrix(&self) -> Matrix<K> {
        let blocks: Vec<Matrix<K>> = self
            .eigen
            .groups
            .iter()
            .zip(&self.block_sizes)
            .flat_map(|(g, sizes)| sizes.iter().map(|&m| jordan_block(&g.value, m)))
            .collect();
        Matrix::block_diag(&blocks)
    }

    /// `[T_{i,1} … T_{i,p_i}]` for one group.
    pub fn group_transform(&self, group: usize) -> Matrix<K> {
        let parts: Vec<&Matrix<K>> = self.chains[group].iter().collect();
        Matrix::hcat(self.n(), &parts).expect("chains share the state dimension")
    }
}

/// `rank((A − λI)^{k−1}) − rank((A − λI)^k)` for `k = 1, 2, …` until the
/// rank stabilizes at `n − algebraic`. Entry `k − 1` counts blocks of size
/// at least `k`.
pub fn weyr_characteristic<K: Field>(
    shifted: &Matrix<K>,
    algebraic: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<usize>> {
    let n = shifted.rows();
    let target = n - algebraic;
    let mut ranks = vec![n];
    let mut power = Matrix::identity(n);
    while *ranks.last().unwrap() > target {
        if ranks.len() > algebraic {
            break;
        }
        power = &power * shifted;
        let r = power.rank(tol.rank_tol);
        if r >= *ranks.last().unwrap() {
            break;
        }
        ranks.push(r);
    }
    if *ranks.last().unwrap() != target {
        return Err(Error::DefectiveStructure {
            eigenvalue: String::new(),
            detail: format!(
                "rank sequence {ranks:?} of the shifted powers never reaches {target}"
            ),
        });
    }
    let weyr: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    if weyr.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::DefectiveStructure {
            eigenvalue: String::new(),
            detail: format!("Weyr characteristic {weyr:?} is not non-increasing"),
        });
    }
    Ok(weyr)
}

/// Block sizes (descending) from a Weyr characteristic.
pub fn block_sizes_from_weyr(weyr: &[usize]) -> Vec<usize> {
    let mut sizes = Vec::new();
    for k in (1..=weyr.len()).rev() {
        let at_least = weyr[k - 1];
        let longer = weyr.get(k).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat_n(k, at_least - longer));
    }
    sizes
}

fn inner<K: Scalar>(u: &Matrix<K>, v: &Matrix<K>) -> K {
    u.data()
        .iter()
        .zip(v.data())
        .fold(K::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
}

/// Orthogonal (not normalized) basis grown one vector at a time.
struct Orthogonalizer<K> {
    basis: Vec<(Matrix<K>, K)>,
}

impl<K: Field> Orthogonalizer<K> {
    fn new() -> Self {
        Self { basis: Vec::new() }
    }

    fn residual(&self, v: &Matrix<K>) -> Matrix<K> {
        let passes = if K::EXACT { 1 } else { 2 };
        let mut r = v.clone();
        for _ in 0..passes {
            for (q, qq) in &self.basis {
                let c = inner(q, &r) / qq.clone();
                r = &r - &q.scale(&c);
            }
        }
        r
    }

    fn is_independent(residual: &Matrix<K>, original: &Matrix<K>) -> bool {
        if K::EXACT {
            !residual.is_zero()
        } else {
            residual.frobenius_norm() > TOP_INDEPENDENCE_TOL * original.frobenius_norm()
        }
    }

    /// Adds `v` if it is independent of the current span.
    fn push(&mut self, v: &Matrix<K>) -> Option<Matrix<K>> {
        let r = self.residual(v);
        if !Self::is_independent(&r, v) {
            return None;
        }
        let rr = inner(&r, &r);
        self.basis.push((r.clone(), rr));
        Some(r)
    }
}

/// Jordan chains of `N = A − λI` for the given descending block sizes.
///
/// Tops are drawn from `ker N^d` modulo `ker N^{d−1}` and the level-`d`
/// vectors of longer chains, largest blocks first.
fn build_chains<K: Field>(
    shifted: &Matrix<K>,
    sizes: &[usize],
    tol: &ToleranceConfig,
    label: &str,
) -> Result<Vec<Matrix<K>>> {
    let n = shifted.rows();
    let Some(&longest) = sizes.first() else {
        return Ok(Vec::new());
    };
    let mut kernels = vec![Matrix::<K>::zeros(n, 0)];
    let mut power = Matrix::identity(n);
    for _ in 1..=longest {
        power = &power * shifted;
        kernels.push(power.null_space(tol.rank_tol));
    }

    let mut tops: Vec<(usize, Matrix<K>)> = Vec::new();
    for d in (1..=longest).rev() {
        let need = sizes.iter().filter(|&&m| m == d).count();
        if need == 0 {
            continue;
        }
        let mut ortho = Orthogonalizer::new();
        let lower = &kernels[d - 1];
        for c in 0..lower.cols() {
            ortho.push(&lower.column(c));
        }
        for (e, top) in &tops {
            let mut v = top.clone();
            for _ in 0..(e - d) {
                v = shifted * &v;
            }
            ortho.push(&v);
        }
        let candidates: Vec<Matrix<K>> = (0..kernels[d].cols()).map(|c| kernels[d].column(c)).collect();
        let mut used = vec![false; candidates.len()];
        for _ in 0..need {
            // Exact: first independent candidate, so inputs already in Jordan
            // form keep T = I. Floating: largest residual, earliest on ties.
            let mut best: Option<(usize, f64)> = None;
            for (i, c) in candidates.iter().enumerate().filter(|(i, _)| !used[*i]) {
                let r = ortho.residual(c);
                if K::EXACT {
                    if !r.is_zero() {
                        best = Some((i, 1.0));
                        break;
                    }
                    continue;
                }
                let norm = r.frobenius_norm();
                if best.is_none_or(|(_, b)| norm > b) {
                    best = Some((i, norm));
                }
            }
            let Some((i, _)) = best else {
                return Err(Error::DefectiveStructure {
                    eigenvalue: label.to_string(),
                    detail: format!("ran out of chain-top candidates for blocks of size {d}"),
                });
            };
            used[i] = true;
            let Some(mut top) = ortho.push(&candidates[i]) else {
                return Err(Error::DefectiveStructure {
                    eigenvalue: label.to_string(),
                    detail: format!("no independent chain top for a block of size {d}"),
                });
            };
            if !K::EXACT {
                let norm = top.frobenius_norm();
                top = top.scale(&K::from_c64(num_complex::Complex64::new(1.0 / norm, 0.0)));
            }
            tops.push((d, top));
        }
    }

    let chains = tops
        .into_iter()
        .map(|(d, top)| {
            let mut cols = vec![top];
            for _ in 1..d {
                let next = shifted * cols.last().unwrap();
                cols.push(next);
            }
            cols.reverse();
            let parts: Vec<&Matrix<K>> = cols.iter().collect();
            Matrix::hcat(n, &parts).expect("chain columns share the state dimension")
        })
        .collect();
    Ok(chains)
}

/// Full Jordan structure of `A` on top of its eigenstructure.
pub fn jordan_structure<K: Spectral>(
    a: &Matrix<K::Real>,
    eigen: &EigenStructure<K>,
    tol: &ToleranceConfig,
) -> Result<JordanStructure<K>> {
    let n = eigen.n;
    let ak: Matrix<K> = a.map(|x| K::from_real(x.clone()));
    let a_norm = ak.frobenius_norm().max(1.0);
    let groups = &eigen.groups;
    let mut block_sizes: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    let mut chains: Vec<Vec<Matrix<K>>> = vec![Vec::new(); groups.len()];

    for i in eigen.representatives() {
        let g = &groups[i];
        let label = describe(&g.value);
        let shifted = ak.shifted(&g.value);
        let weyr = weyr_characteristic(&shifted, g.algebraic_multiplicity, tol).map_err(|e| match e {
            Error::DefectiveStructure { detail, .. } => Error::DefectiveStructure {
                eigenvalue: label.clone(),
                detail,
            },
            other => other,
        })?;
        if weyr[0] != g.geometric_multiplicity {
            return Err(Error::DefectiveStructure {
                eigenvalue: label,
                detail: format!(
                    "{} blocks from the rank sequence but geometric multiplicity {}",
                    weyr[0], g.geometric_multiplicity
                ),
            });
        }
        let sizes = block_sizes_from_weyr(&weyr);
        let group_chains = build_chains(&shifted, &sizes, tol, &label)?;
        for (chain, &m) in group_chains.iter().zip(&sizes) {
            let lhs = &ak * chain;
            let rhs = chain * &jordan_block(&g.value, m);
            let residual = (&lhs - &rhs).frobenius_norm();
            let ok = if K::EXACT {
                residual == 0.0 && (&lhs - &rhs).is_zero()
            } else {
                residual <= CHAIN_RESIDUAL_TOL * a_norm * chain.frobenius_norm()
            };
            if !ok {
                return Err(Error::DefectiveStructure {
                    eigenvalue: label,
                    detail: format!("chain residual {residual:.3e}"),
                });
            }
        }
        block_sizes[i] = sizes;
        chains[i] = group_chains;
    }
    for i in eigen.representatives() {
        if let Some(p) = groups[i].conjugate_partner {
            block_sizes[p] = block_sizes[i].clone();
            chains[p] = chains[i].iter().map(Matrix::conj).collect();
        }
    }

    let parts: Vec<&Matrix<K>> = chains.iter().flatten().collect();
    let transform = Matrix::hcat(n, &parts)?;
    let transform_inverse = transform.inverse(tol.rank_tol).map_err(|_| Error::DefectiveStructure {
        eigenvalue: "spectrum".into(),
        detail: "assembled transform is singular".into(),
    })?;
    let check = &(&transform * &transform_inverse) - &Matrix::identity(n);
    let ok = if K::EXACT {
        check.is_zero()
    } else {
        check.max_modulus() <= CHAIN_RESIDUAL_TOL
    };
    if !ok {
        return Err(Error::DefectiveStructure {
            eigenvalue: "spectrum".into(),
            detail: format!("‖T·T⁻¹ − I‖ = {:.3e}", check.max_modulus()),
        });
    }

    Ok(JordanStructure {
        eigen: eigen.clone(),
        block_sizes,
        chains,
        transform,
        transform_inverse,
    })
}
