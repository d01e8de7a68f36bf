use num_complex::Complex64;
use serde::Serialize;

use super::charpoly::{characteristic_polynomial, exact_roots};
use crate::error::{Error, Result};
use crate::matcore::{Field, GaussRational, Matrix, Rational, Scalar, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenKind {
    Real,
    Complex,
}

/// One distinct eigenvalue with its multiplicities and left eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueGroup<K> {
    pub value: K,
    pub kind: EigenKind,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    /// `n × p` basis of the null space of `λ̄·I − Aᵀ`.
    pub left_basis: Matrix<K>,
    pub conjugate_partner: Option<usize>,
}

/// Distinct eigenvalues of a real matrix, grouped and ordered: real groups
/// ascending, then complex representatives (positive imaginary part) by
/// ascending `(Re, Im)`, then their conjugates in the same order, so the
/// partner of representative `i` sits at `i + k_c/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure<K> {
    pub n: usize,
    pub groups: Vec<EigenvalueGroup<K>>,
    pub k_r: usize,
    pub k_c: usize,
    pub p_max: usize,
    /// Smallest distance between distinct eigenvalues, if there are two.
    pub min_gap: Option<f64>,
}

impl<K: Scalar> EigenStructure<K> {
    /// Indices of groups that carry their own Jordan chains: all real groups
    /// and the complex representatives.
    pub fn representatives(&self) -> std::ops::Range<usize> {
        0..self.k_r + self.k_c / 2
    }

    pub fn is_partner(&self, group: usize) -> bool {
        group >= self.k_r + self.k_c / 2
    }

    /// Groups attaining the maximal geometric multiplicity.
    pub fn maximal_groups(&self) -> Vec<usize> {
        (0..self.groups.len())
            .filter(|&i| self.groups[i].geometric_multiplicity == self.p_max)
            .collect()
    }
}

/// Distinct eigenvalues with algebraic multiplicities, as produced by a
/// backend: real values have exactly zero imaginary part; complex values are
/// listed once, by the member with positive imaginary part.
#[derive(Debug, Clone)]
pub struct RawSpectrum<K> {
    pub real: Vec<(K, usize)>,
    pub complex: Vec<(K, usize)>,
    pub min_gap: Option<f64>,
}

/// Fields that can locate the eigenvalues of a real matrix.
pub trait Spectral: Field {
    fn raw_spectrum(a: &Matrix<Self::Real>, tol: &ToleranceConfig) -> Result<RawSpectrum<Self>>;
}

/// Short human-readable rendering of an eigenvalue.
pub fn describe<K: Scalar>(z: &K) -> String {
    let c = z.to_c64();
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im > 0.0 {
        format!("{}+{}i", c.re, c.im)
    } else {
        format!("{}{}i", c.re, c.im)
    }
}

fn min_pairwise_gap(values: &[Complex64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let d = (a - b).norm();
            best = Some(best.map_or(d, |x: f64| x.min(d)));
        }
    }
    best
}

impl Spectral for Complex64 {
    fn raw_spectrum(a: &Matrix<f64>, tol: &ToleranceConfig) -> Result<RawSpectrum<Self>> {
        let n = a.rows();
        let eig = crate::matcore::float::eigenvalues(a).ok_or(Error::NoConvergence { n })?;
        let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let merge = tol.eigen_cluster_tol * radius.max(1.0);

        // Single-linkage clustering by union-find.
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for i in 0..n {
            for j in i + 1..n {
                if (eig[i] - eig[j]).norm() <= merge {
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = root(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = clusters.len();
                clusters.push(Vec::new());
            }
            clusters[slot[r]].push(i);
        }

        let mut gap: Option<f64> = None;
        for (ci, a_members) in clusters.iter().enumerate() {
            for b_members in &clusters[ci + 1..] {
                for &i in a_members {
                    for &j in b_members {
                        let d = (eig[i] - eig[j]).norm();
                        gap = Some(gap.map_or(d, |g: f64| g.min(d)));
                    }
                }
            }
        }

        let limit = 10.0 * merge;
        let mut means = Vec::with_capacity(clusters.len());
        for members in &clusters {
            let mean = members.iter().map(|&i| eig[i]).sum::<Complex64>() / members.len() as f64;
            let diameter = members
                .iter()
                .flat_map(|&i| members.iter().map(move |&j| (i, j)))
                .map(|(i, j)| (eig[i] - eig[j]).norm())
                .fold(0.0, f64::max);
            if diameter > limit {
                return Err(Error::IllConditionedSpectrum {
                    near: describe(&mean),
                    diameter,
                    limit,
                    gap: gap.unwrap_or(f64::INFINITY),
                });
            }
            means.push((mean, members.len()));
        }

        let mut real = Vec::new();
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for (mean, mult) in means {
            if mean.im.abs() <= tol.realness_tol {
                real.push((Complex64::new(mean.re, 0.0), mult));
            } else if mean.im > 0.0 {
                upper.push((mean, mult));
            } else {
                lower.push((mean, mult));
            }
        }
        // Each representative needs a conjugate cluster of equal size.
        for &(z, mult) in &upper {
            let pos = lower
                .iter()
                .position(|&(w, m)| m == mult && (w - z.conj()).norm() <= limit);
            match pos {
                Some(p) => {
                    lower.swap_remove(p);
                }
                None => {
                    return Err(Error::IllConditionedSpectrum {
                        near: describe(&z),
                        diameter: 0.0,
                        limit,
                        gap: gap.unwrap_or(f64::INFINITY),
                    })
                }
            }
        }
        if let Some(&(w, _)) = lower.first() {
            return Err(Error::IllConditionedSpectrum {
                near: describe(&w),
                diameter: 0.0,
                limit,
                gap: gap.unwrap_or(f64::INFINITY),
            });
        }
        Ok(RawSpectrum {
            real,
            complex: upper,
            min_gap: gap,
        })
    }
}

impl Spectral for GaussRational {
    fn raw_spectrum(a: &Matrix<Rational>, _: &ToleranceConfig) -> Result<RawSpectrum<Self>> {
        let p = characteristic_polynomial(a);
        let roots = exact_roots(&p).map_err(|detail| Error::IrrationalSpectrum { detail })?;
        let mut real = Vec::new();
        let mut complex = Vec::new();
        let mut all = Vec::new();
        for r in roots {
            let c = r.value.to_c64();
            all.push(c);
            if num_traits::Zero::is_zero(&r.value.im) {
                real.push((r.value, r.multiplicity));
            } else {
                all.push(c.conj());
                complex.push((r.value, r.multiplicity));
            }
        }
        Ok(RawSpectrum {
            real,
            complex,
            min_gap: min_pairwise_gap(&all),
        })
    }
}

fn lift<K: Field>(a: &Matrix<K::Real>) -> Matrix<K> {
    a.map(|x| K::from_real(x.clone()))
}

/// `λ̄·I − Aᵀ` over `K`.
fn left_pencil<K: Field>(a: &Matrix<K::Real>, lambda: &K) -> Matrix<K> {
    let at = lift::<K>(&a.transpose());
    -&at.shifted(&lambda.conj())
}

fn check_square<S: Scalar>(a: &Matrix<S>) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

/// Dimension of the eigenspace of `A` at `λ`, computed as the nullity of
/// `λ̄·I − Aᵀ`.
pub fn geometric_multiplicity<K: Field>(
    a: &Matrix<K::Real>,
    lambda: &K,
    tol: &ToleranceConfig,
) -> Result<usize> {
    check_square(a)?;
    let n = a.rows();
    let p = n - left_pencil(a, lambda).rank(tol.rank_tol);
    if p == 0 {
        return Err(Error::NotAnEigenvalue {
            value: describe(lambda),
        });
    }
    Ok(p)
}

/// Basis of the left eigenvectors of `A` at `λ`: the null space of
/// `λ̄·I − Aᵀ`.
pub fn left_eigenbasis<K: Field>(a: &Matrix<K::Real>, lambda: &K, tol: &ToleranceConfig) -> Matrix<K> {
    left_pencil(a, lambda).null_space(tol.rank_tol)
}

/// Groups the eigenvalues of `A` and attaches geometric multiplicities and
/// left eigenbases.
pub fn compute_eigenstructure<K: Spectral>(
    a: &Matrix<K::Real>,
    tol: &ToleranceConfig,
) -> Result<EigenStructure<K>> {
    check_square(a)?;
    let n = a.rows();
    let raw = K::raw_spectrum(a, tol)?;

    let mut real = raw.real;
    real.sort_by(|(x, _), (y, _)| x.to_c64().re.total_cmp(&y.to_c64().re));
    let mut reps = raw.complex;
    reps.sort_by(|(x, _), (y, _)| {
        let (x, y) = (x.to_c64(), y.to_c64());
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });

    let k_r = real.len();
    let half = reps.len();
    let k_c = 2 * half;
    let mut groups = Vec::with_capacity(k_r + k_c);

    let make_group = |value: K, alg: usize, kind: EigenKind, partner: Option<usize>| {
        let left_basis = left_eigenbasis(a, &value, tol);
        let p = left_basis.cols();
        if p == 0 {
            return Err(Error::NotAnEigenvalue {
                value: describe(&value),
            });
        }
        if p > alg {
            return Err(Error::DefectiveStructure {
                eigenvalue: describe(&value),
                detail: format!("geometric multiplicity {p} exceeds algebraic multiplicity {alg}"),
            });
        }
        Ok(EigenvalueGroup {
            value,
            kind,
            algebraic_multiplicity: alg,
            geometric_multiplicity: p,
            left_basis,
            conjugate_partner: partner,
        })
    };

    for (value, alg) in real {
        groups.push(make_group(value, alg, EigenKind::Real, None)?);
    }
    for (i, (value, alg)) in reps.into_iter().enumerate() {
        groups.push(make_group(value, alg, EigenKind::Complex, Some(k_r + half + i))?);
    }
    for i in 0..half {
        let rep = &groups[k_r + i];
        groups.push(EigenvalueGroup {
            value: rep.value.conj(),
            kind: EigenKind::Complex,
            algebraic_multiplicity: rep.algebraic_multiplicity,
            geometric_multiplicity: rep.geometric_multiplicity,
            left_basis: rep.left_basis.conj(),
            conjugate_partner: Some(k_r + i),
        });
    }

    let total: usize = groups.iter().map(|g| g.algebraic_multiplicity).sum();
    if total != n {
        return Err(Error::DefectiveStructure {
            eigenvalue: "spectrum".into(),
            detail: format!("algebraic multiplicities sum to {total}, expected {n}"),
        });
    }
    let p_max = groups
        .iter()
        .map(|g| g.geometric_multiplicity)
        .max()
        .unwrap_or(0);

    Ok(EigenStructure {
        n,
        groups,
        k_r,
        k_c,
        p_max,
        min_gap: raw.min_gap,
    })
}
