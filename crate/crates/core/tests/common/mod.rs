//! Shared test fixtures: a seeded corpus of real matrices with prescribed
//! Jordan data, and an exact rank/determinant oracle written independently
//! of the library's elimination code.

#![allow(dead_code)]

use minctrl::matcore::{Matrix, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// One eigenvalue (or conjugate pair) with its Jordan block sizes.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupSpec {
    Real { value: i64, blocks: Vec<usize> },
    /// Eigenvalues `re ± im·i`, `im > 0`, realised by real Jordan blocks.
    Pair { re: i64, im: i64, blocks: Vec<usize> },
}

impl GroupSpec {
    pub fn dim(&self) -> usize {
        match self {
            GroupSpec::Real { blocks, .. } => blocks.iter().sum(),
            GroupSpec::Pair { blocks, .. } => 2 * blocks.iter().sum::<usize>(),
        }
    }

    /// Geometric multiplicity of each eigenvalue in the group.
    pub fn geometric(&self) -> usize {
        match self {
            GroupSpec::Real { blocks, .. } | GroupSpec::Pair { blocks, .. } => blocks.len(),
        }
    }

    pub fn is_semisimple(&self) -> bool {
        match self {
            GroupSpec::Real { blocks, .. } | GroupSpec::Pair { blocks, .. } => blocks.iter().all(|&b| b == 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub groups: Vec<GroupSpec>,
    pub a: Matrix<Rational>,
    pub p_max: usize,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn has_pair(&self) -> bool {
        self.groups.iter().any(|g| matches!(g, GroupSpec::Pair { .. }))
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.groups.iter().all(GroupSpec::is_semisimple)
    }
}

/// Real Jordan matrix for the prescribed groups.
pub fn real_jordan(groups: &[GroupSpec]) -> Matrix<Rational> {
    let n: usize = groups.iter().map(GroupSpec::dim).sum();
    let mut j = Matrix::<Rational>::zeros(n, n);
    let mut at = 0;
    let set = |j: &mut Matrix<Rational>, r: usize, c: usize, v: i64| j[(r, c)] = q(v);
    for g in groups {
        match g {
            GroupSpec::Real { value, blocks } => {
                for &m in blocks {
                    for k in 0..m {
                        set(&mut j, at + k, at + k, *value);
                        if k + 1 < m {
                            set(&mut j, at + k, at + k + 1, 1);
                        }
                    }
                    at += m;
                }
            }
            GroupSpec::Pair { re, im, blocks } => {
                for &m in blocks {
                    for k in 0..m {
                        let o = at + 2 * k;
                        set(&mut j, o, o, *re);
                        set(&mut j, o, o + 1, -*im);
                        set(&mut j, o + 1, o, *im);
                        set(&mut j, o + 1, o + 1, *re);
                        if k + 1 < m {
                            set(&mut j, o, o + 2, 1);
                            set(&mut j, o + 1, o + 3, 1);
                        }
                    }
                    at += 2 * m;
                }
            }
        }
    }
    j
}

/// Integer matrix with determinant ±1: a row-permuted product of unit lower
/// and unit upper triangular factors with entries in {−1, 0, 1}.
pub fn unimodular(n: usize, rng: &mut ChaCha8Rng) -> Matrix<Rational> {
    let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => q(1),
        std::cmp::Ordering::Greater => q(rng.random_range(-1..=1)),
        std::cmp::Ordering::Less => q(0),
    });
    let u = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => q(1),
        std::cmp::Ordering::Less => q(rng.random_range(-1..=1)),
        std::cmp::Ordering::Greater => q(0),
    });
    let lu = &l * &u;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Matrix::from_fn(n, n, |i, j| lu.row(perm[i])[j].clone())
}

/// Exact inverse by Gauss–Jordan elimination.
pub fn inverse(m: &Matrix<Rational>) -> Matrix<Rational> {
    let n = m.rows();
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.extend((0..n).map(|j| if i == j { q(1) } else { q(0) }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !rows[r][c].is_zero()).expect("singular matrix");
        rows.swap(c, p);
        let pivot = rows[c][c].clone();
        for x in rows[c].iter_mut() {
            *x = &*x / &pivot;
        }
        for r in 0..n {
            if r != c && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                let pivot_row = rows[c].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Matrix::from_rows(rows.into_iter().map(|r| r[n..].to_vec()).collect()).unwrap()
}

/// Rank and determinant (of the leading square part when square) by plain
/// rational Gaussian elimination.
fn eliminate(m: &Matrix<Rational>) -> (usize, Rational) {
    let (nr, nc) = m.shape();
    let mut rows: Vec<Vec<Rational>> = (0..nr).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    let mut det = q(1);
    for c in 0..nc {
        if rank == nr {
            break;
        }
        let Some(p) = (rank..nr).find(|&r| !rows[r][c].is_zero()) else {
            det = q(0);
            continue;
        };
        if p != rank {
            rows.swap(p, rank);
            det = -det;
        }
        let pivot = rows[rank][c].clone();
        det *= &pivot;
        for r in rank + 1..nr {
            if !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        rank += 1;
    }
    if rank < nr {
        det = q(0);
    }
    (rank, det)
}

pub fn exact_rank(m: &Matrix<Rational>) -> usize {
    eliminate(m).0
}

pub fn exact_det(m: &Matrix<Rational>) -> Rational {
    assert!(m.is_square());
    eliminate(m).1
}

/// `[B AB … A^{n−1}B]` assembled column by column.
pub fn kalman(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Matrix<Rational> {
    let n = a.rows();
    let mut cols = Vec::new();
    let mut cur = b.clone();
    for _ in 0..n {
        cols.push(cur.clone());
        cur = a * &cur;
    }
    Matrix::from_fn(n, n * b.cols(), |i, j| cols[j / b.cols()].row(i)[j % b.cols()].clone())
}

pub fn kalman_rank_oracle(a: &Matrix<Rational>, b: &Matrix<Rational>) -> usize {
    exact_rank(&kalman(a, b))
}

pub fn random_int_matrix(rows: usize, cols: usize, range: i64, rng: &mut ChaCha8Rng) -> Matrix<Rational> {
    Matrix::from_fn(rows, cols, |_, _| q(rng.random_range(-range..=range)))
}

pub fn max_abs_entry(m: &Matrix<Rational>) -> BigInt {
    m.data()
        .iter()
        .map(|x| x.numer().abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

/// Main-group patterns cycled through the corpus so that each appears.
const PATTERNS: [&[usize]; 8] = [&[1], &[1, 1], &[1, 1, 1], &[2], &[2, 1], &[3, 1], &[2, 2], &[1, 1, 1, 1]];

struct Values {
    real: Vec<i64>,
    pairs: Vec<(i64, i64)>,
}

impl Values {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut real: Vec<i64> = (-4..=4).collect();
        real.shuffle(rng);
        let mut pairs: Vec<(i64, i64)> = (-2..=2).flat_map(|re| (1..=2).map(move |im| (re, im))).collect();
        pairs.shuffle(rng);
        Self { real, pairs }
    }

    fn real(&mut self) -> i64 {
        self.real.pop().expect("enough distinct real values")
    }

    fn pair(&mut self) -> (i64, i64) {
        self.pairs.pop().expect("enough distinct complex values")
    }
}

/// Prescribed Jordan data for instance `index`: a main group with one of
/// the patterns, half of the time as a complex pair, padded with smaller
/// groups up to a random size `n ≤ 8`.
fn groups_for(index: usize, rng: &mut ChaCha8Rng) -> Vec<GroupSpec> {
    let mut values = Values::new(rng);
    let pattern = PATTERNS[index % PATTERNS.len()].to_vec();
    let as_pair = index % 3 == 2 && 2 * pattern.iter().sum::<usize>() <= 8;
    let main = if as_pair {
        let (re, im) = values.pair();
        GroupSpec::Pair { re, im, blocks: pattern }
    } else {
        GroupSpec::Real {
            value: values.real(),
            blocks: pattern,
        }
    };
    let mut dim = main.dim();
    let mut groups = vec![main];
    let target = rng.random_range(dim.max(2)..=8);
    while dim < target {
        let room = target - dim;
        let extra = match rng.random_range(0..4) {
            0 if room >= 2 => {
                let (re, im) = values.pair();
                GroupSpec::Pair { re, im, blocks: vec![1] }
            }
            1 if room >= 2 => GroupSpec::Real {
                value: values.real(),
                blocks: if rng.random_bool(0.5) { vec![2] } else { vec![1, 1] },
            },
            _ => GroupSpec::Real {
                value: values.real(),
                blocks: vec![1],
            },
        };
        dim += extra.dim();
        groups.push(extra);
    }
    groups
}

pub fn instance_from_groups(label: String, groups: Vec<GroupSpec>, rng: &mut ChaCha8Rng) -> Instance {
    let j = real_jordan(&groups);
    let p = unimodular(j.rows(), rng);
    let a = &(&p * &j) * &inverse(&p);
    let p_max = groups.iter().map(GroupSpec::geometric).max().unwrap();
    Instance { label, groups, a, p_max }
}

/// `count` instances `A = P·J·P⁻¹`, deterministic in `seed`.
pub fn corpus(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let groups = groups_for(i, &mut rng);
            instance_from_groups(format!("corpus[{i}]"), groups, &mut rng)
        })
        .collect()
}

/// Instances containing at least one complex pair, some of them defective.
pub fn complex_corpus(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut values = Values::new(&mut rng);
            let blocks = match i % 4 {
                0 | 1 => vec![1],
                2 => vec![1, 1],
                _ => vec![2],
            };
            let (re, im) = values.pair();
            let mut groups = vec![GroupSpec::Pair { re, im, blocks }];
            let mut dim = groups[0].dim();
            let target = rng.random_range(dim..=8);
            while dim < target {
                let g = if target - dim >= 2 && rng.random_bool(0.3) {
                    let (re, im) = values.pair();
                    GroupSpec::Pair { re, im, blocks: vec![1] }
                } else {
                    GroupSpec::Real {
                        value: values.real(),
                        blocks: vec![1],
                    }
                };
                dim += g.dim();
                groups.push(g);
            }
            instance_from_groups(format!("complex[{i}]"), groups, &mut rng)
        })
        .collect()
}
