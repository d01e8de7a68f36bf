//! Single-input diagonalizable case: the Kalman determinant in closed form.

use minctrl::matcore::{format_rational, Matrix, Rational, RankRevealing, Scalar};
use minctrl::verify::{kalman_matrix, vandermonde_det_exact};

fn main() -> minctrl::Result<()> {
    let lambdas = [-1, 2, 5];
    let bhat = [1, 3, -2];
    // T⁻¹ unimodular, so A = T⁻¹ΛT has integer entries.
    let t_inv = Matrix::<Rational>::from_i64(3, 3, &[1, 1, 0, 0, 1, 1, 0, 0, 1]);
    let t = t_inv.inverse(0.0)?;
    let lam = Matrix::diagonal(&lambdas.map(Rational::from_i64));
    let a = &(&t_inv * &lam) * &t;
    let b = &t_inv * &Matrix::from_i64(3, 1, &bhat);

    let det = Rational::det_of(&kalman_matrix(&a, &b)?);
    let closed = vandermonde_det_exact(
        &lambdas.map(Rational::from_i64),
        &bhat.map(Rational::from_i64),
        &Rational::det_of(&t_inv),
    );
    println!("det of Kalman matrix: {}", format_rational(&det));
    println!("closed form:          {}", format_rational(&closed));
    Ok(())
}
