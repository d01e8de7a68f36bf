//! Samples the family of all minimal inputs and round-trips one through
//! its parameters.

use minctrl::matcore::{GaussRational, Matrix, ToleranceConfig};
use minctrl::parametrize::{extract_params, sample_minimal, validate_minimal};
use minctrl::spectral::{compute_eigenstructure, jordan_structure};
use minctrl::verify::kalman_rank;

fn main() -> minctrl::Result<()> {
    let tol = ToleranceConfig::default();
    // Rotation block plus a repeated real eigenvalue: p_max = 2.
    let a = Matrix::from_i64(4, 4, &[0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2]);
    let eigen = compute_eigenstructure::<GaussRational>(&a, &tol)?;
    let jordan = jordan_structure(&a, &eigen, &tol)?;

    for (i, b) in sample_minimal(&jordan, 7, 3, &tol)?.iter().enumerate() {
        let params = extract_params(&jordan, b)?;
        let validity = validate_minimal(&jordan, &params, &tol)?;
        let rank = kalman_rank(&a, b, &tol)?.rank;
        println!("sample {i}: {}x{}, parameters {validity:?}, Kalman rank {rank}", b.rows(), b.cols());
    }

    let b = Matrix::from_i64(4, 2, &[1, 0, 0, 0, 1, 0, 0, 1]);
    let validity = validate_minimal(&jordan, &extract_params(&jordan, &b)?, &tol)?;
    println!("hand-picked B: {validity:?}");
    Ok(())
}
