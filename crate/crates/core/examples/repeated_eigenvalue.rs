//! A repeated eigenvalue needs two inputs; one column never suffices.

use minctrl::matcore::{GaussRational, Matrix, ToleranceConfig};
use minctrl::synthesis::synthesize_minimal_input;
use minctrl::verify::{kalman_rank, pbh_controllable};

fn main() -> minctrl::Result<()> {
    let tol = ToleranceConfig::default();
    let a = Matrix::from_i64(4, 4, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 3]);

    let single = Matrix::from_i64(4, 1, &[1, 2, 3, 4]);
    let r = kalman_rank(&a, &single, &tol)?.rank;
    println!("one column: Kalman rank {r} of 4");

    let two = Matrix::from_i64(4, 2, &[1, 0, 0, 1, 1, 0, 0, 1]);
    let report = pbh_controllable::<GaussRational>(&a, &two, &tol)?;
    println!("two columns: {:?}", report.verdict);

    let s = synthesize_minimal_input::<GaussRational>(&a, None, &tol)?;
    println!("synthesized width {}, Kalman rank {}", s.b.cols(), kalman_rank(&a, &s.b, &tol)?.rank);
    Ok(())
}
