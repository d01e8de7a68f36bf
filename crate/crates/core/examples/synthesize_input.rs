//! Builds a real input matrix of minimal width and checks it three ways.

use minctrl::matcore::{format_rational, GaussRational, Matrix, Rational, ToleranceConfig};
use minctrl::synthesis::{synthesize_minimal_input, AlphaAssignment};
use minctrl::verify::{kalman_rank, pbh_controllable};

fn show(m: &Matrix<Rational>) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_rational).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn main() -> minctrl::Result<()> {
    let tol = ToleranceConfig::default();
    // J2(2) ⊕ J1(2) ⊕ J1(-1): eigenvalue 2 has two independent eigenvectors.
    let a = Matrix::from_i64(4, 4, &[2, 1, 0, 0, 0, 2, 0, 0, 0, 0, 2, 0, 0, 0, 0, -1]);

    let s = synthesize_minimal_input::<GaussRational>(&a, None, &tol)?;
    println!("B with every α = 1 ({} columns):", s.b.cols());
    show(&s.b);

    let alphas = AlphaAssignment::random(&s.jordan, 42);
    let r = synthesize_minimal_input::<GaussRational>(&a, Some(&alphas), &tol)?;
    println!("B with random α:");
    show(&r.b);

    for b in [&s.b, &r.b] {
        let report = pbh_controllable::<GaussRational>(&a, b, &tol)?;
        let kalman = kalman_rank(&a, b, &tol)?;
        println!("verdict {:?}, Kalman rank {} of {}", report.verdict, kalman.rank, a.rows());
    }
    Ok(())
}
