//! Minimal number of inputs for a few small matrices.

use minctrl::matcore::{GaussRational, Matrix, Rational, ToleranceConfig};
use minctrl::spectral::{compute_eigenstructure, describe};

fn main() -> minctrl::Result<()> {
    let tol = ToleranceConfig::default();
    let cases: [(&str, Matrix<Rational>); 4] = [
        ("diag(1, 2, 3)", Matrix::from_i64(3, 3, &[1, 0, 0, 0, 2, 0, 0, 0, 3])),
        ("identity(4)", Matrix::identity(4)),
        ("J2(0) ⊕ J1(0)", Matrix::from_i64(3, 3, &[0, 1, 0, 0, 0, 0, 0, 0, 0])),
        ("rotation ⊕ rotation", Matrix::from_i64(4, 4, &[0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0])),
    ];
    for (name, a) in cases {
        let eigen = compute_eigenstructure::<GaussRational>(&a, &tol)?;
        println!("{name}: p_max = {}", eigen.p_max);
        for g in &eigen.groups {
            println!(
                "  λ = {:<8} algebraic {} geometric {}",
                describe(&g.value),
                g.algebraic_multiplicity,
                g.geometric_multiplicity
            );
        }
    }
    Ok(())
}
