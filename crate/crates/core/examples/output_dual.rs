//! Minimal output matrix through duality with the transposed system.

use minctrl::matcore::{format_rational, GaussRational, Matrix, ToleranceConfig};
use minctrl::synthesis::synthesize_minimal_output;
use minctrl::verify::{pbh_controllable, pbh_observable};

fn main() -> minctrl::Result<()> {
    let tol = ToleranceConfig::default();
    let a = Matrix::from_i64(3, 3, &[1, 1, 0, 0, 1, 0, 0, 0, 1]);
    let out = synthesize_minimal_output::<GaussRational>(&a, None, &tol)?;
    println!("C ({} x {}):", out.c.rows(), out.c.cols());
    for i in 0..out.c.rows() {
        let row: Vec<String> = out.c.row(i).iter().map(format_rational).collect();
        println!("  [{}]", row.join(", "));
    }
    let obs = pbh_observable::<GaussRational>(&a, &out.c, &tol)?;
    let dual = pbh_controllable::<GaussRational>(&a.transpose(), &out.c.transpose(), &tol)?;
    println!("(A, C): {:?}; (Aᵀ, Cᵀ): {:?}", obs.verdict, dual.verdict);
    Ok(())
}
