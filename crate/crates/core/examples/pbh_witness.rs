//! An uncontrollable pair and the left eigenvector that certifies it.

use minctrl::matcore::{GaussRational, Matrix, ToleranceConfig};
use minctrl::spectral::describe;
use minctrl::verify::pbh_controllable;

fn main() -> minctrl::Result<()> {
    let tol = ToleranceConfig::default();
    // Two equal eigenvalues cannot be steered by one input.
    let a = Matrix::from_i64(3, 3, &[3, 0, 0, 0, 3, 0, 0, 0, 5]);
    let b = Matrix::from_i64(3, 1, &[1, 1, 1]);
    let report = pbh_controllable::<GaussRational>(&a, &b, &tol)?;
    println!("verdict: {:?}", report.verdict);
    for c in &report.checks {
        println!(
            "λ = {}: rank [λI − A, B] = {}, rank BᴴX = {} (needs {})",
            describe(&c.eigenvalue),
            c.pencil_rank,
            c.lemma2_rank,
            c.geometric_multiplicity
        );
    }
    for w in &report.witnesses {
        let v: Vec<String> = w.vector.data().iter().map(describe).collect();
        println!("witness at λ = {}: x = ({})", describe(&w.eigenvalue), v.join(", "));
    }
    Ok(())
}
