//! JSON renderings of library results. Exact values are written as `p/q`
//! strings, floating values as numbers.

use serde_json::{json, Map, Value};

use super::io::{f64_json, matrix_json, rational_json};
use crate::matcore::{Field, Matrix, ToleranceConfig};
use crate::spectral::{EigenStructure, JordanStructure};
use crate::verify::VerifyReport;

/// Version of every report layout emitted by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

pub fn real_json<K: Field>(x: &K::Real) -> Value {
    if K::EXACT {
        rational_json(&K::real_to_rational(x).expect("exact scalars are rational"))
    } else {
        f64_json(K::from_real(x.clone()).to_c64().re)
    }
}

pub fn scalar_json<K: Field>(z: &K) -> Value {
    json!({ "re": real_json::<K>(&z.re()), "im": real_json::<K>(&z.im()) })
}

pub fn real_matrix_json<K: Field>(m: &Matrix<K::Real>) -> Value {
    matrix_json(m.rows(), m.cols(), m.data().iter().map(real_json::<K>).collect())
}

fn vector_json<K: Field>(m: &Matrix<K>) -> Value {
    Value::Array(m.data().iter().map(scalar_json).collect())
}

pub fn tolerances_json(tol: &ToleranceConfig) -> Value {
    serde_json::to_value(tol).expect("plain numeric fields")
}

pub fn gap_json(gap: Option<f64>) -> Value {
    gap.map_or(Value::Null, f64_json)
}

pub fn groups_json<K: Field>(eigen: &EigenStructure<K>, jordan: Option<&JordanStructure<K>>) -> Value {
    let groups = eigen
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut obj = Map::new();
            obj.insert("index".into(), i.into());
            obj.insert("value".into(), scalar_json(&g.value));
            obj.insert("kind".into(), serde_json::to_value(g.kind).expect("unit enum"));
            obj.insert("algebraic_multiplicity".into(), g.algebraic_multiplicity.into());
            obj.insert("geometric_multiplicity".into(), g.geometric_multiplicity.into());
            if let Some(j) = jordan {
                obj.insert("block_sizes".into(), json!(j.block_sizes[i]));
            }
            obj.insert(
                "conjugate_partner".into(),
                g.conjugate_partner.map_or(Value::Null, Value::from),
            );
            Value::Object(obj)
        })
        .collect();
    Value::Array(groups)
}

pub fn verify_json<K: Field>(report: &VerifyReport<K>) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "eigenvalue": scalar_json(&c.eigenvalue),
                "geometric_multiplicity": c.geometric_multiplicity,
                "pencil_rank": c.pencil_rank,
                "lemma2_rank": c.lemma2_rank,
                "passes": c.passes,
            })
        })
        .collect();
    let witnesses: Vec<Value> = report
        .witnesses
        .iter()
        .map(|w| json!({ "eigenvalue": scalar_json(&w.eigenvalue), "vector": vector_json(&w.vector) }))
        .collect();
    json!({
        "verdict": report.verdict,
        "n": report.n,
        "pbh": report.checks.iter().all(|c| c.passes),
        "lemma2": report.checks.iter().all(|c| c.lemma2_rank == c.geometric_multiplicity),
        "kalman_rank": report.kalman.rank,
        "kalman_near_threshold": report.kalman.near_threshold,
        "oracles_agree": report.oracles_agree,
        "checks": checks,
        "witnesses": witnesses,
    })
}
