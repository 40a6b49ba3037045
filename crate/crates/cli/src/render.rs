//! JSON renderings of core values, with basis vectors named by label.

use cdga::document::{algebra_to_doc, map_to_doc};
use cdga::graded::{GradedMap, GradedSpace};
use cdga::hodge::{HodgeData, TwistObstruction};
use cdga::linalg::Matrix;
use cdga::{Cdga, Error, Orientation, Scalar};
use serde_json::{json, Value};

/// Sparse `[[label, coeff], ...]`.
pub fn vector(space: &GradedSpace, d: usize, v: &[Scalar]) -> Value {
    Value::Array(
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| json!([space.label(d, i), c.to_string()]))
            .collect(),
    )
}

pub fn family(space: &GradedSpace, d: usize, vs: &[Vec<Scalar>]) -> Value {
    Value::Array(vs.iter().map(|v| vector(space, d, v)).collect())
}

/// Families per degree, one array per degree.
pub fn graded_family(space: &GradedSpace, f: &[Vec<Vec<Scalar>>]) -> Value {
    Value::Array(f.iter().enumerate().map(|(d, vs)| family(space, d, vs)).collect())
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array((0..m.cols()).map(|c| json!(m.get(r, c).to_string())).collect())).collect())
}

pub fn algebra(a: &Cdga, or: Option<&Orientation>) -> Value {
    serde_json::to_value(algebra_to_doc(a, or)).expect("documents serialize")
}

pub fn map(f: &GradedMap, source: &Cdga, target: &Cdga) -> Value {
    serde_json::to_value(map_to_doc(f, source, target)).expect("documents serialize")
}

/// Sparse entries `[source, target, coeff]` of a map of any degree shift within one space.
pub fn operator(f: &GradedMap, space: &GradedSpace) -> Value {
    let mut out = Vec::new();
    for d in 0..f.source_dims().len() {
        let Some(t) = f.target_degree(d) else { continue };
        let b = f.block(d);
        for x in 0..b.cols() {
            for y in 0..b.rows() {
                let c = b.get(y, x);
                if !c.is_zero() {
                    out.push(json!([space.label(d, x), space.label(t, y), c.to_string()]));
                }
            }
        }
    }
    Value::Array(out)
}

pub fn hodge(space: &GradedSpace, hd: &HodgeData) -> Value {
    json!({
        "harmonic": graded_family(space, &hd.harmonic),
        "coexact": graded_family(space, &hd.coexact),
    })
}

pub fn obstruction(space: &GradedSpace, ob: &TwistObstruction) -> Value {
    json!({
        "degree": ob.degree,
        "partnerDegree": ob.partner_degree,
        "c": vector(space, ob.degree, &ob.c),
        "cPartner": vector(space, ob.partner_degree, &ob.c_partner),
        "pairing": ob.value.to_string(),
        "restrictedGram": matrix(&ob.restricted_gram),
    })
}

pub fn error(e: &Error) -> Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exitCode": e.exit_code() } })
}
