//! Checking degree-0 maps between algebras.

use serde::Serialize;

use crate::algebra::Cdga;
use crate::graded::GradedMap;
use crate::homology::{homology, Homology};
use crate::linalg::{self, Matrix};
use crate::orientation::{pairing_from_orientation, Orientation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    #[serde(rename = "chainMap")]
    pub chain_map: bool,
    pub multiplicative: bool,
    pub unital: bool,
    #[serde(rename = "quasiIso")]
    pub quasi_iso: bool,
    #[serde(rename = "orientationCompatible")]
    pub orientation_compatible: bool,
    /// Homology was compared in degrees `0..=quasiIsoBound`.
    #[serde(rename = "quasiIsoBound")]
    pub quasi_iso_bound: usize,
    /// Rank of the induced map on homology per compared degree.
    #[serde(rename = "homologyRanks")]
    pub homology_ranks: Vec<usize>,
    pub problems: Vec<String>,
}

impl MorphismReport {
    pub fn all_pass(&self) -> bool {
        self.chain_map && self.multiplicative && self.unital && self.quasi_iso && self.orientation_compatible
    }
}

/// Matrix of `f_*: H^d(A) → H^d(B)` in the representative bases.
pub fn induced_on_homology(f: &GradedMap, ha: &Homology, hb: &Homology, d: usize) -> Option<Matrix> {
    let field = ha.field();
    let cols: Option<Vec<_>> = ha
        .representatives(d)
        .iter()
        .map(|z| {
            if hb.dim(d) == 0 && d > hb.max_degree() {
                return Some(Vec::new());
            }
            hb.class_of(d, &f.apply(d, z))
        })
        .collect();
    Some(Matrix::from_columns(field, hb.dim(d), &cols?))
}

/// Checks chain-map, multiplicativity, unitality, homology isomorphism in degrees
/// `≤ bound` (default: the smaller trusted degree of the two algebras) and `Or_B ∘ f_* = Or_A`.
pub fn check_morphism(
    f: &GradedMap,
    a: &Cdga,
    or_a: Option<&Orientation>,
    b: &Cdga,
    or_b: Option<&Orientation>,
    bound: Option<usize>,
) -> MorphismReport {
    let mut problems = Vec::new();
    let field = a.field();
    let shape_ok = f.shift() == 0 && f.source_dims() == a.dims().as_slice() && f.target_dims() == b.dims().as_slice();
    if !shape_ok {
        return MorphismReport {
            chain_map: false,
            multiplicative: false,
            unital: false,
            quasi_iso: false,
            orientation_compatible: false,
            quasi_iso_bound: 0,
            homology_ranks: Vec::new(),
            problems: vec!["map does not match the dimensions of source and target".into()],
        };
    }
    let top_a = a.max_degree();
    let limit = if a.truncation().is_some() { top_a } else { usize::MAX };

    let mut chain_map = true;
    for d in 0..=top_a {
        if d + 1 > limit {
            break;
        }
        let lhs = if d < top_a { f.block(d + 1).mul(&a.d(d)) } else { Matrix::zeros(field, b.dim(d + 1), a.dim(d)) };
        let rhs = if d <= b.max_degree() { b.d(d).mul(f.block(d)) } else { Matrix::zeros(field, 0, a.dim(d)) };
        let lhs = if d + 1 > b.max_degree() { Matrix::zeros(field, 0, a.dim(d)) } else { lhs };
        if lhs != rhs {
            chain_map = false;
            problems.push(format!("f∘D ≠ D∘f in degree {d}"));
        }
    }

    let mut multiplicative = true;
    'outer: for i in 0..=top_a {
        for j in 0..=top_a {
            if i + j > limit {
                continue;
            }
            for x in 0..a.dim(i) {
                let fx = f.apply(i, &a.space().basis_vector(i, x));
                for y in 0..a.dim(j) {
                    let fy = f.apply(j, &a.space().basis_vector(j, y));
                    let lhs = if i + j <= top_a { f.apply(i + j, &a.mul_basis(i, x, j, y)) } else { b.space().zero(i + j) };
                    let rhs = b.mul(i, &fx, j, &fy);
                    if lhs != rhs {
                        multiplicative = false;
                        problems.push(format!(
                            "f({}∧{}) ≠ f({})∧f({})",
                            a.space().label(i, x),
                            a.space().label(j, y),
                            a.space().label(i, x),
                            a.space().label(j, y)
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }

    let unital = f.apply(0, &a.unit_vector()) == b.unit_vector();
    if !unital {
        problems.push("f(1) ≠ 1".into());
    }

    let ha = homology(a.complex());
    let hb = homology(b.complex());
    let default_bound = a.homology_bound().min(b.homology_bound());
    let q = bound.unwrap_or(default_bound);
    let mut quasi_iso = chain_map;
    let mut ranks = Vec::new();
    for d in 0..=q.min(top_a.max(b.max_degree())) {
        match induced_on_homology(f, &ha, &hb, d) {
            Some(m) => {
                let r = linalg::rank(&m);
                ranks.push(r);
                if !(m.rows() == m.cols() && r == m.rows()) {
                    quasi_iso = false;
                    problems.push(format!("H^{d}: induced map {}×{} of rank {r}", m.rows(), m.cols()));
                }
            }
            None => {
                quasi_iso = false;
                ranks.push(0);
                problems.push(format!("H^{d}: image of a cycle is not a cycle"));
            }
        }
    }

    let orientation_compatible = match (or_a, or_b) {
        (Some(oa), Some(ob)) if oa.degree() == ob.degree() => {
            let n = oa.degree();
            let ok = ha.representatives(n).iter().all(|z| ob.eval(n, &f.apply(n, z)) == oa.eval(n, z));
            if !ok {
                problems.push("Or_B ∘ f_* ≠ Or_A on top homology".into());
            }
            ok
        }
        (Some(_), Some(_)) => {
            problems.push("orientations have different degrees".into());
            false
        }
        _ => {
            problems.push("orientation missing".into());
            false
        }
    };

    MorphismReport {
        chain_map,
        multiplicative,
        unital,
        quasi_iso,
        orientation_compatible,
        quasi_iso_bound: q,
        homology_ranks: ranks,
        problems,
    }
}

/// Whether `⟨f x, f y⟩_B = ⟨x, y⟩_A` for all basis pairs, with both pairings induced by the
/// orientations.
pub fn preserves_pairing(f: &GradedMap, a: &Cdga, or_a: &Orientation, b: &Cdga, or_b: &Orientation) -> bool {
    if or_a.degree() != or_b.degree() {
        return false;
    }
    let n = or_a.degree();
    let pa = pairing_from_orientation(a, or_a);
    let pb = pairing_from_orientation(b, or_b);
    (0..=n).all(|i| {
        let j = n - i;
        (0..a.dim(i)).all(|x| {
            let ex = a.space().basis_vector(i, x);
            let fx = f.apply(i, &ex);
            (0..a.dim(j)).all(|y| {
                let ey = a.space().basis_vector(j, y);
                pb.eval(i, &fx, j, &f.apply(j, &ey)) == pa.eval(i, &ex, j, &ey)
            })
        })
    })
}

/// Whether every degree block of `f` is injective.
pub fn is_injective(f: &GradedMap) -> bool {
    f.blocks().iter().all(|m| linalg::rank(m) == m.cols())
}
