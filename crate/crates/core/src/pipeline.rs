//! Poincaré duality models: `V ← S ↠ Q(S)` through the small subalgebra of a Hodge decomposition,
//! or `V ↪ V̂ ↠ Q(V̂)` through an extension of Hodge type.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::Cdga;
use crate::error::{Error, Result};
use crate::extension::{extend_to_hodge_type, AdjoinedPair, Entry, Round};
use crate::graded::GradedMap;
use crate::hodge::{h_orthogonalize, hodge_decomposition, nondeg_quotient, solve_twist, HodgeData, TwistSolution};
use crate::homology::{classify, homology, Classification};
use crate::morphism::{check_morphism, MorphismReport};
use crate::orientation::{pairing_from_orientation, Orientation};
use crate::small::{small_subalgebra, SmallSubalgebra};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Auto,
    Small,
    Extend,
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Route> {
        match s {
            "auto" => Ok(Route::Auto),
            "small" => Ok(Route::Small),
            "extend" => Ok(Route::Extend),
            other => Err(Error::Malformed(format!("unknown route {other:?}; expected auto, small or extend"))),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Auto => "auto",
            Route::Small => "small",
            Route::Extend => "extend",
        })
    }
}

/// One map of the zig-zag with its verification.
#[derive(Clone, Debug)]
pub struct Leg {
    pub name: String,
    pub map: GradedMap,
    pub report: MorphismReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionSummary {
    pub entry: Entry,
    pub adjoined: Vec<AdjoinedPair>,
    pub rounds: Vec<Round>,
    #[serde(rename = "degreeOneGenerators")]
    pub degree_one: bool,
}

#[derive(Clone, Debug)]
pub struct ModelResult {
    pub route: Route,
    /// `S` or `V̂`.
    pub intermediate: Cdga,
    pub intermediate_orientation: Orientation,
    pub hodge: HodgeData,
    pub model: Cdga,
    pub model_orientation: Orientation,
    /// `S → V` (or `V → V̂`) followed by the projection onto the model.
    pub legs: Vec<Leg>,
    pub classification: Classification,
    pub small: Option<SmallSubalgebra>,
    pub extension: Option<ExtensionSummary>,
    /// `M^{>n} = 0`.
    pub finite: bool,
}

impl ModelResult {
    pub fn all_pass(&self) -> bool {
        self.finite && self.classification.is_dpd && self.legs.iter().all(|l| l.report.all_pass())
    }
}

/// The functional `Or ∘ f` on the degree-`n` part of the source of `f`.
pub fn pull_back_orientation(or: &Orientation, f: &GradedMap, source: &Cdga) -> Result<Orientation> {
    let n = or.degree();
    if n > source.max_degree() {
        return Err(Error::Precondition(format!("source has no degree {n}")));
    }
    let values = (0..source.dim(n)).map(|x| or.eval(n, &f.apply(n, &source.space().basis_vector(n, x)))).collect();
    Orientation::new(n, values)
}

fn quotient_leg(s: &Cdga, or_s: &Orientation, name: &str) -> Result<(Cdga, Orientation, Leg, bool)> {
    let q = nondeg_quotient(s, or_s)?;
    let report = check_morphism(&q.projection, s, Some(or_s), &q.algebra, Some(&q.orientation), None);
    let finite = (q.orientation.degree() + 1..=q.algebra.max_degree()).all(|d| q.algebra.dim(d) == 0);
    let algebra = q.algebra.with_name(name);
    Ok((algebra, q.orientation, Leg { name: format!("{} -> {}", s.name(), name), map: q.projection, report }, finite))
}

/// Builds a dPD model of `a` along the requested route and verifies every map of the zig-zag.
pub fn build_pd_model(a: &Cdga, or: &Orientation, route: Route) -> Result<ModelResult> {
    let c = classify(a, or);
    if !c.orientation_closed {
        return Err(Error::Precondition("orientation does not vanish on boundaries".into()));
    }
    if !(c.homology_connected && c.homology_simply_connected) {
        return Err(Error::Precondition("homology must be connected and simply connected".into()));
    }
    let p = pairing_from_orientation(a, or);
    let chosen = match route {
        Route::Auto => {
            let hd0 = h_orthogonalize(a.complex(), &p, None)?;
            match solve_twist(a.complex(), &p, &hd0)? {
                TwistSolution::Solved(_) => Route::Small,
                TwistSolution::Obstructed(_) => Route::Extend,
            }
        }
        r => r,
    };
    let model_name = format!("M({})", a.name());
    match chosen {
        Route::Small | Route::Auto => {
            let hd = hodge_decomposition(a.complex(), &p)?;
            let (small, _) = small_subalgebra(a, &hd, a.max_degree())?;
            let (s, incl) = small.to_cdga(a, &format!("S({})", a.name()))?;
            let or_s = pull_back_orientation(or, &incl, &s)?;
            let leg_s = Leg {
                name: format!("{} -> {}", s.name(), a.name()),
                report: check_morphism(&incl, &s, Some(&or_s), a, Some(or), None),
                map: incl,
            };
            let (m, or_m, leg_q, finite) = quotient_leg(&s, &or_s, &model_name)?;
            Ok(ModelResult {
                route: Route::Small,
                classification: classify(&m, &or_m),
                intermediate: s,
                intermediate_orientation: or_s,
                hodge: hd,
                model: m,
                model_orientation: or_m,
                legs: vec![leg_s, leg_q],
                small: Some(small),
                extension: None,
                finite,
            })
        }
        Route::Extend => {
            let ext = extend_to_hodge_type(a, or)?;
            let vh = ext.algebra.with_name(&format!("{}^", a.name()));
            let leg_i = Leg {
                name: format!("{} -> {}", a.name(), vh.name()),
                report: ext.certificate.inclusion.clone(),
                map: ext.inclusion,
            };
            let (m, or_m, leg_q, finite) = quotient_leg(&vh, &ext.orientation, &model_name)?;
            Ok(ModelResult {
                route: Route::Extend,
                classification: classify(&m, &or_m),
                intermediate: vh,
                intermediate_orientation: ext.orientation,
                hodge: ext.hodge,
                model: m,
                model_orientation: or_m,
                legs: vec![leg_i, leg_q],
                small: None,
                extension: Some(ExtensionSummary {
                    entry: ext.entry,
                    adjoined: ext.adjoined,
                    rounds: ext.rounds,
                    degree_one: ext.degree_one,
                }),
                finite,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub description: String,
    pub required: usize,
    pub available: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub constraints: Vec<Constraint>,
    /// No necessary condition fails.
    pub satisfiable: bool,
    /// Identity maps exhibit the embeddings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Squares of a basis of `Z²` vanish: `Some(true)` if all do, `Some(false)` if none do.
fn square_pattern(a: &Cdga) -> Option<bool> {
    if a.max_degree() < 2 {
        return None;
    }
    let z = a.complex().cycles(2);
    let vanish: Vec<bool> = z.iter().map(|x| crate::linalg::is_zero_vector(&a.mul(2, x, 2, x))).collect();
    if vanish.iter().all(|&v| v) {
        Some(true)
    } else if vanish.iter().all(|&v| !v) && z.len() == 1 {
        Some(false)
    } else {
        None
    }
}

/// Necessary conditions for dPD quasi-isomorphisms `m1 → probe ← m2`. Such maps are injective,
/// so closed degree-2 vectors with a vanishing square and with a nonvanishing square map to
/// independent closed vectors of the probe.
pub fn verify_no_common_embedding(m1: &Cdga, m2: &Cdga, probe: &Cdga) -> EmbeddingReport {
    let mut constraints = Vec::new();
    let (h1, h2, h3) = (homology(m1.complex()), homology(m2.complex()), homology(probe.complex()));
    let top = h1.max_degree().max(h2.max_degree()).max(h3.max_degree());
    for d in 0..=top {
        let want = h1.dim(d).max(h2.dim(d));
        let same = h1.dim(d) == h2.dim(d) && h2.dim(d) == h3.dim(d);
        if want > 0 || h3.dim(d) > 0 {
            constraints.push(Constraint {
                description: format!("dim H^{d} agrees across all three algebras"),
                required: want,
                available: h3.dim(d),
                holds: same,
            });
        }
    }
    for (name, m) in [("first", m1), ("second", m2)] {
        let need = if m.max_degree() >= 1 { m.dim(1) } else { 0 };
        let have = if probe.max_degree() >= 1 { probe.dim(1) } else { 0 };
        constraints.push(Constraint {
            description: format!("degree 1 of the probe receives degree 1 of the {name} algebra injectively"),
            required: need,
            available: have,
            holds: need <= have,
        });
    }
    let z3 = if probe.max_degree() >= 2 { probe.complex().cycles(2).len() } else { 0 };
    let z1 = if m1.max_degree() >= 2 { m1.complex().cycles(2).len() } else { 0 };
    let z2 = if m2.max_degree() >= 2 { m2.complex().cycles(2).len() } else { 0 };
    let mixed = matches!((square_pattern(m1), square_pattern(m2)), (Some(x), Some(y)) if x != y);
    let need = if mixed { z1 + z2 } else { z1.max(z2) };
    constraints.push(Constraint {
        description: if mixed {
            "closed degree-2 vectors with zero and nonzero squares are independent in the probe".into()
        } else {
            "closed degree-2 vectors embed into closed degree-2 vectors of the probe".into()
        },
        required: need,
        available: z3,
        holds: need <= z3,
    });
    let satisfiable = constraints.iter().all(|c| c.holds);
    let witness = (satisfiable && m1 == probe && m2 == probe).then(|| "identity maps".to_string());
    EmbeddingReport { constraints, satisfiable, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::field::Field;
    use crate::homology::induced_pairing;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn v2_is_its_own_model() {
        let (a, or) = corpus::v2(q());
        let r = build_pd_model(&a, &or, Route::Auto).unwrap();
        assert_eq!(r.route, Route::Small);
        assert!(r.all_pass());
        assert_eq!(r.model.dims(), a.dims());
    }

    #[test]
    fn cohomology_ring_is_its_own_model() {
        let (a, or) = corpus::cp2_sum7(q());
        let r = build_pd_model(&a, &or, Route::Auto).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.model.dims(), a.dims());
    }

    #[test]
    fn lambda_model_is_four_dimensional() {
        let (a, or) = corpus::lambda_abc(q(), 9);
        let r = build_pd_model(&a, &or, Route::Auto).unwrap();
        assert!(r.all_pass(), "{:?}", r.legs.iter().map(|l| &l.report.problems).collect::<Vec<_>>());
        assert_eq!(r.model.dims().iter().sum::<usize>(), 4);
        assert_eq!(homology(r.model.complex()).dims(), vec![1, 0, 1, 0, 0, 1, 0, 1]);
        let (v1, or1) = corpus::v1(q());
        let g_m = induced_pairing(&pairing_from_orientation(&r.model, &r.model_orientation), &homology(r.model.complex()));
        let g_1 = induced_pairing(&pairing_from_orientation(&v1, &or1), &homology(v1.complex()));
        for i in 0..=7 {
            assert_eq!(crate::linalg::rank(g_m.gram_ref(i)), crate::linalg::rank(g_1.gram_ref(i)));
        }
        // Both top classes pair [a] with [c] to 1.
        assert_eq!(g_m.gram_ref(2), g_1.gram_ref(2));
    }

    #[test]
    fn twisted_pair_goes_through_the_extension() {
        let (a, or) = corpus::v2_twisted_pair(q());
        let r = build_pd_model(&a, &or, Route::Auto).unwrap();
        assert_eq!(r.route, Route::Extend);
        assert!(r.all_pass());
        assert!(matches!(build_pd_model(&a, &or, Route::Small), Err(Error::Obstruction(_))));
    }

    #[test]
    fn no_common_embedding_for_v1_v2() {
        let (v1, _) = corpus::v1(q());
        let (v2, _) = corpus::v2(q());
        assert!(!verify_no_common_embedding(&v1, &v2, &v2).satisfiable);
        assert!(!verify_no_common_embedding(&v1, &v2, &v1).satisfiable);
        let r = verify_no_common_embedding(&v1, &v1, &v1);
        assert!(r.satisfiable && r.witness.is_some());
        assert!(verify_no_common_embedding(&v2, &v2, &v2).satisfiable);
    }
}
