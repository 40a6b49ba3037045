//! One function per subcommand. Each returns the JSON result, a one-line summary and the exit
//! code; hard failures come back as [`Error`].

use std::fmt::Write as _;

use cdga::algebra::check_cdga;
use cdga::corpus;
use cdga::document::{emit_algebra, parse_algebra, parse_map, ParseOptions};
use cdga::extension::extend_to_hodge_type;
use cdga::hodge::{
    check_hodge, h_orthogonalize, hodge_decomposition, middle_degree_obstruction, nondeg_quotient, solve_twist,
    standard_homotopy, twisted, verify_homotopy, TwistSolution,
};
use cdga::homology::{classify, homology};
use cdga::morphism::{check_morphism, is_injective, preserves_pairing};
use cdga::orientation::{check_cyclic, pairing_from_orientation};
use cdga::pipeline::{build_pd_model, Route};
use cdga::small::{harmonic_leaves, small_subalgebra, tree_evaluations, tree_span, verify_closure};
use cdga::{linalg, Cdga, Error, Orientation, Result};
use serde_json::{json, Value};

use crate::render;

pub const CLEAN: i32 = 0;
pub const VERIFICATION: i32 = 1;
pub const OBSTRUCTION: i32 = 2;

/// Evaluations listed by `small --trees` before giving up.
const TREE_BUDGET: usize = 20_000;

pub struct Outcome {
    pub value: Value,
    pub summary: String,
    pub code: i32,
}

impl Outcome {
    fn new(value: Value, summary: String, ok: bool) -> Outcome {
        Outcome { value, summary, code: if ok { CLEAN } else { VERIFICATION } }
    }
}

pub fn load(text: &str, opts: ParseOptions) -> Result<(Cdga, Option<Orientation>)> {
    let (a, or) = parse_algebra(text, opts)?;
    let violations = check_cdga(&a);
    if let Some(v) = violations.first() {
        return Err(Error::Malformed(format!(
            "not a CDGA: {} fails at ({}): {}",
            v.axiom,
            v.witness.join(", "),
            v.detail
        )));
    }
    Ok((a, or))
}

fn oriented(a: &Cdga, or: Option<Orientation>) -> Result<Orientation> {
    or.ok_or_else(|| Error::Precondition(format!("{} carries no orientation", a.name())))
}

fn obstructed(a: &Cdga, e: Error, what: &str) -> Result<Outcome> {
    match e {
        Error::Obstruction(ob) => Ok(Outcome {
            summary: format!(
                "{}: {what} obstructed; twist equation unsolvable in degrees ({}, {})",
                a.name(),
                ob.degree,
                ob.partner_degree
            ),
            value: json!({
                "name": a.name(),
                "feasible": false,
                "obstruction": render::obstruction(a.space(), &ob),
            }),
            code: OBSTRUCTION,
        }),
        other => Err(other),
    }
}

pub fn check(text: &str, opts: ParseOptions) -> Result<Outcome> {
    let (a, or) = parse_algebra(text, opts)?;
    let cdga = check_cdga(&a);
    let mut clean = cdga.is_empty();
    let mut value = json!({
        "name": a.name(),
        "field": a.field().spec(),
        "dims": a.dims(),
        "cdga": { "pass": cdga.is_empty(), "violations": cdga },
    });
    let mut summary = format!("{}: dims {:?}, CDGA axioms {}", a.name(), a.dims(), if cdga.is_empty() { "hold" } else { "FAIL" });
    if let Some(or) = &or {
        let p = pairing_from_orientation(&a, or);
        let cyclic = check_cyclic(a.complex(), Some(&a), &p);
        let c = classify(&a, or);
        clean &= cyclic.is_empty() && c.orientation_closed;
        let _ = write!(
            summary,
            ", cyclic {}, PDGA {}, dPD {}",
            if cyclic.is_empty() { "ok" } else { "FAIL" },
            c.is_pdga,
            c.is_dpd
        );
        value["cyclic"] = json!({ "pass": cyclic.is_empty(), "violations": cyclic });
        value["classification"] = serde_json::to_value(&c).expect("serializable");
    }
    value["clean"] = json!(clean);
    Ok(Outcome::new(value, summary, clean))
}

pub fn homology_cmd(text: &str, opts: ParseOptions) -> Result<Outcome> {
    let (a, or) = load(text, opts)?;
    let h = homology(a.complex());
    let trusted = a.homology_bound();
    let dims: Vec<usize> = h.dims().into_iter().take(trusted + 1).collect();
    let reps: Vec<Value> = (0..dims.len()).map(|d| render::family(a.space(), d, h.representatives(d))).collect();
    let mut value = json!({ "name": a.name(), "dims": dims, "trustedDegree": trusted, "representatives": reps });
    if let Some(or) = &or {
        let n = or.degree();
        let p = pairing_from_orientation(&a, or);
        let grams: Vec<Value> = (0..=n.min(h.max_degree()))
            .map(|i| render::matrix(&p.gram_between(i, h.representatives(i), h.representatives(n - i))))
            .collect();
        value["pairing"] = json!(grams);
    }
    let summary = format!("{}: homology dims {:?} (trusted through degree {trusted})", a.name(), dims);
    Ok(Outcome::new(value, summary, true))
}

pub fn hodge(text: &str, opts: ParseOptions, middle_only: bool) -> Result<Outcome> {
    let (a, or) = load(text, opts)?;
    let or = oriented(&a, or)?;
    let p = pairing_from_orientation(&a, &or);
    let hd0 = h_orthogonalize(a.complex(), &p, None)?;
    if middle_only {
        let m = middle_degree_obstruction(a.complex(), &p, &hd0)?;
        let mut value = json!({
            "name": a.name(),
            "degree": m.degree,
            "partnerDegree": m.partner_degree,
            "feasible": m.feasible,
        });
        if let Some(ob) = &m.certificate {
            value["certificate"] = render::obstruction(a.space(), ob);
            value["certificateVerified"] = json!(ob.verify(a.complex(), &p, &hd0));
        }
        let summary = format!(
            "{}: middle degree pair ({}, {}) {}",
            a.name(),
            m.degree,
            m.partner_degree,
            if m.feasible { "feasible" } else { "infeasible" }
        );
        let code = if m.feasible { CLEAN } else { OBSTRUCTION };
        return Ok(Outcome { value, summary, code });
    }
    match solve_twist(a.complex(), &p, &hd0)? {
        TwistSolution::Solved(t) => {
            let hd = twisted(&hd0, &t);
            let rep = check_hodge(a.complex(), Some(&p), &hd);
            let value = json!({
                "name": a.name(),
                "feasible": true,
                "decomposition": render::hodge(a.space(), &hd),
                "report": rep,
            });
            let summary = format!("{}: Hodge decomposition {}", a.name(), if rep.hodge { "found" } else { "FAILED verification" });
            Ok(Outcome::new(value, summary, rep.hodge))
        }
        TwistSolution::Obstructed(ob) => {
            let verified = ob.verify(a.complex(), &p, &hd0);
            let mut out = obstructed(&a, Error::Obstruction(Box::new(ob)), "Hodge decomposition")?;
            out.value["certificateVerified"] = json!(verified);
            Ok(out)
        }
    }
}

pub fn homotopy(text: &str, opts: ParseOptions) -> Result<Outcome> {
    let (a, or) = load(text, opts)?;
    let or = oriented(&a, or)?;
    let p = pairing_from_orientation(&a, &or);
    let hd = match hodge_decomposition(a.complex(), &p) {
        Ok(hd) => hd,
        Err(e) => return obstructed(&a, e, "homotopy"),
    };
    let hh = standard_homotopy(a.complex(), &hd)?;
    let rep = verify_homotopy(a.complex(), &hd, &hh);
    let value = json!({
        "name": a.name(),
        "decomposition": render::hodge(a.space(), &hd),
        "h": render::operator(&hh.h, a.space()),
        "report": rep,
    });
    let summary = format!(
        "{}: standard homotopy, hD + Dh = ιπ − Id {}, h² = 0 {}",
        a.name(),
        if rep.comm_rel { "holds" } else { "FAILS" },
        if rep.square_zero { "holds" } else { "FAILS" }
    );
    Ok(Outcome::new(value, summary, rep.all_pass()))
}

pub fn small(text: &str, opts: ParseOptions, cap: usize, trees: bool) -> Result<Outcome> {
    let (a, or) = load(text, opts)?;
    let or = oriented(&a, or)?;
    let p = pairing_from_orientation(&a, &or);
    let hd = match hodge_decomposition(a.complex(), &p) {
        Ok(hd) => hd,
        Err(e) => return obstructed(&a, e, "small subalgebra"),
    };
    let (s, hh) = small_subalgebra(&a, &hd, cap)?;
    let closure = verify_closure(&a, &hd, &hh, &s.basis, cap);
    let mut value = json!({
        "name": a.name(),
        "small": s,
        "basis": render::graded_family(a.space(), &s.basis),
        "closure": closure,
    });
    let mut ok = closure.all_pass();
    if trees {
        let (span, complete) = tree_span(&a, &hd, &hh, cap);
        let agree = (0..s.basis.len())
            .all(|d| linalg::same_span(a.field(), a.dim(d), &s.basis[d], span.get(d).map_or(&[][..], |v| v.as_slice())));
        let ev = tree_evaluations(&a, &hd, &hh, cap, TREE_BUDGET);
        let leaves = harmonic_leaves(&a, &hd);
        let label = |i: usize| format!("h{}_{}", leaves[i].0, leaves[i].1);
        let list: Vec<Value> = ev
            .by_leaves
            .iter()
            .flatten()
            .map(|e| {
                let names: Vec<String> = e.leaves.iter().map(|&i| label(i)).collect();
                json!({
                    "tree": e.tree.serialize_with(&|k| names[k].clone()),
                    "leaves": e.leaves.len(),
                    "degree": e.degree,
                    "value": render::vector(a.space(), e.degree, &e.value),
                })
            })
            .collect();
        let violations = ev.degree_bound_violations().len();
        value["trees"] = json!({
            "leafNames": leaves.iter().map(|(d, i, v)| json!({"name": format!("h{d}_{i}"), "value": render::vector(a.space(), *d, v)})).collect::<Vec<_>>(),
            "evaluations": list,
            "complete": ev.complete,
            "spanComplete": complete,
            "spanMatchesClosure": agree,
            "degreeBoundViolations": violations,
        });
        ok &= agree;
    }
    let summary = format!(
        "{}: small subalgebra dims {:?} up to degree {}{}",
        a.name(),
        s.dims,
        s.cap,
        if s.cap_hits.is_empty() { String::new() } else { format!(", cap hit in degrees {:?}", s.cap_hits) }
    );
    Ok(Outcome::new(value, summary, ok))
}

pub fn extend(text: &str, opts: ParseOptions) -> Result<Outcome> {
    let (a, or) = load(text, opts)?;
    let or = oriented(&a, or)?;
    let r = match extend_to_hodge_type(&a, &or) {
        Ok(r) => r,
        Err(e) => return obstructed(&a, e, "extension"),
    };
    let ok = r.certificate.all_pass();
    let value = json!({
        "name": a.name(),
        "entry": r.entry,
        "adjoined": r.adjoined,
        "rounds": r.rounds,
        "degreeOneGenerators": r.degree_one,
        "algebra": render::algebra(&r.algebra, Some(&r.orientation)),
        "decomposition": render::hodge(r.algebra.space(), &r.hodge),
        "inclusion": render::map(&r.inclusion, &a, &r.algebra),
        "retraction": render::map(&r.retraction, &r.algebra, &a),
        "certificate": r.certificate,
    });
    let summary = format!(
        "{}: extended by {} generator pairs to dims {:?}, certificate {}",
        a.name(),
        r.adjoined.len(),
        r.algebra.dims(),
        if ok { "passes" } else { "FAILS" }
    );
    Ok(Outcome::new(value, summary, ok))
}

pub fn model(text: &str, opts: ParseOptions, route: Route) -> Result<Outcome> {
    let (a, or) = load(text, opts)?;
    let or = oriented(&a, or)?;
    let m = match build_pd_model(&a, &or, route) {
        Ok(m) => m,
        Err(e) => return obstructed(&a, e, "model"),
    };
    let (s, or_s) = (&m.intermediate, &m.intermediate_orientation);
    let (first_src, first_tgt) = match m.route {
        Route::Extend => ((&a, &or), (s, or_s)),
        _ => ((s, or_s), (&a, &or)),
    };
    let legs: Vec<Value> = m
        .legs
        .iter()
        .enumerate()
        .map(|(k, leg)| {
            let (src, tgt) = if k == 0 { (first_src.0, first_tgt.0) } else { (s, &m.model) };
            json!({
                "name": leg.name,
                "source": src.name(),
                "target": tgt.name(),
                "map": render::map(&leg.map, src, tgt),
                "report": leg.report,
            })
        })
        .collect();
    let h = homology(m.model.complex());
    let ok = m.all_pass();
    let mut value = json!({
        "name": a.name(),
        "route": m.route.to_string(),
        "intermediate": render::algebra(s, Some(or_s)),
        "model": render::algebra(&m.model, Some(&m.model_orientation)),
        "homologyDims": h.dims(),
        "legs": legs,
        "classification": m.classification,
        "finite": m.finite,
        "verified": ok,
    });
    if let Some(sm) = &m.small {
        value["small"] = serde_json::to_value(sm).expect("serializable");
    }
    if let Some(ext) = &m.extension {
        value["extension"] = serde_json::to_value(ext).expect("serializable");
    }
    let summary = format!(
        "{}: {} route, model dims {:?}, homology {:?}, zig-zag {}",
        a.name(),
        m.route,
        m.model.dims(),
        h.dims(),
        if ok { "verified" } else { "FAILS verification" }
    );
    Ok(Outcome::new(value, summary, ok))
}

pub fn verify_map(a_text: &str, b_text: &str, map_text: &str, opts: ParseOptions) -> Result<Outcome> {
    let (a, or_a) = load(a_text, opts)?;
    let (b, or_b) = load(b_text, opts)?;
    let f = parse_map(map_text, &a, &b)?;
    let rep = check_morphism(&f, &a, or_a.as_ref(), &b, or_b.as_ref(), None);
    let mut value = json!({ "source": a.name(), "target": b.name(), "report": rep });
    let mut ok = rep.chain_map && rep.multiplicative && rep.unital && rep.quasi_iso;
    if let (Some(oa), Some(ob)) = (&or_a, &or_b) {
        ok &= rep.orientation_compatible;
        let dpd = classify(&a, oa).is_dpd && classify(&b, ob).is_dpd;
        if dpd && rep.all_pass() {
            let pres = preserves_pairing(&f, &a, oa, &b, ob);
            let inj = is_injective(&f);
            value["dpd"] = json!({ "preservesPairing": pres, "injective": inj });
            ok &= pres && inj;
        }
    }
    let summary = format!(
        "{} -> {}: chain map {}, multiplicative {}, unital {}, quasi-iso {}, orientation-compatible {}",
        a.name(),
        b.name(),
        rep.chain_map,
        rep.multiplicative,
        rep.unital,
        rep.quasi_iso,
        rep.orientation_compatible
    );
    Ok(Outcome::new(value, summary, ok))
}

pub fn quotient(text: &str, opts: ParseOptions) -> Result<Outcome> {
    let (a, or) = load(text, opts)?;
    let or = oriented(&a, or)?;
    let q = nondeg_quotient(&a, &or)?;
    let value = json!({
        "name": a.name(),
        "quasiIso": q.quasi_iso,
        "nondegenerate": q.nondegenerate,
        "degenerateDims": q.degenerate.iter().map(Vec::len).collect::<Vec<_>>(),
        "algebra": render::algebra(&q.algebra, Some(&q.orientation)),
        "projection": render::map(&q.projection, &a, &q.algebra),
    });
    let summary = format!(
        "{}: quotient by the radical has dims {:?}; projection {} a quasi-isomorphism",
        a.name(),
        q.algebra.dims(),
        if q.quasi_iso { "is" } else { "is not" }
    );
    Ok(Outcome::new(value, summary, true))
}

pub fn examples_list() -> Outcome {
    let list: Vec<Value> = corpus::NAMES.iter().map(|n| json!({ "name": n, "description": corpus::description(n) })).collect();
    Outcome { value: json!(list), summary: format!("{} examples", corpus::NAMES.len()), code: CLEAN }
}

/// The document text itself, so that it can be piped into other subcommands.
pub fn examples_emit(name: &str, opts: ParseOptions) -> Result<String> {
    let field = opts.field.unwrap_or(cdga::Field::Rational);
    let (a, or) = corpus::by_name(name, field)?;
    let text = emit_algebra(&a, or.as_ref());
    if opts.truncation.is_none() {
        return Ok(text);
    }
    let (b, or_b) = parse_algebra(&text, ParseOptions { field: None, truncation: opts.truncation })?;
    Ok(emit_algebra(&b, or_b.as_ref()))
}
