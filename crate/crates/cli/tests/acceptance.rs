//! Acceptance suite. Runs without the libtest harness so that every criterion prints exactly one
//! PASS/FAIL line; the process fails if any criterion fails.

use std::io::Write as _;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use cdga::algebra::check_cdga;
use cdga::corpus;
use cdga::document::emit_algebra;
use cdga::extension::extend_to_hodge_type;
use cdga::hodge::{
    check_hodge, degenerate_subspace, h_orthogonalize, hodge_decomposition, homology_pairing_defect, solve_twist,
    standard_homotopy, subcomplex_homology_dims, twisted, verify_homotopy, HodgeData, TwistSolution,
};
use cdga::homology::{classify, homology};
use cdga::linalg;
use cdga::morphism::{check_morphism, is_injective, preserves_pairing};
use cdga::orientation::{check_cyclic, pairing_from_orientation};
use cdga::pipeline::{build_pd_model, pull_back_orientation, Route};
use cdga::random::{random_cyclic_complex, random_hodge, random_pdga, rng, scramble_with_map};
use cdga::small::{small_closure, tree_evaluations, tree_span};
use cdga::{Cdga, Complex, Field, GradedMap, Orientation};
use serde_json::Value;

const Q: Field = Field::Rational;

/// Decompositions and dPD-to-dPD quasi-isomorphisms gathered while the other criteria run.
#[derive(Default)]
struct Collected {
    decompositions: Vec<(String, Complex, HodgeData)>,
    dpd_maps: Vec<(String, GradedMap, Cdga, Orientation, Cdga, Orientation)>,
}

impl Collected {
    fn hodge(&mut self, name: &str, c: &Complex, hd: &HodgeData) {
        self.decompositions.push((name.to_string(), c.clone(), hd.clone()));
    }

    /// Records `f` if both ends are dPD and it passes as an oriented quasi-isomorphism.
    fn map(&mut self, name: &str, f: &GradedMap, a: &Cdga, or_a: &Orientation, b: &Cdga, or_b: &Orientation) {
        if classify(a, or_a).is_dpd
            && classify(b, or_b).is_dpd
            && check_morphism(f, a, Some(or_a), b, Some(or_b), None).all_pass()
        {
            self.dpd_maps.push((name.to_string(), f.clone(), a.clone(), or_a.clone(), b.clone(), or_b.clone()));
        }
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:.2?}, limit {limit:?}"))
}

fn cli(args: &[&str], stdin: &str) -> (i32, Value) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cdga"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v)
}

fn emit(name: &str) -> String {
    let (a, or) = corpus::by_name(name, Q).unwrap();
    emit_algebra(&a, or.as_ref())
}

fn corpus_axioms(col: &mut Collected) -> Outcome {
    for name in ["v1", "v2", "cp2-sum7", "exterior-3-5-7-9-11", "lambda-abc"] {
        let start = Instant::now();
        let (a, or) = corpus::by_name(name, Q).unwrap();
        let or = or.unwrap();
        let p = pairing_from_orientation(&a, &or);
        let c = classify(&a, &or);
        ensure(check_cdga(&a).is_empty(), || format!("{name}: CDGA axioms fail"))?;
        ensure(check_cyclic(a.complex(), Some(&a), &p).is_empty(), || format!("{name}: cyclic axioms fail"))?;
        if name == "lambda-abc" {
            ensure(c.is_pdga && !c.is_dpd, || format!("{name}: expected PDGA, not dPD"))?;
        } else {
            ensure(c.is_dpd, || format!("{name}: not dPD"))?;
        }
        within(start, Duration::from_secs(1), name)?;
        let (code, _) = cli(&["check", "-"], &emit(name));
        ensure(code == 0, || format!("{name}: check exits {code}"))?;
        let hd = hodge_decomposition(a.complex(), &p).map_err(|e| format!("{name}: {e}"))?;
        col.hodge(name, a.complex(), &hd);
    }
    Ok("v1, v2, cp2-sum7, exterior dPD; lambda-abc PDGA only".into())
}

fn homology_reproduction() -> Outcome {
    let start = Instant::now();
    let want = vec![1, 0, 1, 0, 0, 1, 0, 1];
    for (name, a) in [("lambda-abc", corpus::lambda_abc(Q, 9).0), ("v2", corpus::v2(Q).0)] {
        let dims: Vec<usize> = homology(a.complex()).dims().into_iter().take(8).collect();
        ensure(dims == want, || format!("{name}: homology {dims:?}"))?;
    }
    let (cp2, _) = corpus::cp2_sum7(Q);
    let dims = homology(cp2.complex()).dims();
    ensure(dims == vec![1, 0, 7, 0, 1], || format!("cp2-sum7: homology {dims:?}"))?;
    for i in 0..7 {
        for j in 0..7 {
            let v = cp2.mul_basis(2, i, 2, j);
            let ok = if i == j { v.len() == 1 && (v[0] == Q.one() || v[0] == Q.from_i64(-1)) } else { linalg::is_zero_vector(&v) };
            ensure(ok, || format!("cp2-sum7: k{i} k{j} = {v:?}"))?;
        }
    }
    within(start, Duration::from_secs(1), "homology")?;
    Ok("1,0,1,0,0,1,0,1 twice; 1,0,7,0,1 with k_i k_j = δ_ij v".into())
}

fn quasi_isomorphisms() -> Outcome {
    let start = Instant::now();
    let (l, or_l) = corpus::lambda_abc(Q, 9);
    let (v1, or1) = corpus::v1(Q);
    let (v2, or2) = corpus::v2(Q);
    for (name, f, b, or_b) in [("f1", corpus::f1(&l, &v1, 1), &v1, &or1), ("f2", corpus::f2(&l, &v2), &v2, &or2)] {
        let rep = check_morphism(&f, &l, Some(&or_l), b, Some(or_b), Some(7));
        ensure(rep.all_pass(), || format!("{name}: {:?}", rep.problems))?;
    }
    let rep = check_morphism(&corpus::f1(&l, &v1, 2), &l, Some(&or_l), &v1, Some(&or1), Some(7));
    ensure(rep.chain_map && rep.quasi_iso && !rep.orientation_compatible, || "scaled f1 still orientation-compatible".into())?;
    within(start, Duration::from_secs(2), "maps")?;
    Ok("f1, f2 oriented quasi-isos; 2·f1 on c is not".into())
}

fn comm_rel(col: &Collected) -> Outcome {
    for (name, c, hd) in &col.decompositions {
        let hh = standard_homotopy(c, hd).map_err(|e| format!("{name}: {e}"))?;
        let rep = verify_homotopy(c, hd, &hh);
        ensure(rep.all_pass(), || format!("{name}: {:?}", rep.problems))?;
    }
    Ok(format!("{} decompositions", col.decompositions.len()))
}

fn acyclic_radical_equivalence(col: &mut Collected) -> Outcome {
    let (mut counted, mut hodge, mut seed) = (0, 0, 0u64);
    while counted < 200 {
        let (c, p) = random_cyclic_complex(seed, Q).map_err(|e| format!("seed {seed}: {e}"))?;
        seed += 1;
        if homology_pairing_defect(&c, &p).is_some() {
            continue;
        }
        counted += 1;
        let rad = degenerate_subspace(&c, &p);
        let acyclic = subcomplex_homology_dims(&c, &rad, c.max_degree()).map_err(|e| e.to_string())?.iter().all(|&h| h == 0);
        let hd = h_orthogonalize(&c, &p, None).map_err(|e| e.to_string())?;
        let solved = match solve_twist(&c, &p, &hd).map_err(|e| e.to_string())? {
            TwistSolution::Solved(t) => {
                col.hodge(&format!("cyclic-{}", seed - 1), &c, &twisted(&hd, &t));
                true
            }
            TwistSolution::Obstructed(_) => false,
        };
        ensure(acyclic == solved, || format!("seed {}: acyclic {acyclic}, solvable {solved}", seed - 1))?;
        hodge += solved as usize;
    }
    Ok(format!("{counted} complexes ({hodge} Hodge type, {} not), 0 counterexamples", counted - hodge))
}

fn extension_end_to_end(col: &mut Collected) -> Outcome {
    let mut worst = Duration::ZERO;
    let mut largest = 0;
    for seed in 0..20 {
        let start = Instant::now();
        let (a, or) = random_pdga(seed, Q).unwrap();
        let n = or.degree();
        let p = pairing_from_orientation(&a, &or);
        ensure(matches!(hodge_decomposition(a.complex(), &p), Err(cdga::Error::Obstruction(_))), || {
            format!("seed {seed}: input already of Hodge type")
        })?;
        let r = extend_to_hodge_type(&a, &or).map_err(|e| format!("seed {seed}: {e}"))?;
        let ph = pairing_from_orientation(&r.algebra, &r.orientation);
        ensure(check_hodge(r.algebra.complex(), Some(&ph), &r.hodge).hodge, || format!("seed {seed}: output not Hodge"))?;
        let inc = check_morphism(&r.inclusion, &a, Some(&or), &r.algebra, Some(&r.orientation), None);
        let ret = check_morphism(&r.retraction, &r.algebra, Some(&r.orientation), &a, Some(&or), None);
        ensure(inc.all_pass() && ret.all_pass(), || format!("seed {seed}: {:?} {:?}", inc.problems, ret.problems))?;
        let id = r.retraction.compose(&r.inclusion).map_err(|e| e.to_string())?;
        ensure(id == GradedMap::identity(Q, &a.dims()), || format!("seed {seed}: retraction ∘ inclusion ≠ Id"))?;
        ensure(r.algebra.max_degree() == n + 2, || format!("seed {seed}: top degree {}", r.algebra.max_degree()))?;
        let big = r.algebra.dims().into_iter().max().unwrap_or(0);
        ensure(big <= 60, || format!("seed {seed}: {big} dimensions in one degree"))?;
        within(start, Duration::from_secs(30), &format!("seed {seed}"))?;
        col.hodge(&format!("extension-{seed}"), r.algebra.complex(), &r.hodge);
        worst = worst.max(start.elapsed());
        largest = largest.max(big);
    }
    Ok(format!("20 instances, slowest {worst:.2?}, largest degree {largest} dims"))
}

fn dpd_rigidity(col: &mut Collected) -> Outcome {
    // Models whose intermediate algebra is already dPD, and random basis changes of dPD algebras.
    for name in ["v1", "v2", "cp2-sum7", "exterior-3-5-7-9-11"] {
        let (a, or) = corpus::by_name(name, Q).unwrap();
        let or = or.unwrap();
        let m = build_pd_model(&a, &or, Route::Auto).map_err(|e| format!("{name}: {e}"))?;
        col.hodge(&format!("model-{name}"), a.complex(), &m.hodge);
        let s = &m.intermediate;
        col.map(&format!("{name}: S -> V"), &m.legs[0].map, s, &m.intermediate_orientation, &a, &or);
        col.map(&format!("{name}: S -> M"), &m.legs[1].map, s, &m.intermediate_orientation, &m.model, &m.model_orientation);
        for seed in 0..5 {
            let (b, or_b, f) = scramble_with_map(&a, &or, &mut rng(seed)).unwrap();
            col.map(&format!("{name}: basis change {seed}"), &f, &b, &or_b, &a, &or);
        }
    }
    for seed in 0..10 {
        let (a, or) = random_hodge(seed, Q).unwrap();
        let m = build_pd_model(&a, &or, Route::Auto).map_err(|e| format!("hodge seed {seed}: {e}"))?;
        let iso = GradedMap::identity(Q, &m.model.dims());
        col.map(&format!("model {seed}: identity"), &iso, &m.model, &m.model_orientation, &m.model, &m.model_orientation);
        let s_or = pull_back_orientation(&or, &m.legs[0].map, &m.intermediate).map_err(|e| e.to_string())?;
        col.map(&format!("model {seed}: S -> M"), &m.legs[1].map, &m.intermediate, &s_or, &m.model, &m.model_orientation);
    }
    ensure(col.dpd_maps.len() >= 20, || format!("only {} dPD quasi-isomorphisms collected", col.dpd_maps.len()))?;
    for (name, f, a, or_a, b, or_b) in &col.dpd_maps {
        ensure(preserves_pairing(f, a, or_a, b, or_b), || format!("{name}: pairing not preserved"))?;
        ensure(is_injective(f), || format!("{name}: not of full column rank"))?;
    }
    Ok(format!("{} maps preserve the pairing and are injective", col.dpd_maps.len()))
}

fn same(field: Field, a: &Cdga, x: &[Vec<Vec<cdga::Scalar>>], y: &[Vec<Vec<cdga::Scalar>>], cap: usize) -> bool {
    (0..=cap.min(a.max_degree())).all(|d| {
        let get = |f: &[Vec<Vec<cdga::Scalar>>]| f.get(d).cloned().unwrap_or_default();
        linalg::same_span(field, a.dim(d), &get(x), &get(y))
    })
}

fn small_subalgebra_trees(col: &mut Collected) -> Outcome {
    let mut instances: Vec<(String, Cdga, Orientation)> = Vec::new();
    for name in ["v2", "exterior-3-5-7-9-11"] {
        let (a, or) = corpus::by_name(name, Q).unwrap();
        instances.push((name.into(), a, or.unwrap()));
    }
    for seed in 0..20 {
        let (a, or) = random_hodge(seed, Q).unwrap();
        instances.push((format!("random-hodge-{seed}"), a, or));
    }
    let mut evaluations = 0;
    for (name, a, or) in &instances {
        let p = pairing_from_orientation(a, or);
        let hd = hodge_decomposition(a.complex(), &p).map_err(|e| format!("{name}: {e}"))?;
        col.hodge(name, a.complex(), &hd);
        let hh = standard_homotopy(a.complex(), &hd).map_err(|e| e.to_string())?;
        let cap = a.max_degree().min(2 * or.degree());
        let (span, complete) = tree_span(a, &hd, &hh, cap);
        ensure(complete, || format!("{name}: tree span incomplete"))?;
        let closure = small_closure(a, &hd, &hh, cap);
        ensure(same(Q, a, &span, &closure.basis, cap), || format!("{name}: tree span ≠ closure span"))?;
        if homology(a.complex()).dim(1) == 0 {
            let ev = tree_evaluations(a, &hd, &hh, cap, 50_000);
            ensure(ev.complete, || format!("{name}: evaluation budget exhausted"))?;
            let bad = ev.degree_bound_violations();
            ensure(bad.is_empty(), || format!("{name}: {} evaluations below the degree bound", bad.len()))?;
            evaluations += ev.len();
        }
    }
    Ok(format!("{} instances agree; {evaluations} nonzero evaluations respect the bound", instances.len()))
}

fn middle_degree_obstruction() -> Outcome {
    let (code, v) = cli(&["hodge", "--middle-only", "-"], &emit("obstruction-n2"));
    ensure(code == 2, || format!("obstruction-n2 exits {code}"))?;
    ensure(v["certificate"].is_object() && v["certificateVerified"] == Value::Bool(true), || "no verified certificate".into())?;
    let gram = &v["certificate"]["restrictedGram"];
    ensure(gram.as_array().is_some_and(|g| !g.is_empty()), || "empty certificate".into())?;
    let (code, v) = cli(&["hodge", "--middle-only", "-"], &emit("v2"));
    ensure(code == 0 && v["feasible"] == Value::Bool(true), || format!("v2 exits {code}"))?;
    Ok("n = 2 instance exits 2 with certificate; v2 feasible".into())
}

fn timed(f: impl FnOnce() -> Outcome) -> (Duration, Outcome) {
    let start = Instant::now();
    let r = f();
    (start.elapsed(), r)
}

fn main() {
    let mut col = Collected::default();
    let mut results: Vec<(&str, Duration, Outcome)> = Vec::new();
    let (t, r) = timed(|| corpus_axioms(&mut col));
    results.push(("corpus axioms", t, r));
    let (t, r) = timed(homology_reproduction);
    results.push(("homology reproduction", t, r));
    let (t, r) = timed(quasi_isomorphisms);
    results.push(("quasi-isomorphisms f1, f2", t, r));
    let (t5, r5) = timed(|| acyclic_radical_equivalence(&mut col));
    let (t6, r6) = timed(|| extension_end_to_end(&mut col));
    let (t7, r7) = timed(|| dpd_rigidity(&mut col));
    let (t8, r8) = timed(|| small_subalgebra_trees(&mut col));
    // Runs after the others so that it sees every decomposition they produced.
    let (t, r) = timed(|| comm_rel(&col));
    results.push(("homotopy relations", t, r));
    results.push(("acyclic radical iff twist solvable", t5, r5));
    results.push(("extension to Hodge type", t6, r6));
    results.push(("dPD quasi-iso rigidity", t7, r7));
    results.push(("tree span equals closure span", t8, r8));
    let (t, r) = timed(middle_degree_obstruction);
    results.push(("middle-degree obstruction", t, r));

    let mut failed = 0;
    for (label, t, r) in &results {
        match r {
            Ok(msg) => println!("PASS  {label:<36} {t:>10.2?}  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {label:<36} {t:>10.2?}  {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria pass", results.len());
}
