//! Extensions of Hodge type: adjoin acyclic pairs `w, z` with `Dw = z`, extend the orientation,
//! and rebuild the decomposition until a Hodge decomposition exists.

use serde::Serialize;

use crate::algebra::{build_truncated_free, tensor_product, Cdga, FreeGenerator, FreePresentation};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::graded::GradedMap;
use crate::hodge::{
    check_hodge, coexact_radical, h_orthogonalize, hodge_from_rho, middle_degree_obstruction, solve_twist, twisted,
    HodgeData, TwistSolution,
};
use crate::homology::homology;
use crate::linalg::{self, CoordinateSystem, Echelon, Matrix, Vector};
use crate::morphism::{check_morphism, MorphismReport};
use crate::orientation::{pairing_from_orientation, CyclicPairing, Orientation};

/// One adjoined pair `Dw = z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjoinedPair {
    pub w: String,
    pub z: String,
    pub level: usize,
}

/// One tensoring round at a level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    pub level: usize,
    /// `dim E^l`, the number of pairs adjoined.
    pub pairs: usize,
    /// `dim E^{n−l}` before and after; equal once `(C^⊥∩C)^{n−l}` has stopped shrinking.
    #[serde(rename = "partnerBefore")]
    pub partner_before: usize,
    #[serde(rename = "partnerAfter")]
    pub partner_after: usize,
}

/// Algebra with orientation, an H-orthogonal decomposition, a complement `E` of `C^⊥∩C` in `C`
/// and `ρ` on the levels already processed.
#[derive(Clone, Debug)]
pub struct ExtensionState {
    pub algebra: Cdga,
    pub orientation: Orientation,
    pub pairing: CyclicPairing,
    pub hodge: HodgeData,
    pub complement: Vec<Vec<Vector>>,
    /// `rho[d][k] = ρ(E^d_k)` for processed levels, empty otherwise.
    pub rho: Vec<Vec<Vector>>,
    /// Levels `⌈n/2⌉..level` carry `ρ`.
    pub level: usize,
    /// Original algebra into the current one.
    pub inclusion: GradedMap,
    /// Current algebra onto the original one, killing adjoined generators.
    pub retraction: GradedMap,
    pub adjoined: Vec<AdjoinedPair>,
    pub rounds: Vec<Round>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Entry {
    /// The input already has a Hodge decomposition.
    AlreadyHodge,
    /// Middle degree twisted first, then levels above the middle.
    MiddleTwist,
    /// Middle degree infeasible; generators adjoined at `⌈n/2⌉` (needs `V¹ = 0`).
    MiddleLevel,
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub algebra: Cdga,
    pub orientation: Orientation,
    pub hodge: HodgeData,
    pub inclusion: GradedMap,
    pub retraction: GradedMap,
    pub entry: Entry,
    pub adjoined: Vec<AdjoinedPair>,
    pub rounds: Vec<Round>,
    /// Some adjoined generator has degree 1.
    pub degree_one: bool,
    pub certificate: ExtensionCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionCertificate {
    pub hodge: bool,
    pub inclusion: MorphismReport,
    pub retraction: MorphismReport,
    #[serde(rename = "retractionAfterInclusionIsIdentity")]
    pub retraction_after_inclusion: bool,
}

impl ExtensionCertificate {
    pub fn all_pass(&self) -> bool {
        self.hodge && self.inclusion.all_pass() && self.retraction.all_pass() && self.retraction_after_inclusion
    }
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

fn fam(f: &[Vec<Vector>], d: usize) -> Vec<Vector> {
    f.get(d).cloned().unwrap_or_default()
}

/// Complement of `K` in `C` per degree: scan `C` in order.
pub fn default_complement(a: &Cdga, hd: &HodgeData, radical: &[Vec<Vector>]) -> Vec<Vec<Vector>> {
    let field = a.field();
    (0..=a.max_degree())
        .map(|d| {
            let k = fam(radical, d);
            let cs = hd.coexact(d);
            linalg::extend_greedy(field, a.dim(d), &k, cs).into_iter().map(|i| cs[i].clone()).collect()
        })
        .collect()
}

impl ExtensionState {
    /// State for an H-orthogonal decomposition with no `ρ` yet; `level` is the first level to be
    /// processed.
    pub fn new(a: &Cdga, or: &Orientation, hd: HodgeData, level: usize) -> Result<ExtensionState> {
        let p = pairing_from_orientation(a, or);
        let rep = check_hodge(a.complex(), Some(&p), &hd);
        if !(rep.direct_sum && rep.h_orthogonal) {
            return Err(Error::Precondition(format!("decomposition is not H-orthogonal: {}", rep.problems.join("; "))));
        }
        let k = coexact_radical(a.complex(), &p, &hd);
        let complement = default_complement(a, &hd, &k);
        let top = a.max_degree();
        Ok(ExtensionState {
            algebra: a.clone(),
            orientation: or.clone(),
            pairing: p,
            hodge: hd,
            complement,
            rho: vec![Vec::new(); top + 1],
            level,
            inclusion: GradedMap::identity(a.field(), &a.dims()),
            retraction: GradedMap::identity(a.field(), &a.dims()),
            adjoined: Vec::new(),
            rounds: Vec::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.orientation.degree()
    }

    pub fn radical(&self) -> Vec<Vec<Vector>> {
        coexact_radical(self.algebra.complex(), &self.pairing, &self.hodge)
    }
}

/// `⟨e₁, ρ(e₂)⟩ = ⟨e₁, e₂⟩` on `E^{n−i} × E^i`, `⟨(C^⊥∩C)^{n−i}, ρ(E^i)⟩ = 0` and `ρ(E^i) ⊂ im D`
/// for `lo ≤ i ≤ hi`.
pub fn check_rho(state: &ExtensionState, hi: usize) -> Result<()> {
    let a = &state.algebra;
    let p = &state.pairing;
    let n = state.degree();
    let k = state.radical();
    for i in ceil_half(n)..=hi.min(n).min(a.max_degree()) {
        let j = n - i;
        let ei = fam(&state.complement, i);
        let ri = fam(&state.rho, i);
        if ri.len() != ei.len() {
            return Err(Error::Verification(format!("ρ is not defined on all of E^{i}")));
        }
        let im = Echelon::from_vectors(a.field(), a.dim(i), &a.complex().boundaries(i));
        if ri.iter().any(|r| !im.contains(r)) {
            return Err(Error::Verification(format!("ρ(E^{i}) is not exact")));
        }
        for e1 in fam(&state.complement, j) {
            for (e2, r2) in ei.iter().zip(&ri) {
                if p.eval(j, &e1, i, r2) != p.eval(j, &e1, i, e2) {
                    return Err(Error::Verification(format!("⟨e₁, ρ(e₂)⟩ ≠ ⟨e₁, e₂⟩ on E^{j} × E^{i}")));
                }
            }
        }
        for c in fam(&k, j) {
            if ri.iter().any(|r| !p.eval(j, &c, i, r).is_zero()) {
                return Err(Error::Verification(format!("⟨(C^⊥∩C)^{j}, ρ(E^{i})⟩ ≠ 0")));
            }
        }
    }
    Ok(())
}

/// Word length and, for a single generator, its index, read off a monomial label.
fn word(label: &str, names: &[String]) -> (usize, Option<usize>) {
    if label == "1" {
        return (0, None);
    }
    let mut len = 0;
    let mut single = None;
    let parts: Vec<&str> = label.split('*').collect();
    for part in &parts {
        let (name, e) = match part.split_once('^') {
            Some((nm, e)) => (nm, e.parse::<usize>().unwrap_or(1)),
            None => (*part, 1),
        };
        len += e;
        if parts.len() == 1 && e == 1 {
            single = names.iter().position(|x| x == name);
        }
    }
    (len, single)
}

/// Vectors minus their `H`-component, so that they pair to zero with `H^{n−d}`.
fn project_off_harmonic(p: &CyclicPairing, hd: &HodgeData, d: usize, dim: usize, vs: Vec<Vector>) -> Result<Vec<Vector>> {
    let n = p.degree();
    if d > n || vs.is_empty() {
        return Ok(vs);
    }
    let field = p.field();
    let hi = hd.harmonic(d);
    let hj = hd.harmonic(n - d);
    let gt = p.gram_between(d, hi, hj).transpose();
    vs.into_iter()
        .map(|c| {
            let rhs: Vector = hj.iter().map(|y| p.eval(d, &c, n - d, y)).collect();
            let x = linalg::solve_linear(&gt, &rhs)
                .ok_or_else(|| Error::Verification(format!("pairing on harmonic vectors is degenerate in degree {d}")))?;
            Ok(linalg::sub_vectors(&c, &linalg::combine(field, dim, &x, hi)))
        })
        .collect()
}

struct RoundOutput {
    next: ExtensionState,
    /// `1 ⊗ z_r` in the new algebra.
    z: Vec<Vector>,
}

/// Tensor with `Λ(w_1..w_m, z_1..z_m)` where `m = dim E^l`, extend the orientation and rebuild
/// `H`, `C`, `E`. `ρ` is carried over unchanged.
fn tensor_round(state: &ExtensionState, l: usize) -> Result<RoundOutput> {
    let v = &state.algebra;
    let field = v.field();
    let n = state.degree();
    let p = &state.pairing;
    let hd = &state.hodge;
    let k = state.radical();
    let e = &state.complement;
    let xi = fam(e, l);
    let m = xi.len();
    let a = n - l;
    let t = (n + 2).max(v.max_degree());

    let offset = state.adjoined.iter().filter(|x| x.level == l).count();
    let mut names = Vec::with_capacity(2 * m);
    for r in 0..m {
        names.push(format!("w{l}_{}", offset + r + 1));
    }
    for r in 0..m {
        names.push(format!("z{l}_{}", offset + r + 1));
    }
    let generators = (0..2 * m)
        .map(|g| {
            let differential = if g < m {
                let mut ex = vec![0u32; 2 * m];
                ex[m + g] = 1;
                vec![(field.one(), ex)]
            } else {
                Vec::new()
            };
            FreeGenerator { name: names[g].clone(), degree: if g < m { l - 1 } else { l }, differential }
        })
        .collect();
    let lambda = build_truncated_free("lambda", &FreePresentation { field, generators, truncation: t })?;
    let tp = tensor_product(v, &lambda, t)?;
    let vh = tp.algebra.clone().with_name(v.name());
    let top = vh.max_degree();
    let lam_names: Vec<String> = names.clone();
    let info: Vec<Vec<(usize, Option<usize>)>> = tp
        .factors
        .iter()
        .map(|fs| fs.iter().map(|&(_, _, j, y)| word(lambda.space().label(j, y), &lam_names)).collect())
        .collect();

    // Orientation: E-coordinates in degree n−l, D(E)-coordinates in degree n−l+1.
    let ea = fam(e, a);
    let gram: Vec<Vec<Scalar>> = ea.iter().map(|x| xi.iter().map(|y| p.eval(a, x, l, y)).collect()).collect();
    let coords_a = {
        let mut basis = hd.harmonic(a).to_vec();
        basis.extend(hd.exact(v.complex(), a));
        let off = basis.len();
        basis.extend(ea.iter().cloned());
        basis.extend(fam(&k, a));
        (CoordinateSystem::new(field, v.dim(a), &basis)?, off)
    };
    let coords_b = if a < v.max_degree() {
        let mut basis = hd.harmonic(a + 1).to_vec();
        let off = basis.len();
        basis.extend(ea.iter().map(|x| v.apply_d(a, x)));
        basis.extend(fam(&k, a).iter().map(|x| v.apply_d(a, x)));
        basis.extend(hd.coexact(a + 1).iter().cloned());
        Some((CoordinateSystem::new(field, v.dim(a + 1), &basis)?, off))
    } else {
        None
    };
    let sign_w = Scalar::sign(field, a + 1);
    let mut functional = Vec::with_capacity(vh.dim(n));
    for (col, &(i, x, j, _)) in tp.factors.get(n).map_or(&[][..], |f| f.as_slice()).iter().enumerate() {
        let (len, single) = info[n][col];
        let value = if j == 0 {
            state.orientation.eval(n, &v.space().basis_vector(i, x))
        } else if len == 1 {
            let g = single.expect("word of length one is a generator");
            let (r, is_w) = if g < m { (g, true) } else { (g - m, false) };
            let ev = v.space().basis_vector(i, x);
            let sum = |coords: Vector, off: usize| {
                (0..ea.len()).fold(field.zero(), |acc, al| &acc + &(&coords[off + al] * &gram[al][r]))
            };
            if !is_w && i == a {
                let (cs, off) = &coords_a;
                sum(cs.coords(&ev).ok_or_else(|| Error::Verification(format!("decomposition of V^{a} is incomplete")))?, *off)
            } else if is_w && i == a + 1 {
                let (cs, off) = coords_b.as_ref().expect("degree n−l+1 exists");
                let c = cs.coords(&ev).ok_or_else(|| Error::Verification(format!("decomposition of V^{} is incomplete", a + 1)))?;
                &sign_w * &sum(c, *off)
            } else {
                field.zero()
            }
        } else {
            field.zero()
        };
        functional.push(value);
    }
    let or_hat = Orientation::new(n, functional)?;
    if !or_hat.check_closed(vh.complex()) {
        return Err(Error::Verification("extended orientation does not vanish on boundaries".into()));
    }
    let incl = &tp.include_left;
    if (0..v.dim(n)).any(|x| {
        let ev = v.space().basis_vector(n, x);
        or_hat.eval(n, &incl.apply(n, &ev)) != state.orientation.eval(n, &ev)
    }) {
        return Err(Error::Verification("extended orientation does not restrict to the original one".into()));
    }
    if (0..vh.dim(n)).any(|c| info[n][c].0 >= 2 && !or_hat.functional()[c].is_zero()) {
        return Err(Error::Verification("orientation is nonzero on word length ≥ 2".into()));
    }
    let ph = pairing_from_orientation(&vh, &or_hat);

    // Harmonic part: H plus whatever the truncation leaves at the top.
    let mut harmonic = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let mut ech = Echelon::from_vectors(field, vh.dim(d), &vh.complex().boundaries(d));
        let mut hs: Vec<Vector> = Vec::new();
        if d <= v.max_degree() {
            for h in hd.harmonic(d) {
                let x = incl.apply(d, h);
                if !ech.insert(&x) {
                    return Err(Error::Verification(format!("harmonic vector becomes exact in degree {d}")));
                }
                hs.push(x);
            }
        }
        for z in vh.complex().cycles(d) {
            if ech.insert(&z) {
                if d <= n + 1 {
                    return Err(Error::Verification(format!("adjoining changed the homology in degree {d}")));
                }
                hs.push(z);
            }
        }
        harmonic.push(hs);
    }

    // Coexact part: C ⊕ π(V ∧ Λ₁w) ⊕ complements of cycles in word length ≥ 2.
    let mut coexact = Vec::with_capacity(top + 1);
    let mut sandwich = Vec::with_capacity(top + 1);
    let hd_h = HodgeData { harmonic: harmonic.clone(), coexact: vec![Vec::new(); top + 1] };
    for d in 0..=top {
        let mut cs: Vec<Vector> = if d <= v.max_degree() { hd.coexact(d).iter().map(|c| incl.apply(d, c)).collect() } else { Vec::new() };
        if d < top {
            let ws: Vec<Vector> = (0..vh.dim(d))
                .filter(|&c| matches!(info[d][c], (1, Some(g)) if g < m))
                .map(|c| vh.space().basis_vector(d, c))
                .collect();
            cs.extend(project_off_harmonic(&ph, &hd_h, d, vh.dim(d), ws)?);
        }
        let upto = cs.len();
        if d < top {
            let max_len = info[d].iter().map(|x| x.0).max().unwrap_or(0);
            for len in 2..=max_len {
                let idx: Vec<usize> = (0..vh.dim(d)).filter(|&c| info[d][c].0 == len).collect();
                if idx.is_empty() {
                    continue;
                }
                let cols: Vec<Vector> = idx.iter().map(|&c| vh.d(d).column(c)).collect();
                let local = Matrix::from_columns(field, vh.dim(d + 1), &cols);
                let ker = linalg::kernel_basis(&local);
                for c in linalg::complement_basis(field, &ker, idx.len())? {
                    cs.push(vh.space().basis_vector(d, idx[c]));
                }
            }
        }
        sandwich.push(cs[..upto].to_vec());
        coexact.push(cs);
    }
    let hd_hat = HodgeData { harmonic, coexact };
    let rep = check_hodge(vh.complex(), Some(&ph), &hd_hat);
    if !(rep.direct_sum && rep.h_orthogonal) {
        return Err(Error::Verification(format!("extended decomposition is not H-orthogonal: {}", rep.problems.join("; "))));
    }
    let k_hat = coexact_radical(vh.complex(), &ph, &hd_hat);

    // E ⊂ Ê ⊂ C ⊕ π(V ∧ Λ₁w).
    let mut complement = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let target = hd_hat.coexact(d).len() - k_hat[d].len();
        let mut ech = Echelon::from_vectors(field, vh.dim(d), &k_hat[d]);
        let mut es = Vec::with_capacity(target);
        if d <= v.max_degree() {
            for x in fam(e, d) {
                let y = incl.apply(d, &x);
                if !ech.insert(&y) {
                    return Err(Error::Verification(format!("E^{d} meets the new radical")));
                }
                es.push(y);
            }
        }
        for c in &sandwich[d] {
            if es.len() >= target {
                break;
            }
            if ech.insert(c) {
                es.push(c.clone());
            }
        }
        if es.len() != target {
            return Err(Error::Verification(format!("no complement of the radical inside the sandwich in degree {d}")));
        }
        complement.push(es);
    }
    for i in ceil_half(n)..l {
        if fam(&complement, i).len() != fam(e, i).len() {
            return Err(Error::Verification(format!("E^{i} changed while adjoining at level {l}")));
        }
    }

    let rho = (0..=top)
        .map(|d| fam(&state.rho, d).iter().map(|r| incl.apply(d, r)).collect())
        .collect();
    let z = (0..m)
        .map(|r| {
            let (dz, iz) = lambda.space().find(&names[m + r]).expect("generator label");
            tp.include_right.apply(dz, &lambda.space().basis_vector(dz, iz))
        })
        .collect();
    let mut adjoined = state.adjoined.clone();
    for r in 0..m {
        adjoined.push(AdjoinedPair { w: names[r].clone(), z: names[m + r].clone(), level: l });
    }
    let next = ExtensionState {
        inclusion: incl.compose(&state.inclusion)?,
        retraction: state.retraction.compose(&tp.retraction_left(v, &lambda))?,
        algebra: vh,
        orientation: or_hat,
        pairing: ph,
        hodge: hd_hat,
        complement,
        rho,
        level: state.level,
        adjoined,
        rounds: state.rounds.clone(),
    };
    Ok(RoundOutput { next, z })
}

/// Processes level `l`: adjoins `dim E^l` pairs, repeating while `(C^⊥∩C)^{n−l}` shrinks, then
/// sets `ρ(ξ_i) = z_i`.
pub fn extend_once(state: &ExtensionState, l: usize) -> Result<ExtensionState> {
    let n = state.degree();
    let lo = ceil_half(n);
    let v1 = state.algebra.max_degree() >= 1 && state.algebra.dim(1) > 0;
    if l < lo || (l == lo && v1) {
        return Err(Error::Precondition(format!(
            "level {l} needs l > ⌈n/2⌉ = {lo}, or l = ⌈n/2⌉ with no degree-one elements"
        )));
    }
    if state.level != l {
        return Err(Error::Precondition(format!("ρ is defined through level {}, not {}", state.level.saturating_sub(1), l - 1)));
    }
    if n.is_multiple_of(2) && l == n / 2 + 1 && v1 && !fam(&state.complement, n / 2).is_empty() {
        return Err(Error::Precondition(format!("E^{} must vanish before level {l} when V¹ ≠ 0", n / 2)));
    }
    let mut cur = state.clone();
    let finish = |mut s: ExtensionState, rho_l: Vec<Vector>| -> Result<ExtensionState> {
        if l < s.rho.len() {
            s.rho[l] = rho_l;
        }
        s.level = l + 1;
        check_rho(&s, l)?;
        Ok(s)
    };
    if l >= n || fam(&cur.complement, l).is_empty() {
        return finish(cur, Vec::new());
    }
    if l < 2 {
        return Err(Error::Precondition("generators of degree 0 cannot be adjoined".into()));
    }
    let a = n - l;
    let bound = fam(&cur.hodge.coexact, a).len();
    let mut rounds = 0;
    loop {
        let before = fam(&cur.complement, a).len();
        let m = fam(&cur.complement, l).len();
        let out = tensor_round(&cur, l)?;
        let mut next = out.next;
        let after = fam(&next.complement, a).len();
        next.rounds.push(Round { level: l, pairs: m, partner_before: before, partner_after: after });
        if after == before {
            if fam(&next.complement, l).len() != m {
                return Err(Error::Verification(format!("E^{l} changed although E^{a} did not")));
            }
            return finish(next, out.z);
        }
        if after < before {
            return Err(Error::Verification(format!("E^{a} shrank from {before} to {after}")));
        }
        rounds += 1;
        if rounds > bound {
            return Err(Error::Verification(format!("radical in degree {a} failed to stabilize after {rounds} rounds")));
        }
        cur = next;
    }
}

fn certify(a: &Cdga, or: &Orientation, s: &ExtensionState, hd: &HodgeData) -> ExtensionCertificate {
    let hodge = check_hodge(s.algebra.complex(), Some(&s.pairing), hd).hodge;
    let inclusion = check_morphism(&s.inclusion, a, Some(or), &s.algebra, Some(&s.orientation), None);
    let retraction = check_morphism(&s.retraction, &s.algebra, Some(&s.orientation), a, Some(or), None);
    let id = s.retraction.compose(&s.inclusion).map(|c| c == GradedMap::identity(a.field(), &a.dims())).unwrap_or(false);
    ExtensionCertificate { hodge, inclusion, retraction, retraction_after_inclusion: id }
}

/// An oriented extension of Hodge type retracting onto `a`, or the middle-degree obstruction.
pub fn extend_to_hodge_type(a: &Cdga, or: &Orientation) -> Result<ExtensionResult> {
    let n = or.degree();
    if homology(a.complex()).dim(0) != 1 {
        return Err(Error::Precondition("homology must be connected".into()));
    }
    let p = pairing_from_orientation(a, or);
    let hd0 = h_orthogonalize(a.complex(), &p, None)?;
    let lo = ceil_half(n);
    let finalize = |s: ExtensionState, hd: HodgeData, entry: Entry| -> Result<ExtensionResult> {
        let certificate = certify(a, or, &s, &hd);
        if !certificate.all_pass() {
            return Err(Error::Verification("extension failed its certificate".into()));
        }
        let degree_one = s.adjoined.iter().any(|x| x.level == 2);
        Ok(ExtensionResult {
            algebra: s.algebra,
            orientation: s.orientation,
            hodge: hd,
            inclusion: s.inclusion,
            retraction: s.retraction,
            entry,
            adjoined: s.adjoined,
            rounds: s.rounds,
            degree_one,
            certificate,
        })
    };
    if let TwistSolution::Solved(t) = solve_twist(a.complex(), &p, &hd0)? {
        let hd = twisted(&hd0, &t);
        let s = ExtensionState::new(a, or, hd0, n + 1)?;
        return finalize(s, hd, Entry::AlreadyHodge);
    }
    let mid = middle_degree_obstruction(a.complex(), &p, &hd0)?;
    let (mut state, entry) = if mid.feasible {
        let hd = twisted(&hd0, mid.twist.as_ref().expect("feasible twist"));
        let mut s = ExtensionState::new(a, or, hd, lo)?;
        if !fam(&s.complement, lo).is_empty() {
            return Err(Error::Verification(format!("E^{lo} is nonzero after the middle twist")));
        }
        s.level = lo + 1;
        (s, Entry::MiddleTwist)
    } else if a.max_degree() < 1 || a.dim(1) == 0 {
        let s = ExtensionState::new(a, or, hd0, lo)?;
        (extend_once(&s, lo)?, Entry::MiddleLevel)
    } else {
        return Err(Error::Obstruction(Box::new(mid.certificate.expect("infeasible middle degree"))));
    };
    for l in state.level..n {
        state = extend_once(&state, l)?;
    }
    let hd = hodge_from_rho(state.algebra.complex(), &state.pairing, &state.hodge, &state.complement, &state.rho)?;
    finalize(state, hd, entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::field::Field;

    #[test]
    fn v2_is_returned_unchanged() {
        let (a, or) = corpus::v2(Field::Rational);
        let r = extend_to_hodge_type(&a, &or).unwrap();
        assert_eq!(r.entry, Entry::AlreadyHodge);
        assert_eq!(r.algebra, a);
        assert!(r.adjoined.is_empty());
        assert!(r.certificate.all_pass());
    }

    #[test]
    fn twisted_pair_gains_one_pair() {
        let (a, or) = corpus::v2_twisted_pair(Field::Rational);
        let r = extend_to_hodge_type(&a, &or).unwrap();
        assert_eq!(r.entry, Entry::MiddleLevel);
        assert_eq!(r.adjoined.len(), 1);
        assert_eq!((r.adjoined[0].w.as_str(), r.adjoined[0].z.as_str()), ("w4_1", "z4_1"));
        assert!(r.certificate.all_pass(), "{:?}", r.certificate);
        assert!(!r.degree_one);
    }

    #[test]
    fn extended_orientation_matches_defining_table() {
        let (a, or) = corpus::v2_twisted_pair(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        let hd = h_orthogonalize(a.complex(), &p, None).unwrap();
        let s = ExtensionState::new(&a, &or, hd, 4).unwrap();
        let xi = s.complement[4].clone();
        assert_eq!(xi.len(), 1);
        let e3 = s.complement[3].clone();
        let next = extend_once(&s, 4).unwrap();
        let vh = &next.algebra;
        let (dz, iz) = vh.space().find("z4_1").unwrap();
        let z = vh.space().basis_vector(dz, iz);
        for e in &e3 {
            let lhs = next.pairing.eval(3, &next.inclusion.apply(3, e), 4, &z);
            assert_eq!(lhs, p.eval(3, e, 4, &xi[0]));
            assert!(!lhs.is_zero());
        }
        let de = a.apply_d(3, &e3[0]);
        let (dw, iw) = vh.space().find("w4_1").unwrap();
        let w = vh.space().basis_vector(dw, iw);
        let lhs = next.pairing.eval(4, &next.inclusion.apply(4, &de), 3, &w);
        let expected = &Scalar::sign(Field::Rational, 4) * &p.eval(3, &e3[0], 4, &xi[0]);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn empty_level_is_a_no_op() {
        let (a, or) = corpus::v2(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        let hd = h_orthogonalize(a.complex(), &p, None).unwrap();
        let s = ExtensionState::new(&a, &or, hd, 5).unwrap();
        let next = extend_once(&s, 5).unwrap();
        assert_eq!(next.algebra, a);
        assert_eq!(next.level, 6);
    }

    #[test]
    fn degree_two_obstruction_is_reported() {
        let (a, or) = corpus::obstruction_n2(Field::Rational);
        match extend_to_hodge_type(&a, &or) {
            Err(Error::Obstruction(ob)) => assert_eq!((ob.degree, ob.partner_degree), (1, 1)),
            other => panic!("expected an obstruction, got {:?}", other.map(|r| r.entry)),
        }
    }

    #[test]
    fn level_below_middle_is_rejected() {
        let (a, or) = corpus::v2(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        let hd = h_orthogonalize(a.complex(), &p, None).unwrap();
        let s = ExtensionState::new(&a, &or, hd, 3).unwrap();
        assert!(matches!(extend_once(&s, 3), Err(Error::Precondition(_))));
    }
}
