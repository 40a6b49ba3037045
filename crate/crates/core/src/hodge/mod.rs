//! Harmonic/coexact decompositions `V = H ⊕ im D ⊕ C` and twists that make them orthogonal.

mod homotopy;

pub use homotopy::{standard_homotopy, verify_homotopy, HodgeHomotopy, HomotopyReport};

use serde::Serialize;

use crate::algebra::{koszul, quotient, Cdga};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::graded::{Complex, GradedMap};
use crate::homology::homology;
use crate::linalg::{self, CoordinateSystem, Echelon, Matrix, Vector};
use crate::orientation::{pairing_from_orientation, CyclicPairing, Orientation};

/// Bases of a harmonic subspace `H` and a coexact part `C`, per degree. The exact part in degree
/// `d` is `D(C^{d−1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeData {
    pub harmonic: Vec<Vec<Vector>>,
    pub coexact: Vec<Vec<Vector>>,
}

impl HodgeData {
    pub fn harmonic(&self, d: usize) -> &[Vector] {
        self.harmonic.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn coexact(&self, d: usize) -> &[Vector] {
        self.coexact.get(d).map_or(&[], |v| v.as_slice())
    }

    /// `D(C^{d−1})`, a basis of `im D` in degree `d` when the data is a decomposition.
    pub fn exact(&self, complex: &Complex, d: usize) -> Vec<Vector> {
        if d == 0 || d > complex.max_degree() {
            return Vec::new();
        }
        self.coexact(d - 1).iter().map(|c| complex.apply_d(d - 1, c)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeReport {
    /// `V^d = H^d ⊕ D(C^{d−1}) ⊕ C^d` in every degree.
    #[serde(rename = "directSum")]
    pub direct_sum: bool,
    #[serde(rename = "harmonicClosed")]
    pub harmonic_closed: bool,
    #[serde(rename = "hOrthogonal")]
    pub h_orthogonal: bool,
    pub hodge: bool,
    /// `⟨ker D, im D⟩ = 0`.
    #[serde(rename = "cyclesPerpBoundaries")]
    pub cycles_perp_boundaries: bool,
    pub problems: Vec<String>,
}

fn block_is_zero(p: &CyclicPairing, i: usize, xs: &[Vector], ys: &[Vector]) -> bool {
    xs.iter().all(|x| ys.iter().all(|y| p.eval(i, x, p.degree() - i, y).is_zero()))
}

/// Verifies the direct-sum decomposition and, given a pairing, the orthogonality relations.
pub fn check_hodge(complex: &Complex, p: Option<&CyclicPairing>, hd: &HodgeData) -> HodgeReport {
    let field = complex.field();
    let mut problems = Vec::new();
    let mut direct_sum = hd.harmonic.len() == complex.max_degree() + 1 && hd.coexact.len() == complex.max_degree() + 1;
    let mut harmonic_closed = true;
    if !direct_sum {
        problems.push("decomposition does not cover every degree".into());
    }
    for d in 0..=complex.max_degree() {
        let mut all = hd.harmonic(d).to_vec();
        all.extend(hd.exact(complex, d));
        all.extend(hd.coexact(d).iter().cloned());
        if all.len() != complex.dim(d) || !linalg::is_independent(field, complex.dim(d), &all) {
            direct_sum = false;
            problems.push(format!("H ⊕ im D ⊕ C is not a basis in degree {d}"));
        }
        if hd.harmonic(d).iter().any(|h| !linalg::is_zero_vector(&complex.apply_d(d, h))) {
            harmonic_closed = false;
            problems.push(format!("harmonic vector with nonzero differential in degree {d}"));
        }
    }
    let (mut h_orthogonal, mut hodge, mut perp) = (false, false, false);
    if let Some(p) = p {
        let n = p.degree();
        h_orthogonal = true;
        hodge = true;
        perp = true;
        for i in 0..=n {
            let j = n - i;
            if !block_is_zero(p, i, hd.harmonic(i), hd.coexact(j)) || !block_is_zero(p, i, hd.coexact(i), hd.harmonic(j)) {
                h_orthogonal = false;
                problems.push(format!("⟨H, C⟩ ≠ 0 in degrees ({i}, {j})"));
            }
            if !block_is_zero(p, i, hd.coexact(i), hd.coexact(j)) {
                hodge = false;
                problems.push(format!("⟨C, C⟩ ≠ 0 in degrees ({i}, {j})"));
            }
            if !block_is_zero(p, i, &complex.cycles(i), &complex.boundaries(j)) {
                perp = false;
                problems.push(format!("⟨ker D, im D⟩ ≠ 0 in degrees ({i}, {j})"));
            }
        }
        hodge = hodge && h_orthogonal;
    }
    let ok = direct_sum && harmonic_closed;
    HodgeReport {
        direct_sum,
        harmonic_closed,
        h_orthogonal: ok && h_orthogonal,
        hodge: ok && hodge,
        cycles_perp_boundaries: perp,
        problems,
    }
}

/// `V^⊥` per degree: the left kernel of each Gram block, and everything above degree `n`.
pub fn degenerate_subspace(complex: &Complex, p: &CyclicPairing) -> Vec<Vec<Vector>> {
    let n = p.degree();
    (0..=complex.max_degree())
        .map(|d| {
            if d > n {
                complex.space().standard_basis(d)
            } else {
                linalg::kernel_basis(&p.gram(d).transpose())
            }
        })
        .collect()
}

/// Homology dimensions of the subcomplex spanned by `sub` (a `D`-stable family per degree), in
/// degrees `0..=bound`.
pub fn subcomplex_homology_dims(complex: &Complex, sub: &[Vec<Vector>], bound: usize) -> Result<Vec<usize>> {
    let field = complex.field();
    let top = complex.max_degree();
    let systems: Vec<CoordinateSystem> = (0..=top)
        .map(|d| CoordinateSystem::new(field, complex.dim(d), sub.get(d).map_or(&[][..], |v| v.as_slice())))
        .collect::<Result<_>>()?;
    let mut ranks = vec![0usize; top + 2];
    for d in 0..top {
        let cols: Vec<Vector> = sub[d]
            .iter()
            .map(|v| {
                systems[d + 1]
                    .coords(&complex.apply_d(d, v))
                    .ok_or_else(|| Error::Verification(format!("subspace is not D-stable in degree {}", d + 1)))
            })
            .collect::<Result<_>>()?;
        ranks[d] = linalg::span_dim(field, systems[d + 1].len(), &cols);
    }
    Ok((0..=bound.min(top))
        .map(|d| {
            let dim = systems[d].len();
            let incoming = if d == 0 { 0 } else { ranks[d - 1] };
            dim - ranks[d] - incoming
        })
        .collect())
}

/// First degree `i ≤ n` in which the induced pairing on homology is not perfect.
pub fn homology_pairing_defect(complex: &Complex, p: &CyclicPairing) -> Option<usize> {
    let h = homology(complex);
    let n = p.degree();
    (0..=n).find(|&i| {
        let g = p.gram_between(i, h.representatives(i), h.representatives(n - i));
        let r = linalg::rank(&g);
        !(r == g.rows() && r == g.cols())
    })
}

/// Result of passing to `V / V^⊥`.
#[derive(Clone, Debug)]
pub struct NondegQuotient {
    pub algebra: Cdga,
    pub orientation: Orientation,
    pub projection: GradedMap,
    pub degenerate: Vec<Vec<Vector>>,
    /// `H(V^⊥) = 0` in the trusted degrees, equivalently `π_Q` is a quasi-isomorphism there.
    pub quasi_iso: bool,
    pub nondegenerate: bool,
}

pub fn nondeg_quotient(a: &Cdga, or: &Orientation) -> Result<NondegQuotient> {
    let p = pairing_from_orientation(a, or);
    let perp = degenerate_subspace(a.complex(), &p);
    let (q, projection) = quotient(a, &perp, &format!("Q({})", a.name()))?;
    let n = or.degree();
    let kept: Vec<usize> = (0..a.dim(n)).filter(|&i| q.space().find(a.space().label(n, i)).is_some()).collect();
    let values: Vector = kept.iter().map(|&i| or.functional()[i].clone()).collect();
    let orientation = Orientation::new(n, values)?;
    let perp_h = subcomplex_homology_dims(a.complex(), &perp, a.homology_bound())?;
    let nondegenerate = pairing_from_orientation(&q, &orientation).is_nondegenerate();
    if !nondegenerate {
        return Err(Error::Verification("pairing on the quotient is degenerate".into()));
    }
    Ok(NondegQuotient {
        algebra: q,
        orientation,
        projection,
        degenerate: perp,
        quasi_iso: perp_h.iter().all(|&d| d == 0),
        nondegenerate,
    })
}

/// `Id − π_H^⊥` applied to the standard complement of `ker D`, giving a coexact part orthogonal
/// to `H`. Projection happens only in degrees `≤ n`; higher degrees pair with nothing.
pub fn h_orthogonalize(complex: &Complex, p: &CyclicPairing, harmonic: Option<&[Vec<Vector>]>) -> Result<HodgeData> {
    let field = complex.field();
    let n = p.degree();
    let top = complex.max_degree();
    let h = homology(complex);
    let harmonic: Vec<Vec<Vector>> = match harmonic {
        Some(hs) => {
            let mut hs = hs.to_vec();
            hs.resize(top + 1, Vec::new());
            for d in 0..=top {
                let mut ech = Echelon::from_vectors(field, complex.dim(d), h.boundaries(d));
                let independent = hs[d].iter().all(|v| ech.insert(v));
                let closed = hs[d].iter().all(|v| linalg::is_zero_vector(&complex.apply_d(d, v)));
                if !(independent && closed && hs[d].len() == h.dim(d)) {
                    return Err(Error::Precondition(format!("given vectors are not a harmonic subspace in degree {d}")));
                }
            }
            hs
        }
        None => (0..=top).map(|d| h.representatives(d).to_vec()).collect(),
    };
    let mut coexact = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let cycles = complex.cycles(d);
        let c0: Vec<Vector> = linalg::complement_basis(field, &cycles, complex.dim(d))?
            .into_iter()
            .map(|i| complex.space().basis_vector(d, i))
            .collect();
        if d > n || c0.is_empty() {
            coexact.push(c0);
            continue;
        }
        let hi = &harmonic[d];
        let hj = harmonic.get(n - d).map_or(&[][..], |v| v.as_slice());
        let g = p.gram_between(d, hi, hj);
        let r = linalg::rank(&g);
        if !(r == g.rows() && r == g.cols()) {
            return Err(Error::Precondition(format!("induced pairing on homology is degenerate in degree {d}")));
        }
        let gt = g.transpose();
        let projected = c0
            .into_iter()
            .map(|c| {
                let rhs: Vector = hj.iter().map(|y| p.eval(d, &c, n - d, y)).collect();
                let x = linalg::solve_linear(&gt, &rhs).expect("perfect Gram block");
                let shift = linalg::combine(field, complex.dim(d), &x, hi);
                linalg::sub_vectors(&c, &shift)
            })
            .collect();
        coexact.push(projected);
    }
    let hd = HodgeData { harmonic, coexact };
    let rep = check_hodge(complex, Some(p), &hd);
    if !rep.h_orthogonal {
        return Err(Error::Verification(format!("H-orthogonalization failed: {}", rep.problems.join("; "))));
    }
    Ok(hd)
}

/// Witness that `⟨μ(c₁),c₂⟩ + ⟨c₁,μ(c₂)⟩ + ⟨c₁,c₂⟩ = 0` has no solution: `c ∈ C^i` and
/// `c' ∈ C^{n−i}` are orthogonal to `im D^{n−i}` and `im D^i` respectively, so every twist leaves
/// `⟨c, c'⟩` unchanged, yet it is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistObstruction {
    pub degree: usize,
    pub partner_degree: usize,
    pub c: Vector,
    pub c_partner: Vector,
    pub value: Scalar,
    /// Gram matrix `⟨Z_{n−i}, Z_i⟩` of the two twist-invariant subspaces.
    pub restricted_gram: Matrix,
}

impl TwistObstruction {
    /// Re-derives the certificate from the pairing and the decomposition.
    pub fn verify(&self, complex: &Complex, p: &CyclicPairing, hd: &HodgeData) -> bool {
        let (i, j) = (self.degree, self.partner_degree);
        let field = complex.field();
        let in_span = |d: usize, v: &Vector| Echelon::from_vectors(field, complex.dim(d), hd.coexact(d)).contains(v);
        in_span(i, &self.c)
            && in_span(j, &self.c_partner)
            && hd.exact(complex, j).iter().all(|b| p.eval(j, b, i, &self.c).is_zero())
            && hd.exact(complex, i).iter().all(|b| p.eval(i, b, j, &self.c_partner).is_zero())
            && p.eval(i, &self.c, j, &self.c_partner) == self.value
            && !self.value.is_zero()
    }
}

/// A solved twist: `mu[d][k] = μ(C^d_k) ∈ im D^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twist {
    pub mu: Vec<Vec<Vector>>,
}

#[derive(Clone, Debug)]
pub enum TwistSolution {
    Solved(Twist),
    Obstructed(TwistObstruction),
}

/// Solves the twist equation on the degree pair `{i, n−i}` (`i ≤ n − i`), returning `μ` on `C^i`
/// and on `C^{n−i}` as coefficient matrices over `D(C^{i−1})` and `D(C^{n−i−1})`.
fn solve_pair(complex: &Complex, p: &CyclicPairing, hd: &HodgeData, i: usize) -> std::result::Result<(Matrix, Matrix), TwistObstruction> {
    let field = complex.field();
    let n = p.degree();
    let j = n - i;
    let (ci, cj) = (hd.coexact(i), hd.coexact(j));
    let (bi, bj) = (hd.exact(complex, i), hd.exact(complex, j));
    let zero = |rows: usize, cols: usize| Matrix::zeros(field, rows, cols);
    if ci.is_empty() || cj.is_empty() {
        return Ok((zero(ci.len(), bi.len()), zero(cj.len(), bj.len())));
    }
    let gamma_i = p.gram_between(i, &bi, cj);
    let gamma_j = p.gram_between(j, &bj, ci);
    let g = p.gram_between(i, ci, cj);
    let zi = Matrix::from_columns(field, cj.len(), &linalg::kernel_basis(&gamma_i));
    let w = Matrix::from_columns(field, ci.len(), &linalg::kernel_basis(&gamma_j));
    let restricted = w.transpose().mul(&g).mul(&zi);
    if !restricted.is_zero() {
        let (a, b) = (0..restricted.rows())
            .flat_map(|a| (0..restricted.cols()).map(move |b| (a, b)))
            .find(|&(a, b)| !restricted.get(a, b).is_zero())
            .expect("nonzero entry");
        let c = linalg::combine(field, complex.dim(i), &w.column(a), ci);
        let c_partner = linalg::combine(field, complex.dim(j), &zi.column(b), cj);
        return Err(TwistObstruction {
            degree: i,
            partner_degree: j,
            value: restricted.get(a, b).clone(),
            c,
            c_partner,
            restricted_gram: restricted,
        });
    }
    let right_inverse = |w: &Matrix| {
        linalg::solve_matrix(&w.transpose(), &Matrix::identity(field, w.cols())).expect("kernel basis has full rank")
    };
    let solve_rows = |gamma: &Matrix, target: &Matrix| -> Matrix {
        // X Γ = target, with X of shape |C| × |B|.
        linalg::solve_matrix(&gamma.transpose(), &target.transpose())
            .expect("target rows lie in the row space of Γ")
            .transpose()
    };
    if i == j {
        let s = right_inverse(&w);
        let t = s.mul(&w.transpose());
        let a = Matrix::identity(field, ci.len()).sub(&t);
        let half = field.half();
        let pm = a.mul(&g).mul(&a.transpose()).scale(&half).add(&t.mul(&g).mul(&a.transpose())).scale(&field.from_i64(-1));
        let x = solve_rows(&gamma_i, &pm);
        return Ok((x.clone(), x));
    }
    let s = right_inverse(&w);
    let pm = s.mul(&w.transpose()).mul(&g).scale(&field.from_i64(-1));
    let r = g.scale(&field.from_i64(-1)).sub(&pm);
    let sigma = Scalar::sign(field, koszul(i, j));
    let qm = r.transpose().scale(&sigma);
    Ok((solve_rows(&gamma_i, &pm), solve_rows(&gamma_j, &qm)))
}

fn mu_vectors(field: Field, dim: usize, x: &Matrix, basis: &[Vector]) -> Vec<Vector> {
    (0..x.rows()).map(|a| linalg::combine(field, dim, &x.row(a), basis)).collect()
}

/// Degree pairs `(i, n−i)` with `i ≤ n − i`.
fn pairs(n: usize) -> impl Iterator<Item = usize> {
    0..=n / 2
}

/// `μ: C → im D` solving the twist equation in every complementary degree pair, or the first
/// obstruction.
pub fn solve_twist(complex: &Complex, p: &CyclicPairing, hd: &HodgeData) -> Result<TwistSolution> {
    solve_twist_on(complex, p, hd, pairs(p.degree()).collect())
}

fn solve_twist_on(complex: &Complex, p: &CyclicPairing, hd: &HodgeData, lower: Vec<usize>) -> Result<TwistSolution> {
    let field = complex.field();
    let n = p.degree();
    let top = complex.max_degree();
    let mut mu: Vec<Vec<Vector>> = (0..=top).map(|d| vec![complex.space().zero(d); hd.coexact(d).len()]).collect();
    for i in lower {
        let j = n - i;
        match solve_pair(complex, p, hd, i) {
            Err(ob) => return Ok(TwistSolution::Obstructed(ob)),
            Ok((xi, xj)) => {
                if i <= top && !hd.coexact(i).is_empty() {
                    mu[i] = mu_vectors(field, complex.dim(i), &xi, &hd.exact(complex, i));
                }
                if j <= top && !hd.coexact(j).is_empty() && j != i {
                    mu[j] = mu_vectors(field, complex.dim(j), &xj, &hd.exact(complex, j));
                }
            }
        }
    }
    let twist = Twist { mu };
    if let Some((i, a, b)) = twist_residuals(complex, p, hd, &twist).first() {
        return Err(Error::Verification(format!("twist equation fails on C^{i}[{a}], C^{}[{b}]", n - i)));
    }
    Ok(TwistSolution::Solved(twist))
}

/// Basis pairs `(i, a, b)` on which `⟨μ(c^i_a), c^{n−i}_b⟩ + ⟨c^i_a, μ(c^{n−i}_b)⟩ + ⟨c^i_a, c^{n−i}_b⟩`
/// is nonzero, evaluated literally.
pub fn twist_residuals(complex: &Complex, p: &CyclicPairing, hd: &HodgeData, t: &Twist) -> Vec<(usize, usize, usize)> {
    let n = p.degree();
    let mut out = Vec::new();
    for i in 0..=n.min(complex.max_degree()) {
        let j = n - i;
        for (a, c1) in hd.coexact(i).iter().enumerate() {
            for (b, c2) in hd.coexact(j).iter().enumerate() {
                let v = &(&p.eval(i, &t.mu[i][a], j, c2) + &p.eval(i, c1, j, &t.mu[j][b])) + &p.eval(i, c1, j, c2);
                if !v.is_zero() {
                    out.push((i, a, b));
                }
            }
        }
    }
    out
}

/// Reference solver: one unknown per coefficient of `μ(c)` over `D(C^{d−1})` in every degree and
/// one equation per ordered basis pair, solved as a single linear system.
pub fn solve_twist_brute_force(complex: &Complex, p: &CyclicPairing, hd: &HodgeData) -> Option<Twist> {
    let field = complex.field();
    let n = p.degree();
    let top = complex.max_degree();
    let exact: Vec<Vec<Vector>> = (0..=top).map(|d| hd.exact(complex, d)).collect();
    let mut offset = vec![0usize; top + 2];
    for d in 0..=top {
        offset[d + 1] = offset[d] + hd.coexact(d).len() * exact[d].len();
    }
    let unknowns = offset[top + 1];
    let var = |d: usize, a: usize, b: usize| offset[d] + a * exact[d].len() + b;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..=n.min(top) {
        let j = n - i;
        if j > top {
            continue;
        }
        for (a, c1) in hd.coexact(i).iter().enumerate() {
            for (b, c2) in hd.coexact(j).iter().enumerate() {
                let mut row = linalg::zero_vector(field, unknowns);
                for (k, beta) in exact[i].iter().enumerate() {
                    let v = var(i, a, k);
                    row[v] = &row[v] + &p.eval(i, beta, j, c2);
                }
                for (k, beta) in exact[j].iter().enumerate() {
                    let v = var(j, b, k);
                    row[v] = &row[v] + &p.eval(i, c1, j, beta);
                }
                rows.push(row);
                rhs.push(-p.eval(i, c1, j, c2));
            }
        }
    }
    let m = Matrix::from_rows(field, rows.len(), unknowns, rows);
    let x = linalg::solve_linear(&m, &rhs)?;
    let mu = (0..=top)
        .map(|d| {
            (0..hd.coexact(d).len())
                .map(|a| {
                    let coeffs: Vector = (0..exact[d].len()).map(|k| x[var(d, a, k)].clone()).collect();
                    linalg::combine(field, complex.dim(d), &coeffs, &exact[d])
                })
                .collect()
        })
        .collect();
    Some(Twist { mu })
}

/// `C' = {c + μ(c)}`.
pub fn twisted(hd: &HodgeData, t: &Twist) -> HodgeData {
    let coexact = hd
        .coexact
        .iter()
        .enumerate()
        .map(|(d, cs)| cs.iter().zip(&t.mu[d]).map(|(c, m)| linalg::add_vectors(c, m)).collect())
        .collect();
    HodgeData { harmonic: hd.harmonic.clone(), coexact }
}

/// General twist `H' = {h + η(h)}`, `C' = {c + μ₁(c) + μ₂(c)}` with `η: H → im D`,
/// `μ₁: C → H`, `μ₂: C → im D`, listed as images of the basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralTwist {
    pub eta: Vec<Vec<Vector>>,
    pub mu1: Vec<Vec<Vector>>,
    pub mu2: Vec<Vec<Vector>>,
}

impl GeneralTwist {
    pub fn zero(complex: &Complex, hd: &HodgeData) -> GeneralTwist {
        let z = |fam: &Vec<Vec<Vector>>| {
            fam.iter().enumerate().map(|(d, v)| vec![complex.space().zero(d); v.len()]).collect::<Vec<_>>()
        };
        GeneralTwist { eta: z(&hd.harmonic), mu1: z(&hd.coexact), mu2: z(&hd.coexact) }
    }

    pub fn from_twist(complex: &Complex, hd: &HodgeData, t: &Twist) -> GeneralTwist {
        let mut g = GeneralTwist::zero(complex, hd);
        g.mu2 = t.mu.clone();
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistReport {
    /// `η` and `μ₂` land in `im D`, `μ₁` in `H`.
    #[serde(rename = "wellFormed")]
    pub well_formed: bool,
    #[serde(rename = "hOrthogonal")]
    pub h_orthogonal: bool,
    pub hodge: bool,
}

pub fn apply_twist(complex: &Complex, p: &CyclicPairing, hd: &HodgeData, t: &GeneralTwist) -> (HodgeData, TwistReport) {
    let field = complex.field();
    let top = complex.max_degree();
    let mut well_formed = true;
    for d in 0..=top {
        let im = Echelon::from_vectors(field, complex.dim(d), &complex.boundaries(d));
        let hs = Echelon::from_vectors(field, complex.dim(d), hd.harmonic(d));
        let fam = |f: &Vec<Vec<Vector>>| f.get(d).cloned().unwrap_or_default();
        well_formed &= fam(&t.eta).iter().all(|v| im.contains(v));
        well_formed &= fam(&t.mu2).iter().all(|v| im.contains(v));
        well_formed &= fam(&t.mu1).iter().all(|v| hs.contains(v));
    }
    let harmonic = hd
        .harmonic
        .iter()
        .enumerate()
        .map(|(d, hs)| hs.iter().zip(&t.eta[d]).map(|(h, e)| linalg::add_vectors(h, e)).collect())
        .collect();
    let coexact = hd
        .coexact
        .iter()
        .enumerate()
        .map(|(d, cs)| {
            cs.iter()
                .enumerate()
                .map(|(k, c)| linalg::add_vectors(&linalg::add_vectors(c, &t.mu1[d][k]), &t.mu2[d][k]))
                .collect()
        })
        .collect();
    let out = HodgeData { harmonic, coexact };
    let rep = check_hodge(complex, Some(p), &out);
    let report = TwistReport { well_formed, h_orthogonal: rep.h_orthogonal, hodge: rep.hodge };
    (out, report)
}

/// `(C^⊥ ∩ C)` per degree: combinations of `C^i` pairing to zero with `C^{n−i}`.
pub fn coexact_radical(complex: &Complex, p: &CyclicPairing, hd: &HodgeData) -> Vec<Vec<Vector>> {
    let field = complex.field();
    let n = p.degree();
    (0..=complex.max_degree())
        .map(|d| {
            let cs = hd.coexact(d);
            if d > n {
                return cs.to_vec();
            }
            let g = p.gram_between(d, cs, hd.coexact(n - d));
            linalg::kernel_basis(&g.transpose())
                .iter()
                .map(|k| linalg::combine(field, complex.dim(d), k, cs))
                .collect()
        })
        .collect()
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Deforms an H-orthogonal decomposition into a Hodge decomposition from `ρ` defined on the
/// complement `E` of `C^⊥ ∩ C` in degrees `≥ ⌈n/2⌉` (`rho[d][k] = ρ(E^d_k)`).
pub fn hodge_from_rho(complex: &Complex, p: &CyclicPairing, hd: &HodgeData, e: &[Vec<Vector>], rho: &[Vec<Vector>]) -> Result<HodgeData> {
    let field = complex.field();
    let n = p.degree();
    let top = complex.max_degree();
    let k = coexact_radical(complex, p, hd);
    let fam = |f: &[Vec<Vector>], d: usize| f.get(d).cloned().unwrap_or_default();
    let mut splits = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let ed = fam(e, d);
        let mut basis = ed.clone();
        basis.extend(k[d].iter().cloned());
        let span_c = Echelon::from_vectors(field, complex.dim(d), hd.coexact(d));
        if basis.len() != hd.coexact(d).len()
            || !linalg::is_independent(field, complex.dim(d), &basis)
            || !basis.iter().all(|v| span_c.contains(v))
        {
            return Err(Error::Precondition(format!("E is not a complement of C^⊥ ∩ C in C in degree {d}")));
        }
        splits.push(CoordinateSystem::new(field, complex.dim(d), &basis)?);
    }
    let lo = ceil_half(n);
    for d in lo..=n.min(top) {
        let ed = fam(e, d);
        let rd = fam(rho, d);
        if rd.len() != ed.len() {
            return Err(Error::Precondition(format!("ρ must be given on every E^{d} basis vector")));
        }
        let im = Echelon::from_vectors(field, complex.dim(d), &complex.boundaries(d));
        if let Some(x) = rd.iter().position(|v| !im.contains(v)) {
            return Err(Error::Precondition(format!("ρ(E^{d}[{x}]) is not exact")));
        }
        let j = n - d;
        for (a, e1) in fam(e, j).iter().enumerate() {
            for (b, (e2, r2)) in ed.iter().zip(&rd).enumerate() {
                if p.eval(j, e1, d, r2) != p.eval(j, e1, d, e2) {
                    return Err(Error::Precondition(format!(
                        "⟨e₁, ρ(e₂)⟩ ≠ ⟨e₁, e₂⟩ for e₁ = E^{j}[{a}], e₂ = E^{d}[{b}]"
                    )));
                }
            }
        }
        for (a, c) in k[j].iter().enumerate() {
            for (b, r2) in rd.iter().enumerate() {
                if !p.eval(j, c, d, r2).is_zero() {
                    return Err(Error::Precondition(format!(
                        "⟨c, ρ(e₂)⟩ ≠ 0 for c = (C^⊥∩C)^{j}[{a}], e₂ = E^{d}[{b}]"
                    )));
                }
            }
        }
    }
    let mut mu = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let ed = fam(e, d);
        let rd = fam(rho, d);
        let mu_e: Vec<Vector> = ed
            .iter()
            .enumerate()
            .map(|(x, _)| {
                if d < lo || d > n {
                    complex.space().zero(d)
                } else if 2 * d == n {
                    linalg::scale_vector(&-field.half(), &rd[x])
                } else {
                    linalg::scale_vector(&field.from_i64(-1), &rd[x])
                }
            })
            .collect();
        let md = hd
            .coexact(d)
            .iter()
            .map(|c| {
                let coords = splits[d].coords(c).expect("C lies in E ⊕ K");
                linalg::combine(field, complex.dim(d), &coords[..ed.len()], &mu_e)
            })
            .collect();
        mu.push(md);
    }
    let out = twisted(hd, &Twist { mu });
    let rep = check_hodge(complex, Some(p), &out);
    if !rep.hodge {
        return Err(Error::Verification(format!("deformed decomposition is not Hodge: {}", rep.problems.join("; "))));
    }
    Ok(out)
}

/// Lower degree of the middle pair: `(k, k)` for `n = 2k`, `(k, k+1)` for `n = 2k+1`.
pub fn middle_degree(n: usize) -> usize {
    n / 2
}

#[derive(Clone, Debug)]
pub struct MiddleReport {
    pub degree: usize,
    pub partner_degree: usize,
    pub feasible: bool,
    pub twist: Option<Twist>,
    pub certificate: Option<TwistObstruction>,
}

/// Solvability of the twist equation restricted to the middle degree pair.
pub fn middle_degree_obstruction(complex: &Complex, p: &CyclicPairing, hd: &HodgeData) -> Result<MiddleReport> {
    let n = p.degree();
    let i = middle_degree(n);
    let (degree, partner_degree) = (n - i, i);
    match solve_twist_middle(complex, p, hd)? {
        TwistSolution::Solved(t) => Ok(MiddleReport { degree, partner_degree, feasible: true, twist: Some(t), certificate: None }),
        TwistSolution::Obstructed(ob) => Ok(MiddleReport { degree, partner_degree, feasible: false, twist: None, certificate: Some(ob) }),
    }
}

fn solve_twist_middle(complex: &Complex, p: &CyclicPairing, hd: &HodgeData) -> Result<TwistSolution> {
    let n = p.degree();
    let i = middle_degree(n);
    let field = complex.field();
    let top = complex.max_degree();
    match solve_pair(complex, p, hd, i) {
        Err(ob) => Ok(TwistSolution::Obstructed(ob)),
        Ok((xi, xj)) => {
            let mut mu: Vec<Vec<Vector>> = (0..=top).map(|d| vec![complex.space().zero(d); hd.coexact(d).len()]).collect();
            let j = n - i;
            if i <= top && !hd.coexact(i).is_empty() {
                mu[i] = mu_vectors(field, complex.dim(i), &xi, &hd.exact(complex, i));
            }
            if j <= top && j != i && !hd.coexact(j).is_empty() {
                mu[j] = mu_vectors(field, complex.dim(j), &xj, &hd.exact(complex, j));
            }
            Ok(TwistSolution::Solved(Twist { mu }))
        }
    }
}

/// A Hodge decomposition found by orthogonalizing against `H` and twisting, or the obstruction.
pub fn hodge_decomposition(complex: &Complex, p: &CyclicPairing) -> Result<HodgeData> {
    let hd = h_orthogonalize(complex, p, None)?;
    match solve_twist(complex, p, &hd)? {
        TwistSolution::Solved(t) => {
            let out = twisted(&hd, &t);
            let rep = check_hodge(complex, Some(p), &out);
            if !rep.hodge {
                return Err(Error::Verification(rep.problems.join("; ")));
            }
            Ok(out)
        }
        TwistSolution::Obstructed(ob) => Err(Error::Obstruction(Box::new(ob))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn v2_is_already_hodge() {
        let (a, or) = corpus::v2(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        let hd = h_orthogonalize(a.complex(), &p, None).unwrap();
        assert_eq!(hd.harmonic.iter().map(Vec::len).sum::<usize>(), 4);
        let (dw, w) = a.space().find("w").unwrap();
        assert_eq!(hd.coexact(dw), &[a.space().basis_vector(dw, w)]);
        assert!(check_hodge(a.complex(), Some(&p), &hd).hodge);
        match solve_twist(a.complex(), &p, &hd).unwrap() {
            TwistSolution::Solved(t) => assert!(t.mu.iter().flatten().all(|v| linalg::is_zero_vector(v))),
            TwistSolution::Obstructed(_) => panic!("v2 is of Hodge type"),
        }
        assert!(middle_degree_obstruction(a.complex(), &p, &hd).unwrap().feasible);
    }

    #[test]
    fn degree_two_obstruction() {
        let (a, or) = corpus::obstruction_n2(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        let hd = h_orthogonalize(a.complex(), &p, None).unwrap();
        let rep = middle_degree_obstruction(a.complex(), &p, &hd).unwrap();
        assert!(!rep.feasible);
        assert!(rep.certificate.unwrap().verify(a.complex(), &p, &hd));
        assert!(solve_twist_brute_force(a.complex(), &p, &hd).is_none());
        assert!(matches!(hodge_decomposition(a.complex(), &p), Err(Error::Obstruction(_))));
    }

    #[test]
    fn rho_half_factor_in_the_middle() {
        // Degree 4: e in degree 2 with ⟨e,e⟩ = 1 and ρ(e) = D e' with ⟨e, De'⟩ = 1.
        let (a, or) = corpus::middle_rho_example(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        let hd = h_orthogonalize(a.complex(), &p, None).unwrap();
        let (d, e) = a.space().find("e").unwrap();
        let ev = a.space().basis_vector(d, e);
        assert_eq!(hd.coexact(d).len(), 1);
        let c = hd.coexact(d)[0].clone();
        assert_eq!(p.eval(2, &c, 2, &c), Field::Rational.one());
        let (db, b) = a.space().find("b").unwrap();
        let rho = vec![vec![], vec![], vec![a.space().basis_vector(db, b)]];
        let es = vec![vec![], vec![], vec![c.clone()]];
        let out = hodge_from_rho(a.complex(), &p, &hd, &es, &rho).unwrap();
        let c2 = &out.coexact(2)[0];
        assert_eq!(p.eval(2, c2, 2, c2), Field::Rational.zero());
        let _ = ev;
    }
}
