//! Finite (or degree-truncated) unital commutative differential graded algebras.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::graded::{Complex, GradedMap, GradedSpace};
use crate::linalg::{self, CoordinateSystem, Matrix, Vector};

/// Sparse structure constants: `entries[i][j][a * dim_j + b]` lists the nonzero coordinates of
/// `e^i_a ∧ e^j_b` in degree `i + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTable {
    dims: Vec<usize>,
    entries: Vec<Vec<Vec<Vec<(usize, Scalar)>>>>,
}

impl ProductTable {
    pub fn new(dims: &[usize]) -> ProductTable {
        let entries = dims
            .iter()
            .map(|&di| dims.iter().map(|&dj| vec![Vec::new(); di * dj]).collect())
            .collect();
        ProductTable { dims: dims.to_vec(), entries }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn get(&self, i: usize, a: usize, j: usize, b: usize) -> &[(usize, Scalar)] {
        &self.entries[i][j][a * self.dims[j] + b]
    }

    pub fn set(&mut self, i: usize, a: usize, j: usize, b: usize, value: Vec<(usize, Scalar)>) {
        let dj = self.dims[j];
        self.entries[i][j][a * dj + b] = value;
    }

    pub fn set_vector(&mut self, i: usize, a: usize, j: usize, b: usize, v: &[Scalar]) {
        let sparse = v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, c.clone())).collect();
        self.set(i, a, j, b, sparse);
    }
}

pub(crate) fn koszul(i: usize, j: usize) -> usize {
    (i * j) % 2
}

/// Unital CDGA with optional truncation degree `T`: degrees above `T` are zero and homology is
/// only meaningful in degrees `≤ T − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cdga {
    name: String,
    complex: Complex,
    product: ProductTable,
    unit: usize,
    truncation: Option<usize>,
    presentation: Option<FreePresentation>,
}

impl Cdga {
    pub fn new(name: &str, complex: Complex, product: ProductTable, unit: usize, truncation: Option<usize>) -> Result<Cdga> {
        if unit >= complex.dim(0) {
            return Err(Error::Malformed("unit must be a degree-0 basis vector".into()));
        }
        if product.dims() != complex.dims().as_slice() {
            return Err(Error::Malformed("product table does not match the graded space".into()));
        }
        Ok(Cdga { name: name.to_string(), complex, product, unit, truncation, presentation: None })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Cdga {
        self.name = name.to_string();
        self
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn space(&self) -> &GradedSpace {
        self.complex.space()
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn max_degree(&self) -> usize {
        self.complex.max_degree()
    }

    pub fn dim(&self, d: usize) -> usize {
        self.complex.dim(d)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.complex.dims()
    }

    pub fn product_table(&self) -> &ProductTable {
        &self.product
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn unit_vector(&self) -> Vector {
        self.space().basis_vector(0, self.unit)
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn presentation(&self) -> Option<&FreePresentation> {
        self.presentation.as_ref()
    }

    pub fn set_presentation(&mut self, p: Option<FreePresentation>) {
        self.presentation = p;
    }

    /// Highest degree whose homology is trustworthy.
    pub fn trusted_degree(&self) -> usize {
        match self.truncation {
            Some(t) => t.saturating_sub(1).min(self.max_degree()),
            None => usize::MAX,
        }
    }

    /// Largest degree in which homology comparisons are made: the trusted range clipped to the
    /// degrees present.
    pub fn homology_bound(&self) -> usize {
        self.trusted_degree().min(self.max_degree())
    }

    pub fn d(&self, d: usize) -> Matrix {
        self.complex.d(d)
    }

    pub fn apply_d(&self, d: usize, v: &[Scalar]) -> Vector {
        self.complex.apply_d(d, v)
    }

    /// `e^i_a ∧ e^j_b` as a dense vector of degree `i + j` (empty beyond the top degree).
    pub fn mul_basis(&self, i: usize, a: usize, j: usize, b: usize) -> Vector {
        let mut out = self.space().zero(i + j);
        if i + j <= self.max_degree() {
            for (k, c) in self.product.get(i, a, j, b) {
                out[*k] = c.clone();
            }
        }
        out
    }

    /// Product of homogeneous vectors `x ∈ V^i`, `y ∈ V^j`.
    pub fn mul(&self, i: usize, x: &[Scalar], j: usize, y: &[Scalar]) -> Vector {
        let mut out = self.space().zero(i + j);
        if i + j > self.max_degree() {
            return out;
        }
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let entries = self.product.get(i, a, j, b);
                if entries.is_empty() {
                    continue;
                }
                let s = xa * yb;
                for (k, c) in entries {
                    out[*k] = &out[*k] + &(&s * c);
                }
            }
        }
        out
    }

    /// Same algebra with a different truncation marker.
    pub fn with_truncation(mut self, t: Option<usize>) -> Cdga {
        self.truncation = t;
        self
    }
}

/// A violated axiom together with the basis vectors that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<String>,
    pub detail: String,
}

const MAX_WITNESSES_PER_AXIOM: usize = 20;

struct ReportBuilder {
    out: Vec<Violation>,
    counts: HashMap<String, usize>,
}

impl ReportBuilder {
    fn new() -> Self {
        ReportBuilder { out: Vec::new(), counts: HashMap::new() }
    }

    fn push(&mut self, axiom: &str, witness: Vec<String>, detail: String) {
        let n = self.counts.entry(axiom.to_string()).or_insert(0);
        *n += 1;
        if *n <= MAX_WITNESSES_PER_AXIOM {
            self.out.push(Violation { axiom: axiom.to_string(), witness, detail });
        }
    }
}

/// Checks every CDGA axiom on basis tuples. Empty result means the algebra is a CDGA.
pub fn check_cdga(a: &Cdga) -> Vec<Violation> {
    let mut rep = ReportBuilder::new();
    let sp = a.space();
    let field = a.field();
    let top = a.max_degree();
    let lbl = |d: usize, i: usize| sp.label(d, i).to_string();

    if !linalg::is_zero_vector(&a.apply_d(0, &a.unit_vector())) {
        rep.push("D1=0", vec![lbl(0, a.unit)], "differential of the unit is nonzero".into());
    }
    for d in 0..=top {
        for i in 0..a.dim(d) {
            let e = sp.basis_vector(d, i);
            if a.mul(0, &a.unit_vector(), d, &e) != e || a.mul(d, &e, 0, &a.unit_vector()) != e {
                rep.push("unit", vec![lbl(d, i)], "1∧v = v∧1 = v fails".into());
            }
            if d < top {
                let dd = a.apply_d(d + 1, &a.apply_d(d, &e));
                if !linalg::is_zero_vector(&dd) {
                    rep.push("D∘D", vec![lbl(d, i)], format!("D(D v) = {}", sp.format_vector(d + 2, &dd)));
                }
            }
        }
    }
    for i in 0..=top {
        for j in 0..=top - i {
            let sign = Scalar::sign(field, koszul(i, j));
            for x in 0..a.dim(i) {
                for y in 0..a.dim(j) {
                    let xy = a.mul_basis(i, x, j, y);
                    let yx = a.mul_basis(j, y, i, x);
                    if xy != linalg::scale_vector(&sign, &yx) {
                        rep.push("graded commutativity", vec![lbl(i, x), lbl(j, y)], "v∧w ≠ (−1)^{|v||w|} w∧v".into());
                    }
                    // Leibniz rule, compared where D(v∧w) has a home.
                    if i + j < top {
                        let ex = sp.basis_vector(i, x);
                        let ey = sp.basis_vector(j, y);
                        let lhs = a.apply_d(i + j, &xy);
                        let mut rhs = a.mul(i + 1, &a.apply_d(i, &ex), j, &ey);
                        let second = a.mul(i, &ex, j + 1, &a.apply_d(j, &ey));
                        linalg::axpy(&mut rhs, &Scalar::sign(field, i), &second);
                        if lhs != rhs {
                            rep.push("Leibniz", vec![lbl(i, x), lbl(j, y)], "D(v∧w) ≠ Dv∧w + (−1)^{|v|} v∧Dw".into());
                        }
                    }
                }
            }
        }
    }
    for i in 1..=top {
        for j in 1..=top - i {
            for k in 1..=top - i - j {
                for x in 0..a.dim(i) {
                    for y in 0..a.dim(j) {
                        let xy = a.mul_basis(i, x, j, y);
                        for z in 0..a.dim(k) {
                            let lhs = a.mul(i + j, &xy, k, &sp.basis_vector(k, z));
                            let yz = a.mul_basis(j, y, k, z);
                            let rhs = a.mul(i, &sp.basis_vector(i, x), j + k, &yz);
                            if lhs != rhs {
                                rep.push("associativity", vec![lbl(i, x), lbl(j, y), lbl(k, z)], "(uv)w ≠ u(vw)".into());
                            }
                        }
                    }
                }
            }
        }
    }
    rep.out
}

/// Builder for algebras given by named basis vectors, used by the corpus and tests.
pub struct CdgaBuilder {
    field: Field,
    labels: Vec<Vec<String>>,
    products: Vec<(String, String, String, Scalar)>,
    diffs: Vec<(String, String, Scalar)>,
    unit: String,
    truncation: Option<usize>,
}

impl CdgaBuilder {
    pub fn new(field: Field, unit: &str) -> CdgaBuilder {
        CdgaBuilder {
            field,
            labels: vec![vec![unit.to_string()]],
            products: Vec::new(),
            diffs: Vec::new(),
            unit: unit.to_string(),
            truncation: None,
        }
    }

    pub fn basis(mut self, degree: usize, names: &[&str]) -> Self {
        while self.labels.len() <= degree {
            self.labels.push(Vec::new());
        }
        self.labels[degree].extend(names.iter().map(|s| s.to_string()));
        self
    }

    /// Records `x ∧ y = c·z` and the graded-commuted product `y ∧ x`.
    pub fn product(mut self, x: &str, y: &str, z: &str, c: i64) -> Self {
        let c = self.field.from_i64(c);
        self.products.push((x.into(), y.into(), z.into(), c));
        self
    }

    pub fn product_scalar(mut self, x: &str, y: &str, z: &str, c: Scalar) -> Self {
        self.products.push((x.into(), y.into(), z.into(), c));
        self
    }

    pub fn diff(mut self, x: &str, y: &str, c: i64) -> Self {
        let c = self.field.from_i64(c);
        self.diffs.push((x.into(), y.into(), c));
        self
    }

    pub fn truncation(mut self, t: Option<usize>) -> Self {
        self.truncation = t;
        self
    }

    pub fn build(self, name: &str) -> Result<Cdga> {
        let space = GradedSpace::new(self.field, self.labels)?;
        let find = |l: &str| space.find(l).ok_or_else(|| Error::Malformed(format!("unknown basis label {l:?}")));
        let mut entries = Vec::new();
        for (x, y, z, c) in &self.products {
            let (i, a) = find(x)?;
            let (j, b) = find(y)?;
            let (k, t) = find(z)?;
            entries.push(((i, a), (j, b), (k, t), c.clone()));
            if (i, a) != (j, b) {
                entries.push(((j, b), (i, a), (k, t), &Scalar::sign(self.field, koszul(i, j)) * c));
            }
        }
        let mut diffs = Vec::new();
        for (x, y, c) in &self.diffs {
            diffs.push((find(x)?, find(y)?, c.clone()));
        }
        let unit = find(&self.unit)?;
        assemble(name, space, unit, &diffs, &entries, self.truncation)
    }
}

/// Assembles an algebra from sparse differential and product entries (unit products implicit).
pub(crate) fn assemble(
    name: &str,
    space: GradedSpace,
    unit: (usize, usize),
    diffs: &[((usize, usize), (usize, usize), Scalar)],
    products: &[((usize, usize), (usize, usize), (usize, usize), Scalar)],
    truncation: Option<usize>,
) -> Result<Cdga> {
    let field = space.field();
    let top = space.max_degree();
    if unit.0 != 0 {
        return Err(Error::Malformed("unit must have degree 0".into()));
    }
    let mut diff: Vec<Matrix> = (0..=top).map(|d| Matrix::zeros(field, space.dim(d + 1), space.dim(d))).collect();
    for ((sd, si), (td, ti), c) in diffs {
        if *td != sd + 1 {
            return Err(Error::Malformed(format!(
                "differential entry {} -> {} changes degree by {} instead of +1",
                space.label(*sd, *si),
                space.label(*td, *ti),
                *td as isize - *sd as isize
            )));
        }
        let v = diff[*sd].get(*ti, *si) + c;
        diff[*sd].set(*ti, *si, v);
    }
    let mut dense: HashMap<(usize, usize, usize, usize), Vector> = HashMap::new();
    for ((i, a), (j, b), (k, t), c) in products {
        if *i == 0 && *a == unit.1 || *j == 0 && *b == unit.1 {
            return Err(Error::Malformed(format!(
                "product entry {}∧{} involves the unit; unit products are implicit",
                space.label(*i, *a),
                space.label(*j, *b)
            )));
        }
        if *k != i + j {
            return Err(Error::Malformed(format!(
                "product entry {}∧{} -> {} has degree {k}, expected {}",
                space.label(*i, *a),
                space.label(*j, *b),
                space.label(*k, *t),
                i + j
            )));
        }
        let v = dense.entry((*i, *a, *j, *b)).or_insert_with(|| space.zero(*k));
        v[*t] = &v[*t] + c;
    }
    let mut table = ProductTable::new(&space.dims());
    let mut keys: Vec<_> = dense.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let (i, a, j, b) = key;
        table.set_vector(i, a, j, b, &dense[&key]);
    }
    for d in 0..=top {
        for i in 0..space.dim(d) {
            table.set(0, unit.1, d, i, vec![(i, field.one())]);
            table.set(d, i, 0, unit.1, vec![(i, field.one())]);
        }
    }
    let complex = Complex::new(space, diff)?;
    Cdga::new(name, complex, table, unit.1, truncation)
}

/// Generator of a free graded-commutative algebra with its differential, a polynomial given as
/// `(coefficient, exponent vector)` terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGenerator {
    pub name: String,
    pub degree: usize,
    pub differential: Vec<(Scalar, Vec<u32>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePresentation {
    pub field: Field,
    pub generators: Vec<FreeGenerator>,
    pub truncation: usize,
}

fn monomial_label(names: &[String], e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{x}", names[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Monomials of degree `≤ t`, ordered by degree and then by decreasing exponent vector.
fn enumerate_monomials(degrees: &[usize], t: usize) -> Vec<(usize, Vec<u32>)> {
    fn rec(degrees: &[usize], t: usize, pos: usize, cur: &mut Vec<u32>, deg: usize, out: &mut Vec<(usize, Vec<u32>)>) {
        if pos == degrees.len() {
            out.push((deg, cur.clone()));
            return;
        }
        let g = degrees[pos];
        let max_e = if g % 2 == 1 { 1 } else { (t - deg) / g };
        for e in 0..=max_e {
            if deg + e * g > t {
                break;
            }
            cur.push(e as u32);
            rec(degrees, t, pos + 1, cur, deg + e * g, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(degrees, t, 0, &mut Vec::new(), 0, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    out
}

/// Sign and exponent vector of the product of two monomials, or `None` if it vanishes because
/// an odd generator appears twice.
fn monomial_product(degrees: &[usize], e1: &[u32], e2: &[u32]) -> Option<(usize, Vec<u32>)> {
    let mut e = Vec::with_capacity(e1.len());
    for (g, (a, b)) in e1.iter().zip(e2).enumerate() {
        if degrees[g] % 2 == 1 && a + b > 1 {
            return None;
        }
        e.push(a + b);
    }
    // Moving each factor of the second monomial left past the later factors of the first.
    let mut sign = 0usize;
    for (j, &b) in e2.iter().enumerate() {
        if b == 0 || degrees[j].is_multiple_of(2) {
            continue;
        }
        for (i, &a) in e1.iter().enumerate().skip(j + 1) {
            if degrees[i] % 2 == 1 {
                sign += (a * b) as usize;
            }
        }
    }
    Some((sign % 2, e))
}

/// The free graded-commutative algebra on the generators, truncated above degree `T`.
pub fn build_truncated_free(name: &str, p: &FreePresentation) -> Result<Cdga> {
    let field = p.field;
    let degrees: Vec<usize> = p.generators.iter().map(|g| g.degree).collect();
    let names: Vec<String> = p.generators.iter().map(|g| g.name.clone()).collect();
    if degrees.contains(&0) {
        return Err(Error::Malformed("generators must have degree ≥ 1".into()));
    }
    let t = p.truncation;
    let monomials = enumerate_monomials(&degrees, t);
    let top = monomials.iter().map(|m| m.0).max().unwrap_or(0);
    let mut labels = vec![Vec::new(); top + 1];
    let mut index: HashMap<Vec<u32>, (usize, usize)> = HashMap::new();
    for (d, e) in &monomials {
        index.insert(e.clone(), (*d, labels[*d].len()));
        labels[*d].push(monomial_label(&names, e));
    }
    let space = GradedSpace::new(field, labels)?;
    let mut table = ProductTable::new(&space.dims());
    for (d1, e1) in &monomials {
        for (d2, e2) in &monomials {
            if d1 + d2 > t {
                continue;
            }
            if let Some((sign, e)) = monomial_product(&degrees, e1, e2) {
                let (k, idx) = index[&e];
                let (_, a) = index[e1];
                let (_, b) = index[e2];
                debug_assert_eq!(k, d1 + d2);
                table.set(*d1, a, *d2, b, vec![(idx, Scalar::sign(field, sign))]);
            }
        }
    }
    // Differential of each generator as a vector.
    let mut gen_diff: Vec<Vector> = Vec::new();
    for (g, gen) in p.generators.iter().enumerate() {
        let target = gen.degree + 1;
        let mut v = space.zero(target);
        for (c, e) in &gen.differential {
            if e.len() != degrees.len() {
                return Err(Error::Malformed(format!("differential of {} has a malformed term", gen.name)));
            }
            let deg: usize = e.iter().zip(&degrees).map(|(x, d)| *x as usize * d).sum();
            if deg != target {
                return Err(Error::Malformed(format!(
                    "differential of {} has a term of degree {deg}, expected {target}",
                    gen.name
                )));
            }
            if e.iter().enumerate().any(|(i, &x)| degrees[i] % 2 == 1 && x > 1) {
                continue;
            }
            if deg <= t {
                let (_, idx) = index[e];
                v[idx] = &v[idx] + c;
            }
        }
        let _ = g;
        gen_diff.push(v);
    }
    let mut diff: Vec<Matrix> = (0..=top).map(|d| Matrix::zeros(field, space.dim(d + 1), space.dim(d))).collect();
    let mut computed: HashMap<Vec<u32>, Vector> = HashMap::new();
    let proto = Cdga::new(name, Complex::zero_differential(space.clone()), table.clone(), 0, None)?;
    for (d, e) in &monomials {
        let value = if *d == 0 || *d + 1 > top {
            space.zero(d + 1)
        } else {
            let g = e.iter().position(|&x| x > 0).expect("nonunit monomial");
            let mut rest = e.clone();
            rest[g] -= 1;
            let rest_deg = d - degrees[g];
            let rest_vec = space.basis_vector(rest_deg, index[&rest].1);
            let gen_vec = space.basis_vector(degrees[g], index[&unit_exponent(degrees.len(), g)].1);
            let mut v = proto.mul(degrees[g] + 1, &gen_diff[g], rest_deg, &rest_vec);
            let d_rest = computed[&rest].clone();
            let second = proto.mul(degrees[g], &gen_vec, rest_deg + 1, &d_rest);
            linalg::axpy(&mut v, &Scalar::sign(field, degrees[g]), &second);
            v
        };
        if *d < top {
            let (_, col) = index[e];
            for (r, c) in value.iter().enumerate() {
                diff[*d].set(r, col, c.clone());
            }
        }
        computed.insert(e.clone(), value);
    }
    let complex = Complex::new(space.clone(), diff)?;
    let cut = degrees.iter().any(|d| d % 2 == 0) || degrees.iter().sum::<usize>() > t;
    let mut alg = Cdga::new(name, complex, table, 0, cut.then_some(t))?;
    for (g, gen) in p.generators.iter().enumerate() {
        if gen.degree + 2 <= top {
            let dd = alg.apply_d(gen.degree + 1, &gen_diff[g]);
            if !linalg::is_zero_vector(&dd) {
                return Err(Error::Malformed(format!("D∘D is nonzero on generator {}", gen.name)));
            }
        }
    }
    alg.set_presentation(Some(p.clone()));
    Ok(alg)
}

fn unit_exponent(n: usize, g: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[g] = 1;
    e
}

fn uniquify(labels: &mut [Vec<String>]) {
    let mut seen = HashSet::new();
    for l in labels.iter_mut().flatten() {
        while !seen.insert(l.clone()) {
            l.push('\'');
        }
    }
}

/// Result of [`tensor_product`].
pub struct TensorProduct {
    pub algebra: Cdga,
    pub include_left: GradedMap,
    pub include_right: GradedMap,
    /// `(degree in left, index in left, degree in right, index in right)` for every basis vector,
    /// listed per total degree.
    pub factors: Vec<Vec<(usize, usize, usize, usize)>>,
}

impl TensorProduct {
    /// `a ⊗ b ↦ a·ε(b)` where `ε` kills everything outside `span{1}`; requires a connected right
    /// factor.
    pub fn retraction_left(&self, left: &Cdga, right: &Cdga) -> GradedMap {
        let field = left.field();
        let target = left.dims();
        let blocks = self
            .factors
            .iter()
            .enumerate()
            .map(|(d, fs)| {
                let mut m = Matrix::zeros(field, target.get(d).copied().unwrap_or(0), fs.len());
                for (col, &(_, a, j, b)) in fs.iter().enumerate() {
                    if j == 0 && b == right.unit_index() {
                        m.set(a, col, field.one());
                    }
                }
                m
            })
            .collect();
        GradedMap::new(field, 0, self.algebra.dims(), target, blocks).expect("shapes")
    }
}

/// `a ⊗ b` truncated above degree `t`, with Koszul signs
/// `(a₁⊗b₁)(a₂⊗b₂) = (−1)^{|b₁||a₂|} a₁a₂ ⊗ b₁b₂` and `D(a⊗b) = Da⊗b + (−1)^{|a|} a⊗Db`.
pub fn tensor_product(a: &Cdga, b: &Cdga, t: usize) -> Result<TensorProduct> {
    if a.field() != b.field() {
        return Err(Error::Precondition("tensor factors over different fields".into()));
    }
    let field = a.field();
    let top = t.min(a.max_degree() + b.max_degree());
    let mut factors: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); top + 1];
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    let mut index: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
    let unit_a = a.space().label(0, a.unit_index()).to_string();
    let unit_b = b.space().label(0, b.unit_index()).to_string();
    for d in 0..=top {
        for i in (0..=d).rev() {
            let j = d - i;
            if i > a.max_degree() || j > b.max_degree() {
                continue;
            }
            for x in 0..a.dim(i) {
                for y in 0..b.dim(j) {
                    let la = a.space().label(i, x);
                    let lb = b.space().label(j, y);
                    let label = if lb == unit_b && j == 0 {
                        la.to_string()
                    } else if la == unit_a && i == 0 {
                        lb.to_string()
                    } else {
                        format!("{la}*{lb}")
                    };
                    index.insert((i, x, j, y), factors[d].len());
                    factors[d].push((i, x, j, y));
                    labels[d].push(label);
                }
            }
        }
    }
    uniquify(&mut labels);
    let space = GradedSpace::new(field, labels)?;
    let mut table = ProductTable::new(&space.dims());
    for d1 in 0..=top {
        for (p1, &(i1, x1, j1, y1)) in factors[d1].iter().enumerate() {
            for d2 in 0..=top - d1 {
                for (p2, &(i2, x2, j2, y2)) in factors[d2].iter().enumerate() {
                    let pa = if i1 + i2 <= a.max_degree() { a.product_table().get(i1, x1, i2, x2) } else { &[] };
                    if pa.is_empty() {
                        continue;
                    }
                    let pb = if j1 + j2 <= b.max_degree() { b.product_table().get(j1, y1, j2, y2) } else { &[] };
                    if pb.is_empty() {
                        continue;
                    }
                    let sign = Scalar::sign(field, koszul(j1, i2));
                    let mut entries: Vec<(usize, Scalar)> = Vec::new();
                    for (ka, ca) in pa {
                        for (kb, cb) in pb {
                            let idx = index[&(i1 + i2, *ka, j1 + j2, *kb)];
                            entries.push((idx, &(&sign * ca) * cb));
                        }
                    }
                    entries.sort_by_key(|e| e.0);
                    table.set(d1, p1, d2, p2, entries);
                }
            }
        }
    }
    let mut diff: Vec<Matrix> = (0..=top).map(|d| Matrix::zeros(field, space.dim(d + 1), space.dim(d))).collect();
    for d in 0..top {
        for (col, &(i, x, j, y)) in factors[d].iter().enumerate() {
            let da = a.apply_d(i, &a.space().basis_vector(i, x));
            for (ka, ca) in da.iter().enumerate() {
                if !ca.is_zero() {
                    let row = index[&(i + 1, ka, j, y)];
                    let v = diff[d].get(row, col) + ca;
                    diff[d].set(row, col, v);
                }
            }
            let db = b.apply_d(j, &b.space().basis_vector(j, y));
            let s = Scalar::sign(field, i);
            for (kb, cb) in db.iter().enumerate() {
                if !cb.is_zero() {
                    let row = index[&(i, x, j + 1, kb)];
                    let v = diff[d].get(row, col) + &(&s * cb);
                    diff[d].set(row, col, v);
                }
            }
        }
    }
    let cut = a.max_degree() + b.max_degree() > t;
    let truncation = [a.truncation(), b.truncation(), cut.then_some(t)].into_iter().flatten().min();
    let complex = Complex::new(space.clone(), diff)?;
    let unit = index[&(0, a.unit_index(), 0, b.unit_index())];
    let algebra = Cdga::new(&format!("{}*{}", a.name(), b.name()), complex, table, unit, truncation)?;
    let dims = space.dims();
    let include = |left: bool| -> Result<GradedMap> {
        let src = if left { a } else { b };
        let cols: Vec<Vec<Vector>> = (0..=src.max_degree())
            .map(|d| {
                (0..src.dim(d))
                    .map(|x| {
                        let mut v = linalg::zero_vector(field, *dims.get(d).unwrap_or(&0));
                        if d <= top {
                            let key = if left { (d, x, 0, b.unit_index()) } else { (0, a.unit_index(), d, x) };
                            v[index[&key]] = field.one();
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let blocks = cols
            .iter()
            .enumerate()
            .map(|(d, c)| Matrix::from_columns(field, *dims.get(d).unwrap_or(&0), c))
            .collect();
        GradedMap::new(field, 0, src.dims(), dims.clone(), blocks)
    };
    Ok(TensorProduct { include_left: include(true)?, include_right: include(false)?, algebra, factors })
}

/// The same algebra written in a new basis: column `k` of `mats[d]` gives the `k`-th new basis
/// vector of degree `d` in old coordinates. The unit must be fixed.
pub fn change_basis(a: &Cdga, mats: &[Matrix]) -> Result<Cdga> {
    let field = a.field();
    let top = a.max_degree();
    if mats.len() != top + 1 {
        return Err(Error::Precondition("one basis change per degree required".into()));
    }
    let inv: Vec<Matrix> = mats
        .iter()
        .map(|m| linalg::inverse(m).ok_or_else(|| Error::Precondition("basis change is singular".into())))
        .collect::<Result<_>>()?;
    if mats[0].column(a.unit_index()) != a.unit_vector() {
        return Err(Error::Precondition("basis change must fix the unit".into()));
    }
    let diff: Vec<Matrix> = (0..=top)
        .map(|d| if d < top { inv[d + 1].mul(&a.d(d)).mul(&mats[d]) } else { a.d(d) })
        .collect();
    let mut table = ProductTable::new(&a.dims());
    for i in 0..=top {
        for j in 0..=top - i {
            for x in 0..a.dim(i) {
                let vx = mats[i].column(x);
                for y in 0..a.dim(j) {
                    let vy = mats[j].column(y);
                    let p = inv[i + j].apply(&a.mul(i, &vx, j, &vy));
                    table.set_vector(i, x, j, y, &p);
                }
            }
        }
    }
    let complex = Complex::new(a.space().clone(), diff)?;
    let _ = field;
    Cdga::new(a.name(), complex, table, a.unit_index(), a.truncation())
}

/// The subalgebra spanned by `bases` (which must contain the unit vector in degree 0), as an
/// algebra in its own right together with its inclusion.
pub fn subalgebra(a: &Cdga, bases: &[Vec<Vector>], name: &str) -> Result<(Cdga, GradedMap)> {
    let field = a.field();
    let top = a.max_degree();
    let mut bases = bases.to_vec();
    bases.resize(top + 1, Vec::new());
    let unit = bases[0]
        .iter()
        .position(|v| *v == a.unit_vector())
        .ok_or_else(|| Error::Precondition("subalgebra basis must contain the unit".into()))?;
    let systems: Vec<CoordinateSystem> = (0..=top)
        .map(|d| CoordinateSystem::new(field, a.dim(d), &bases[d]))
        .collect::<Result<_>>()?;
    let mut labels: Vec<Vec<String>> = bases
        .iter()
        .enumerate()
        .map(|(d, bs)| {
            bs.iter()
                .enumerate()
                .map(|(i, v)| {
                    let nz: Vec<usize> = (0..v.len()).filter(|&k| !v[k].is_zero()).collect();
                    if nz.len() == 1 && v[nz[0]].is_one() {
                        a.space().label(d, nz[0]).to_string()
                    } else {
                        format!("s{d}_{i}")
                    }
                })
                .collect()
        })
        .collect();
    uniquify(&mut labels);
    let space = GradedSpace::new(field, labels)?;
    let not_closed = |what: &str, d: usize| Error::Verification(format!("subspace is not closed under {what} in degree {d}"));
    let mut diff = Vec::new();
    for d in 0..=top {
        let mut m = Matrix::zeros(field, space.dim(d + 1), space.dim(d));
        if d < top {
            for (col, v) in bases[d].iter().enumerate() {
                let c = systems[d + 1].coords(&a.apply_d(d, v)).ok_or_else(|| not_closed("D", d + 1))?;
                for (r, x) in c.into_iter().enumerate() {
                    m.set(r, col, x);
                }
            }
        }
        diff.push(m);
    }
    let mut table = ProductTable::new(&space.dims());
    for i in 0..=top {
        for j in 0..=top - i {
            for (x, vx) in bases[i].iter().enumerate() {
                for (y, vy) in bases[j].iter().enumerate() {
                    let p = a.mul(i, vx, j, vy);
                    let c = systems[i + j].coords(&p).ok_or_else(|| not_closed("products", i + j))?;
                    table.set_vector(i, x, j, y, &c);
                }
            }
        }
    }
    let complex = Complex::new(space.clone(), diff)?;
    let sub = Cdga::new(name, complex, table, unit, a.truncation())?;
    let inclusion = GradedMap::from_columns(field, &space.dims(), &a.dims(), bases)?;
    Ok((sub, inclusion))
}

/// `a / I` for a dg-ideal `I` given by per-degree bases. The quotient basis consists of the
/// standard basis vectors chosen by the complement rule; trailing empty degrees are dropped.
pub fn quotient(a: &Cdga, ideal: &[Vec<Vector>], name: &str) -> Result<(Cdga, GradedMap)> {
    let field = a.field();
    let top = a.max_degree();
    let mut ideal = ideal.to_vec();
    ideal.resize(top + 1, Vec::new());
    for d in 0..=top {
        for v in &ideal[d] {
            let ech = linalg::Echelon::from_vectors(field, a.dim(d + 1), ideal.get(d + 1).map_or(&[][..], |x| x.as_slice()));
            if d < top && !ech.contains(&a.apply_d(d, v)) {
                return Err(Error::Precondition(format!("subspace is not closed under D in degree {d}")));
            }
            for j in 0..=top.saturating_sub(d) {
                if d + j > top {
                    continue;
                }
                let target = linalg::Echelon::from_vectors(field, a.dim(d + j), &ideal[d + j]);
                for y in 0..a.dim(j) {
                    if !target.contains(&a.mul(d, v, j, &a.space().basis_vector(j, y))) {
                        return Err(Error::Precondition(format!("subspace is not an ideal in degree {}", d + j)));
                    }
                }
            }
        }
    }
    let mut keep = Vec::new();
    let mut proj = Vec::new();
    for d in 0..=top {
        let k = linalg::complement_basis(field, &ideal[d], a.dim(d))?;
        let mut cols: Vec<Vector> = k.iter().map(|&i| a.space().basis_vector(d, i)).collect();
        cols.extend(ideal[d].iter().cloned());
        let m = Matrix::from_columns(field, a.dim(d), &cols);
        let inv = linalg::inverse(&m).ok_or_else(|| Error::Verification("quotient basis is not a basis".into()))?;
        let mut p = Matrix::zeros(field, k.len(), a.dim(d));
        for r in 0..k.len() {
            for c in 0..a.dim(d) {
                p.set(r, c, inv.get(r, c).clone());
            }
        }
        keep.push(k);
        proj.push(p);
    }
    let new_top = (0..=top).rev().find(|&d| !keep[d].is_empty()).unwrap_or(0);
    keep.truncate(new_top + 1);
    let labels: Vec<Vec<String>> = keep
        .iter()
        .enumerate()
        .map(|(d, k)| k.iter().map(|&i| a.space().label(d, i).to_string()).collect())
        .collect();
    let space = GradedSpace::new(field, labels)?;
    let unit = keep[0]
        .iter()
        .position(|&i| i == a.unit_index())
        .ok_or_else(|| Error::Precondition("the unit lies in the ideal".into()))?;
    let mut diff = Vec::new();
    for d in 0..=new_top {
        let mut m = Matrix::zeros(field, space.dim(d + 1), space.dim(d));
        if d < new_top {
            for (col, &i) in keep[d].iter().enumerate() {
                let img = proj[d + 1].apply(&a.apply_d(d, &a.space().basis_vector(d, i)));
                for (r, x) in img.into_iter().enumerate() {
                    m.set(r, col, x);
                }
            }
        }
        diff.push(m);
    }
    let mut table = ProductTable::new(&space.dims());
    for i in 0..=new_top {
        for j in 0..=new_top - i {
            for (x, &ix) in keep[i].iter().enumerate() {
                for (y, &iy) in keep[j].iter().enumerate() {
                    let p = proj[i + j].apply(&a.mul_basis(i, ix, j, iy));
                    table.set_vector(i, x, j, y, &p);
                }
            }
        }
    }
    let truncation = a.truncation().filter(|&t| t <= new_top);
    let complex = Complex::new(space.clone(), diff)?;
    let q = Cdga::new(name, complex, table, unit, truncation)?;
    let blocks: Vec<Matrix> = proj
        .into_iter()
        .enumerate()
        .map(|(d, p)| if d <= new_top { p } else { Matrix::zeros(field, 0, a.dim(d)) })
        .collect();
    let map = GradedMap::new(field, 0, a.dims(), space.dims(), blocks)?;
    Ok((q, map))
}
