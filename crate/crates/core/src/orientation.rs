//! Orientations and cyclic pairings of degree `−n`.

use crate::algebra::{koszul, Cdga, Violation};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::graded::Complex;
use crate::linalg::{self, Matrix, Vector};

/// Nonzero functional on `V^n` vanishing on `D V^{n−1}` (the latter is checked by
/// [`Orientation::check_closed`], since a bare functional knows nothing of `D`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    degree: usize,
    functional: Vector,
}

impl Orientation {
    pub fn new(degree: usize, functional: Vector) -> Result<Orientation> {
        if linalg::is_zero_vector(&functional) {
            return Err(Error::Precondition("orientation must be nonzero".into()));
        }
        Ok(Orientation { degree, functional })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn functional(&self) -> &[Scalar] {
        &self.functional
    }

    /// `Or(v)` for `v` of degree `d`.
    pub fn eval(&self, d: usize, v: &[Scalar]) -> Scalar {
        let field = v.first().map(Scalar::field).unwrap_or_else(|| self.functional[0].field());
        if d != self.degree {
            return field.zero();
        }
        linalg::dot(&self.functional, v, field)
    }

    pub fn scaled(&self, c: &Scalar) -> Result<Orientation> {
        Orientation::new(self.degree, linalg::scale_vector(c, &self.functional))
    }

    /// Whether `Or ∘ D = 0` on `complex`.
    pub fn check_closed(&self, complex: &Complex) -> bool {
        if self.functional.len() != complex.dim(self.degree) {
            return false;
        }
        if self.degree == 0 {
            return true;
        }
        let d = complex.d_ref(self.degree - 1);
        (0..d.cols()).all(|c| self.eval(self.degree, &d.column(c)).is_zero())
    }

    /// The functional in new coordinates: `new_basis` has the new basis vectors of degree `n`
    /// as columns.
    pub fn transport(&self, new_basis: &Matrix) -> Result<Orientation> {
        let values = (0..new_basis.cols()).map(|c| self.eval(self.degree, &new_basis.column(c))).collect();
        Orientation::new(self.degree, values)
    }
}

/// Bilinear form of degree `−n`; `blocks[i]` holds `⟨e^i_a, e^{n−i}_b⟩` for `i = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicPairing {
    field: Field,
    degree: usize,
    blocks: Vec<Matrix>,
}

impl CyclicPairing {
    pub fn new(field: Field, degree: usize, dims: &[usize], blocks: Vec<Matrix>) -> Result<CyclicPairing> {
        if blocks.len() != degree + 1 {
            return Err(Error::Malformed("one pairing block per degree 0..=n required".into()));
        }
        let dim = |d: usize| dims.get(d).copied().unwrap_or(0);
        for (i, b) in blocks.iter().enumerate() {
            if b.rows() != dim(i) || b.cols() != dim(degree - i) {
                return Err(Error::Malformed(format!("pairing block {i} has wrong shape")));
            }
        }
        Ok(CyclicPairing { field, degree, blocks })
    }

    pub fn zero(field: Field, degree: usize, dims: &[usize]) -> CyclicPairing {
        let dim = |d: usize| dims.get(d).copied().unwrap_or(0);
        let blocks = (0..=degree).map(|i| Matrix::zeros(field, dim(i), dim(degree - i))).collect();
        CyclicPairing { field, degree, blocks }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Gram block between degrees `i` and `n − i` (empty for `i > n`).
    pub fn gram(&self, i: usize) -> Matrix {
        match self.blocks.get(i) {
            Some(b) => b.clone(),
            None => Matrix::zeros(self.field, 0, 0),
        }
    }

    pub fn gram_ref(&self, i: usize) -> &Matrix {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    /// `⟨x, y⟩` for `x ∈ V^i`, `y ∈ V^j` (zero unless `i + j = n`).
    pub fn eval(&self, i: usize, x: &[Scalar], j: usize, y: &[Scalar]) -> Scalar {
        if i + j != self.degree {
            return self.field.zero();
        }
        let g = &self.blocks[i];
        linalg::dot(x, &g.apply(y), self.field)
    }

    /// Gram matrix `⟨xs_a, ys_b⟩` for families in degrees `i` and `n − i`.
    pub fn gram_between(&self, i: usize, xs: &[Vector], ys: &[Vector]) -> Matrix {
        let j = self.degree.wrapping_sub(i);
        let rows = xs.iter().map(|x| ys.iter().map(|y| self.eval(i, x, j, y)).collect()).collect();
        Matrix::from_rows(self.field, xs.len(), ys.len(), rows)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn scaled(&self, c: &Scalar) -> CyclicPairing {
        CyclicPairing { field: self.field, degree: self.degree, blocks: self.blocks.iter().map(|b| b.scale(c)).collect() }
    }

    /// Whether every Gram block has full rank in both directions.
    pub fn is_nondegenerate(&self) -> bool {
        self.blocks.iter().all(|b| {
            let r = linalg::rank(b);
            r == b.rows() && r == b.cols()
        })
    }
}

/// `⟨v₁, v₂⟩ = Or(v₁ ∧ v₂)`.
pub fn pairing_from_orientation(a: &Cdga, or: &Orientation) -> CyclicPairing {
    let field = a.field();
    let n = or.degree();
    let dims = a.dims();
    let blocks = (0..=n)
        .map(|i| {
            let j = n - i;
            let mut m = Matrix::zeros(field, a.dim(i), a.dim(j));
            if n <= a.max_degree() {
                for x in 0..a.dim(i) {
                    for y in 0..a.dim(j) {
                        let p = a.mul_basis(i, x, j, y);
                        m.set(x, y, or.eval(n, &p));
                    }
                }
            }
            m
        })
        .collect();
    CyclicPairing::new(field, n, &dims, blocks).expect("shapes")
}

/// `Or(v) = ⟨v, 1⟩`.
pub fn orientation_from_pairing(p: &CyclicPairing, a: &Cdga) -> Result<Orientation> {
    if p.is_zero() {
        return Err(Error::Precondition("zero pairing induces no orientation".into()));
    }
    let n = p.degree();
    let one = a.unit_vector();
    let values = (0..a.dim(n)).map(|x| p.eval(n, &a.space().basis_vector(n, x), 0, &one)).collect();
    Orientation::new(n, values)
}

/// Checks graded symmetry, the differential sign rule and, for algebras, the cyclic product rule
/// on all basis tuples.
pub fn check_cyclic(complex: &Complex, product: Option<&Cdga>, p: &CyclicPairing) -> Vec<Violation> {
    let mut out = Vec::new();
    let field = complex.field();
    let n = p.degree();
    let sp = complex.space();
    let lbl = |d: usize, i: usize| sp.label(d, i).to_string();
    let dim = |d: usize| if d <= complex.max_degree() { complex.dim(d) } else { 0 };
    let e = |d: usize, i: usize| sp.basis_vector(d, i);
    let cap = 50;
    for i in 0..=n {
        let j = n - i;
        let s = Scalar::sign(field, koszul(i, j));
        for x in 0..dim(i) {
            for y in 0..dim(j) {
                let lhs = p.eval(i, &e(i, x), j, &e(j, y));
                let rhs = &s * &p.eval(j, &e(j, y), i, &e(i, x));
                if lhs != rhs && out.len() < cap {
                    out.push(Violation {
                        axiom: "symmetry".into(),
                        witness: vec![lbl(i, x), lbl(j, y)],
                        detail: format!("⟨v,w⟩ = {lhs} but (−1)^(|v||w|)⟨w,v⟩ = {rhs}"),
                    });
                }
            }
        }
    }
    // ⟨Dv₁, v₂⟩ = (−1)^{1+|v₁||v₂|} ⟨Dv₂, v₁⟩ with |v₁| + |v₂| = n − 1.
    if n >= 1 {
        for i in 0..n {
            let j = n - 1 - i;
            let s = Scalar::sign(field, 1 + koszul(i, j));
            for x in 0..dim(i) {
                let dx = complex.apply_d(i, &e(i, x));
                for y in 0..dim(j) {
                    let dy = complex.apply_d(j, &e(j, y));
                    let lhs = if dim(i + 1) > 0 { p.eval(i + 1, &dx, j, &e(j, y)) } else { field.zero() };
                    let rhs = if dim(j + 1) > 0 { &s * &p.eval(j + 1, &dy, i, &e(i, x)) } else { field.zero() };
                    if lhs != rhs && out.len() < cap {
                        out.push(Violation {
                            axiom: "differential cyclicity".into(),
                            witness: vec![lbl(i, x), lbl(j, y)],
                            detail: format!("⟨Dv,w⟩ = {lhs} but (−1)^(1+|v||w|)⟨Dw,v⟩ = {rhs}"),
                        });
                    }
                }
            }
        }
    }
    if let Some(a) = product {
        for i in 0..=n {
            for j in 0..=n - i {
                let k = n - i - j;
                let s = Scalar::sign(field, koszul(k, i + j));
                for x in 0..dim(i) {
                    for y in 0..dim(j) {
                        let xy = a.mul_basis(i, x, j, y);
                        for z in 0..dim(k) {
                            let lhs = p.eval(i + j, &xy, k, &e(k, z));
                            let zx = a.mul_basis(k, z, i, x);
                            let rhs = &s * &p.eval(k + i, &zx, j, &e(j, y));
                            if lhs != rhs && out.len() < cap {
                                out.push(Violation {
                                    axiom: "product cyclicity".into(),
                                    witness: vec![lbl(i, x), lbl(j, y), lbl(k, z)],
                                    detail: format!("⟨uv,w⟩ = {lhs} but the cyclic permutation gives {rhs}"),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn orientation_must_be_nonzero() {
        let q = Field::Rational;
        assert!(Orientation::new(2, vec![q.zero()]).is_err());
    }

    #[test]
    fn v2_pairing_values() {
        let (a, or) = corpus::v2(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        assert!(check_cyclic(a.complex(), Some(&a), &p).is_empty());
        let sp = a.space();
        let val = |x: &str, y: &str| {
            let (i, xi) = sp.find(x).unwrap();
            let (j, yi) = sp.find(y).unwrap();
            p.eval(i, &sp.basis_vector(i, xi), j, &sp.basis_vector(j, yi))
        };
        let one = Field::Rational.one();
        assert_eq!(val("k", "l"), one);
        assert_eq!(val("w", "z"), one);
        assert_eq!(val("1", "v"), one);
        assert_eq!(val("l", "k"), one);
        let back = orientation_from_pairing(&p, &a).unwrap();
        assert_eq!(back, or);
    }

    #[test]
    fn asymmetric_pairing_is_reported() {
        let (a, or) = corpus::v2(Field::Rational);
        let mut p = pairing_from_orientation(&a, &or);
        let (_, l) = a.space().find("l").unwrap();
        let (_, k) = a.space().find("k").unwrap();
        p.blocks[5].set(l, k, Field::Rational.from_i64(-1));
        let rep = check_cyclic(a.complex(), Some(&a), &p);
        assert!(rep.iter().any(|v| v.axiom == "symmetry"));
    }

    #[test]
    fn zero_pairing_passes_axioms_but_has_no_orientation() {
        let (a, _) = corpus::v2(Field::Rational);
        let p = CyclicPairing::zero(Field::Rational, 7, &a.dims());
        assert!(check_cyclic(a.complex(), Some(&a), &p).is_empty());
        assert!(orientation_from_pairing(&p, &a).is_err());
    }

    #[test]
    fn scaling_pairing_scales_orientation() {
        let (a, or) = corpus::v2(Field::Rational);
        let three = Field::Rational.from_i64(3);
        let p = pairing_from_orientation(&a, &or).scaled(&three);
        assert_eq!(orientation_from_pairing(&p, &a).unwrap(), or.scaled(&three).unwrap());
    }
}
