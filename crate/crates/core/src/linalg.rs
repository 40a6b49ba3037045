//! Dense exact linear algebra with deterministic pivoting.

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

pub type Vector = Vec<Scalar>;

pub fn zero_vector(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn unit_vector(field: Field, n: usize, i: usize) -> Vector {
    let mut v = zero_vector(field, n);
    v[i] = field.one();
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

/// `y += a * x`.
pub fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = &*yi + &(a * xi);
        }
    }
}

pub fn add_vectors(x: &[Scalar], y: &[Scalar]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub_vectors(x: &[Scalar], y: &[Scalar]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale_vector(a: &Scalar, x: &[Scalar]) -> Vector {
    x.iter().map(|v| a * v).collect()
}

pub fn dot(x: &[Scalar], y: &[Scalar], field: Field) -> Scalar {
    let mut acc = field.zero();
    for (a, b) in x.iter().zip(y) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * b);
        }
    }
    acc
}

/// Linear combination `Σ coeffs[j] * vectors[j]` in dimension `dim`.
pub fn combine(field: Field, dim: usize, coeffs: &[Scalar], vectors: &[Vector]) -> Vector {
    let mut out = zero_vector(field, dim);
    for (c, v) in coeffs.iter().zip(vectors) {
        axpy(&mut out, c, v);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: usize, cols: usize, entries: Vec<Vector>) -> Matrix {
        assert_eq!(entries.len(), rows, "row count");
        let mut data = Vec::with_capacity(rows * cols);
        for r in entries {
            assert_eq!(r.len(), cols, "row length");
            data.extend(r);
        }
        Matrix { field, rows, cols, data }
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Matrix::from_rows(field, rows.len(), cols, entries)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vector {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + &(a * b);
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length");
        let mut out = zero_vector(self.field, self.rows);
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                let a = self.get(r, c);
                if !a.is_zero() {
                    *o = &*o + &(a * x);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, a: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| a * x).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Result of row reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: Matrix,
}

/// Reduced row echelon form: the leftmost remaining column with a nonzero entry becomes the
/// next pivot column, and the topmost nonzero row below the current row supplies the pivot.
pub fn reduced_row_echelon(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a.get(row, col).inverse().expect("nonzero pivot");
        for c in col..a.cols {
            let v = a.get(row, c) * &inv;
            a.set(row, c, v);
        }
        let pivot_row: Vector = a.row(row);
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let factor = a.get(r, col).clone();
            if factor.is_zero() {
                continue;
            }
            for c in col..a.cols {
                if !pivot_row[c].is_zero() {
                    let v = a.get(r, c) - &(&factor * &pivot_row[c]);
                    a.set(r, c, v);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { rank: pivots.len(), pivots, reduced: a }
}

pub fn rank(m: &Matrix) -> usize {
    reduced_row_echelon(m).rank
}

/// Basis of the right kernel. Each vector has a 1 in its free column, 0 in the other free
/// columns, and vectors are ordered by free column.
pub fn kernel_basis(m: &Matrix) -> Vec<Vector> {
    let rref = reduced_row_echelon(m);
    let field = m.field();
    let mut is_pivot = vec![false; m.cols()];
    for &p in &rref.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut v = zero_vector(field, m.cols());
        v[free] = field.one();
        for (i, &p) in rref.pivots.iter().enumerate() {
            v[p] = -rref.reduced.get(i, free);
        }
        basis.push(v);
    }
    basis
}

/// A particular solution of `a x = b` with all free variables zero, or `None`.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Option<Vector> {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let aug = a.hstack(&Matrix::from_columns(a.field(), a.rows(), &[b.to_vec()]));
    let rref = reduced_row_echelon(&aug);
    if rref.pivots.last() == Some(&a.cols()) {
        return None;
    }
    let mut x = zero_vector(a.field(), a.cols());
    for (i, &p) in rref.pivots.iter().enumerate() {
        x[p] = rref.reduced.get(i, a.cols()).clone();
    }
    Some(x)
}

/// Solves `a X = B` column by column.
pub fn solve_matrix(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let cols: Option<Vec<Vector>> = b.columns().iter().map(|c| solve_linear(a, c)).collect();
    Some(Matrix::from_columns(a.field(), a.cols(), &cols?))
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let n = m.rows();
    let rref = reduced_row_echelon(&m.hstack(&Matrix::identity(m.field(), n)));
    if rref.pivots.len() < n || (n > 0 && rref.pivots[n - 1] >= n) {
        return None;
    }
    let mut inv = Matrix::zeros(m.field(), n, n);
    for r in 0..n {
        for c in 0..n {
            inv.set(r, c, rref.reduced.get(r, n + c).clone());
        }
    }
    Some(inv)
}

/// Standard basis vectors (by index) extending `sub` to a basis of the ambient space, found by
/// scanning `e_0, e_1, …` and keeping each vector outside the span so far.
pub fn complement_basis(field: Field, sub: &[Vector], dim: usize) -> Result<Vec<usize>> {
    let mut ech = Echelon::new(field, dim);
    for (i, v) in sub.iter().enumerate() {
        if !ech.insert(v) {
            return Err(Error::LinearlyDependent(format!("vector {i} lies in the span of the previous ones")));
        }
    }
    let mut out = Vec::new();
    for i in 0..dim {
        if ech.len() == dim {
            break;
        }
        if ech.insert(&unit_vector(field, dim, i)) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Incrementally maintained fully reduced echelon basis of a subspace of `K^dim`.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    dim: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Echelon {
        Echelon { field, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors(field: Field, dim: usize, vectors: &[Vector]) -> Echelon {
        let mut e = Echelon::new(field, dim);
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Residual of `v` after elimination against the stored rows.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let f = -&r[p];
                axpy(&mut r, &f, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    /// Adds `v` to the span; returns whether the span grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inverse().expect("nonzero");
        r = scale_vector(&inv, &r);
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = -&row[p];
                axpy(row, &f, &r);
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    /// Canonical basis: rows sorted by pivot (the RREF of the span).
    pub fn basis(&self) -> Vec<Vector> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        idx.into_iter().map(|i| self.rows[i].clone()).collect()
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// Canonical basis (RREF rows) of the span of `vectors`.
pub fn span_basis(field: Field, dim: usize, vectors: &[Vector]) -> Vec<Vector> {
    Echelon::from_vectors(field, dim, vectors).basis()
}

pub fn span_dim(field: Field, dim: usize, vectors: &[Vector]) -> usize {
    Echelon::from_vectors(field, dim, vectors).len()
}

pub fn is_independent(field: Field, dim: usize, vectors: &[Vector]) -> bool {
    span_dim(field, dim, vectors) == vectors.len()
}

/// Coordinates of `v` with respect to `basis` (vectors of length `dim`), if it lies in the span.
pub fn coordinates(field: Field, dim: usize, basis: &[Vector], v: &[Scalar]) -> Option<Vector> {
    if basis.is_empty() {
        return if is_zero_vector(v) { Some(Vec::new()) } else { None };
    }
    solve_linear(&Matrix::from_columns(field, dim, basis), v)
}

/// Indices of the candidates that extend the span of `base`, scanning in order.
pub fn extend_greedy(field: Field, dim: usize, base: &[Vector], candidates: &[Vector]) -> Vec<usize> {
    let mut ech = Echelon::from_vectors(field, dim, base);
    candidates
        .iter()
        .enumerate()
        .filter_map(|(i, c)| ech.insert(c).then_some(i))
        .collect()
}

/// Whether span(a) = span(b).
pub fn same_span(field: Field, dim: usize, a: &[Vector], b: &[Vector]) -> bool {
    span_basis(field, dim, a) == span_basis(field, dim, b)
}

/// Coordinates with respect to a fixed independent family, via a precomputed left inverse.
#[derive(Clone, Debug)]
pub struct CoordinateSystem {
    basis: Matrix,
    left_inverse: Matrix,
}

impl CoordinateSystem {
    pub fn new(field: Field, dim: usize, basis: &[Vector]) -> Result<CoordinateSystem> {
        let b = Matrix::from_columns(field, dim, basis);
        let k = basis.len();
        let left_inverse = if k == 0 {
            Matrix::zeros(field, 0, dim)
        } else {
            solve_matrix(&b.transpose(), &Matrix::identity(field, k))
                .ok_or_else(|| Error::LinearlyDependent("basis vectors are dependent".into()))?
                .transpose()
        };
        Ok(CoordinateSystem { basis: b, left_inverse })
    }

    pub fn len(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.cols() == 0
    }

    /// Coordinates of `v`, or `None` if `v` is outside the span.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vector> {
        let c = self.left_inverse.apply(v);
        (self.basis.apply(&c) == v).then_some(c)
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| q().from_i64(x)).collect()
    }

    #[test]
    fn rref_examples() {
        let id = Matrix::identity(q(), 2);
        let r = reduced_row_echelon(&id);
        assert_eq!((r.rank, r.pivots.clone()), (2, vec![0, 1]));
        let z = Matrix::zeros(q(), 3, 3);
        let r = reduced_row_echelon(&z);
        assert_eq!((r.rank, r.pivots.len()), (0, 0));
        let m = Matrix::from_i64(q(), &[&[1, 2], &[2, 4]]);
        let r = reduced_row_echelon(&m);
        assert_eq!((r.rank, r.pivots), (1, vec![0]));
        assert_eq!(r.reduced, Matrix::from_i64(q(), &[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&Matrix::identity(q(), 3)).is_empty());
        assert_eq!(kernel_basis(&Matrix::zeros(q(), 2, 2)).len(), 2);
        let k = kernel_basis(&Matrix::from_i64(q(), &[&[1, 1]]));
        assert_eq!(k, vec![v(&[-1, 1])]);
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_linear(&Matrix::identity(q(), 2), &v(&[3, 5])), Some(v(&[3, 5])));
        assert_eq!(solve_linear(&Matrix::zeros(q(), 2, 2), &v(&[1, 0])), None);
        let a = Matrix::from_i64(q(), &[&[2, 0], &[0, 0]]);
        let x = solve_linear(&a, &v(&[1, 0])).unwrap();
        assert_eq!(x, vec![q().ratio(1, 2).unwrap(), q().zero()]);
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement_basis(q(), &[v(&[1, 0])], 2).unwrap(), vec![1]);
        assert_eq!(complement_basis(q(), &[], 3).unwrap(), vec![0, 1, 2]);
        assert_eq!(complement_basis(q(), &[v(&[1, 1])], 2).unwrap(), vec![0]);
        assert!(complement_basis(q(), &[v(&[1, 1]), v(&[2, 2])], 2).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_i64(q(), &[&[2, 1], &[1, 1]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(q(), 2));
        assert!(inverse(&Matrix::from_i64(q(), &[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(inverse(&Matrix::zeros(q(), 0, 0)), Some(Matrix::zeros(q(), 0, 0)));
    }

    #[test]
    fn prime_field_elimination() {
        let f = Field::prime(3).unwrap();
        let m = Matrix::from_i64(f, &[&[1, 1], &[1, 4]]);
        assert_eq!(rank(&m), 1);
        assert_eq!(kernel_basis(&m), vec![vec![f.from_i64(-1), f.one()]]);
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new(q(), 3);
        assert!(e.insert(&v(&[1, 2, 0])));
        assert!(e.insert(&v(&[0, 1, 1])));
        assert!(!e.insert(&v(&[1, 3, 1])));
        assert!(e.contains(&v(&[2, 5, 1])));
        assert!(!e.contains(&v(&[0, 0, 1])));
        assert_eq!(e.basis(), vec![v(&[1, 0, -2]), v(&[0, 1, 1])]);
    }
}
