//! Graded vector spaces, graded linear maps and cochain complexes.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{self, Matrix, Vector};

/// Non-negatively graded space with named basis vectors in each degree `0..=max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    field: Field,
    labels: Vec<Vec<String>>,
}

impl GradedSpace {
    pub fn new(field: Field, mut labels: Vec<Vec<String>>) -> Result<GradedSpace> {
        if labels.is_empty() {
            labels.push(Vec::new());
        }
        let mut seen = HashSet::new();
        for l in labels.iter().flatten() {
            if l.is_empty() {
                return Err(Error::Malformed("empty basis label".into()));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::Malformed(format!("duplicate basis label {l:?}")));
            }
        }
        Ok(GradedSpace { field, labels })
    }

    /// Space with generated labels `{prefix}{degree}_{index}`.
    pub fn anonymous(field: Field, dims: &[usize], prefix: &str) -> GradedSpace {
        let labels = dims
            .iter()
            .enumerate()
            .map(|(d, &n)| (0..n).map(|i| format!("{prefix}{d}_{i}")).collect())
            .collect();
        GradedSpace::new(field, labels).expect("generated labels are unique")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn dim(&self, d: usize) -> usize {
        self.labels.get(d).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    pub fn labels(&self, d: usize) -> &[String] {
        self.labels.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn all_labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn label(&self, d: usize, i: usize) -> &str {
        &self.labels[d][i]
    }

    pub fn find(&self, label: &str) -> Option<(usize, usize)> {
        self.labels
            .iter()
            .enumerate()
            .find_map(|(d, ls)| ls.iter().position(|l| l == label).map(|i| (d, i)))
    }

    pub fn zero(&self, d: usize) -> Vector {
        linalg::zero_vector(self.field, self.dim(d))
    }

    pub fn basis_vector(&self, d: usize, i: usize) -> Vector {
        linalg::unit_vector(self.field, self.dim(d), i)
    }

    pub fn standard_basis(&self, d: usize) -> Vec<Vector> {
        (0..self.dim(d)).map(|i| self.basis_vector(d, i)).collect()
    }

    /// Human-readable form of a homogeneous vector, e.g. `2*k - 1/2*w`.
    pub fn format_vector(&self, d: usize, v: &[crate::field::Scalar]) -> String {
        let mut parts = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let l = self.label(d, i);
            if c.is_one() {
                parts.push(l.to_string());
            } else {
                parts.push(format!("{c}*{l}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Linear map raising degree by `shift`; `blocks[d]` maps degree `d` of the source into degree
/// `d + shift` of the target (a matrix with zero rows when that degree does not exist).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    field: Field,
    shift: isize,
    source_dims: Vec<usize>,
    target_dims: Vec<usize>,
    blocks: Vec<Matrix>,
}

fn shifted(d: usize, shift: isize) -> Option<usize> {
    let t = d as isize + shift;
    (t >= 0).then_some(t as usize)
}

impl GradedMap {
    pub fn new(field: Field, shift: isize, source_dims: Vec<usize>, target_dims: Vec<usize>, blocks: Vec<Matrix>) -> Result<GradedMap> {
        if blocks.len() != source_dims.len() {
            return Err(Error::Malformed("one block per source degree required".into()));
        }
        for (d, b) in blocks.iter().enumerate() {
            let rows = shifted(d, shift).map_or(0, |t| target_dims.get(t).copied().unwrap_or(0));
            if b.cols() != source_dims[d] || b.rows() != rows {
                return Err(Error::Malformed(format!(
                    "block in degree {d} is {}x{}, expected {rows}x{}",
                    b.rows(),
                    b.cols(),
                    source_dims[d]
                )));
            }
        }
        Ok(GradedMap { field, shift, source_dims, target_dims, blocks })
    }

    pub fn zero(field: Field, shift: isize, source_dims: &[usize], target_dims: &[usize]) -> GradedMap {
        let blocks = source_dims
            .iter()
            .enumerate()
            .map(|(d, &n)| {
                let rows = shifted(d, shift).map_or(0, |t| target_dims.get(t).copied().unwrap_or(0));
                Matrix::zeros(field, rows, n)
            })
            .collect();
        GradedMap { field, shift, source_dims: source_dims.to_vec(), target_dims: target_dims.to_vec(), blocks }
    }

    pub fn identity(field: Field, dims: &[usize]) -> GradedMap {
        let blocks = dims.iter().map(|&n| Matrix::identity(field, n)).collect();
        GradedMap { field, shift: 0, source_dims: dims.to_vec(), target_dims: dims.to_vec(), blocks }
    }

    /// Degree-0 map given by one column per source basis vector.
    pub fn from_columns(field: Field, source_dims: &[usize], target_dims: &[usize], columns: Vec<Vec<Vector>>) -> Result<GradedMap> {
        let blocks = columns
            .iter()
            .enumerate()
            .map(|(d, cols)| Matrix::from_columns(field, target_dims.get(d).copied().unwrap_or(0), cols))
            .collect();
        GradedMap::new(field, 0, source_dims.to_vec(), target_dims.to_vec(), blocks)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn shift(&self) -> isize {
        self.shift
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn target_dims(&self) -> &[usize] {
        &self.target_dims
    }

    pub fn block(&self, d: usize) -> &Matrix {
        &self.blocks[d]
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn target_degree(&self, d: usize) -> Option<usize> {
        shifted(d, self.shift).filter(|&t| t < self.target_dims.len())
    }

    /// Image of a degree-`d` vector (empty vector when the target degree does not exist).
    pub fn apply(&self, d: usize, v: &[crate::field::Scalar]) -> Vector {
        match self.blocks.get(d) {
            Some(b) => b.apply(v),
            None => Vec::new(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if other.target_dims != self.source_dims {
            return Err(Error::Precondition("composition of maps with mismatched spaces".into()));
        }
        let blocks = (0..other.source_dims.len())
            .map(|d| {
                let rows = shifted(d, other.shift + self.shift)
                    .map_or(0, |t| self.target_dims.get(t).copied().unwrap_or(0));
                match other.target_degree(d) {
                    Some(t) => self.blocks[t].mul(&other.blocks[d]),
                    None => Matrix::zeros(self.field, rows, other.source_dims[d]),
                }
            })
            .collect();
        GradedMap::new(self.field, self.shift + other.shift, other.source_dims.clone(), self.target_dims.clone(), blocks)
    }
}

/// Finite cochain complex: `diff[d]` maps degree `d` to degree `d + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    space: GradedSpace,
    diff: Vec<Matrix>,
}

impl Complex {
    pub fn new(space: GradedSpace, diff: Vec<Matrix>) -> Result<Complex> {
        if diff.len() != space.max_degree() + 1 {
            return Err(Error::Malformed("one differential block per degree required".into()));
        }
        for (d, m) in diff.iter().enumerate() {
            if m.cols() != space.dim(d) || m.rows() != space.dim(d + 1) {
                return Err(Error::Malformed(format!("differential block in degree {d} has wrong shape")));
            }
        }
        Ok(Complex { space, diff })
    }

    pub fn zero_differential(space: GradedSpace) -> Complex {
        let diff = (0..=space.max_degree())
            .map(|d| Matrix::zeros(space.field(), space.dim(d + 1), space.dim(d)))
            .collect();
        Complex { space, diff }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    pub fn max_degree(&self) -> usize {
        self.space.max_degree()
    }

    pub fn dim(&self, d: usize) -> usize {
        self.space.dim(d)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.space.dims()
    }

    /// Matrix of `D: V^d → V^{d+1}`; an empty matrix beyond the top degree.
    pub fn d(&self, d: usize) -> Matrix {
        match self.diff.get(d) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.field(), 0, 0),
        }
    }

    pub fn d_ref(&self, d: usize) -> &Matrix {
        &self.diff[d]
    }

    /// `D v` for `v` in degree `d`.
    pub fn apply_d(&self, d: usize, v: &[crate::field::Scalar]) -> Vector {
        match self.diff.get(d) {
            Some(m) => m.apply(v),
            None => Vec::new(),
        }
    }

    pub fn differential_map(&self) -> GradedMap {
        GradedMap::new(self.field(), 1, self.dims(), self.dims(), self.diff.clone()).expect("shapes checked")
    }

    /// Basis of `ker D` in degree `d` (kernel normal form).
    pub fn cycles(&self, d: usize) -> Vec<Vector> {
        if d > self.max_degree() {
            return Vec::new();
        }
        linalg::kernel_basis(&self.diff[d])
    }

    /// Basis of `im D` in degree `d`: images of the standard basis of degree `d-1`, reduced to a
    /// linearly independent subset in scan order.
    pub fn boundaries(&self, d: usize) -> Vec<Vector> {
        if d == 0 || d > self.max_degree() {
            return Vec::new();
        }
        let images = self.diff[d - 1].columns();
        let keep = linalg::extend_greedy(self.field(), self.dim(d), &[], &images);
        keep.into_iter().map(|i| images[i].clone()).collect()
    }

    pub fn with_space(&self, space: GradedSpace) -> Result<Complex> {
        Complex::new(space, self.diff.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_labels_rejected() {
        let q = Field::Rational;
        let r = GradedSpace::new(q, vec![vec!["1".into()], vec!["x".into(), "x".into()]]);
        assert!(r.is_err());
    }

    #[test]
    fn composition_tracks_shifts() {
        let q = Field::Rational;
        let dims = vec![1, 1, 1];
        let up = GradedMap::new(
            q,
            1,
            dims.clone(),
            dims.clone(),
            vec![Matrix::from_i64(q, &[&[2]]), Matrix::from_i64(q, &[&[3]]), Matrix::zeros(q, 0, 1)],
        )
        .unwrap();
        let twice = up.compose(&up).unwrap();
        assert_eq!(twice.shift(), 2);
        assert_eq!(twice.block(0), &Matrix::from_i64(q, &[&[6]]));
        assert_eq!(twice.block(1).rows(), 0);
    }
}
