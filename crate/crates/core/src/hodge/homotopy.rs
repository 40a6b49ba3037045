//! The standard homotopy `h(Dc) = −c`, zero on `H ⊕ C`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{Complex, GradedMap};
use crate::linalg::{self, Matrix, Vector};

use super::HodgeData;

#[derive(Clone, Debug)]
pub struct HodgeHomotopy {
    /// Degree −1 map.
    pub h: GradedMap,
    /// `ι_H π_H` per degree.
    pub harmonic_projection: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomotopyReport {
    /// `hD + Dh = ι_H π_H − Id` on every basis vector.
    #[serde(rename = "commRel")]
    pub comm_rel: bool,
    #[serde(rename = "squareZero")]
    pub square_zero: bool,
    #[serde(rename = "killsHarmonicAndCoexact")]
    pub kills_h_and_c: bool,
    pub problems: Vec<String>,
}

impl HomotopyReport {
    pub fn all_pass(&self) -> bool {
        self.comm_rel && self.square_zero && self.kills_h_and_c
    }
}

/// Builds `h` from the change of basis to `[H | D(C^{d−1}) | C^d]` in each degree.
pub fn standard_homotopy(complex: &Complex, hd: &HodgeData) -> Result<HodgeHomotopy> {
    let field = complex.field();
    let top = complex.max_degree();
    let dims = complex.dims();
    let mut blocks = Vec::with_capacity(top + 1);
    let mut proj = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let hs = hd.harmonic(d);
        let bs = hd.exact(complex, d);
        let mut cols: Vec<Vector> = hs.to_vec();
        cols.extend(bs.iter().cloned());
        cols.extend(hd.coexact(d).iter().cloned());
        let p = Matrix::from_columns(field, complex.dim(d), &cols);
        if cols.len() != complex.dim(d) {
            return Err(Error::Malformed(format!("H ⊕ im D ⊕ C has the wrong dimension in degree {d}")));
        }
        let inv = linalg::inverse(&p).ok_or_else(|| {
            Error::Malformed(format!("D is not injective on C^{} or the decomposition is not direct", d.saturating_sub(1)))
        })?;
        let rows = |from: usize, len: usize| Matrix::from_rows(field, len, complex.dim(d), (from..from + len).map(|r| inv.row(r)).collect());
        let pi_h = rows(0, hs.len());
        proj.push(Matrix::from_columns(field, complex.dim(d), hs).mul(&pi_h));
        if d == 0 {
            blocks.push(Matrix::zeros(field, 0, complex.dim(0)));
            continue;
        }
        let pi_b = rows(hs.len(), bs.len());
        let c_prev = Matrix::from_columns(field, complex.dim(d - 1), hd.coexact(d - 1));
        blocks.push(c_prev.mul(&pi_b).scale(&field.from_i64(-1)));
    }
    let target: Vec<usize> = dims.clone();
    let h = GradedMap::new(field, -1, dims, target, blocks)?;
    Ok(HodgeHomotopy { h, harmonic_projection: proj })
}

/// Re-derives the homotopy identities from the matrices.
pub fn verify_homotopy(complex: &Complex, hd: &HodgeData, hh: &HodgeHomotopy) -> HomotopyReport {
    let field = complex.field();
    let top = complex.max_degree();
    let mut problems = Vec::new();
    let h = |d: usize| hh.h.block(d);
    let mut comm_rel = true;
    let mut square_zero = true;
    let mut kills = true;
    for d in 0..=top {
        let n = complex.dim(d);
        let mut lhs = Matrix::zeros(field, n, n);
        if d < top {
            lhs = lhs.add(&h(d + 1).mul(complex.d_ref(d)));
        }
        if d > 0 {
            lhs = lhs.add(&complex.d_ref(d - 1).mul(h(d)));
        }
        let rhs = hh.harmonic_projection[d].sub(&Matrix::identity(field, n));
        if lhs != rhs {
            comm_rel = false;
            problems.push(format!("hD + Dh ≠ ι_H π_H − Id in degree {d}"));
        }
        if d >= 2 && !h(d - 1).mul(h(d)).is_zero() {
            square_zero = false;
            problems.push(format!("h∘h ≠ 0 on degree {d}"));
        }
        if hd.harmonic(d).iter().chain(hd.coexact(d)).any(|v| !linalg::is_zero_vector(&hh.h.apply(d, v))) {
            kills = false;
            problems.push(format!("h does not vanish on H ⊕ C in degree {d}"));
        }
    }
    HomotopyReport { comm_rel, square_zero, kills_h_and_c: kills, problems }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::field::Field;
    use crate::hodge::h_orthogonalize;
    use crate::orientation::pairing_from_orientation;

    #[test]
    fn v2_homotopy_sends_z_to_minus_w() {
        let (a, or) = corpus::v2(Field::Rational);
        let p = pairing_from_orientation(&a, &or);
        let hd = h_orthogonalize(a.complex(), &p, None).unwrap();
        let hh = standard_homotopy(a.complex(), &hd).unwrap();
        assert!(verify_homotopy(a.complex(), &hd, &hh).all_pass());
        let (dz, z) = a.space().find("z").unwrap();
        let (dw, w) = a.space().find("w").unwrap();
        assert_eq!(dz, dw + 1);
        let expected = linalg::scale_vector(&Field::Rational.from_i64(-1), &a.space().basis_vector(dw, w));
        assert_eq!(hh.h.apply(dz, &a.space().basis_vector(dz, z)), expected);
        for d in 0..=a.max_degree() {
            for i in 0..a.dim(d) {
                if (d, i) != (dz, z) {
                    assert!(linalg::is_zero_vector(&hh.h.apply(d, &a.space().basis_vector(d, i))));
                }
            }
        }
    }

    #[test]
    fn acyclic_pair() {
        let a = corpus::acyclic_wz(Field::Rational);
        let hd = HodgeData {
            harmonic: (0..=a.max_degree()).map(|d| if d == 0 { vec![a.unit_vector()] } else { vec![] }).collect(),
            coexact: (0..=a.max_degree())
                .map(|d| if d == 3 || d == 7 { a.space().standard_basis(d) } else { vec![] })
                .collect(),
        };
        let hh = standard_homotopy(a.complex(), &hd).unwrap();
        let rep = verify_homotopy(a.complex(), &hd, &hh);
        assert!(rep.all_pass(), "{:?}", rep.problems);
        let z = a.space().basis_vector(4, 0);
        assert_eq!(hh.h.apply(4, &z), vec![Field::Rational.from_i64(-1)]);
    }

    #[test]
    fn zero_differential_gives_zero_homotopy() {
        let (a, _) = corpus::cp2_sum7(Field::Rational);
        let hd = HodgeData {
            harmonic: (0..=a.max_degree()).map(|d| a.space().standard_basis(d)).collect(),
            coexact: vec![Vec::new(); a.max_degree() + 1],
        };
        let hh = standard_homotopy(a.complex(), &hd).unwrap();
        assert!(hh.h.blocks().iter().all(Matrix::is_zero));
        assert!(verify_homotopy(a.complex(), &hd, &hh).all_pass());
    }
}
