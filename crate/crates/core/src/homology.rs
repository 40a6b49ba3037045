//! Homology of cochain complexes and the structures it inherits.

use serde::Serialize;

use crate::algebra::Cdga;
use crate::field::{Field, Scalar};
use crate::graded::Complex;
use crate::linalg::{self, CoordinateSystem, Echelon, Vector};
use crate::orientation::{CyclicPairing, Orientation};

/// Homology in one degree.
#[derive(Clone, Debug)]
pub struct HomologyDegree {
    pub cycles: Vec<Vector>,
    pub boundaries: Vec<Vector>,
    /// Kernel-basis vectors not in the span of the boundaries and earlier representatives.
    pub representatives: Vec<Vector>,
    coords: CoordinateSystem,
}

#[derive(Clone, Debug)]
pub struct Homology {
    field: Field,
    degrees: Vec<HomologyDegree>,
}

pub fn homology(c: &Complex) -> Homology {
    let field = c.field();
    let degrees = (0..=c.max_degree())
        .map(|d| {
            let dim = c.dim(d);
            let cycles = c.cycles(d);
            let boundaries = c.boundaries(d);
            let mut ech = Echelon::from_vectors(field, dim, &boundaries);
            let representatives: Vec<Vector> = cycles.iter().filter(|z| ech.insert(z)).cloned().collect();
            let mut family = representatives.clone();
            family.extend(boundaries.iter().cloned());
            let coords = CoordinateSystem::new(field, dim, &family).expect("representatives and boundaries are independent");
            HomologyDegree { cycles, boundaries, representatives, coords }
        })
        .collect();
    Homology { field, degrees }
}

impl Homology {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn dim(&self, d: usize) -> usize {
        self.degrees.get(d).map_or(0, |h| h.representatives.len())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|h| h.representatives.len()).collect()
    }

    pub fn degree(&self, d: usize) -> Option<&HomologyDegree> {
        self.degrees.get(d)
    }

    pub fn representatives(&self, d: usize) -> &[Vector] {
        self.degrees.get(d).map_or(&[], |h| h.representatives.as_slice())
    }

    pub fn boundaries(&self, d: usize) -> &[Vector] {
        self.degrees.get(d).map_or(&[], |h| h.boundaries.as_slice())
    }

    /// Coordinates of the class of a cycle in the representative basis; `None` if `z` is not a
    /// cycle.
    pub fn class_of(&self, d: usize, z: &[Scalar]) -> Option<Vector> {
        let h = self.degrees.get(d)?;
        let c = h.coords.coords(z)?;
        Some(c[..h.representatives.len()].to_vec())
    }

    /// Whether `v` is exact.
    pub fn is_boundary(&self, d: usize, v: &[Scalar]) -> bool {
        match self.class_of(d, v) {
            Some(c) => linalg::is_zero_vector(&c),
            None => false,
        }
    }
}

/// `Or_H([v]) = Or(v)` on the representative basis of `H^n`.
pub fn induced_orientation(or: &Orientation, h: &Homology) -> Vector {
    let n = or.degree();
    h.representatives(n).iter().map(|z| or.eval(n, z)).collect()
}

/// `⟨[v₁],[v₂]⟩_H = ⟨v₁, v₂⟩` on representatives.
pub fn induced_pairing(p: &CyclicPairing, h: &Homology) -> CyclicPairing {
    let n = p.degree();
    let blocks = (0..=n)
        .map(|i| {
            let xs = h.representatives(i);
            let ys = h.representatives(n - i);
            if xs.is_empty() || ys.is_empty() {
                linalg::Matrix::zeros(h.field(), xs.len(), ys.len())
            } else {
                p.gram_between(i, xs, ys)
            }
        })
        .collect();
    CyclicPairing::new(h.field(), n, &h.dims(), blocks).expect("shapes")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub degree: usize,
    #[serde(rename = "orientationClosed")]
    pub orientation_closed: bool,
    #[serde(rename = "isPDGA")]
    pub is_pdga: bool,
    #[serde(rename = "isDPD")]
    pub is_dpd: bool,
    pub connected: bool,
    #[serde(rename = "simplyConnected")]
    pub simply_connected: bool,
    #[serde(rename = "homologyConnected")]
    pub homology_connected: bool,
    #[serde(rename = "homologySimplyConnected")]
    pub homology_simply_connected: bool,
    /// Highest degree in which homology was trusted (absent when untruncated).
    #[serde(rename = "trustedDegree", skip_serializing_if = "Option::is_none")]
    pub trusted_degree: Option<usize>,
}

/// Poincaré-duality flags of an oriented algebra, assuming the CDGA axioms hold.
pub fn classify(a: &Cdga, or: &Orientation) -> Classification {
    let n = or.degree();
    let h = homology(a.complex());
    let trusted = a.trusted_degree();
    let orientation_closed = or.check_closed(a.complex());
    let p = crate::orientation::pairing_from_orientation(a, or);
    let hp = induced_pairing(&p, &h);
    let full = |m: &linalg::Matrix| {
        let r = linalg::rank(m);
        r == m.rows() && r == m.cols()
    };
    let top_h = h.max_degree().min(trusted);
    let homology_vanishes_above_n = (n + 1..=top_h).all(|d| h.dim(d) == 0);
    let is_pdga = orientation_closed
        && n <= trusted
        && homology_vanishes_above_n
        && (0..=n).all(|i| full(hp.gram_ref(i)));
    let is_dpd = orientation_closed
        && a.truncation().is_none_or(|t| t > n)
        && (n + 1..=a.max_degree()).all(|d| a.dim(d) == 0)
        && p.is_nondegenerate();
    let connected = a.dim(0) == 1;
    let homology_connected = h.dim(0) == 1;
    Classification {
        degree: n,
        orientation_closed,
        is_pdga,
        is_dpd,
        connected,
        simply_connected: connected && a.dim(1) == 0,
        homology_connected,
        homology_simply_connected: homology_connected && h.dim(1) == 0,
        trusted_degree: a.truncation().map(|_| trusted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn v2_homology_and_classification() {
        let (a, or) = corpus::v2(Field::Rational);
        let h = homology(a.complex());
        assert_eq!(h.dims(), vec![1, 0, 1, 0, 0, 1, 0, 1]);
        assert_eq!(induced_orientation(&or, &h), vec![Field::Rational.one()]);
        let c = classify(&a, &or);
        assert!(c.is_dpd && c.is_pdga && c.connected && c.simply_connected);
        assert_eq!(c.degree, 7);
    }

    #[test]
    fn acyclic_pair_has_trivial_homology() {
        let a = corpus::acyclic_wz(Field::Rational);
        let h = homology(a.complex());
        assert_eq!(h.dims().iter().sum::<usize>(), 1);
        assert_eq!(h.dim(0), 1);
    }

    #[test]
    fn class_projection_kills_boundaries() {
        let (a, _) = corpus::v2(Field::Rational);
        let h = homology(a.complex());
        let (d, z) = a.space().find("z").unwrap();
        assert!(h.is_boundary(d, &a.space().basis_vector(d, z)));
        let (d, w) = a.space().find("w").unwrap();
        assert_eq!(h.class_of(d, &a.space().basis_vector(d, w)), None);
    }
}
