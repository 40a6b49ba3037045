//! Seeded random instances: oriented algebras with and without Hodge decompositions, and bare
//! cyclic complexes.
//!
//! Algebras start from a small Poincaré duality core. Non-Hodge instances adjoin acyclic pairs
//! `c → b` whose `c`'s pair with each other through the orientation while the `b`'s pair with
//! nothing. Hodge-type instances tensor the core with a truncated acyclic `Λ(w, z)`. Both are
//! finished by a unipotent change of basis with the orientation carried along.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{build_truncated_free, change_basis, tensor_product, Cdga, FreeGenerator, FreePresentation};
use crate::corpus;
use crate::document::{algebra_from_doc, algebra_to_doc, Coeff, ParseOptions};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::graded::{Complex, GradedMap, GradedSpace};
use crate::linalg::{self, Matrix};
use crate::orientation::{CyclicPairing, Orientation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero(rng: &mut impl Rng) -> i64 {
    let v = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// Upper unitriangular matrix with small integer entries; column `fixed` stays a basis vector.
pub fn unipotent(field: Field, n: usize, fixed: Option<usize>, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::identity(field, n);
    for c in 0..n {
        if Some(c) == fixed {
            continue;
        }
        for r in 0..c {
            let v = rng.gen_range(-2..=2);
            m.set(r, c, field.from_i64(v));
        }
    }
    m
}

/// Rewrites `a` in a random unipotent basis fixing the unit.
pub fn scramble(a: &Cdga, or: &Orientation, rng: &mut impl Rng) -> Result<(Cdga, Orientation)> {
    let (b, or, _) = scramble_with_map(a, or, rng)?;
    Ok((b, or))
}

/// As [`scramble`], also returning the isomorphism from the new algebra back to `a`.
pub fn scramble_with_map(a: &Cdga, or: &Orientation, rng: &mut impl Rng) -> Result<(Cdga, Orientation, GradedMap)> {
    let mats: Vec<Matrix> = (0..=a.max_degree())
        .map(|d| unipotent(a.field(), a.dim(d), (d == 0).then(|| a.unit_index()), rng))
        .collect();
    let b = change_basis(a, &mats)?;
    let or = or.transport(&mats[or.degree()])?;
    let back = GradedMap::new(a.field(), 0, a.dims(), a.dims(), mats)?;
    Ok((b, or, back))
}

/// A top-degree vector with orientation value 1.
fn fundamental(or: &Orientation) -> Result<Vec<(usize, Scalar)>> {
    let (k, c) = or
        .functional()
        .iter()
        .enumerate()
        .find(|(_, c)| !c.is_zero())
        .ok_or_else(|| Error::Precondition("zero orientation".into()))?;
    Ok(vec![(k, c.inverse()?)])
}

/// Adjoins acyclic pairs `c_p → b_{p+1}` for the given degrees. Products among the `c`'s land
/// in the top degree with coefficients from `pairing(i, j)` (for `i < j`, or `i == j` in even
/// degree); every other new product vanishes.
pub fn adjoin_pairs(
    core: &Cdga,
    or: &Orientation,
    degrees: &[usize],
    mut pairing: impl FnMut(usize, usize) -> i64,
    name: &str,
) -> Result<(Cdga, Orientation)> {
    let n = or.degree();
    if degrees.iter().any(|&p| p + 1 > n) {
        return Err(Error::Precondition(format!("pair degrees must stay below {n}")));
    }
    let field = core.field();
    let mut doc = algebra_to_doc(core, Some(or));
    doc.presentation = None;
    doc.name = name.into();
    let labels = doc.degrees.as_mut().expect("emitted documents list degrees");
    labels.resize(labels.len().max(n + 1), Vec::new());
    let mut cs = Vec::new();
    for (i, &p) in degrees.iter().enumerate() {
        let (c, b) = (format!("c{p}_{i}"), format!("b{}_{i}", p + 1));
        labels[p].push(c.clone());
        labels[p + 1].push(b.clone());
        doc.differential.push((c.clone(), b, Coeff::Int(1)));
        cs.push((p, c));
    }
    let top: Vec<(String, Scalar)> =
        fundamental(or)?.into_iter().map(|(k, s)| (core.space().label(n, k).to_string(), s)).collect();
    for i in 0..cs.len() {
        for j in i..cs.len() {
            let ((p, x), (q, y)) = (&cs[i], &cs[j]);
            if p + q != n || (i == j && p % 2 == 1) {
                continue;
            }
            let lambda = pairing(i, j);
            if lambda == 0 {
                continue;
            }
            let sign = if (p * q) % 2 == 1 { -1 } else { 1 };
            for (t, s) in &top {
                let v = &field.from_i64(lambda) * s;
                doc.product.push((x.clone(), y.clone(), t.clone(), Coeff::Text(v.to_string())));
                if i != j {
                    let w = &field.from_i64(lambda * sign) * s;
                    doc.product.push((y.clone(), x.clone(), t.clone(), Coeff::Text(w.to_string())));
                }
            }
        }
    }
    let (a, or) = algebra_from_doc(&doc, ParseOptions::default())?;
    Ok((a, or.expect("orientation carried over")))
}

/// Poincaré duality cores of degree `n`.
fn core(field: Field, n: usize, rng: &mut impl Rng) -> (Cdga, Orientation) {
    let mut options: Vec<usize> = (2..=n - 2).collect();
    if n == 7 {
        options.push(0);
        options.push(1);
    }
    match *options.choose(rng).expect("n ≥ 4") {
        0 => corpus::v2(field),
        1 => corpus::v1(field),
        p => corpus::sphere_product(field, p, n - p),
    }
}

/// Non-Hodge oriented algebra of degree 5, 6 or 7: a core plus one (two for odd `n`) acyclic pairs in
/// complementary degrees `p + q = n` (`p, q ≥ 2`) with random cross products.
pub fn random_pdga(seed: u64, field: Field) -> Result<(Cdga, Orientation)> {
    let mut rng = rng(seed);
    let n = rng.gen_range(5..=7);
    let (c, or) = core(field, n, &mut rng);
    let splits: Vec<usize> = (2..=n - 2).collect();
    // Two pairs in even degree push the extension past 60 dimensions per degree.
    let pairs = if n % 2 == 1 { rng.gen_range(1..=2) } else { 1 };
    let mut degrees = Vec::new();
    for _ in 0..pairs {
        let p = *splits.choose(&mut rng).expect("n ≥ 4");
        degrees.push(p);
        degrees.push(n - p);
    }
    // Partners (2k, 2k+1) always pair; other complementary pairs are random.
    let coeffs: Vec<i64> = (0..degrees.len() * degrees.len()).map(|_| rng.gen_range(-2..=2)).collect();
    let forced: Vec<i64> = (0..pairs).map(|_| nonzero(&mut rng)).collect();
    let len = degrees.len();
    let (a, or) = adjoin_pairs(
        &c,
        &or,
        &degrees,
        |i, j| if j == i + 1 && i % 2 == 0 { forced[i / 2] } else if i == j { 0 } else { coeffs[i * len + j] },
        &format!("random-pdga-{seed}"),
    )?;
    scramble(&a, &or, &mut rng)
}

/// Hodge-type oriented algebra: a core of degree 4..7 tensored with `Λ(w, z)`, `Dw = z`,
/// truncated at `n + 2`, oriented by the core.
pub fn random_hodge(seed: u64, field: Field) -> Result<(Cdga, Orientation)> {
    let mut rng = rng(seed);
    let n = rng.gen_range(4..=7);
    let (c, or) = core(field, n, &mut rng);
    let t = n + 2;
    let w = *[1usize, 3, 5].choose(&mut rng).expect("nonempty");
    let w = if w + 1 > t { 3 } else { w };
    let lambda = build_truncated_free(
        "wz",
        &FreePresentation {
            field,
            generators: vec![
                FreeGenerator { name: "w".into(), degree: w, differential: vec![(field.one(), vec![0, 1])] },
                FreeGenerator { name: "z".into(), degree: w + 1, differential: vec![] },
            ],
            truncation: t,
        },
    )?;
    let tp = tensor_product(&c, &lambda, t)?;
    let r = tp.retraction_left(&c, &lambda);
    let values = (0..tp.algebra.dim(n))
        .map(|x| or.eval(n, &r.apply(n, &tp.algebra.space().basis_vector(n, x))))
        .collect();
    let or = Orientation::new(n, values)?;
    let a = tp.algebra.with_name(&format!("random-hodge-{seed}"));
    scramble(&a, &or, &mut rng)
}

fn koszul(i: usize, j: usize) -> usize {
    (i * j) % 2
}

/// Random cyclic complex of degree `2..=7`: harmonic pieces and acyclic pairs, with a pairing
/// drawn from the solutions of the symmetry and differential sign rules. Some solutions are
/// degenerate on the acyclic part and some on homology.
pub fn random_cyclic_complex(seed: u64, field: Field) -> Result<(Complex, CyclicPairing)> {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=7);
    let mut dims = vec![0usize; n + 1];
    for i in 0..=n / 2 {
        let h = if i == 0 { 1 } else { rng.gen_range(0..=1) };
        dims[i] += h;
        if n - i != i {
            dims[n - i] += h;
        } else if h == 1 && i % 2 == 1 {
            dims[i] += 1;
        }
    }
    let mut arrows = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let p = rng.gen_range(0..n);
        arrows.push((p, dims[p], dims[p + 1]));
        dims[p] += 1;
        dims[p + 1] += 1;
    }
    let mut diff: Vec<Matrix> = (0..=n).map(|d| Matrix::zeros(field, if d < n { dims[d + 1] } else { 0 }, dims[d])).collect();
    for &(p, src, dst) in &arrows {
        diff[p].set(dst, src, field.one());
    }
    let space = GradedSpace::anonymous(field, &dims, "e");
    let complex = Complex::new(space, diff)?;

    // Unknowns: entries of every Gram block, block i of shape dims[i] × dims[n−i].
    let mut offset = vec![0usize; n + 2];
    for i in 0..=n {
        offset[i + 1] = offset[i] + dims[i] * dims[n - i];
    }
    let unknowns = offset[n + 1];
    let var = |i: usize, x: usize, y: usize| offset[i] + x * dims[n - i] + y;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..=n {
        let j = n - i;
        let s = Scalar::sign(field, koszul(i, j));
        for x in 0..dims[i] {
            for y in 0..dims[j] {
                let mut r = vec![field.zero(); unknowns];
                r[var(i, x, y)] = &r[var(i, x, y)] + &field.one();
                r[var(j, y, x)] = &r[var(j, y, x)] - &s;
                rows.push(r);
            }
        }
    }
    for i in 0..n {
        let j = n - 1 - i;
        let s = Scalar::sign(field, 1 + koszul(i, j));
        for x in 0..dims[i] {
            for y in 0..dims[j] {
                let mut r = vec![field.zero(); unknowns];
                let dx = complex.apply_d(i, &complex.space().basis_vector(i, x));
                for (k, c) in dx.iter().enumerate() {
                    r[var(i + 1, k, y)] = &r[var(i + 1, k, y)] + c;
                }
                let dy = complex.apply_d(j, &complex.space().basis_vector(j, y));
                for (k, c) in dy.iter().enumerate() {
                    r[var(j + 1, k, x)] = &r[var(j + 1, k, x)] - &(&s * c);
                }
                rows.push(r);
            }
        }
    }
    let m = Matrix::from_rows(field, rows.len(), unknowns, rows);
    let kernel = linalg::kernel_basis(&m);
    let dense = rng.gen_bool(0.5);
    let mut values = vec![field.zero(); unknowns];
    for k in &kernel {
        let c = if dense || rng.gen_bool(0.5) { rng.gen_range(-3..=3) } else { 0 };
        linalg::axpy(&mut values, &field.from_i64(c), k);
    }
    let blocks = (0..=n)
        .map(|i| {
            let entries = (0..dims[i]).map(|x| (0..dims[n - i]).map(|y| values[var(i, x, y)].clone()).collect()).collect();
            Matrix::from_rows(field, dims[i], dims[n - i], entries)
        })
        .collect();
    let p = CyclicPairing::new(field, n, &dims, blocks)?;

    let mats: Vec<Matrix> = (0..=n).map(|d| unipotent(field, dims[d], None, &mut rng)).collect();
    let inv: Vec<Matrix> = mats.iter().map(|m| linalg::inverse(m).expect("unipotent")).collect();
    let diff = (0..=n).map(|d| if d < n { inv[d + 1].mul(&complex.d(d)).mul(&mats[d]) } else { complex.d(d) }).collect();
    let complex = Complex::new(complex.space().clone(), diff)?;
    let blocks = (0..=n).map(|i| mats[i].transpose().mul(p.gram_ref(i)).mul(&mats[n - i])).collect();
    let p = CyclicPairing::new(field, n, &dims, blocks)?;
    Ok((complex, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::check_cdga;
    use crate::hodge::{hodge_decomposition, homology_pairing_defect};
    use crate::orientation::{check_cyclic, pairing_from_orientation};

    #[test]
    fn random_pdgas_are_oriented_and_not_hodge() {
        for seed in 0..10 {
            let (a, or) = random_pdga(seed, Field::Rational).unwrap();
            assert!(check_cdga(&a).is_empty(), "seed {seed}");
            assert!(or.check_closed(a.complex()), "seed {seed}");
            let p = pairing_from_orientation(&a, &or);
            assert!(check_cyclic(a.complex(), Some(&a), &p).is_empty(), "seed {seed}");
            assert!(matches!(hodge_decomposition(a.complex(), &p), Err(Error::Obstruction(_))), "seed {seed}");
        }
    }

    #[test]
    fn random_hodge_instances_decompose() {
        for seed in 0..10 {
            let (a, or) = random_hodge(seed, Field::Rational).unwrap();
            assert!(check_cdga(&a).is_empty(), "seed {seed}");
            let p = pairing_from_orientation(&a, &or);
            assert!(check_cyclic(a.complex(), Some(&a), &p).is_empty(), "seed {seed}");
            hodge_decomposition(a.complex(), &p).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }

    #[test]
    fn random_cyclic_complexes_satisfy_the_sign_rules() {
        let mut nondegenerate = 0;
        for seed in 0..40 {
            let (c, p) = random_cyclic_complex(seed, Field::Rational).unwrap();
            assert!(check_cyclic(&c, None, &p).is_empty(), "seed {seed}");
            if homology_pairing_defect(&c, &p).is_none() {
                nondegenerate += 1;
            }
        }
        assert!(nondegenerate > 10, "{nondegenerate}");
    }

    #[test]
    fn scramble_map_is_an_oriented_isomorphism() {
        let (a, or) = corpus::v2(Field::Rational);
        let (b, or_b, f) = scramble_with_map(&a, &or, &mut rng(3)).unwrap();
        let rep = crate::morphism::check_morphism(&f, &b, Some(&or_b), &a, Some(&or), None);
        assert!(rep.all_pass(), "{:?}", rep.problems);
    }

    #[test]
    fn seeds_are_reproducible() {
        let (a, _) = random_pdga(7, Field::Rational).unwrap();
        let (b, _) = random_pdga(7, Field::Rational).unwrap();
        assert_eq!(a, b);
    }
}
