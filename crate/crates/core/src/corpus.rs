//! Built-in example algebras.

use std::collections::HashMap;

use crate::algebra::{build_truncated_free, Cdga, CdgaBuilder, FreeGenerator, FreePresentation};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::graded::GradedMap;
use crate::linalg::Vector;
use crate::orientation::Orientation;

/// Names accepted by [`by_name`], in listing order.
pub const NAMES: &[&str] = &[
    "v1",
    "v2",
    "lambda-abc",
    "cp2-sum7",
    "exterior-3-5-7-9-11",
    "acyclic-wz",
    "obstruction-n2",
    "v2-twisted-pair",
];

pub fn description(name: &str) -> &'static str {
    match name {
        "v1" => "homology of Λ(a,b,c) with zero differential, top class ac in degree 7",
        "v2" => "seven-degree dPD algebra with k∧k = z, k∧w = l, k∧l = v, z∧w = v, Dw = z",
        "lambda-abc" => "Λ(a,b,c) with deg 2, 3, 5, Db = a², truncated above degree 9, Or(ac) = 1",
        "cp2-sum7" => "cohomology ring of a connected sum of seven projective planes",
        "exterior-3-5-7-9-11" => "exterior algebra on generators of degrees 3, 5, 7, 9, 11",
        "acyclic-wz" => "Λ(w,z) with deg 3, 4, Dw = z, truncated above degree 8",
        "obstruction-n2" => "degree-2 algebra whose twist equation has no solution",
        "v2-twisted-pair" => "v2 plus two acyclic pairs whose coexact vectors pair nontrivially",
        _ => "",
    }
}

/// Example algebra and its orientation (absent for the unoriented `acyclic-wz`).
pub fn by_name(name: &str, field: Field) -> Result<(Cdga, Option<Orientation>)> {
    let oriented = |(a, o): (Cdga, Orientation)| (a, Some(o));
    Ok(match name {
        "v1" => oriented(v1(field)),
        "v2" => oriented(v2(field)),
        "lambda-abc" => oriented(lambda_abc(field, 9)),
        "cp2-sum7" => oriented(cp2_sum7(field)),
        "exterior-3-5-7-9-11" => oriented(exterior(field, &[3, 5, 7, 9, 11])),
        "acyclic-wz" => (acyclic_wz(field), None),
        "obstruction-n2" => oriented(obstruction_n2(field)),
        "v2-twisted-pair" => oriented(v2_twisted_pair(field)),
        _ => return Err(Error::Malformed(format!("unknown example {name:?}"))),
    })
}

/// Orientation with value 1 on the named top basis vector.
pub fn orientation_on(a: &Cdga, label: &str) -> Orientation {
    let (d, i) = a.space().find(label).expect("label exists");
    Orientation::new(d, a.space().basis_vector(d, i)).expect("nonzero")
}

pub fn v1(field: Field) -> (Cdga, Orientation) {
    let a = CdgaBuilder::new(field, "1")
        .basis(2, &["a"])
        .basis(5, &["c"])
        .basis(7, &["ac"])
        .product("a", "c", "ac", 1)
        .build("v1")
        .expect("v1 is well formed");
    let or = orientation_on(&a, "ac");
    (a, or)
}

pub fn v2(field: Field) -> (Cdga, Orientation) {
    let a = v2_builder(field).build("v2").expect("v2 is well formed");
    let or = orientation_on(&a, "v");
    (a, or)
}

fn v2_builder(field: Field) -> CdgaBuilder {
    CdgaBuilder::new(field, "1")
        .basis(2, &["k"])
        .basis(3, &["w"])
        .basis(4, &["z"])
        .basis(5, &["l"])
        .basis(7, &["v"])
        .product("k", "k", "z", 1)
        .product("k", "w", "l", 1)
        .product("k", "l", "v", 1)
        .product("z", "w", "v", 1)
        .diff("w", "z", 1)
}

/// `v2` with extra pairs `c3 → b4`, `c4 → b5` and `c3 ∧ c4 = v`; the `b`'s span homology of the
/// degenerate subspace, so no Hodge decomposition exists.
pub fn v2_twisted_pair(field: Field) -> (Cdga, Orientation) {
    let a = v2_builder(field)
        .basis(3, &["c3"])
        .basis(4, &["c4", "b4"])
        .basis(5, &["b5"])
        .product("c3", "c4", "v", 1)
        .diff("c3", "b4", 1)
        .diff("c4", "b5", 1)
        .build("v2-twisted-pair")
        .expect("well formed");
    let or = orientation_on(&a, "v");
    (a, or)
}

pub fn lambda_abc_presentation(field: Field, t: usize) -> FreePresentation {
    let gen = |name: &str, degree: usize, differential: Vec<(Scalar, Vec<u32>)>| FreeGenerator {
        name: name.into(),
        degree,
        differential,
    };
    FreePresentation {
        field,
        generators: vec![
            gen("a", 2, vec![]),
            gen("b", 3, vec![(field.one(), vec![2, 0, 0])]),
            gen("c", 5, vec![]),
        ],
        truncation: t,
    }
}

pub fn lambda_abc(field: Field, t: usize) -> (Cdga, Orientation) {
    let a = build_truncated_free("lambda-abc", &lambda_abc_presentation(field, t)).expect("Λ(a,b,c) is well formed");
    let or = orientation_on(&a, "a*c");
    (a, or)
}

pub fn cp2_sum7(field: Field) -> (Cdga, Orientation) {
    let names: Vec<String> = (0..7).map(|i| format!("k{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut b = CdgaBuilder::new(field, "1").basis(2, &refs).basis(4, &["v"]);
    for k in &refs {
        b = b.product(k, k, "v", 1);
    }
    let a = b.build("cp2-sum7").expect("well formed");
    let or = orientation_on(&a, "v");
    (a, or)
}

/// Exterior algebra on odd generators `e{d}`, oriented by the product of all generators.
pub fn exterior(field: Field, degrees: &[usize]) -> (Cdga, Orientation) {
    let generators = degrees
        .iter()
        .map(|&d| FreeGenerator { name: format!("e{d}"), degree: d, differential: vec![] })
        .collect();
    let total: usize = degrees.iter().sum();
    let name = format!("exterior-{}", degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("-"));
    let a = build_truncated_free(&name, &FreePresentation { field, generators, truncation: total }).expect("well formed");
    let top = degrees.iter().map(|d| format!("e{d}")).collect::<Vec<_>>().join("*");
    let or = orientation_on(&a, &top);
    (a, or)
}

pub fn acyclic_wz(field: Field) -> Cdga {
    let p = FreePresentation {
        field,
        generators: vec![
            FreeGenerator { name: "w".into(), degree: 3, differential: vec![(field.one(), vec![0, 1])] },
            FreeGenerator { name: "z".into(), degree: 4, differential: vec![] },
        ],
        truncation: 8,
    };
    build_truncated_free("acyclic-wz", &p).expect("well formed")
}

/// Degree-2 orientation with `c1 ∧ c2 = v`, `Dc_i = b_i`: the degree-1 block of the pairing is
/// antisymmetric and nonzero while nothing exact lies in degree 1.
pub fn obstruction_n2(field: Field) -> (Cdga, Orientation) {
    let a = CdgaBuilder::new(field, "1")
        .basis(1, &["c1", "c2"])
        .basis(2, &["b1", "b2", "v"])
        .product("c1", "c2", "v", 1)
        .diff("c1", "b1", 1)
        .diff("c2", "b2", 1)
        .build("obstruction-n2")
        .expect("well formed");
    let or = orientation_on(&a, "v");
    (a, or)
}

/// Degree-4 algebra with a self-pairing coexact `e` and `⟨e, Da⟩ = 1`.
pub fn middle_rho_example(field: Field) -> (Cdga, Orientation) {
    let a = CdgaBuilder::new(field, "1")
        .basis(1, &["a"])
        .basis(2, &["b", "e"])
        .basis(3, &["f"])
        .basis(4, &["v"])
        .product("e", "e", "v", 1)
        .product("b", "e", "v", 1)
        .product("a", "f", "v", 1)
        .diff("a", "b", 1)
        .diff("e", "f", 1)
        .build("middle-rho")
        .expect("well formed");
    let or = orientation_on(&a, "v");
    (a, or)
}

/// `v2` together with an acyclic square-zero ideal `α → β` orthogonal to everything.
pub fn v2_with_acyclic_ideal(field: Field) -> (Cdga, Orientation) {
    let a = v2_builder(field)
        .basis(3, &["alpha"])
        .basis(4, &["beta"])
        .diff("alpha", "beta", 1)
        .build("v2+ideal")
        .expect("well formed");
    let or = orientation_on(&a, "v");
    (a, or)
}

/// Ring `H(S^p × S^q)`: `1, x_p, y_q, xy` with `x ∧ y = xy`.
pub fn sphere_product(field: Field, p: usize, q: usize) -> (Cdga, Orientation) {
    let mut b = CdgaBuilder::new(field, "1");
    if p == q {
        b = b.basis(p, &["x", "y"]);
    } else {
        b = b.basis(p, &["x"]).basis(q, &["y"]);
    }
    let a = b.basis(p + q, &["xy"]).product("x", "y", "xy", 1).build(&format!("s{p}xs{q}")).expect("well formed");
    let or = orientation_on(&a, "xy");
    (a, or)
}

/// Degree-0 map out of a free algebra determined by the images of its generators. Basis labels
/// of the source are parsed as `g^e*h*...` monomials in generator order.
pub fn map_from_generators(source: &Cdga, target: &Cdga, images: &[(&str, Vector)]) -> Result<GradedMap> {
    let p = source
        .presentation()
        .ok_or_else(|| Error::Precondition("source has no free presentation".into()))?;
    let degree: HashMap<&str, usize> = p.generators.iter().map(|g| (g.name.as_str(), g.degree)).collect();
    let image: HashMap<&str, &Vector> = images.iter().map(|(n, v)| (*n, v)).collect();
    let field = source.field();
    let mut columns = Vec::with_capacity(source.max_degree() + 1);
    for d in 0..=source.max_degree() {
        let mut cols = Vec::with_capacity(source.dim(d));
        for i in 0..source.dim(d) {
            let label = source.space().label(d, i);
            if d > target.max_degree() {
                cols.push(Vec::new());
                continue;
            }
            let mut acc = target.unit_vector();
            let mut acc_deg = 0;
            if label != "1" {
                for part in label.split('*') {
                    let (g, e) = match part.split_once('^') {
                        Some((g, e)) => (g, e.parse::<usize>().map_err(|_| Error::Malformed(format!("bad label {label}")))?),
                        None => (part, 1),
                    };
                    let gd = *degree.get(g).ok_or_else(|| Error::Malformed(format!("unknown generator {g}")))?;
                    let gv = image.get(g).ok_or_else(|| Error::Precondition(format!("no image for generator {g}")))?;
                    for _ in 0..e {
                        acc = if acc_deg + gd <= target.max_degree() {
                            target.mul(acc_deg, &acc, gd, gv)
                        } else {
                            Vec::new()
                        };
                        acc_deg += gd;
                    }
                }
            }
            if acc.len() != target.dim(d) {
                acc = target.space().zero(d);
            }
            cols.push(acc);
        }
        columns.push(cols);
    }
    let _ = field;
    GradedMap::from_columns(source.field(), &source.dims(), &target.dims(), columns)
}

fn basis(a: &Cdga, label: &str) -> Vector {
    let (d, i) = a.space().find(label).expect("label exists");
    a.space().basis_vector(d, i)
}

/// `f₁: Λ(a,b,c) → v1`, `a ↦ a`, `b ↦ 0`, `c ↦ scale·c`.
pub fn f1(source: &Cdga, v1: &Cdga, scale: i64) -> GradedMap {
    let c = crate::linalg::scale_vector(&v1.field().from_i64(scale), &basis(v1, "c"));
    map_from_generators(source, v1, &[("a", basis(v1, "a")), ("b", v1.space().zero(3)), ("c", c)]).expect("generators mapped")
}

/// `f₂: Λ(a,b,c) → v2`, `a ↦ k`, `b ↦ w`, `c ↦ l`.
pub fn f2(source: &Cdga, v2: &Cdga) -> GradedMap {
    map_from_generators(source, v2, &[("a", basis(v2, "k")), ("b", basis(v2, "w")), ("c", basis(v2, "l"))]).expect("generators mapped")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::check_cdga;
    use crate::orientation::{check_cyclic, pairing_from_orientation};

    #[test]
    fn every_example_satisfies_the_axioms() {
        for name in NAMES {
            let (a, or) = by_name(name, Field::Rational).unwrap();
            assert!(check_cdga(&a).is_empty(), "{name}: {:?}", check_cdga(&a));
            if let Some(or) = or {
                assert!(or.check_closed(a.complex()), "{name}");
                let p = pairing_from_orientation(&a, &or);
                assert!(check_cyclic(a.complex(), Some(&a), &p).is_empty(), "{name}");
            }
        }
        for (a, _) in [middle_rho_example(Field::Rational), v2_with_acyclic_ideal(Field::Rational), sphere_product(Field::Rational, 3, 3)] {
            assert!(check_cdga(&a).is_empty(), "{}", a.name());
        }
    }

    #[test]
    fn exterior_dimension() {
        let (a, or) = exterior(Field::Rational, &[3, 5, 7, 9, 11]);
        assert_eq!(a.space().total_dim(), 32);
        assert_eq!(or.degree(), 35);
        assert_eq!(a.truncation(), None);
    }
}
