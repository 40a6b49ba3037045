

use cdga::algebra::check_cdga;
use cdga::extension::extend_to_hodge_type;
use cdga::hodge::{check_hodge, degenerate_subspace, h_orthogonalize, homology_pairing_defect, solve_twist, subcomplex_homology_dims, TwistSolution};
use cdga::orientation::pairing_from_orientation;
use cdga::random::{random_cyclic_complex, random_pdga};
use cdga::{Field, GradedMap};

#[test]
fn acyclic_radical_iff_twist_solvable() {
    let (mut counted, mut hodge) = (0, 0);
    let mut seed = 0;
    while counted < 200 {
        let (c, p) = random_cyclic_complex(seed, Field::Rational).unwrap();
        seed += 1;
        if homology_pairing_defect(&c, &p).is_some() {
            continue;
        }
        counted += 1;
        let rad = degenerate_subspace(&c, &p);
        let acyclic = subcomplex_homology_dims(&c, &rad, c.max_degree()).unwrap().iter().all(|&h| h == 0);
        let hd = h_orthogonalize(&c, &p, None).unwrap();
        let solved = matches!(solve_twist(&c, &p, &hd).unwrap(), TwistSolution::Solved(_));
        assert_eq!(acyclic, solved, "seed {}", seed - 1);
        hodge += solved as usize;
    }
    eprintln!("{counted} instances after {seed} draws, {hodge} of Hodge type");
    assert!(hodge > 20 && counted - hodge > 20);
}

#[test]
fn extension_of_random_pdgas() {
    for seed in 0..30 {
        let (a, or) = random_pdga(seed, Field::Rational).unwrap();
        let r = extend_to_hodge_type(&a, &or).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let p = pairing_from_orientation(&r.algebra, &r.orientation);
        assert!(check_cdga(&r.algebra).is_empty());
        assert!(check_hodge(r.algebra.complex(), Some(&p), &r.hodge).hodge, "seed {seed}");
        assert!(r.certificate.all_pass(), "seed {seed}");
        let id = r.retraction.compose(&r.inclusion).unwrap();
        assert_eq!(id, GradedMap::identity(a.field(), &a.dims()));
        assert!(r.algebra.dims().iter().all(|&d| d <= 60), "seed {seed}: {:?}", r.algebra.dims());
    }
}
