use cdga::algebra::{change_basis, check_cdga};
use cdga::document::{emit_algebra, parse_algebra, ParseOptions};
use cdga::hodge::{check_hodge, h_orthogonalize, homology_pairing_defect, hodge_decomposition, solve_twist, standard_homotopy, twisted, verify_homotopy, TwistSolution};
use cdga::homology::homology;
use cdga::linalg::{self, Matrix};
use cdga::orientation::{check_cyclic, pairing_from_orientation};
use cdga::pipeline::{build_pd_model, Route};
use cdga::random::{random_cyclic_complex, random_hodge, random_pdga, rng, scramble, unipotent};
use cdga::small::small_subalgebra;
use cdga::small::verify_closure;
use cdga::{corpus, Field};
use num_rational::Ratio;
use proptest::prelude::*;

const Q: Field = Field::Rational;

fn ratio_text(r: Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_arithmetic_matches_ratio(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let (x, y) = (Q.ratio(a, b).unwrap(), Q.ratio(c, d).unwrap());
        let (rx, ry) = (Ratio::new(a, b), Ratio::new(c, d));
        prop_assert_eq!((&x + &y).to_string(), ratio_text(rx + ry));
        prop_assert_eq!((&x * &y).to_string(), ratio_text(rx * ry));
        prop_assert_eq!((&x - &y).to_string(), ratio_text(rx - ry));
        if c != 0 {
            prop_assert_eq!(x.div(&y).unwrap().to_string(), ratio_text(rx / ry));
        }
    }

    #[test]
    fn prime_field_matches_modular_arithmetic(a in 0i64..1000, b in 1i64..1000, p in prop::sample::select(vec![3u64, 5, 7, 101, 7919])) {
        let f = Field::prime(p).unwrap();
        let (x, y) = (f.from_i64(a), f.from_i64(b));
        let pm = p as i64;
        prop_assert_eq!(&x * &y, f.from_i64(a * b % pm));
        prop_assert_eq!(&x - &y, f.from_i64((a - b).rem_euclid(pm)));
        if b % pm != 0 {
            prop_assert_eq!(&y * &y.inverse().unwrap(), f.one());
        }
    }

    #[test]
    fn rank_nullity(rows in 1usize..6, cols in 1usize..6, entries in prop::collection::vec(-3i64..4, 36)) {
        let data: Vec<Vec<i64>> = (0..rows).map(|r| entries[r * 6..r * 6 + cols].to_vec()).collect();
        let refs: Vec<&[i64]> = data.iter().map(Vec::as_slice).collect();
        let m = Matrix::from_i64(Q, &refs);
        let ker = linalg::kernel_basis(&m);
        prop_assert_eq!(linalg::rank(&m) + ker.len(), cols);
        for v in &ker {
            prop_assert!(linalg::is_zero_vector(&m.apply(v)));
        }
        prop_assert!(linalg::is_independent(Q, cols, &ker));
    }

    #[test]
    fn unipotent_matrices_invert(n in 1usize..7, seed in any::<u64>()) {
        let m = unipotent(Q, n, None, &mut rng(seed));
        let inv = linalg::inverse(&m).unwrap();
        prop_assert_eq!(inv.mul(&m), Matrix::identity(Q, n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn documents_round_trip(seed in 0u64..1000, hodge in any::<bool>()) {
        let (a, or) = if hodge { random_hodge(seed, Q).unwrap() } else { random_pdga(seed, Q).unwrap() };
        let text = emit_algebra(&a, Some(&or));
        let (b, or_b) = parse_algebra(&text, ParseOptions::default()).unwrap();
        prop_assert_eq!(&b, &a);
        prop_assert_eq!(emit_algebra(&b, or_b.as_ref()), text);
    }

    #[test]
    fn homology_is_invariant_under_basis_change(seed in 0u64..1000) {
        let (a, or) = random_hodge(seed, Q).unwrap();
        let (b, _) = scramble(&a, &or, &mut rng(seed ^ 0x5eed)).unwrap();
        prop_assert!(check_cdga(&b).is_empty());
        prop_assert_eq!(homology(a.complex()).dims(), homology(b.complex()).dims());
    }

    #[test]
    fn inverse_basis_change_restores_the_algebra(seed in 0u64..1000) {
        let (a, _) = random_pdga(seed, Q).unwrap();
        let mut r = rng(seed);
        let mats: Vec<Matrix> = (0..=a.max_degree()).map(|d| unipotent(Q, a.dim(d), (d == 0).then(|| a.unit_index()), &mut r)).collect();
        let inv: Vec<Matrix> = mats.iter().map(|m| linalg::inverse(m).unwrap()).collect();
        let back = change_basis(&change_basis(&a, &mats).unwrap(), &inv).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn cyclic_complexes_obey_the_sign_rules(seed in any::<u64>()) {
        let (c, p) = random_cyclic_complex(seed, Q).unwrap();
        prop_assert!(check_cyclic(&c, None, &p).is_empty());
        prop_assume!(homology_pairing_defect(&c, &p).is_none());
        let hd = h_orthogonalize(&c, &p, None).unwrap();
        if let TwistSolution::Solved(t) = solve_twist(&c, &p, &hd).unwrap() {
            let out = twisted(&hd, &t);
            prop_assert!(check_hodge(&c, Some(&p), &out).hodge);
            let hh = standard_homotopy(&c, &out).unwrap();
            prop_assert!(verify_homotopy(&c, &out, &hh).all_pass());
        }
    }

    #[test]
    fn hodge_instances_have_verified_homotopies_and_closed_small_subalgebras(seed in 0u64..1000) {
        let (a, or) = random_hodge(seed, Q).unwrap();
        let p = pairing_from_orientation(&a, &or);
        let hd = hodge_decomposition(a.complex(), &p).unwrap();
        let (s, hh) = small_subalgebra(&a, &hd, a.max_degree()).unwrap();
        prop_assert!(verify_homotopy(a.complex(), &hd, &hh).all_pass());
        prop_assert!(verify_closure(&a, &hd, &hh, &s.basis, a.max_degree()).all_pass());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Auto-routed models of random instances verify end to end.
    #[test]
    fn random_models_verify(seed in 0u64..1000, hodge in any::<bool>()) {
        let (a, or) = if hodge { random_hodge(seed, Q).unwrap() } else { random_pdga(seed, Q).unwrap() };
        let m = build_pd_model(&a, &or, Route::Auto).unwrap();
        prop_assert_eq!(m.route, if hodge { Route::Small } else { Route::Extend });
        prop_assert!(m.all_pass());
        let (hm, ha) = (homology(m.model.complex()), homology(a.complex()));
        prop_assert_eq!(&hm.dims()[..=or.degree()], &ha.dims()[..=or.degree()]);
    }
}

#[test]
fn corpus_homology_agrees_over_prime_fields() {
    for name in ["v1", "v2", "cp2-sum7", "lambda-abc"] {
        let (a, _) = corpus::by_name(name, Q).unwrap();
        for p in [3, 5, 7] {
            let (b, _) = corpus::by_name(name, Field::prime(p).unwrap()).unwrap();
            assert_eq!(homology(a.complex()).dims(), homology(b.complex()).dims(), "{name} over F_{p}");
        }
    }
}
