mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::Rng;

use common::*;
use ztrop::expansion::precision_at_least;
use ztrop::puiseux::int;
use ztrop::root_tree::RootTree;
use ztrop::{
    format_system, has_maximal_precision, is_approximate_root, is_unique, newton_polygon, parse_system,
    puiseux_expansion, trop_triangular, uniqueness_oracle, PuiseuxScalar, ResidueElem, ResidueField, ResiduePoly,
    UCoeff, UPoly,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn split_products_recover_their_roots(seed in any::<u64>()) {
        let mut r = rng(seed);
        let count = r.gen_range(1..=4);
        let roots: Vec<ResidueElem> = (0..count).map(|_| Q.sample_unit(&mut r)).collect();
        let mut coeffs = vec![Q.one()];
        for root in &roots {
            // multiply by (x - root)
            let mut next = vec![Q.zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] - &(c * root);
            }
            coeffs = next;
        }
        let poly = ResiduePoly::new(Q, coeffs);
        let got = poly.roots_in_units().unwrap();
        let expected: BTreeSet<ResidueElem> = roots.into_iter().collect();
        prop_assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), expected);
        for c in &got {
            prop_assert!(poly.eval(c).is_zero());
        }
    }

    #[test]
    fn prime_field_roots_match_exhaustive_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = [2u64, 3, 5, 7, 11, 13, 101][r.gen_range(0..7)];
        let field = ResidueField::prime(p).unwrap();
        let deg = r.gen_range(1..=5);
        let mut coeffs: Vec<ResidueElem> = (0..deg).map(|_| field.from_i64(r.gen_range(0..p as i64))).collect();
        coeffs.push(field.sample_unit(&mut r));
        let poly = ResiduePoly::new(field, coeffs);
        let brute: Vec<ResidueElem> = (1..p).map(|v| field.from_i64(v as i64)).filter(|c| poly.eval(c).is_zero()).collect();
        match poly.roots_in_units() {
            Ok(roots) => prop_assert_eq!(roots, brute),
            Err(e) => {
                let non_splitting = matches!(e, ztrop::Error::NonSplitting { .. });
                prop_assert!(non_splitting);
            }
        }
    }

    #[test]
    fn valuation_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = scalar(&mut r, Q, 4, -3, 3);
        let b = scalar(&mut r, Q, 4, -3, 3);
        let ab = &a * &b;
        prop_assert_eq!(ab.valuation().unwrap(), &(a.valuation().unwrap() + b.valuation().unwrap()));
        prop_assert_eq!(ab.initial().unwrap(), &(a.initial().unwrap() * b.initial().unwrap()));
        let sum = &a + &b;
        let min = a.valuation().unwrap().min(b.valuation().unwrap()).clone();
        if !sum.is_zero() {
            prop_assert!(sum.valuation().unwrap() >= &min);
            if a.valuation().unwrap() != b.valuation().unwrap() {
                prop_assert_eq!(sum.valuation().unwrap(), &min);
            }
        }
    }

    #[test]
    fn scalar_ring_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = scalar_or_zero(&mut r, Q);
        let b = scalar_or_zero(&mut r, Q);
        let c = scalar_or_zero(&mut r, Q);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn uval_is_a_valuation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = ucoeff(&mut r, Q, 2, 3);
        let b = ucoeff(&mut r, Q, 2, 3);
        prop_assert_eq!((&a * &b).uval().unwrap(), a.uval().unwrap() + b.uval().unwrap());
        let sum = &a + &b;
        if !sum.is_zero() {
            prop_assert!(sum.uval().unwrap() >= a.uval().unwrap().min(b.uval().unwrap()));
        }
    }

    #[test]
    fn compose_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = mpoly(&mut r, Q, 2, 3);
        let g = mpoly(&mut r, Q, 2, 3);
        let values = [ucoeff(&mut r, Q, 1, 2)];
        let compose = |p: &ztrop::MPoly| p.compose(&values, 1).unwrap_or_else(|_| UPoly::zero(1));
        prop_assert_eq!(compose(&(&f * &g)), &compose(&f) * &compose(&g));
        prop_assert_eq!(compose(&(&f + &g)), &compose(&f) + &compose(&g));
    }

    #[test]
    fn shift_substitute_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = upoly(&mut r, Q, 0, 1, 3);
        let g = upoly(&mut r, Q, 0, 1, 3);
        let prefix = scalar_or_zero(&mut r, Q);
        let scale = int(r.gen_range(-1..=2));
        prop_assert_eq!(
            (&f * &g).shift_substitute(&prefix, &scale),
            &f.shift_substitute(&prefix, &scale) * &g.shift_substitute(&prefix, &scale)
        );
        prop_assert_eq!(
            (&f + &g).shift_substitute(&prefix, &scale),
            &f.shift_substitute(&prefix, &scale) + &g.shift_substitute(&prefix, &scale)
        );
    }

    #[test]
    fn specialization_commutes_with_shift(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = upoly(&mut r, Q, 0, 2, 3);
        let prefix = scalar_or_zero(&mut r, Q);
        let values: BTreeMap<usize, PuiseuxScalar> = (0..2)
            .map(|k| (k, PuiseuxScalar::from_terms([(int(0), Q.sample_unit(&mut r)), (int(1), Q.sample_unit(&mut r))])))
            .collect();
        let a = f.shift_substitute(&prefix, &int(1)).specialize_u(&values).unwrap();
        let b = f.specialize_u(&values).unwrap().shift_substitute(&prefix, &int(1));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn specialization_does_not_lower_uval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = ucoeff(&mut r, Q, 2, 3);
        let residues: BTreeMap<usize, ResidueElem> = (0..2).map(|k| (k, Q.sample_unit(&mut r))).collect();
        let values: BTreeMap<usize, PuiseuxScalar> = residues
            .iter()
            .map(|(k, c)| (*k, PuiseuxScalar::from_terms([(int(0), c.clone()), (int(2), Q.one())])))
            .collect();
        let specialized = a.specialize(&values);
        let init = a.uinitial().unwrap();
        let at_residues: ResidueElem = init.terms().iter().fold(Q.zero(), |acc, (m, c)| {
            let mut v = c.clone();
            for k in m.vars() {
                v = &v * &residues[&k].pow(m.exponent(k));
            }
            &acc + &v
        });
        if !specialized.is_zero() {
            prop_assert!(specialized.uval().unwrap() >= a.uval().unwrap());
        }
        if !at_residues.is_zero() {
            prop_assert_eq!(specialized.uval().unwrap(), a.uval().unwrap());
        }
    }

    #[test]
    fn polygon_is_convex_and_below_support(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = upoly(&mut r, Q, 0, 2, 5);
        let polygon = newton_polygon(&f).unwrap();
        let slopes = polygon.slopes();
        prop_assert!(slopes.windows(2).all(|w| w[0] < w[1]));
        for (j, v) in f.support_points() {
            prop_assert!(polygon.height_at(j).unwrap() <= v);
        }
        for (j, v) in polygon.vertices() {
            prop_assert_eq!(&f.support_points().into_iter().find(|p| p.0 == *j).unwrap().1, v);
        }
    }

    #[test]
    fn unique_polygons_pass_the_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = upoly(&mut r, Q, 0, 2, 4);
        if is_unique(&f).unwrap() {
            prop_assert!(uniqueness_oracle(&f, 100, seed));
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn u_free_tropical_points_are_root_valuations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let count = r.gen_range(1..=4);
        let roots: Vec<PuiseuxScalar> = (0..count).map(|_| scalar(&mut r, Q, 3, -2, 3)).collect();
        let f = product_of_linears(0, &roots);
        prop_assert!(is_unique(&f).unwrap());
        let got: BTreeSet<_> = newton_polygon(&f).unwrap().tropical_points().into_iter().collect();
        let expected: BTreeSet<_> = roots.iter().map(|z| z.valuation().unwrap().clone()).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn expansion_invariants_on_factored_polynomials(seed in any::<u64>()) {
        let mut r = rng(seed);
        let count = r.gen_range(1..=3);
        // roots sharing leading terms exercise the recursion
        let base = scalar(&mut r, Q, 2, -1, 1);
        let roots: Vec<PuiseuxScalar> = (0..count)
            .map(|_| if r.gen_bool(0.6) { &base + &scalar(&mut r, Q, 2, 2, 4) } else { scalar(&mut r, Q, 3, -2, 3) })
            .collect();
        let f = product_of_linears(0, &roots);
        let p = int(r.gen_range(0..=4));
        for w in newton_polygon(&f).unwrap().tropical_points() {
            let found = puiseux_expansion(&f, &w, &p).unwrap();
            for z in &found {
                prop_assert_eq!(z.valuation(), Some(w.clone()));
                if !z.is_exact() {
                    prop_assert!(is_approximate_root(&f, z).unwrap());
                    prop_assert!(precision_at_least(&z.relative_precision(), &p) || has_maximal_precision(&f, z).unwrap());
                }
            }
            for rho in roots.iter().filter(|z| z.valuation().unwrap() == &w) {
                let covered = found.iter().any(|z| match z.tail_exponent() {
                    None => z.known() == rho,
                    Some(w_r) => &rho.truncate_below(w_r) == z.known(),
                });
                prop_assert!(covered, "{} not covered by {:?}", rho, found.iter().map(|z| z.to_string()).collect::<Vec<_>>());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn oracle_systems_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=2);
        let oracle = oracle_system(&mut r, n, 2);
        let got: BTreeSet<_> = trop_triangular(&oracle.system, &int(1), &int(32)).unwrap().into_iter().collect();
        prop_assert_eq!(got, oracle.expected);
    }

    #[test]
    fn tree_runs_are_deterministic_and_keep_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let oracle = oracle_system(&mut r, 2, 2);
        let mut first = RootTree::starting_tree(oracle.system.clone(), int(1), int(32)).unwrap();
        while first.step(&mut |_| {}).unwrap() {
            prop_assert!(first.check_invariants().is_ok());
        }
        let mut second = RootTree::starting_tree(oracle.system.clone(), int(1), int(32)).unwrap();
        second.run().unwrap();
        prop_assert_eq!(first.tropical_points(), second.tropical_points());
        prop_assert_eq!(first.counters(), second.counters());
    }

    #[test]
    fn formatted_systems_reparse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let oracle = oracle_system(&mut r, n, 3);
        let text = format_system(&oracle.system);
        prop_assert_eq!(parse_system(&text).unwrap(), oracle.system);
    }
}

#[test]
fn specialization_rejects_nonzero_valuation() {
    let f = UPoly::from_coeffs(0, [(1, UCoeff::constant(s(&[(1, 0)]))), (0, UCoeff::term(ztrop::UMonomial::var(0, 1), s(&[(1, 0)])))]);
    let values = BTreeMap::from([(0, s(&[(1, 1)]))]);
    assert!(matches!(f.specialize_u(&values), Err(ztrop::Error::InvalidSpecialization { var: 1, .. })));
}
