mod common;

use std::collections::BTreeSet;

use common::{f3_orbits, gram_i64, lat, line_norm, line_types_by_vectors};
use nlcover::modp::{
    choose_p, enumerate_index_p_sublattices, functional_from_basis, line_classes, line_classes_formula, line_count,
    sublattice_disc_split, PPart,
};
use nlcover::{Budget, IntegralLattice};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

const LATTICES: &[&str] = &["U", "<2>+<-2>", "U+<-2>", "A2+<-2>", "U^2", "U^2+<-2>", "U+A2(-1)", "U^2+<-6>"];

fn coprime(l: &IntegralLattice, p: u64) -> bool {
    (l.det() % BigInt::from(p)) != BigInt::from(0)
}

#[test]
fn line_counts_against_vector_scan() {
    for label in LATTICES {
        let l = lat(label);
        for p in [3u64, 5, 7] {
            if !coprime(&l, p) || line_count(l.rank(), p) > BigInt::from(3000) {
                continue;
            }
            let c = line_classes(&l, p).unwrap();
            let (z, s, ns) = line_types_by_vectors(&gram_i64(&l), p as i64);
            assert_eq!((c.n0.clone(), c.n_plus.clone(), c.n_minus.clone()), (z.into(), s.into(), ns.into()), "{label} p={p}");
            assert_eq!(c.total(), line_count(l.rank(), p));
            assert_eq!(line_classes_formula(&l, p).unwrap(), c, "{label} p={p}");
        }
    }
}

#[test]
fn each_f3_orbit_lies_in_one_class() {
    for label in ["U", "<2>+<-2>", "U+<-2>", "<2>+<-2>+<2>", "U+<2>", "<2>^2", "<2>^3"] {
        let l = lat(label);
        let g = gram_i64(&l);
        let orbits = f3_orbits(&g);
        let mut per_class = [0usize; 3];
        for o in &orbits {
            let types: BTreeSet<i64> = o.iter().map(|v| line_norm(&g, v, 3)).collect();
            assert_eq!(types.len(), 1, "{label}: orbit spans classes");
            per_class[*types.iter().next().unwrap() as usize] += 1;
        }
        // transitive on each nonempty class
        assert!(per_class.iter().all(|&k| k <= 1), "{label}: {per_class:?}");
        let c = line_classes(&l, 3).unwrap();
        let sizes: Vec<usize> = [0i64, 1, 2]
            .iter()
            .map(|t| orbits.iter().filter(|o| line_norm(&g, o.iter().next().unwrap(), 3) == *t).map(|o| o.len()).sum())
            .collect();
        assert_eq!(
            sizes.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(),
            vec![c.n0, c.n_plus, c.n_minus],
            "{label}"
        );
    }
}

#[test]
fn sublattices_have_index_p_and_dual_lines_biject() {
    for (label, p) in [("U+<-2>", 3u64), ("U^2", 3), ("U^2+<-2>", 3), ("A2+<-2>", 5)] {
        let s = lat(label);
        let subs = enumerate_index_p_sublattices(&s, p).unwrap();
        assert_eq!(BigInt::from(subs.len()), line_count(s.rank(), p));
        let mut duals = BTreeSet::new();
        for sub in &subs {
            let sp = sub.lattice();
            assert_eq!(sp.det(), s.det() * BigInt::from(p * p));
            assert_eq!(sub.basis.det().abs(), BigInt::from(p));
            assert_eq!(functional_from_basis(&sub.basis, p).unwrap(), sub.functional);
            duals.insert(sub.dual_line.clone().unwrap());
        }
        assert_eq!(duals.len(), subs.len(), "{label}");
    }
}

#[test]
fn sublattice_p_part_follows_dual_line_type() {
    let s = lat("U^2+<-2>");
    let budget = Budget::default();
    let mut shapes = BTreeSet::new();
    for sub in enumerate_index_p_sublattices(&s, 3).unwrap() {
        let split = sublattice_disc_split(&s, &sub, &budget).unwrap();
        assert!(split.certified);
        assert_eq!(BigInt::from(split.form.order()), s.det().abs() * BigInt::from(9));
        let isotropic = sub.dual_line_isotropic().unwrap();
        assert_eq!(split.tag == PPart::Elementary, isotropic);
        shapes.insert(split.tag.label(3));
    }
    assert_eq!(shapes, BTreeSet::from(["(Z/3)^2".to_string(), "Z/9".to_string()]));
}

#[test]
fn choose_p_for_the_running_example() {
    let s = lat("U^2+<-2>");
    let c = choose_p(&s, 32).unwrap();
    assert!(c.bound > BigInt::from(32));
    // p = 3 is too small: ⌈min / 4⌉ ≤ 32
    let min3 = line_classes_formula(&s, 3).unwrap().min_nonempty().unwrap();
    assert!((min3 + 3) / 4 <= BigInt::from(32));
    assert_eq!(c.p, 5);
    assert_eq!(c.bound, BigInt::from(39));
    assert!(choose_p(&lat("U"), 3).is_err());
}

proptest! {
    #[test]
    fn formula_matches_enumeration(d in proptest::collection::vec(1i64..=4, 3), signs in proptest::collection::vec(any::<bool>(), 3), p in prop_oneof![Just(3u64), Just(5), Just(7)]) {
        let diag: Vec<i64> = d.iter().zip(&signs).map(|(&x, &s)| if s { 2 * x } else { -2 * x }).collect();
        let l = IntegralLattice::diagonal(&diag).unwrap();
        prop_assume!(coprime(&l, p));
        let c = line_classes(&l, p).unwrap();
        prop_assert_eq!(c.total(), line_count(3, p));
        prop_assert_eq!(line_classes_formula(&l, p).unwrap(), c);
    }

    #[test]
    fn rank_four_and_five_sum_identity(a in 1i64..=3, b in 1i64..=3, p in prop_oneof![Just(3u64), Just(5), Just(7)]) {
        for extra in [vec![], vec![-2 * b]] {
            let mut diag = vec![2 * a, -2, 2, -2 * b];
            diag.extend(extra);
            let l = IntegralLattice::diagonal(&diag).unwrap();
            if !coprime(&l, p) {
                continue;
            }
            let c = line_classes(&l, p).unwrap();
            prop_assert_eq!(c.total(), line_count(diag.len(), p));
            prop_assert_eq!(line_classes_formula(&l, p).unwrap(), c);
        }
    }
}

#[test]
fn signed_det_drives_the_formula() {
    // same |det|, opposite sign: −det is a square mod 3 only for <2>+<-2>
    let hyp = line_classes_formula(&lat("<2>+<-2>"), 3).unwrap();
    let def = line_classes_formula(&lat("<2>+<2>"), 3).unwrap();
    assert_eq!(hyp.n0, BigInt::from(2));
    assert_eq!(def.n0, BigInt::from(0));
}
