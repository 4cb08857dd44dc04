mod common;

use common::{corpus, lat};
use nlcover::discform::{enumerate_isotropic_subgroups, find_isometry, isometry_group, orthogonal_of_subgroup, quotient_form, FqfMap};
use nlcover::glue::{check_unique_embedding, check_unique_in_genus, find_anti_isometry, glue_to_k3, overlattice, GlueMap};
use nlcover::matrix::IntMatrix;
use nlcover::{discriminant_form, Budget, Embedding, IntegralLattice};
use num_bigint::BigInt;
use num_traits::Signed;

fn is_even(l: &IntegralLattice) -> bool {
    (0..l.rank()).all(|i| (l.gram().get(i, i) % BigInt::from(2)) == BigInt::from(0))
}

#[test]
fn overlattice_law_on_corpus() {
    let budget = Budget::default();
    for l in corpus() {
        let d = discriminant_form(&l).unwrap();
        for h in enumerate_isotropic_subgroups(d.form(), &budget).unwrap() {
            let m = overlattice(&d, &h).unwrap();
            let index = m.inclusion.saturation_index();
            assert_eq!(index, BigInt::from(h.order()), "{:?}", l.label());
            assert!(is_even(&m.lattice));
            let dm = discriminant_form(&m.lattice).unwrap();
            assert_eq!(dm.order() * h.order() * h.order(), d.order());
            let perp = orthogonal_of_subgroup(d.form(), &h, &budget).unwrap();
            assert!(perp.order() * h.order() == d.order());
            let q = quotient_form(d.form(), &h, &budget).unwrap();
            assert!(find_isometry(dm.form(), &q.form, &budget).unwrap().is_some(), "{:?}", l.label());
        }
    }
}

#[test]
fn known_overlattices() {
    // A7 ⊂ E7 and D8 ⊂ E8 with index 2
    let budget = Budget::default();
    for (label, det) in [("A7", 2), ("D8", 1), ("<2>^4", 4)] {
        let d = discriminant_form(&lat(label)).unwrap();
        let subs = enumerate_isotropic_subgroups(d.form(), &budget).unwrap();
        let top = subs.iter().max_by_key(|h| h.order()).unwrap();
        let m = overlattice(&d, top).unwrap();
        assert_eq!(m.lattice.det().abs(), BigInt::from(det), "{label}");
    }
}

#[test]
fn k3_gluing_of_degree_two_polarization() {
    let l = lat("<2>");
    let t = lat("<-2>+U^2+E8minus^2");
    let (dl, dt) = (discriminant_form(&l).unwrap(), discriminant_form(&t).unwrap());
    let gamma = find_anti_isometry(dl.form(), dt.form(), &Budget::default()).unwrap().unwrap();
    let g = glue_to_k3(&l, &t, &gamma).unwrap();
    assert!(is_even(&g.lattice));
    assert_eq!(g.lattice.det().abs(), BigInt::from(1));
    assert_eq!((g.lattice.signature().n_plus, g.lattice.signature().n_minus), (3, 19));
    assert!(g.l_embedding.is_primitive() && g.t_embedding.is_primitive());
    // L and T are orthogonal in the glued lattice
    let cross = g
        .l_embedding
        .basis()
        .mul(g.lattice.gram())
        .mul(&g.t_embedding.basis().transpose());
    assert!(cross.is_zero());
}

fn compose(phi: &FqfMap, gamma: &FqfMap, src: &nlcover::FiniteQuadraticForm, dst: &nlcover::FiniteQuadraticForm) -> FqfMap {
    FqfMap {
        images: phi.images.iter().map(|x| gamma.apply(src, dst, x)).collect(),
    }
}

#[test]
fn gluing_is_independent_of_the_anti_isometry() {
    let l = lat("U+A2(-1)");
    let t = lat("A2+E8minus^2");
    let (dl, dt) = (discriminant_form(&l).unwrap(), discriminant_form(&t).unwrap());
    let neg = dt.form().negate();
    let gamma = find_isometry(dl.form(), &neg, &Budget::default()).unwrap().unwrap();
    let group = isometry_group(dl.form(), &Budget::default()).unwrap();
    assert_eq!(group.len(), 2);
    let mut invariants = Vec::new();
    for phi in &group {
        let g = compose(phi, &gamma, dl.form(), &neg);
        let glue = GlueMap::from_anti_isometry(dl.form().clone(), dt.form().clone(), &g).unwrap();
        let k3 = glue_to_k3(&l, &t, &glue).unwrap();
        assert!(is_even(&k3.lattice));
        let snf = k3.lattice.gram().smith().invariant_factors();
        invariants.push((k3.lattice.det(), k3.lattice.signature(), snf));
    }
    assert_eq!(invariants[0], invariants[1]);
}

#[test]
fn complement_form_is_negated() {
    let l = lat("U+<-2>");
    let t = lat("U+<2>+E8minus^2");
    let (dl, dt) = (discriminant_form(&l).unwrap(), discriminant_form(&t).unwrap());
    let gamma = find_anti_isometry(dl.form(), dt.form(), &Budget::default()).unwrap().unwrap();
    let g = glue_to_k3(&l, &t, &gamma).unwrap();
    let k = g.l_embedding.orthogonal_complement().unwrap();
    let dk = discriminant_form(&k.sublattice()).unwrap();
    assert!(find_isometry(dk.form(), &dl.form().negate(), &Budget::default()).unwrap().is_some());
}

#[test]
fn complements_in_e8() {
    // simple roots of E8 in the built-in basis; A1, A2 and D4 subdiagrams
    let e8 = lat("E8");
    let budget = Budget::default();
    let pick = |rows: &[usize]| {
        let m: Vec<Vec<i64>> = rows
            .iter()
            .map(|&i| (0..8).map(|j| i64::from(i == j)).collect())
            .collect();
        Embedding::new(e8.clone(), IntMatrix::from_i64_rows(&m)).unwrap()
    };
    let cases = [vec![0], vec![0, 2], vec![1, 2, 3, 4]];
    for rows in cases {
        let e = pick(&rows);
        let sub = e.sublattice();
        let comp = e.orthogonal_complement().unwrap().sublattice();
        let (ds, dc) = (discriminant_form(&sub).unwrap(), discriminant_form(&comp).unwrap());
        assert_eq!(sub.det().abs(), comp.det().abs());
        assert!(find_isometry(dc.form(), &ds.form().negate(), &budget).unwrap().is_some(), "{rows:?}");
    }
}

#[test]
fn glue_rejects_mismatches() {
    let l = lat("<2>");
    let t = lat("<-2>+U^2+E8minus^2");
    // wrong signature
    let dl = discriminant_form(&l).unwrap();
    let bad_t = lat("<-2>+U+E8minus^2");
    let dbt = discriminant_form(&bad_t).unwrap();
    let gamma = find_anti_isometry(dl.form(), dbt.form(), &Budget::default()).unwrap().unwrap();
    assert!(glue_to_k3(&l, &bad_t, &gamma).is_err());
    // <2> against <2>: q values 1/2 and 1/2 are not anti-isometric
    let same = discriminant_form(&lat("<2>")).unwrap();
    assert!(find_anti_isometry(dl.form(), same.form(), &Budget::default()).unwrap().is_none());
    // non-isotropic graph
    let dt = discriminant_form(&t).unwrap();
    assert!(GlueMap::new(dl.form().clone(), dt.form().clone(), vec![vec![1, 0]]).is_err());
}

#[test]
fn criteria_verdicts() {
    let v = check_unique_embedding(&lat("U+<-2>")).unwrap();
    assert!(v.holds && v.reason.starts_with("criterion satisfied"));
    let v = check_unique_in_genus(&lat("<2>^3+<-2>")).unwrap();
    assert!(!v.holds && v.reason.starts_with("criterion inconclusive"));
    assert!(check_unique_in_genus(&lat("U^2+<-2>")).unwrap().holds);
    assert!(check_unique_embedding(&lat("A2")).is_err());
}

#[test]
fn glued_discriminant_is_trivial() {
    let l = lat("U+A2(-1)");
    let t = lat("A2+E8minus^2");
    let (dl, dt) = (discriminant_form(&l).unwrap(), discriminant_form(&t).unwrap());
    let gamma = find_anti_isometry(dl.form(), dt.form(), &Budget::default()).unwrap().unwrap();
    let g = glue_to_k3(&l, &t, &gamma).unwrap();
    assert!(discriminant_form(&g.lattice).unwrap().form().is_trivial());
    assert!(g.lattice.det().abs() == BigInt::from(1));
}
