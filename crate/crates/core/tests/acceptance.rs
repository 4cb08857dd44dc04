//! Acceptance criteria, one PASS/FAIL line each. Criteria listed in
//! `KNOWN_FAILURES` are reported as FAIL but do not fail the run; an
//! unexpected pass of a known failure does.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_force_automorphisms, corpus, e8_root_count_by_coordinates, f3_orbits, gram_i64, lat, line_norm, line_types_by_vectors, CORPUS};
use nlcover::discform::{enumerate_isotropic_subgroups, find_isometry, quotient_form};
use nlcover::glue::{find_anti_isometry, glue_to_k3, overlattice};
use nlcover::isom::{automorphism_group, is_closed_group, reduction_is_injective, reflection, stab_image_in_ok};
use nlcover::matrix::IntMatrix;
use nlcover::modp::{enumerate_index_p_sublattices, line_classes, line_count};
use nlcover::padic::{jordan_decompose, valuation};
use nlcover::planner::{plan_covering, Target};
use nlcover::shortvec::short_vectors_signed;
use nlcover::{discriminant_form, Budget, Embedding, IntegralLattice};
use num_bigint::BigInt;
use num_traits::Signed;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

/// Criteria whose statement does not hold; see the README.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    8,
    "the p-part of A_S' is (Z/p)^2 or Z/p^2 depending on the dual line, so max{2, l(A_S)} is only an upper bound",
)];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn is_even(l: &IntegralLattice) -> bool {
    (0..l.rank()).all(|i| (l.gram().get(i, i) % BigInt::from(2)) == BigInt::from(0))
}

fn embedding(ambient: &IntegralLattice, rows: &[Vec<i64>]) -> Embedding {
    Embedding::new(ambient.clone(), IntMatrix::from_i64_rows(rows)).unwrap()
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn c1_k3_gluing() -> Outcome {
    let l = lat("<2>");
    let t = lat("<-2>+U^2+E8minus^2");
    let (dl, dt) = (discriminant_form(&l).unwrap(), discriminant_form(&t).unwrap());
    let gamma = find_anti_isometry(dl.form(), dt.form(), &Budget::default())
        .map_err(|e| e.to_string())?
        .ok_or("no anti-isometry A_L -> A_T")?;
    let g = glue_to_k3(&l, &t, &gamma).map_err(|e| e.to_string())?;
    let sig = g.lattice.signature();
    ensure!(is_even(&g.lattice), "glued lattice is odd");
    ensure!(g.lattice.det().abs() == BigInt::from(1), "det = {}", g.lattice.det());
    ensure!((sig.n_plus, sig.n_minus) == (3, 19), "signature {sig}");
    Ok(format!("even, det {}, signature {sig}", g.lattice.det()))
}

fn c2_overlattice_law() -> Outcome {
    let budget = Budget::default();
    let mut pairs = 0;
    for (label, l) in CORPUS.iter().zip(corpus()) {
        let d = discriminant_form(&l).unwrap();
        ensure!(d.order() <= 64, "{label}: |A_L| = {}", d.order());
        for h in enumerate_isotropic_subgroups(d.form(), &budget).map_err(|e| e.to_string())? {
            let m = overlattice(&d, &h).map_err(|e| format!("{label}: {e}"))?;
            let dm = discriminant_form(&m.lattice).unwrap();
            ensure!(m.inclusion.saturation_index() == BigInt::from(h.order()), "{label}: [M:L] != |H|");
            ensure!(dm.order() * h.order() * h.order() == d.order(), "{label}: |A_M| != |A_L|/|H|^2");
            let q = quotient_form(d.form(), &h, &budget).map_err(|e| e.to_string())?;
            let iso = find_isometry(dm.form(), &q.form, &budget).map_err(|e| e.to_string())?;
            ensure!(iso.is_some_and(|g| g.is_isometry(dm.form(), &q.form)), "{label}: A_M not isometric to H^perp/H");
            pairs += 1;
        }
    }
    Ok(format!("{} lattices, {pairs} isotropic subgroups", CORPUS.len()))
}

fn c3_complement_duality() -> Outcome {
    let budget = Budget::default();
    let e8 = lat("E8");
    let k3 = lat("K3");
    let e_plus_f = {
        let mut v = unit(22, 0);
        v[1] = 1;
        v
    };
    let e_plus_2f = {
        let mut v = unit(22, 0);
        v[1] = 2;
        v
    };
    let mut cases: Vec<(String, Embedding)> = vec![
        ("A1 in E8".into(), embedding(&e8, &[unit(8, 0)])),
        ("A2 in E8".into(), embedding(&e8, &[unit(8, 0), unit(8, 2)])),
        ("D4 in E8".into(), embedding(&e8, &[unit(8, 1), unit(8, 2), unit(8, 3), unit(8, 4)])),
        ("<2> in K3".into(), embedding(&k3, &[e_plus_f])),
        ("<4> in K3".into(), embedding(&k3, &[e_plus_2f])),
    ];
    for (l, t) in [("U+<-2>", "U+<2>+E8minus^2"), ("U+A2(-1)", "A2+E8minus^2")] {
        let (l, t) = (lat(l), lat(t));
        let (dl, dt) = (discriminant_form(&l).unwrap(), discriminant_form(&t).unwrap());
        let gamma = find_anti_isometry(dl.form(), dt.form(), &budget).unwrap().unwrap();
        let g = glue_to_k3(&l, &t, &gamma).map_err(|e| e.to_string())?;
        cases.push((format!("{} in glued K3", l.label().unwrap()), g.l_embedding));
    }
    for (name, e) in &cases {
        ensure!(e.is_primitive() && e.ambient().is_unimodular(), "{name}: not primitive in a unimodular ambient");
        let comp = e.orthogonal_complement().map_err(|x| x.to_string())?;
        let (ds, dc) = (discriminant_form(&e.sublattice()).unwrap(), discriminant_form(&comp.sublattice()).unwrap());
        let iso = find_isometry(dc.form(), &ds.form().negate(), &budget).map_err(|x| x.to_string())?;
        ensure!(iso.is_some(), "{name}: A_K not isometric to -A_L");
    }
    Ok(format!("{} embeddings", cases.len()))
}

fn c4_weyl_stability() -> Outcome {
    let oracle = e8_root_count_by_coordinates();
    let mut total = 0;
    for label in ["<-2>", "A2(-1)", "A3(-1)", "A7(-1)", "D4(-1)", "D8(-1)", "<-2>^4", "E8minus"] {
        let l = lat(label);
        let roots = short_vectors_signed(&l, &BigInt::from(2)).unwrap();
        let roots: Vec<_> = roots.into_iter().filter(|v| v.norm == BigInt::from(-2)).collect();
        if label == "E8minus" {
            ensure!(roots.len() == oracle, "E8(-1): {} roots, coordinate count {oracle}", roots.len());
        }
        for r in &roots {
            let g = reflection(&l, &r.coords).map_err(|e| e.to_string())?;
            ensure!(g.is_stable(), "{label}: reflection in {:?} is not stable", r.coords);
        }
        total += roots.len();
    }
    Ok(format!("{total} roots over 8 lattices, E8(-1) has {oracle}"))
}

fn c5_definite_automorphisms() -> Outcome {
    let mut notes = Vec::new();
    for (label, expected) in [("A2", 12usize), ("<-2>", 2)] {
        let l = lat(label);
        let group = automorphism_group(&l, &Budget::default()).map_err(|e| e.to_string())?;
        let oracle: BTreeSet<Vec<Vec<i64>>> = brute_force_automorphisms(&gram_i64(&l), 2).into_iter().collect();
        let found: BTreeSet<Vec<Vec<i64>>> = group.iter().map(|g| g.matrix().to_i64().unwrap().to_rows()).collect();
        ensure!(group.len() == expected, "|O({label})| = {}", group.len());
        ensure!(found == oracle, "{label}: group differs from brute force");
        ensure!(is_closed_group(&group), "{label}: not closed");
        ensure!(reduction_is_injective(&group, 3), "{label}: reduction mod 3 not injective");
        notes.push(format!("|O({label})| = {}", group.len()));
    }
    Ok(notes.join(", "))
}

fn c6_corank_one_degree() -> Outcome {
    let mut split = 0;
    let mut nonsplit = 0;
    let mut cases: Vec<(String, Embedding)> = Vec::new();
    for k in [1, 2, 3] {
        let s = lat(&format!("U^2+<-{}>+<-2>", 2 * k));
        let rows: Vec<Vec<i64>> = (0..5).map(|i| unit(6, i)).collect();
        cases.push((format!("U^2+<-{}> in S", 2 * k), embedding(&s, &rows)));
    }
    let s = lat("U^2+<-2>");
    for v in [vec![1, -1, 0, 0, 0], vec![1, -1, 0, 0, 1], vec![1, -2, 0, 0, 0]] {
        let k = embedding(&s, std::slice::from_ref(&v));
        let t = k.orthogonal_complement().unwrap();
        cases.push((format!("{v:?}^perp in U^2+<-2>"), t));
    }
    for (name, t_in_s) in &cases {
        let t = t_in_s.sublattice();
        let k = t_in_s.orthogonal_complement().unwrap().sublattice();
        let index_sq = (t.det() * k.det() / t_in_s.ambient().det()).abs();
        if index_sq == BigInt::from(1) {
            split += 1;
        } else {
            nonsplit += 1;
        }
        let r = stab_image_in_ok(t_in_s, &Budget::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure!(2 % r.image_order == 0, "{name}: image order {}", r.image_order);
        ensure!(4 % r.degree_bound == 0, "{name}: degree bound {}", r.degree_bound);
    }
    ensure!(split >= 3 && nonsplit >= 2, "{split} split and {nonsplit} non-split pairs");
    Ok(format!("{split} split, {nonsplit} non-split"))
}

fn c7_line_counting() -> Outcome {
    let by_rank = [("U", 2), ("<2>+<-2>", 2), ("U+<-2>", 3), ("U+<2>", 3), ("U^2", 4), ("U+<2>+<-2>", 4), ("U^2+<-2>", 5)];
    let mut checked = 0;
    let mut orbit_checked = 0;
    for (label, rank) in by_rank {
        let l = lat(label);
        assert_eq!(l.rank(), rank);
        let g = gram_i64(&l);
        for p in [3u64, 5, 7] {
            let c = line_classes(&l, p).map_err(|e| e.to_string())?;
            ensure!(c.total() == line_count(rank, p), "{label} p={p}: sum identity");
            let (z, s, n) = line_types_by_vectors(&g, p as i64);
            ensure!((c.n0.clone(), c.n_plus.clone(), c.n_minus.clone()) == (z.into(), s.into(), n.into()), "{label} p={p}: vector scan differs");
            checked += 1;
            if p == 3 && rank <= 3 {
                let orbits = f3_orbits(&g);
                let mut classes_seen = BTreeSet::new();
                for o in &orbits {
                    let types: BTreeSet<i64> = o.iter().map(|v| line_norm(&g, v, 3)).collect();
                    ensure!(types.len() == 1, "{label}: orbit meets several classes");
                    ensure!(classes_seen.insert(*types.first().unwrap()), "{label}: class split into several orbits");
                }
                orbit_checked += 1;
            }
        }
    }
    Ok(format!("{checked} (lattice, p) pairs, {orbit_checked} orbit checks at p = 3"))
}

fn c8_sublattice_split() -> Outcome {
    let pairs = [
        ("U^2+<-2>", 3u64),
        ("U^2+<-2>", 5),
        ("U+<-2>", 3),
        ("U+<-2>", 5),
        ("U^2", 3),
        ("U^2+<-6>", 5),
        ("U+A2(-1)", 5),
        ("U+<2>+<-2>", 3),
        ("U^2+<-2>^2", 3),
        ("<2>+<-2>", 3),
        ("U+<-4>", 3),
    ];
    let mut total = 0;
    let mut violations = 0;
    let mut first = None;
    for (label, p) in pairs {
        let s = lat(label);
        let ls = discriminant_form(&s).unwrap().length();
        for sub in enumerate_index_p_sublattices(&s, p).unwrap() {
            let sp = sub.lattice();
            ensure!(sp.det() == s.det() * BigInt::from(p * p), "{label} p={p}: det(S') != p^2 det(S)");
            let l = discriminant_form(&sp).unwrap().length();
            total += 1;
            if l != ls.max(2) {
                violations += 1;
                first.get_or_insert(format!("{label} p={p} alpha={:?}: l(A_S') = {l}, expected {}", sub.functional, ls.max(2)));
            }
        }
    }
    if violations > 0 {
        return Err(format!("{violations} of {total} sublattices violate the length identity; first: {}", first.unwrap()));
    }
    Ok(format!("{total} sublattices over {} pairs", pairs.len()))
}

fn c9_planner() -> Outcome {
    let s = lat("U^2+<-2>");
    let c = plan_covering(&s, 32, Target::SQuotient, &Budget::default()).map_err(|e| e.to_string())?;
    ensure!(c.bound > BigInt::from(32), "B = {}", c.bound);
    ensure!(c.constant == 16, "c = {}", c.constant);
    ensure!(c.all_very_stable(), "some S' is not very stable");
    let m = plan_covering(&s, 32, Target::MQuotient, &Budget::default()).map_err(|e| e.to_string())?;
    ensure!(m.constant == 32, "M-quotient c = {}", m.constant);
    Ok(format!(
        "p = {}, B = {}, c = {} (M: {}), {} S' very stable",
        c.p,
        c.bound,
        c.constant,
        m.constant,
        c.sublattices.len()
    ))
}

fn c10_jordan() -> Outcome {
    let pairs = [
        ("A2", 3u64),
        ("U", 5),
        ("<2>+<18>", 3),
        ("A2(3)", 3),
        ("U(3)+<-2>", 3),
        ("D4", 3),
        ("<10>+<-50>", 5),
        ("A2+<-6>", 3),
        ("<14>+<-98>+U", 7),
        ("U(5)+A2(-5)", 5),
        ("E8minus+<6>", 3),
        ("U^2+<-2>", 3),
    ];
    for (label, p) in pairs {
        let l = lat(label);
        let jd = jordan_decompose(&l, p, None).map_err(|e| format!("{label}: {e}"))?;
        let vdet = u64::from(valuation(&l.det(), p));
        ensure!(jd.det_valuation() == vdet, "{label} p={p}: sum k r_k = {} but v_p(det) = {vdet}", jd.det_valuation());
        let d = discriminant_form(&l).unwrap();
        let p_rank = d.form().orders().iter().filter(|&&o| o % p == 0).count();
        ensure!(jd.p_length() == p_rank, "{label} p={p}: sum r_k = {} but l(A_L (x) Z_p) = {p_rank}", jd.p_length());
    }
    Ok(format!("{} (L, p) pairs", pairs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "K3 gluing", Duration::from_secs(1), c1_k3_gluing),
        (2, "overlattice law", Duration::from_secs(60), c2_overlattice_law),
        (3, "complement duality", Duration::MAX, c3_complement_duality),
        (4, "Weyl stability", Duration::from_secs(60), c4_weyl_stability),
        (5, "definite automorphisms", Duration::from_secs(60), c5_definite_automorphisms),
        (6, "corank-one degree", Duration::MAX, c6_corank_one_degree),
        (7, "line counting", Duration::from_secs(120), c7_line_counting),
        (8, "sublattice split", Duration::MAX, c8_sublattice_split),
        (9, "planner end-to-end", Duration::from_secs(120), c9_planner),
        (10, "Jordan reassembly", Duration::MAX, c10_jordan),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > limit {
            outcome = Err(format!("took {elapsed:.2?}, limit {limit:.2?}"));
        }
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (&outcome, known) {
            (Ok(detail), None) => {
                passed += 1;
                println!("PASS  [{id:>2}] {name}: {detail} ({elapsed:.2?})");
            }
            (Ok(detail), Some(_)) => {
                unexpected += 1;
                println!("PASS  [{id:>2}] {name}: {detail} ({elapsed:.2?}) [unexpected pass of a known failure]");
            }
            (Err(why), None) => {
                unexpected += 1;
                println!("FAIL  [{id:>2}] {name}: {why} ({elapsed:.2?})");
            }
            (Err(why), Some((_, reason))) => {
                println!("FAIL  [{id:>2}] {name}: {why} ({elapsed:.2?}) [known: {reason}]");
            }
        }
    }
    println!(
        "acceptance: {passed} passed, {} failed ({} known)",
        10 - passed,
        KNOWN_FAILURES.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
