//! Isometries of lattices: automorphism groups of definite lattices,
//! stability, reflections, extension by the identity, and the image of
//! `Stab(T, S)*` in `O(K)`.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::budget::{Budget, NodeCounter};
use crate::discform::{
    discriminant_form, isometry_group, orthogonal_of_subgroup, DiscriminantForm, Element,
    FqfMap, Subgroup,
};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::lattice::IntegralLattice;
use crate::matrix::IntMatrix;
use crate::shortvec::short_vectors_signed;

/// An integral isometry `x ↦ x·g` of a lattice (rows are images of basis
/// vectors), with `g·G·gᵀ = G` checked at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    matrix: IntMatrix,
    det: i8,
    stable: bool,
}

impl Isometry {
    pub fn new(l: &IntegralLattice, matrix: IntMatrix) -> Result<Self> {
        let disc = discriminant_form(l)?;
        Isometry::with_disc(l, &disc, matrix)
    }

    /// As [`Isometry::new`], reusing a precomputed `A_L`.
    pub fn with_disc(l: &IntegralLattice, disc: &DiscriminantForm, matrix: IntMatrix) -> Result<Self> {
        let n = l.rank();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension(format!(
                "isometry must be {n}×{n}, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.congruence(l.gram()) != *l.gram() {
            return Err(Error::invalid("matrix does not preserve the Gram form"));
        }
        let d = matrix.det();
        let det = if d.is_one() { 1 } else { -1 };
        let stable = disc.induced_action(&matrix)?.is_identity(disc.form());
        Ok(Isometry {
            matrix,
            det,
            stable,
        })
    }

    pub fn identity(n: usize) -> Self {
        Isometry {
            matrix: IntMatrix::identity(n),
            det: 1,
            stable: true,
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> i8 {
        self.det
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.left_mul_vec(x)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Isometry, disc: &DiscriminantForm) -> Isometry {
        let matrix = self.matrix.mul(&other.matrix);
        let stable = disc
            .induced_action(&matrix)
            .map(|a| a.is_identity(disc.form()))
            .unwrap_or(false);
        Isometry {
            matrix,
            det: self.det * other.det,
            stable,
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            matrix: self.matrix.unimodular_inverse().expect("isometries are unimodular"),
            det: self.det,
            stable: self.stable,
        }
    }
}

/// Whether `g` acts trivially on `A_L`.
pub fn is_stable(g: &IntMatrix, l: &IntegralLattice) -> Result<bool> {
    let disc = discriminant_form(l)?;
    Ok(disc.induced_action(g)?.is_identity(disc.form()))
}

/// Reflection `x ↦ x − 2(x,v)/(v,v)·v`, if it is integral.
pub fn reflection_matrix(l: &IntegralLattice, v: &[BigInt]) -> Option<IntMatrix> {
    let n = l.rank();
    let norm = l.norm(v);
    if norm.is_zero() {
        return None;
    }
    let gv = l.gram().left_mul_vec(v);
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        let (c, r) = (BigInt::from(2) * &gv[i]).div_rem(&norm);
        if !r.is_zero() {
            return None;
        }
        for j in 0..n {
            let e = m.get(i, j) - &c * &v[j];
            m.set(i, j, e);
        }
    }
    Some(m)
}

/// `r_δ(x) = x + (x, δ)·δ` for a root `(δ, δ) = −2`.
pub fn reflection(l: &IntegralLattice, delta: &[BigInt]) -> Result<Isometry> {
    if l.norm(delta) != BigInt::from(-2) {
        return Err(Error::invalid("reflection needs a vector of norm −2"));
    }
    let m = reflection_matrix(l, delta).expect("roots give integral reflections");
    Isometry::new(l, m)
}

/// Vectors of norm −2, one per `±` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    pub vectors: Vec<Vec<BigInt>>,
}

/// `Δ(L)` for a definite lattice (empty when positive definite).
pub fn roots(l: &IntegralLattice) -> Result<RootSet> {
    if l.is_positive_definite() {
        return Ok(RootSet { vectors: vec![] });
    }
    if !l.is_negative_definite() {
        return Err(Error::invalid("roots are enumerated only for definite lattices"));
    }
    let vectors = crate::shortvec::short_vectors(l, &BigInt::from(2))?
        .into_iter()
        .filter(|v| v.norm == BigInt::from(-2))
        .map(|v| v.coords)
        .collect();
    Ok(RootSet { vectors })
}

fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::invalid("entries exceed 64-bit range")))
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The finite group `O(K)` of a definite lattice, sorted lexicographically
/// by matrix entries.
pub fn automorphism_group(k: &IntegralLattice, budget: &Budget) -> Result<Vec<Isometry>> {
    if !k.is_definite() {
        return Err(Error::invalid("automorphism groups are computed only for definite lattices"));
    }
    let n = k.rank();
    let gram = k.gram().to_i64().ok_or_else(|| Error::invalid("Gram entries exceed 64-bit range"))?;
    let g = |i: usize, j: usize| *gram.get(i, j);
    let max_norm = (0..n).map(|i| g(i, i).abs()).max().unwrap_or(0);
    let cands = short_vectors_signed(k, &BigInt::from(max_norm))?;
    let vecs: Vec<(Vec<i64>, Vec<i64>, i64)> = cands
        .iter()
        .map(|s| {
            let v = to_i64_vec(&s.coords)?;
            let gv: Vec<i64> = (0..n).map(|i| (0..n).map(|j| g(i, j) * v[j]).sum()).collect();
            Ok((v, gv, s.norm.to_i64().unwrap()))
        })
        .collect::<Result<_>>()?;
    let per_basis: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..vecs.len()).filter(|&c| vecs[c].2 == g(i, i)).collect())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (per_basis[i].len(), i));

    let disc = discriminant_form(k)?;
    let mut counter = NodeCounter::new("automorphism search", budget);
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut found: Vec<IntMatrix> = Vec::new();
    search_aut(&order, &per_basis, &vecs, &g, &mut chosen, &mut found, &mut counter, budget)?;
    let mut group = found
        .into_iter()
        .map(|m| Isometry::with_disc(k, &disc, m))
        .collect::<Result<Vec<_>>>()?;
    group.sort_by(|a, b| a.matrix.cmp(&b.matrix));
    Ok(group)
}

#[allow(clippy::too_many_arguments)]
fn search_aut(
    order: &[usize],
    per_basis: &[Vec<usize>],
    vecs: &[(Vec<i64>, Vec<i64>, i64)],
    g: &dyn Fn(usize, usize) -> i64,
    chosen: &mut Vec<usize>,
    found: &mut Vec<IntMatrix>,
    counter: &mut NodeCounter,
    budget: &Budget,
) -> Result<()> {
    let depth = chosen.len();
    let n = order.len();
    if depth == n {
        let mut rows = vec![vec![0i64; n]; n];
        for (pos, &bi) in order.iter().enumerate() {
            rows[bi] = vecs[chosen[pos]].0.clone();
        }
        found.push(IntMatrix::from_i64_rows(&rows));
        budget.check_order("automorphism group", found.len() as u64)?;
        return Ok(());
    }
    let bi = order[depth];
    for &c in &per_basis[bi] {
        counter.tick()?;
        let ok = (0..depth).all(|j| dot(&vecs[c].1, &vecs[chosen[j]].0) == g(bi, order[j]));
        if ok {
            chosen.push(c);
            search_aut(order, per_basis, vecs, g, chosen, found, counter, budget)?;
            chosen.pop();
        }
    }
    Ok(())
}

fn flat_i64(m: &IntMatrix) -> Vec<i64> {
    m.entries().iter().map(|x| x.to_i64().expect("small entries")).collect()
}

fn mul_flat(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut c = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += x * b[k * n + j];
            }
        }
    }
    c
}

/// Closed under products and inverses, and contains the identity.
pub fn is_closed_group(group: &[Isometry]) -> bool {
    let Some(first) = group.first() else {
        return false;
    };
    let n = first.matrix.nrows();
    let set: HashSet<Vec<i64>> = group.iter().map(|g| flat_i64(&g.matrix)).collect();
    let id = flat_i64(&IntMatrix::identity(n));
    if !set.contains(&id) {
        return false;
    }
    let elems: Vec<Vec<i64>> = set.iter().cloned().collect();
    for a in &elems {
        if !elems.iter().any(|b| mul_flat(a, b, n) == id) {
            return false;
        }
        for b in &elems {
            if !set.contains(&mul_flat(a, b, n)) {
                return false;
            }
        }
    }
    true
}

/// Whether reduction mod `p` is injective on the group.
pub fn reduction_is_injective(group: &[Isometry], p: i64) -> bool {
    let set: HashSet<Vec<i64>> = group
        .iter()
        .map(|g| flat_i64(&g.matrix).iter().map(|x| x.rem_euclid(p)).collect())
        .collect();
    set.len() == group.len()
}

/// `|GL_n(F_p)|`.
pub fn general_linear_order(n: usize, p: u64) -> BigInt {
    let pn = num_traits::pow(BigInt::from(p), n);
    (0..n).fold(BigInt::one(), |acc, i| acc * (&pn - num_traits::pow(BigInt::from(p), i)))
}

/// Greedy generating set: an element is kept when it is not in the group
/// generated by the earlier ones.
pub fn generators(group: &[Isometry]) -> Vec<Isometry> {
    let Some(first) = group.first() else {
        return vec![];
    };
    let n = first.matrix.nrows();
    let mut gens: Vec<Isometry> = Vec::new();
    let mut span: HashSet<Vec<i64>> = HashSet::from([flat_i64(&IntMatrix::identity(n))]);
    for g in group {
        let fg = flat_i64(&g.matrix);
        if span.contains(&fg) {
            continue;
        }
        gens.push(g.clone());
        let gen_flats: Vec<Vec<i64>> = gens.iter().map(|h| flat_i64(&h.matrix)).collect();
        let mut frontier: Vec<Vec<i64>> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for h in &gen_flats {
                let y = mul_flat(&x, h, n);
                if span.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// Order, generators and stable subgroup of a finite isometry group.
#[derive(Clone, Debug)]
pub struct GroupReport {
    pub order: usize,
    pub generators: Vec<Isometry>,
    pub stable_order: usize,
    pub stable_index: usize,
}

pub fn group_report(group: &[Isometry]) -> GroupReport {
    let stable_order = group.iter().filter(|g| g.is_stable()).count();
    GroupReport {
        order: group.len(),
        generators: generators(group),
        stable_order,
        stable_index: group.len() / stable_order.max(1),
    }
}

/// Extend a stable isometry of `L ⊂ U` (unimodular `U`) by the identity on
/// `L^⊥`.
pub fn extend_by_identity(g: &Isometry, e: &Embedding) -> Result<Isometry> {
    if !e.ambient().is_unimodular() {
        return Err(Error::invalid("ambient lattice must be unimodular"));
    }
    if !e.is_primitive() {
        return Err(Error::invalid("embedding must be primitive"));
    }
    if g.matrix.nrows() != e.rank() {
        return Err(Error::Dimension("isometry does not match the sublattice rank".into()));
    }
    if !g.is_stable() {
        return Err(Error::NotStable("only stable isometries extend by the identity".into()));
    }
    let b = e.basis();
    let c = e.orthogonal_complement()?;
    let m = b.vstack(c.basis());
    let target = g.matrix.mul(b).vstack(c.basis());
    let h = m
        .to_rational()
        .inverse()
        .expect("L ⊕ L^⊥ has full rank")
        .mul(&target.to_rational())
        .to_integer()
        .ok_or_else(|| Error::Internal("extension by identity is not integral".into()))?;
    Isometry::new(e.ambient(), h)
}

/// The image of `Stab(T, S)*` in `O(K)`, `K = T^⊥ ⊂ S`.
#[derive(Clone, Debug)]
pub struct StabImageReport {
    /// Elements of `O(K)` in the image, sorted.
    pub image: Vec<Isometry>,
    pub image_order: usize,
    pub ok_order: usize,
    /// Divisor bound on the degree: `2 · |image|` (accounts for `±Id`).
    pub degree_bound: usize,
    pub complement: Embedding,
    pub notes: Vec<String>,
}

pub fn stab_image_in_ok(t_in_s: &Embedding, budget: &Budget) -> Result<StabImageReport> {
    if !t_in_s.is_primitive() {
        return Err(Error::invalid("T must be primitive in S"));
    }
    let s = t_in_s.ambient();
    let t = t_in_s.sublattice();
    let kemb = t_in_s.orthogonal_complement()?;
    let k = kemb.sublattice();
    if !k.is_definite() {
        return Err(Error::hypothesis("the complement K of T in S must be definite"));
    }
    let dt = discriminant_form(&t)?;
    if !t.is_indefinite() || dt.length() + 2 > t.rank() {
        return Err(Error::hypothesis(format!(
            "need T indefinite with ℓ(A_T) ≤ rank T − 2 so that O(T) → O(A_T) is onto (ℓ = {}, rank = {})",
            dt.length(),
            t.rank()
        )));
    }
    let dk = discriminant_form(&k)?;
    let sum = dt.form().direct_sum(dk.form());
    budget.check_order("glue group A_T ⊕ A_K", sum.order())?;

    // glue H: images of the basis of S in A_T ⊕ A_K
    let m = t_in_s.basis().vstack(kemb.basis());
    let minv = m.to_rational().inverse().expect("T ⊕ K has full rank");
    let rt = t.rank();
    let mut glue: Vec<Element> = Vec::with_capacity(s.rank());
    for i in 0..s.rank() {
        let row = minv.row(i);
        let mut x = dt.project_rational(&row[..rt])?;
        x.extend(dk.project_rational(&row[rt..])?);
        glue.push(x);
    }
    let h = Subgroup::generated_by(&sum, &glue);
    let perp = orthogonal_of_subgroup(&sum, &h, budget)?;
    let perp_gens = perp.generators();
    let h_gens = h.generators();

    let oat = isometry_group(dt.form(), budget)?;
    let ok = automorphism_group(&k, budget)?;
    let mut image = Vec::new();
    for g in &ok {
        let gbar = dk.induced_action(g.matrix())?;
        let admissible = oat.iter().any(|phi| {
            let psi = phi.direct_sum(&gbar, dt.form(), dk.form());
            h_gens.iter().all(|x| h.contains(&psi.apply(&sum, &sum, x)))
                && perp_gens
                    .iter()
                    .all(|x| h.contains(&sum.sub(&psi.apply(&sum, &sum, x), x)))
        });
        if admissible {
            image.push(g.clone());
        }
    }
    let image_order = image.len();
    Ok(StabImageReport {
        image,
        image_order,
        ok_order: ok.len(),
        degree_bound: 2 * image_order,
        complement: kemb,
        notes: vec![
            "kernel of Stab(T,S)* → O(K) identified with O(T)* (cited, not computed)".into(),
            "surjectivity O(T) → O(A_T) under ℓ(A_T) ≤ rank T − 2 (cited)".into(),
            "orientation refinement not computed; bound includes the ±Id factor".into(),
        ],
    })
}

/// Distinct images of a group acting on `A_L`, for surjectivity checks.
pub fn induced_image(group: &[Isometry], disc: &DiscriminantForm) -> Result<BTreeSet<FqfMap>> {
    group
        .iter()
        .map(|g| disc.induced_action(g.matrix()))
        .collect()
}
