//! Finite quadratic forms and discriminant forms `A_L = L^∨ / L`.
//!
//! A form is presented as `⊕ Z/d_i` with a generator per summand. Values are
//! stored as integer numerators over the exponent `E = lcm(d_i)`:
//! `q(g_i) = q_i / E mod 2` and `b(g_i, g_j) = b_ij / E mod 1`. Every value
//! of `q` on an element of order dividing `E` lies in `(1/E)Z`, so the
//! representation is exact and canonical.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::budget::{Budget, NodeCounter};
use crate::error::{Error, Result};
use crate::lattice::IntegralLattice;
use crate::matrix::{IntMatrix, RatMatrix};

/// Residues modulo the generator orders.
pub type Element = Vec<u64>;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 % m as u128) * (b as u128 % m as u128) % m as u128) as u64
}

fn addmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// A value `num / den` reduced to lowest terms, taken in `[0, 2)` for `q`
/// and `[0, 1)` for `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    fn reduced(num: u64, den: u64) -> Frac {
        let g = num.gcd(&den);
        Frac {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteQuadraticForm {
    orders: Vec<u64>,
    exponent: u64,
    q: Vec<u64>,
    b: Vec<Vec<u64>>,
}

impl fmt::Debug for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = (0..self.k()).map(|i| self.q_gen(i).to_string()).collect();
        write!(f, "FQF(orders={:?}, q=[{}])", self.orders, qs.join(", "))
    }
}

/// Reduce a rational modulo `m` into `[0, m)` as a numerator over `den`.
fn numerator_over(x: &BigRational, den: u64, modulus: u64) -> Option<u64> {
    let scaled = x * BigRational::from_integer(BigInt::from(den));
    if !scaled.is_integer() {
        return None;
    }
    let m = BigInt::from(den) * BigInt::from(modulus);
    scaled.to_integer().mod_floor(&m).to_u64()
}

impl FiniteQuadraticForm {
    /// Build from generator orders, `q` values (mod 2) and the symmetric
    /// pairing matrix (mod 1). All well-definedness conditions are checked.
    pub fn new(orders: Vec<u64>, q: Vec<BigRational>, b: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = orders.len();
        if q.len() != k || b.len() != k || b.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension(
                "q and b must have one entry per generator".into(),
            ));
        }
        if orders.iter().any(|&d| d < 2) {
            return Err(Error::invalid("generator orders must be at least 2"));
        }
        if orders.iter().any(|&d| d > (1u64 << 61)) {
            return Err(Error::invalid("generator order too large"));
        }
        let exponent = orders.iter().fold(1u64, |acc, &d| acc.lcm(&d));
        let bad = |what: String| Error::invalid(format!("finite quadratic form: {what}"));
        let qn = q
            .iter()
            .enumerate()
            .map(|(i, x)| {
                numerator_over(x, exponent, 2)
                    .ok_or_else(|| bad(format!("q[{i}] = {x} has denominator not dividing {exponent}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut bn = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                bn[i][j] = numerator_over(&b[i][j], exponent, 1).ok_or_else(|| {
                    bad(format!("b[{i}][{j}] = {} has denominator not dividing {exponent}", b[i][j]))
                })?;
            }
        }
        let form = FiniteQuadraticForm {
            orders,
            exponent,
            q: qn,
            b: bn,
        };
        form.validate()?;
        Ok(form)
    }

    fn validate(&self) -> Result<()> {
        let e = self.exponent;
        let bad = |what: String| Err(Error::invalid(format!("finite quadratic form: {what}")));
        for i in 0..self.k() {
            let d = self.orders[i];
            for j in 0..self.k() {
                if self.b[i][j] != self.b[j][i] {
                    return bad(format!("b is not symmetric at ({i},{j})"));
                }
                if mulmod(d, self.b[i][j], e) != 0 {
                    return bad(format!("d_{i}·b[{i}][{j}] is not integral"));
                }
            }
            if self.q[i] % e != self.b[i][i] {
                return bad(format!("q[{i}] and b[{i}][{i}] disagree mod 1"));
            }
            // q((x + d) g) = q(x g) requires d·q ∈ Z and d²·q ∈ 2Z
            if mulmod(d, self.q[i], e) != 0 || mulmod(mulmod(d, d, 2 * e), self.q[i], 2 * e) != 0 {
                return bad(format!("q[{i}] is not well defined modulo the order {d}"));
            }
        }
        Ok(())
    }

    /// The form on the trivial group.
    pub fn trivial() -> Self {
        FiniteQuadraticForm {
            orders: vec![],
            exponent: 1,
            q: vec![],
            b: vec![],
        }
    }

    /// Cyclic form `Z/d` with `q(g) = num/den`.
    pub fn cyclic(d: u64, q: BigRational) -> Result<Self> {
        let b = BigRational::new(q.numer().mod_floor(q.denom()), q.denom().clone());
        FiniteQuadraticForm::new(vec![d], vec![q], vec![vec![b]])
    }

    /// Number of generators in this presentation.
    pub fn k(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Group order, saturating at `u64::MAX`.
    pub fn order(&self) -> u64 {
        self.orders
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .unwrap_or(u64::MAX)
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// Whether the orders form a divisibility chain `d_1 | d_2 | ...`.
    pub fn is_normalized(&self) -> bool {
        self.orders.windows(2).all(|w| w[1] % w[0] == 0)
    }

    /// Minimal number of generators of the underlying group.
    pub fn length(&self) -> usize {
        let d: Vec<BigInt> = self.orders.iter().map(|&x| BigInt::from(x)).collect();
        IntMatrix::diagonal(&d)
            .smith()
            .invariant_factors()
            .iter()
            .filter(|x| !x.is_one())
            .count()
    }

    pub fn q_gen(&self, i: usize) -> Frac {
        Frac::reduced(self.q[i], self.exponent)
    }

    pub fn b_gen(&self, i: usize, j: usize) -> Frac {
        Frac::reduced(self.b[i][j], self.exponent)
    }

    pub fn zero(&self) -> Element {
        vec![0; self.k()]
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut x = self.zero();
        x[i] = 1;
        x
    }

    pub fn reduce(&self, x: &[i128]) -> Element {
        x.iter()
            .zip(&self.orders)
            .map(|(&v, &d)| v.rem_euclid(d as i128) as u64)
            .collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Element {
        x.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((&a, &b), &d)| addmod(a, b, d))
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Element {
        x.iter()
            .zip(&self.orders)
            .map(|(&a, &d)| (d - a) % d)
            .collect()
    }

    pub fn sub(&self, x: &[u64], y: &[u64]) -> Element {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &[u64], k: u64) -> Element {
        x.iter()
            .zip(&self.orders)
            .map(|(&a, &d)| mulmod(a, k, d))
            .collect()
    }

    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .fold(1u64, |acc, (&a, &d)| acc.lcm(&(d / a.gcd(&d))))
    }

    /// Numerator of `q(x)` over the exponent, in `[0, 2E)`.
    fn q_num(&self, x: &[u64]) -> u64 {
        let m = 2 * self.exponent;
        let mut acc = 0u64;
        for i in 0..self.k() {
            if x[i] == 0 {
                continue;
            }
            acc = addmod(acc, mulmod(mulmod(x[i], x[i], m), self.q[i], m), m);
            for j in i + 1..self.k() {
                if x[j] == 0 {
                    continue;
                }
                let t = mulmod(mulmod(x[i], x[j], m), 2 * self.b[i][j], m);
                acc = addmod(acc, t, m);
            }
        }
        acc
    }

    fn b_num(&self, x: &[u64], y: &[u64]) -> u64 {
        let m = self.exponent;
        let mut acc = 0u64;
        for i in 0..self.k() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.k() {
                if y[j] == 0 {
                    continue;
                }
                acc = addmod(acc, mulmod(mulmod(x[i], y[j], m), self.b[i][j], m), m);
            }
        }
        acc
    }

    /// `q(x) ∈ Q/2Z`.
    pub fn q(&self, x: &[u64]) -> Frac {
        Frac::reduced(self.q_num(x), self.exponent)
    }

    /// `b(x, y) ∈ Q/Z`.
    pub fn b(&self, x: &[u64], y: &[u64]) -> Frac {
        Frac::reduced(self.b_num(x, y), self.exponent)
    }

    /// All elements in mixed-radix order.
    pub fn elements(&self) -> ElementIter<'_> {
        ElementIter {
            orders: &self.orders,
            next: Some(self.zero()),
        }
    }

    /// `−A`: same group, opposite form.
    pub fn negate(&self) -> Self {
        let e = self.exponent;
        FiniteQuadraticForm {
            orders: self.orders.clone(),
            exponent: e,
            q: self.q.iter().map(|&x| (2 * e - x) % (2 * e)).collect(),
            b: self
                .b
                .iter()
                .map(|r| r.iter().map(|&x| (e - x) % e).collect())
                .collect(),
        }
    }

    /// Orthogonal direct sum; generators of `self` come first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let e = self.exponent.lcm(&other.exponent);
        let (s1, s2) = (e / self.exponent, e / other.exponent);
        let k1 = self.k();
        let k = k1 + other.k();
        let mut q = Vec::with_capacity(k);
        q.extend(self.q.iter().map(|&x| x * s1));
        q.extend(other.q.iter().map(|&x| x * s2));
        let mut b = vec![vec![0u64; k]; k];
        for i in 0..k1 {
            for j in 0..k1 {
                b[i][j] = self.b[i][j] * s1;
            }
        }
        for i in 0..other.k() {
            for j in 0..other.k() {
                b[k1 + i][k1 + j] = other.b[i][j] * s2;
            }
        }
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        FiniteQuadraticForm {
            orders,
            exponent: e,
            q,
            b,
        }
    }

    /// Split an element of `self ⊕ other` (as produced by [`direct_sum`]).
    pub fn split_element(&self, x: &[u64]) -> (Element, Element) {
        (x[..self.k()].to_vec(), x[self.k()..].to_vec())
    }

    /// An isometric form presented in Smith normal form (`d_1 | d_2 | ...`).
    pub fn normalized(&self) -> Result<QuotientForm> {
        quotient_form(self, &Subgroup::trivial(self), &Budget::new(u64::MAX))
    }

    pub fn q_values(&self) -> Vec<BigRational> {
        (0..self.k()).map(|i| self.q_gen(i).to_rational()).collect()
    }

    pub fn b_values(&self) -> Vec<Vec<BigRational>> {
        (0..self.k())
            .map(|i| (0..self.k()).map(|j| self.b_gen(i, j).to_rational()).collect())
            .collect()
    }
}

pub struct ElementIter<'a> {
    orders: &'a [u64],
    next: Option<Element>,
}

impl Iterator for ElementIter<'_> {
    type Item = Element;
    fn next(&mut self) -> Option<Element> {
        let cur = self.next.take()?;
        let mut n = cur.clone();
        let mut i = n.len();
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            n[i] += 1;
            if n[i] < self.orders[i] {
                self.next = Some(n);
                break;
            }
            n[i] = 0;
        }
        Some(cur)
    }
}

/// A subgroup `H ⊂ ⊕ Z/d_i`, stored as the Hermite basis of its preimage
/// `Λ_H ⊂ Z^k` (which contains `⊕ d_i Z`). Equal subgroups have equal
/// Hermite bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    hnf: IntMatrix,
    orders: Vec<u64>,
    order: u64,
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.order, &self.hnf).cmp(&(other.order, &other.hnf))
    }
}

impl Subgroup {
    pub fn generated_by(form: &FiniteQuadraticForm, gens: &[Element]) -> Subgroup {
        let k = form.k();
        let mut rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        for (i, &d) in form.orders.iter().enumerate() {
            let mut r = vec![BigInt::zero(); k];
            r[i] = BigInt::from(d);
            rows.push(r);
        }
        let hnf = if k == 0 {
            IntMatrix::zeros(0, 0)
        } else {
            IntMatrix::from_rows(&rows).hermite()
        };
        debug_assert_eq!(hnf.nrows(), k);
        let index: u64 = (0..k)
            .map(|i| hnf.get(i, i).to_u64().expect("pivot divides a group order"))
            .product();
        Subgroup {
            hnf,
            orders: form.orders.clone(),
            order: form.order() / index,
        }
    }

    pub fn trivial(form: &FiniteQuadraticForm) -> Subgroup {
        Subgroup::generated_by(form, &[])
    }

    pub fn whole(form: &FiniteQuadraticForm) -> Subgroup {
        let gens: Vec<Element> = (0..form.k()).map(|i| form.generator(i)).collect();
        Subgroup::generated_by(form, &gens)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn hermite_basis(&self) -> &IntMatrix {
        &self.hnf
    }

    /// Canonical generators: the nonzero Hermite rows reduced mod the orders.
    pub fn generators(&self) -> Vec<Element> {
        (0..self.hnf.nrows())
            .filter(|&i| self.hnf.get(i, i) != &BigInt::from(self.orders[i]))
            .map(|i| {
                self.hnf
                    .row(i)
                    .iter()
                    .zip(&self.orders)
                    .map(|(x, &d)| x.mod_floor(&BigInt::from(d)).to_u64().unwrap())
                    .collect()
            })
            .collect()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        let k = self.orders.len();
        let mut rest: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        for i in 0..k {
            let (q, r) = rest[i].div_rem(self.hnf.get(i, i));
            if !r.is_zero() {
                return false;
            }
            if q.is_zero() {
                continue;
            }
            for j in i..k {
                rest[j] = &rest[j] - &q * self.hnf.get(i, j);
            }
        }
        true
    }

    /// All elements, enumerated from the Hermite basis.
    pub fn elements(&self) -> Vec<Element> {
        let k = self.orders.len();
        let ranges: Vec<u64> = (0..k)
            .map(|i| self.orders[i] / self.hnf.get(i, i).to_u64().unwrap())
            .collect();
        let mut out = Vec::with_capacity(self.order as usize);
        let mut coeff = vec![0u64; k];
        loop {
            let mut v = vec![BigInt::zero(); k];
            for i in 0..k {
                if coeff[i] == 0 {
                    continue;
                }
                for j in i..k {
                    v[j] += BigInt::from(coeff[i]) * self.hnf.get(i, j);
                }
            }
            out.push(
                v.iter()
                    .zip(&self.orders)
                    .map(|(x, &d)| x.mod_floor(&BigInt::from(d)).to_u64().unwrap())
                    .collect(),
            );
            let mut i = k;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                coeff[i] += 1;
                if coeff[i] < ranges[i] {
                    break;
                }
                coeff[i] = 0;
            }
        }
    }

    pub fn is_isotropic(&self, form: &FiniteQuadraticForm) -> bool {
        let gens = self.generators();
        gens.iter().all(|g| form.q(g).is_zero())
            && gens
                .iter()
                .enumerate()
                .all(|(i, g)| gens[i + 1..].iter().all(|h| form.b(g, h).is_zero()))
    }

    /// Image under a homomorphism of forms.
    pub fn image(&self, map: &FqfMap, src: &FiniteQuadraticForm, dst: &FiniteQuadraticForm) -> Subgroup {
        let imgs: Vec<Element> = self
            .generators()
            .iter()
            .map(|g| map.apply(src, dst, g))
            .collect();
        Subgroup::generated_by(dst, &imgs)
    }
}

/// A homomorphism between presented forms: the image of each source
/// generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqfMap {
    pub images: Vec<Element>,
}

/// An isometry of a form onto itself.
pub type FqfIsometry = FqfMap;

impl FqfMap {
    pub fn identity(form: &FiniteQuadraticForm) -> FqfMap {
        FqfMap {
            images: (0..form.k()).map(|i| form.generator(i)).collect(),
        }
    }

    pub fn apply(&self, src: &FiniteQuadraticForm, dst: &FiniteQuadraticForm, x: &[u64]) -> Element {
        let mut acc = dst.zero();
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                acc = dst.add(&acc, &dst.scale(&self.images[i], c));
            }
        }
        debug_assert_eq!(x.len(), src.k());
        acc
    }

    pub fn is_identity(&self, form: &FiniteQuadraticForm) -> bool {
        *self == FqfMap::identity(form)
    }

    /// `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &FqfMap, form: &FiniteQuadraticForm) -> FqfMap {
        FqfMap {
            images: self
                .images
                .iter()
                .map(|y| other.apply(form, form, y))
                .collect(),
        }
    }

    /// Block map `self ⊕ other` on `a ⊕ b`.
    pub fn direct_sum(&self, other: &FqfMap, a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> FqfMap {
        let mut images = Vec::with_capacity(a.k() + b.k());
        for y in &self.images {
            let mut v = y.clone();
            v.extend(b.zero());
            images.push(v);
        }
        for y in &other.images {
            let mut v = a.zero();
            v.extend(y.iter().copied());
            images.push(v);
        }
        FqfMap { images }
    }

    /// Checks well-definedness, preservation of `q` and `b`, and bijectivity.
    pub fn is_isometry(&self, src: &FiniteQuadraticForm, dst: &FiniteQuadraticForm) -> bool {
        if self.images.len() != src.k() || src.order() != dst.order() {
            return false;
        }
        for i in 0..src.k() {
            let y = &self.images[i];
            if y.len() != dst.k() || y.iter().zip(dst.orders()).any(|(&a, &d)| a >= d) {
                return false;
            }
            if src.orders[i] % dst.element_order(y) != 0 || dst.q(y) != src.q_gen(i) {
                return false;
            }
            for j in 0..i {
                if dst.b(y, &self.images[j]) != src.b_gen(i, j) {
                    return false;
                }
            }
        }
        Subgroup::generated_by(dst, &self.images).order() == dst.order()
    }
}

/// All isometries `src → dst` (at most `limit` of them), in lexicographic
/// order of generator images.
pub fn isometries(
    src: &FiniteQuadraticForm,
    dst: &FiniteQuadraticForm,
    budget: &Budget,
    limit: Option<usize>,
) -> Result<Vec<FqfMap>> {
    budget.check_order("finite form isometry search", dst.order().max(src.order()))?;
    if src.order() != dst.order() {
        return Ok(vec![]);
    }
    let dst_elems: Vec<Element> = dst.elements().collect();
    let candidates: Vec<Vec<&Element>> = (0..src.k())
        .map(|i| {
            dst_elems
                .iter()
                .filter(|y| dst.element_order(y) == src.orders[i] && dst.q(y) == src.q_gen(i))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<Element> = Vec::with_capacity(src.k());
    let mut counter = NodeCounter::new("finite form isometry search", budget);
    search_isometries(src, dst, &candidates, &mut chosen, &mut out, limit, &mut counter)?;
    Ok(out)
}

fn search_isometries(
    src: &FiniteQuadraticForm,
    dst: &FiniteQuadraticForm,
    candidates: &[Vec<&Element>],
    chosen: &mut Vec<Element>,
    out: &mut Vec<FqfMap>,
    limit: Option<usize>,
    counter: &mut NodeCounter,
) -> Result<()> {
    if limit.is_some_and(|l| out.len() >= l) {
        return Ok(());
    }
    let i = chosen.len();
    if i == src.k() {
        if Subgroup::generated_by(dst, chosen).order() == dst.order() {
            out.push(FqfMap {
                images: chosen.clone(),
            });
        }
        return Ok(());
    }
    for y in &candidates[i] {
        counter.tick()?;
        if (0..i).all(|j| dst.b(y, &chosen[j]) == src.b_gen(i, j)) {
            chosen.push((*y).clone());
            search_isometries(src, dst, candidates, chosen, out, limit, counter)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// The finite group `O(A)`.
pub fn isometry_group(form: &FiniteQuadraticForm, budget: &Budget) -> Result<Vec<FqfIsometry>> {
    isometries(form, form, budget, None)
}

/// Some isometry `a → b`, if one exists.
pub fn find_isometry(
    a: &FiniteQuadraticForm,
    b: &FiniteQuadraticForm,
    budget: &Budget,
) -> Result<Option<FqfMap>> {
    Ok(isometries(a, b, budget, Some(1))?.into_iter().next())
}

/// All isotropic subgroups (`q|_H ≡ 0`), sorted by order then Hermite basis.
pub fn enumerate_isotropic_subgroups(form: &FiniteQuadraticForm, budget: &Budget) -> Result<Vec<Subgroup>> {
    budget.check_order("isotropic subgroup enumeration", form.order())?;
    let isotropic: Vec<Element> = form
        .elements()
        .filter(|x| x.iter().any(|&c| c != 0) && form.q(x).is_zero())
        .collect();
    let mut counter = NodeCounter::new("isotropic subgroup enumeration", budget);
    let start = Subgroup::trivial(form);
    let mut seen: BTreeSet<Subgroup> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(h) = queue.pop_front() {
        let gens = h.generators();
        for x in &isotropic {
            counter.tick()?;
            if h.contains(x) || !gens.iter().all(|g| form.b(g, x).is_zero()) {
                continue;
            }
            let mut g2 = gens.clone();
            g2.push(x.clone());
            let h2 = Subgroup::generated_by(form, &g2);
            if seen.insert(h2.clone()) {
                queue.push_back(h2);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn require_isotropic(form: &FiniteQuadraticForm, h: &Subgroup) -> Result<()> {
    if !h.is_isotropic(form) {
        return Err(Error::NotIsotropic(format!(
            "subgroup of order {} carries nonzero q values",
            h.order()
        )));
    }
    Ok(())
}

/// `H^⊥ = {x : b(x, H) = 0}` for an isotropic `H`.
pub fn orthogonal_of_subgroup(form: &FiniteQuadraticForm, h: &Subgroup, budget: &Budget) -> Result<Subgroup> {
    require_isotropic(form, h)?;
    orthogonal(form, h, budget)
}

pub(crate) fn orthogonal(form: &FiniteQuadraticForm, h: &Subgroup, budget: &Budget) -> Result<Subgroup> {
    budget.check_order("orthogonal subgroup", form.order())?;
    let gens = h.generators();
    let mut acc = Subgroup::trivial(form);
    let mut acc_gens: Vec<Element> = Vec::new();
    for x in form.elements() {
        if acc.contains(&x) || !gens.iter().all(|g| form.b(g, &x).is_zero()) {
            continue;
        }
        acc_gens.push(x);
        acc = Subgroup::generated_by(form, &acc_gens);
    }
    Ok(acc)
}

/// `H^⊥ / H` presented in Smith normal form, together with representatives
/// in the ambient form of its generators.
#[derive(Clone, Debug)]
pub struct QuotientForm {
    pub form: FiniteQuadraticForm,
    pub representatives: Vec<Element>,
}

pub fn quotient_form(form: &FiniteQuadraticForm, h: &Subgroup, budget: &Budget) -> Result<QuotientForm> {
    require_isotropic(form, h)?;
    let perp = if h.order() == 1 {
        Subgroup::whole(form)
    } else {
        orthogonal(form, h, budget)?
    };
    present(form, &perp, h)
}

/// The restriction of the form to a subgroup, presented in Smith normal
/// form. The restricted form may be degenerate.
pub fn subgroup_form(form: &FiniteQuadraticForm, h: &Subgroup) -> Result<QuotientForm> {
    present(form, h, &Subgroup::trivial(form))
}

/// Present `outer / inner` with generators in Smith normal form. The caller
/// guarantees that `q` descends to the quotient.
fn present(form: &FiniteQuadraticForm, outer: &Subgroup, inner: &Subgroup) -> Result<QuotientForm> {
    if form.k() == 0 {
        return Ok(QuotientForm {
            form: FiniteQuadraticForm::trivial(),
            representatives: vec![],
        });
    }
    // Λ_inner = X · Λ_outer in Hermite coordinates
    let p = outer.hnf.clone();
    let x = inner
        .hnf
        .to_rational()
        .mul(&p.to_rational().inverse().expect("Hermite basis is full rank"))
        .to_integer()
        .ok_or_else(|| Error::Internal("inner subgroup is not contained in the outer one".into()))?;
    let sf = x.smith();
    let vinv = sf
        .q
        .unimodular_inverse()
        .ok_or_else(|| Error::Internal("Smith transform is not unimodular".into()))?;
    let gens_lat = vinv.mul(&p);
    let mut orders = Vec::new();
    let mut reps = Vec::new();
    for (i, d) in sf.diagonal().iter().enumerate() {
        if d.is_one() {
            continue;
        }
        orders.push(d.to_u64().ok_or_else(|| Error::invalid("quotient order too large"))?);
        reps.push(
            gens_lat
                .row(i)
                .iter()
                .zip(form.orders())
                .map(|(v, &o)| v.mod_floor(&BigInt::from(o)).to_u64().unwrap())
                .collect::<Element>(),
        );
    }
    let q: Vec<BigRational> = reps.iter().map(|x| form.q(x).to_rational()).collect();
    let b: Vec<Vec<BigRational>> = reps
        .iter()
        .map(|x| reps.iter().map(|y| form.b(x, y).to_rational()).collect())
        .collect();
    Ok(QuotientForm {
        form: FiniteQuadraticForm::new(orders, q, b)?,
        representatives: reps,
    })
}

/// `A_L` with the coordinate data that links it back to `L`.
///
/// Dual vectors are handled through their *dual coordinates* `c = y · G`,
/// which are integral exactly when `y ∈ L^∨`.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    form: FiniteQuadraticForm,
    gram_inv: RatMatrix,
    gram: IntMatrix,
    /// `n × k`: dual coordinates ↦ generator coefficients.
    projection: IntMatrix,
    /// `k × n`: dual coordinates of each generator.
    lifts: IntMatrix,
}

pub fn discriminant_form(l: &IntegralLattice) -> Result<DiscriminantForm> {
    let g = l.gram();
    let sf = g.smith();
    let qinv = sf
        .q
        .unimodular_inverse()
        .ok_or_else(|| Error::Internal("Smith transform is not unimodular".into()))?;
    let gram_inv = g.to_rational().inverse().expect("lattice is nondegenerate");
    let n = l.rank();
    let idx: Vec<usize> = (0..n).filter(|&i| !sf.d.get(i, i).is_one()).collect();
    let orders = idx
        .iter()
        .map(|&i| {
            sf.d.get(i, i)
                .to_u64()
                .ok_or_else(|| Error::invalid("discriminant group exponent does not fit in 64 bits"))
        })
        .collect::<Result<Vec<_>>>()?;
    let lifts = qinv.select_rows(&idx);
    let projection = sf.q.transpose().select_rows(&idx).transpose();
    let lifts_q = lifts.to_rational();
    let pair = lifts_q.mul(&gram_inv).mul(&lifts_q.transpose());
    let k = idx.len();
    let q: Vec<BigRational> = (0..k).map(|i| pair.get(i, i).clone()).collect();
    let b: Vec<Vec<BigRational>> = (0..k)
        .map(|i| (0..k).map(|j| pair.get(i, j).clone()).collect())
        .collect();
    let form = FiniteQuadraticForm::new(orders, q, b)?;
    Ok(DiscriminantForm {
        form,
        gram_inv,
        gram: g.clone(),
        projection,
        lifts,
    })
}

impl DiscriminantForm {
    pub fn form(&self) -> &FiniteQuadraticForm {
        &self.form
    }

    pub fn order(&self) -> u64 {
        self.form.order()
    }

    pub fn length(&self) -> usize {
        self.form.length()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    /// Dual coordinates of the generators (rows).
    pub fn generator_lifts(&self) -> &IntMatrix {
        &self.lifts
    }

    /// Class of the dual vector with dual coordinates `c`.
    pub fn project_dual(&self, c: &[BigInt]) -> Element {
        let v = self.projection.left_mul_vec(c);
        v.iter()
            .zip(self.form.orders())
            .map(|(x, &d)| x.mod_floor(&BigInt::from(d)).to_u64().unwrap())
            .collect()
    }

    /// Class of `y ∈ L^∨` given in rational `L`-coordinates.
    pub fn project_rational(&self, y: &[BigRational]) -> Result<Element> {
        let c = self.gram.to_rational().left_mul_vec(y);
        if c.iter().any(|x| !x.is_integer()) {
            return Err(Error::invalid("vector does not lie in the dual lattice"));
        }
        let c: Vec<BigInt> = c.iter().map(|x| x.to_integer()).collect();
        Ok(self.project_dual(&c))
    }

    /// A lift of `x` to `L^∨`, in rational `L`-coordinates.
    pub fn lift(&self, x: &[u64]) -> Vec<BigRational> {
        let coeff: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let c = self.lifts.left_mul_vec(&coeff);
        let cq: Vec<BigRational> = c.into_iter().map(BigRational::from_integer).collect();
        self.gram_inv.left_mul_vec(&cq)
    }

    /// Action on `A_L` of an isometry `x ↦ x·g` of `L`.
    ///
    /// On dual coordinates the isometry acts by `c ↦ c · (g⁻¹)ᵀ`.
    pub fn induced_action(&self, g: &IntMatrix) -> Result<FqfIsometry> {
        let ginv = g
            .unimodular_inverse()
            .ok_or_else(|| Error::invalid("matrix is not invertible over Z"))?;
        let act = ginv.transpose();
        let images = (0..self.form.k())
            .map(|i| self.project_dual(&act.left_mul_vec(self.lifts.row(i))))
            .collect();
        Ok(FqfMap { images })
    }
}

impl DiscriminantForm {
    /// Structural check used by tests: `|A_L| = |det L|`.
    pub fn order_matches_det(&self) -> bool {
        BigInt::from(self.order()) == self.gram.det().abs()
    }
}

/// `(Z/2, 1/2)`, the discriminant form of `<2>`.
pub fn half() -> FiniteQuadraticForm {
    FiniteQuadraticForm::cyclic(2, BigRational::new(BigInt::one(), BigInt::from(2))).unwrap()
}
