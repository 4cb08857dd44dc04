//! Reductions modulo an odd prime: line types in `S ⊗ F_p`, index-`p`
//! sublattices and their discriminant forms, and the choice of covering
//! prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::budget::Budget;
use crate::discform::{discriminant_form, find_isometry, subgroup_form, FiniteQuadraticForm, Subgroup};
use crate::error::{Error, Result};
use crate::lattice::IntegralLattice;
use crate::matrix::IntMatrix;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Odd primes in increasing order starting at 3.
pub fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| is_prime(n))
}

fn powmod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    r as u64
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    if powmod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn gram_mod(l: &IntegralLattice, p: u64) -> Vec<Vec<u64>> {
    let pb = BigInt::from(p);
    l.gram()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect())
        .collect()
}

/// Nonzero vectors of `F_p^n` whose first nonzero coordinate is 1, one per
/// line, in lexicographic order.
pub fn normalized_vectors(n: usize, p: u64) -> impl Iterator<Item = Vec<u64>> {
    (0..n).rev().flat_map(move |lead| {
        // vectors (0,..,0,1,*,..,*) with the 1 at position n-1-lead
        let pos = n - 1 - lead;
        let count = p.pow(lead as u32);
        (0..count).map(move |mut c| {
            let mut v = vec![0u64; n];
            v[pos] = 1;
            for j in (pos + 1..n).rev() {
                v[j] = c % p;
                c /= p;
            }
            v
        })
    })
}

/// `(p^n − 1)/(p − 1)`.
pub fn line_count(n: usize, p: u64) -> BigInt {
    (num_traits::pow(BigInt::from(p), n) - 1) / BigInt::from(p - 1)
}

/// Lines of `S ⊗ F_p` by type of `(x, x)`: zero, nonzero square, nonsquare.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineClassCount {
    pub p: u64,
    pub n0: BigInt,
    pub n_plus: BigInt,
    pub n_minus: BigInt,
}

impl LineClassCount {
    pub fn total(&self) -> BigInt {
        &self.n0 + &self.n_plus + &self.n_minus
    }

    /// Smallest nonempty class size.
    pub fn min_nonempty(&self) -> Option<BigInt> {
        [&self.n0, &self.n_plus, &self.n_minus]
            .into_iter()
            .filter(|c| !c.is_zero())
            .min()
            .cloned()
    }
}

fn require_coprime(l: &IntegralLattice, p: u64) -> Result<()> {
    require_odd_prime(p)?;
    if (l.det() % BigInt::from(p)).is_zero() {
        return Err(Error::invalid(format!("{p} divides det = {}", l.det())));
    }
    Ok(())
}

/// Largest number of lines [`line_classes`] enumerates.
pub const MAX_EXHAUSTIVE_LINES: u64 = 20_000_000;

/// Exhaustive classification of all lines of `S ⊗ F_p`.
pub fn line_classes(s: &IntegralLattice, p: u64) -> Result<LineClassCount> {
    require_coprime(s, p)?;
    let n = s.rank();
    let total = line_count(n, p);
    let total_u = total.to_u64().unwrap_or(u64::MAX);
    Budget::new(MAX_EXHAUSTIVE_LINES).check_order("line enumeration", total_u)?;
    let g = gram_mod(s, p);
    let (mut n0, mut np, mut nm) = (0u64, 0u64, 0u64);
    for v in normalized_vectors(n, p) {
        let mut acc = 0u128;
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc += v[i] as u128 * g[i][j] as u128 % p as u128 * v[j] as u128;
            }
        }
        let norm = (acc % p as u128) as u64;
        match legendre(&BigInt::from(norm), p) {
            0 => n0 += 1,
            1 => np += 1,
            _ => nm += 1,
        }
    }
    Ok(LineClassCount {
        p,
        n0: n0.into(),
        n_plus: np.into(),
        n_minus: nm.into(),
    })
}

/// Line counts from the point counts of a nondegenerate quadric over `F_p`.
pub fn line_classes_formula(s: &IntegralLattice, p: u64) -> Result<LineClassCount> {
    require_coprime(s, p)?;
    let n = s.rank();
    let pb = BigInt::from(p);
    let pow = |k: usize| num_traits::pow(pb.clone(), k);
    let d = s.det();
    let sign = |k: usize| if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    // N(c) = #{x ∈ F_p^n : (x, x) = c}
    let count = |c: &BigInt| -> BigInt {
        if n % 2 == 1 {
            let h = (n - 1) / 2;
            if c.is_zero() {
                pow(n - 1)
            } else {
                let chi = legendre(&(sign(h) * c * &d), p);
                pow(n - 1) + pow(h) * BigInt::from(chi)
            }
        } else {
            let h = n / 2;
            let eta = BigInt::from(legendre(&(sign(h) * &d), p));
            if c.is_zero() {
                pow(n - 1) + (&pb - 1) * pow(h - 1) * eta
            } else {
                pow(n - 1) - pow(h - 1) * eta
            }
        }
    };
    let nonsquare = (2..p).find(|&a| legendre(&BigInt::from(a), p) == -1).unwrap();
    // a line of square (nonsquare) type holds exactly two vectors of norm 1 (ν)
    Ok(LineClassCount {
        p,
        n0: (count(&BigInt::zero()) - 1) / BigInt::from(p - 1),
        n_plus: count(&BigInt::one()) / 2,
        n_minus: count(&BigInt::from(nonsquare)) / 2,
    })
}

/// A sublattice of index `p`, the kernel of `α: S → Z/p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexPSublattice {
    pub parent: IntegralLattice,
    /// Hermite basis in coordinates of `parent`.
    pub basis: IntMatrix,
    pub p: u64,
    /// Normalized `α` (first nonzero entry 1): `x ∈ S'` iff `Σ x_i α_i ≡ 0`.
    pub functional: Vec<u64>,
    /// The line `y` with `S' = {x : (x, y) ≡ 0 mod p}`, when `p ∤ det`.
    pub dual_line: Option<Vec<u64>>,
}

impl IndexPSublattice {
    pub fn lattice(&self) -> IntegralLattice {
        self.parent
            .sublattice(&self.basis)
            .expect("sublattices of even lattices are even")
    }

    /// Whether the dual line is isotropic mod `p`.
    pub fn dual_line_isotropic(&self) -> Option<bool> {
        let y = self.dual_line.as_ref()?;
        let v: Vec<BigInt> = y.iter().map(|&c| BigInt::from(c)).collect();
        Some((self.parent.norm(&v) % BigInt::from(self.p)).is_zero())
    }
}

/// `{x : Σ x_i α_i ≡ 0 mod p}` in Hermite form.
pub fn kernel_basis(alpha: &[u64], p: u64) -> IntMatrix {
    let n = alpha.len();
    let j = alpha.iter().position(|&a| a != 0).expect("nonzero functional");
    let inv = powmod(alpha[j], p - 2, p);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        if i == j {
            r[j] = BigInt::from(p);
        } else {
            r[i] = BigInt::one();
            let c = (alpha[i] as u128 * inv as u128 % p as u128) as i64;
            r[j] = BigInt::from(-c);
        }
        rows.push(r);
    }
    IntMatrix::from_rows(&rows).hermite()
}

fn normalize_mod(v: &mut [u64], p: u64) -> bool {
    let Some(j) = v.iter().position(|&a| a != 0) else {
        return false;
    };
    let inv = powmod(v[j], p - 2, p);
    for x in v.iter_mut() {
        *x = (*x as u128 * inv as u128 % p as u128) as u64;
    }
    true
}

fn dual_line_of(s: &IntegralLattice, alpha: &[u64], p: u64) -> Option<Vec<u64>> {
    let pb = BigInt::from(p);
    if (s.det() % &pb).is_zero() {
        return None;
    }
    let ginv = s.gram().to_rational().inverse()?;
    let a: Vec<num_rational::BigRational> = alpha
        .iter()
        .map(|&x| num_rational::BigRational::from_integer(BigInt::from(x)))
        .collect();
    let y = ginv.left_mul_vec(&a);
    let mut out: Vec<u64> = y
        .iter()
        .map(|r| {
            let den = r.denom().mod_floor(&pb).to_u64().unwrap();
            let num = r.numer().mod_floor(&pb).to_u64().unwrap();
            (num as u128 * powmod(den, p - 2, p) as u128 % p as u128) as u64
        })
        .collect();
    normalize_mod(&mut out, p);
    Some(out)
}

/// All index-`p` sublattices, ordered by their normalized functional.
pub fn enumerate_index_p_sublattices(s: &IntegralLattice, p: u64) -> Result<Vec<IndexPSublattice>> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let n = s.rank();
    let total = line_count(n, p).to_u64().unwrap_or(u64::MAX);
    Budget::new(MAX_EXHAUSTIVE_LINES).check_order("index-p sublattice enumeration", total)?;
    Ok(normalized_vectors(n, p)
        .map(|alpha| IndexPSublattice {
            parent: s.clone(),
            basis: kernel_basis(&alpha, p),
            p,
            dual_line: dual_line_of(s, &alpha, p),
            functional: alpha,
        })
        .collect())
}

/// Recover the normalized functional with kernel `S'` from its basis, via
/// the Smith form of the coordinate matrix.
pub fn functional_from_basis(basis: &IntMatrix, p: u64) -> Result<Vec<u64>> {
    let n = basis.ncols();
    if basis.nrows() != n {
        return Err(Error::Dimension("index-p sublattice basis must be square".into()));
    }
    let sf = basis.smith();
    let diag = sf.diagonal();
    let pb = BigInt::from(p);
    let ok = diag[..n - 1].iter().all(|d| d.is_one()) && diag[n - 1].abs() == pb;
    if !ok {
        return Err(Error::invalid("quotient is not Z/p"));
    }
    let mut alpha: Vec<u64> = sf
        .q
        .column(n - 1)
        .iter()
        .map(|x| x.mod_floor(&pb).to_u64().unwrap())
        .collect();
    normalize_mod(&mut alpha, p);
    Ok(alpha)
}

/// Shape of the `p`-part of `A_{S'}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PPart {
    /// `(Z/p)²`
    Elementary,
    /// `Z/p²`
    Cyclic,
}

impl PPart {
    pub fn label(self, p: u64) -> String {
        match self {
            PPart::Elementary => format!("(Z/{p})^2"),
            PPart::Cyclic => format!("Z/{}", p * p),
        }
    }
}

/// `A_{S'} = A_S ⊕ (p-part)` with the prime-to-`p` summand matched to `A_S`
/// by an explicit isometry.
#[derive(Clone, Debug)]
pub struct DiscSplit {
    pub form: FiniteQuadraticForm,
    pub prime_to_p: FiniteQuadraticForm,
    pub p_part: FiniteQuadraticForm,
    pub tag: PPart,
    pub length: usize,
    /// The prime-to-`p` summand was verified isometric to `A_S`.
    pub certified: bool,
}

pub fn sublattice_disc_split(s: &IntegralLattice, sub: &IndexPSublattice, budget: &Budget) -> Result<DiscSplit> {
    let p = sub.p;
    require_coprime(s, p)?;
    let sp = sub.lattice();
    let a = discriminant_form(&sp)?;
    let f = a.form().clone();
    let expected = BigInt::from(p * p) * s.det().abs();
    if BigInt::from(f.order()) != expected {
        return Err(Error::Internal(format!(
            "|A_S'| = {} but p²·|det S| = {expected}",
            f.order()
        )));
    }
    let e = f.exponent();
    let mut p_pow = 1u64;
    while e % (p_pow * p) == 0 {
        p_pow *= p;
    }
    let m = e / p_pow;
    let scaled = |k: u64| -> Vec<Vec<u64>> { (0..f.k()).map(|i| f.scale(&f.generator(i), k)).collect() };
    let p_sub = Subgroup::generated_by(&f, &scaled(m));
    let q_sub = Subgroup::generated_by(&f, &scaled(p_pow));
    let p_part = subgroup_form(&f, &p_sub)?.form;
    let prime_to_p = subgroup_form(&f, &q_sub)?.form;
    let tag = match p_part.orders() {
        [a, b] if *a == p && *b == p => PPart::Elementary,
        [c] if *c == p * p => PPart::Cyclic,
        other => {
            return Err(Error::Internal(format!("unexpected p-part orders {other:?}")));
        }
    };
    let a_s = discriminant_form(s)?;
    let certified = find_isometry(&prime_to_p, a_s.form(), budget)?.is_some();
    Ok(DiscSplit {
        length: f.length(),
        form: f,
        prime_to_p,
        p_part,
        tag,
        certified,
    })
}

/// Result of [`choose_p`].
#[derive(Clone, Debug)]
pub struct ChosenPrime {
    pub p: u64,
    pub counts: LineClassCount,
    /// `⌈min_ε |L_{p,ε}| / 4⌉` over nonempty classes.
    pub bound: BigInt,
}

/// `⌈min_ε |L_{p,ε}| / 4⌉` for `p ∤ det`.
pub fn index_bound(s: &IntegralLattice, p: u64) -> Result<(LineClassCount, BigInt)> {
    let counts = line_classes_formula(s, p)?;
    let min = counts
        .min_nonempty()
        .ok_or_else(|| Error::hypothesis("all line classes are empty"))?;
    let bound = min.div_ceil(&BigInt::from(4));
    Ok((counts, bound))
}

/// Smallest odd prime `p ∤ det S` with `⌈min_ε |L_{p,ε}| / 4⌉ > N`.
pub fn choose_p(s: &IntegralLattice, n: u64) -> Result<ChosenPrime> {
    if !s.is_indefinite() || s.rank() < 3 {
        return Err(Error::hypothesis(
            "choose_p needs an indefinite lattice of rank at least 3",
        ));
    }
    let nb = BigInt::from(n);
    let det = s.det();
    for p in odd_primes() {
        if (&det % BigInt::from(p)).is_zero() {
            continue;
        }
        let (counts, bound) = index_bound(s, p)?;
        if bound > nb {
            return Ok(ChosenPrime { p, counts, bound });
        }
    }
    unreachable!("the prime sequence is infinite")
}
