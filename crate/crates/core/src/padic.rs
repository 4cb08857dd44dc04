//! Jordan decompositions over `Z_p` for odd `p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::isom::reflection_matrix;
use crate::lattice::IntegralLattice;
use crate::matrix::RatMatrix;
use crate::modp::{is_prime, legendre};

/// `v_p(n)` for nonzero `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

fn rat_valuation(x: &BigRational, p: u64) -> i64 {
    valuation(x.numer(), p) as i64 - valuation(x.denom(), p) as i64
}

/// Legendre symbol of the unit part of a nonzero `p`-adic rational.
fn unit_class(x: &BigRational, p: u64) -> i8 {
    let pb = BigInt::from(p);
    let strip = |n: &BigInt| {
        let mut n = n.clone();
        while (&n % &pb).is_zero() {
            n /= &pb;
        }
        n
    };
    let (a, b) = (strip(x.numer()), strip(x.denom()));
    legendre(&(a * b), p)
}

/// One constituent `p^k · U` of the decomposition: `U` unimodular of rank
/// `rank` with `det U` in the square class `unit_class` (±1 as a Legendre
/// symbol).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanBlock {
    pub scale: u32,
    pub rank: usize,
    pub unit_class: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanDecomposition {
    pub p: u64,
    pub blocks: Vec<JordanBlock>,
}

impl JordanDecomposition {
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank).sum()
    }

    /// `Σ k · r_k = v_p(det)`.
    pub fn det_valuation(&self) -> u64 {
        self.blocks.iter().map(|b| b.scale as u64 * b.rank as u64).sum()
    }

    /// `ℓ(A_L ⊗ Z_p) = Σ_{k ≥ 1} r_k`.
    pub fn p_length(&self) -> usize {
        self.blocks.iter().filter(|b| b.scale > 0).map(|b| b.rank).sum()
    }

    pub fn unimodular_rank(&self) -> usize {
        self.blocks
            .iter()
            .find(|b| b.scale == 0)
            .map_or(0, |b| b.rank)
    }
}

/// Default precision `v_p(det) + 2`.
pub fn default_precision(l: &IntegralLattice, p: u64) -> u32 {
    valuation(&l.det(), p) + 2
}

/// Diagonalize over `Z_(p)` by unit-pivot elimination. `precision` bounds
/// the scales that count as certified: a block of scale `k ≥ precision`
/// is a refusal.
pub fn jordan_decompose(l: &IntegralLattice, p: u64, precision: Option<u32>) -> Result<JordanDecomposition> {
    if p == 2 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    let precision = precision.unwrap_or_else(|| default_precision(l, p));
    let diag = diagonal_entries(&l.gram().to_rational(), p);
    let mut by_scale: std::collections::BTreeMap<u32, (usize, i8)> = Default::default();
    for d in &diag {
        let k = rat_valuation(d, p);
        debug_assert!(k >= 0);
        let k = k as u32;
        let e = by_scale.entry(k).or_insert((0, 1));
        e.0 += 1;
        e.1 *= unit_class(d, p);
    }
    let required = by_scale.keys().max().map_or(0, |k| k + 1);
    if required > precision {
        return Err(Error::Precision {
            given: precision,
            required,
        });
    }
    Ok(JordanDecomposition {
        p,
        blocks: by_scale
            .into_iter()
            .map(|(scale, (rank, unit_class))| JordanBlock {
                scale,
                rank,
                unit_class,
            })
            .collect(),
    })
}

/// Diagonal entries of a `Z_(p)`-congruent diagonal form.
fn diagonal_entries(g: &RatMatrix, p: u64) -> Vec<BigRational> {
    let mut m = g.clone();
    let mut n = m.nrows();
    let mut out = Vec::with_capacity(n);
    while n > 0 {
        // entry of minimal valuation
        let mut best: Option<(i64, usize, usize)> = None;
        for i in 0..n {
            for j in i..n {
                let x = m.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let v = rat_valuation(x, p);
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => v < bv || (v == bv && bi != bj && i == j),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("nondegenerate form");
        if i != j {
            // e_i ← e_i + e_j gives a diagonal entry of the same valuation (p odd)
            for c in 0..n {
                let v = m.get(i, c) + m.get(j, c);
                m.set(i, c, v);
            }
            for r in 0..n {
                let v = m.get(r, i) + m.get(r, j);
                m.set(r, i, v);
            }
        }
        m.swap_rows(0, i);
        m.swap_cols(0, i);
        let pivot = m.get(0, 0).clone();
        for r in 1..n {
            let f = m.get(r, 0) / &pivot;
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = m.get(r, c) - &f * m.get(0, c);
                m.set(r, c, v);
            }
            for c in 0..n {
                let v = m.get(c, r) - &f * m.get(c, 0);
                m.set(c, r, v);
            }
        }
        out.push(pivot);
        let rest: Vec<Vec<BigRational>> = (1..n).map(|r| m.row(r)[1..n].to_vec()).collect();
        n -= 1;
        m = RatMatrix::from_rows(&rest);
        if n == 0 {
            break;
        }
    }
    out
}

/// A vector whose norm is a `p`-adic unit, with its reflection.
#[derive(Clone, Debug)]
pub struct UnitNormVector {
    pub vector: Vec<BigInt>,
    pub norm: BigInt,
    /// Reflection `y ↦ y − 2(y,x)/(x,x)·x` over `Z_(p)`.
    pub reflection: RatMatrix,
    /// The reflection matrix has entries in `Z`.
    pub integral: bool,
}

/// Find `x ∈ L` with `v_p((x, x)) = 0`. Preference order: `|(x, x)| = 2`,
/// then any `x` whose reflection is integral over `Z`, then any unit-norm
/// `x` (reflection integral over `Z_(p)` only).
pub fn find_unit_norm_vector(l: &IntegralLattice, p: u64) -> Result<UnitNormVector> {
    let jd = jordan_decompose(l, p, None)?;
    if jd.unimodular_rank() == 0 {
        return Err(Error::hypothesis(format!(
            "L ⊗ Z_{p} has no unimodular constituent (ℓ(A_L ⊗ Z_p) = rank)"
        )));
    }
    let n = l.rank();
    let pb = BigInt::from(p);
    let mut candidates: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::from(1);
        candidates.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            for s in [1, -1] {
                let mut e = vec![BigInt::zero(); n];
                e[i] = BigInt::from(1);
                e[j] = BigInt::from(s);
                candidates.push(e);
            }
        }
    }
    if n <= 5 {
        // small box, for lattices whose short unit-norm vectors are not sums of two basis vectors
        let side = 5usize.pow(n as u32);
        for mut c in 0..side {
            let v: Vec<BigInt> = (0..n)
                .map(|_| {
                    let d = (c % 5) as i64 - 2;
                    c /= 5;
                    BigInt::from(d)
                })
                .collect();
            candidates.push(v);
        }
    }
    let units: Vec<(Vec<BigInt>, BigInt)> = candidates
        .into_iter()
        .map(|v| {
            let nv = l.norm(&v);
            (v, nv)
        })
        .filter(|(_, nv)| !(nv % &pb).is_zero())
        .collect();
    let (vector, norm) = units
        .iter()
        .find(|(_, nv)| nv.abs().to_u64() == Some(2))
        .or_else(|| units.iter().find(|(v, _)| reflection_matrix(l, v).is_some()))
        .or_else(|| units.first())
        .cloned()
        .ok_or_else(|| Error::Internal("unit-norm candidate search failed".into()))?;
    let reflection = match reflection_matrix(l, &vector) {
        Some(m) => m.to_rational(),
        None => rational_reflection(l, &vector),
    };
    let integral = reflection.is_integral();
    let p_integral = reflection
        .entries()
        .iter()
        .all(|x| !(x.denom() % &pb).is_zero());
    if !p_integral || reflection.congruence(&l.gram().to_rational()) != l.gram().to_rational() {
        return Err(Error::Internal("unit-norm reflection is not a p-integral isometry".into()));
    }
    Ok(UnitNormVector {
        vector,
        norm,
        reflection,
        integral,
    })
}

fn rational_reflection(l: &IntegralLattice, v: &[BigInt]) -> RatMatrix {
    let n = l.rank();
    let norm = BigRational::from_integer(l.norm(v));
    let gv = l.gram().left_mul_vec(v);
    let mut m = RatMatrix::identity(n);
    for i in 0..n {
        let c = BigRational::from_integer(BigInt::from(2) * &gv[i]) / &norm;
        for j in 0..n {
            let e = m.get(i, j) - &c * BigRational::from_integer(v[j].clone());
            m.set(i, j, e);
        }
    }
    m
}
