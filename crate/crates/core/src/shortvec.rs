//! Exact Fincke–Pohst enumeration of short vectors in definite lattices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::IntegralLattice;
use crate::matrix::RatMatrix;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ShortVector {
    /// `(v, v)` with the sign of the lattice.
    pub norm: BigInt,
    pub coords: Vec<BigInt>,
}

/// Quadratic-form coefficients with `Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
fn fincke_pohst_coefficients(gram: &RatMatrix) -> RatMatrix {
    let n = gram.nrows();
    let mut q = gram.clone();
    for i in 0..n {
        for j in i + 1..n {
            let v = q.get(i, j).clone();
            q.set(j, i, v.clone());
            q.set(i, j, v / q.get(i, i));
        }
        for k in i + 1..n {
            for l in k..n {
                let v = q.get(k, l) - q.get(k, i) * q.get(i, l);
                q.set(k, l, v);
            }
        }
    }
    q
}

/// All nonzero `v` with `|(v, v)| ≤ bound`, including both `v` and `−v`.
pub fn short_vectors_signed(l: &IntegralLattice, bound: &BigInt) -> Result<Vec<ShortVector>> {
    let sign = if l.is_positive_definite() {
        BigInt::from(1)
    } else if l.is_negative_definite() {
        BigInt::from(-1)
    } else {
        return Err(Error::invalid("short vectors need a definite lattice"));
    };
    let n = l.rank();
    let pos = l.gram().scale(&sign).to_rational();
    let q = fincke_pohst_coefficients(&pos);
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    let bound = BigRational::from_integer(bound.abs());
    enumerate(&q, n, &mut x, &bound, &mut out);
    let mut res: Vec<ShortVector> = out
        .into_iter()
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .map(|coords| ShortVector {
            norm: l.norm(&coords),
            coords,
        })
        .collect();
    res.sort_by(|a, b| (a.norm.abs(), &a.coords).cmp(&(b.norm.abs(), &b.coords)));
    Ok(res)
}

/// All `v` with `|(v, v)| ≤ bound`, one per `±` pair (first nonzero
/// coordinate positive), sorted by `|norm|` and then coordinates.
pub fn short_vectors(l: &IntegralLattice, bound: &BigInt) -> Result<Vec<ShortVector>> {
    Ok(short_vectors_signed(l, bound)?
        .into_iter()
        .filter(|v| v.coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive()))
        .collect())
}

fn enumerate(q: &RatMatrix, level: usize, x: &mut Vec<BigInt>, remaining: &BigRational, out: &mut Vec<Vec<BigInt>>) {
    if level == 0 {
        out.push(x.clone());
        return;
    }
    let i = level - 1;
    let n = q.nrows();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        center -= q.get(i, j) * BigRational::from_integer(x[j].clone());
    }
    let qi = q.get(i, i).clone();
    let cost = |v: &BigInt| {
        let d = BigRational::from_integer(v.clone()) - &center;
        &qi * &d * &d
    };
    let start = center.round().to_integer();
    // walk outward from the nearest integer; the cost is convex in x_i
    let visit = |v: BigInt, x: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>| -> bool {
        let c = cost(&v);
        if &c > remaining {
            return false;
        }
        x[i] = v;
        enumerate(q, i, x, &(remaining - c), out);
        true
    };
    let mut up = start.clone();
    while visit(up.clone(), x, out) {
        up += 1;
    }
    let mut down: BigInt = start - 1;
    while visit(down.clone(), x, out) {
        down -= 1;
    }
    x[i] = BigInt::zero();
}
