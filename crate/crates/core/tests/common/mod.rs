//! Shared corpus and brute-force oracles. The oracles deliberately avoid
//! the library's Smith/Hermite and enumeration code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use nlcover::lattice::builtin::resolve;
use nlcover::IntegralLattice;

/// Even lattices with `|A_L| ≤ 64`.
pub const CORPUS: &[&str] = &[
    "<2>",
    "<-2>",
    "<8>",
    "A2",
    "A3",
    "A7",
    "D4",
    "D8",
    "<2>^4",
    "U",
    "U+<-2>",
    "U(2)",
    "U(3)",
    "A2(-1)+<4>",
    "<2>+<-6>",
];

pub fn corpus() -> Vec<IntegralLattice> {
    CORPUS.iter().map(|l| resolve(l).unwrap()).collect()
}

pub fn lat(label: &str) -> IntegralLattice {
    resolve(label).unwrap()
}

pub fn gram_i64(l: &IntegralLattice) -> Vec<Vec<i64>> {
    l.gram()
        .to_i64()
        .expect("small Gram matrix")
        .to_rows()
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    // cofactor expansion; the matrices here are at most 8×8 minors of tiny entries
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
            .collect();
        let s = if j % 2 == 0 { 1 } else { -1 };
        acc += s * m[0][j] * det_i128(&minor);
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Elementary divisors from determinantal divisors `d_k = gcd of k×k minors`.
pub fn elementary_divisors(m: &[Vec<i64>]) -> Vec<i128> {
    let n = m.len();
    let mut d_prev = 1i128;
    let mut out = Vec::new();
    for k in 1..=n {
        let mut d = 0i128;
        for rows in subsets(n, k) {
            for cols in subsets(n, k) {
                let minor: Vec<Vec<i128>> = rows
                    .iter()
                    .map(|&r| cols.iter().map(|&c| m[r][c] as i128).collect())
                    .collect();
                d = gcd(d, det_i128(&minor));
                if d == 1 {
                    break;
                }
            }
            if d == 1 {
                break;
            }
        }
        out.push(d / d_prev);
        d_prev = d;
    }
    out
}

pub fn vp(mut n: i128, p: i128) -> u32 {
    let mut v = 0;
    n = n.abs();
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// All `g` with entries in `[-k, k]` and `g G gᵀ = G`.
pub fn brute_force_automorphisms(g: &[Vec<i64>], k: i64) -> Vec<Vec<Vec<i64>>> {
    let n = g.len();
    let side = (2 * k + 1) as usize;
    let total = side.pow((n * n) as u32);
    let mut out = Vec::new();
    for mut c in 0..total {
        let mut m = vec![vec![0i64; n]; n];
        for r in m.iter_mut() {
            for x in r.iter_mut() {
                *x = (c % side) as i64 - k;
                c /= side;
            }
        }
        let ok = (0..n).all(|i| {
            (0..n).all(|j| {
                let mut s = 0;
                for a in 0..n {
                    for b in 0..n {
                        s += m[i][a] * g[a][b] * m[j][b];
                    }
                }
                s == g[i][j]
            })
        });
        if ok {
            out.push(m);
        }
    }
    out
}

/// Roots of E8 in the coordinate model `D8 ∪ (D8 + (1/2)^8)`, found by
/// scanning `y = 2x ∈ [-2, 2]^8`: all `y_i` of one parity, `Σ y_i ≡ 0 mod 4`,
/// `Σ y_i² = 8`.
pub fn e8_root_count_by_coordinates() -> usize {
    let mut count = 0;
    for mut c in 0..5usize.pow(8) {
        let mut y = [0i64; 8];
        for x in y.iter_mut() {
            *x = (c % 5) as i64 - 2;
            c /= 5;
        }
        let parity = y[0].rem_euclid(2);
        if y.iter().any(|x| x.rem_euclid(2) != parity) {
            continue;
        }
        if y.iter().sum::<i64>().rem_euclid(4) != 0 {
            continue;
        }
        if y.iter().map(|x| x * x).sum::<i64>() == 8 {
            count += 1;
        }
    }
    count
}

/// Norm of every vector of `F_p^n`, classified per line by scaling
/// invariance: returns `(isotropic, square, nonsquare)` line counts.
pub fn line_types_by_vectors(g: &[Vec<i64>], p: i64) -> (u64, u64, u64) {
    let n = g.len();
    let squares: BTreeSet<i64> = (1..p).map(|x| x * x % p).collect();
    let total = (p as usize).pow(n as u32);
    let (mut z, mut s, mut ns) = (0u64, 0u64, 0u64);
    for mut c in 1..total {
        let mut v = vec![0i64; n];
        for x in v.iter_mut() {
            *x = (c % p as usize) as i64;
            c /= p as usize;
        }
        let mut q = 0i64;
        for i in 0..n {
            for j in 0..n {
                q += v[i] * g[i][j] * v[j];
            }
        }
        let q = q.rem_euclid(p);
        if q == 0 {
            z += 1;
        } else if squares.contains(&q) {
            s += 1;
        } else {
            ns += 1;
        }
    }
    let k = (p - 1) as u64;
    (z / k, s / k, ns / k)
}

/// Orbits of `O(G mod 3)` on the lines of `F_3^n`, `n ≤ 3`, by listing all
/// invertible matrices preserving the form.
pub fn f3_orbits(g: &[Vec<i64>]) -> Vec<BTreeSet<Vec<i64>>> {
    let p = 3i64;
    let n = g.len();
    let norm_line = |v: &[i64]| -> Vec<i64> {
        let lead = v.iter().find(|&&x| x != 0).copied().unwrap();
        let inv = if lead == 1 { 1 } else { 2 };
        v.iter().map(|x| x * inv % p).collect()
    };
    let mut group = Vec::new();
    let total = 3usize.pow((n * n) as u32);
    for mut c in 0..total {
        let mut m = vec![vec![0i64; n]; n];
        for r in m.iter_mut() {
            for x in r.iter_mut() {
                *x = (c % 3) as i64;
                c /= 3;
            }
        }
        let preserves = (0..n).all(|i| {
            (0..n).all(|j| {
                let mut s = 0;
                for a in 0..n {
                    for b in 0..n {
                        s += m[i][a] * g[a][b] * m[j][b];
                    }
                }
                (s - g[i][j]).rem_euclid(p) == 0
            })
        });
        if preserves {
            group.push(m);
        }
    }
    let mut lines = BTreeSet::new();
    for mut c in 1..3usize.pow(n as u32) {
        let mut v = vec![0i64; n];
        for x in v.iter_mut() {
            *x = (c % 3) as i64;
            c /= 3;
        }
        lines.insert(norm_line(&v));
    }
    let mut orbits: Vec<BTreeSet<Vec<i64>>> = Vec::new();
    let mut seen = BTreeSet::new();
    for l in &lines {
        if seen.contains(l) {
            continue;
        }
        let orbit: BTreeSet<Vec<i64>> = group
            .iter()
            .map(|m| {
                let img: Vec<i64> = (0..n).map(|j| (0..n).map(|i| l[i] * m[i][j]).sum::<i64>().rem_euclid(p)).collect();
                norm_line(&img)
            })
            .collect();
        seen.extend(orbit.iter().cloned());
        orbits.push(orbit);
    }
    orbits
}

/// Norm of a line representative mod `p`.
pub fn line_norm(g: &[Vec<i64>], v: &[i64], p: i64) -> i64 {
    let n = g.len();
    let mut q = 0;
    for i in 0..n {
        for j in 0..n {
            q += v[i] * g[i][j] * v[j];
        }
    }
    q.rem_euclid(p)
}
