//! Dense matrices over exact rings and the integer normal forms built on them.
//!
//! Row convention throughout the crate: a matrix whose rows are vectors
//! `v_1, ..., v_k` spans the module `Z v_1 + ... + Z v_k`, and a vector acts
//! on a matrix from the left (`x ↦ x·M`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        Matrix::from_vec(r, c, data)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows_iter().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix::from_vec(self.cols, self.rows, data)
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_slice(&self, start: usize, end: usize) -> Self {
        Matrix::from_vec(
            end - start,
            self.cols,
            self.data[start * self.cols..end * self.cols].to_vec(),
        )
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix::from_vec(idx.len(), self.cols, data)
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack: column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix::from_vec(self.rows + other.rows, self.cols, data)
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix::from_vec(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + One + PartialEq,
    for<'a> &'a T: Add<&'a T, Output = T> + Mul<&'a T, Output = T> + Sub<&'a T, Output = T>,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_vec(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product: dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = &out.data[i * rhs.cols + j] + &(a * rhs.get(k, j));
                    out.data[i * rhs.cols + j] = v;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows, "vector-matrix product: dimension mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = &*o + &(xk * self.get(k, j));
            }
        }
        out
    }

    /// `x · M · yᵀ` for row vectors `x`, `y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let xm = self.left_mul_vec(x);
        xm.iter()
            .zip(y)
            .fold(T::zero(), |acc, (a, b)| &acc + &(a * b))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x * s)
    }

    /// Block diagonal sum `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// `self · G · selfᵀ`.
    pub fn congruence(&self, g: &Self) -> Self {
        self.mul(g).mul(&self.transpose())
    }
}

impl<T> Neg for &Matrix<T>
where
    T: Clone,
    for<'a> &'a T: Neg<Output = T>,
{
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x)
    }
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Matrix::from_rows(&big)
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    /// Entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64(&self) -> Option<Matrix<i64>> {
        let data: Option<Vec<i64>> = self.data.iter().map(|x| x.to_i64()).collect();
        data.map(|d| Matrix::from_vec(self.rows, self.cols, d))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    /// Row-style Hermite normal form with transform: returns `(H, U, rank)`
    /// where `U` is unimodular, `U · self = H`, the first `rank` rows of `H`
    /// are in echelon form with positive pivots and reduced entries above each
    /// pivot, and the remaining rows are zero. The last `nrows - rank` rows of
    /// `U` are a basis of the left kernel.
    pub fn hermite_with_transform(&self) -> (IntMatrix, IntMatrix, usize) {
        let m = self.rows;
        let n = self.cols;
        let mut h = self.clone();
        let mut u = IntMatrix::identity(m);
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            for i in r + 1..m {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let a = h.get(r, c).clone();
                let b = h.get(i, c).clone();
                let eg = a.extended_gcd(&b);
                let (s, t, g) = (eg.x, eg.y, eg.gcd);
                let ag = &a / &g;
                let bg = &b / &g;
                combine_rows(&mut h, r, i, &s, &t, &-&bg, &ag);
                combine_rows(&mut u, r, i, &s, &t, &-&bg, &ag);
            }
            if h.get(r, c).is_zero() {
                continue;
            }
            if h.get(r, c).is_negative() {
                negate_row(&mut h, r);
                negate_row(&mut u, r);
            }
            let pivot = h.get(r, c).clone();
            for i in 0..r {
                let q = h.get(i, c).div_floor(&pivot);
                if !q.is_zero() {
                    axpy_row(&mut h, i, r, &q);
                    axpy_row(&mut u, i, r, &q);
                }
            }
            r += 1;
        }
        (h, u, r)
    }

    /// Nonzero rows of the Hermite normal form: a canonical basis of the row
    /// module.
    pub fn hermite(&self) -> IntMatrix {
        let (h, _, r) = self.hermite_with_transform();
        h.row_slice(0, r)
    }

    pub fn rank(&self) -> usize {
        self.hermite_with_transform().2
    }

    /// Basis (as rows) of `{x ∈ Z^rows : x · self = 0}`. The returned module is
    /// always saturated in `Z^rows`.
    pub fn left_kernel(&self) -> IntMatrix {
        let (_, u, r) = self.hermite_with_transform();
        u.row_slice(r, self.rows)
    }

    /// Smith normal form with transforms.
    pub fn smith(&self) -> SmithForm {
        smith_normal_form(self)
    }

    /// Exact inverse of a unimodular integer matrix.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        self.to_rational().inverse()?.to_integer()
    }
}

impl IntMatrix {
    /// Integer coefficients `c` with `c · self = x`, if `x` lies in the row
    /// module. Rows of `self` must be linearly independent.
    pub fn express_in_rows(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(x.len(), self.cols);
        let (h, u, r) = self.hermite_with_transform();
        assert_eq!(r, self.rows, "express_in_rows needs independent rows");
        let mut rest = x.to_vec();
        let mut c = vec![BigInt::zero(); r];
        let mut col = 0;
        for (i, ci) in c.iter_mut().enumerate() {
            while h.get(i, col).is_zero() {
                if !rest[col].is_zero() {
                    return None;
                }
                col += 1;
            }
            let (q, rem) = rest[col].div_rem(h.get(i, col));
            if !rem.is_zero() {
                return None;
            }
            for j in col..self.cols {
                rest[j] = &rest[j] - &q * h.get(i, j);
            }
            *ci = q;
        }
        if rest.iter().any(|v| !v.is_zero()) {
            return None;
        }
        Some(u.left_mul_vec(&c))
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for x in m.row_mut(r) {
        *x = -&*x;
    }
}

/// `row_i -= q · row_r`.
fn axpy_row(m: &mut IntMatrix, i: usize, r: usize, q: &BigInt) {
    for j in 0..m.cols {
        let v = m.get(i, j) - q * m.get(r, j);
        m.set(i, j, v);
    }
}

/// Simultaneously replace rows `(r, i)` by `(s·r + t·i, u·r + v·i)`.
fn combine_rows(m: &mut IntMatrix, r: usize, i: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
    for j in 0..m.cols {
        let a = m.get(r, j).clone();
        let b = m.get(i, j).clone();
        m.set(r, j, s * &a + t * &b);
        m.set(i, j, u * &a + v * &b);
    }
}

fn combine_cols(m: &mut IntMatrix, r: usize, i: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
    for k in 0..m.rows {
        let a = m.get(k, r).clone();
        let b = m.get(k, i).clone();
        m.set(k, r, s * &a + t * &b);
        m.set(k, i, u * &a + v * &b);
    }
}

/// `P · M · Q = D` with `P`, `Q` unimodular and `D` diagonal, `d_1 | d_2 | ...`,
/// all diagonal entries nonnegative.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_1, ..., d_min(m,n)` (zeros included).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    /// Nonzero invariant factors.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }
}

fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.rows;
    let cols = m.cols;
    let mut a = m.clone();
    let mut p = IntMatrix::identity(rows);
    let mut q = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_smith(a, p, q);
            };
            a.swap_rows(t, bi);
            p.swap_rows(t, bi);
            a.swap_cols(t, bj);
            q.swap_cols(t, bj);

            let mut dirty = false;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let f = a.get(i, t).div_floor(a.get(t, t));
                axpy_row(&mut a, i, t, &f);
                axpy_row(&mut p, i, t, &f);
                if !a.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let f = a.get(t, j).div_floor(a.get(t, t));
                let (one, zero) = (BigInt::one(), BigInt::zero());
                // col_j -= f · col_t
                combine_cols(&mut a, j, t, &one, &-&f, &zero, &one);
                combine_cols(&mut q, j, t, &one, &-&f, &zero, &one);
                if !a.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let pivot = a.get(t, t).clone();
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    axpy_row(&mut a, t, i, &-&one);
                    axpy_row(&mut p, t, i, &-&one);
                }
                None => break,
            }
        }
    }
    finish_smith(a, p, q)
}

fn finish_smith(mut a: IntMatrix, mut p: IntMatrix, q: IntMatrix) -> SmithForm {
    for i in 0..a.rows.min(a.cols) {
        if a.get(i, i).is_negative() {
            negate_row(&mut a, i);
            negate_row(&mut p, i);
        }
    }
    SmithForm { d: a, p, q }
}

impl RatMatrix {
    /// Gauss–Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for c in 0..n {
            let piv = (c..n).find(|&i| !a.get(i, c).is_zero())?;
            a.swap_rows(c, piv);
            inv.swap_rows(c, piv);
            let pv = a.get(c, c).clone();
            for j in 0..n {
                let x = a.get(c, j) / &pv;
                a.set(c, j, x);
                let y = inv.get(c, j) / &pv;
                inv.set(c, j, y);
            }
            for i in 0..n {
                if i == c || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..n {
                    let x = a.get(i, j) - &f * a.get(c, j);
                    a.set(i, j, x);
                    let y = inv.get(i, j) - &f * inv.get(c, j);
                    inv.set(i, j, y);
                }
            }
        }
        Some(inv)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_integer(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(self.map(|x| x.to_integer()))
    }

    /// Least common multiple of all entry denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

/// Row vector of integers times a rational matrix.
pub fn int_vec_to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Pivot counts of a rational symmetric matrix: `(positive, negative, zero)`.
///
/// Symmetric Gaussian elimination by congruence. When every remaining diagonal
/// entry vanishes but some off-diagonal entry `a_ij` does not, the substitution
/// `e_i ← e_i + e_j` produces the nonzero diagonal entry `2·a_ij`.
pub fn inertia(m: &RatMatrix) -> (usize, usize, usize) {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        if a.get(k, k).is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a.get(i, i).is_zero()) {
                a.swap_rows(k, i);
                a.swap_cols(k, i);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                // e_k ← e_k + e_j
                for c in 0..n {
                    let v = a.get(k, c) + a.get(j, c);
                    a.set(k, c, v);
                }
                for r in 0..n {
                    let v = a.get(r, k) + a.get(r, j);
                    a.set(r, k, v);
                }
            } else if let Some(i) = (k + 1..n).find(|&i| (k + 1..n).any(|j| !a.get(i, j).is_zero())) {
                a.swap_rows(k, i);
                a.swap_cols(k, i);
                continue;
            } else {
                // the remaining block is zero
                zero += n - k;
                break;
            }
        }
        let pv = a.get(k, k).clone();
        if pv.is_zero() {
            continue;
        }
        if pv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a.get(i, k).is_zero() {
                continue;
            }
            let f = a.get(i, k) / &pv;
            for j in k..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
        for i in k + 1..n {
            a.set(k, i, BigRational::zero());
            a.set(i, k, BigRational::zero());
        }
        k += 1;
    }
    (pos, neg, zero)
}
