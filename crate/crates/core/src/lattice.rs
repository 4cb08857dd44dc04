//! Even integral lattices given by Gram matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{inertia, IntMatrix};

/// An even lattice: a symmetric nondegenerate integer Gram matrix with even
/// diagonal. Rows of coordinate matrices are basis vectors and the pairing is
/// `(x, y) = x · G · yᵀ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegralLattice {
    gram: IntMatrix,
    label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Signature {
    pub fn new(n_plus: usize, n_minus: usize) -> Self {
        Signature { n_plus, n_minus }
    }

    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn is_definite(&self) -> bool {
        self.n_plus == 0 || self.n_minus == 0
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.n_plus == 1
    }
}

impl std::ops::Add for Signature {
    type Output = Signature;
    fn add(self, o: Signature) -> Signature {
        Signature::new(self.n_plus + o.n_plus, self.n_minus + o.n_minus)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_plus, self.n_minus)
    }
}

impl fmt::Debug for IntegralLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l} {:?}", self.gram),
            None => write!(f, "{:?}", self.gram),
        }
    }
}

impl IntegralLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() || gram.nrows() == 0 {
            return Err(Error::invalid("Gram matrix must be square and nonempty"));
        }
        if !gram.is_symmetric() {
            return Err(Error::invalid("Gram matrix is not symmetric"));
        }
        if let Some(i) = (0..gram.nrows()).find(|&i| gram.get(i, i).is_odd()) {
            return Err(Error::invalid(format!(
                "lattice is not even: diagonal entry {i} is {}",
                gram.get(i, i)
            )));
        }
        if gram.det().is_zero() {
            return Err(Error::invalid("Gram matrix is degenerate"));
        }
        Ok(IntegralLattice { gram, label: None })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        IntegralLattice::new(IntMatrix::from_i64_rows(rows))
    }

    /// Diagonal lattice `<a_1> ⊕ ... ⊕ <a_n>`.
    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let d: Vec<BigInt> = entries.iter().map(|&x| BigInt::from(x)).collect();
        IntegralLattice::new(IntMatrix::diagonal(&d))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn pairing(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, y)
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, x)
    }

    pub fn signature(&self) -> Signature {
        let (p, n, z) = inertia(&self.gram.to_rational());
        debug_assert_eq!(z, 0);
        Signature::new(p, n)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().n_minus == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature().n_plus == 0
    }

    pub fn is_definite(&self) -> bool {
        self.signature().is_definite()
    }

    pub fn is_indefinite(&self) -> bool {
        !self.is_definite()
    }

    /// Orthogonal direct sum with block-diagonal Gram matrix.
    pub fn direct_sum(&self, other: &IntegralLattice) -> IntegralLattice {
        let label = match (&self.label, &other.label) {
            (Some(a), Some(b)) => Some(format!("{a}+{b}")),
            _ => None,
        };
        IntegralLattice {
            gram: self.gram.block_diag(&other.gram),
            label,
        }
    }

    /// `L(n)`: the same module with the form multiplied by `n`.
    pub fn rescale(&self, n: &BigInt) -> Result<IntegralLattice> {
        if n.is_zero() {
            return Err(Error::invalid("rescaling factor must be nonzero"));
        }
        let out = rescale_gram(&self.gram, n)?;
        let label = self.label.as_ref().map(|l| format!("{l}({n})"));
        Ok(IntegralLattice { label, ..out })
    }

    pub fn negated(&self) -> IntegralLattice {
        self.rescale(&-BigInt::one()).expect("negation preserves evenness")
    }

    /// Lattice spanned by the rows of `basis` with the induced form.
    pub fn sublattice(&self, basis: &IntMatrix) -> Result<IntegralLattice> {
        if basis.ncols() != self.rank() {
            return Err(Error::Dimension(format!(
                "basis has {} columns, lattice has rank {}",
                basis.ncols(),
                self.rank()
            )));
        }
        IntegralLattice::new(basis.congruence(&self.gram))
    }
}

/// Rescale a Gram matrix, rejecting results with odd diagonal.
pub fn rescale_gram(gram: &IntMatrix, n: &BigInt) -> Result<IntegralLattice> {
    let scaled = gram.scale(n);
    if let Some(i) = (0..scaled.nrows()).find(|&i| scaled.get(i, i).is_odd()) {
        return Err(Error::invalid(format!(
            "rescaled form is odd: diagonal entry {i} is {}",
            scaled.get(i, i)
        )));
    }
    IntegralLattice::new(scaled)
}

/// Named lattices and a small expression grammar for them.
pub mod builtin {
    use super::*;

    pub fn hyperbolic_plane() -> IntegralLattice {
        IntegralLattice::from_i64(&[vec![0, 1], vec![1, 0]])
            .unwrap()
            .with_label("U")
    }

    /// Positive definite root lattice `A_n` (Cartan matrix).
    pub fn root_a(n: usize) -> IntegralLattice {
        assert!(n >= 1);
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2;
            if i + 1 < n {
                g[i][i + 1] = -1;
                g[i + 1][i] = -1;
            }
        }
        IntegralLattice::from_i64(&g).unwrap().with_label(format!("A{n}"))
    }

    /// Positive definite root lattice `D_n`, `n ≥ 4`.
    pub fn root_d(n: usize) -> IntegralLattice {
        assert!(n >= 4);
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2;
        }
        // chain 0 - 1 - ... - (n-2), with n-1 attached to n-3
        for i in 0..n - 2 {
            g[i][i + 1] = -1;
            g[i + 1][i] = -1;
        }
        g[n - 1][n - 3] = -1;
        g[n - 3][n - 1] = -1;
        IntegralLattice::from_i64(&g).unwrap().with_label(format!("D{n}"))
    }

    /// Positive definite `E_8` (Bourbaki labelling: chain 1-3-4-5-6-7-8, node 2 on 4).
    pub fn root_e8() -> IntegralLattice {
        let edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (a, b) in edges {
            g[a - 1][b - 1] = -1;
            g[b - 1][a - 1] = -1;
        }
        IntegralLattice::from_i64(&g).unwrap().with_label("E8")
    }

    pub fn e8_negative() -> IntegralLattice {
        let l = root_e8().negated();
        l.with_label("E8minus")
    }

    /// `U³ ⊕ E8(−1)²`: even unimodular of signature (3,19).
    pub fn k3() -> IntegralLattice {
        let u = hyperbolic_plane();
        let e = e8_negative();
        u.direct_sum(&u)
            .direct_sum(&u)
            .direct_sum(&e)
            .direct_sum(&e)
            .with_label("K3")
    }

    /// Resolve a label. Accepted: `U`, `A<n>`, `D<n>`, `E8`, `E8minus`, `K3`,
    /// `<a>`, each optionally followed by `(k)` (rescale) and `^m` (power),
    /// joined by `+`. Examples: `"U^2+<-2>"`, `"A2(-1)"`, `"E8minus^2"`.
    pub fn resolve(label: &str) -> Result<IntegralLattice> {
        let label = label.trim();
        let terms = split_terms(label)?;
        let mut acc: Option<IntegralLattice> = None;
        for t in terms {
            let l = parse_term(t.trim())?;
            acc = Some(match acc {
                None => l,
                Some(a) => a.direct_sum(&l),
            });
        }
        let l = acc.ok_or_else(|| Error::invalid("empty lattice label"))?;
        Ok(l.with_label(label))
    }

    fn split_terms(s: &str) -> Result<Vec<&str>> {
        let mut out = Vec::new();
        let (mut depth, mut start) = (0i32, 0usize);
        for (i, c) in s.char_indices() {
            match c {
                '<' | '(' => depth += 1,
                '>' | ')' => depth -= 1,
                '+' if depth == 0 => {
                    out.push(&s[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(Error::invalid(format!("unbalanced brackets in label {s:?}")));
        }
        out.push(&s[start..]);
        Ok(out)
    }

    fn parse_term(t: &str) -> Result<IntegralLattice> {
        let bad = || Error::invalid(format!("unknown lattice label {t:?}"));
        let (body, power) = match t.rsplit_once('^') {
            Some((b, p)) if !p.contains(')') && !p.contains('>') => {
                let m: usize = p.trim().parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                (b.trim(), m)
            }
            _ => (t, 1),
        };
        let (atom, scale) = if body.ends_with(')') {
            let open = body.rfind('(').ok_or_else(bad)?;
            let k: BigInt = body[open + 1..body.len() - 1].trim().parse().map_err(|_| bad())?;
            (body[..open].trim(), Some(k))
        } else {
            (body, None)
        };
        let mut l = parse_atom(atom).ok_or_else(bad)?;
        if let Some(k) = scale {
            l = rescale_gram(l.gram(), &k)?;
        }
        let base = l.clone();
        for _ in 1..power {
            l = l.direct_sum(&base);
        }
        Ok(l)
    }

    fn parse_atom(a: &str) -> Option<IntegralLattice> {
        match a {
            "U" => return Some(hyperbolic_plane()),
            "E8" => return Some(root_e8()),
            "E8minus" => return Some(e8_negative()),
            "K3" => return Some(k3()),
            _ => {}
        }
        if let Some(inner) = a.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            let v: BigInt = inner.trim().parse().ok()?;
            return IntegralLattice::new(IntMatrix::diagonal(&[v])).ok();
        }
        if let Some(n) = a.strip_prefix('A') {
            let n: usize = n.parse().ok()?;
            return (n >= 1).then(|| root_a(n));
        }
        if let Some(n) = a.strip_prefix('D') {
            let n: usize = n.parse().ok()?;
            return (n >= 4).then(|| root_d(n));
        }
        None
    }
}
