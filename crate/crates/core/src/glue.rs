//! Overlattices from isotropic subgroups and gluing into the K3 lattice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::budget::Budget;
use crate::discform::{
    discriminant_form, find_isometry, DiscriminantForm, Element, FiniteQuadraticForm, FqfMap,
    Subgroup,
};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::lattice::{IntegralLattice, Signature};
use crate::matrix::RatMatrix;

/// An overlattice `M ⊃ L` with its basis written in `L ⊗ Q` coordinates.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: IntegralLattice,
    /// Rows: basis of `M` in rational coordinates of `L`.
    pub basis: RatMatrix,
    /// `L ⊂ M`, rows are the basis of `L` in `M` coordinates.
    pub inclusion: Embedding,
}

/// Overlattice of `L` spanned by `L` and the given vectors of `L ⊗ Q`.
pub fn overlattice_from_lifts(l: &IntegralLattice, lifts: &[Vec<BigRational>]) -> Result<Overlattice> {
    let n = l.rank();
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut e = vec![BigRational::from_integer(BigInt::from(0)); n];
            e[i] = BigRational::one();
            e
        })
        .collect();
    rows.extend(lifts.iter().cloned());
    let stacked = RatMatrix::from_rows(&rows);
    let den = stacked.common_denominator();
    let scaled = stacked
        .scale(&BigRational::from_integer(den.clone()))
        .to_integer()
        .expect("scaled by common denominator");
    let h = scaled.hermite();
    let basis = h.to_rational().scale(&BigRational::new(BigInt::one(), den));
    let gram = basis.mul(&l.gram().to_rational()).mul(&basis.transpose());
    let gram = gram
        .to_integer()
        .ok_or_else(|| Error::NotIsotropic("glue vectors pair non-integrally".into()))?;
    let lattice = IntegralLattice::new(gram).map_err(|_| {
        Error::NotIsotropic("glue vectors have odd or non-integral norm".into())
    })?;
    let inclusion = basis
        .inverse()
        .expect("overlattice basis is full rank")
        .to_integer()
        .ok_or_else(|| Error::Internal("L is not contained in its overlattice".into()))?;
    let inclusion = Embedding::new(lattice.clone(), inclusion)?;
    Ok(Overlattice {
        lattice,
        basis,
        inclusion,
    })
}

/// `M = π⁻¹(H)` for an isotropic `H ⊂ A_L`, where `disc` is `A_L`.
pub fn overlattice(disc: &DiscriminantForm, h: &Subgroup) -> Result<Overlattice> {
    if !h.is_isotropic(disc.form()) {
        return Err(Error::NotIsotropic(format!(
            "subgroup of order {} carries nonzero q values",
            h.order()
        )));
    }
    let l = IntegralLattice::new(disc.gram().clone())?;
    let lifts: Vec<Vec<BigRational>> = h.generators().iter().map(|g| disc.lift(g)).collect();
    overlattice_from_lifts(&l, &lifts)
}

/// A subgroup of `left ⊕ right` given by generators, required isotropic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueMap {
    left: FiniteQuadraticForm,
    right: FiniteQuadraticForm,
    graph: Vec<Element>,
}

impl GlueMap {
    pub fn new(left: FiniteQuadraticForm, right: FiniteQuadraticForm, graph: Vec<Element>) -> Result<Self> {
        let k = left.k() + right.k();
        let sum = left.direct_sum(&right);
        for g in &graph {
            if g.len() != k {
                return Err(Error::Dimension(format!(
                    "glue generator has {} entries, expected {k}",
                    g.len()
                )));
            }
            if g.iter().zip(sum.orders()).any(|(&a, &d)| a >= d) {
                return Err(Error::invalid("glue generator entries must be reduced mod the orders"));
            }
        }
        let glue = GlueMap { left, right, graph };
        if !glue.subgroup().is_isotropic(&sum) {
            return Err(Error::NotIsotropic("glue subgroup".into()));
        }
        Ok(glue)
    }

    /// The graph `{(x, γx)}` of an anti-isometry `γ: left → right`.
    pub fn from_anti_isometry(left: FiniteQuadraticForm, right: FiniteQuadraticForm, gamma: &FqfMap) -> Result<Self> {
        if !gamma.is_isometry(&left, &right.negate()) {
            return Err(Error::invalid("map is not an anti-isometry of the glue forms"));
        }
        let graph = (0..left.k())
            .map(|i| {
                let mut v = left.generator(i);
                v.extend(gamma.images[i].iter().copied());
                v
            })
            .collect();
        GlueMap::new(left, right, graph)
    }

    pub fn left(&self) -> &FiniteQuadraticForm {
        &self.left
    }

    pub fn right(&self) -> &FiniteQuadraticForm {
        &self.right
    }

    pub fn graph(&self) -> &[Element] {
        &self.graph
    }

    pub fn sum_form(&self) -> FiniteQuadraticForm {
        self.left.direct_sum(&self.right)
    }

    pub fn subgroup(&self) -> Subgroup {
        Subgroup::generated_by(&self.sum_form(), &self.graph)
    }

    /// Both projections are injective, so the subgroup is the graph of an
    /// anti-isometry between their images.
    pub fn is_anti_isometry_graph(&self) -> bool {
        let order = self.subgroup().order();
        let (pl, pr): (Vec<Element>, Vec<Element>) =
            self.graph.iter().map(|g| self.left.split_element(g)).unzip();
        Subgroup::generated_by(&self.left, &pl).order() == order
            && Subgroup::generated_by(&self.right, &pr).order() == order
    }

    /// Anti-isometry graph whose projections are onto both factors.
    pub fn is_full_anti_isometry(&self) -> bool {
        let order = self.subgroup().order();
        self.is_anti_isometry_graph() && order == self.left.order() && order == self.right.order()
    }
}

/// Some anti-isometry `a → b` (that is, an isometry `a → −b`) as a glue map.
pub fn find_anti_isometry(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm, budget: &Budget) -> Result<Option<GlueMap>> {
    match find_isometry(a, &b.negate(), budget)? {
        None => Ok(None),
        Some(m) => GlueMap::from_anti_isometry(a.clone(), b.clone(), &m).map(Some),
    }
}

/// A unimodular lattice containing `L` and `T` as mutually orthogonal
/// primitive sublattices.
#[derive(Clone, Debug)]
pub struct K3Gluing {
    pub lattice: IntegralLattice,
    pub l_embedding: Embedding,
    pub t_embedding: Embedding,
}

/// Glue a hyperbolic `L` and a complement candidate `T` along `gamma`,
/// whose left form is `A_L` and right form is `A_T` (both as presented by
/// [`discriminant_form`]).
pub fn glue_to_k3(l: &IntegralLattice, t: &IntegralLattice, gamma: &GlueMap) -> Result<K3Gluing> {
    let (sl, st) = (l.signature(), t.signature());
    if sl.n_plus != 1 || st.n_plus != 2 || l.rank() + t.rank() != 22 {
        return Err(Error::invalid(format!(
            "signatures {sl} and {st} cannot glue to (3,19)"
        )));
    }
    let (dl, dt) = (discriminant_form(l)?, discriminant_form(t)?);
    if gamma.left() != dl.form() || gamma.right() != dt.form() {
        return Err(Error::invalid(
            "glue forms do not match the discriminant forms of L and T",
        ));
    }
    if !gamma.is_full_anti_isometry() {
        return Err(Error::invalid("glue is not the graph of an anti-isometry A_L → A_T"));
    }
    let sum = l.direct_sum(t);
    let lifts: Vec<Vec<BigRational>> = gamma
        .graph()
        .iter()
        .map(|g| {
            let (x, y) = gamma.left().split_element(g);
            let mut v = dl.lift(&x);
            v.extend(dt.lift(&y));
            v
        })
        .collect();
    let over = overlattice_from_lifts(&sum, &lifts)?;
    let m = over.lattice.clone().with_label("glued");
    if !m.det().abs().is_one() || m.signature() != Signature::new(3, 19) {
        return Err(Error::Internal(format!(
            "glued lattice has det {} and signature {}",
            m.det(),
            m.signature()
        )));
    }
    let inc = over.inclusion.basis();
    let l_embedding = Embedding::new(m.clone(), inc.row_slice(0, l.rank()))?;
    let t_embedding = Embedding::new(m.clone(), inc.row_slice(l.rank(), 22))?;
    Ok(K3Gluing {
        lattice: m,
        l_embedding,
        t_embedding,
    })
}

/// Outcome of a sufficient criterion: `holds = false` means inconclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub reason: String,
}

impl Verdict {
    fn new(holds: bool, detail: String) -> Verdict {
        let head = if holds {
            "criterion satisfied"
        } else {
            "criterion inconclusive"
        };
        Verdict {
            holds,
            reason: format!("{head}: {detail}"),
        }
    }
}

/// `ℓ(A_L) ≤ 20 − rank L` for hyperbolic `L`: the primitive embedding into
/// the K3 lattice is unique up to isometry.
pub fn check_unique_embedding(l: &IntegralLattice) -> Result<Verdict> {
    let s = l.signature();
    if s.n_plus != 1 || l.rank() > 20 {
        return Err(Error::invalid(format!(
            "expected a hyperbolic lattice of rank at most 20, got signature {s}"
        )));
    }
    let len = discriminant_form(l)?.length();
    let bound = 20 - l.rank();
    Ok(Verdict::new(
        len <= bound,
        format!("ℓ(A_L) = {len}, 20 − rank = {bound}"),
    ))
}

/// `ℓ(A_S) ≤ rank S − 2` for indefinite `S`: `S` is unique in its genus.
pub fn check_unique_in_genus(s: &IntegralLattice) -> Result<Verdict> {
    if s.is_definite() {
        return Err(Error::invalid("criterion applies only to indefinite lattices"));
    }
    let len = discriminant_form(s)?.length();
    let bound = s.rank() as i64 - 2;
    Ok(Verdict::new(
        len as i64 <= bound,
        format!("ℓ(A_S) = {len}, rank − 2 = {bound}"),
    ))
}
