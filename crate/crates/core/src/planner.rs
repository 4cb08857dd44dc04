//! Stability predicates, covering certificates by index-`p` sublattices,
//! the corank-one triangle, and the sublattice ↔ Brauer-line dictionary.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::budget::Budget;
use crate::discform::discriminant_form;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::isom::{stab_image_in_ok, StabImageReport};
use crate::lattice::{IntegralLattice, Signature};
use crate::matrix::IntMatrix;
use crate::modp::{
    choose_p, enumerate_index_p_sublattices, functional_from_basis, index_bound, is_prime,
    sublattice_disc_split, IndexPSublattice, LineClassCount, PPart,
};

/// Assumption tags carried by certificates.
pub const ASSUMPTION_STRONG_APPROXIMATION: &str = "strong-approximation-index-4";
pub const ASSUMPTION_NIKULIN_SURJECTIVITY: &str = "nikulin-surjectivity-O(T)->O(A_T)";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub signature: Signature,
    pub length: usize,
    pub rank: usize,
    pub is_stable: bool,
    pub is_very_stable: bool,
}

pub fn stability(s: &IntegralLattice) -> Result<StabilityReport> {
    let signature = s.signature();
    let length = discriminant_form(s)?.length();
    let rank = s.rank();
    let two_plus = signature.n_plus == 2;
    Ok(StabilityReport {
        signature,
        length,
        rank,
        is_stable: two_plus && signature.n_minus >= 1 && length + 2 <= rank,
        is_very_stable: two_plus && signature.n_minus >= 2 && length + 3 <= rank,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentBound {
    Irreducible,
    AtMostFour,
    Unknown,
}

/// Component count of `S_S` and the degree of `S_S → M_S`, as cited
/// consequences of the stability predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentConstants {
    pub components: ComponentBound,
    pub s_to_m_degree: String,
}

pub fn component_constants(report: &StabilityReport) -> ComponentConstants {
    if report.is_very_stable {
        ComponentConstants {
            components: ComponentBound::Irreducible,
            s_to_m_degree: "exactly 2".into(),
        }
    } else if report.is_stable {
        ComponentConstants {
            components: ComponentBound::AtMostFour,
            s_to_m_degree: "at most 2 over each connected component".into(),
        }
    } else {
        ComponentConstants {
            components: ComponentBound::Unknown,
            s_to_m_degree: "no bound".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Coverings of the orthogonal Shimura variety `S_S`.
    SQuotient,
    /// Coverings of the K3 moduli space `M_S`.
    MQuotient,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::SQuotient => "S",
            Target::MQuotient => "M",
        }
    }
}

/// Whether every primitive corank-one `T ⊂ S` is forced very stable:
/// `ℓ(A_T) ≤ ℓ(A_S) + 1 ≤ rank T − 3` and `T` keeps two negative directions.
pub fn corank_one_forced_very_stable(report: &StabilityReport) -> bool {
    report.length + 1 + 4 <= report.rank && report.signature.n_minus >= 3
}

/// The fibre-point divisibility constant.
pub fn divisibility_constant(report: &StabilityReport, target: Target) -> (u32, u32) {
    let base = if corank_one_forced_very_stable(report) { 4 } else { 16 };
    let c = match target {
        Target::SQuotient => base,
        Target::MQuotient => 2 * base,
    };
    (base, c)
}

/// One covering sublattice with its re-verified invariants.
#[derive(Clone, Debug)]
pub struct CoveringSublattice {
    pub id: usize,
    pub sublattice: IndexPSublattice,
    pub length: usize,
    pub p_part: PPart,
    pub split_certified: bool,
    pub very_stable: bool,
}

#[derive(Clone, Debug)]
pub struct CoveringCertificate {
    pub lattice: IntegralLattice,
    pub n: u64,
    pub p: u64,
    pub line_counts: LineClassCount,
    /// Certified lower bound on `[O(S)* : O(S')*]`.
    pub bound: BigInt,
    pub target: Target,
    pub base_constant: u32,
    pub constant: u32,
    pub stability: StabilityReport,
    pub components: ComponentConstants,
    pub sublattices: Vec<CoveringSublattice>,
    pub assumptions: Vec<String>,
}

impl CoveringCertificate {
    pub fn all_very_stable(&self) -> bool {
        self.sublattices.iter().all(|s| s.very_stable)
    }
}

pub fn plan_covering(s: &IntegralLattice, n: u64, target: Target, budget: &Budget) -> Result<CoveringCertificate> {
    let st = stability(s)?;
    if !st.is_very_stable {
        return Err(Error::hypothesis(format!(
            "S is not very stable (signature {}, ℓ(A_S) = {}, rank {})",
            st.signature, st.length, st.rank
        )));
    }
    if s.rank() < 5 {
        return Err(Error::hypothesis("rank(S) ≥ 5 is required"));
    }
    let chosen = choose_p(s, n)?;
    let subs = enumerate_index_p_sublattices(s, chosen.p)?;
    let mut sublattices = Vec::with_capacity(subs.len());
    for (id, sub) in subs.into_iter().enumerate() {
        let split = sublattice_disc_split(s, &sub, budget)?;
        let very_stable = stability(&sub.lattice())?.is_very_stable;
        sublattices.push(CoveringSublattice {
            id,
            length: split.length,
            p_part: split.tag,
            split_certified: split.certified,
            very_stable,
            sublattice: sub,
        });
    }
    let (base_constant, constant) = divisibility_constant(&st, target);
    Ok(CoveringCertificate {
        lattice: s.clone(),
        n,
        p: chosen.p,
        line_counts: chosen.counts,
        bound: chosen.bound,
        target,
        base_constant,
        constant,
        components: component_constants(&st),
        stability: st,
        sublattices,
        assumptions: vec![
            ASSUMPTION_STRONG_APPROXIMATION.into(),
            ASSUMPTION_NIKULIN_SURJECTIVITY.into(),
        ],
    })
}

/// Degree bound on one edge of the triangle, or why none was computed.
#[derive(Clone, Debug)]
pub enum EdgeBound {
    Computed { image_order: usize, degree_bound: usize },
    Refused(String),
}

impl EdgeBound {
    fn from_report(r: Result<StabImageReport>) -> EdgeBound {
        match r {
            Ok(r) => EdgeBound::Computed {
                image_order: r.image_order,
                degree_bound: r.degree_bound,
            },
            Err(e) => EdgeBound::Refused(e.to_string()),
        }
    }
}

/// `T ⊂ S' ⊂ S` with `[S : S'] = p`.
#[derive(Clone, Debug)]
pub struct TriangleDatum {
    pub p: u64,
    /// `f`: basis of `T` in coordinates of `S`.
    pub t_in_s: IntMatrix,
    /// `f'`: basis of `T` in coordinates of `S'`.
    pub t_in_s_prime: IntMatrix,
    /// `π'`: basis of `S'` in coordinates of `S`.
    pub s_prime_in_s: IntMatrix,
    pub s_prime: IntegralLattice,
    pub f_bound: EdgeBound,
    pub f_prime_bound: EdgeBound,
    /// Lower bound on the degree of `π'`, when `p ∤ det S`.
    pub pi_bound: Option<BigInt>,
}

/// The index-`p` sublattice `S' = T + pS` and the three maps between
/// `T`, `S'` and `S`. For primitive corank-one `T` it is the only
/// index-`p` sublattice containing `T`.
pub fn build_triangle(t_in_s: &Embedding, p: u64, budget: &Budget) -> Result<TriangleDatum> {
    let s = t_in_s.ambient();
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if t_in_s.rank() + 1 != s.rank() {
        return Err(Error::invalid("T must have corank one in S"));
    }
    if !t_in_s.is_primitive() {
        return Err(Error::invalid("T must be primitive in S"));
    }
    let n = s.rank();
    let pb = BigInt::from(p);
    let stacked = t_in_s
        .basis()
        .vstack(&IntMatrix::identity(n).scale(&pb));
    let s_prime_in_s = stacked.hermite();
    if s_prime_in_s.nrows() != n || s_prime_in_s.det().abs() != pb {
        return Err(Error::Internal("T + pS does not have index p".into()));
    }
    functional_from_basis(&s_prime_in_s, p)?;
    let t_in_s_prime = t_in_s
        .basis()
        .to_rational()
        .mul(&s_prime_in_s.to_rational().inverse().expect("full rank"))
        .to_integer()
        .ok_or_else(|| Error::Internal("T is not contained in S'".into()))?;
    if t_in_s_prime.mul(&s_prime_in_s) != *t_in_s.basis() {
        return Err(Error::Internal("triangle does not commute".into()));
    }
    let s_prime = s.sublattice(&s_prime_in_s)?;
    let f_bound = EdgeBound::from_report(stab_image_in_ok(t_in_s, budget));
    let f_prime_emb = Embedding::new(s_prime.clone(), t_in_s_prime.clone())?;
    let f_prime_bound = EdgeBound::from_report(stab_image_in_ok(&f_prime_emb, budget));
    let pi_bound = if (s.det() % &pb) == BigInt::from(0) || p == 2 {
        None
    } else {
        Some(index_bound(s, p)?.1)
    };
    Ok(TriangleDatum {
        p,
        t_in_s: t_in_s.basis().clone(),
        t_in_s_prime,
        s_prime_in_s,
        s_prime,
        f_bound,
        f_prime_bound,
        pi_bound,
    })
}

/// `α ∈ Hom(S, Z/p)` up to scalars, normalized (first nonzero entry 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerLine {
    pub p: u64,
    pub alpha: Vec<u64>,
}

/// Pairs each index-`p` sublattice with the line of functionals whose
/// kernel it is; `α` is recovered from the sublattice basis independently.
pub fn sublattice_brauer_bijection(s: &IntegralLattice, p: u64) -> Result<Vec<(IndexPSublattice, BrauerLine)>> {
    let subs = enumerate_index_p_sublattices(s, p)?;
    subs.into_iter()
        .map(|sub| {
            let alpha = functional_from_basis(&sub.basis, p)?;
            if alpha != sub.functional {
                return Err(Error::Internal("kernel does not match its functional".into()));
            }
            Ok((sub, BrauerLine { p, alpha }))
        })
        .collect()
}
