//! Sublattices given by coordinate matrices, their saturations and
//! orthogonal complements.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::lattice::IntegralLattice;
use crate::matrix::IntMatrix;

/// A sublattice of `ambient` spanned by the rows of `basis` (ambient
/// coordinates). The induced form is required to be nondegenerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    ambient: IntegralLattice,
    basis: IntMatrix,
    primitive: bool,
}

impl Embedding {
    pub fn new(ambient: IntegralLattice, basis: IntMatrix) -> Result<Self> {
        if basis.ncols() != ambient.rank() {
            return Err(Error::Dimension(format!(
                "embedding basis has {} columns but the ambient lattice has rank {}",
                basis.ncols(),
                ambient.rank()
            )));
        }
        if basis.nrows() == 0 || basis.rank() != basis.nrows() {
            return Err(Error::invalid("embedding basis must have full row rank"));
        }
        // induced form must be an even nondegenerate lattice
        ambient.sublattice(&basis)?;
        let sf = basis.smith();
        let primitive = sf.invariant_factors().iter().all(|d| d.is_one());
        Ok(Embedding {
            ambient,
            basis,
            primitive,
        })
    }

    pub fn ambient(&self) -> &IntegralLattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    /// The sublattice with its induced Gram matrix.
    pub fn sublattice(&self) -> IntegralLattice {
        self.ambient
            .sublattice(&self.basis)
            .expect("validated at construction")
    }

    /// Index of the sublattice in its saturation: the product of the
    /// elementary divisors of the coordinate matrix.
    pub fn saturation_index(&self) -> BigInt {
        self.basis
            .smith()
            .invariant_factors()
            .iter()
            .fold(BigInt::one(), |acc, d| acc * d)
    }

    /// `(L ⊗ Q) ∩ ambient`, in Hermite normal form.
    pub fn saturation(&self) -> Embedding {
        let rel = self.basis.transpose().left_kernel();
        let sat = rel.transpose().left_kernel().hermite();
        Embedding {
            ambient: self.ambient.clone(),
            basis: sat,
            primitive: true,
        }
    }

    /// `{x ∈ ambient : (x, L) = 0}`, always primitive.
    pub fn orthogonal_complement(&self) -> Result<Embedding> {
        if self.rank() == self.ambient.rank() {
            return Err(Error::invalid(
                "sublattice has full rank; its orthogonal complement is zero",
            ));
        }
        let pairings = self.ambient.gram().mul(&self.basis.transpose());
        let k = pairings.left_kernel().hermite();
        Embedding::new(self.ambient.clone(), k).map_err(|e| {
            Error::Internal(format!("orthogonal complement is degenerate: {e}"))
        })
    }

    /// Coordinates of `x` (ambient coordinates) in the sublattice basis.
    pub fn coordinates_of(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        self.basis.express_in_rows(x)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates_of(x).is_some()
    }

    /// Whether every basis vector of `other` lies in this sublattice.
    pub fn contains_all(&self, other: &IntMatrix) -> bool {
        other.rows_iter().all(|r| self.contains(r))
    }
}
