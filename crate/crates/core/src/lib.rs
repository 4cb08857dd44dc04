//! Exact arithmetic for even integral lattices, their discriminant forms and
//! isometry groups, with the finite-field and `p`-adic tools used to plan
//! coverings of moduli of lattice-polarized K3 surfaces.
//!
//! Vectors are rows; the pairing of `x` and `y` is `x·G·yᵀ`.
//!
//! ```
//! use nlcover::lattice::builtin::resolve;
//! use nlcover::discriminant_form;
//!
//! let s = resolve("U^2+<-2>")?;
//! let d = discriminant_form(&s)?;
//! assert_eq!(d.form().orders(), &[2]);
//! assert_eq!(d.length(), 1);
//! # Ok::<(), nlcover::Error>(())
//! ```
//!
//! The guide in `book/` walks through each module; its listings are compiled
//! as doctests by the `nlcover-book` crate.

pub mod budget;
pub mod discform;
pub mod embedding;
pub mod error;
pub mod glue;
pub mod io;
pub mod isom;
pub mod lattice;
pub mod matrix;
pub mod modp;
pub mod padic;
pub mod planner;
pub mod shortvec;

pub use budget::Budget;
pub use discform::{discriminant_form, DiscriminantForm, FiniteQuadraticForm, Subgroup};
pub use embedding::Embedding;
pub use error::{Error, Result};
pub use lattice::{IntegralLattice, Signature};
