//! Finite-dimensional subspace calculus for extension theory: Fredholm
//! pairs of subspaces and their index, nested pairs `Γ ⊂ Γ′` with the
//! pull-back/push-forward maps, realizations of extension pairs, the
//! Lagrangian Grassmannian with Cayley transforms, the canonical transversal
//! homotopies, and pointwise/winding index checks for families.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`). The aliases below fix the scalar for the common case.

pub mod error;
mod jacobi;
pub mod numeric;
pub mod scalar;
pub mod grassmann;
pub mod report;
pub mod extension;
pub mod symplectic;
pub mod homotopy;
pub mod random;
pub mod family;
pub mod io;
pub mod verify;

pub use error::{Error, Result};
pub use extension::{NestedPair, OperatorPair, Realization, RelativePosition};
pub use family::{K0Instance, K0Report, K1Report, SampledLoop, WindingReport};
pub use grassmann::{PairIndexReport, Subspace};
pub use homotopy::{LagrangianCoordinates, TransversalCoordinates};
pub use numeric::{Frame, Tolerance};
pub use report::{IdentityCheck, IdentityReport, Value};
pub use scalar::{CMatrix, CVector, Real, C};
pub use symplectic::{LagrangianFrame, SelfAdjointRealization, SymplecticSpace};

pub type Tolerance64 = Tolerance<f64>;
pub type Subspace64 = Subspace<f64>;
pub type NestedPair64 = NestedPair<f64>;
pub type OperatorPair64 = OperatorPair<f64>;
pub type SymplecticSpace64 = SymplecticSpace<f64>;
pub type Matrix64 = CMatrix<f64>;

pub type Tolerance32 = Tolerance<f32>;
pub type Subspace32 = Subspace<f32>;
pub type NestedPair32 = NestedPair<f32>;
pub type OperatorPair32 = OperatorPair<f32>;
pub type SymplecticSpace32 = SymplecticSpace<f32>;
pub type Matrix32 = CMatrix<f32>;
