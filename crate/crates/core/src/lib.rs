//! Construction and verification of SU(n+1) Toda solutions generated by
//! spherical metrics.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, determinant, rank, and the
//!   unimodular Cholesky factorization.
//! * [`groups`]: closed subgroups of SU(2), closure enumeration, conjugacy
//!   classes and symmetric-power characters.
//! * [`symrep`]: the rational normal map and the induced matrices on
//!   `Sym^n`.
//! * [`commutant`]: commutant dimensions by nullspace and by characters,
//!   the closed-form dimension table and samples of reduced deformations.
//! * [`wronskian`]: exact rational polynomial Wronskians.
//! * [`toda`]: finite-difference checks of the local Toda system.

pub mod commutant;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod sampling;
pub mod symrep;
pub mod toda;
pub mod wronskian;

pub use commutant::{CommutantBasis, DeltaPattern, DimReport, FormulaValue};
pub use error::{Error, Result};
pub use groups::{FiniteGroup, Su2Matrix, SubgroupSpec};
pub use linalg::{ComplexMatrix, HermitianUnimodular, Tolerances, UpperTriangularPositive, C64};
pub use symrep::{ProjectivePoint, SymPowerMatrix};
pub use toda::{Grid2D, MetricField};
pub use wronskian::{CurveTuple, PolyPair, RationalPoly};
