//! Goeritz lattices of checkerboard-colored knot diagrams, their embeddings
//! into standard definite lattices, and equivariant obstructions to bounding
//! Möbius bands and punctured Klein bottles for periodic knots.

pub mod diagram;
pub mod equivariance;
pub mod error;
pub mod family;
pub mod lattice;
pub mod matrix;
pub mod obstruction;
pub mod rational;
pub mod signed_perm;

pub use diagram::{CheckerboardDiagram, Crossing, RegionAction};
pub use family::FamilyInstance;
pub use equivariance::{EquivarianceVerdict, EquivariantEmbedding, RationalCertificate, SpanTest};
pub use error::{Error, Result};
pub use lattice::{GramLattice, LatticeEmbedding, SearchLimits, StandardTarget};
pub use matrix::Matrix;
pub use obstruction::{gamma4p_lower_bound, KnotCertificate, ObstructionReport, ObstructionVerdict};
pub use signed_perm::SignedPermutation;
