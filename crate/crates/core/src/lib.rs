//! Oriented matroid classes, their deletion/contraction complexes, and the
//! Hopf algebra structure on them.

pub mod bits;
pub mod canonical;
pub mod classes;
pub mod complexes;
pub mod enumerate;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod matroid;
pub mod source;

pub use bits::Mask;
pub use canonical::{canonical_form, CanonicalKey, Permutation};
pub use error::{Error, Result};
pub use classes::{normalize, Bidegree, ClassVector};
pub use complexes::{ComplexSpec, DifferentialKind, Property, SparseIntMatrix};
pub use linalg::{homology_table, rank_exact, rank_modular, BettiTable};
pub use matroid::{Graph, Matroid};
pub use source::MatroidSource;
