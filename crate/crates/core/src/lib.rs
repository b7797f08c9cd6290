//! Exact symbolic computation for finite generalized Boolean dynamical
//! systems.
//!
//! A system is a finite Boolean algebra together with one action and
//! one ideal per letter of a finite alphabet. The crate decides
//! structural properties of such systems (cycles, exits, Condition
//! (L)), computes in the *-algebra spanned by the standard generators
//! via exact rewriting, normalizes families of diagonal projections
//! into orthogonal ones, builds the boundary path space with its
//! partial action and transformation groupoid, and cross-validates
//! every algebraic computation against groupoid convolution, which is
//! the ground truth for equality on finite spans.

pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod genalg;
pub mod groupoid;
pub mod input;
pub mod lattice;
pub mod paths;
pub mod scalar;

pub use dynamics::{Action, ConditionL, CyclePair, Gbds, LetterId, Word};
pub use error::Error;
pub use genalg::{AlgElement, GenTriple, IdempotentFamily};
pub use groupoid::{CompactOpen, GroupElem, GroupoidFn, GroupoidPoint};
pub use lattice::{Algebra, AtomId, AtomSet, Ideal, Ultrafilter};
pub use paths::{BoundaryPath, Cylinder, Edge, FinitePath, InfinitePath, Vertex};
pub use scalar::Scalar;
