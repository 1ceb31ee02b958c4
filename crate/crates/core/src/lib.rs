//! Exact arithmetic in finite abelian group algebras F_q G: primitive
//! idempotents via characters and q-cyclotomic classes, ring involutions and
//! *-cleanness decisions, and the induced LCD / self-orthogonal abelian code
//! classification.
//!
//! The number-theoretic criteria and the structural oracle answer the same
//! questions by different routes, and the crate keeps both live: every
//! analysis can cross-check its verdict against explicitly constructed
//! idempotents.

pub mod algebra;
pub mod codes;
pub mod error;
pub mod gf;
pub mod group;
pub mod idem;
pub mod linalg;
pub mod numtheory;
pub mod starclean;

pub use algebra::{AlgebraElem, Involution, InvolutionKind};
pub use error::{Error, Result};
pub use gf::{FieldCtx, FieldElem};
pub use group::{AbelianGroup, Character, GroupElem, SylowSplit};
pub use idem::{CyclotomicClass, PrimitiveIdempotent};
pub use starclean::StarCleanReport;
