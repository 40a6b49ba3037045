//! Exact computations with oriented commutative differential graded algebras.
//!
//! Scalars live in [`field`], dense linear algebra in [`linalg`]. Algebras are [`algebra::Cdga`]
//! values; orientations and cyclic pairings are in [`orientation`]. The [`hodge`] module builds
//! Hodge decompositions and the standard homotopy, [`small`] the small subalgebra, [`extension`]
//! extensions of Hodge type and [`pipeline`] the Poincaré duality model construction.

#![allow(clippy::needless_range_loop, clippy::type_complexity, clippy::result_large_err)]

pub mod algebra;
pub mod corpus;
pub mod document;
pub mod error;
pub mod extension;
pub mod field;
pub mod graded;
pub mod hodge;
pub mod homology;
pub mod linalg;
pub mod morphism;
pub mod orientation;
pub mod pipeline;
pub mod random;
pub mod small;

pub use algebra::{Cdga, CdgaBuilder, FreeGenerator, FreePresentation};
pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use graded::{Complex, GradedMap, GradedSpace};
pub use hodge::HodgeData;
pub use homology::{homology, Homology};
pub use linalg::{Matrix, Vector};
pub use orientation::{CyclicPairing, Orientation};
