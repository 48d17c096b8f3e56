//! Exact-arithmetic engine for fusion products of current-algebra
//! modules.
//!
//! The crate computes the filtered tensor product of cyclic modules at
//! pairwise-distinct evaluation points, the fusion product as a graded
//! cyclic module, bigraded characters and their irreducible
//! decompositions (generalized Kostka tables), and cross-validates the
//! results against independent presentations: a character recurrence, a
//! Demazure-style induction step, a polynomial-ideal quotient, and
//! affine-Weyl alternating sums for coinvariant characters.
//!
//! All arithmetic is exact over the rationals. Every value is immutable
//! after construction and every operation is a pure function, so
//! independent computations are safe to run concurrently.

pub mod check;
pub mod error;
pub mod filtration;
pub mod lie;
pub mod linalg;
pub mod modules;
pub mod oracles;
pub mod qpoly;
pub mod rat;
pub mod verlinde;

pub use error::{Error, Result};
pub use rat::Rat;
