//! Exact bivariate polynomial arithmetic and the identity suite built on it.
//!
//! Identities involving quotients are checked in cross-multiplied form, so
//! everything stays inside [`MultiPoly`].

mod formulas;
mod identities;
mod poly;

pub use formulas::*;
pub use identities::*;
pub use poly::*;
