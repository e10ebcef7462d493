//! Exact-arithmetic toolkit for the coefficient sequences of the
//! polynomials `P_m(a)` that evaluate the quartic integral
//! `int_0^inf dx / (x^4 + 2 a x^2 + 1)^(m+1)`.
//!
//! * [`exactnum`]: dyadic and general rationals, binomial cache.
//! * [`bmcoeff`]: coefficient rows by independent methods, exact evaluation.
//! * [`seqprops`]: log-concavity, spiral, ratio-monotone predicates, `L` operator.
//! * [`boundcheck`]: instance checks of the ratio bounds with exact margins.
//! * [`polyident`]: sparse bivariate polynomials and the identity suite.
//! * [`quadoracle`]: floating-point quadrature cross-check of the integral.
//! * [`scanner`]: resumable range scans of iterated ratio monotonicity.

pub mod bmcoeff;
pub mod boundcheck;
pub mod exactnum;
pub mod polyident;
pub mod quadoracle;
pub mod scanner;
pub mod seqprops;

pub use bmcoeff::{closed_form_row, CoeffRow, Method};
pub use exactnum::{BigInt, BigRational, Dyadic, Exact, ExactError};
pub use seqprops::{Property, PropertyVerdict};
pub use boundcheck::{BoundId, BoundReport};
pub use polyident::{IdentityId, IdentityResult, MultiPoly};
pub use quadoracle::QuadResult;
pub use scanner::{ScanLedger, ScanParams, Verdict};
