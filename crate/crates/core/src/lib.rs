//! Divisor counting through the argument principle.
//!
//! The function `f_s(z) = exp(2πiz) + exp(2πis/z) − 2` vanishes on the real
//! axis exactly at the divisors of `s`. Counting its zeros inside thin
//! rectangles that hug `[1, √s]` therefore counts divisors, and the count
//! inside the rectangle `L+` equals one exactly when `s` is prime.
//!
//! The crate is organised bottom-up:
//!
//! - [`analytic`]: `f_s`, its first two derivatives and its logarithmic
//!   derivative, evaluated with reduced phases so that values near zeros stay
//!   accurate.
//! - [`contour`]: the rectangles `L−`, `Lc`, `L+` and boundary validation.
//! - [`residue`]: the logarithmic residue by adaptive Gauss–Legendre
//!   quadrature and, independently, by tracking the argument of `f_s`.
//! - [`divisor`]: `τ(s)` and the primality predicate built on the residues.
//! - [`oracle`]: trial-division ground truth.
//! - [`batch`]: scans over ranges of `s`, parallel with the `parallel` feature.
//!
//! ```
//! use divres::{divisor, Natural, QuadratureConfig};
//!
//! let report = divisor::tau(Natural::new(12).unwrap(), &QuadratureConfig::default()).unwrap();
//! assert_eq!(report.tau, 6);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod batch;
pub mod contour;
mod dd;
pub mod divisor;
pub mod error;
pub mod oracle;
pub mod residue;

pub use analytic::{ComplexValue, Natural, ZeroRecord};
pub use contour::{Contour, ContourKind, EpsilonReport, Segment};
pub use divisor::{ComponentTriple, EvalOptions, TauReport};
pub use error::{CoreError, DivisorError, ResidueError};
pub use residue::{Method, QuadratureConfig, ResidueResult};
