//! Generalized Brouncker continued fractions `y(s, r)`: evaluation by
//! continued fraction, infinite product, Gamma ratio and integral
//! representations, logarithmic derivatives, and the exact large-`s`
//! expansion.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
pub mod brouncker;
pub mod cfcore;
pub mod error;
pub mod logderiv;
pub mod quad;
pub mod specfun;

pub use brouncker::DomainPoint;
pub use cfcore::{Budget, CfSpec, Evaluation, Method};
pub use error::{Error, Result};
