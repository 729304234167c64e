//! Exact Riemann solvers, front tracking and blow-up experiments for a
//! two-species adsorption system
//!
//! ```text
//! ∂x u + ∂t h(c) = 0,    ∂x (u c) + ∂t (c + q1(c)) = 0,    h = q1 + q2,
//! ```
//!
//! where `x` plays the role of time. [`model`] holds the isotherms and every
//! derived function, [`riemann`] the exact wave solutions, [`fronttrack`] the
//! event-driven solver, [`scenario`] the alternating boundary experiments and
//! [`fvref`] an independent first-order finite-volume reference.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fronttrack;
pub mod fvref;
pub mod model;
pub mod quad;
pub mod riemann;
pub mod scenario;

pub use error::{Error, Result};
pub use model::{DerivedFunctions, IsothermModel};
pub use riemann::State;
pub use scenario::Scenario;
