//! Zeros of `(p, η)`-strongly monotone operators on `R^n` with the `s`-norm,
//! found by the anchored duality-map iteration
//!
//! ```text
//! x_{n+1} = J_p^{-1}( J_p x_n − λ_n (T x_n + θ_n (J_p x_n − J_p x_1)) )
//! ```
//!
//! together with drivers for convex minimization and variational
//! inequalities, the Lyapunov functionals used to analyse the iteration as
//! executable inequality checks, and naive oracles for cross-checking results.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod projections;
pub mod sampling;
pub mod schedules;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
pub use operators::MonotoneOperator;
pub use projections::{ConvexSet, CyclicFamily};
pub use schedules::{PowerSchedule, Schedule};
pub use solver::{IterationTrace, SolveReport, SolveStatus, StopRule, TraceOptions};
pub use space::{DualCovector, PrimalVector, SpaceSpec};
