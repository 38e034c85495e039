//! Matrix derivatives of functions of a matrix argument.
//!
//! - [`hfunction`]: structured symbolic route, the primary engine
//! - [`brute`]: entrywise partial derivatives, an independent oracle, and the
//!   group co-derivative
//! - [`cycle`]: closed-form permutation sums and the `Q(z, zeta)` operator

pub mod brute;
pub mod cycle;
pub mod hfunction;

pub use brute::BrutePoly;
pub use cycle::{cycle_sum, q_operator, q_operator_cycle, Potential};
pub use hfunction::{Evaluated, HFunction, HSpace, Word};
