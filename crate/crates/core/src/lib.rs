//! Exact computation of the 4-rank of the narrow class group of a real
//! quadratic field `K` and of its reflection `K#`, by three independent
//! routes:
//!
//! * [`counting`]: direct enumeration of the divisor pairs `D = ab` with the
//!   two quadratic-residue conditions,
//! * [`charsum`]: Jacobi character sums over divisor pairs and quadruples,
//! * [`affine`]: the solution count of an affine system over `F_2`.
//!
//! [`rank4`] turns these counts into ranks and checks the reflection
//! inequality `rk4(K) <= rk4(K#) <= rk4(K) + 1`, and [`formsoracle`] recomputes
//! both ranks from the form class group of binary quadratic forms.

pub mod affine;
pub mod arith;
pub mod charsum;
pub mod counting;
mod error;
pub mod formsoracle;
pub mod rank4;

pub use error::{Error, Result};
