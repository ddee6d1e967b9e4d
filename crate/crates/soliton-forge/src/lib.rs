//! Traveling-wave solutions of a reduced (2+1)-dimensional BKP equation,
//! built with an auxiliary-ODE expansion technique and verified by
//! independent numeric residual checks.
//!
//! The crate splits into:
//! - [`algebra`]: exact rationals, parameter polynomials, and polynomials
//!   in the expansion variable with a built-in xi-derivative rule;
//! - [`expansion`]: homogeneous balance, ansatz substitution, the collected
//!   coefficient system, its numeric solver, and the closed-form sets;
//! - [`closed_form`]: evaluators for G, phi, the four wave profiles, and
//!   the integrated profile w;
//! - [`verify`]: finite-difference residual checks against the reduced
//!   ODEs and the original PDE;
//! - [`cli`]: the command-line front end.

pub mod algebra;
pub mod cli;
pub mod closed_form;
mod error;
pub mod expansion;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
