//! Exact symbolic kernel: arbitrary-precision rationals, sparse multivariate
//! polynomials over the method parameters, and polynomials in the expansion
//! variable `phi` with a built-in xi-derivative rule.

mod parampoly;
mod phipoly;
mod rational;
mod symbol;

pub use parampoly::{ParamPoly, ParseError};
pub use phipoly::PhiPoly;
pub use rational::Rational;
pub use symbol::{Symbol, SymbolValues};
