//! Exact multivariate polynomials over the rationals.

mod monomial;
mod order;
mod parse;
mod polynomial;

pub use monomial::{Context, Monomial};
pub use order::MonomialOrder;
pub use parse::{parse_polynomial, parse_system};
pub use polynomial::{ArithOp, Polynomial};
