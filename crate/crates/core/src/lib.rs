//! Locus equations of planar four-bar linkages.
//!
//! The symbolic path builds the polynomial constraints of a linkage, eliminates
//! the joint coordinates with Buchberger's algorithm over exact rationals and
//! returns the implicit equation of the coupler curve. The numeric path traces
//! the same linkage in floating point, fits implicit curves through sampled
//! points, and scores traces against symbolic equations.

pub mod cancel;
pub mod error;
pub mod fit;
pub mod groebner;
pub mod linkage;
pub mod locus;
pub mod poly;
pub mod rational;
pub mod tracer;

pub use cancel::Deadline;
pub use error::{Error, Result};
pub use poly::{Context, Monomial, MonomialOrder, Polynomial};
pub use rational::Rational;
