//! Exact bifurcation analysis of one-parameter families of Morse data.
//!
//! A family is described by a Cerf tuple (arcs of critical points with their
//! action profiles) together with a flow-line counter that changes only at
//! handle-slides, births and deaths. From that the crate evolves the boundary
//! operator, computes filtered homology over Z/2, Z or Q, tracks spectral
//! values of homology classes and decides the growth hypotheses that keep a
//! class from escaping to infinite action.

pub mod algebra;
pub mod bifurcation;
pub mod cerf;
pub mod escape;
pub mod rabinowitz;
pub mod scenario;
pub mod tracker;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Exact rational used for parameters and action values.
pub type Rational = BigRational;
