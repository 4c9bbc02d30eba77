//! Numerical building blocks shared by the tail, criteria and simulation layers.

pub mod fit;
pub mod quadrature;
pub mod summation;

pub use fit::{linear_fit, LinearFit};
pub use quadrature::{gauss_legendre, integrate, QuadOptions, Substitution};
pub use summation::NeumaierSum;
