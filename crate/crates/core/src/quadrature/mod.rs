//! Quadrature rules: Gauss-Jacobi tables for endpoint-singular weights and an
//! adaptive double-exponential integrator for everything else.

mod gauss;
mod tanh_sinh;

pub use gauss::{gauss_jacobi, gauss_legendre, ln_gamma, Rule};
pub use tanh_sinh::{de_rule, integrate, integrate_pieces, Integral, Probe};
