//! Special functions, compensated summation and adaptive quadrature.

mod functions;
mod quadrature;
mod sum;

pub use functions::{
    beta_fn, exp_integral_e1, gamma_fn, ln_gamma, lower_incomplete_beta, lower_incomplete_gamma,
    truncated_gamma_integral, upper_incomplete_beta, upper_incomplete_gamma, EULER_GAMMA,
};
pub use quadrature::{integrate, integrate_semi_infinite, Integral, QuadratureSpec, Transform};
pub use sum::NeumaierSum;
