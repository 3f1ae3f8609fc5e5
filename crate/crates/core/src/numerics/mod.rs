//! Numerical substrate: special functions, quadrature, root finding and a
//! penalized downhill simplex.

pub mod quadrature;
pub mod roots;
pub mod simplex;
pub mod special;

use thiserror::Error;

pub use quadrature::{integrate_finite, integrate_semi_infinite, Quadrature, QuadratureResult};
pub use roots::{brent_root, positive_real_roots, PolynomialRealRoots};
pub use simplex::{nelder_mead_penalized, NelderMeadOptions, NelderMeadOutcome, RestartRecord};
pub use special::{erfcx, gamma_fn, hyp2f1, ln_gamma, rgamma, upper_incomplete_gamma};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("pole at {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} did not converge")]
    NotConverged(&'static str),
    #[error("quadrature did not converge (partial value {}, error estimate {})", partial.value, partial.abs_error_estimate)]
    QuadratureNotConverged { partial: QuadratureResult },
    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("polynomial has no nonzero coefficient")]
    DegeneratePolynomial,
}
