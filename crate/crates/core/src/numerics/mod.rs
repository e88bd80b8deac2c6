//! Shared numerical kernels: error function, adaptive 1-D quadrature,
//! Gauss-Laguerre rules, and the log-normal expectation used as the exact
//! reference for the averaged key rate.

mod laguerre;
mod quadrature;

pub use laguerre::{gauss_laguerre, QuadratureRule, MAX_ORDER};
pub use quadrature::{integrate_adaptive, integrate_adaptive_with_breaks, SUBDIVISION_LIMIT};

use crate::{Error, Result};
use core::f64::consts::PI;

/// Relative tolerance used for altitude integrals.
pub const ALTITUDE_REL_TOL: f64 = 1e-9;
/// Relative tolerance used for the exact averaged PLOB integral.
pub const PLOB_REL_TOL: f64 = 1e-7;

/// Gaussian error function, absolute error below 1e-15 for all finite `x`.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 − erf(x)` without cancellation for large `x`.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `erf(p) − erf(q)` evaluated on the tail that avoids cancellation.
///
/// When both arguments sit on the same side of zero the difference is taken
/// between complementary functions, so a window far out in the tail keeps
/// its relative accuracy instead of collapsing to zero.
pub fn erf_diff(p: f64, q: f64) -> f64 {
    if p > 0.0 && q > 0.0 {
        erfc(q) - erfc(p)
    } else if p < 0.0 && q < 0.0 {
        erfc(-p) - erfc(-q)
    } else {
        erf(p) - erf(q)
    }
}

/// Log-normal density of a mean-one intensity, `ln I ~ N(−σ²/2, σ²)`.
pub fn lognormal_pdf(intensity: f64, sigma_sq: f64) -> f64 {
    if intensity <= 0.0 {
        return 0.0;
    }
    let z = libm::log(intensity) + 0.5 * sigma_sq;
    libm::exp(-z * z / (2.0 * sigma_sq)) / (intensity * libm::sqrt(2.0 * PI * sigma_sq))
}

/// `∫₀^{upper_clamp} g(I) f(I) dI` for the mean-one log-normal density `f`.
///
/// The integral is evaluated in `z = ln I`, where the weight is Gaussian,
/// over `[μ − 10σ, min(ln upper_clamp, μ + 10σ)]`. Pass `f64::INFINITY` as
/// the clamp for an untruncated expectation.
pub fn lognormal_expectation<G>(mut g: G, sigma_sq: f64, upper_clamp: f64, rel_tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return Err(Error::InvalidArgument("log-normal variance must be positive and finite"));
    }
    if !(upper_clamp > 0.0) {
        return Err(Error::InvalidArgument("upper clamp must be positive"));
    }
    let sigma = libm::sqrt(sigma_sq);
    let mu = -0.5 * sigma_sq;
    let lo = mu - 10.0 * sigma;
    let hi = libm::fmin(libm::log(upper_clamp), mu + 10.0 * sigma);
    if hi <= lo {
        return Ok(0.0);
    }
    let norm = 1.0 / (sigma * libm::sqrt(2.0 * PI));
    integrate_adaptive(
        |z| {
            let t = (z - mu) / sigma;
            g(libm::exp(z)) * norm * libm::exp(-0.5 * t * t)
        },
        lo,
        hi,
        rel_tol,
    )
}
