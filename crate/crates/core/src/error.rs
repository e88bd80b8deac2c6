use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("adaptive quadrature on [{a}, {b}] did not reach rel_tol {rel_tol:e} within {limit} subintervals")]
    NonConvergence { a: f64, b: f64, rel_tol: f64, limit: usize },
    #[error("Gauss-Laguerre order {0} exceeds the supported maximum of 512")]
    OrderTooLarge(usize),
    #[error("Gauss-Laguerre order must be at least 1")]
    ZeroOrder,
    #[error("{name} = {value} rad is outside [0, pi/2)")]
    InvalidAngle { name: &'static str, value: f64 },
    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("invalid QPS focus distance {0} m")]
    InvalidFocus(f64),
    #[error("point ({x}, {y}) m lies outside the {side_x} m x {side_y} m surface")]
    OutOfSurface { x: f64, y: f64, side_x: f64, side_y: f64 },
    #[error("channel transmittance {0} >= 1, the PLOB bound diverges")]
    SaturatedChannel(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig { field, reason: reason.into() }
}
