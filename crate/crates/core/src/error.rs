use alloc::string::String;
use alloc::vec::Vec;

use crate::params::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid physical parameters: {0:?}")]
    InvalidParams(Vec<Violation>),
    #[error("vacuum breach: 1 + n = {value} at index {index}")]
    VacuumBreach { index: usize, value: f64 },
    #[error("non-positive temperature factor {value} at index {index}")]
    NegativeTemperature { index: usize, value: f64 },
    #[error("degenerate polynomial: leading coefficient is zero")]
    Degenerate,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("branch tracking ambiguous at r = {r}: roots within {separation:e}")]
    TrackingAmbiguity { r: f64, separation: f64 },
    #[error("spectral gap violated: {which} = {value}")]
    BoundViolation { which: &'static str, value: f64 },
    #[error("eigenvalue collision: min separation {separation:e} below threshold {threshold:e}")]
    EigenvalueCollision { separation: f64, threshold: f64 },
    #[error("|xi| = {r} lies outside the low-frequency band r <= {r0}")]
    OutOfBand { r: f64, r0: f64 },
    #[error("quadrature failed to converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("negative-norm integrand is not integrable near r = 0 (local exponent {exponent})")]
    DivergentIntegral { exponent: f64 },
    #[error("amplitude {amplitude} violates the positivity margin (min factor {min_factor})")]
    AmplitudeTooLarge { amplitude: f64, min_factor: f64 },
    #[error("time step {dt} exceeds the CFL bound {bound}")]
    CflViolation { dt: f64, bound: f64 },
    #[error("non-positive value {value} at t = {t}")]
    NonPositiveValue { t: f64, value: f64 },
    #[error("fit window too small: {n_points} points spanning [{t_min}, {t_max}]")]
    WindowTooSmall { n_points: usize, t_min: f64, t_max: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
