//! Numerical laboratory for the compressible Navier–Stokes equations with
//! Cattaneo (hyperbolic) heat conduction.
//!
//! The crate is `no_std` and only needs `alloc`. It contains
//!
//! * [`params`]: physical and normalized constants, perturbation variables;
//! * [`symbol`]: the Fourier symbol of the linearized operator, its
//!   characteristic quartic, branch tracking and asymptotic expansions;
//! * [`green`]: the Fourier-space Green matrix evaluated by explicit spectral
//!   sums, by a matrix exponential, and by its low-frequency leading terms;
//! * [`linsim`]: exact frequency-space evolution of radially structured data
//!   on the whole space, Sobolev / negative norms by radial quadrature;
//! * [`fouriermodel`]: the Fourier-law (parabolic) comparator;
//! * [`nonlinsim`]: a periodic-box pseudo-spectral solver for the full
//!   nonlinear system with conservation and entropy monitors;
//! * [`fit`]: algebraic decay-rate fitting.
//!
//! Sign convention: the symbol `B(ξ)` is built with `∂ ↦ iξ` and the
//! propagator is `exp(−B t)`. Every eigenvalue `λ` reported by this crate is
//! an eigenvalue of `−B`, so that `e^{λt}` is a solution mode.
#![no_std]
// NaN must fail range checks, and index loops mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod fit;
pub mod fouriermodel;
pub mod green;
pub mod linalg;
pub mod linsim;
pub mod nonlinsim;
pub mod params;
pub mod quadrature;
pub mod symbol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use params::{NormalizedParams, PhysicalParams};
