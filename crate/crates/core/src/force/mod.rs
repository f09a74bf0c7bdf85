//! Casimir pressure between two slabs across a vacuum gap of width `L`.
//!
//! Sign convention on every path: negative pressure is attraction.
//!
//! Three independent evaluations are provided:
//!
//! * [`force_imag_axis`] rotates the frequency integral onto `omega = i xi`,
//!   where the integrand is smooth and decays like `e^{-2 kappa L}`. This is
//!   the production path.
//! * [`force_real_axis`] integrates the momentum-flux formula literally: for
//!   each `Q` the normal wavenumber runs from `iQ` down to `0` (evanescent
//!   waves) and then out along the real axis (propagating waves). It needs
//!   dissipative slabs and is meant for validation.
//! * [`lifshitz_force`] is the classical Lifshitz integral over `p` and `xi`,
//!   written in terms of permittivities only.
//!
//! Inside the integrators all variables are made dimensionless with `L`, so
//! conditioning does not depend on the separation.

mod imaginary;
mod lifshitz;
mod real_axis;

pub use imaginary::force_imag_axis;
pub use lifshitz::{lifshitz_force, LifshitzVariables};
pub use real_axis::force_real_axis;

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::constants::{C, HBAR};
use crate::dielectric::DielectricError;
use crate::quadrature::{QuadratureConfig, QuadratureError};
use crate::reflection::ReflectionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathTag {
    ImaginaryAxis,
    RealAxis,
    Lifshitz,
    Ideal,
}

impl PathTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PathTag::ImaginaryAxis => "imaginary-axis",
            PathTag::RealAxis => "real-axis",
            PathTag::Lifshitz => "lifshitz",
            PathTag::Ideal => "ideal",
        }
    }
}

impl fmt::Display for PathTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    /// Separation, m.
    pub separation: f64,
    /// Pressure, Pa; negative is attractive.
    pub pressure: f64,
    /// Estimated absolute error of `pressure`, Pa.
    pub error: f64,
    /// `pressure / ideal_casimir_pressure(separation)`.
    pub reduction: f64,
    pub evals: usize,
    pub path: PathTag,
}

impl ForceResult {
    fn new(separation: f64, pressure: f64, error: f64, evals: usize, path: PathTag) -> Self {
        let ideal = -PI * PI * HBAR * C / (240.0 * separation.powi(4));
        Self {
            separation,
            pressure,
            error,
            reduction: pressure / ideal,
            evals,
            path,
        }
    }
}

#[derive(Debug, Error)]
pub enum ForceError {
    #[error("separation L = {0} m must be positive and finite")]
    InvalidSeparation(f64),

    #[error(transparent)]
    Reflection(#[from] ReflectionError),

    #[error(transparent)]
    Dielectric(#[from] DielectricError),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error("|r1 r2| = {product} > 1 at xi = {xi:e} rad/s, Q = {q_par:e} 1/m: slabs are not passive")]
    Active { product: f64, xi: f64, q_par: f64 },

    #[error("lossless resonance on the real-frequency contour at Q = {q_par:e} 1/m, k = {k:e} 1/m; add dissipation or use the imaginary-axis path")]
    Resonance { q_par: f64, k: f64 },

    #[error("force integral did not converge ({detail}); best estimate {:e} Pa", partial.pressure)]
    NotConverged { partial: Box<ForceResult>, detail: String },

    #[error("{0}")]
    Unsupported(String),
}

/// `-pi^2 hbar c / (240 L^4)`, the pressure between perfect mirrors.
pub fn ideal_casimir_pressure(separation: f64) -> Result<f64, ForceError> {
    check_separation(separation)?;
    Ok(-PI * PI * HBAR * C / (240.0 * separation.powi(4)))
}

/// Ratio of a computed pressure to the ideal-mirror pressure at `separation`.
pub fn reduction_factor(result: &ForceResult, separation: f64) -> Result<f64, ForceError> {
    Ok(result.pressure / ideal_casimir_pressure(separation)?)
}

/// The ideal-mirror pressure wrapped as a result.
pub fn ideal_force(separation: f64) -> Result<ForceResult, ForceError> {
    let p = ideal_casimir_pressure(separation)?;
    Ok(ForceResult::new(separation, p, 0.0, 0, PathTag::Ideal))
}

fn check_separation(separation: f64) -> Result<(), ForceError> {
    if separation > 0.0 && separation.is_finite() {
        Ok(())
    } else {
        Err(ForceError::InvalidSeparation(separation))
    }
}

/// `hbar c / (2 pi^2 (2L)^4)`: converts the dimensionless imaginary-axis
/// integrals to Pa.
fn imaginary_axis_scale(separation: f64) -> f64 {
    HBAR * C / (2.0 * PI * PI * (2.0 * separation).powi(4))
}

/// `x e^{-y} / (1 - x e^{-y})` with `x = r1 r2`, without cancellation as
/// `x -> 1`, `y -> 0`. `None` when the denominator is not positive.
fn round_trip_sum(x: f64, y: f64) -> Option<f64> {
    let den = (1.0 - x) - x * (-y).exp_m1();
    (den > 0.0).then(|| x * (-y).exp() / den)
}

/// First error raised inside an integrand closure. The closure reports the
/// failure to the quadrature as `NaN`; the caller then surfaces the stored
/// error instead of the generic non-finite one.
struct FirstFailure(RefCell<Option<ForceError>>);

impl FirstFailure {
    fn new() -> Self {
        Self(RefCell::new(None))
    }

    fn record(&self, err: ForceError) -> f64 {
        self.0.borrow_mut().get_or_insert(err);
        f64::NAN
    }

    fn is_set(&self) -> bool {
        self.0.borrow().is_some()
    }

    /// Prefer the recorded integrand error over the quadrature's.
    fn resolve(self, err: QuadratureError) -> ForceError {
        self.0.into_inner().unwrap_or(ForceError::Quadrature(err))
    }
}

/// Tolerance for inner integrals of a nested pair.
fn inner_config(cfg: &QuadratureConfig) -> QuadratureConfig {
    cfg.with_rel_tol((0.1 * cfg.rel_tol).max(2e-14))
}
