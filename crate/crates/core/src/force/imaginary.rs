use super::{
    check_separation, imaginary_axis_scale, inner_config, round_trip_sum, FirstFailure, ForceError, ForceResult,
    PathTag,
};
use crate::constants::C;
use crate::quadrature::{integrate_semi_infinite_scaled, QuadratureConfig, QuadratureError};
use crate::reflection::{FrozenReflection, Polarization, ReflectionModel};

/// Passivity slack for `|r1 r2|`; perfect mirrors sit exactly at 1.
const PASSIVITY_SLACK: f64 = 1e-12;

/// Pressure from the imaginary-frequency form
///
/// ```text
/// P = -(hbar / 2 pi^2) int_0^inf dxi int_0^inf dQ Q kappa
///       sum_{s,p} r1 r2 e^{-2 kappa L} / (1 - r1 r2 e^{-2 kappa L})
/// ```
///
/// with `kappa = sqrt(Q^2 + xi^2/c^2)` and amplitudes taken at `omega = i xi`.
/// Internally `Q dQ = kappa dkappa` and the variables are `w = 2 xi L / c`
/// (outer) and `y = 2 kappa L >= w` (inner).
pub fn force_imag_axis(
    r1: &ReflectionModel,
    r2: &ReflectionModel,
    separation: f64,
    cfg: &QuadratureConfig,
) -> Result<ForceResult, ForceError> {
    check_separation(separation)?;
    cfg.validate()?;
    let two_l = 2.0 * separation;
    let inner_cfg = inner_config(cfg);

    let failure = FirstFailure::new();
    let mut inner_evals = 0usize;
    let mut inner_rel_err = 0.0f64;

    let outer = |w: f64| -> f64 {
        if failure.is_set() {
            return f64::NAN;
        }
        let xi = w * C / two_l;
        let frozen = match (r1.at_imaginary(xi), r2.at_imaginary(xi)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return failure.record(e.into()),
        };
        let integrand = |y: f64| match channel_sum(&frozen, w, y, two_l) {
            Ok(v) => y * y * v,
            Err(e) => failure.record(e),
        };
        match integrate_semi_infinite_scaled(integrand, w, 1.0, &inner_cfg) {
            Ok(est) => {
                inner_evals += est.evals;
                if est.value != 0.0 {
                    inner_rel_err = inner_rel_err.max(est.error / est.value.abs());
                }
                est.value
            }
            Err(QuadratureError::NotConverged { value, error, evals, .. }) if !failure.is_set() => {
                inner_evals += evals;
                failure.record(ForceError::NotConverged {
                    partial: Box::new(ForceResult::new(separation, f64::NAN, f64::NAN, 0, PathTag::ImaginaryAxis)),
                    detail: format!("inner kappa integral at xi = {xi:e} rad/s: {value:e} +- {error:e}"),
                })
            }
            Err(e) => failure.record(e.into()),
        }
    };

    let scale = imaginary_axis_scale(separation);
    let finish = |value: f64, error: f64, outer_evals: usize, evals: usize, rel: f64| {
        let err = scale * (error + rel * value.abs());
        ForceResult::new(separation, -scale * value, err, outer_evals + evals, PathTag::ImaginaryAxis)
    };

    // The borrow of the counters ends with the integration.
    let result = integrate_semi_infinite_scaled(outer, 0.0, 1.0, cfg);
    match result {
        Ok(est) => Ok(finish(est.value, est.error, est.evals, inner_evals, inner_rel_err)),
        Err(QuadratureError::NotConverged { value, error, evals, subdivisions }) if !failure.is_set() => {
            Err(ForceError::NotConverged {
                partial: Box::new(finish(value, error, evals, inner_evals, inner_rel_err)),
                detail: format!("outer xi integral after {subdivisions} subdivisions"),
            })
        }
        Err(e) => Err(failure.resolve(e)),
    }
}

/// `sum_{s,p} r1 r2 e^{-y} / (1 - r1 r2 e^{-y})` at `(w, y)`.
fn channel_sum(
    (f1, f2): &(FrozenReflection<'_>, FrozenReflection<'_>),
    w: f64,
    y: f64,
    two_l: f64,
) -> Result<f64, ForceError> {
    let q_par = ((y - w) * (y + w)).max(0.0).sqrt() / two_l;
    let mut sum = 0.0;
    for pol in Polarization::BOTH {
        let x = f1.reflect_real(pol, q_par)? * f2.reflect_real(pol, q_par)?;
        let passive = x.abs() <= 1.0 + PASSIVITY_SLACK;
        match round_trip_sum(x, y) {
            Some(v) if passive => sum += v,
            _ => {
                return Err(ForceError::Active {
                    product: x.abs(),
                    xi: w * crate::constants::C / two_l,
                    q_par,
                })
            }
        }
    }
    Ok(sum)
}
