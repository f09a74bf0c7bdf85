use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{check_separation, inner_config, FirstFailure, ForceError, ForceResult, PathTag};
use crate::constants::{C, HBAR};
use crate::dielectric::Frequency;
use crate::quadrature::{integrate, QuadratureConfig, QuadratureError};
use crate::reflection::{Polarization, ReflectionModel};

/// Width of one chunk of the propagating-wave integral, in `k L`.
const CHUNK: f64 = 8.0 * PI;

/// Magnitude of the dimensionless pressure integral for perfect mirrors,
/// `pi^4 / 120`; sets the absolute scale of the tolerances below.
const REFERENCE: f64 = PI * PI * PI * PI / 120.0;

/// Upper limit of the `Q L` integral. At fixed `Q` the evanescent and
/// propagating pieces cancel down to a remainder bounded by the perfect-mirror
/// value, `~ (QL)^3 e^{-2QL}`, which is below `1e-20` here; beyond it the
/// grazing modes become so weakly damped that the pieces cannot be resolved.
const MAX_PARALLEL: f64 = 30.0;

/// Largest `|k| L` kept on the evanescent branch.
const EVANESCENT_CUTOFF: f64 = 40.0;

/// Closest approach of `1 - r1 r2 e^{2ikL}` to zero before the contour is
/// declared to sit on a mode.
const RESONANCE_GAP: f64 = 1e-9;

/// Pressure from the momentum flux of real-frequency modes,
///
/// ```text
/// P = (hbar / 2 pi^2) Re int_0^inf domega int_0^inf dQ Q k
///       sum_{s,p} r1 r2 e^{2ikL} / (1 - r1 r2 e^{2ikL}),    k^2 = omega^2/c^2 - Q^2
/// ```
///
/// For each `Q` the frequencies below the light line are evanescent,
/// `k = i Q sin(theta)`, `omega = c Q cos(theta)`; those above are
/// propagating and are integrated over real `k` in chunks until the
/// contribution dies away. Only meaningful for dissipative slabs whose
/// reflectivity falls off at high frequency.
pub fn force_real_axis(
    r1: &ReflectionModel,
    r2: &ReflectionModel,
    separation: f64,
    cfg: &QuadratureConfig,
) -> Result<ForceResult, ForceError> {
    check_separation(separation)?;
    cfg.validate()?;
    let inner_cfg = inner_config(cfg).with_abs_tol(0.1 * cfg.rel_tol * REFERENCE);
    let chunk_tol = cfg.rel_tol * REFERENCE;

    let failure = FirstFailure::new();
    let mut inner_evals = 0usize;
    let mut inner_err = 0.0f64;
    let mut reached = 0.0f64;

    // sum_{s,p} x e^{2ik} / (1 - x e^{2ik}) at dimensionless (Q, k) and
    // frequency omega = c q / L.
    let round_trip = |q_hat: f64, k_hat: Complex64, q_freq: f64| -> Result<Complex64, ForceError> {
        let omega = C * q_freq / separation;
        let f1 = r1.at(Frequency::Real(omega))?;
        let f2 = r2.at(Frequency::Real(omega))?;
        let q_par = q_hat / separation;
        let phase = (2.0 * Complex64::i() * k_hat).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        for pol in Polarization::BOTH {
            let x = f1.reflect(pol, q_par)? * f2.reflect(pol, q_par)? * phase;
            let den = 1.0 - x;
            if den.norm() < RESONANCE_GAP {
                return Err(ForceError::Resonance {
                    q_par,
                    k: k_hat.re / separation,
                });
            }
            sum += x / den;
        }
        Ok(sum)
    };

    let mut outer = |q_hat: f64| -> f64 {
        if failure.is_set() {
            return f64::NAN;
        }
        // Evanescent: -Q^2 int_0^{pi/2} sin^2 Im R dtheta.
        let evanescent = |theta: f64| {
            let (s, c) = theta.sin_cos();
            match round_trip(q_hat, Complex64::new(0.0, q_hat * s), q_hat * c) {
                Ok(r) => -q_hat * q_hat * s * s * r.im,
                Err(e) => failure.record(e),
            }
        };
        // Beyond Q sin(theta) = EVANESCENT_CUTOFF the round trip is damped by
        // e^{-2 EVANESCENT_CUTOFF}; cutting there keeps large Q well resolved.
        let theta_max = if q_hat > EVANESCENT_CUTOFF {
            (EVANESCENT_CUTOFF / q_hat).asin()
        } else {
            FRAC_PI_2
        };
        let mut total = match integrate(evanescent, 0.0, theta_max, &inner_cfg) {
            Ok(est) => {
                inner_evals += est.evals;
                inner_err += q_hat * est.error;
                est.value
            }
            Err(e) => return failure.record(e.into()),
        };

        // Propagating: int_0^inf k^2 / q Re R dk, chunk by chunk.
        let propagating = |k: f64| {
            let q = q_hat.hypot(k);
            match round_trip(q_hat, Complex64::new(k, 0.0), q) {
                Ok(r) => k * k / q * r.re,
                Err(e) => failure.record(e),
            }
        };
        let mut start = 0.0;
        let mut quiet = 0;
        while quiet < 2 {
            if start >= cfg.max_wavenumber {
                reached = reached.max(start);
                return failure.record(ForceError::NotConverged {
                    partial: Box::new(ForceResult::new(separation, f64::NAN, f64::NAN, inner_evals, PathTag::RealAxis)),
                    detail: format!(
                        "propagating waves at Q L = {q_hat} still contribute at k L = {start}; raise max_wavenumber or add dissipation"
                    ),
                });
            }
            match integrate(propagating, start, start + CHUNK, &inner_cfg) {
                Ok(est) => {
                    inner_evals += est.evals;
                    inner_err += q_hat * est.error;
                    total += est.value;
                    quiet = if (q_hat * est.value).abs() < chunk_tol { quiet + 1 } else { 0 };
                }
                Err(e) => return failure.record(e.into()),
            }
            start += CHUNK;
        }
        reached = reached.max(start);
        q_hat * total
    };

    let scale = HBAR * C / (2.0 * PI * PI * separation.powi(4));
    let result = integrate(&mut outer, 0.0, MAX_PARALLEL, cfg);
    let finish = |value: f64, error: f64, evals: usize| {
        // The inner errors are summed over all outer nodes; weight them by
        // the mean node spacing instead of trusting them wholesale.
        let per_node = if evals > 0 { inner_err / evals as f64 } else { 0.0 };
        ForceResult::new(separation, scale * value, scale * (error + per_node), evals + inner_evals, PathTag::RealAxis)
    };
    match result {
        Ok(est) => Ok(finish(est.value, est.error, est.evals)),
        Err(QuadratureError::NotConverged { value, error, evals, subdivisions }) if !failure.is_set() => {
            Err(ForceError::NotConverged {
                partial: Box::new(finish(value, error, evals)),
                detail: format!("outer Q integral after {subdivisions} subdivisions (k L reached {reached})"),
            })
        }
        Err(e) => Err(failure.resolve(e)),
    }
}
