use super::{check_separation, imaginary_axis_scale, inner_config, FirstFailure, ForceError, ForceResult, PathTag};
use crate::constants::C;
use crate::dielectric::DielectricModel;
use crate::quadrature::{integrate_semi_infinite_scaled, QuadratureConfig, QuadratureError};

/// Lifshitz integration variables at one `(xi, p)`.
///
/// `p >= 1` parametrizes the gap wavevector, `K3 = sqrt(eps3) xi p / c`,
/// and `s_a = sqrt(p^2 - 1 + eps_a / eps3)` the slab wavevectors,
/// `K_a^2 = eps3 xi^2 s_a^2 / c^2 = k^2 + eps_a xi^2 / c^2` with `k` the
/// parallel momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifshitzVariables {
    pub xi: f64,
    pub p: f64,
    pub eps: [f64; 3],
    pub s1: f64,
    pub s2: f64,
}

impl LifshitzVariables {
    /// `eps = [eps1(i xi), eps2(i xi), eps3(i xi)]`.
    pub fn new(xi: f64, p: f64, eps: [f64; 3]) -> Self {
        let p2m1 = (p - 1.0) * (p + 1.0);
        Self {
            xi,
            p,
            eps,
            s1: (p2m1 + eps[0] / eps[2]).sqrt(),
            s2: (p2m1 + eps[1] / eps[2]).sqrt(),
        }
    }

    /// Parallel momentum squared, `eps3 xi^2 (p^2 - 1) / c^2`.
    pub fn parallel_sq(&self) -> f64 {
        self.eps[2] * (self.xi / C).powi(2) * (self.p - 1.0) * (self.p + 1.0)
    }

    /// `K3 = sqrt(eps3) xi p / c`.
    pub fn k_gap(&self) -> f64 {
        self.eps[2].sqrt() * self.xi * self.p / C
    }

    /// `K_a^2 = eps3 xi^2 s_a^2 / c^2` for slab `a` in {1, 2}.
    pub fn k_slab_sq(&self, slab: usize) -> f64 {
        let s = if slab == 1 { self.s1 } else { self.s2 };
        self.eps[2] * (self.xi * s / C).powi(2)
    }

    /// `1/G_1` (TM) and `1/G_2` (TE) at exponent `x = 2 xi p sqrt(eps3) L / c`.
    ///
    /// `G = (N/D) e^x - 1` is inverted as `D e^{-x} / ((N - D) - D expm1(-x))`,
    /// with `N - D = 2(ad + bc)` for `N = (a+b)(c+d)`, `D = (a-b)(c-d)`. This
    /// is the same quantity, well defined when `D = 0` and free of
    /// cancellation near `N = D`. Returns `None` if the denominator is not
    /// positive.
    pub fn inverse_g(&self, x: f64) -> Option<(f64, f64)> {
        let [e1, e2, e3] = self.eps;
        let p = self.p;
        // `a - b` and `c - d` come in closed form so that they vanish exactly
        // when a slab matches the gap medium.
        let inv = |a: f64, b: f64, a_minus_b: f64, c: f64, d: f64, c_minus_d: f64| {
            let dd = a_minus_b * c_minus_d;
            let den = 2.0 * (a * d + b * c) - dd * (-x).exp_m1();
            (den > 0.0).then(|| dd * (-x).exp() / den)
        };
        let p2 = p * p;
        // e3 s - e p = (e3 - e)((e3 + e) p^2 - e3) / (e3 s + e p)
        let tm = |e: f64, s: f64| (e3 - e) * ((e3 + e) * p2 - e3) / (e3 * s + e * p);
        // s - p = (e / e3 - 1) / (s + p)
        let te = |e: f64, s: f64| (e / e3 - 1.0) / (s + p);
        let g1 = inv(
            e3 * self.s1,
            e1 * p,
            tm(e1, self.s1),
            e3 * self.s2,
            e2 * p,
            tm(e2, self.s2),
        )?;
        let g2 = inv(self.s1, p, te(e1, self.s1), self.s2, p, te(e2, self.s2))?;
        Some((g1, g2))
    }
}

/// Classical Lifshitz pressure between half-spaces `eps1`, `eps2` across a
/// gap filled with `eps3`:
///
/// ```text
/// P = -(hbar / 2 pi^2 c^3) int_1^inf dp p^2 int_0^inf dxi xi^3 eps3^{3/2} (1/G1 + 1/G2)
/// ```
///
/// Integrated with `p` outside and `v = 2 xi L / c` inside; shares nothing
/// with [`super::force_imag_axis`] except the quadrature engine and the
/// permittivity models.
pub fn lifshitz_force(
    eps1: &DielectricModel,
    eps2: &DielectricModel,
    eps3: &DielectricModel,
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

    let integrand = |p: f64, v: f64| -> Result<f64, ForceError> {
        let xi = v * C / two_l;
        let eps = [eps1.at_imaginary(xi)?, eps2.at_imaginary(xi)?, eps3.at_imaginary(xi)?];
        let vars = LifshitzVariables::new(xi, p, eps);
        let root3 = eps[2].sqrt();
        let (g1, g2) = vars.inverse_g(v * p * root3).ok_or(ForceError::Active {
            product: f64::NAN,
            xi,
            q_par: vars.parallel_sq().sqrt(),
        })?;
        Ok(p * p * v.powi(3) * root3.powi(3) * (g1 + g2))
    };

    let outer = |p: f64| -> f64 {
        if failure.is_set() {
            return f64::NAN;
        }
        let inner = |v: f64| integrand(p, v).unwrap_or_else(|e| failure.record(e));
        match integrate_semi_infinite_scaled(inner, 0.0, 1.0 / p, &inner_cfg) {
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
                    partial: Box::new(ForceResult::new(separation, f64::NAN, f64::NAN, 0, PathTag::Lifshitz)),
                    detail: format!("inner xi integral at p = {p}: {value:e} +- {error:e}"),
                })
            }
            Err(e) => failure.record(e.into()),
        }
    };

    let scale = imaginary_axis_scale(separation);
    let finish = |value: f64, error: f64, evals: usize, inner: usize, rel: f64| {
        let err = scale * (error + rel * value.abs());
        ForceResult::new(separation, -scale * value, err, evals + inner, PathTag::Lifshitz)
    };

    match integrate_semi_infinite_scaled(outer, 1.0, 1.0, cfg) {
        Ok(est) => Ok(finish(est.value, est.error, est.evals, inner_evals, inner_rel_err)),
        Err(QuadratureError::NotConverged { value, error, evals, subdivisions }) if !failure.is_set() => {
            Err(ForceError::NotConverged {
                partial: Box::new(finish(value, error, evals, inner_evals, inner_rel_err)),
                detail: format!("outer p integral after {subdivisions} subdivisions"),
            })
        }
        Err(e) => Err(failure.resolve(e)),
    }
}
