//! Causal permittivity models.
//!
//! Every model can be evaluated on the positive real frequency axis and on
//! the positive imaginary axis `omega = i xi`. On the imaginary axis the
//! permittivity of a passive medium is real, so [`DielectricModel::at_imaginary`]
//! returns `f64`.

mod table;

pub use table::{load_optical_table, write_optical_table, OpticalTable, TableError};

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::QuadratureError;

#[derive(Debug, Error)]
pub enum DielectricError {
    #[error("frequency {re} + {im}i is neither on the positive real nor the positive imaginary axis")]
    OffAxis { re: f64, im: f64 },

    #[error("zero frequency is a pole of the {model} model")]
    ZeroFrequency { model: &'static str },

    #[error("invalid {model} parameter: {reason}")]
    InvalidParameter { model: &'static str, reason: String },

    #[error("optical table has no real-part column; real-frequency permittivity unavailable")]
    NoRealPart,

    #[error("frequency {omega:e} rad/s outside tabulated range [{min:e}, {max:e}]")]
    OutsideTable { omega: f64, min: f64, max: f64 },

    #[error(transparent)]
    Table(#[from] TableError),

    #[error("Kramers-Kronig integral failed: {0}")]
    Quadrature(#[from] QuadratureError),
}

/// Where a frequency sits in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    /// `omega > 0`, rad/s.
    Real(f64),
    /// `omega = i xi` with `xi > 0`, rad/s.
    Imaginary(f64),
}

impl Frequency {
    /// Classify a complex frequency. Zero is accepted here as `Real(0.0)`;
    /// models with a pole there reject it on evaluation.
    pub fn classify(freq: Complex64) -> Result<Self, DielectricError> {
        let off_axis = || DielectricError::OffAxis {
            re: freq.re,
            im: freq.im,
        };
        if !(freq.re.is_finite() && freq.im.is_finite()) {
            return Err(off_axis());
        }
        match (freq.re, freq.im) {
            (re, im) if im == 0.0 && re >= 0.0 => Ok(Frequency::Real(re)),
            (re, im) if re == 0.0 && im > 0.0 => Ok(Frequency::Imaginary(im)),
            _ => Err(off_axis()),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Frequency::Real(w) => Complex64::new(w, 0.0),
            Frequency::Imaginary(xi) => Complex64::new(0.0, xi),
        }
    }
}

/// A damped harmonic oscillator contribution
/// `strength * w0^2 / (w0^2 - w^2 - i damping w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub resonance: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrudeLorentz {
    pub eps_inf: f64,
    /// Free-carrier plasma frequency; zero for an insulator.
    pub omega_p: f64,
    pub gamma: f64,
    pub oscillators: Vec<Oscillator>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    Vacuum,
    Constant { eps: f64 },
    Plasma { omega_p: f64 },
    Drude { omega_p: f64, gamma: f64 },
    DrudeLorentz(DrudeLorentz),
    Tabulated(Arc<OpticalTable>),
}

fn positive(model: &'static str, name: &str, v: f64) -> Result<(), DielectricError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(DielectricError::InvalidParameter {
            model,
            reason: format!("{name} = {v} must be positive and finite"),
        })
    }
}

fn non_negative(model: &'static str, name: &str, v: f64) -> Result<(), DielectricError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(DielectricError::InvalidParameter {
            model,
            reason: format!("{name} = {v} must be non-negative and finite"),
        })
    }
}

impl DielectricModel {
    pub fn constant(eps: f64) -> Result<Self, DielectricError> {
        positive("constant", "eps", eps)?;
        Ok(Self::Constant { eps })
    }

    pub fn plasma(omega_p: f64) -> Result<Self, DielectricError> {
        positive("plasma", "omega_p", omega_p)?;
        Ok(Self::Plasma { omega_p })
    }

    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self, DielectricError> {
        positive("Drude", "omega_p", omega_p)?;
        non_negative("Drude", "gamma", gamma)?;
        Ok(Self::Drude { omega_p, gamma })
    }

    pub fn drude_lorentz(model: DrudeLorentz) -> Result<Self, DielectricError> {
        let m = Self::DrudeLorentz(model);
        m.validate()?;
        Ok(m)
    }

    pub fn tabulated(table: OpticalTable) -> Self {
        Self::Tabulated(Arc::new(table))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Constant { .. } => "constant",
            Self::Plasma { .. } => "plasma",
            Self::Drude { .. } => "Drude",
            Self::DrudeLorentz(_) => "Drude-Lorentz",
            Self::Tabulated(_) => "tabulated",
        }
    }

    /// Check parameters of a model built without the validating constructors.
    pub fn validate(&self) -> Result<(), DielectricError> {
        match self {
            Self::Vacuum | Self::Tabulated(_) => Ok(()),
            Self::Constant { eps } => positive("constant", "eps", *eps),
            Self::Plasma { omega_p } => positive("plasma", "omega_p", *omega_p),
            Self::Drude { omega_p, gamma } => {
                positive("Drude", "omega_p", *omega_p)?;
                non_negative("Drude", "gamma", *gamma)
            }
            Self::DrudeLorentz(dl) => {
                const M: &str = "Drude-Lorentz";
                positive(M, "eps_inf", dl.eps_inf)?;
                non_negative(M, "omega_p", dl.omega_p)?;
                non_negative(M, "gamma", dl.gamma)?;
                for (j, osc) in dl.oscillators.iter().enumerate() {
                    non_negative(M, &format!("oscillators[{j}].strength"), osc.strength)?;
                    positive(M, &format!("oscillators[{j}].resonance"), osc.resonance)?;
                    non_negative(M, &format!("oscillators[{j}].damping"), osc.damping)?;
                }
                Ok(())
            }
        }
    }

    /// True when the model carries a `1/omega`-type pole at zero frequency.
    fn has_zero_pole(&self) -> bool {
        match self {
            Self::Plasma { .. } | Self::Drude { .. } => true,
            Self::DrudeLorentz(dl) => dl.omega_p > 0.0,
            _ => false,
        }
    }

    /// Permittivity at a complex frequency on the real or imaginary axis.
    pub fn eval(&self, freq: Complex64) -> Result<Complex64, DielectricError> {
        match Frequency::classify(freq)? {
            Frequency::Real(w) => self.at_real(w),
            Frequency::Imaginary(xi) => self.at_imaginary(xi).map(|e| Complex64::new(e, 0.0)),
        }
    }

    /// `eps(omega)` for real `omega >= 0`.
    pub fn at_real(&self, omega: f64) -> Result<Complex64, DielectricError> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(DielectricError::OffAxis { re: omega, im: 0.0 });
        }
        if omega == 0.0 && self.has_zero_pole() {
            return Err(DielectricError::ZeroFrequency { model: self.name() });
        }
        let w = Complex64::new(omega, 0.0);
        let i = Complex64::i();
        Ok(match self {
            Self::Vacuum => Complex64::new(1.0, 0.0),
            Self::Constant { eps } => Complex64::new(*eps, 0.0),
            Self::Plasma { omega_p } => Complex64::new(1.0 - omega_p * omega_p / (omega * omega), 0.0),
            Self::Drude { omega_p, gamma } => 1.0 - omega_p * omega_p / (w * (w + i * *gamma)),
            Self::DrudeLorentz(dl) => {
                let mut eps = Complex64::new(dl.eps_inf, 0.0);
                if dl.omega_p > 0.0 {
                    eps -= dl.omega_p * dl.omega_p / (w * (w + i * dl.gamma));
                }
                for osc in &dl.oscillators {
                    let w0 = osc.resonance;
                    eps += osc.strength * w0 * w0 / (w0 * w0 - w * w - i * osc.damping * w);
                }
                eps
            }
            Self::Tabulated(table) => table.interpolate(omega)?,
        })
    }

    /// `eps(i xi)` for `xi > 0`; real for every shipped model.
    pub fn at_imaginary(&self, xi: f64) -> Result<f64, DielectricError> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(DielectricError::OffAxis { re: 0.0, im: xi });
        }
        if xi == 0.0 && (self.has_zero_pole() || matches!(self, Self::Tabulated(_))) {
            return Err(DielectricError::ZeroFrequency { model: self.name() });
        }
        Ok(match self {
            Self::Vacuum => 1.0,
            Self::Constant { eps } => *eps,
            Self::Plasma { omega_p } => 1.0 + omega_p * omega_p / (xi * xi),
            Self::Drude { omega_p, gamma } => 1.0 + omega_p * omega_p / (xi * (xi + gamma)),
            Self::DrudeLorentz(dl) => {
                let mut eps = dl.eps_inf;
                if dl.omega_p > 0.0 {
                    eps += dl.omega_p * dl.omega_p / (xi * (xi + dl.gamma));
                }
                for osc in &dl.oscillators {
                    let w0 = osc.resonance;
                    eps += osc.strength * w0 * w0 / (w0 * w0 + xi * xi + osc.damping * xi);
                }
                eps
            }
            Self::Tabulated(table) => table.permittivity_at_imaginary(xi)?,
        })
    }
}

/// Free-function form of [`DielectricModel::eval`].
pub fn eval_permittivity(model: &DielectricModel, freq: Complex64) -> Result<Complex64, DielectricError> {
    model.eval(freq)
}

/// Kramers-Kronig continuation of tabulated absorption to `i xi`.
pub fn permittivity_from_table(table: &OpticalTable, xi: f64) -> Result<f64, DielectricError> {
    table.permittivity_at_imaginary(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn imag(xi: f64) -> Complex64 {
        Complex64::new(0.0, xi)
    }

    #[test]
    fn vacuum_is_unity_everywhere() {
        let m = DielectricModel::Vacuum;
        assert_eq!(m.eval(imag(3e15)).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(m.eval(Complex64::new(3e15, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn plasma_at_its_own_frequency() {
        let m = DielectricModel::plasma(1e16).unwrap();
        assert_eq!(m.eval(imag(1e16)).unwrap(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn drude_closed_form() {
        let m = DielectricModel::drude(1e16, 1e14).unwrap();
        let eps = m.eval(imag(1e15)).unwrap();
        let expected = 1.0 + 1e32 / (1e15 * 1.1e15);
        assert!((eps.re - expected).abs() < 1e-12 * expected);
        assert!((eps.re - 91.909_090_909).abs() < 1e-6);
        assert_eq!(eps.im, 0.0);
    }

    #[test]
    fn drude_on_real_axis_is_absorbing() {
        let m = DielectricModel::drude(1e16, 1e14).unwrap();
        let eps = m.at_real(1e15).unwrap();
        assert!(eps.im > 0.0);
        assert!(eps.re < 0.0);
    }

    #[test]
    fn poles_and_off_axis_are_rejected() {
        let d = DielectricModel::drude(1e16, 1e14).unwrap();
        assert!(matches!(
            d.eval(Complex64::new(0.0, 0.0)),
            Err(DielectricError::ZeroFrequency { .. })
        ));
        let p = DielectricModel::plasma(1e16).unwrap();
        assert!(matches!(p.at_imaginary(0.0), Err(DielectricError::ZeroFrequency { .. })));
        assert!(matches!(
            d.eval(Complex64::new(1e15, 1e15)),
            Err(DielectricError::OffAxis { .. })
        ));
        assert!(matches!(
            DielectricModel::Vacuum.eval(Complex64::new(-1.0, 0.0)),
            Err(DielectricError::OffAxis { .. })
        ));
        assert!(matches!(
            DielectricModel::Vacuum.eval(Complex64::new(0.0, -1.0)),
            Err(DielectricError::OffAxis { .. })
        ));
    }

    #[test]
    fn constructors_validate() {
        assert!(DielectricModel::drude(-1.0, 1e14).is_err());
        assert!(DielectricModel::plasma(f64::NAN).is_err());
        assert!(DielectricModel::constant(0.0).is_err());
        let bad = DrudeLorentz {
            eps_inf: 1.0,
            omega_p: 0.0,
            gamma: 0.0,
            oscillators: vec![Oscillator {
                strength: 1.0,
                resonance: 0.0,
                damping: 1e13,
            }],
        };
        assert!(DielectricModel::drude_lorentz(bad).is_err());
    }

    #[test]
    fn drude_lorentz_reduces_to_drude() {
        let dl = DielectricModel::drude_lorentz(DrudeLorentz {
            eps_inf: 1.0,
            omega_p: 1.37e16,
            gamma: 5e13,
            oscillators: vec![],
        })
        .unwrap();
        let d = DielectricModel::drude(1.37e16, 5e13).unwrap();
        for xi in [1e12, 1e14, 1e16] {
            assert_eq!(dl.at_imaginary(xi).unwrap(), d.at_imaginary(xi).unwrap());
        }
        let w = 3e15;
        assert!((dl.at_real(w).unwrap() - d.at_real(w).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn lorentz_oscillator_static_limit() {
        let m = DielectricModel::drude_lorentz(DrudeLorentz {
            eps_inf: 1.5,
            omega_p: 0.0,
            gamma: 0.0,
            oscillators: vec![Oscillator {
                strength: 2.0,
                resonance: 1e16,
                damping: 1e14,
            }],
        })
        .unwrap();
        // xi << resonance: eps -> eps_inf + strength.
        assert!((m.at_imaginary(1e8).unwrap() - 3.5).abs() < 1e-6);
        assert!((m.at_imaginary(1e22).unwrap() - 1.5).abs() < 1e-6);
    }

    fn shipped_models() -> Vec<DielectricModel> {
        vec![
            DielectricModel::Vacuum,
            DielectricModel::constant(2.5).unwrap(),
            DielectricModel::plasma(1.37e16).unwrap(),
            DielectricModel::drude(1.37e16, 5e13).unwrap(),
            DielectricModel::drude_lorentz(DrudeLorentz {
                eps_inf: 1.0,
                omega_p: 9e15,
                gamma: 3e13,
                oscillators: vec![Oscillator {
                    strength: 3.0,
                    resonance: 5e15,
                    damping: 1e14,
                }],
            })
            .unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn imaginary_axis_is_real_and_at_least_one(log_xi in 10.0f64..18.0) {
            let xi = 10f64.powf(log_xi);
            for m in shipped_models() {
                let eps = m.eval(imag(xi)).unwrap();
                prop_assert_eq!(eps.im, 0.0);
                prop_assert!(eps.re >= 1.0, "{} gave {}", m.name(), eps.re);
            }
        }

        #[test]
        fn drude_and_plasma_decrease_along_imaginary_axis(log_xi in 10.0f64..18.0, step in 1.0001f64..10.0) {
            let xi = 10f64.powf(log_xi);
            for m in [DielectricModel::plasma(1.37e16).unwrap(), DielectricModel::drude(1.37e16, 5e13).unwrap()] {
                prop_assert!(m.at_imaginary(xi * step).unwrap() <= m.at_imaginary(xi).unwrap());
            }
        }

        #[test]
        fn drude_approaches_plasma_as_damping_vanishes(log_xi in 10.0f64..18.0, log_gamma in 8.0f64..15.0) {
            let (xi, gamma, wp) = (10f64.powf(log_xi), 10f64.powf(log_gamma), 1.37e16);
            let d = DielectricModel::drude(wp, gamma).unwrap().at_imaginary(xi).unwrap();
            let p = DielectricModel::plasma(wp).unwrap().at_imaginary(xi).unwrap();
            let bound = wp * wp * gamma / (xi * xi * xi);
            prop_assert!((d - p).abs() <= bound * (1.0 + 1e-12) + 4.0 * f64::EPSILON * d.max(p));
        }
    }

    #[test]
    fn transparency_at_high_frequency() {
        for m in shipped_models() {
            let eps = m.at_imaginary(1e24).unwrap();
            if !matches!(m, DielectricModel::Constant { .. }) {
                assert!((eps - 1.0).abs() < 1e-10, "{}", m.name());
            }
        }
    }
}
