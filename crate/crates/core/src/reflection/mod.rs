//! Reflection amplitudes of the two slabs bounding the vacuum gap.
//!
//! Everything the force needs to know about a slab is its pair of
//! amplitudes `r^s(Q, omega)`, `r^p(Q, omega)`. They are obtained from
//! surface impedances through `r = (Z - Z0) / (Z + Z0)`, which holds exactly
//! for any `Q`.
//!
//! Sign conventions: `r^s = (k - k_a)/(k + k_a)` and
//! `r^p = (k_a - eps k)/(k_a + eps k)`. With these, a perfect conductor has
//! `r^s = r^p = -1`. Only the products `r1 r2` enter the force, so the
//! global sign of `r^p` is unobservable there.

mod kinematics;
mod multilayer;

pub use kinematics::{outgoing_sqrt, Polarization, WaveKinematics};
pub use multilayer::{Layer, LayerStack, Substrate};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::dielectric::{DielectricError, DielectricModel, Frequency};

#[derive(Debug, Error)]
pub enum ReflectionError {
    #[error(transparent)]
    Dielectric(#[from] DielectricError),

    #[error("frequency magnitude {magnitude} must be positive and finite")]
    InvalidFrequency { magnitude: f64 },

    #[error("parallel wavevector {q_par} must be non-negative and finite")]
    InvalidWavevector { q_par: f64 },

    #[error("grazing incidence (k = 0): vacuum impedance is singular")]
    Grazing,

    #[error("normal wavevector vanishes inside the medium; branch is ambiguous")]
    BranchPoint,

    #[error("reflection pole: {0}")]
    Pole(&'static str),

    #[error("layer {index}: thickness {thickness} must be positive and finite")]
    InvalidLayer { index: usize, thickness: f64 },

    #[error("reflection amplitude {re} + {im}i is not real on the imaginary frequency axis")]
    NotReal { re: f64, im: f64 },

    #[error("impedance model returned a non-finite value")]
    NonFiniteImpedance,
}

/// Vacuum surface impedance: `q/k` for s, `k/q` for p.
pub fn vacuum_impedance(pol: Polarization, kin: &WaveKinematics) -> Result<Complex64, ReflectionError> {
    let k = kin.k();
    if k == Complex64::new(0.0, 0.0) {
        return Err(ReflectionError::Grazing);
    }
    Ok(match pol {
        Polarization::S => kin.q() / k,
        Polarization::P => k / kin.q(),
    })
}

/// Surface impedance of a local, homogeneous, semi-infinite medium:
/// `q/k_a` for s, `k_a/(eps q)` for p.
pub fn medium_impedance(eps: Complex64, pol: Polarization, kin: &WaveKinematics) -> Result<Complex64, ReflectionError> {
    let k_a = kin.k_in(eps);
    if k_a == Complex64::new(0.0, 0.0) {
        return Err(ReflectionError::BranchPoint);
    }
    Ok(match pol {
        Polarization::S => kin.q() / k_a,
        Polarization::P => k_a / (eps * kin.q()),
    })
}

/// `r = (Z - Z0) / (Z + Z0)`. An infinite `Z` is the open-circuit limit `r = 1`.
pub fn impedance_to_reflection(z: Complex64, z0: Complex64) -> Result<Complex64, ReflectionError> {
    if z.is_infinite() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if !z.is_finite() {
        return Err(ReflectionError::NonFiniteImpedance);
    }
    let den = z + z0;
    if den == Complex64::new(0.0, 0.0) {
        return Err(ReflectionError::Pole("Z = -Z0"));
    }
    // Divide through by the larger impedance so huge values cannot overflow.
    if z.norm() > z0.norm() {
        let t = z0 / z;
        Ok((1.0 - t) / (1.0 + t))
    } else {
        Ok((z - z0) / den)
    }
}

/// Fresnel amplitude of a semi-infinite medium with permittivity `eps`.
pub fn fresnel_amplitude(eps: Complex64, pol: Polarization, kin: &WaveKinematics) -> Result<Complex64, ReflectionError> {
    let k = kin.k();
    let k_a = kin.k_in(eps);
    if k_a == Complex64::new(0.0, 0.0) {
        return Err(ReflectionError::BranchPoint);
    }
    let (num, den) = match pol {
        Polarization::S => (k - k_a, k + k_a),
        Polarization::P => (k_a - eps * k, k_a + eps * k),
    };
    if den == Complex64::new(0.0, 0.0) {
        return Err(ReflectionError::Pole("Fresnel denominator vanishes"));
    }
    Ok(num / den)
}

/// Fresnel amplitude of a dielectric model at the kinematics' frequency.
pub fn fresnel(model: &DielectricModel, pol: Polarization, kin: &WaveKinematics) -> Result<Complex64, ReflectionError> {
    let eps = model.eval(kin.freq().to_complex())?;
    fresnel_amplitude(eps, pol, kin)
}

/// The `eps -> infinity` limit of the Fresnel amplitudes.
pub fn perfect_mirror(_pol: Polarization) -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

/// User-supplied surface impedance `Z(pol, kinematics)`.
pub type ImpedanceFn = dyn Fn(Polarization, &WaveKinematics) -> Complex64 + Send + Sync;

#[derive(Clone)]
pub enum ReflectionModel {
    /// Semi-infinite local medium.
    Fresnel(DielectricModel),
    /// Generalized surface impedance; the extension point for non-local or
    /// otherwise non-standard media.
    Impedance(Arc<ImpedanceFn>),
    Multilayer(LayerStack),
    PerfectMirror,
    /// Frequency- and angle-independent amplitudes.
    Constant { s: Complex64, p: Complex64 },
}

impl fmt::Debug for ReflectionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fresnel(m) => f.debug_tuple("Fresnel").field(m).finish(),
            Self::Impedance(_) => f.write_str("Impedance(<fn>)"),
            Self::Multilayer(s) => f.debug_tuple("Multilayer").field(s).finish(),
            Self::PerfectMirror => f.write_str("PerfectMirror"),
            Self::Constant { s, p } => f.debug_struct("Constant").field("s", s).field("p", p).finish(),
        }
    }
}

/// A model with its permittivities evaluated at one frequency.
enum Resolved<'a> {
    Fresnel(Complex64),
    Impedance(&'a ImpedanceFn),
    Multilayer {
        layers: Vec<(f64, Complex64)>,
        substrate: Option<Complex64>,
    },
    PerfectMirror,
    Constant { s: Complex64, p: Complex64 },
}

/// A [`ReflectionModel`] frozen at a single frequency; cheap to evaluate for
/// many parallel wavevectors.
pub struct FrozenReflection<'a> {
    freq: Frequency,
    resolved: Resolved<'a>,
}

impl ReflectionModel {
    pub fn fresnel(model: DielectricModel) -> Self {
        Self::Fresnel(model)
    }

    pub fn constant(s: f64, p: f64) -> Self {
        Self::Constant {
            s: Complex64::new(s, 0.0),
            p: Complex64::new(p, 0.0),
        }
    }

    pub fn impedance<F>(f: F) -> Self
    where
        F: Fn(Polarization, &WaveKinematics) -> Complex64 + Send + Sync + 'static,
    {
        Self::Impedance(Arc::new(f))
    }

    /// True when the amplitude vanishes identically.
    pub fn is_transparent(&self) -> bool {
        match self {
            Self::Constant { s, p } => s.norm() == 0.0 && p.norm() == 0.0,
            Self::Fresnel(DielectricModel::Vacuum) => true,
            _ => false,
        }
    }

    /// Evaluate every permittivity the model needs at `freq`.
    pub fn at(&self, freq: Frequency) -> Result<FrozenReflection<'_>, ReflectionError> {
        let eps = |m: &DielectricModel| m.eval(freq.to_complex());
        let resolved = match self {
            Self::Fresnel(m) => Resolved::Fresnel(eps(m)?),
            Self::Impedance(f) => Resolved::Impedance(f.as_ref()),
            Self::Multilayer(stack) => Resolved::Multilayer {
                layers: stack
                    .layers()
                    .iter()
                    .map(|l| Ok((l.thickness, eps(&l.medium)?)))
                    .collect::<Result<_, DielectricError>>()?,
                substrate: match stack.substrate() {
                    Substrate::Medium(m) => Some(eps(m)?),
                    Substrate::PerfectMirror => None,
                },
            },
            Self::PerfectMirror => Resolved::PerfectMirror,
            Self::Constant { s, p } => Resolved::Constant { s: *s, p: *p },
        };
        Ok(FrozenReflection { freq, resolved })
    }

    pub fn at_imaginary(&self, xi: f64) -> Result<FrozenReflection<'_>, ReflectionError> {
        self.at(Frequency::Imaginary(xi))
    }

    pub fn reflect(&self, pol: Polarization, kin: &WaveKinematics) -> Result<Complex64, ReflectionError> {
        self.at(kin.freq())?.reflect_kin(pol, kin)
    }
}

impl FrozenReflection<'_> {
    pub fn freq(&self) -> Frequency {
        self.freq
    }

    pub fn reflect(&self, pol: Polarization, q_par: f64) -> Result<Complex64, ReflectionError> {
        let kin = WaveKinematics::new(q_par, self.freq)?;
        self.reflect_kin(pol, &kin)
    }

    /// `kin` must be at the frozen frequency.
    pub fn reflect_kin(&self, pol: Polarization, kin: &WaveKinematics) -> Result<Complex64, ReflectionError> {
        debug_assert_eq!(kin.freq(), self.freq);
        match &self.resolved {
            Resolved::Fresnel(eps) => fresnel_amplitude(*eps, pol, kin),
            Resolved::Impedance(f) => impedance_to_reflection(f(pol, kin), vacuum_impedance(pol, kin)?),
            Resolved::Multilayer { layers, substrate } => multilayer::reflect(layers, *substrate, pol, kin),
            Resolved::PerfectMirror => Ok(perfect_mirror(pol)),
            Resolved::Constant { s, p } => Ok(match pol {
                Polarization::S => *s,
                Polarization::P => *p,
            }),
        }
    }

    /// Real amplitude on the imaginary axis. Rejects a model whose amplitude
    /// has a non-negligible imaginary part there.
    pub fn reflect_real(&self, pol: Polarization, q_par: f64) -> Result<f64, ReflectionError> {
        let r = self.reflect(pol, q_par)?;
        if r.im.abs() > 1e-12 * r.re.abs().max(1.0) || !r.re.is_finite() {
            return Err(ReflectionError::NotReal { re: r.re, im: r.im });
        }
        Ok(r.re)
    }
}

/// Reflection amplitude of a layer stack seen from vacuum.
pub fn multilayer_reflection(stack: &LayerStack, pol: Polarization, kin: &WaveKinematics) -> Result<Complex64, ReflectionError> {
    ReflectionModel::Multilayer(stack.clone()).reflect(pol, kin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::C;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normal_incidence_vacuum_impedance_is_one() {
        let kin = WaveKinematics::real(0.0, 1e15).unwrap();
        assert!((vacuum_impedance(Polarization::S, &kin).unwrap() - 1.0).norm() < 1e-15);
        assert!((vacuum_impedance(Polarization::P, &kin).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn grazing_is_an_error() {
        let omega = 1e15;
        let kin = WaveKinematics::real(omega / C, omega).unwrap();
        assert_eq!(kin.k(), c(0.0, 0.0));
        assert!(matches!(vacuum_impedance(Polarization::S, &kin), Err(ReflectionError::Grazing)));
    }

    #[test]
    fn vacuum_impedance_on_imaginary_axis() {
        // q = i xi/c, k = i kappa: Z0^s = q/k = (xi/c)/kappa, Z0^p = kappa/(xi/c).
        let (q_par, xi) = (4e6, 1.5e15);
        let kin = WaveKinematics::imaginary(q_par, xi).unwrap();
        let kappa = (q_par * q_par + (xi / C).powi(2)).sqrt();
        let zs = vacuum_impedance(Polarization::S, &kin).unwrap();
        let zp = vacuum_impedance(Polarization::P, &kin).unwrap();
        // Independent complex-arithmetic check.
        let expected_s = c(0.0, xi / C) / c(0.0, kappa);
        assert!((zs - expected_s).norm() < 1e-15);
        assert!((zs.re - xi / C / kappa).abs() < 1e-15);
        assert_eq!(zs.im, 0.0);
        assert!((zp.re - kappa * C / xi).abs() < 1e-14 * zp.re);
    }

    #[test]
    fn impedance_limits() {
        let z0 = c(0.7, 0.2);
        assert_eq!(impedance_to_reflection(z0, z0).unwrap(), c(0.0, 0.0));
        assert_eq!(impedance_to_reflection(c(0.0, 0.0), z0).unwrap(), c(-1.0, 0.0));
        assert_eq!(impedance_to_reflection(c(f64::INFINITY, 0.0), z0).unwrap(), c(1.0, 0.0));
        let big = impedance_to_reflection(c(1e300, 0.0), z0).unwrap();
        assert!((big - 1.0).norm() < 1e-12);
        assert!(matches!(impedance_to_reflection(-z0, z0), Err(ReflectionError::Pole(_))));
    }

    #[test]
    fn unit_permittivity_does_not_reflect() {
        for (q, w) in [(0.0, 1e15), (2e6, 1e15), (1e8, 1e15)] {
            let kin = WaveKinematics::real(q, w).unwrap();
            for pol in Polarization::BOTH {
                assert_eq!(fresnel_amplitude(c(1.0, 0.0), pol, &kin).unwrap().norm(), 0.0);
            }
        }
    }

    #[test]
    fn normal_incidence_eps_four() {
        let kin = WaveKinematics::real(0.0, 1e15).unwrap();
        let eps = c(4.0, 0.0);
        for pol in Polarization::BOTH {
            let r = fresnel_amplitude(eps, pol, &kin).unwrap();
            assert!((r - c(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn large_eps_approaches_perfect_mirror() {
        let kin = WaveKinematics::real(0.0, 1e15).unwrap();
        for pol in Polarization::BOTH {
            let r = fresnel_amplitude(c(1e8, 0.0), pol, &kin).unwrap();
            assert!((r - perfect_mirror(pol)).norm() < 1e-3);
        }
        assert_eq!(perfect_mirror(Polarization::S) * perfect_mirror(Polarization::S), c(1.0, 0.0));
        assert_eq!(perfect_mirror(Polarization::P) * perfect_mirror(Polarization::P), c(1.0, 0.0));
    }

    #[test]
    fn impedance_model_reproduces_fresnel() {
        let eps = c(3.0, 0.5);
        let model = ReflectionModel::impedance(move |pol, kin: &WaveKinematics| medium_impedance(eps, pol, kin).unwrap());
        let kin = WaveKinematics::real(5e6, 2e15).unwrap();
        for pol in Polarization::BOTH {
            let a = model.reflect(pol, &kin).unwrap();
            let b = fresnel_amplitude(eps, pol, &kin).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn real_on_imaginary_axis_check() {
        let bad = ReflectionModel::Constant {
            s: c(0.5, 0.1),
            p: c(0.5, 0.0),
        };
        let frozen = bad.at_imaginary(1e15).unwrap();
        assert!(frozen.reflect_real(Polarization::P, 1e6).is_ok());
        assert!(matches!(
            frozen.reflect_real(Polarization::S, 1e6),
            Err(ReflectionError::NotReal { .. })
        ));
    }

    fn gold_like() -> DielectricModel {
        DielectricModel::drude(1.37e16, 5e13).unwrap()
    }

    proptest! {
        #[test]
        fn drude_real_and_passive_on_imaginary_axis(log_xi in 11.0f64..18.0, log_q in 3.0f64..10.0) {
            let kin = WaveKinematics::imaginary(10f64.powf(log_q), 10f64.powf(log_xi)).unwrap();
            for pol in Polarization::BOTH {
                let r = fresnel(&gold_like(), pol, &kin).unwrap();
                prop_assert_eq!(r.im, 0.0);
                prop_assert!(r.re.abs() < 1.0);
            }
        }

        #[test]
        fn drude_passive_for_propagating_waves(log_w in 12.0f64..17.5, frac in 0.0f64..0.999) {
            let w = 10f64.powf(log_w);
            let kin = WaveKinematics::real(frac * w / C, w).unwrap();
            for pol in Polarization::BOTH {
                let r = fresnel(&gold_like(), pol, &kin).unwrap();
                prop_assert!(r.norm() <= 1.0 + 1e-12);
            }
        }
    }
}
