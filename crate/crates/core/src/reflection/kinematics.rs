use num_complex::Complex64;

use super::ReflectionError;
use crate::constants::C;
use crate::dielectric::Frequency;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Transverse electric.
    S,
    /// Transverse magnetic.
    P,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::S, Polarization::P];
}

/// Square root on the outgoing branch: `Im >= 0`, and `Re >= 0` on the real line.
pub fn outgoing_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Vacuum wave with parallel wavevector `Q`, vacuum wavenumber `q = omega/c`
/// and normal component `k`, `k^2 = q^2 - Q^2`.
///
/// On the imaginary axis `omega = i xi`, `q = i xi / c` and `k = i kappa` with
/// `kappa = sqrt(Q^2 + xi^2/c^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveKinematics {
    q_par: f64,
    freq: Frequency,
    q: Complex64,
    k: Complex64,
}

impl WaveKinematics {
    pub fn new(q_par: f64, freq: Frequency) -> Result<Self, ReflectionError> {
        if !(q_par >= 0.0 && q_par.is_finite()) {
            return Err(ReflectionError::InvalidWavevector { q_par });
        }
        let (Frequency::Real(magnitude) | Frequency::Imaginary(magnitude)) = freq;
        if !(magnitude > 0.0 && magnitude.is_finite()) {
            return Err(ReflectionError::InvalidFrequency { magnitude });
        }
        let q = freq.to_complex() / C;
        let k = outgoing_sqrt(q * q - q_par * q_par);
        Ok(Self { q_par, freq, q, k })
    }

    pub fn real(q_par: f64, omega: f64) -> Result<Self, ReflectionError> {
        Self::new(q_par, Frequency::Real(omega))
    }

    pub fn imaginary(q_par: f64, xi: f64) -> Result<Self, ReflectionError> {
        Self::new(q_par, Frequency::Imaginary(xi))
    }

    /// Build from a complex frequency, which must lie on the positive real or
    /// positive imaginary axis.
    pub fn from_complex(q_par: f64, freq: Complex64) -> Result<Self, ReflectionError> {
        Self::new(q_par, Frequency::classify(freq)?)
    }

    /// Parallel wavevector `Q`, 1/m.
    pub fn q_par(&self) -> f64 {
        self.q_par
    }

    pub fn freq(&self) -> Frequency {
        self.freq
    }

    /// `q = omega / c`, 1/m.
    pub fn q(&self) -> Complex64 {
        self.q
    }

    /// Normal wavevector component `k`, 1/m.
    pub fn k(&self) -> Complex64 {
        self.k
    }

    /// `kappa = -i k`, defined on the imaginary axis only.
    pub fn kappa(&self) -> Option<f64> {
        match self.freq {
            Frequency::Imaginary(_) => Some(self.k.im),
            Frequency::Real(_) => None,
        }
    }

    /// Normal wavevector inside a medium of permittivity `eps`.
    pub fn k_in(&self, eps: Complex64) -> Complex64 {
        outgoing_sqrt(eps * self.q * self.q - self.q_par * self.q_par)
    }
}
