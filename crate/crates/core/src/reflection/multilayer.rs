//! Layered slabs.
//!
//! The surface impedance is carried from the substrate outward one layer at
//! a time. Inside layer `j` the load impedance is converted to a local
//! reflection `rho`, propagated across the layer as `rho e^{2 i k_j d}`, and
//! converted back. With `Im k_j >= 0` the propagation factor never exceeds
//! one in modulus, so thick absorbing layers cannot overflow.

use num_complex::Complex64;

use super::{fresnel_amplitude, impedance_to_reflection, medium_impedance, perfect_mirror, vacuum_impedance};
use super::{Polarization, ReflectionError, WaveKinematics};
use crate::dielectric::DielectricModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// Thickness, m.
    pub thickness: f64,
    pub medium: DielectricModel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Substrate {
    Medium(DielectricModel),
    PerfectMirror,
}

/// Finite layers, listed from the vacuum side inward, over a substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<Layer>,
    substrate: Substrate,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>, substrate: Substrate) -> Result<Self, ReflectionError> {
        for (index, layer) in layers.iter().enumerate() {
            if !(layer.thickness > 0.0 && layer.thickness.is_finite()) {
                return Err(ReflectionError::InvalidLayer {
                    index,
                    thickness: layer.thickness,
                });
            }
        }
        Ok(Self { layers, substrate })
    }

    pub fn bare(substrate: Substrate) -> Self {
        Self {
            layers: Vec::new(),
            substrate,
        }
    }

    /// Add a layer on the vacuum side.
    pub fn coated(mut self, thickness: f64, medium: DielectricModel) -> Result<Self, ReflectionError> {
        self.layers.insert(0, Layer { thickness, medium });
        Self::new(self.layers, self.substrate)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }
}

/// `layers` holds `(thickness, eps)` from the vacuum side inward; a `None`
/// substrate is a perfect mirror.
pub(super) fn reflect(
    layers: &[(f64, Complex64)],
    substrate: Option<Complex64>,
    pol: Polarization,
    kin: &WaveKinematics,
) -> Result<Complex64, ReflectionError> {
    if layers.is_empty() {
        return match substrate {
            Some(eps) => fresnel_amplitude(eps, pol, kin),
            None => Ok(perfect_mirror(pol)),
        };
    }

    let mut load = match substrate {
        Some(eps) => medium_impedance(eps, pol, kin)?,
        None => Complex64::new(0.0, 0.0),
    };
    let i = Complex64::i();
    for &(thickness, eps) in layers.iter().rev() {
        let k_j = kin.k_in(eps);
        let z_j = medium_impedance(eps, pol, kin)?;
        let rho = impedance_to_reflection(load, z_j)? * (2.0 * i * k_j * thickness).exp();
        let den = 1.0 - rho;
        if den == Complex64::new(0.0, 0.0) {
            return Err(ReflectionError::Pole("layer resonance"));
        }
        load = z_j * (1.0 + rho) / den;
    }
    impedance_to_reflection(load, vacuum_impedance(pol, kin)?)
}
