//! Zero-temperature Casimir pressure between planar slabs.
//!
//! Each slab enters only through its reflection amplitudes `r^s`, `r^p`
//! (see [`reflection`]). The pressure is computed on the imaginary frequency
//! axis ([`force::force_imag_axis`]), with the real-frequency contour
//! ([`force::force_real_axis`]), the classical Lifshitz integral over
//! permittivities ([`force::lifshitz_force`]) and the ideal-mirror closed
//! form ([`force::ideal_casimir_pressure`]) available as cross-checks.
//!
//! All quantities are SI: rad/s, 1/m, m, Pa.

pub mod constants;
pub mod dielectric;
pub mod force;
pub mod quadrature;
pub mod reflection;
pub mod spectrum;

pub use dielectric::{DielectricModel, OpticalTable};
pub use force::{ForceError, ForceResult, PathTag};
pub use quadrature::QuadratureConfig;
pub use reflection::{LayerStack, Polarization, ReflectionModel, WaveKinematics};
