//! Field modes and density of states inside the vacuum gap `0 < z < L`.
//!
//! For a fixed parallel wavevector the s-polarized field obeys a 1D wave
//! equation with normal wavenumber `k`. The two mode functions
//!
//! ```text
//! E<(z) = e^{-ikz} + r1 e^{ikz}            (satisfies the z = 0 wall)
//! E>(z) = e^{ik(z-L)} + r2 e^{-ik(z-L)}    (satisfies the z = L wall)
//! ```
//!
//! build the Green's function `G(z, z') = E<(z_<) E>(z_>) / W`. The magnetic
//! analogue follows from `r_a -> -r_a`. Summing both and taking `-Im / 2 pi`
//! gives a density of states per unit `k^2` that does not depend on `z`:
//!
//! ```text
//! rho = Re[(1 + r1 r2 e^{2ikL}) / (1 - r1 r2 e^{2ikL})] / (2 pi k)
//! ```
//!
//! `k` is evaluated as `k + i eta`; `eta -> 0+` is the physical limit, a small
//! positive `eta` broadens the cavity resonances into finite peaks.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::reflection::Polarization;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("wavenumber k = {0} must be positive and finite")]
    InvalidWavenumber(f64),

    #[error("broadening eta = {0} must be non-negative and finite")]
    InvalidBroadening(f64),

    #[error("gap width L = {0} must be positive and finite")]
    InvalidGap(f64),

    #[error("position z = {z} outside the gap [0, {gap}]")]
    OutsideGap { z: f64, gap: f64 },

    #[error("cavity resonance at k = {k}: the mode Wronskian vanishes; use eta > 0")]
    Resonance { k: f64 },
}

/// Broadening used when none is given: `1e-6 max(k, pi/L)`.
pub fn default_broadening(k: f64, gap: f64) -> f64 {
    1e-6 * k.max(PI / gap)
}

/// The pair of wall-adapted solutions for one polarization channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFunctions {
    k: Complex64,
    r1: Complex64,
    r2: Complex64,
    gap: f64,
}

impl ModeFunctions {
    pub fn new(k: f64, eta: f64, r1: Complex64, r2: Complex64, gap: f64) -> Result<Self, SpectrumError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(SpectrumError::InvalidWavenumber(k));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(SpectrumError::InvalidBroadening(eta));
        }
        if !(gap > 0.0 && gap.is_finite()) {
            return Err(SpectrumError::InvalidGap(gap));
        }
        Ok(Self {
            k: Complex64::new(k, eta),
            r1,
            r2,
            gap,
        })
    }

    /// Same cavity for the magnetic field: reflection amplitudes change sign.
    pub fn magnetic(&self) -> Self {
        Self {
            r1: -self.r1,
            r2: -self.r2,
            ..*self
        }
    }

    /// Broadened wavenumber `k + i eta`.
    pub fn wavenumber(&self) -> Complex64 {
        self.k
    }

    fn phase(&self, z: f64) -> Complex64 {
        (Complex64::i() * self.k * z).exp()
    }

    pub fn lower(&self, z: f64) -> Complex64 {
        let e = self.phase(z);
        1.0 / e + self.r1 * e
    }

    pub fn lower_derivative(&self, z: f64) -> Complex64 {
        let e = self.phase(z);
        Complex64::i() * self.k * (self.r1 * e - 1.0 / e)
    }

    pub fn upper(&self, z: f64) -> Complex64 {
        let e = self.phase(z - self.gap);
        e + self.r2 / e
    }

    pub fn upper_derivative(&self, z: f64) -> Complex64 {
        let e = self.phase(z - self.gap);
        Complex64::i() * self.k * (e - self.r2 / e)
    }

    /// `E< E>' - E<' E>` evaluated at `z`.
    pub fn wronskian_at(&self, z: f64) -> Complex64 {
        self.lower(z) * self.upper_derivative(z) - self.lower_derivative(z) * self.upper(z)
    }

    /// Closed form `2ik (e^{-ikL} - r1 r2 e^{ikL})`.
    pub fn wronskian(&self) -> Complex64 {
        let e = self.phase(self.gap);
        2.0 * Complex64::i() * self.k * (1.0 / e - self.r1 * self.r2 * e)
    }

    pub fn green(&self, z: f64, z_prime: f64) -> Result<Complex64, SpectrumError> {
        for p in [z, z_prime] {
            if !(0.0..=self.gap).contains(&p) {
                return Err(SpectrumError::OutsideGap { z: p, gap: self.gap });
            }
        }
        let w = self.wronskian();
        if w.norm() <= 1e-12 * 2.0 * self.k.norm() {
            return Err(SpectrumError::Resonance { k: self.k.re });
        }
        let (lo, hi) = if z <= z_prime { (z, z_prime) } else { (z_prime, z) };
        Ok(self.lower(lo) * self.upper(hi) / w)
    }
}

/// Electric Green's function `G^E_{k^2}(z, z')`.
pub fn green_electric(
    z: f64,
    z_prime: f64,
    k: f64,
    r1: Complex64,
    r2: Complex64,
    gap: f64,
    eta: f64,
) -> Result<Complex64, SpectrumError> {
    ModeFunctions::new(k, eta, r1, r2, gap)?.green(z, z_prime)
}

/// Magnetic Green's function: the electric one with `r_a -> -r_a`.
pub fn green_magnetic(
    z: f64,
    z_prime: f64,
    k: f64,
    r1: Complex64,
    r2: Complex64,
    gap: f64,
    eta: f64,
) -> Result<Complex64, SpectrumError> {
    ModeFunctions::new(k, eta, r1, r2, gap)?.magnetic().green(z, z_prime)
}

/// Density of states per unit `k^2` for one polarization, with that
/// polarization's amplitudes `r1`, `r2`. The `1/k` prefactor is taken at
/// `eta = 0`; the bracket uses `k + i eta`.
pub fn dos(_pol: Polarization, k: f64, r1: Complex64, r2: Complex64, gap: f64, eta: f64) -> Result<f64, SpectrumError> {
    let modes = ModeFunctions::new(k, eta, r1, r2, gap)?;
    let x = r1 * r2 * modes.phase(2.0 * gap);
    let den = 1.0 - x;
    if den.norm() <= 1e-12 {
        return Err(SpectrumError::Resonance { k });
    }
    Ok(((1.0 + x) / den).re / (2.0 * PI * k))
}

/// Sum of both polarizations.
pub fn total_dos(
    k: f64,
    (r1s, r2s): (Complex64, Complex64),
    (r1p, r2p): (Complex64, Complex64),
    gap: f64,
    eta: f64,
) -> Result<f64, SpectrumError> {
    Ok(dos(Polarization::S, k, r1s, r2s, gap, eta)? + dos(Polarization::P, k, r1p, r2p, gap, eta)?)
}

/// Local density of states assembled from the Green's functions,
/// `-Im(G^E(z,z) + G^B(z,z)) / 2 pi`. Equals [`dos`] for `eta = 0`.
pub fn local_dos(z: f64, k: f64, r1: Complex64, r2: Complex64, gap: f64, eta: f64) -> Result<f64, SpectrumError> {
    let modes = ModeFunctions::new(k, eta, r1, r2, gap)?;
    let sum = modes.green(z, z)? + modes.magnetic().green(z, z)?;
    Ok(-sum.im / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const L: f64 = 1e-6;

    #[test]
    fn free_space_green_function() {
        let k = 3.7e6;
        for z in [0.0, 0.2 * L, 0.5 * L, L] {
            let g = green_electric(z, z, k, c(0.0, 0.0), c(0.0, 0.0), L, 0.0).unwrap();
            assert!((g.im + 1.0 / (2.0 * k)).abs() < 1e-12 / k);
        }
        let (z, zp) = (0.1 * L, 0.7 * L);
        let g = green_electric(z, zp, k, c(0.0, 0.0), c(0.0, 0.0), L, 0.0).unwrap();
        let oracle = (Complex64::i() * k * (zp - z)).exp() / (2.0 * Complex64::i() * k);
        assert!((g - oracle).norm() < 1e-12 * oracle.norm());
    }

    #[test]
    fn wronskian_is_position_independent() {
        let m = ModeFunctions::new(4.1e6, 1e-3, c(-0.6, 0.2), c(0.3, -0.5), L).unwrap();
        let w = m.wronskian();
        for z in [0.0, 0.13 * L, 0.77 * L, L] {
            assert!((m.wronskian_at(z) - w).norm() <= 1e-12 * w.norm());
        }
    }

    #[test]
    fn boundary_conditions_by_finite_differences() {
        // q is arbitrary here: the wall impedances are defined from r and q/k.
        let (k, q) = (4.1e6, 5.0e6);
        let (r1, r2) = (c(-0.6, 0.2), c(0.3, -0.5));
        let m = ModeFunctions::new(k, 0.0, r1, r2, L).unwrap();
        let z0 = c(q / k, 0.0);
        let z1 = z0 * (1.0 + r1) / (1.0 - r1);
        let z2 = z0 * (1.0 + r2) / (1.0 - r2);
        let h = 1e-4 / k;
        let d = |f: &dyn Fn(f64) -> Complex64, z: f64| (f(z + h) - f(z - h)) / (2.0 * h);
        let lower = |z| m.lower(z);
        let upper = |z| m.upper(z);
        let lhs = Complex64::i() * q * m.lower(0.0);
        let rhs = -z1 * d(&lower, 0.0);
        assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm());
        let lhs = Complex64::i() * q * m.upper(L);
        let rhs = z2 * d(&upper, L);
        assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm());
    }

    #[test]
    fn mirror_symmetry_about_midplane() {
        let r = c(-0.7, 0.1);
        let (k, z, zp) = (2.3e6, 0.15 * L, 0.6 * L);
        let a = green_electric(z, zp, k, r, r, L, 0.0).unwrap();
        let b = green_electric(L - z, L - zp, k, r, r, L, 0.0).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn magnetic_equals_electric_without_walls() {
        let z0 = c(0.0, 0.0);
        let (k, z, zp) = (2.3e6, 0.15 * L, 0.6 * L);
        assert_eq!(
            green_electric(z, zp, k, z0, z0, L, 0.0).unwrap(),
            green_magnetic(z, zp, k, z0, z0, L, 0.0).unwrap()
        );
    }

    #[test]
    fn perfect_mirror_nodes_and_antinodes() {
        // kL = 0.9 pi: E has a node at the wall and peaks mid-gap, while B
        // peaks at the wall. Scan the lower half of the symmetric cavity.
        let k = 0.9 * PI / L;
        let r = c(-1.0, 0.0);
        let eta = 1e-4 * PI / L;
        let zs: Vec<f64> = (0..=100).map(|i| L * i as f64 / 200.0).collect();
        let ge: Vec<f64> = zs
            .iter()
            .map(|&z| green_electric(z, z, k, r, r, L, eta).unwrap().norm())
            .collect();
        let gb: Vec<f64> = zs
            .iter()
            .map(|&z| green_magnetic(z, z, k, r, r, L, eta).unwrap().norm())
            .collect();
        let argmax = |v: &[f64]| (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
        let argmin = |v: &[f64]| (0..v.len()).fold(0, |b, i| if v[i] < v[b] { i } else { b });
        assert_eq!(argmin(&ge), 0);
        assert_eq!(argmax(&gb), 0);
        assert_eq!(argmax(&ge), 100);
    }

    #[test]
    fn resonance_without_broadening() {
        let r = c(-1.0, 0.0);
        let k = PI / L;
        assert!(matches!(
            green_electric(0.3 * L, 0.3 * L, k, r, r, L, 0.0),
            Err(SpectrumError::Resonance { .. })
        ));
        assert!(matches!(dos(Polarization::S, k, r, r, L, 0.0), Err(SpectrumError::Resonance { .. })));
    }

    #[test]
    fn dos_without_walls_is_free() {
        let k = 1.234e6;
        let z0 = c(0.0, 0.0);
        assert_eq!(dos(Polarization::S, k, z0, z0, L, default_broadening(k, L)).unwrap(), 1.0 / (2.0 * PI * k));
    }

    #[test]
    fn green_assembly_matches_closed_form() {
        let (r1, r2) = (c(-0.8, 0.3), c(0.5, 0.4));
        let k = 2.9e6;
        let rho = dos(Polarization::S, k, r1, r2, L, 0.0).unwrap();
        for i in 0..10 {
            let z = L * (0.05 + 0.09 * i as f64);
            let local = local_dos(z, k, r1, r2, L, 0.0).unwrap();
            assert!((local - rho).abs() <= 1e-10 * rho.abs(), "{local} vs {rho}");
        }
    }

    #[test]
    fn invalid_arguments() {
        let z0 = c(0.0, 0.0);
        assert!(green_electric(-0.1 * L, 0.0, 1e6, z0, z0, L, 0.0).is_err());
        assert!(green_electric(0.0, 0.0, -1e6, z0, z0, L, 0.0).is_err());
        assert!(green_electric(0.0, 0.0, 1e6, z0, z0, -L, 0.0).is_err());
        assert!(dos(Polarization::P, 1e6, z0, z0, L, -1.0).is_err());
    }

    fn unit_disk() -> impl Strategy<Value = Complex64> {
        (0.0f64..=1.0, 0.0f64..(2.0 * PI)).prop_map(|(m, a)| Complex64::from_polar(m, a))
    }

    proptest! {
        #[test]
        fn green_is_reciprocal(r1 in unit_disk(), r2 in unit_disk(), a in 0.0f64..1.0, b in 0.0f64..1.0, kl in 0.1f64..30.0) {
            let k = kl / L;
            let eta = default_broadening(k, L);
            for f in [green_electric, green_magnetic] {
                let g1 = f(a * L, b * L, k, r1, r2, L, eta).unwrap();
                let g2 = f(b * L, a * L, k, r1, r2, L, eta).unwrap();
                prop_assert_eq!(g1, g2);
            }
        }

        #[test]
        fn passive_walls_give_non_negative_dos(r1 in unit_disk(), r2 in unit_disk(), kl in 0.01f64..50.0) {
            let k = kl / L;
            let rho = dos(Polarization::S, k, r1, r2, L, default_broadening(k, L)).unwrap();
            prop_assert!(rho >= 0.0);
        }

        #[test]
        fn weak_walls_approach_free_dos(scale in 0.0f64..1e-6, r1 in unit_disk(), r2 in unit_disk(), kl in 0.01f64..50.0) {
            let k = kl / L;
            let rho = dos(Polarization::P, k, r1 * scale, r2 * scale, L, 0.0).unwrap();
            let free = 1.0 / (2.0 * PI * k);
            prop_assert!((rho - free).abs() <= 3e-12 * free);
        }
    }
}
