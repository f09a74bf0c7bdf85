use std::io::Write;

use casimir_core::constants::C;
use casimir_core::dielectric::Frequency;
use casimir_core::reflection::ReflectionError;
use casimir_core::spectrum::{default_broadening, dos, SpectrumError};
use casimir_core::{Polarization, ReflectionModel};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::DosConfig;

#[derive(Debug, Error)]
pub enum DosError {
    #[error(transparent)]
    Reflection(#[from] ReflectionError),

    #[error(transparent)]
    Spectrum(#[from] SpectrumError),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DosRow {
    pub k: f64,
    pub s: f64,
    pub p: f64,
}

impl DosRow {
    pub fn total(&self) -> f64 {
        self.s + self.p
    }
}

fn point(r1: &ReflectionModel, r2: &ReflectionModel, cfg: &DosConfig, k: f64) -> Result<DosRow, DosError> {
    let omega = C * k.hypot(cfg.q_par);
    let f1 = r1.at(Frequency::Real(omega))?;
    let f2 = r2.at(Frequency::Real(omega))?;
    let eta = cfg.eta.unwrap_or_else(|| default_broadening(k, cfg.separation));
    let channel = |pol| -> Result<f64, DosError> {
        let (a, b) = (f1.reflect(pol, cfg.q_par)?, f2.reflect(pol, cfg.q_par)?);
        Ok(dos(pol, k, a, b, cfg.separation, eta)?)
    };
    Ok(DosRow {
        k,
        s: channel(Polarization::S)?,
        p: channel(Polarization::P)?,
    })
}

/// Density of states per unit `k^2` on a uniform `k` grid at fixed `Q`.
pub fn dos_scan(r1: &ReflectionModel, r2: &ReflectionModel, cfg: &DosConfig) -> Result<Vec<DosRow>, DosError> {
    let n = cfg.points - 1;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let k = if i == n {
                cfg.k_max
            } else {
                cfg.k_min + (cfg.k_max - cfg.k_min) * i as f64 / n as f64
            };
            point(r1, r2, cfg, k)
        })
        .collect()
}

pub fn write_dos_csv<W: Write>(rows: &[DosRow], out: W) -> Result<(), DosError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k_per_m", "dos_s", "dos_p", "dos_total"])?;
    for r in rows {
        w.write_record([r.k, r.s, r.p, r.total()].map(|x| format!("{x:.16e}")))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
