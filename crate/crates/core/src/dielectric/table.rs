//! Tabulated optical data and its continuation to imaginary frequency.
//!
//! File format: UTF-8 text, one sample per line, whitespace-separated
//! columns `omega [rad/s]  Im eps  [Re eps]`. Blank lines and lines whose
//! first non-blank character is `#` are ignored.
//!
//! Outside the tabulated range the absorption is extrapolated:
//! below the grid by a Drude profile `A / (w (w^2 + g^2))` fitted to the two
//! lowest samples (or `I_0 w_0 / w` when that fit is not admissible), above
//! the grid by `I_n (w_n / w)^3`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use thiserror::Error;

use super::DielectricError;
use crate::quadrature::{integrate, integrate_semi_infinite_scaled, QuadratureConfig};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read optical table {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: cannot parse '{token}' as a number")]
    Parse { line: usize, token: String },

    #[error("line {line}: expected 2 or 3 columns, found {found}")]
    ColumnCount { line: usize, found: usize },

    #[error("line {line}: all rows must have the same number of columns")]
    MixedColumns { line: usize },

    #[error("line {line}: value {value} is not finite")]
    NonFinite { line: usize, value: f64 },

    #[error("line {line}: frequency {omega:e} is not above the previous one; the grid must be strictly increasing")]
    NonMonotonic { line: usize, omega: f64 },

    #[error("line {line}: frequency {omega:e} must be positive")]
    NonPositiveFrequency { line: usize, omega: f64 },

    #[error("line {line}: Im eps = {value:e} is negative (the medium would amplify)")]
    NegativeAbsorption { line: usize, value: f64 },

    #[error("optical table needs at least 2 samples, found {rows}")]
    InsufficientData { rows: usize },

    #[error("column lengths differ: {omega} frequencies, {values} values")]
    LengthMismatch { omega: usize, values: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LowTail {
    /// `Im eps = amplitude / (w (w^2 + gamma_sq))`.
    Drude { amplitude: f64, gamma_sq: f64 },
    /// `Im eps = weight / w`.
    Conductive { weight: f64 },
}

/// Absorption spectrum on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    omega: Vec<f64>,
    im_eps: Vec<f64>,
    re_eps: Option<Vec<f64>>,
    low_tail: LowTail,
}

/// Rows are reported 1-based; for files this is the line number.
fn check_rows(
    omega: &[f64],
    im_eps: &[f64],
    re_eps: Option<&[f64]>,
    line_of: impl Fn(usize) -> usize,
) -> Result<(), TableError> {
    if im_eps.len() != omega.len() {
        return Err(TableError::LengthMismatch {
            omega: omega.len(),
            values: im_eps.len(),
        });
    }
    if let Some(re) = re_eps {
        if re.len() != omega.len() {
            return Err(TableError::LengthMismatch {
                omega: omega.len(),
                values: re.len(),
            });
        }
    }
    for (i, (&w, &im)) in omega.iter().zip(im_eps).enumerate() {
        let line = line_of(i);
        for v in [Some(w), Some(im), re_eps.map(|r| r[i])].into_iter().flatten() {
            if !v.is_finite() {
                return Err(TableError::NonFinite { line, value: v });
            }
        }
        if w <= 0.0 {
            return Err(TableError::NonPositiveFrequency { line, omega: w });
        }
        if i > 0 && w <= omega[i - 1] {
            return Err(TableError::NonMonotonic { line, omega: w });
        }
        if im < 0.0 {
            return Err(TableError::NegativeAbsorption { line, value: im });
        }
    }
    if omega.len() < 2 {
        return Err(TableError::InsufficientData { rows: omega.len() });
    }
    Ok(())
}

fn fit_low_tail(w1: f64, i1: f64, w2: f64, i2: f64) -> LowTail {
    // w Im eps = A / (w^2 + g^2) through both points.
    let (y1, y2) = (w1 * i1, w2 * i2);
    if y1 > 0.0 && y2 > 0.0 {
        let ratio = y1 / y2;
        let gamma_sq = (w2 * w2 - ratio * w1 * w1) / (ratio - 1.0);
        if ratio > 1.0 && gamma_sq > 0.0 && gamma_sq.is_finite() {
            return LowTail::Drude {
                amplitude: y1 * (w1 * w1 + gamma_sq),
                gamma_sq,
            };
        }
    }
    LowTail::Conductive { weight: y1 }
}

impl OpticalTable {
    pub fn new(omega: Vec<f64>, im_eps: Vec<f64>, re_eps: Option<Vec<f64>>) -> Result<Self, TableError> {
        check_rows(&omega, &im_eps, re_eps.as_deref(), |i| i + 1)?;
        let low_tail = fit_low_tail(omega[0], im_eps[0], omega[1], im_eps[1]);
        Ok(Self {
            omega,
            im_eps,
            re_eps,
            low_tail,
        })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn im_eps(&self) -> &[f64] {
        &self.im_eps
    }

    pub fn re_eps(&self) -> Option<&[f64]> {
        self.re_eps.as_deref()
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    /// Linear interpolation of the tabulated `eps(omega)`; needs the real-part column.
    pub fn interpolate(&self, omega: f64) -> Result<Complex64, DielectricError> {
        let re = self.re_eps.as_ref().ok_or(DielectricError::NoRealPart)?;
        let (min, max) = self.range();
        if !(omega >= min && omega <= max) {
            return Err(DielectricError::OutsideTable { omega, min, max });
        }
        let j = self.omega.partition_point(|&w| w <= omega).clamp(1, self.omega.len() - 1);
        let (w0, w1) = (self.omega[j - 1], self.omega[j]);
        let t = (omega - w0) / (w1 - w0);
        let lerp = |v: &[f64]| v[j - 1] + t * (v[j] - v[j - 1]);
        Ok(Complex64::new(lerp(re), lerp(&self.im_eps)))
    }

    fn low_tail_absorption(&self, omega: f64) -> f64 {
        match self.low_tail {
            LowTail::Drude { amplitude, gamma_sq } => amplitude / (omega * (omega * omega + gamma_sq)),
            LowTail::Conductive { weight } => weight / omega,
        }
    }

    /// `eps(i xi) = 1 + (2/pi) int_0^inf w Im eps(w) / (w^2 + xi^2) dw`.
    pub fn permittivity_at_imaginary(&self, xi: f64) -> Result<f64, DielectricError> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(DielectricError::OffAxis { re: 0.0, im: xi });
        }
        let cfg = QuadratureConfig::default().with_rel_tol(1e-10);
        let xi2 = xi * xi;
        let kernel = |w: f64, im: f64| w * im / (w * w + xi2);

        let (w_min, w_max) = self.range();
        let mut total = 0.0;

        // Below the grid; w Im eps stays finite as w -> 0 for both tail forms.
        total += integrate(|w| kernel(w, self.low_tail_absorption(w)), 0.0, w_min, &cfg)?.value;

        for (w, im) in self.omega.windows(2).zip(self.im_eps.windows(2)) {
            if im[0] == 0.0 && im[1] == 0.0 {
                continue;
            }
            let slope = (im[1] - im[0]) / (w[1] - w[0]);
            let segment = |x: f64| kernel(x, im[0] + slope * (x - w[0]));
            total += integrate(segment, w[0], w[1], &cfg)?.value;
        }

        let i_last = self.im_eps[self.im_eps.len() - 1];
        if i_last > 0.0 {
            // u = (w - w_max) / (w - w_max + w_max + xi) maps the tail onto [0, 1).
            let tail = |w: f64| kernel(w, i_last * (w_max / w).powi(3));
            total += integrate_semi_infinite_scaled(tail, w_max, w_max + xi, &cfg)?.value;
        }

        Ok(1.0 + 2.0 / std::f64::consts::PI * total)
    }

    /// Serialize in the file format read by [`load_optical_table`]. Values are
    /// written in shortest round-trip form, so a reload is bit-exact.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.re_eps {
            Some(_) => out.push_str("# omega_rad_per_s  im_eps  re_eps\n"),
            None => out.push_str("# omega_rad_per_s  im_eps\n"),
        }
        for i in 0..self.omega.len() {
            write!(out, "{:e} {:e}", self.omega[i], self.im_eps[i]).unwrap();
            if let Some(re) = &self.re_eps {
                write!(out, " {:e}", re[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Parse an optical table from text; `lines` are numbered from 1.
pub fn parse_optical_table(text: &str) -> Result<OpticalTable, TableError> {
    let mut omega = Vec::new();
    let mut im = Vec::new();
    let mut re = Vec::new();
    let mut lines = Vec::new();
    let mut columns = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let values = content
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| TableError::Parse {
                    line,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !(2..=3).contains(&values.len()) {
            return Err(TableError::ColumnCount {
                line,
                found: values.len(),
            });
        }
        match columns {
            None => columns = Some(values.len()),
            Some(n) if n != values.len() => return Err(TableError::MixedColumns { line }),
            _ => {}
        }
        omega.push(values[0]);
        im.push(values[1]);
        if values.len() == 3 {
            re.push(values[2]);
        }
        lines.push(line);
    }

    let re = (columns == Some(3)).then_some(re);
    check_rows(&omega, &im, re.as_deref(), |i| lines[i])?;
    OpticalTable::new(omega, im, re)
}

pub fn load_optical_table(path: impl AsRef<Path>) -> Result<OpticalTable, TableError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_optical_table(&text)
}

pub fn write_optical_table(table: &OpticalTable, path: impl AsRef<Path>) -> Result<(), TableError> {
    let path = path.as_ref();
    fs::write(path, table.to_text()).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drude_absorption(w: f64, wp: f64, g: f64) -> f64 {
        wp * wp * g / (w * (w * w + g * g))
    }

    fn synthetic_drude(wp: f64, g: f64, lo: f64, hi: f64, n: usize) -> OpticalTable {
        let step = (hi / lo).ln() / (n - 1) as f64;
        let omega: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
        let im = omega.iter().map(|&w| drude_absorption(w, wp, g)).collect();
        OpticalTable::new(omega, im, None).unwrap()
    }

    #[test]
    fn transparent_table_gives_vacuum() {
        let t = OpticalTable::new(vec![1e14, 1e15, 1e16], vec![0.0; 3], None).unwrap();
        assert_eq!(t.permittivity_at_imaginary(1e15).unwrap(), 1.0);
    }

    #[test]
    fn low_tail_recovers_exact_drude() {
        let (wp, g) = (1e16, 1e14);
        let w = [1e13, 2e13];
        match fit_low_tail(w[0], drude_absorption(w[0], wp, g), w[1], drude_absorption(w[1], wp, g)) {
            LowTail::Drude { amplitude, gamma_sq } => {
                assert!((gamma_sq / (g * g) - 1.0).abs() < 1e-10);
                assert!((amplitude / (wp * wp * g) - 1.0).abs() < 1e-10);
            }
            other => panic!("expected Drude tail, got {other:?}"),
        }
    }

    #[test]
    fn kk_matches_drude_closed_form() {
        let (wp, g) = (1e16, 1e14);
        let t = synthetic_drude(wp, g, 1e12, 1e18, 2000);
        for xi in [1e14, 1e15, 1e16] {
            let exact = 1.0 + wp * wp / (xi * (xi + g));
            let kk = t.permittivity_at_imaginary(xi).unwrap();
            assert!((kk / exact - 1.0).abs() < 1e-2, "xi={xi:e}: {kk} vs {exact}");
        }
    }

    #[test]
    fn far_above_grid_is_transparent() {
        let t = synthetic_drude(1e16, 1e14, 1e12, 1e18, 400);
        let eps = t.permittivity_at_imaginary(1e3 * 1e18).unwrap();
        assert!((eps - 1.0).abs() < 1e-3);
    }

    #[test]
    fn interpolation_needs_real_part() {
        let t = OpticalTable::new(vec![1.0, 2.0], vec![0.5, 0.25], None).unwrap();
        assert!(matches!(t.interpolate(1.5), Err(DielectricError::NoRealPart)));
        let t = OpticalTable::new(vec![1.0, 2.0], vec![0.5, 0.25], Some(vec![-1.0, -3.0])).unwrap();
        assert_eq!(t.interpolate(1.5).unwrap(), Complex64::new(-2.0, 0.375));
        assert_eq!(t.interpolate(2.0).unwrap(), Complex64::new(-3.0, 0.25));
        assert!(matches!(t.interpolate(2.5), Err(DielectricError::OutsideTable { .. })));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "# header\n1e14 0.1\n\n2e14 0.2\n1.5e14 0.3\n";
        match parse_optical_table(text) {
            Err(TableError::NonMonotonic { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        match parse_optical_table("1e14 -0.1\n2e14 0.1\n") {
            Err(TableError::NegativeAbsorption { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_optical_table("1e14 0.1\n"),
            Err(TableError::InsufficientData { rows: 1 })
        ));
        assert!(matches!(
            parse_optical_table("1e14 0.1 2 3\n"),
            Err(TableError::ColumnCount { line: 1, found: 4 })
        ));
        assert!(matches!(
            parse_optical_table("1e14 abc\n"),
            Err(TableError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_optical_table("1e14 0.1 1\n2e14 0.1\n"),
            Err(TableError::MixedColumns { line: 2 })
        ));
    }
}
