//! Run configuration: a TOML document with `slab1`, `slab2`, `sweep`, and
//! optional `gap`, `run`, `quadrature`, `output` and `dos` sections.
//!
//! Every section rejects unknown keys. Paths to optical tables are resolved
//! relative to the directory holding the configuration file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use casimir_core::dielectric::{load_optical_table, DrudeLorentz, Oscillator, TableError};
use casimir_core::quadrature::QuadratureConfig;
use casimir_core::reflection::{Layer, LayerStack, Substrate};
use casimir_core::{DielectricModel, ReflectionModel};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },

    #[error("`{key}`: optical data file {path} not found")]
    MissingFile { key: String, path: PathBuf },

    #[error("`{key}`: {source}")]
    Table {
        key: String,
        #[source]
        source: TableError,
    },
}

fn invalid(key: impl Into<String>, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    slab1: SlabSpec,
    slab2: SlabSpec,
    gap: Option<GapSpec>,
    sweep: Option<SweepSpec>,
    #[serde(default)]
    run: RunSpec,
    #[serde(default)]
    quadrature: QuadratureSpec,
    #[serde(default)]
    output: OutputSpec,
    dos: Option<DosSpec>,
}

/// One material, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaterialSpec {
    Vacuum,
    Constant {
        eps: f64,
    },
    Plasma {
        omega_p: f64,
    },
    Drude {
        omega_p: f64,
        gamma: f64,
    },
    DrudeLorentz {
        #[serde(default = "one")]
        eps_inf: f64,
        #[serde(default)]
        omega_p: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default)]
        oscillators: Vec<OscillatorSpec>,
    },
    Table {
        path: PathBuf,
    },
    /// Only valid as a multilayer substrate.
    PerfectConductor,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub strength: f64,
    pub resonance: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub thickness: f64,
    pub material: MaterialSpec,
}

/// Reflection model of one slab, tagged by `model`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SlabSpec {
    Fresnel {
        material: MaterialSpec,
    },
    Multilayer {
        /// From the gap side inward.
        #[serde(default)]
        layers: Vec<LayerSpec>,
        substrate: MaterialSpec,
    },
    PerfectMirror,
    ConstantR {
        r_s: f64,
        r_p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct GapSpec {
    material: MaterialSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    min: f64,
    max: Option<f64>,
    #[serde(default = "one_point")]
    points: usize,
    #[serde(default)]
    spacing: Spacing,
}

fn one_point() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathChoice {
    #[default]
    ImaginaryAxis,
    RealAxis,
    Lifshitz,
    All,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSpec {
    #[serde(default)]
    path: PathChoice,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureSpec {
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<usize>,
    max_wavenumber: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`, expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSpec {
    #[serde(default)]
    format: Format,
    path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct DosSpec {
    separation: f64,
    #[serde(default)]
    q_par: f64,
    k_min: f64,
    k_max: f64,
    points: usize,
    eta: Option<f64>,
    path: Option<PathBuf>,
}

/// Density-of-states scan at fixed parallel wavevector.
#[derive(Debug, Clone, PartialEq)]
pub struct DosConfig {
    pub separation: f64,
    pub q_par: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
    pub eta: Option<f64>,
    pub path: Option<PathBuf>,
}

/// A slab after validation: the reflection model plus, for plain Fresnel
/// slabs, the bulk permittivity the Lifshitz path needs.
#[derive(Debug, Clone)]
pub struct Slab {
    pub reflection: ReflectionModel,
    pub bulk: Option<DielectricModel>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: PathBuf,
    pub slab1: Slab,
    pub slab2: Slab,
    pub gap: DielectricModel,
    pub separations: Vec<f64>,
    pub path: PathChoice,
    pub quadrature: QuadratureConfig,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub dos: Option<DosConfig>,
}

/// Read, parse and validate a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &base).map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
    .map(|mut cfg| {
        cfg.source = path.to_path_buf();
        cfg
    })
}

/// Parse configuration text; relative table paths resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: PathBuf::from("<config>"),
        message: e.to_string(),
    })?;

    let slab1 = build_slab(&raw.slab1, "slab1", base)?;
    let slab2 = build_slab(&raw.slab2, "slab2", base)?;
    let gap = match &raw.gap {
        Some(g) => build_material(&g.material, "gap.material", base)?,
        None => DielectricModel::Vacuum,
    };
    if !matches!(gap, DielectricModel::Vacuum) && raw.run.path != PathChoice::Lifshitz {
        return Err(invalid(
            "gap.material",
            "a filled gap is only supported with run.path = \"lifshitz\"",
        ));
    }

    let separations = match &raw.sweep {
        Some(s) => separations(s)?,
        None if raw.dos.is_some() => Vec::new(),
        None => return Err(invalid("sweep", "missing section")),
    };
    let quadrature = build_quadrature(&raw.quadrature)?;
    let dos = raw.dos.as_ref().map(build_dos).transpose()?;

    Ok(RunConfig {
        source: PathBuf::new(),
        slab1,
        slab2,
        gap,
        separations,
        path: raw.run.path,
        quadrature,
        format: raw.output.format,
        output: raw.output.path.clone(),
        dos,
    })
}

fn positive(key: &str, value: f64) -> Result<f64, ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(key, format!("must be positive and finite, got {value}")))
    }
}

fn separations(s: &SweepSpec) -> Result<Vec<f64>, ConfigError> {
    let min = positive("sweep.min", s.min)?;
    if s.points == 0 {
        return Err(invalid("sweep.points", "must be at least 1"));
    }
    if s.points == 1 {
        if let Some(max) = s.max {
            if max != min {
                return Err(invalid("sweep.max", "must equal sweep.min for a single point"));
            }
        }
        return Ok(vec![min]);
    }
    let max = positive("sweep.max", s.max.ok_or_else(|| invalid("sweep.max", "required when points > 1"))?)?;
    if max <= min {
        return Err(invalid("sweep.max", format!("must exceed sweep.min ({max} <= {min})")));
    }
    let n = s.points - 1;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            match s.spacing {
                Spacing::Log => (min.ln() + t * (max / min).ln()).exp(),
                Spacing::Linear => min + t * (max - min),
            }
        })
        .collect();
    // Pin the end points exactly.
    grid[0] = min;
    grid[n] = max;
    Ok(grid)
}

fn build_quadrature(q: &QuadratureSpec) -> Result<QuadratureConfig, ConfigError> {
    let mut cfg = QuadratureConfig::default();
    if let Some(v) = q.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = q.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = q.max_subdivisions {
        cfg.max_subdivisions = v;
    }
    if let Some(v) = q.max_wavenumber {
        cfg.max_wavenumber = positive("quadrature.max_wavenumber", v)?;
    }
    cfg.validate().map_err(|e| {
        let key = if !(cfg.rel_tol > 1e-14 && cfg.rel_tol < 1e-2) {
            "quadrature.rel_tol"
        } else if cfg.max_subdivisions < 10 {
            "quadrature.max_subdivisions"
        } else {
            "quadrature.abs_tol"
        };
        invalid(key, e)
    })?;
    Ok(cfg)
}

fn build_dos(d: &DosSpec) -> Result<DosConfig, ConfigError> {
    let k_min = positive("dos.k_min", d.k_min)?;
    let k_max = positive("dos.k_max", d.k_max)?;
    if k_max <= k_min {
        return Err(invalid("dos.k_max", "must exceed dos.k_min"));
    }
    if d.points < 2 {
        return Err(invalid("dos.points", "must be at least 2"));
    }
    if !(d.q_par >= 0.0 && d.q_par.is_finite()) {
        return Err(invalid("dos.q_par", "must be non-negative and finite"));
    }
    if let Some(eta) = d.eta {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(invalid("dos.eta", "must be non-negative and finite"));
        }
    }
    Ok(DosConfig {
        separation: positive("dos.separation", d.separation)?,
        q_par: d.q_par,
        k_min,
        k_max,
        points: d.points,
        eta: d.eta,
        path: d.path.clone(),
    })
}

fn build_slab(spec: &SlabSpec, key: &str, base: &Path) -> Result<Slab, ConfigError> {
    Ok(match spec {
        SlabSpec::Fresnel { material } => {
            let m = build_material(material, &format!("{key}.material"), base)?;
            Slab {
                reflection: ReflectionModel::fresnel(m.clone()),
                bulk: Some(m),
            }
        }
        SlabSpec::Multilayer { layers, substrate } => {
            let substrate = match substrate {
                MaterialSpec::PerfectConductor => Substrate::PerfectMirror,
                m => Substrate::Medium(build_material(m, &format!("{key}.substrate"), base)?),
            };
            let layers = layers
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let lkey = format!("{key}.layers[{i}]");
                    positive(&format!("{lkey}.thickness"), l.thickness)?;
                    Ok(Layer {
                        thickness: l.thickness,
                        medium: build_material(&l.material, &format!("{lkey}.material"), base)?,
                    })
                })
                .collect::<Result<Vec<_>, ConfigError>>()?;
            let stack = LayerStack::new(layers, substrate).map_err(|e| invalid(format!("{key}.layers"), e))?;
            Slab {
                reflection: ReflectionModel::Multilayer(stack),
                bulk: None,
            }
        }
        SlabSpec::PerfectMirror => Slab {
            reflection: ReflectionModel::PerfectMirror,
            bulk: None,
        },
        SlabSpec::ConstantR { r_s, r_p } => {
            for (k, v) in [("r_s", r_s), ("r_p", r_p)] {
                if !(v.abs() <= 1.0) {
                    return Err(invalid(format!("{key}.{k}"), format!("|r| must not exceed 1, got {v}")));
                }
            }
            Slab {
                reflection: ReflectionModel::constant(*r_s, *r_p),
                bulk: None,
            }
        }
    })
}

fn build_material(spec: &MaterialSpec, key: &str, base: &Path) -> Result<DielectricModel, ConfigError> {
    let checked = |r: Result<DielectricModel, casimir_core::dielectric::DielectricError>| r.map_err(|e| invalid(key, e));
    match spec {
        MaterialSpec::Vacuum => Ok(DielectricModel::Vacuum),
        MaterialSpec::Constant { eps } => checked(DielectricModel::constant(*eps)),
        MaterialSpec::Plasma { omega_p } => checked(DielectricModel::plasma(*omega_p)),
        MaterialSpec::Drude { omega_p, gamma } => checked(DielectricModel::drude(*omega_p, *gamma)),
        MaterialSpec::DrudeLorentz {
            eps_inf,
            omega_p,
            gamma,
            oscillators,
        } => checked(DielectricModel::drude_lorentz(DrudeLorentz {
            eps_inf: *eps_inf,
            omega_p: *omega_p,
            gamma: *gamma,
            oscillators: oscillators
                .iter()
                .map(|o| Oscillator {
                    strength: o.strength,
                    resonance: o.resonance,
                    damping: o.damping,
                })
                .collect(),
        })),
        MaterialSpec::Table { path } => {
            let resolved = if path.is_absolute() { path.clone() } else { base.join(path) };
            if !resolved.exists() {
                return Err(ConfigError::MissingFile {
                    key: format!("{key}.path"),
                    path: resolved,
                });
            }
            let table = load_optical_table(&resolved).map_err(|source| ConfigError::Table {
                key: format!("{key}.path"),
                source,
            })?;
            Ok(DielectricModel::tabulated(table))
        }
        MaterialSpec::PerfectConductor => Err(invalid(
            format!("{key}.kind"),
            "`perfect-conductor` is only allowed as a multilayer substrate",
        )),
    }
}
