//! Adaptive one-dimensional quadrature.
//!
//! Globally adaptive bisection driven by a 10-point Gauss / 21-point Kronrod
//! pair. The Kronrod sum is the estimate; the Gauss/Kronrod discrepancy,
//! rescaled the way QUADPACK does it, is the error estimate. Semi-infinite
//! ranges are mapped onto `[0, 1)` before integration.

use thiserror::Error;

/// Abscissae of the 21-point Kronrod rule on `[-1, 1]` (non-negative half).
/// Odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_969_139_036,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Weights of the 10-point Gauss rule at `XGK[1], XGK[3], .., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Integrand evaluations per panel.
pub const EVALS_PER_PANEL: usize = 21;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid integration range [{a}, {b}]")]
    InvalidRange { a: f64, b: f64 },

    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error(
        "no convergence after {subdivisions} subdivisions: best estimate {value:e} with error {error:e}"
    )]
    NotConverged {
        value: f64,
        error: f64,
        subdivisions: usize,
        evals: usize,
    },

    #[error("integrand does not decay at infinity (|g| grew from {near:e} to {far:e} in the mapped variable)")]
    Divergent { near: f64, far: f64 },
}

/// Map used to send `[a, inf)` onto `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SemiInfiniteMap {
    /// `x = a + s u / (1 - u)`; tolerates power-law tails faster than `1/x`.
    #[default]
    Rational,
    /// `x = a - s ln(1 - u)`; exponential tails only.
    Exponential,
}

/// What to do about the far end of a semi-infinite range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailCheck {
    /// Sample the mapped integrand close to `u = 1` and reject growth.
    #[default]
    Probe,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Absolute error floor, in the units of the integral.
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub map: SemiInfiniteMap,
    pub tail_check: TailCheck,
    /// Largest dimensionless wavenumber `k L` reached on the real-frequency
    /// contour before the force evaluation gives up.
    pub max_wavenumber: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_subdivisions: 200,
            map: SemiInfiniteMap::Rational,
            tail_check: TailCheck::Probe,
            max_wavenumber: 4000.0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 1e-14 && self.rel_tol < 1e-2) {
            return Err(QuadratureError::InvalidConfig(format!(
                "rel_tol = {} outside (1e-14, 1e-2)",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig(format!(
                "abs_tol = {} must be finite and non-negative",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 10 {
            return Err(QuadratureError::InvalidConfig(format!(
                "max_subdivisions = {} must be at least 10",
                self.max_subdivisions
            )));
        }
        if !(self.max_wavenumber > 0.0 && self.max_wavenumber.is_finite()) {
            return Err(QuadratureError::InvalidConfig(format!(
                "max_wavenumber = {} must be positive and finite",
                self.max_wavenumber
            )));
        }
        Ok(())
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(raw: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = raw.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn kronrod_panel<F>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut eval = |x: f64| -> Result<f64, QuadratureError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite { x })
        }
    };

    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let fc = eval(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = fc.abs() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let error = rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale);
    Ok(Panel {
        a,
        b,
        value: res_k * half,
        error,
    })
}

/// Integrate `f` over the finite range `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadratureError::InvalidRange { a, b });
    }

    let mut panels = vec![kronrod_panel(&mut f, a, b)?];
    let mut evals = EVALS_PER_PANEL;
    loop {
        let (value, error) = panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(Estimate { value, error, evals });
        }

        let worst = panels
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.error > panels[best].error { i } else { best });
        let Panel { a: lo, b: hi, .. } = panels[worst];
        let mid = 0.5 * (lo + hi);
        if panels.len() >= cfg.max_subdivisions || !(lo < mid && mid < hi) {
            return Err(QuadratureError::NotConverged {
                value,
                error,
                subdivisions: panels.len(),
                evals,
            });
        }
        let left = kronrod_panel(&mut f, lo, mid)?;
        let right = kronrod_panel(&mut f, mid, hi)?;
        evals += 2 * EVALS_PER_PANEL;
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
}

impl SemiInfiniteMap {
    /// Returns `(x(u), dx/du)`.
    fn apply(self, u: f64, start: f64, scale: f64) -> (f64, f64) {
        let w = 1.0 - u;
        match self {
            SemiInfiniteMap::Rational => (start + scale * u / w, scale / (w * w)),
            SemiInfiniteMap::Exponential => (start - scale * (-u).ln_1p(), scale / w),
        }
    }
}

/// Integrate `f` over `[a, inf)` with unit length scale.
pub fn integrate_semi_infinite<F>(f: F, a: f64, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    integrate_semi_infinite_scaled(f, a, 1.0, cfg)
}

/// Integrate `f` over `[a, inf)`. `scale` should be the decay length of `f`;
/// half of the mapped interval then covers `[a, a + scale]`.
pub fn integrate_semi_infinite_scaled<F>(
    mut f: F,
    a: f64,
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if !a.is_finite() {
        return Err(QuadratureError::InvalidRange { a, b: f64::INFINITY });
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(QuadratureError::InvalidConfig(format!(
            "semi-infinite scale = {scale} must be positive and finite"
        )));
    }
    let map = cfg.map;
    let mut mapped = |u: f64| {
        let (x, jac) = map.apply(u, a, scale);
        let y = f(x);
        // The far end can produce 0 * inf; a vanishing integrand wins.
        if y == 0.0 {
            0.0
        } else {
            y * jac
        }
    };

    let mut probe_evals = 0;
    if cfg.tail_check == TailCheck::Probe {
        let near = mapped(1.0 - 1e-3).abs();
        let far = mapped(1.0 - 1e-6).abs();
        probe_evals = 2;
        if !far.is_finite() || (far > 0.0 && far > 100.0 * near) {
            return Err(QuadratureError::Divergent { near, far });
        }
    }

    match integrate(&mut mapped, 0.0, 1.0, cfg) {
        Ok(mut est) => {
            est.evals += probe_evals;
            Ok(est)
        }
        Err(QuadratureError::NotConverged {
            value,
            error,
            subdivisions,
            evals,
        }) => Err(QuadratureError::NotConverged {
            value,
            error,
            subdivisions,
            evals: evals + probe_evals,
        }),
        Err(e) => Err(e),
    }
}
