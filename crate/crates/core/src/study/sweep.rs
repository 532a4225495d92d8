use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{cavity_density, least_squares_line, row_seed, LineFit, Region};
use crate::approx::{fit_approx, make_grid, GridSpec};
use crate::error::{Error, Result};
use crate::exact::{fit_exact, functional_value};
use crate::kernels::{KernelSpec, OrderPrediction};
use crate::model::{fit_interpolant, FittedModel};
use crate::points::Points;
use crate::polyspace::PolyFrame;
use crate::random::SeededRng;

/// Errors at or below this level are treated as exact reproduction and do
/// not enter the slope fit.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Fraction of the region spanned by the error probe grid.
const PROBE_SHRINK: f64 = 0.95;

/// Probe collision distance that triggers a redraw of a data point.
const COLLISION: f64 = 1e-12;

/// Smoothing parameter `rho = (A/B)^2 (2 a eta_G)^2 h1^(-1/a) h^(2 eta_G + 1/a)`
/// balancing the smoothing bias against the data density law `h = h1 N^(-a)`.
pub fn coupled_rho(h: f64, eta_g: f64, a_over_b: f64, h1: f64, a_exp: f64) -> f64 {
    let k = a_over_b * 2.0 * a_exp * eta_g;
    k * k * libm::pow(h1, -1.0 / a_exp) * libm::pow(h, 2.0 * eta_g + 1.0 / a_exp)
}

/// How each row of a smoother sweep picks `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPolicy {
    Fixed(f64),
    /// [`coupled_rho`] evaluated at the measured density of the row.
    Coupled { a_over_b: f64, h1: f64, a_exp: f64 },
}

impl RhoPolicy {
    /// Coupling with `A = B = 1` and the density law `h = 3.09 N^(-0.81)`.
    pub fn coupled_default() -> Self {
        RhoPolicy::Coupled {
            a_over_b: 1.0,
            h1: 3.09,
            a_exp: 0.81,
        }
    }

    fn rho(&self, h: f64, eta_g: f64) -> f64 {
        match *self {
            RhoPolicy::Fixed(rho) => rho,
            RhoPolicy::Coupled { a_over_b, h1, a_exp } => coupled_rho(h, eta_g, a_over_b, h1, a_exp),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepMode {
    Interpolant,
    Exact,
    /// Approximate smoother with a regular grid of `counts` centers spanning
    /// the region.
    Approx { counts: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub mode: SweepMode,
    pub rho: RhoPolicy,
    /// Error probes per axis on the interior grid.
    pub error_probes: usize,
    /// Cavity-density probes per axis.
    pub density_probes: usize,
    /// Half-width of uniform noise added to the data values.
    pub noise: f64,
}

impl SweepConfig {
    pub fn new(sizes: Vec<usize>, mode: SweepMode, dim: usize) -> Self {
        Self {
            sizes,
            seed: 0,
            mode,
            rho: RhoPolicy::coupled_default(),
            error_probes: if dim == 1 { 1000 } else { 50 },
            density_probes: if dim == 1 { 10_000 } else { 256 },
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub h: f64,
    pub err_max: f64,
    pub rho: f64,
    /// `J_e` of the fit on its own data; zero for the interpolant.
    pub je: f64,
    /// Slope fitted through the usable rows up to and including this one.
    pub slope_partial: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    /// Log-log fit of `err_max` against `h`; `None` when fewer than two rows
    /// are usable (failed fits or errors at the floor).
    pub fit: Option<LineFit>,
    pub predicted: OrderPrediction,
}

impl StudyReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// True when any row was excluded from the slope fit.
    pub fn has_excluded_rows(&self) -> bool {
        self.rows.iter().any(|r| !usable(r))
    }
}

fn usable(r: &StudyRow) -> bool {
    r.failure.is_none() && r.err_max > ERROR_FLOOR && r.err_max.is_finite() && r.h > 0.0
}

fn slope_through(rows: &[StudyRow]) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| usable(r))
        .map(|r| (libm::log10(r.h), libm::log10(r.err_max)))
        .unzip();
    if xs.len() < 2 {
        return None;
    }
    least_squares_line(&xs, &ys).ok()
}

/// Nearest-node distance to the regular probe grid, computed axis by axis.
fn probe_distance(probes: &Region, per_axis: usize, p: &[f64]) -> f64 {
    let mut sq = 0.0;
    for (i, &x) in p.iter().enumerate() {
        let (lo, hi) = (probes.lower()[i], probes.upper()[i]);
        let step = (hi - lo) / (per_axis - 1) as f64;
        let k = libm::round((x - lo) / step).clamp(0.0, (per_axis - 1) as f64);
        let d = x - (lo + k * step);
        sq += d * d;
    }
    libm::sqrt(sq)
}

fn sample_avoiding(
    region: &Region,
    probes: &Region,
    per_axis: usize,
    n: usize,
    rng: &mut SeededRng,
) -> Points {
    let d = region.dim();
    let mut x = Points::empty(d);
    let mut p = alloc::vec![0.0; d];
    while x.len() < n {
        for (i, c) in p.iter_mut().enumerate() {
            *c = rng.uniform(region.lower()[i], region.upper()[i]);
        }
        if probe_distance(probes, per_axis, &p) > COLLISION {
            x.push(&p);
        }
    }
    x
}

/// Measures the convergence of interpolant or smoother fits as the data
/// density shrinks.
///
/// Each row draws `N` uniform points (independent stream per row), fits the
/// model selected by `config.mode` to `data_fn` (plus optional noise), and
/// records the maximum error over an interior probe grid. Rows whose fit
/// fails keep the failure message and are left out of the slope.
pub fn convergence_sweep(
    spec: &KernelSpec,
    region: &Region,
    data_fn: &dyn Fn(&[f64]) -> f64,
    config: &SweepConfig,
) -> Result<StudyReport> {
    if region.dim() != spec.dim() {
        return Err(Error::Shape {
            expected: spec.dim(),
            got: region.dim(),
        });
    }
    if config.sizes.is_empty() || config.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("sweep sizes must be strictly increasing".into()));
    }
    if !(config.noise >= 0.0 && config.noise.is_finite()) {
        return Err(Error::Parameter("noise amplitude must be finite and non-negative".into()));
    }
    let frame = PolyFrame::new(spec.dim(), spec.theta())?;
    let predicted = spec.predicted_orders();
    let eta_g = predicted.total();
    let probe_region = region.shrunk(PROBE_SHRINK);
    let probes = probe_region.probe_grid(config.error_probes)?;
    let truth: Vec<f64> = probes.iter().map(data_fn).collect();
    let centers = match &config.mode {
        SweepMode::Approx { counts } => {
            let gs = GridSpec::new(region.lower().to_vec(), region.upper().to_vec(), counts.clone())?;
            Some(make_grid(&gs, spec.theta()).points)
        }
        _ => None,
    };

    let mut rows: Vec<StudyRow> = Vec::with_capacity(config.sizes.len());
    for (k, &n) in config.sizes.iter().enumerate() {
        let mut rng = SeededRng::new(row_seed(config.seed, k));
        let x = sample_avoiding(region, &probe_region, config.error_probes, n, &mut rng);
        let y: Vec<f64> = x
            .iter()
            .map(|p| data_fn(p) + config.noise * rng.uniform(-1.0, 1.0))
            .collect();
        let h = cavity_density(region, &x, config.density_probes)?;
        let rho = match config.mode {
            SweepMode::Interpolant => 0.0,
            _ => config.rho.rho(h, eta_g),
        };
        let fitted: Result<FittedModel> = match &config.mode {
            SweepMode::Interpolant => fit_interpolant(spec, &frame, &x, &y),
            SweepMode::Exact => fit_exact(spec, &frame, &x, &y, rho),
            SweepMode::Approx { .. } => {
                fit_approx(spec, &frame, &x, &y, centers.as_ref().expect("grid built"), rho)
            }
        };
        let mut row = StudyRow {
            n,
            h,
            err_max: f64::NAN,
            rho,
            je: f64::NAN,
            slope_partial: None,
            failure: None,
        };
        match fitted {
            Ok(model) => {
                row.err_max = probes
                    .iter()
                    .zip(&truth)
                    .map(|(p, t)| (model.eval(p) - t).abs())
                    .fold(0.0, f64::max);
                row.je = functional_value(&model, &x, &y, rho);
            }
            Err(e) => row.failure = Some(e.to_string()),
        }
        rows.push(row);
        let partial = slope_through(&rows).map(|f| f.slope);
        rows.last_mut().expect("row just pushed").slope_partial = partial;
    }
    let fit = slope_through(&rows);
    Ok(StudyReport {
        rows,
        fit,
        predicted,
    })
}
