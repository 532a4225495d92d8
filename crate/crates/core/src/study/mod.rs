//! Experiment harness: synthetic data, data densities, the empirical
//! density law, convergence-order sweeps, representer data functions and the
//! smoothing-parameter search.

mod density;
mod representer;
mod rho;
mod sweep;

pub use density::{cavity_density, density_law, exponential_sizes, DensityFit};
pub use representer::RepresenterData;
pub use rho::{delta_data, delta_function, rho_search, RhoSearch, RhoSearchConfig, StopReason};
pub use sweep::{
    convergence_sweep, coupled_rho, RhoPolicy, StudyReport, StudyRow, SweepConfig, SweepMode,
    ERROR_FLOOR,
};

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::points::Points;
use crate::random::SeededRng;

/// Axis-aligned box `[a, b]` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Region {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Parameter(
                "region corners must be non-empty and of equal dimension".into(),
            ));
        }
        for (i, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::Parameter(format!(
                    "region needs b > a in dimension {}",
                    i + 1
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(alloc::vec![a], alloc::vec![b])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// The box scaled about its center by `factor`.
    pub fn shrunk(&self, factor: f64) -> Self {
        let (lower, upper) = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| {
                let mid = 0.5 * (a + b);
                let half = 0.5 * (b - a) * factor;
                (mid - half, mid + half)
            })
            .unzip();
        Self { lower, upper }
    }

    /// Affine image `c * x` of the box.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.lower.iter().map(|a| a * c).collect(),
            self.upper.iter().map(|b| b * c).collect(),
        )
    }

    pub fn width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }

    /// `per_axis^d` points spanning the closed box, row-major.
    pub fn probe_grid(&self, per_axis: usize) -> Result<Points> {
        if per_axis < 2 {
            return Err(Error::Parameter("probe grid needs at least 2 points per axis".into()));
        }
        let d = self.dim();
        let total = per_axis.pow(d as u32);
        let mut coords = Vec::with_capacity(total * d);
        let mut idx = alloc::vec![0usize; d];
        for _ in 0..total {
            for i in 0..d {
                let t = idx[i] as f64 / (per_axis - 1) as f64;
                coords.push(self.lower[i] + t * (self.upper[i] - self.lower[i]));
            }
            for i in (0..d).rev() {
                idx[i] += 1;
                if idx[i] < per_axis {
                    break;
                }
                idx[i] = 0;
            }
        }
        Points::new(d, coords)
    }
}

/// `n` independent uniform points in `region`.
pub fn gen_uniform(region: &Region, n: usize, seed: u64) -> Result<Points> {
    if n == 0 {
        return Err(Error::Parameter("number of points must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    Ok(sample_uniform(region, n, &mut rng))
}

pub(crate) fn sample_uniform(region: &Region, n: usize, rng: &mut SeededRng) -> Points {
    let d = region.dim();
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n {
        for i in 0..d {
            coords.push(rng.uniform(region.lower[i], region.upper[i]));
        }
    }
    Points::new(d, coords).expect("uniform samples are finite")
}

/// Seed of the independent stream used for row `row` of an experiment.
pub(crate) fn row_seed(seed: u64, row: usize) -> u64 {
    seed.wrapping_add((row as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Ordinary least squares line `y = slope * x + intercept` with its `r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Input(
            "least squares needs at least two (x, y) pairs".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("least squares abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}
