//! The Approximate smoother: minimizes `J_e` over `W_{G,X'}` for a fixed
//! center set `X'`, typically a regular grid. The linear system has
//! `N' + 2M` rows whatever the number of data points `N`.

use alloc::format;
use alloc::vec::Vec;

use crate::assembly::{self, ApproxAccumulator, DEFAULT_CHUNK};
use crate::error::{Error, Result};
use crate::exact::functional_value;
use crate::kernels::KernelSpec;
use crate::model::{seminorm_sq_diff, FittedModel, ModelKind};
use crate::points::Points;
use crate::polyspace::PolyFrame;

/// A regular rectangular grid: nodes `a + h * alpha` for `0 <= alpha < counts`
/// with `counts * h = b - a`, so the upper corner `b` is not a node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let d = lower.len();
        if d == 0 {
            return Err(Error::Parameter("grid needs at least one dimension".into()));
        }
        if upper.len() != d || counts.len() != d {
            return Err(Error::Shape {
                expected: d,
                got: if upper.len() != d { upper.len() } else { counts.len() },
            });
        }
        for i in 0..d {
            if !(lower[i].is_finite() && upper[i].is_finite() && upper[i] > lower[i]) {
                return Err(Error::Parameter(format!(
                    "grid corner b must exceed a in dimension {}",
                    i + 1
                )));
            }
            if counts[i] == 0 {
                return Err(Error::Parameter(format!(
                    "grid count in dimension {} must be positive",
                    i + 1
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            counts,
        })
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

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Steps `h_i = (b_i - a_i) / N'_i`.
    pub fn steps(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| (self.upper[i] - self.lower[i]) / self.counts[i] as f64)
            .collect()
    }

    /// Total node count `N'`.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.upper[i] - self.lower[i])
            .product()
    }

    /// Grids with at least `theta` nodes per dimension are `theta`-unisolvent.
    pub fn guarantees_unisolvency(&self, theta: usize) -> bool {
        self.counts.iter().all(|&c| c >= theta)
    }
}

/// Grid nodes plus whether unisolvency is guaranteed for the requested order.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Points,
    pub unisolvent_guaranteed: bool,
}

/// Enumerates the grid nodes in row-major order (last dimension fastest).
pub fn make_grid(gs: &GridSpec, theta: usize) -> Grid {
    let d = gs.dim();
    let h = gs.steps();
    let total = gs.len();
    let mut coords = Vec::with_capacity(total * d);
    let mut alpha = alloc::vec![0usize; d];
    for _ in 0..total {
        for i in 0..d {
            coords.push(gs.lower[i] + h[i] * alpha[i] as f64);
        }
        for i in (0..d).rev() {
            alpha[i] += 1;
            if alpha[i] < gs.counts[i] {
                break;
            }
            alpha[i] = 0;
        }
    }
    Grid {
        points: Points::new(d, coords).expect("grid coordinates are finite"),
        unisolvent_guaranteed: gs.guarantees_unisolvency(theta),
    }
}

/// Grid data density from `d^(d/2) vol = N' h^d`.
pub fn grid_density(gs: &GridSpec) -> f64 {
    let d = gs.dim() as f64;
    libm::pow(libm::pow(d, d / 2.0) * gs.volume() / gs.len() as f64, 1.0 / d)
}

/// Holds the accumulated Approximate smoother products so several values of
/// `rho` can be fitted without touching the data again.
#[derive(Debug, Clone)]
pub struct ApproxFitter {
    acc: ApproxAccumulator,
    spec: KernelSpec,
}

impl ApproxFitter {
    pub fn new(
        spec: &KernelSpec,
        frame: &PolyFrame,
        x: &Points,
        y: &[f64],
        centers: &Points,
    ) -> Result<Self> {
        Self::with_chunk(spec, frame, x, y, centers, DEFAULT_CHUNK)
    }

    pub fn with_chunk(
        spec: &KernelSpec,
        frame: &PolyFrame,
        x: &Points,
        y: &[f64],
        centers: &Points,
        chunk: usize,
    ) -> Result<Self> {
        Ok(Self {
            acc: ApproxAccumulator::new(spec, frame, x, y, centers, chunk)?,
            spec: *spec,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.acc.system_dim()
    }

    pub fn fit(&self, rho: f64) -> Result<FittedModel> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Parameter(format!(
                "Approximate smoother needs rho > 0, got {rho}"
            )));
        }
        let sys = self.acc.system(rho)?;
        let sol = assembly::solve_block(&sys)?;
        let parts = sys.split(&sol);
        // parts[2] is the Lagrange multiplier of the center constraint.
        FittedModel::from_solution(
            self.spec,
            self.acc.centers().clone(),
            parts[0],
            parts[1],
            ModelKind::ApproxSmoother,
            rho,
        )
    }
}

/// Fits the Approximate smoother with centers `centers`.
pub fn fit_approx(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
    centers: &Points,
    rho: f64,
) -> Result<FittedModel> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Parameter(format!(
            "Approximate smoother needs rho > 0, got {rho}"
        )));
    }
    ApproxFitter::new(spec, frame, x, y, centers)?.fit(rho)
}

/// Both sides of
/// `rho |s_e - s_a|^2 + mean|s_e - s_a|^2 = J_e[s_a] - J_e[s_e]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub seminorm_sq_diff: f64,
    pub mean_sq_diff: f64,
    pub j_exact: f64,
    pub j_approx: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Relative tolerance on the comparison identity.
pub const COMPARISON_TOLERANCE: f64 = 1e-7;

impl Comparison {
    pub fn gap(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn holds(&self) -> bool {
        self.gap().abs() <= COMPARISON_TOLERANCE * (1.0 + self.j_approx)
    }
}

pub fn compare(
    exact: &FittedModel,
    approx: &FittedModel,
    x: &Points,
    y: &[f64],
    rho: f64,
) -> Result<Comparison> {
    if y.len() != x.len() || x.is_empty() {
        return Err(Error::Shape {
            expected: x.len(),
            got: y.len(),
        });
    }
    let semi = seminorm_sq_diff(exact, approx)?;
    let n = x.len() as f64;
    let mean_sq = x
        .iter()
        .map(|p| {
            let d = exact.eval(p) - approx.eval(p);
            d * d
        })
        .sum::<f64>()
        / n;
    let j_exact = functional_value(exact, x, y, rho);
    let j_approx = functional_value(approx, x, y, rho);
    Ok(Comparison {
        seminorm_sq_diff: semi,
        mean_sq_diff: mean_sq,
        j_exact,
        j_approx,
        lhs: rho * semi + mean_sq,
        rhs: j_approx - j_exact,
    })
}
