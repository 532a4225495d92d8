//! The Exact smoother: the minimizer of
//! `J_e[f] = rho |f|^2 + (1/N) sum_k (f(x_k) - y_k)^2`, and the identities
//! it satisfies, reported as diagnostics.

use alloc::format;
use alloc::vec::Vec;

use crate::assembly;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::model::{fit_interpolant, FittedModel, ModelKind};
use crate::points::Points;
use crate::polyspace::PolyFrame;

/// Relative tolerance on the smoother identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

/// Fits the Exact smoother for `rho > 0`.
pub fn fit_exact(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
    rho: f64,
) -> Result<FittedModel> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Parameter(format!(
            "Exact smoother needs rho > 0 (got {rho}); use the interpolant for rho = 0"
        )));
    }
    let sys = assembly::exact_system(spec, frame, x, y, rho)?;
    let sol = assembly::solve_block(&sys)?;
    let parts = sys.split(&sol);
    FittedModel::from_solution(*spec, x.clone(), parts[0], parts[1], ModelKind::ExactSmoother, rho)
}

/// Exact smoother for `rho > 0`, the interpolant for `rho = 0`.
pub fn fit_smoother(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
    rho: f64,
) -> Result<FittedModel> {
    if rho == 0.0 {
        fit_interpolant(spec, frame, x, y)
    } else {
        fit_exact(spec, frame, x, y, rho)
    }
}

/// Mean squared residual `(1/N) sum (f(x_k) - y_k)^2`.
pub fn residual_ms(model: &FittedModel, x: &Points, y: &[f64]) -> f64 {
    let n = x.len() as f64;
    x.iter()
        .zip(y)
        .map(|(p, yk)| {
            let r = model.eval(p) - yk;
            r * r
        })
        .sum::<f64>()
        / n
}

/// `J_e[f] = rho |f|^2 + (1/N) sum (f(x_k) - y_k)^2`.
pub fn functional_value(model: &FittedModel, x: &Points, y: &[f64], rho: f64) -> f64 {
    rho * model.seminorm_sq() + residual_ms(model, x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherDiagnostics {
    pub j_e: f64,
    pub seminorm_sq: f64,
    pub residual_ms: f64,
    /// `2 rho |s|^2 + mean|s - y|^2 + mean|s|^2 - mean|y|^2`.
    pub energy_gap: f64,
    /// `rho |s|^2 - mean(s (y - s))`.
    pub seminorm_gap: f64,
    /// `J_e - mean((y - s) y)`.
    pub functional_gap: f64,
    /// Normalized `|P_X^T (s_X - y)|`.
    pub moment_gap: f64,
    /// Scale the gaps are measured against: `mean|y|^2`.
    pub scale: f64,
}

impl SmootherDiagnostics {
    /// Whether every identity holds within [`IDENTITY_TOLERANCE`].
    pub fn identities_hold(&self) -> bool {
        self.worst_relative_gap() <= IDENTITY_TOLERANCE
    }

    pub fn worst_relative_gap(&self) -> f64 {
        let s = if self.scale > 0.0 { self.scale } else { 1.0 };
        (self.energy_gap.abs() / s)
            .max(self.seminorm_gap.abs() / s)
            .max(self.functional_gap.abs() / s)
            .max(self.moment_gap)
    }
}

/// Evaluates `J_e` and the smoother identities for `model` fit on `(x, y)`.
pub fn diagnostics(model: &FittedModel, x: &Points, y: &[f64]) -> Result<SmootherDiagnostics> {
    if y.len() != x.len() || x.is_empty() {
        return Err(Error::Shape {
            expected: x.len(),
            got: y.len(),
        });
    }
    let rho = model.rho();
    let n = x.len() as f64;
    let s: Vec<f64> = model.eval_many(x);
    let semi = model.seminorm_sq();
    let mean = |f: &dyn Fn(usize) -> f64| (0..s.len()).map(f).sum::<f64>() / n;
    let res = mean(&|k| (s[k] - y[k]) * (s[k] - y[k]));
    let s_sq = mean(&|k| s[k] * s[k]);
    let y_sq = mean(&|k| y[k] * y[k]);
    let s_dot_r = mean(&|k| s[k] * (y[k] - s[k]));
    let r_dot_y = mean(&|k| (y[k] - s[k]) * y[k]);
    let j_e = rho * semi + res;

    let frame = model.frame();
    let mut moments = alloc::vec![0.0; frame.size()];
    let mut pmax = 0.0_f64;
    let mut mass = 0.0;
    for (k, p) in x.iter().enumerate() {
        for (acc, pj) in moments.iter_mut().zip(frame.monomials(p)) {
            *acc += pj * (s[k] - y[k]);
            pmax = pmax.max(pj.abs());
        }
        mass += y[k].abs() + s[k].abs();
    }
    let moment_abs = moments.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let moment_gap = if mass == 0.0 {
        moment_abs
    } else {
        moment_abs / (pmax * mass)
    };

    Ok(SmootherDiagnostics {
        j_e,
        seminorm_sq: semi,
        residual_ms: res,
        energy_gap: 2.0 * rho * semi + res + s_sq - y_sq,
        seminorm_gap: rho * semi - s_dot_r,
        functional_gap: j_e - r_dot_y,
        moment_gap,
        scale: y_sq,
    })
}
