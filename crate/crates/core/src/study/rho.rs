use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::FittedModel;
use crate::points::Points;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSearchConfig {
    /// Initial multiplicative step, greater than 1.
    pub factor: f64,
    /// Stop when the error improves by less than this percentage.
    pub error_change_pct: f64,
    /// Stop when `rho` would move by less than this percentage.
    pub rho_change_pct: f64,
    pub max_iterations: usize,
}

impl Default for RhoSearchConfig {
    fn default() -> Self {
        Self {
            factor: 10.0,
            error_change_pct: 1.0,
            rho_change_pct: 1.0,
            max_iterations: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ErrorChange,
    RhoChange,
    ZeroError,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoSearch {
    pub rho: f64,
    pub error: f64,
    pub iterations: usize,
    pub stop: StopReason,
    /// Every `(rho, error)` pair evaluated, in order.
    pub trace: Vec<(f64, f64)>,
}

/// Multiplicative search for the `rho` minimizing `error_fn`.
///
/// Each iteration evaluates `rho * factor` and `rho / factor` and moves to
/// the better one. When neither improves, the step is refined to
/// `sqrt(factor)`. The search stops when the error improves by less than
/// `error_change_pct` percent or the step in `rho` falls below
/// `rho_change_pct` percent.
pub fn rho_search<F>(mut error_fn: F, rho0: f64, config: &RhoSearchConfig) -> Result<RhoSearch>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(Error::Parameter(alloc::format!("initial rho must be positive, got {rho0}")));
    }
    if !(config.factor > 1.0 && config.factor.is_finite()) {
        return Err(Error::Parameter("search factor must exceed 1".into()));
    }
    let mut trace = Vec::new();
    let mut eval = |rho: f64, trace: &mut Vec<(f64, f64)>, iterations: usize| -> Result<f64> {
        let e = error_fn(rho)?;
        trace.push((rho, e));
        if !e.is_finite() {
            return Err(Error::Search {
                iterations,
                rho,
                trace: trace.clone(),
            });
        }
        Ok(e)
    };

    let mut rho = rho0;
    let mut err = eval(rho, &mut trace, 0)?;
    let mut factor = config.factor;
    let mut iterations = 0;
    let stop = loop {
        if err == 0.0 {
            break StopReason::ZeroError;
        }
        if iterations == config.max_iterations {
            break StopReason::MaxIterations;
        }
        iterations += 1;
        let up = eval(rho * factor, &mut trace, iterations)?;
        let down = eval(rho / factor, &mut trace, iterations)?;
        let (cand_rho, cand_err) = if up <= down {
            (rho * factor, up)
        } else {
            (rho / factor, down)
        };
        let change_pct = 100.0 * (err - cand_err).abs() / err;
        if cand_err < err {
            rho = cand_rho;
            err = cand_err;
            if change_pct < config.error_change_pct {
                break StopReason::ErrorChange;
            }
            if 100.0 * (factor - 1.0) < config.rho_change_pct {
                break StopReason::RhoChange;
            }
        } else {
            if change_pct < config.error_change_pct {
                break StopReason::ErrorChange;
            }
            factor = libm::sqrt(factor);
            if 100.0 * (factor - 1.0) < config.rho_change_pct {
                break StopReason::RhoChange;
            }
        }
    };
    Ok(RhoSearch {
        rho,
        error: err,
        iterations,
        stop,
        trace,
    })
}

/// Sum of squared deviations from the known data function over an error
/// grid.
pub fn delta_function(model: &FittedModel, grid: &Points, data_fn: &dyn Fn(&[f64]) -> f64) -> f64 {
    grid.iter()
        .map(|p| {
            let r = model.eval(p) - data_fn(p);
            r * r
        })
        .sum()
}

/// Sum of squared residuals at the data points.
pub fn delta_data(model: &FittedModel, x: &Points, y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(p, yk)| {
            let r = model.eval(p) - yk;
            r * r
        })
        .sum()
}
