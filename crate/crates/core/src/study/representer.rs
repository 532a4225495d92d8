use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::points::Points;
use crate::polyspace::UnisolventFrame;

/// Data function `f_d = sum_k beta_k R_{x_k}` built from Riesz representers,
/// the class of data for which smoothers converge at double order.
#[derive(Debug, Clone)]
pub struct RepresenterData {
    spec: KernelSpec,
    uf: UnisolventFrame,
    centers: Points,
    beta: Vec<f64>,
    seminorm_sq: f64,
}

impl RepresenterData {
    pub fn new(spec: KernelSpec, uf: UnisolventFrame, centers: Points, beta: Vec<f64>) -> Result<Self> {
        if centers.dim() != spec.dim() {
            return Err(Error::Shape {
                expected: spec.dim(),
                got: centers.dim(),
            });
        }
        if beta.len() != centers.len() {
            return Err(Error::Shape {
                expected: centers.len(),
                got: beta.len(),
            });
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Input("representer weights must be finite".into()));
        }
        let mut seminorm_sq = 0.0;
        for (j, xj) in centers.iter().enumerate() {
            for (k, xk) in centers.iter().enumerate() {
                seminorm_sq += beta[j] * beta[k] * spec.semi_riesz(&uf, xk, xj)?;
            }
        }
        Ok(Self {
            spec,
            uf,
            centers,
            beta,
            seminorm_sq: seminorm_sq.max(0.0),
        })
    }

    /// `f_d(x)`; NaN when `x` has the wrong dimension or contains NaN.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.centers
            .iter()
            .zip(&self.beta)
            .map(|(c, b)| b * self.spec.riesz_representer(&self.uf, c, x).unwrap_or(f64::NAN))
            .sum()
    }

    /// `|f_d|^2 = sum_jk beta_j beta_k r_{x_k}(x_j)`.
    pub fn seminorm_sq(&self) -> f64 {
        self.seminorm_sq
    }

    pub fn centers(&self) -> &Points {
        &self.centers
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn frame(&self) -> &UnisolventFrame {
        &self.uf
    }
}
