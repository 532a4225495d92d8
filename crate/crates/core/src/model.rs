//! Fitted models in the finite-dimensional space `W_{G,Z}` and the
//! minimal-seminorm interpolant.
//!
//! A model is `u(x) = sum_i v_i G(x - z_i) + sum_j beta_j p_j(x)` with the
//! coefficient constraint `P_Z^T v = 0`. Its squared seminorm is
//! `(2 pi)^(d/2) v^T G_ZZ v`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::assembly::{self, project_out};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::points::Points;
use crate::polyspace::PolyFrame;

/// Tolerance of the normalized constraint measure [`FittedModel::constraint_violation`].
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Interpolant,
    ExactSmoother,
    ApproxSmoother,
}

impl ModelKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelKind::Interpolant => "interpolant",
            ModelKind::ExactSmoother => "exact",
            ModelKind::ApproxSmoother => "approx",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "interpolant" => Ok(ModelKind::Interpolant),
            "exact" => Ok(ModelKind::ExactSmoother),
            "approx" => Ok(ModelKind::ApproxSmoother),
            other => Err(Error::Input(format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    spec: KernelSpec,
    frame: PolyFrame,
    centers: Points,
    v: Vec<f64>,
    beta: Vec<f64>,
    kind: ModelKind,
    rho: f64,
}

impl FittedModel {
    /// Assembles a model from its parts, checking lengths and the coefficient
    /// constraint `P_Z^T v = 0`.
    pub fn from_parts(
        spec: KernelSpec,
        centers: Points,
        v: Vec<f64>,
        beta: Vec<f64>,
        kind: ModelKind,
        rho: f64,
    ) -> Result<Self> {
        let frame = PolyFrame::new(spec.dim(), spec.theta())?;
        if centers.dim() != spec.dim() {
            return Err(Error::Shape {
                expected: spec.dim(),
                got: centers.dim(),
            });
        }
        if v.len() != centers.len() {
            return Err(Error::Shape {
                expected: centers.len(),
                got: v.len(),
            });
        }
        if beta.len() != frame.size() {
            return Err(Error::Shape {
                expected: frame.size(),
                got: beta.len(),
            });
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Parameter(format!("invalid rho {rho}")));
        }
        let model = Self {
            spec,
            frame,
            centers,
            v,
            beta,
            kind,
            rho,
        };
        let violation = model.constraint_violation();
        if violation > CONSTRAINT_TOLERANCE {
            return Err(Error::Constraint { violation });
        }
        Ok(model)
    }

    /// Builds a model from solved coefficients, first projecting `v` onto
    /// `null(P_Z^T)` to remove solver round-off from the constraint.
    pub(crate) fn from_solution(
        spec: KernelSpec,
        centers: Points,
        v: &[f64],
        beta: &[f64],
        kind: ModelKind,
        rho: f64,
    ) -> Result<Self> {
        let frame = PolyFrame::new(spec.dim(), spec.theta())?;
        let q = frame.unisolvency_matrix(&centers)?.qr().q();
        let mut vv = DVector::from_column_slice(v);
        project_out(&q, &mut vv);
        Self::from_parts(spec, centers, vv.as_slice().to_vec(), beta.to_vec(), kind, rho)
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn frame(&self) -> &PolyFrame {
        &self.frame
    }

    pub fn centers(&self) -> &Points {
        &self.centers
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `|P_Z^T v|_inf / (max|P_Z| * |v|_1)`, zero when `v = 0`.
    pub fn constraint_violation(&self) -> f64 {
        let vnorm: f64 = self.v.iter().map(|x| x.abs()).sum();
        if vnorm == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        let mut pmax = 0.0_f64;
        let mut acc = alloc::vec![0.0; self.frame.size()];
        for (z, vi) in self.centers.iter().zip(&self.v) {
            for (a, p) in acc.iter_mut().zip(self.frame.monomials(z)) {
                *a += p * vi;
                pmax = pmax.max(p.abs());
            }
        }
        for a in acc {
            worst = worst.max(a.abs());
        }
        worst / (pmax * vnorm)
    }

    /// `u(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = self.frame.eval_poly(&self.beta, x);
        for (z, vi) in self.centers.iter().zip(&self.v) {
            if *vi != 0.0 {
                acc += vi * self.spec.eval_between(x, z);
            }
        }
        acc
    }

    pub fn eval_many(&self, xs: &Points) -> Vec<f64> {
        xs.iter().map(|x| self.eval(x)).collect()
    }

    /// `(2 pi)^(d/2) v^T G_ZZ v`.
    pub fn seminorm_sq(&self) -> f64 {
        weighted_energy(&self.spec, &self.centers, &self.v).max(0.0)
    }
}

fn weighted_energy(spec: &KernelSpec, centers: &Points, w: &[f64]) -> f64 {
    let n = centers.len();
    let mut acc = 0.0;
    for i in 0..n {
        if w[i] == 0.0 {
            continue;
        }
        let zi = centers.point(i);
        let mut row = 0.5 * w[i] * spec.eval_between(zi, zi);
        for j in 0..i {
            row += w[j] * spec.eval_between(zi, centers.point(j));
        }
        acc += 2.0 * w[i] * row;
    }
    spec.fourier_scale() * acc
}

/// `|u_1 - u_2|^2` over the merged center set, identical centers having their
/// coefficients summed.
pub fn seminorm_sq_diff(a: &FittedModel, b: &FittedModel) -> Result<f64> {
    if a.spec != b.spec {
        return Err(Error::Parameter(
            "models use different kernels and cannot be compared".into(),
        ));
    }
    for m in [a, b] {
        let violation = m.constraint_violation();
        if violation > CONSTRAINT_TOLERANCE {
            return Err(Error::Constraint { violation });
        }
    }
    let all = a.centers.concat(&b.centers);
    let mut w: Vec<f64> = a.v.clone();
    w.extend(b.v.iter().map(|x| -x));
    let (merged, weights) = merge_duplicates(&all, &w);
    Ok(weighted_energy(&a.spec, &merged, &weights).max(0.0))
}

fn merge_duplicates(points: &Points, w: &[f64]) -> (Points, Vec<f64>) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    let cmp = |i: &usize, j: &usize| {
        points
            .point(*i)
            .iter()
            .zip(points.point(*j))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    };
    order.sort_by(cmp);
    let mut out = Points::empty(points.dim());
    let mut weights = Vec::new();
    let mut last: Option<usize> = None;
    for &i in &order {
        match last {
            Some(l) if points.point(l) == points.point(i) => {
                *weights.last_mut().unwrap() += w[i];
            }
            _ => {
                out.push(points.point(i));
                weights.push(w[i]);
                last = Some(i);
            }
        }
    }
    (out, weights)
}

/// The minimal-seminorm interpolant of `(x, y)`.
pub fn fit_interpolant(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
) -> Result<FittedModel> {
    let sys = assembly::interp_system(spec, frame, x, y)?;
    let sol = assembly::solve_block(&sys)?;
    let parts = sys.split(&sol);
    FittedModel::from_solution(*spec, x.clone(), parts[0], parts[1], ModelKind::Interpolant, 0.0)
}

/// `(2 pi)^(d/2) v^T G v` for an explicit coefficient vector.
pub fn coefficient_energy(spec: &KernelSpec, centers: &Points, v: &[f64]) -> Result<f64> {
    if v.len() != centers.len() {
        return Err(Error::Shape {
            expected: centers.len(),
            got: v.len(),
        });
    }
    Ok(weighted_energy(spec, centers, v))
}

/// Dense `G_ZZ` of a model's centers, mainly for diagnostics.
pub fn center_gram(model: &FittedModel) -> DMatrix<f64> {
    assembly::basis_matrix(&model.spec, &model.centers, &model.centers)
        .expect("model centers match the kernel dimension")
}
