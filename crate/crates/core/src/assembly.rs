//! Basis-function matrices and the block saddle-point systems of the three
//! variational problems: interpolation, Exact smoothing and Approximate
//! smoothing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg;
use crate::points::Points;
use crate::polyspace::PolyFrame;
use crate::random::SeededRng;

/// Relative asymmetry tolerated in assembled systems.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Slack on `v^T G v >= 0` in [`cpd_check`].
pub const CPD_SLACK: f64 = 1e-10;
/// Rows of the data set processed together by [`ApproxAccumulator`].
pub const DEFAULT_CHUNK: usize = 4096;

/// Which variational problem a system belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Interpolation,
    Exact,
    Approximate,
}

/// A square linear system with a named block partition.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: Vec<f64>,
    pub layout: Vec<(&'static str, usize)>,
    pub kind: SystemKind,
}

impl BlockSystem {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |A - A^T| / max |A|`.
    pub fn asymmetry(&self) -> f64 {
        let a = &self.matrix;
        let scale = a.amax();
        if scale == 0.0 {
            return 0.0;
        }
        let n = a.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
            }
        }
        worst / scale
    }

    /// Splits a solution vector along the layout.
    pub fn split<'a>(&self, sol: &'a [f64]) -> Vec<&'a [f64]> {
        let mut out = Vec::with_capacity(self.layout.len());
        let mut start = 0;
        for &(_, len) in &self.layout {
            out.push(&sol[start..start + len]);
            start += len;
        }
        out
    }
}

/// `G_{Y,Z}`, entry `(i, j) = G(y_i - z_j)`.
pub fn basis_matrix(spec: &KernelSpec, y: &Points, z: &Points) -> Result<DMatrix<f64>> {
    check_dims(spec, y)?;
    check_dims(spec, z)?;
    Ok(DMatrix::from_fn(y.len(), z.len(), |i, j| {
        spec.eval_between(y.point(i), z.point(j))
    }))
}

fn check_dims(spec: &KernelSpec, x: &Points) -> Result<()> {
    if x.dim() != spec.dim() {
        return Err(Error::Shape {
            expected: spec.dim(),
            got: x.dim(),
        });
    }
    Ok(())
}

fn check_frame(spec: &KernelSpec, frame: &PolyFrame) -> Result<()> {
    if frame.dim() != spec.dim() || frame.theta() != spec.theta() {
        return Err(Error::Parameter(format!(
            "polynomial frame (d={}, theta={}) does not match kernel (d={}, theta={})",
            frame.dim(),
            frame.theta(),
            spec.dim(),
            spec.theta()
        )));
    }
    Ok(())
}

fn check_data(x: &Points, y: &[f64]) -> Result<()> {
    if y.len() != x.len() {
        return Err(Error::Shape {
            expected: x.len(),
            got: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("data values must be finite".into()));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Parameter(format!(
            "smoothing parameter rho must be finite and non-negative, got {rho}"
        )));
    }
    Ok(())
}

/// `[[G_XX, P_X], [P_X^T, 0]] (v, beta) = (y, 0)`.
pub fn interp_system(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
) -> Result<BlockSystem> {
    saddle_system(spec, frame, x, y, 0.0, SystemKind::Interpolation)
}

/// The interpolation system with `(2 pi)^(d/2) N rho` added to the diagonal of `G_XX`.
pub fn exact_system(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
    rho: f64,
) -> Result<BlockSystem> {
    check_rho(rho)?;
    saddle_system(spec, frame, x, y, rho, SystemKind::Exact)
}

fn saddle_system(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
    rho: f64,
    kind: SystemKind,
) -> Result<BlockSystem> {
    check_frame(spec, frame)?;
    check_data(x, y)?;
    frame.require_unisolvent(x)?;
    let n = x.len();
    let m = frame.size();
    let g = basis_matrix(spec, x, x)?;
    let p = frame.unisolvency_matrix(x)?;
    let mut a = DMatrix::zeros(n + m, n + m);
    a.view_mut((0, 0), (n, n)).copy_from(&g);
    a.view_mut((0, n), (n, m)).copy_from(&p);
    a.view_mut((n, 0), (m, n)).copy_from(&p.transpose());
    if rho > 0.0 {
        let shift = spec.fourier_scale() * n as f64 * rho;
        for i in 0..n {
            a[(i, i)] += shift;
        }
    }
    let mut rhs = Vec::with_capacity(n + m);
    rhs.extend_from_slice(y);
    rhs.resize(n + m, 0.0);
    Ok(BlockSystem {
        matrix: a,
        rhs,
        layout: vec![("v", n), ("beta", m)],
        kind,
    })
}

/// The rho-independent products of the Approximate smoother system,
/// accumulated by streaming over the data in row chunks so that memory stays
/// `O(N' * chunk)`.
#[derive(Debug, Clone)]
pub struct ApproxAccumulator {
    spec: KernelSpec,
    frame: PolyFrame,
    centers: Points,
    n_data: usize,
    // G_{X',X} G_{X,X'}
    gram: DMatrix<f64>,
    // G_{X',X} P_X
    cross: DMatrix<f64>,
    // P_X^T P_X
    poly_gram: DMatrix<f64>,
    // G_{X',X} y
    rhs_centers: DVector<f64>,
    // P_X^T y
    rhs_poly: DVector<f64>,
    center_gram: DMatrix<f64>,
    center_poly: DMatrix<f64>,
}

impl ApproxAccumulator {
    pub fn new(
        spec: &KernelSpec,
        frame: &PolyFrame,
        x: &Points,
        y: &[f64],
        centers: &Points,
        chunk: usize,
    ) -> Result<Self> {
        check_frame(spec, frame)?;
        check_data(x, y)?;
        check_dims(spec, centers)?;
        frame.require_unisolvent(x)?;
        frame.require_unisolvent(centers)?;
        let chunk = chunk.max(1);
        let nc = centers.len();
        let m = frame.size();
        let mut gram = DMatrix::zeros(nc, nc);
        let mut cross = DMatrix::zeros(nc, m);
        let mut poly_gram = DMatrix::zeros(m, m);
        let mut rhs_centers = DVector::zeros(nc);
        let mut rhs_poly = DVector::zeros(m);
        let mut start = 0;
        while start < x.len() {
            let end = (start + chunk).min(x.len());
            let rows = end - start;
            let b = DMatrix::from_fn(rows, nc, |i, j| {
                spec.eval_between(x.point(start + i), centers.point(j))
            });
            let p = DMatrix::from_fn(rows, m, |i, j| {
                frame.indices()[j].monomial(x.point(start + i))
            });
            let yc = DVector::from_column_slice(&y[start..end]);
            gram += b.tr_mul(&b);
            cross += b.tr_mul(&p);
            poly_gram += p.tr_mul(&p);
            rhs_centers += b.tr_mul(&yc);
            rhs_poly += p.tr_mul(&yc);
            start = end;
        }
        // Products computed blockwise are symmetric only up to rounding.
        symmetrize(&mut gram);
        symmetrize(&mut poly_gram);
        Ok(Self {
            spec: *spec,
            frame: frame.clone(),
            center_gram: basis_matrix(spec, centers, centers)?,
            center_poly: frame.unisolvency_matrix(centers)?,
            centers: centers.clone(),
            n_data: x.len(),
            gram,
            cross,
            poly_gram,
            rhs_centers,
            rhs_poly,
        })
    }

    pub fn centers(&self) -> &Points {
        &self.centers
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    /// Size `N' + 2M` of the system, independent of `N`.
    pub fn system_dim(&self) -> usize {
        self.centers.len() + 2 * self.frame.size()
    }

    /// Assembles the `(N' + 2M)`-square system for smoothing parameter `rho`.
    pub fn system(&self, rho: f64) -> Result<BlockSystem> {
        check_rho(rho)?;
        let nc = self.centers.len();
        let m = self.frame.size();
        let dim = nc + 2 * m;
        let shift = self.spec.fourier_scale() * self.n_data as f64 * rho;
        let mut a = DMatrix::zeros(dim, dim);
        let top = &self.center_gram * shift + &self.gram;
        a.view_mut((0, 0), (nc, nc)).copy_from(&top);
        a.view_mut((0, nc), (nc, m)).copy_from(&self.cross);
        a.view_mut((nc, 0), (m, nc)).copy_from(&self.cross.transpose());
        a.view_mut((0, nc + m), (nc, m)).copy_from(&self.center_poly);
        a.view_mut((nc + m, 0), (m, nc))
            .copy_from(&self.center_poly.transpose());
        a.view_mut((nc, nc), (m, m)).copy_from(&self.poly_gram);
        let mut rhs = Vec::with_capacity(dim);
        rhs.extend_from_slice(self.rhs_centers.as_slice());
        rhs.extend_from_slice(self.rhs_poly.as_slice());
        rhs.resize(dim, 0.0);
        Ok(BlockSystem {
            matrix: a,
            rhs,
            layout: vec![("alpha", nc), ("beta", m), ("gamma", m)],
            kind: SystemKind::Approximate,
        })
    }
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// The Approximate smoother system for centers `centers` and parameter `rho`.
pub fn approx_system(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    y: &[f64],
    centers: &Points,
    rho: f64,
) -> Result<BlockSystem> {
    ApproxAccumulator::new(spec, frame, x, y, centers, DEFAULT_CHUNK)?.system(rho)
}

/// Solves a symmetric block system, verifying the residual.
pub fn solve_block(sys: &BlockSystem) -> Result<Vec<f64>> {
    if sys.rhs.len() != sys.dim() {
        return Err(Error::Shape {
            expected: sys.dim(),
            got: sys.rhs.len(),
        });
    }
    let asym = sys.asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::Input(format!(
            "block system is not symmetric (relative asymmetry {asym:e})"
        )));
    }
    linalg::solve_symmetric(&sys.matrix, &sys.rhs)
}

/// Projects `v` onto `null(P^T)` given an orthonormal basis `q` of `range(P)`.
pub(crate) fn project_out(q: &DMatrix<f64>, v: &mut DVector<f64>) {
    for _ in 0..2 {
        let c = q.tr_mul(v);
        *v -= q * c;
    }
}

/// Samples random nonzero `v` with `P_X^T v = 0` and checks `v^T G_XX v > 0`
/// up to `-CPD_SLACK * |v|^2`.
pub fn cpd_check(
    spec: &KernelSpec,
    frame: &PolyFrame,
    x: &Points,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    check_frame(spec, frame)?;
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    frame.require_unisolvent(x)?;
    let n = x.len();
    let g = basis_matrix(spec, x, x)?;
    let q = frame.unisolvency_matrix(x)?.qr().q();
    let mut rng = SeededRng::new(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        attempts += 1;
        if attempts > 100 * trials {
            return Err(Error::Input(
                "null space of P_X^T is trivial; no nonzero test vectors exist".into(),
            ));
        }
        let mut v = DVector::from_fn(n, |_, _| rng.uniform(-1.0, 1.0));
        project_out(&q, &mut v);
        let norm2 = v.norm_squared();
        if norm2 < 1e-20 {
            continue;
        }
        let quad = v.dot(&(&g * &v));
        if quad <= -CPD_SLACK * norm2 {
            return Ok(false);
        }
        done += 1;
    }
    Ok(true)
}
