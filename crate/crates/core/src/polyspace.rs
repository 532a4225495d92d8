//! Total-degree polynomial spaces, unisolvency and Lagrange interpolation.
//!
//! `P_theta` is the space of polynomials in `d` variables of total degree
//! strictly less than `theta`. Its monomial basis is indexed by multi-indices
//! in graded order: ascending degree, and within one degree descending
//! lexicographic order, so `(d=2, theta=3)` gives
//! `1, x1, x2, x1^2, x1 x2, x2^2`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::points::Points;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Exponent vector of a monomial `x^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Evaluates the monomial `x^alpha`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .fold(1.0, |acc, (&e, &xi)| acc * ipow(xi, e))
    }
}

#[inline]
fn ipow(x: f64, e: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..e {
        r *= x;
    }
    r
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Every multi-index of length `d` with degree below `theta`, in graded order.
pub fn enumerate_multi_indices(d: usize, theta: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(Error::Parameter("dimension d must be at least 1".into()));
    }
    if theta == 0 {
        return Err(Error::Parameter("order theta must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(binomial(theta - 1 + d, d));
    let mut buf = vec![0u32; d];
    for degree in 0..theta as u32 {
        push_degree(&mut out, &mut buf, 0, degree);
    }
    Ok(out)
}

// Fills buf[pos..] with all compositions of `remaining`, largest leading entry first.
fn push_degree(out: &mut Vec<MultiIndex>, buf: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[pos] = e;
        push_degree(out, buf, pos + 1, remaining - e);
    }
}

/// The polynomial space `P_theta` in `d` variables with its monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFrame {
    dim: usize,
    theta: usize,
    indices: Vec<MultiIndex>,
}

impl PolyFrame {
    pub fn new(dim: usize, theta: usize) -> Result<Self> {
        let indices = enumerate_multi_indices(dim, theta)?;
        Ok(Self {
            dim,
            theta,
            indices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// `M = dim P_theta`.
    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// Values of every basis monomial at `x`.
    pub fn monomials(&self, x: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|a| a.monomial(x)).collect()
    }

    pub fn eval_poly(&self, coeffs: &[f64], x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(coeffs)
            .map(|(a, c)| c * a.monomial(x))
            .sum()
    }

    fn check_dim(&self, points: &Points) -> Result<()> {
        if points.dim() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                got: points.dim(),
            });
        }
        Ok(())
    }

    /// The `N x M` unisolvency matrix `P_X`, entry `(i, j) = p_j(x_i)`.
    pub fn unisolvency_matrix(&self, points: &Points) -> Result<DMatrix<f64>> {
        self.check_dim(points)?;
        let m = self.size();
        Ok(DMatrix::from_fn(points.len(), m, |i, j| {
            self.indices[j].monomial(points.point(i))
        }))
    }

    /// Whether the only polynomial in `P_theta` vanishing on `points` is zero.
    pub fn is_unisolvent(&self, points: &Points) -> Result<bool> {
        self.check_dim(points)?;
        if points.is_empty() {
            return Err(Error::Input("point set is empty".into()));
        }
        if let Some((i, j)) = points.find_duplicate() {
            return Err(Error::Input(alloc::format!(
                "points {i} and {j} coincide"
            )));
        }
        if points.len() < self.size() {
            return Ok(false);
        }
        Ok(numerical_rank(&self.unisolvency_matrix(points)?) == self.size())
    }

    /// Greedy extraction of a minimal unisolvent subset.
    ///
    /// Points are scanned in input order and kept when they increase the rank
    /// of the accumulated rows of `P_X`.
    pub fn minimal_unisolvent_subset(&self, points: &Points) -> Result<UnisolventFrame> {
        self.check_dim(points)?;
        let m = self.size();
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
        for (i, x) in points.iter().enumerate() {
            let row = self.monomials(x);
            rows.push(row);
            let trial = DMatrix::from_fn(rows.len(), m, |r, c| rows[r][c]);
            if numerical_rank(&trial) == rows.len() {
                chosen.push(i);
                if chosen.len() == m {
                    break;
                }
            } else {
                rows.pop();
            }
        }
        if chosen.len() < m {
            return Err(Error::NotUnisolvent {
                theta: self.theta,
                rank: chosen.len(),
                required: m,
            });
        }
        UnisolventFrame::from_points(self.clone(), points.select(&chosen), chosen)
    }

    /// Errors unless `points` is unisolvent for this frame.
    pub fn require_unisolvent(&self, points: &Points) -> Result<()> {
        if self.is_unisolvent(points)? {
            Ok(())
        } else {
            let rank = numerical_rank(&self.unisolvency_matrix(points)?);
            Err(Error::NotUnisolvent {
                theta: self.theta,
                rank,
                required: self.size(),
            })
        }
    }
}

/// Rank of `a` counting singular values above `RANK_TOLERANCE * sigma_max`.
pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * smax).count()
}

/// A minimal unisolvent set `A` with its cardinal (Lagrange) basis.
///
/// Row `j` of `cardinal` holds the monomial coefficients of `l_j`, so
/// `l_j(a_i) = delta_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnisolventFrame {
    frame: PolyFrame,
    points: Points,
    source_indices: Vec<usize>,
    cardinal: DMatrix<f64>,
}

impl UnisolventFrame {
    /// Builds the cardinal basis on exactly `M` points.
    pub fn from_points(frame: PolyFrame, points: Points, source_indices: Vec<usize>) -> Result<Self> {
        let m = frame.size();
        if points.len() != m {
            return Err(Error::Shape {
                expected: m,
                got: points.len(),
            });
        }
        let pa = frame.unisolvency_matrix(&points)?;
        let rank = numerical_rank(&pa);
        if rank < m {
            return Err(Error::NotUnisolvent {
                theta: frame.theta(),
                rank,
                required: m,
            });
        }
        let inv = pa.try_inverse().ok_or(Error::NotUnisolvent {
            theta: frame.theta(),
            rank,
            required: m,
        })?;
        Ok(Self {
            frame,
            points,
            source_indices,
            cardinal: inv.transpose(),
        })
    }

    pub fn frame(&self) -> &PolyFrame {
        &self.frame
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    /// Positions of `A` within the point set it was extracted from.
    pub fn source_indices(&self) -> &[usize] {
        &self.source_indices
    }

    pub fn cardinal(&self) -> &DMatrix<f64> {
        &self.cardinal
    }

    /// `[l_1(x), ..., l_M(x)]`.
    pub fn cardinal_values(&self, x: &[f64]) -> Vec<f64> {
        let mono = self.frame.monomials(x);
        (0..self.frame.size())
            .map(|j| {
                self.cardinal
                    .row(j)
                    .iter()
                    .zip(&mono)
                    .map(|(c, p)| c * p)
                    .sum()
            })
            .collect()
    }

    /// `Pf(x) = sum_i f(a_i) l_i(x)`.
    pub fn lagrange_apply(&self, samples: &[f64], x: &[f64]) -> Result<f64> {
        if samples.len() != self.frame.size() {
            return Err(Error::Shape {
                expected: self.frame.size(),
                got: samples.len(),
            });
        }
        Ok(self
            .cardinal_values(x)
            .iter()
            .zip(samples)
            .map(|(l, f)| l * f)
            .sum())
    }

    /// `Qf(x) = f(x) - Pf(x)`.
    pub fn lagrange_complement(&self, samples: &[f64], x: &[f64], fx: f64) -> Result<f64> {
        Ok(fx - self.lagrange_apply(samples, x)?)
    }

    /// Monomial coefficients of the polynomial `Pf`.
    pub fn lagrange_coefficients(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.frame.size() {
            return Err(Error::Shape {
                expected: self.frame.size(),
                got: samples.len(),
            });
        }
        let m = self.frame.size();
        Ok((0..m)
            .map(|k| (0..m).map(|j| samples[j] * self.cardinal[(j, k)]).sum())
            .collect())
    }
}
