//! Dense symmetric-indefinite factorization (Bunch–Kaufman `P A P^T = L D L^T`).
//!
//! The saddle-point systems assembled in this crate are symmetric but
//! indefinite, so Cholesky does not apply and the diagonal pivoting of
//! Bunch and Kaufman with 1x1 and 2x2 blocks is used instead.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative residual accepted by [`solve_symmetric`].
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

// (1 + sqrt(17)) / 8
const BK_ALPHA: f64 = 0.6403882032022076;

/// Bunch–Kaufman factors of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricFactor {
    n: usize,
    // Row-major lower triangle: unit L below the block diagonal, D on it.
    lower: Vec<f64>,
    perm: Vec<usize>,
    // Size (1 or 2) of the pivot block starting at each row; 0 for the
    // second row of a 2x2 block.
    block: Vec<u8>,
}

impl SymmetricFactor {
    /// Factors the symmetric matrix `a`; only its lower triangle is read.
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Shape {
                expected: n,
                got: a.ncols(),
            });
        }
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                l[i * n + j] = a[(i, j)];
            }
        }
        let at = |l: &[f64], i: usize, j: usize| {
            if j <= i {
                l[i * n + j]
            } else {
                l[j * n + i]
            }
        };
        let mut perm: Vec<usize> = (0..n).collect();
        let mut block = vec![0u8; n];
        let mut k = 0;
        while k < n {
            let absakk = l[k * n + k].abs();
            let (imax, colmax) = ((k + 1)..n)
                .map(|i| (i, l[i * n + k].abs()))
                .fold((k, 0.0), |best, c| if c.1 > best.1 { c } else { best });
            let (kp, kstep) = if absakk.max(colmax) == 0.0 {
                return Err(Error::Solve {
                    residual: f64::INFINITY,
                });
            } else if absakk >= BK_ALPHA * colmax {
                (k, 1)
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .map(|j| at(&l, imax, j).abs())
                    .fold(0.0, f64::max);
                if absakk * rowmax >= BK_ALPHA * colmax * colmax {
                    (k, 1)
                } else if l[imax * n + imax].abs() >= BK_ALPHA * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };
            let kk = k + kstep - 1;
            if kp != kk {
                // Symmetric interchange of rows/columns kk and kp (kp > kk).
                for i in (kp + 1)..n {
                    l.swap(i * n + kk, i * n + kp);
                }
                for j in (kk + 1)..kp {
                    l.swap(j * n + kk, kp * n + j);
                }
                l.swap(kk * n + kk, kp * n + kp);
                if kstep == 2 {
                    l.swap(kk * n + k, kp * n + k);
                }
                for j in 0..k {
                    l.swap(kk * n + j, kp * n + j);
                }
                perm.swap(kk, kp);
            }
            if kstep == 1 {
                let d = l[k * n + k];
                let inv = 1.0 / d;
                for i in (k + 1)..n {
                    let lik = l[i * n + k] * inv;
                    let wi = l[i * n + k];
                    if wi != 0.0 {
                        let (head, tail) = l.split_at_mut(i * n);
                        let row = &mut tail[..=i];
                        for j in (k + 1)..=i {
                            let wj = if j == i { wi } else { head[j * n + k] };
                            row[j] -= lik * wj;
                        }
                    }
                }
                for i in (k + 1)..n {
                    l[i * n + k] *= inv;
                }
                block[k] = 1;
            } else {
                let d11 = l[k * n + k];
                let d21 = l[(k + 1) * n + k];
                let d22 = l[(k + 1) * n + k + 1];
                let det = d11 * d22 - d21 * d21;
                if det == 0.0 {
                    return Err(Error::Solve {
                        residual: f64::INFINITY,
                    });
                }
                // D^{-1} = [[d22, -d21], [-d21, d11]] / det
                let (e11, e21, e22) = (d22 / det, -d21 / det, d11 / det);
                let mut lcols = vec![(0.0, 0.0); n];
                for i in (k + 2)..n {
                    let w0 = l[i * n + k];
                    let w1 = l[i * n + k + 1];
                    lcols[i] = (w0 * e11 + w1 * e21, w0 * e21 + w1 * e22);
                }
                for i in (k + 2)..n {
                    let (li0, li1) = lcols[i];
                    if li0 == 0.0 && li1 == 0.0 {
                        continue;
                    }
                    for j in (k + 2)..=i {
                        let wj0 = if j == i { l[i * n + k] } else { l[j * n + k] };
                        let wj1 = if j == i {
                            l[i * n + k + 1]
                        } else {
                            l[j * n + k + 1]
                        };
                        l[i * n + j] -= li0 * wj0 + li1 * wj1;
                    }
                }
                for i in (k + 2)..n {
                    l[i * n + k] = lcols[i].0;
                    l[i * n + k + 1] = lcols[i].1;
                }
                block[k] = 2;
                block[k + 1] = 0;
            }
            k += kstep;
        }
        Ok(Self {
            n,
            lower: l,
            perm,
            block,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of (1x1 + 2x2) pivot blocks with negative determinant
    /// contributions, i.e. the negative inertia of the factored matrix.
    pub fn negative_eigenvalues(&self) -> usize {
        let n = self.n;
        let mut neg = 0;
        let mut k = 0;
        while k < n {
            if self.block[k] == 1 {
                if self.lower[k * n + k] < 0.0 {
                    neg += 1;
                }
                k += 1;
            } else {
                let d11 = self.lower[k * n + k];
                let d21 = self.lower[(k + 1) * n + k];
                let d22 = self.lower[(k + 1) * n + k + 1];
                let det = d11 * d22 - d21 * d21;
                neg += if det < 0.0 {
                    1
                } else if d11 + d22 < 0.0 {
                    2
                } else {
                    0
                };
                k += 2;
            }
        }
        neg
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Shape {
                expected: n,
                got: b.len(),
            });
        }
        let l = &self.lower;
        let mut z: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // L w = z
        for i in 0..n {
            let stop = if self.block[i] == 0 { i - 1 } else { i };
            let mut s = z[i];
            for j in 0..stop {
                s -= l[i * n + j] * z[j];
            }
            z[i] = s;
        }
        // D u = w
        let mut k = 0;
        while k < n {
            if self.block[k] == 1 {
                z[k] /= l[k * n + k];
                k += 1;
            } else {
                let d11 = l[k * n + k];
                let d21 = l[(k + 1) * n + k];
                let d22 = l[(k + 1) * n + k + 1];
                let det = d11 * d22 - d21 * d21;
                let (w0, w1) = (z[k], z[k + 1]);
                z[k] = (d22 * w0 - d21 * w1) / det;
                z[k + 1] = (d11 * w1 - d21 * w0) / det;
                k += 2;
            }
        }
        // L^T t = u
        for i in (0..n).rev() {
            let skip = if i + 1 < n && self.block[i + 1] == 0 {
                i + 2
            } else {
                i + 1
            };
            let mut s = z[i];
            for j in skip..n {
                s -= l[j * n + i] * z[j];
            }
            z[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        Ok(x)
    }
}

/// Normwise relative residual `|A x - b|_inf / (|A|_inf |x|_inf + |b|_inf)`.
pub fn relative_residual(a: &DMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
    let xv = DVector::from_column_slice(x);
    let r = a * &xv - DVector::from_column_slice(b);
    let rn = r.amax();
    let an = a
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let denom = an * xv.amax() + b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if denom == 0.0 {
        rn
    } else {
        rn / denom
    }
}

/// Solves the symmetric system `a x = b`, applies one step of iterative
/// refinement and rejects the result if the relative residual exceeds
/// [`RESIDUAL_TOLERANCE`].
pub fn solve_symmetric(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let factor = SymmetricFactor::new(a)?;
    let mut x = factor.solve(b)?;
    let r = DVector::from_column_slice(b) - a * DVector::from_column_slice(&x);
    let dx = factor.solve(r.as_slice())?;
    let refined: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
    let res_refined = relative_residual(a, &refined, b);
    let res = relative_residual(a, &x, b);
    let residual = if res_refined.is_finite() && res_refined <= res {
        x = refined;
        res_refined
    } else {
        res
    };
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::Solve { residual });
    }
    Ok(x)
}
