use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A finite set of points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Shape {
                expected: (coords.len() / dim + 1) * dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("point coordinates must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim: dim.max(1),
            coords: Vec::new(),
        }
    }

    /// Builds a one-dimensional point set.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    got: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    /// Points selected by index, in the order given.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self {
            dim: self.dim,
            coords,
        }
    }

    /// Contiguous range of points `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords[start * self.dim..end * self.dim].to_vec(),
        }
    }

    /// Concatenation of `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "point dimension mismatch");
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self {
            dim: self.dim,
            coords,
        }
    }

    /// Index of the first pair of identical points, if any.
    pub fn find_duplicate(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.point(a)
                .iter()
                .zip(self.point(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        order
            .windows(2)
            .find(|w| self.point(w[0]) == self.point(w[1]))
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}
