//! Dense point clouds in `R^d`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `n` points in `d`-dimensional feature space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n: usize,
    dim: usize,
}

impl PointCloud {
    /// Wraps a row-major buffer of `n * dim` coordinates.
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || data.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if data.len() % dim != 0 {
            return Err(Error::RaggedCloud { len: data.len(), dim });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate { point: pos / dim, dim: pos % dim });
        }
        let n = data.len() / dim;
        Ok(Self { data, n, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::RaggedCloud { len: (i + 1) * dim + r.len() - dim, dim });
            }
            data.extend_from_slice(r);
        }
        Self::new(data, dim)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Squared Euclidean distance between points `i` and `j`.
    #[inline]
    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.point(i), self.point(j))
    }
}

/// Squared Euclidean distance, accumulated in four lanes so the loop vectorizes.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let o = c * 4;
        for l in 0..4 {
            let t = a[o + l] - b[o + l];
            acc[l] += t * t;
        }
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        let t = a[i] - b[i];
        tail += t * t;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
