use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Known values `g` on a labeled subset `S` of the points.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelConstraint {
    indices: Vec<usize>,
    values: Vec<f64>,
    labeled: Vec<bool>,
    dense: Vec<f64>,
}

impl LabelConstraint {
    /// Builds the constraint for an `n`-point domain from `(index, value)`
    /// pairs. Pairs may come in any order; indices must be unique.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidLabels("labeled set is empty".into()));
        }
        pairs.sort_by_key(|p| p.0);
        let mut labeled = alloc::vec![false; n];
        let mut dense = alloc::vec![0.0; n];
        for &(i, v) in &pairs {
            if i >= n {
                return Err(Error::InvalidLabels(format!("index {i} out of range for {n} points")));
            }
            if labeled[i] {
                return Err(Error::InvalidLabels(format!("index {i} labeled twice")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidLabels(format!("non-finite value at index {i}")));
            }
            labeled[i] = true;
            dense[i] = v;
        }
        let (indices, values) = pairs.into_iter().unzip();
        Ok(Self { indices, values, labeled, dense })
    }

    /// Number of points in the domain, `|V|`.
    #[inline]
    pub fn point_count(&self) -> usize {
        self.labeled.len()
    }

    /// Number of labeled points, `|S|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Sorted labeled indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn is_labeled(&self, x: usize) -> bool {
        self.labeled[x]
    }

    #[inline]
    pub fn value(&self, x: usize) -> Option<f64> {
        self.labeled[x].then(|| self.dense[x])
    }

    /// `g` on labeled points, 0 elsewhere.
    pub fn dense_values(&self) -> &[f64] {
        &self.dense
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.point_count()
    }

    /// The label weight `|V| / |S|`.
    pub fn default_mu(&self) -> f64 {
        self.point_count() as f64 / self.len() as f64
    }

    /// Same labeled set with every value shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v += c);
        for &i in &out.indices {
            out.dense[i] += c;
        }
        out
    }
}
