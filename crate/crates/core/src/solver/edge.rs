use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::graph::SparseWeightGraph;

/// One real value per stored directed edge of a [`SparseWeightGraph`], in the
/// graph's edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField(pub(crate) Vec<f64>);

impl EdgeField {
    pub fn zeros(graph: &SparseWeightGraph) -> Self {
        Self(alloc::vec![0.0; graph.edge_count()])
    }

    pub fn from_vec(graph: &SparseWeightGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(Error::ShapeMismatch { expected: graph.edge_count(), actual: values.len() });
        }
        Ok(Self(values))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// The entries on edges leaving `x`.
    pub fn row<'a>(&'a self, graph: &SparseWeightGraph, x: usize) -> &'a [f64] {
        &self.0[graph.edge_range(x)]
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|v| v * v).sum())
    }

    /// `|self - other|_2`.
    pub fn distance(&self, other: &Self) -> f64 {
        libm::sqrt(self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum())
    }

    pub(crate) fn check_aligned(&self, graph: &SparseWeightGraph) -> Result<()> {
        if self.0.len() == graph.edge_count() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { expected: graph.edge_count(), actual: self.0.len() })
        }
    }
}

impl Index<usize> for EdgeField {
    type Output = f64;

    fn index(&self, e: usize) -> &f64 {
        &self.0[e]
    }
}

impl IndexMut<usize> for EdgeField {
    fn index_mut(&mut self, e: usize) -> &mut f64 {
        &mut self.0[e]
    }
}
