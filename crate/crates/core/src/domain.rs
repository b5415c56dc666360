//! Axis-aligned box domains and flat point storage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box with an open/closed flag on every face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    open_lower: Vec<bool>,
    open_upper: Vec<bool>,
}

impl Domain {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        open_lower: Vec<bool>,
        open_upper: Vec<bool>,
    ) -> Result<Self> {
        let d = lower.len();
        if d == 0 {
            return Err(Error::InvalidInput(
                "domain must have dimension >= 1".into(),
            ));
        }
        for (what, len) in [
            ("upper bounds", upper.len()),
            ("lower open flags", open_lower.len()),
            ("upper open flags", open_upper.len()),
        ] {
            if len != d {
                return Err(Error::LengthMismatch {
                    what,
                    expected: d,
                    got: len,
                });
            }
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidInput(format!(
                    "degenerate interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            open_lower,
            open_upper,
        })
    }

    /// The open unit cube `(0,1)^d`.
    pub fn open_unit(dim: usize) -> Self {
        Self {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
            open_lower: vec![true; dim],
            open_upper: vec![true; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().enumerate().all(|(k, &v)| {
                let above = if self.open_lower[k] {
                    v > self.lower[k]
                } else {
                    v >= self.lower[k]
                };
                let below = if self.open_upper[k] {
                    v < self.upper[k]
                } else {
                    v <= self.upper[k]
                };
                above && below
            })
    }

    /// Nodes of the closed box along axis `k` with `nodes` equally spaced
    /// values, minus the endpoints lying on open faces.
    pub fn axis_nodes(&self, k: usize, nodes: usize) -> Vec<f64> {
        let (lo, hi) = (self.lower[k], self.upper[k]);
        if nodes == 1 {
            return vec![0.5 * (lo + hi)];
        }
        let step = (hi - lo) / (nodes - 1) as f64;
        (0..nodes)
            .filter(|&j| !(j == 0 && self.open_lower[k]) && !(j == nodes - 1 && self.open_upper[k]))
            .map(|j| {
                if j == nodes - 1 {
                    hi
                } else {
                    lo + j as f64 * step
                }
            })
            .collect()
    }

    /// Tensor-product grid built from [`Domain::axis_nodes`] on every axis,
    /// last coordinate varying fastest.
    pub fn grid(&self, nodes_per_dim: usize) -> Result<PointSet> {
        if nodes_per_dim == 0 {
            return Err(Error::InvalidInput(
                "grid needs at least one node per dimension".into(),
            ));
        }
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|k| self.axis_nodes(k, nodes_per_dim))
            .collect();
        if axes.iter().any(Vec::is_empty) {
            return Err(Error::InvalidInput(format!(
                "{nodes_per_dim} nodes per dimension leave no interior grid point"
            )));
        }
        let total: usize = axes.iter().map(Vec::len).product();
        let d = self.dim();
        let mut coords = Vec::with_capacity(total * d);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            coords.extend(idx.iter().enumerate().map(|(k, &j)| axes[k][j]));
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        PointSet::new(d, coords)
    }
}

/// Ordered set of `d`-dimensional points stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("point dimension must be >= 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into {dim}-dimensional points",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate in point {}",
                bad / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    /// One-dimensional point set.
    pub fn from_1d(xs: Vec<f64>) -> Result<Self> {
        Self::new(1, xs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        self.coords.extend_from_slice(x);
        Ok(())
    }

    /// Sub-set made of the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }

    /// Fails with the first coinciding pair, if any.
    pub fn check_distinct(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in 0..i {
                if self.point(i) == self.point(j) {
                    return Err(Error::DuplicatePoints {
                        first: j,
                        second: i,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn check_inside(&self, domain: &Domain) -> Result<()> {
        if domain.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: self.dim,
            });
        }
        match self.iter().position(|x| !domain.contains(x)) {
            Some(i) => Err(Error::InvalidInput(format!(
                "point {i} lies outside the domain"
            ))),
            None => Ok(()),
        }
    }
}

pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}
