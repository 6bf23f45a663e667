//! Tensor-grid trapezoid rule on a truncated cube.
//!
//! Spectral densities here carry a Gaussian envelope `exp(-σ²‖ω‖²/2)`, so
//! truncating to `[-8/σ, 8/σ]^d` drops mass below `e^-32`. Node counts per
//! axis shrink with dimension to keep the grid near 1.7e7 points.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Truncation radius in units of `1/σ`.
pub const RADIUS_SIGMAS: f64 = 8.0;
pub const MAX_DIM: usize = 3;

pub fn nodes_per_axis(dim: usize) -> Option<usize> {
    match dim {
        1 => Some(4097),
        2 => Some(1025),
        3 => Some(257),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct TrapezoidGrid {
    dim: usize,
    axis: Vec<f64>,
    weights: Vec<f64>,
}

impl TrapezoidGrid {
    pub fn new(dim: usize, radius: f64, nodes: usize) -> Self {
        assert!(nodes >= 2 && radius > 0.0);
        let h = 2.0 * radius / (nodes - 1) as f64;
        let axis = (0..nodes).map(|i| -radius + h * i as f64).collect();
        let mut weights = vec![h; nodes];
        weights[0] = 0.5 * h;
        weights[nodes - 1] = 0.5 * h;
        Self { dim, axis, weights }
    }

    /// The documented grid for a kernel with bandwidth `sigma` in `dim` dimensions.
    pub fn spectral(dim: usize, sigma: f64) -> Result<Self> {
        let nodes = nodes_per_axis(dim).ok_or(Error::UnsupportedDimension { dim, max: MAX_DIM })?;
        Ok(Self::new(dim, RADIUS_SIGMAS / sigma, nodes))
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `N` functions at once; `f` writes their values at a node.
    pub fn integrate<const N: usize, F>(&self, f: F) -> [f64; N]
    where
        F: Fn(&[f64]) -> [f64; N] + Sync,
    {
        let n = self.axis.len();
        let dim = self.dim;
        (0..n)
            .into_par_iter()
            .map(|i0| {
                let mut acc = [0.0; N];
                let mut point = vec![0.0; dim];
                point[0] = self.axis[i0];
                let inner = n.pow(dim as u32 - 1);
                for flat in 0..inner {
                    let mut w = self.weights[i0];
                    let mut rest = flat;
                    for k in 1..dim {
                        let idx = rest % n;
                        rest /= n;
                        point[k] = self.axis[idx];
                        w *= self.weights[idx];
                    }
                    let v = f(&point);
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += w * x;
                    }
                }
                acc
            })
            .reduce(
                || [0.0; N],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    }
}
