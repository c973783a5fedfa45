//! Axis-aligned uniform grids over a box domain.

use crate::error::{Error, Result};

/// A uniform Cartesian grid of axis-aligned cells covering a box in R^d.
/// Cells are flattened with the first axis fastest: in 2D the cell `(ix, iy)`
/// has index `iy * nx + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    shape: Vec<usize>,
    extent: Vec<(f64, f64)>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, extent: Vec<(f64, f64)>) -> Result<Self> {
        if shape.is_empty() || shape.len() != extent.len() {
            return Err(Error::DimensionMismatch(format!(
                "grid shape {:?} incompatible with extent {:?}",
                shape, extent
            )));
        }
        if shape.contains(&0) {
            return Err(Error::Domain(
                "grid axes must have at least one cell".into(),
            ));
        }
        if extent
            .iter()
            .any(|&(lo, hi)| !(hi > lo) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::Domain("grid extent must be a finite box".into()));
        }
        Ok(Self {
            dim: shape.len(),
            shape,
            extent,
        })
    }

    /// `n` cells on the unit interval.
    pub fn uniform_1d(n: usize) -> Self {
        Self::new(vec![n], vec![(0.0, 1.0)]).unwrap()
    }

    /// `nx × ny` cells on the unit square.
    pub fn uniform_2d(nx: usize, ny: usize) -> Self {
        Self::new(vec![nx, ny], vec![(0.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn extent(&self) -> &[(f64, f64)] {
        &self.extent
    }

    pub fn n_cells(&self) -> usize {
        self.shape.iter().product()
    }

    /// Grid spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        let (lo, hi) = self.extent[axis];
        (hi - lo) / self.shape[axis] as f64
    }

    /// Volume of a single cell (all cells are congruent).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn domain_volume(&self) -> f64 {
        self.extent.iter().map(|&(lo, hi)| hi - lo).product()
    }

    /// Multi-index of a flattened cell index.
    pub fn unflatten(&self, idx: usize) -> Vec<usize> {
        let mut rem = idx;
        let mut multi = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            multi.push(rem % self.shape[a]);
            rem /= self.shape[a];
        }
        multi
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for a in (0..self.dim).rev() {
            idx = idx * self.shape[a] + multi[a];
        }
        idx
    }

    /// Center of the cell with flattened index `idx`.
    pub fn center(&self, idx: usize) -> Vec<f64> {
        let multi = self.unflatten(idx);
        (0..self.dim)
            .map(|a| {
                let (lo, _) = self.extent[a];
                lo + (multi[a] as f64 + 0.5) * self.spacing(a)
            })
            .collect()
    }

    /// Index of the cell whose box contains `x` (clamped to the domain).
    pub fn nearest_cell(&self, x: &[f64]) -> usize {
        let multi: Vec<usize> = (0..self.dim)
            .map(|a| {
                let (lo, _) = self.extent[a];
                let i = ((x[a] - lo) / self.spacing(a)).floor() as isize;
                i.clamp(0, self.shape[a] as isize - 1) as usize
            })
            .collect();
        self.flatten(&multi)
    }

    /// Euclidean distance between two cell centers.
    pub fn center_distance(&self, i: usize, j: usize) -> f64 {
        let ci = self.center(i);
        let cj = self.center(j);
        ci.iter()
            .zip(&cj)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}
