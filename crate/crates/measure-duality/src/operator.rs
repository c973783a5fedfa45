//! Linear constraint operators on grid functions.
//!
//! Operators are assembled as dense matrices from forward-difference
//! stencils (spacing `Δx`, periodic or zero-extension boundary), so the
//! adjoint is exactly the matrix transpose: both source and target carry the
//! same uniform quadrature weight, hence `⟨Au, w⟩ = ⟨u, Aᵀw⟩` holds to the
//! last bit. Kernel bases and image projections come from a dense SVD with a
//! relative singular-value cutoff; in finite dimensions the dual domain is
//! the whole dual grid space, so no domain filter is applied.
//!
//! Grid-function layout is cell-major: `u[cell * components + k]`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::measure::{default_panel, DiscreteMeasure};
use crate::numerics::{self, jacobi_svd};
use crate::tolerances::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorName {
    /// d/dx on scalar 1D fields (N=1 → n=1).
    Gradient1d,
    /// ∂₁u₁ + ∂₂u₂ on 2D vector fields (N=2 → n=1).
    Divergence2d,
    /// ∂₁u₂ − ∂₂u₁ on 2D vector fields (N=2 → n=1).
    Curl2d,
    /// (∂₁u₁, ∂₂u₂, (∂₁u₂+∂₂u₁)/2) on 2D displacements (N=2 → n=3).
    SymmetricGradient2d,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRule {
    Periodic,
    /// Fields are extended by zero outside the domain.
    Zero,
}

struct Factorization {
    rank: usize,
    singular_values: Vec<f64>,
    /// Left singular vectors of the non-null part (span of im A).
    image: Vec<Vec<f64>>,
    /// Right singular vectors of the non-null part (span of im Aᵀ).
    row_space: Vec<Vec<f64>>,
    /// Orthonormal kernel basis (right vectors below the cutoff).
    kernel: Vec<Vec<f64>>,
}

/// A linear operator between grid-function spaces with its exact transpose
/// adjoint. Immutable after construction; the factorization is computed
/// lazily and cached.
pub struct ConstraintOperator {
    grid: Grid,
    name: OperatorName,
    boundary: BoundaryRule,
    primal_components: usize,
    target_components: usize,
    rows: usize,
    cols: usize,
    matrix: Vec<f64>,
    factorization: OnceLock<Factorization>,
}

impl std::fmt::Debug for ConstraintOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConstraintOperator")
            .field("name", &self.name)
            .field("boundary", &self.boundary)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl ConstraintOperator {
    /// Assemble a named stencil operator on a grid.
    pub fn build(name: OperatorName, grid: &Grid, boundary: BoundaryRule) -> Result<Self> {
        match name {
            OperatorName::Gradient1d => {
                if grid.dim() != 1 {
                    return Err(Error::DimensionMismatch(
                        "gradient_1d needs a 1D grid".into(),
                    ));
                }
                Ok(Self::assemble_gradient_1d(grid, boundary))
            }
            OperatorName::Divergence2d
            | OperatorName::Curl2d
            | OperatorName::SymmetricGradient2d => {
                if grid.dim() != 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "{name:?} needs a 2D grid"
                    )));
                }
                Ok(Self::assemble_2d(name, grid, boundary))
            }
            OperatorName::Custom => Err(Error::Domain(
                "custom operators are built from explicit triplets".into(),
            )),
        }
    }

    /// Build from explicit `(row, col, value)` triplets. Row and column
    /// counts must be whole multiples of the cell count.
    pub fn custom(
        grid: &Grid,
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let n = grid.n_cells();
        if rows == 0 || cols == 0 || !rows.is_multiple_of(n) || !cols.is_multiple_of(n) {
            return Err(Error::DimensionMismatch(format!(
                "custom operator {rows}×{cols} must be multiples of {n} cells"
            )));
        }
        let mut matrix = vec![0.0; rows * cols];
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::Domain(format!("triplet ({i},{j}) out of range")));
            }
            matrix[i * cols + j] += v;
        }
        Ok(Self {
            grid: grid.clone(),
            name: OperatorName::Custom,
            boundary: BoundaryRule::Periodic,
            primal_components: cols / n,
            target_components: rows / n,
            rows,
            cols,
            matrix,
            factorization: OnceLock::new(),
        })
    }

    fn assemble_gradient_1d(grid: &Grid, boundary: BoundaryRule) -> Self {
        let n = grid.n_cells();
        let h = grid.spacing(0);
        let mut matrix = vec![0.0; n * n];
        for c in 0..n {
            matrix[c * n + c] -= 1.0 / h;
            match boundary {
                BoundaryRule::Periodic => {
                    matrix[c * n + (c + 1) % n] += 1.0 / h;
                }
                BoundaryRule::Zero => {
                    if c + 1 < n {
                        matrix[c * n + c + 1] += 1.0 / h;
                    }
                }
            }
        }
        Self {
            grid: grid.clone(),
            name: OperatorName::Gradient1d,
            boundary,
            primal_components: 1,
            target_components: 1,
            rows: n,
            cols: n,
            matrix,
            factorization: OnceLock::new(),
        }
    }

    fn assemble_2d(name: OperatorName, grid: &Grid, boundary: BoundaryRule) -> Self {
        let (nx, ny) = (grid.shape()[0], grid.shape()[1]);
        let n = nx * ny;
        let (hx, hy) = (grid.spacing(0), grid.spacing(1));
        let nprim = 2;
        let ntarg = match name {
            OperatorName::SymmetricGradient2d => 3,
            _ => 1,
        };
        let rows = n * ntarg;
        let cols = n * nprim;
        let mut matrix = vec![0.0; rows * cols];
        // forward difference of component k at cell (ix,iy) along `axis`
        let mut add_diff =
            |row: usize, comp: usize, ix: usize, iy: usize, axis: usize, scale: f64| {
                let h = if axis == 0 { hx } else { hy };
                let here = (iy * nx + ix) * nprim + comp;
                matrix[row * cols + here] -= scale / h;
                let neighbor = match (axis, boundary) {
                    (0, BoundaryRule::Periodic) => Some((iy * nx + (ix + 1) % nx) * nprim + comp),
                    (0, BoundaryRule::Zero) => {
                        (ix + 1 < nx).then(|| (iy * nx + ix + 1) * nprim + comp)
                    }
                    (1, BoundaryRule::Periodic) => Some((((iy + 1) % ny) * nx + ix) * nprim + comp),
                    (1, BoundaryRule::Zero) => {
                        (iy + 1 < ny).then(|| ((iy + 1) * nx + ix) * nprim + comp)
                    }
                    _ => unreachable!(),
                };
                if let Some(idx) = neighbor {
                    matrix[row * cols + idx] += scale / h;
                }
            };
        for iy in 0..ny {
            for ix in 0..nx {
                let cell = iy * nx + ix;
                match name {
                    OperatorName::Divergence2d => {
                        add_diff(cell, 0, ix, iy, 0, 1.0);
                        add_diff(cell, 1, ix, iy, 1, 1.0);
                    }
                    OperatorName::Curl2d => {
                        add_diff(cell, 1, ix, iy, 0, 1.0);
                        add_diff(cell, 0, ix, iy, 1, -1.0);
                    }
                    OperatorName::SymmetricGradient2d => {
                        add_diff(cell * 3, 0, ix, iy, 0, 1.0);
                        add_diff(cell * 3 + 1, 1, ix, iy, 1, 1.0);
                        add_diff(cell * 3 + 2, 1, ix, iy, 0, 0.5);
                        add_diff(cell * 3 + 2, 0, ix, iy, 1, 0.5);
                    }
                    _ => unreachable!(),
                }
            }
        }
        Self {
            grid: grid.clone(),
            name,
            boundary,
            primal_components: nprim,
            target_components: ntarg,
            rows,
            cols,
            matrix,
            factorization: OnceLock::new(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn name(&self) -> OperatorName {
        self.name
    }

    pub fn boundary(&self) -> BoundaryRule {
        self.boundary
    }

    pub fn primal_components(&self) -> usize {
        self.primal_components
    }

    pub fn target_components(&self) -> usize {
        self.target_components
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matrix_entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.cols + col]
    }

    /// `A u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[i * self.cols..(i + 1) * self.cols];
            *o = numerics::dot(row, u);
        }
        out
    }

    /// `A* w = Aᵀ w` (exact transpose; uniform quadrature weights cancel).
    pub fn adjoint_apply(&self, w: &[f64]) -> Vec<f64> {
        debug_assert_eq!(w.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let wi = w[i];
            if wi == 0.0 {
                continue;
            }
            let row = &self.matrix[i * self.cols..(i + 1) * self.cols];
            numerics::axpy(wi, row, &mut out);
        }
        out
    }

    fn factorization(&self) -> &Factorization {
        self.factorization.get_or_init(|| {
            let svd = jacobi_svd(self.rows, self.cols, &self.matrix);
            let smax = svd.singular_values.first().copied().unwrap_or(0.0);
            let cutoff = SVD_CUTOFF * smax;
            let rank = svd
                .singular_values
                .iter()
                .filter(|&&s| s > cutoff && s > 0.0)
                .count();
            Factorization {
                rank,
                singular_values: svd.singular_values[..rank].to_vec(),
                image: svd.left[..rank].to_vec(),
                row_space: svd.right[..rank].to_vec(),
                kernel: svd.right[rank..].to_vec(),
            }
        })
    }

    pub fn rank(&self) -> usize {
        self.factorization().rank
    }

    /// Euclidean-orthonormal basis of `ker A` (empty when trivial).
    pub fn kernel_basis(&self) -> &[Vec<f64>] {
        &self.factorization().kernel
    }

    /// Euclidean-orthonormal basis of `im A* = (ker A)^⊥`.
    pub fn row_space_basis(&self) -> &[Vec<f64>] {
        &self.factorization().row_space
    }

    /// Least-squares projection of `tau` onto `im A`, with the Euclidean
    /// residual norm. The residual vanishes (to `TOL_IMAGE` relative) iff
    /// `tau ∈ im A`.
    pub fn project_image(&self, tau: &[f64]) -> (Vec<f64>, f64) {
        debug_assert_eq!(tau.len(), self.rows);
        let f = self.factorization();
        let mut proj = vec![0.0; self.rows];
        for u in &f.image {
            let c = numerics::dot(u, tau);
            numerics::axpy(c, u, &mut proj);
        }
        let residual = tau
            .iter()
            .zip(&proj)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        (proj, residual)
    }

    /// Least-squares solution `w` of `Aᵀ w = p`, or `None` when `p` is not
    /// in `im Aᵀ` (relative residual above `TOL_IMAGE` scale).
    pub fn adjoint_preimage(&self, p: &[f64]) -> Option<Vec<f64>> {
        debug_assert_eq!(p.len(), self.cols);
        let f = self.factorization();
        let mut w = vec![0.0; self.rows];
        for ((v, u), s) in f.row_space.iter().zip(&f.image).zip(&f.singular_values) {
            let c = numerics::dot(v, p) / s;
            numerics::axpy(c, u, &mut w);
        }
        let back = self.adjoint_apply(&w);
        let resid = back
            .iter()
            .zip(p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = 1.0 + numerics::norm(p);
        (resid <= 1e-8 * scale).then_some(w)
    }

    /// Distributional kernel test for a measure: the worst pairing
    /// `|⟨μ, A*φ⟩|` over the smooth test panel, with the membership verdict
    /// for `ker_M A`.
    pub fn apply_to_measure(&self, mu: &DiscreteMeasure) -> Result<KernelMembership> {
        if mu.grid() != &self.grid || mu.components() != self.primal_components {
            return Err(Error::DimensionMismatch(
                "measure does not live on the operator's primal space".into(),
            ));
        }
        let panel = default_panel(&self.grid, self.target_components);
        let mut residual = 0.0f64;
        let mut scale = 1.0f64;
        for phi in &panel {
            let astar_phi = self.adjoint_apply(phi);
            residual = residual.max(mu.weak_star_pair(&astar_phi).abs());
            scale = scale.max(astar_phi.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let threshold =
            TOL_KERNEL * scale * (1.0 + mu.total_variation(crate::measure::Region::All));
        Ok(KernelMembership {
            residual,
            threshold,
            in_kernel: residual < threshold,
        })
    }
}

/// Result of the distributional kernel membership test.
#[derive(Debug, Clone, Copy)]
pub struct KernelMembership {
    pub residual: f64,
    pub threshold: f64,
    pub in_kernel: bool,
}

/// A source term `τ = A u₀` together with the witness `u₀`.
#[derive(Debug, Clone)]
pub struct SourceTerm {
    tau: Vec<f64>,
    u0: Vec<f64>,
}

impl SourceTerm {
    /// Validates that `A u₀` reproduces `τ` (which also certifies
    /// `τ ∈ im A`).
    pub fn new(op: &ConstraintOperator, tau: Vec<f64>, u0: Vec<f64>) -> Result<Self> {
        if tau.len() != op.rows() || u0.len() != op.cols() {
            return Err(Error::DimensionMismatch(
                "source term sizes do not match the operator".into(),
            ));
        }
        let au0 = op.apply(&u0);
        let resid = au0
            .iter()
            .zip(&tau)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if resid > TOL_IMAGE * (1.0 + numerics::norm(&tau)) {
            return Err(Error::Infeasible {
                residual: resid,
                tolerance: TOL_IMAGE,
            });
        }
        Ok(Self { tau, u0 })
    }

    /// Take `τ := A u₀` exactly.
    pub fn from_u0(op: &ConstraintOperator, u0: Vec<f64>) -> Result<Self> {
        if u0.len() != op.cols() {
            return Err(Error::DimensionMismatch(
                "u₀ does not match the operator's primal space".into(),
            ));
        }
        let tau = op.apply(&u0);
        Ok(Self { tau, u0 })
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }
}
