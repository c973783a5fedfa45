//! Discrete vector-valued Radon measures on a grid.
//!
//! A measure is stored in Radon–Nikodým form by construction: a per-cell
//! density (the absolutely continuous part with respect to Lebesgue) plus a
//! list of atoms at cell centers (the only singular objects representable on
//! a fixed grid). Atoms sharing a cell are merged by vector addition, so the
//! polar `dμ^s/d|μ^s| = mass/|mass|` is well defined per atom.
//!
//! The module provides the mass `|μ|`, the generalized area functional
//! `⟨μ⟩(A) = ∫_A √(1+|dμ/dL|²) dx + |μ^s|(A)`, weak* pairings against test
//! functions, mollification (spreading atoms into densities, mass-exactly),
//! the relaxed integral `∫ f(x, dμ/dL) dx + ∫ f^∞(x, dμ^s/d|μ^s|) d|μ^s|`
//! and verdicts for weak*, strict and area-strict convergence of sequences.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::integrand::{bump, ConvexIntegrand};
use crate::numerics;
use crate::tolerances::*;

/// A cell subset to evaluate set functions on. `All` is the whole domain.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    All,
    Cells(&'a [usize]),
}

impl Region<'_> {
    pub fn contains(&self, cell: usize) -> bool {
        match self {
            Region::All => true,
            Region::Cells(cs) => cs.contains(&cell),
        }
    }
}

/// A point mass at a cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub cell: usize,
    pub mass: Vec<f64>,
}

/// A bounded R^N-valued measure on a grid: density plus atoms.
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    grid: Grid,
    components: usize,
    /// Cell-major densities: `density[cell * components + k]`.
    density: Vec<f64>,
    /// Merged and sorted by cell index.
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    pub fn zero(grid: Grid, components: usize) -> Self {
        let n = grid.n_cells() * components;
        Self {
            grid,
            components,
            density: vec![0.0; n],
            atoms: Vec::new(),
        }
    }

    pub fn from_density(grid: Grid, components: usize, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.n_cells() * components {
            return Err(Error::DimensionMismatch(format!(
                "density of length {} for {} cells × {} components",
                density.len(),
                grid.n_cells(),
                components
            )));
        }
        if density.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("density entries must be finite".into()));
        }
        Ok(Self {
            grid,
            components,
            density,
            atoms: Vec::new(),
        })
    }

    /// Add a point mass; atoms landing in an occupied cell are merged by
    /// vector addition.
    pub fn with_atom(mut self, cell: usize, mass: Vec<f64>) -> Result<Self> {
        if cell >= self.grid.n_cells() {
            return Err(Error::Domain(format!("atom cell {cell} out of range")));
        }
        if mass.len() != self.components {
            return Err(Error::DimensionMismatch(format!(
                "atom mass has {} components, measure has {}",
                mass.len(),
                self.components
            )));
        }
        if let Some(a) = self.atoms.iter_mut().find(|a| a.cell == cell) {
            for (m, v) in a.mass.iter_mut().zip(&mass) {
                *m += v;
            }
        } else {
            self.atoms.push(Atom { cell, mass });
            self.atoms.sort_by_key(|a| a.cell);
        }
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn density_at(&self, cell: usize) -> &[f64] {
        &self.density[cell * self.components..(cell + 1) * self.components]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_atom_free(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Pointwise difference of the densities (atoms kept from `self`);
    /// used to test feasibility of `μ − u₀·L^d`.
    pub fn minus_density(&self, u: &[f64]) -> Result<DiscreteMeasure> {
        if u.len() != self.density.len() {
            return Err(Error::DimensionMismatch(
                "density length mismatch in minus_density".into(),
            ));
        }
        let mut out = self.clone();
        for (d, v) in out.density.iter_mut().zip(u) {
            *d -= v;
        }
        Ok(out)
    }

    /// Total variation `|μ|(region) = Σ |density| Δx + Σ |mass|`.
    pub fn total_variation(&self, region: Region<'_>) -> f64 {
        let dv = self.grid.cell_volume();
        let mut tv = 0.0;
        for c in 0..self.grid.n_cells() {
            if region.contains(c) {
                tv += numerics::norm(self.density_at(c)) * dv;
            }
        }
        for a in &self.atoms {
            if region.contains(a.cell) {
                tv += numerics::norm(&a.mass);
            }
        }
        tv
    }

    /// Generalized area functional
    /// `⟨μ⟩(region) = Σ √(1+|density|²) Δx + Σ |mass|`.
    pub fn area_functional(&self, region: Region<'_>) -> f64 {
        let dv = self.grid.cell_volume();
        let mut area = 0.0;
        for c in 0..self.grid.n_cells() {
            if region.contains(c) {
                let d = numerics::norm(self.density_at(c));
                area += (1.0 + d * d).sqrt() * dv;
            }
        }
        for a in &self.atoms {
            if region.contains(a.cell) {
                area += numerics::norm(&a.mass);
            }
        }
        area
    }

    /// Weak* pairing `∫ φ · dμ` against a test function sampled on cells
    /// (`φ[cell * components + k]`). Atoms pair with the value at their cell.
    pub fn weak_star_pair(&self, phi: &[f64]) -> f64 {
        debug_assert_eq!(phi.len(), self.density.len());
        let dv = self.grid.cell_volume();
        let mut acc = 0.0;
        for c in 0..self.grid.n_cells() {
            let base = c * self.components;
            for k in 0..self.components {
                acc += phi[base + k] * self.density[base + k] * dv;
            }
        }
        for a in &self.atoms {
            let base = a.cell * self.components;
            for k in 0..self.components {
                acc += phi[base + k] * a.mass[k];
            }
        }
        acc
    }

    /// Mollify at scale `δ ≥ cell width`: atoms are spread over cells within
    /// the kernel support and the density is convolved likewise, with the
    /// bump kernel renormalised on its discrete support so the total mass is
    /// preserved exactly. The result is atom-free.
    pub fn mollify(&self, delta: f64) -> Result<DiscreteMeasure> {
        let max_spacing = (0..self.grid.dim())
            .map(|a| self.grid.spacing(a))
            .fold(0.0f64, f64::max);
        if delta < max_spacing - 1e-12 {
            return Err(Error::Domain(format!(
                "mollification scale {delta} below the cell width {max_spacing}"
            )));
        }
        let n = self.grid.n_cells();
        let dv = self.grid.cell_volume();
        let dim = self.grid.dim();
        let centers: Vec<Vec<f64>> = (0..n).map(|c| self.grid.center(c)).collect();

        // Kernel row for a source cell: tensor bump over the center offsets,
        // renormalised to sum 1 on the discrete support.
        let kernel_row = |src: usize| -> Vec<(usize, f64)> {
            let mut row = Vec::new();
            let mut total = 0.0;
            for (tgt, center) in centers.iter().enumerate() {
                let mut w = 1.0;
                for a in 0..dim {
                    w *= bump((center[a] - centers[src][a]) / delta);
                    if w == 0.0 {
                        break;
                    }
                }
                if w > 0.0 {
                    total += w;
                    row.push((tgt, w));
                }
            }
            for (_, w) in row.iter_mut() {
                *w /= total;
            }
            row
        };

        let mut out = vec![0.0; n * self.components];
        for src in 0..n {
            let d = self.density_at(src);
            if d.iter().all(|v| *v == 0.0) {
                continue;
            }
            for (tgt, w) in kernel_row(src) {
                for k in 0..self.components {
                    // density mass ρ·Δx spread by w, re-expressed as density
                    out[tgt * self.components + k] += d[k] * w;
                }
            }
        }
        for atom in &self.atoms {
            for (tgt, w) in kernel_row(atom.cell) {
                for k in 0..self.components {
                    out[tgt * self.components + k] += atom.mass[k] * w / dv;
                }
            }
        }
        DiscreteMeasure::from_density(self.grid.clone(), self.components, out)
    }

    /// Relaxed integral of a convex integrand over the measure:
    /// `Σ f(x_c, ρ_c) Δx + Σ |m| f^∞(x_a, m/|m|)`, skipping atoms below the
    /// mass floor.
    pub fn relaxed_integral(&self, f: &ConvexIntegrand, region: Region<'_>) -> Result<f64> {
        if f.dimension() != self.components {
            return Err(Error::DimensionMismatch(format!(
                "integrand dimension {} vs measure components {}",
                f.dimension(),
                self.components
            )));
        }
        let dv = self.grid.cell_volume();
        let mut acc = 0.0;
        for c in 0..self.grid.n_cells() {
            if !region.contains(c) {
                continue;
            }
            let x = self.grid.center(c);
            let v = f.eval(&x, self.density_at(c));
            if !v.is_finite() {
                return Err(Error::NonFiniteEval {
                    x,
                    z: self.density_at(c).to_vec(),
                });
            }
            acc += v * dv;
        }
        for a in &self.atoms {
            if !region.contains(a.cell) {
                continue;
            }
            let mass = numerics::norm(&a.mass);
            if mass < ATOM_MASS_FLOOR {
                continue;
            }
            let polar: Vec<f64> = a.mass.iter().map(|v| v / mass).collect();
            let x = self.grid.center(a.cell);
            acc += mass * f.recession(&x, &polar)?;
        }
        Ok(acc)
    }
}

/// The default test-function panel: all-ones, the coordinate functions,
/// their first sine modes, and per-component indicators.
pub fn default_panel(grid: &Grid, components: usize) -> Vec<Vec<f64>> {
    let n = grid.n_cells();
    let mut panel = Vec::new();
    panel.push(vec![1.0; n * components]);
    for axis in 0..grid.dim() {
        let mut coord = vec![0.0; n * components];
        let mut sine = vec![0.0; n * components];
        for c in 0..n {
            let x = grid.center(c)[axis];
            for k in 0..components {
                coord[c * components + k] = x;
                sine[c * components + k] = (2.0 * std::f64::consts::PI * x).sin();
            }
        }
        panel.push(coord);
        panel.push(sine);
    }
    for k in 0..components {
        let mut ind = vec![0.0; n * components];
        for c in 0..n {
            ind[c * components + k] = 1.0;
        }
        panel.push(ind);
    }
    panel
}

/// Per-step diagnostics and convergence verdicts for a measure sequence.
/// The verdicts form a lattice: area-strict ⇒ strict ⇒ weak*.
#[derive(Debug, Clone)]
pub struct MeasureSequenceReport {
    /// Per step: worst pairing error against the panel.
    pub pairing_errors: Vec<f64>,
    /// Per step: `⟨μ_j⟩(Ω)`.
    pub area_values: Vec<f64>,
    /// Per step: `|μ_j|(Ω)`.
    pub tv_values: Vec<f64>,
    pub limit_area: f64,
    pub limit_tv: f64,
    pub weak_star: bool,
    pub strict: bool,
    pub area_strict: bool,
}

/// Compare a sequence of measures against a candidate weak* limit.
///
/// Weak* requires the worst panel pairing error at the last step below
/// `TOL_WEAK` and no growth from first to last step; strict additionally
/// matches total variations, area-strict additionally matches the area
/// functionals (both at `TOL_AREA`).
pub fn sequence_diagnostic(
    seq: &[DiscreteMeasure],
    limit: &DiscreteMeasure,
    panel: &[Vec<f64>],
) -> Result<MeasureSequenceReport> {
    if panel.is_empty() {
        return Err(Error::Domain(
            "sequence diagnostic needs a nonempty panel".into(),
        ));
    }
    if seq.len() < 3 {
        return Err(Error::Domain(
            "sequence diagnostic needs at least 3 steps".into(),
        ));
    }
    let limit_pairings: Vec<f64> = panel.iter().map(|phi| limit.weak_star_pair(phi)).collect();
    let mut pairing_errors = Vec::with_capacity(seq.len());
    let mut area_values = Vec::with_capacity(seq.len());
    let mut tv_values = Vec::with_capacity(seq.len());
    for mu in seq {
        let mut worst = 0.0f64;
        for (phi, lp) in panel.iter().zip(&limit_pairings) {
            worst = worst.max((mu.weak_star_pair(phi) - lp).abs());
        }
        pairing_errors.push(worst);
        area_values.push(mu.area_functional(Region::All));
        tv_values.push(mu.total_variation(Region::All));
    }
    let limit_area = limit.area_functional(Region::All);
    let limit_tv = limit.total_variation(Region::All);
    let last = seq.len() - 1;
    let weak_star =
        pairing_errors[last] < TOL_WEAK && pairing_errors[last] <= pairing_errors[0] + TOL_WEAK;
    let strict = weak_star && (tv_values[last] - limit_tv).abs() < TOL_AREA;
    let area_strict = strict && (area_values[last] - limit_area).abs() < TOL_AREA;
    Ok(MeasureSequenceReport {
        pairing_errors,
        area_values,
        tv_values,
        limit_area,
        limit_tv,
        weak_star,
        strict,
        area_strict,
    })
}
