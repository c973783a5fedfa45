//! Primal, relaxed and dual energies for the constrained problem
//!
//! ```text
//!     minimise  F[u] = Σ_c f(x_c, u_c) Δx   over  u ∈ u₀ + ker A,
//! ```
//!
//! its relaxation to measures, the concave dual
//! `R[w*] = ⟨w*, τ⟩Δx − Σ_c f*(x_c, (A*w*)_c) Δx`, the Lagrangian, and the
//! machinery used to verify the saddle-point structure: projected
//! supergradient ascent for the dual, kernel-coordinate subgradient descent
//! for the primal, duality-gap evaluation, a mollified problem family,
//! approximate first-order certificates extracted by a penalized descent,
//! and exhaustive-scan oracles for tiny instances.
//!
//! The feasible set is parametrized exactly: `u = u₀ + Σ c_k η_k` over an
//! orthonormal kernel basis, so `A u = τ` holds to rounding and no penalty
//! terms enter the primal solver.

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::grid::Grid;
use crate::integrand::{ConvexIntegrand, GrowthSampleSpec, IntegrandKind};
use crate::measure::{DiscreteMeasure, Region};
use crate::numerics::{self, SplitMix64};
use crate::operator::{ConstraintOperator, KernelMembership, SourceTerm};
use crate::tolerances::*;

/// A discretised constrained problem: grid, integrand, operator, source.
#[derive(Debug)]
pub struct Problem {
    grid: Grid,
    integrand: ConvexIntegrand,
    operator: ConstraintOperator,
    source: SourceTerm,
}

impl Problem {
    /// Bundle the pieces, verifying that the integrand passes a growth
    /// sample and that the source witness satisfies `A u₀ = τ`.
    pub fn new(
        grid: Grid,
        integrand: ConvexIntegrand,
        operator: ConstraintOperator,
        source: SourceTerm,
    ) -> Result<Self> {
        if operator.grid() != &grid {
            return Err(Error::DimensionMismatch(
                "operator grid differs from the problem grid".into(),
            ));
        }
        if integrand.dimension() != operator.primal_components() {
            return Err(Error::DimensionMismatch(format!(
                "integrand dimension {} vs operator primal components {}",
                integrand.dimension(),
                operator.primal_components()
            )));
        }
        let au0 = operator.apply(source.u0());
        let resid: f64 = au0
            .iter()
            .zip(source.tau())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if resid > TOL_IMAGE * (1.0 + numerics::norm(source.tau())) {
            return Err(Error::Infeasible {
                residual: resid,
                tolerance: TOL_IMAGE,
            });
        }
        let xs: Vec<Vec<f64>> = (0..grid.n_cells().min(5)).map(|c| grid.center(c)).collect();
        let spec =
            GrowthSampleSpec::new(40, 3.0 * integrand.growth_constant(), 20).with_x_points(xs);
        let report = integrand.verify_growth(&spec)?;
        if !report.pass() {
            return Err(Error::Domain(format!(
                "integrand fails growth verification: {}",
                report.violations[0].detail
            )));
        }
        Ok(Self {
            grid,
            integrand,
            operator,
            source,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn integrand(&self) -> &ConvexIntegrand {
        &self.integrand
    }

    pub fn operator(&self) -> &ConstraintOperator {
        &self.operator
    }

    pub fn source(&self) -> &SourceTerm {
        &self.source
    }

    pub fn volume(&self) -> f64 {
        self.grid.domain_volume()
    }

    /// `F[u] = Σ_c f(x_c, u_c) Δx`.
    pub fn primal_energy(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.operator.cols() {
            return Err(Error::DimensionMismatch(
                "u does not match the primal space".into(),
            ));
        }
        let n = self.grid.n_cells();
        let ncomp = self.integrand.dimension();
        let dv = self.grid.cell_volume();
        let mut acc = 0.0;
        for c in 0..n {
            let x = self.grid.center(c);
            let z = &u[c * ncomp..(c + 1) * ncomp];
            let v = self.integrand.eval(&x, z);
            if !v.is_finite() {
                return Err(Error::NonFiniteEval { x, z: z.to_vec() });
            }
            acc += v * dv;
        }
        Ok(acc)
    }

    /// Distributional feasibility of `μ` in `u₀ + ker_M A`.
    pub fn feasibility(&self, mu: &DiscreteMeasure) -> Result<KernelMembership> {
        let shifted = mu.minus_density(self.source.u0())?;
        self.operator.apply_to_measure(&shifted)
    }

    /// Relaxed energy `F̄[μ]`; requires `μ − u₀·L^d ∈ ker_M A`.
    pub fn relaxed_energy(&self, mu: &DiscreteMeasure) -> Result<f64> {
        let membership = self.feasibility(mu)?;
        if !membership.in_kernel {
            return Err(Error::Infeasible {
                residual: membership.residual,
                tolerance: membership.threshold,
            });
        }
        mu.relaxed_integral(&self.integrand, Region::All)
    }

    /// `R[w*] = ⟨w*, τ⟩Δx − Σ_c f*(x_c, (A*w*)_c) Δx`, `-∞` when some cell
    /// conjugate diverges.
    pub fn dual_energy(&self, wstar: &[f64]) -> Result<ExtendedReal> {
        if wstar.len() != self.operator.rows() {
            return Err(Error::DimensionMismatch(
                "w* does not match the dual space".into(),
            ));
        }
        let p = self.operator.adjoint_apply(wstar);
        let dv = self.grid.cell_volume();
        let ncomp = self.integrand.dimension();
        let mut conj_sum = 0.0;
        for c in 0..self.grid.n_cells() {
            let x = self.grid.center(c);
            match self
                .integrand
                .conjugate(&x, &p[c * ncomp..(c + 1) * ncomp])?
            {
                ExtendedReal::Finite(v) => conj_sum += v * dv,
                ExtendedReal::PosInf => return Ok(ExtendedReal::NegInf),
                ExtendedReal::NegInf => unreachable!("conjugates never reach -∞"),
            }
        }
        let pairing = numerics::dot(wstar, self.source.tau()) * dv;
        Ok(ExtendedReal::Finite(pairing - conj_sum))
    }

    /// `L(u, w*) = F[u] − ⟨w*, Au − τ⟩Δx`.
    pub fn lagrangian(&self, u: &[f64], wstar: &[f64]) -> Result<f64> {
        let energy = self.primal_energy(u)?;
        let au = self.operator.apply(u);
        let dv = self.grid.cell_volume();
        let constraint: f64 = au
            .iter()
            .zip(self.source.tau())
            .zip(wstar)
            .map(|((a, t), w)| w * (a - t))
            .sum();
        Ok(energy - dv * constraint)
    }

    /// Reconstruct `u = u₀ + Σ c_k η_k` from kernel coordinates.
    pub fn from_kernel_coords(&self, coords: &[f64]) -> Vec<f64> {
        let kernel = self.operator.kernel_basis();
        debug_assert_eq!(coords.len(), kernel.len());
        let mut u = self.source.u0().to_vec();
        for (c, eta) in coords.iter().zip(kernel) {
            numerics::axpy(*c, eta, &mut u);
        }
        u
    }

    /// Replace the integrand by its mollification at scale `δ`.
    pub fn mollified_family(&self, delta: f64) -> Result<Problem> {
        Ok(Problem {
            grid: self.grid.clone(),
            integrand: self.integrand.mollify(delta)?,
            operator: clone_operator(&self.operator),
            source: self.source.clone(),
        })
    }

    fn step_scale(&self) -> f64 {
        let dv = self.grid.cell_volume();
        let tau_l2 = (numerics::dot(self.source.tau(), self.source.tau()) * dv).sqrt();
        self.volume() / (1.0 + tau_l2)
    }
}

fn clone_operator(op: &ConstraintOperator) -> ConstraintOperator {
    // Operators carry a lazily initialised factorization; rebuilding from
    // the same stencil reproduces it exactly.
    match op.name() {
        crate::operator::OperatorName::Custom => {
            let mut triplets = Vec::new();
            for i in 0..op.rows() {
                for j in 0..op.cols() {
                    let v = op.matrix_entry(i, j);
                    if v != 0.0 {
                        triplets.push((i, j, v));
                    }
                }
            }
            ConstraintOperator::custom(op.grid(), op.rows(), op.cols(), &triplets).unwrap()
        }
        name => ConstraintOperator::build(name, op.grid(), op.boundary()).unwrap(),
    }
}

/// A dual-feasible point with its energy: `w*`, the exact transpose image
/// `A*w*`, and `R[w*]` (possibly `-∞`).
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub wstar: Vec<f64>,
    pub astar_wstar: Vec<f64>,
    pub r_value: ExtendedReal,
}

impl DualCertificate {
    pub fn from_wstar(problem: &Problem, wstar: Vec<f64>) -> Result<Self> {
        let astar_wstar = problem.operator().adjoint_apply(&wstar);
        let r_value = problem.dual_energy(&wstar)?;
        Ok(Self {
            wstar,
            astar_wstar,
            r_value,
        })
    }
}

/// Iteration controls shared by the solvers.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Relative best-value improvement below which the iteration stops
    /// (checked every 100 steps).
    pub tol: f64,
    pub seed: u64,
    /// Starting kernel coordinates for the primal solver (zeros if absent).
    pub initial_coords: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            tol: 1e-12,
            seed: 0,
            initial_coords: None,
        }
    }
}

/// Projected supergradient ascent on the dual — direction
/// `τ − A ∂f*(A*w*)` with steps `c/√k`, `c = volume/(1+‖τ‖)`, scaling `w*`
/// back into the slab `{‖A*w*‖_∞ ≤ M}` whenever it escapes — followed by a
/// deterministic coordinate-wise golden-section polish of the best iterate
/// (the diminishing-step phase alone flattens out well above the gap
/// tolerances on stiff difference operators). Returns the best iterate.
pub fn solve_dual(problem: &Problem, opts: &SolveOptions) -> Result<DualCertificate> {
    let op = problem.operator();
    let f = problem.integrand();
    let m = f.growth_constant();
    let ncomp = f.dimension();
    let n = problem.grid().n_cells();
    let c_step = problem.step_scale();

    let mut w = vec![0.0; op.rows()];
    let mut best_w = w.clone();
    let mut best_r = match problem.dual_energy(&w)? {
        ExtendedReal::Finite(v) => v,
        _ => return Err(Error::Stalled("dual energy diverges at w* = 0".into())),
    };
    let mut last_check = best_r;

    for k in 1..=opts.max_iter {
        let p = op.adjoint_apply(&w);
        // supergradient τ − A g with g_c ∈ ∂f*(x_c, p_c), reusing the
        // conjugate search maximiser
        let mut g = vec![0.0; op.cols()];
        let mut diverged = false;
        for cell in 0..n {
            let x = problem.grid().center(cell);
            let slice = &p[cell * ncomp..(cell + 1) * ncomp];
            match f.conjugate_with_maximizer(&x, slice)? {
                (ExtendedReal::Finite(_), Some(zmax)) => {
                    g[cell * ncomp..(cell + 1) * ncomp].copy_from_slice(&zmax);
                }
                _ => {
                    diverged = true;
                    break;
                }
            }
        }
        if diverged {
            // shrink back toward the feasible slab
            for v in w.iter_mut() {
                *v *= 0.5;
            }
            continue;
        }
        let ag = op.apply(&g);
        let step = c_step / (k as f64).sqrt();
        for (wi, (t, a)) in w.iter_mut().zip(problem.source().tau().iter().zip(&ag)) {
            *wi += step * (t - a);
        }
        // slab projection by scaling
        let p = op.adjoint_apply(&w);
        let mut pmax = 0.0f64;
        for cell in 0..n {
            pmax = pmax.max(numerics::norm(&p[cell * ncomp..(cell + 1) * ncomp]));
        }
        if pmax > m {
            let scale = m / pmax;
            for v in w.iter_mut() {
                *v *= scale;
            }
        }
        if let ExtendedReal::Finite(r) = problem.dual_energy(&w)? {
            if r > best_r {
                best_r = r;
                best_w.copy_from_slice(&w);
            }
        }
        if k % 100 == 0 {
            if (best_r - last_check).abs() < opts.tol * (1.0 + best_r.abs()) {
                break;
            }
            last_check = best_r;
        }
    }

    // polish: cyclic golden-section ascent per dual coordinate. Brackets
    // start at the natural slab scale M/‖row_j(A)‖_∞ (one coordinate moves
    // A*w* by at most M inside them), stay fixed while sweeps keep
    // improving, and halve on stagnation; −∞ probes simply lose the
    // golden comparisons.
    let mut w = best_w.clone();
    let r_of = |w: &[f64]| -> Result<f64> { Ok(problem.dual_energy(w)?.to_f64()) };
    let scales: Vec<f64> = (0..op.rows())
        .map(|j| {
            let rownorm =
                (0..op.cols()).fold(0.0f64, |acc, c| acc.max(op.matrix_entry(j, c).abs()));
            if rownorm > 0.0 {
                m / rownorm
            } else {
                0.0
            }
        })
        .collect();
    let mut shrink = 1.0;
    let mut stalls = 0;
    for _ in 0..200 {
        let mut improved = false;
        for j in 0..w.len() {
            if scales[j] == 0.0 {
                continue; // coordinate does not enter A*w* (and τ_j = 0)
            }
            let h = scales[j] * shrink;
            let base = w[j];
            let mut probe = w.clone();
            let mut err = None;
            let (t, v) = crate::numerics::golden_max(base - h, base + h, 24, &mut |t| {
                probe[j] = t;
                match r_of(&probe) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        f64::NEG_INFINITY
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            if v > best_r {
                best_r = v;
                w[j] = t;
                best_w.copy_from_slice(&w);
                improved = true;
            } else {
                w[j] = base;
            }
        }
        if improved {
            stalls = 0;
        } else {
            stalls += 1;
            shrink *= 0.5;
            if stalls >= 8 {
                break;
            }
        }
    }
    DualCertificate::from_wstar(problem, best_w)
}

/// Kernel-coordinate subgradient descent on `F`, followed by the
/// singular-refinement pass: an atom is kept only when carving mass out of
/// a cell's density strictly lowers the relaxed energy by more than the
/// refinement tolerance (for convex integrands with `f(q) ≤ f(0) + f^∞(q̂)|q|`
/// this never happens, and the minimiser stays atom-free).
pub fn solve_primal(problem: &Problem, opts: &SolveOptions) -> Result<DiscreteMeasure> {
    let op = problem.operator();
    let f = problem.integrand();
    let kernel = op.kernel_basis();
    let kdim = kernel.len();
    let n = problem.grid().n_cells();
    let ncomp = f.dimension();
    let dv = problem.grid().cell_volume();
    let c_step = problem.step_scale();

    let mut coords = match &opts.initial_coords {
        Some(c) if c.len() == kdim => c.clone(),
        Some(_) => {
            return Err(Error::DimensionMismatch(
                "initial coords vs kernel dim".into(),
            ))
        }
        None if opts.seed != 0 => {
            let mut rng = SplitMix64::new(opts.seed);
            (0..kdim).map(|_| rng.uniform(-1.0, 1.0)).collect()
        }
        None => vec![0.0; kdim],
    };

    let mut u = problem.from_kernel_coords(&coords);
    let mut best_energy = problem.primal_energy(&u)?;
    let mut best_coords = coords.clone();
    let mut last_check = best_energy;

    if kdim > 0 {
        'subgradient: for k in 1..=opts.max_iter {
            // subgradient of F in kernel coordinates
            let mut grad = vec![0.0; kdim];
            for cell in 0..n {
                let x = problem.grid().center(cell);
                let z = &u[cell * ncomp..(cell + 1) * ncomp];
                let gz = subgradient_choice(f, &x, z);
                for (j, eta) in kernel.iter().enumerate() {
                    let eslice = &eta[cell * ncomp..(cell + 1) * ncomp];
                    grad[j] += dv * numerics::dot(&gz, eslice);
                }
            }
            let step = c_step / (k as f64).sqrt();
            for (c, g) in coords.iter_mut().zip(&grad) {
                *c -= step * g;
            }
            u = problem.from_kernel_coords(&coords);
            let energy = problem.primal_energy(&u)?;
            if energy < best_energy {
                best_energy = energy;
                best_coords.copy_from_slice(&coords);
            }
            if k % 100 == 0 {
                if (last_check - best_energy).abs() < opts.tol * (1.0 + best_energy.abs()) {
                    break 'subgradient;
                }
                last_check = best_energy;
            }
        }

        // polish in kernel coordinates, mirroring the dual solver
        let mut current = best_coords.clone();
        let h0 = 0.5 * (1.0 + current.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let mut shrink = 1.0;
        let mut stalls = 0;
        for _ in 0..200 {
            let mut improved = false;
            for j in 0..kdim {
                let h = h0 * shrink;
                let base = current[j];
                let mut probe = current.clone();
                let mut err = None;
                let (t, v) = crate::numerics::golden_max(base - h, base + h, 24, &mut |t| {
                    probe[j] = t;
                    let u = problem.from_kernel_coords(&probe);
                    match problem.primal_energy(&u) {
                        Ok(e) => -e,
                        Err(e) => {
                            err = Some(e);
                            f64::NEG_INFINITY
                        }
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                if -v < best_energy {
                    best_energy = -v;
                    current[j] = t;
                    best_coords.copy_from_slice(&current);
                    improved = true;
                } else {
                    current[j] = base;
                }
            }
            if improved {
                stalls = 0;
            } else {
                stalls += 1;
                shrink *= 0.5;
                if stalls >= 8 {
                    break;
                }
            }
        }
    }

    let u = problem.from_kernel_coords(&best_coords);
    let mut measure = DiscreteMeasure::from_density(problem.grid().clone(), ncomp, u.clone())?;

    // Singular refinement: cell-by-cell, atomise the density only when it
    // strictly pays off.
    for cell in 0..n {
        let z = &u[cell * ncomp..(cell + 1) * ncomp];
        let zn = numerics::norm(z);
        if zn < ATOM_MASS_FLOOR {
            continue;
        }
        let x = problem.grid().center(cell);
        let polar: Vec<f64> = z.iter().map(|v| v / zn).collect();
        let keep_density = f.eval(&x, z) * dv;
        let as_atom = f.eval(&x, &vec![0.0; ncomp]) * dv + zn * dv * f.recession(&x, &polar)?;
        if as_atom + ATOM_REFINE_TOL < keep_density {
            let mass: Vec<f64> = z.iter().map(|v| v * dv).collect();
            let mut density = measure.density().to_vec();
            for k in 0..ncomp {
                density[cell * ncomp + k] = 0.0;
            }
            measure = DiscreteMeasure::from_density(problem.grid().clone(), ncomp, density)?
                .with_atom(cell, mass)?;
        }
    }
    Ok(measure)
}

/// A subgradient selection that is total: the analytic gradient where it
/// exists, the midpoint of the one-sided slopes at tabulated kinks, zero at
/// the kink of the norms (a valid subgradient there).
pub(crate) fn subgradient_choice(f: &ConvexIntegrand, x: &[f64], z: &[f64]) -> Vec<f64> {
    match f.subgradient(x, z) {
        Ok(g) => g,
        Err(_) => vec![0.0; z.len()],
    }
}

/// `F̄[μ] − R[w*]`; weak duality keeps this above `-1e-9` for feasible `μ`
/// and finite certificates. `+∞` when the certificate value is `-∞`.
pub fn duality_gap(problem: &Problem, mu: &DiscreteMeasure, cert: &DualCertificate) -> Result<f64> {
    let relaxed = problem.relaxed_energy(mu)?;
    Ok(match cert.r_value {
        ExtendedReal::Finite(r) => relaxed - r,
        ExtendedReal::NegInf => f64::INFINITY,
        ExtendedReal::PosInf => f64::NEG_INFINITY,
    })
}

/// Result of [`ekeland_certificate`]: the three bounds from the penalized
/// descent, reported with their achieved values.
#[derive(Debug, Clone)]
pub struct EkelandReport {
    pub energy: f64,
    pub energy_bound: f64,
    pub distance_l1: f64,
    pub distance_bound: f64,
    pub kernel_pairing: f64,
    pub kernel_bound: f64,
    /// Whether `F[ū] ≤ (best known lower bound) + ε` could be verified.
    pub minimality_verified: bool,
}

impl EkelandReport {
    pub fn pass(&self) -> bool {
        self.energy < self.energy_bound
            && self.distance_l1 <= self.distance_bound
            && self.kernel_pairing <= self.kernel_bound
    }
}

/// From an ε-minimiser `ū`, produce `û` and `v* = ∇_z f(·, û)` with
///
/// * `F[û] < F[ū] + 2ε`,
/// * `‖û − ū‖_{L¹} ≤ √ε`,
/// * `|⟨v*, η⟩| ≤ √ε ‖η‖_{L¹}` for every kernel basis vector `η`,
///
/// by minimising the penalized energy `F[u] + √ε ‖u − u_center‖_{L¹}` with
/// at most `⌈log₂(1/ε)⌉` re-centerings. The integrand must be differentiable
/// (mollify first if not).
pub fn ekeland_certificate(
    problem: &Problem,
    ubar: &[f64],
    eps: f64,
    opts: &SolveOptions,
) -> Result<(Vec<f64>, Vec<f64>, EkelandReport)> {
    if !(eps > 0.0) {
        return Err(Error::Domain("ε must be positive".into()));
    }
    let f = problem.integrand();
    match f.kind() {
        IntegrandKind::Builtin("abs")
        | IntegrandKind::Builtin("weighted_abs")
        | IntegrandKind::Tabulated => {
            return Err(Error::Domain(
                "integrand has kinks; mollify before extracting a certificate".into(),
            ));
        }
        _ => {}
    }
    let op = problem.operator();
    let au = op.apply(ubar);
    let feas: f64 = au
        .iter()
        .zip(problem.source().tau())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if feas > 1e-8 * (1.0 + numerics::norm(problem.source().tau())) {
        return Err(Error::Infeasible {
            residual: feas,
            tolerance: 1e-8,
        });
    }

    let kernel = op.kernel_basis();
    let kdim = kernel.len();
    let n = problem.grid().n_cells();
    let ncomp = f.dimension();
    let dv = problem.grid().cell_volume();
    let sqrt_eps = eps.sqrt();
    let energy_ubar = problem.primal_energy(ubar)?;

    // ε-minimality against the cheap lower bound R[0]; R[0] can sit far
    // below the infimum, in which case the check stays unverified.
    let minimality_verified = match problem.dual_energy(&vec![0.0; op.rows()])? {
        ExtendedReal::Finite(r0) => energy_ubar <= r0 + eps,
        _ => false,
    };

    let l1 = |v: &[f64]| -> f64 {
        (0..n)
            .map(|c| numerics::norm(&v[c * ncomp..(c + 1) * ncomp]) * dv)
            .sum()
    };

    // û stays in the affine space: descend in kernel coordinates relative
    // to ū.
    let mut center = ubar.to_vec();
    let mut uhat = ubar.to_vec();
    let restarts = (1.0 / eps).log2().ceil().max(1.0) as usize;
    let inner_iters = opts.max_iter.max(200) / restarts.max(1);
    let c_step = problem.step_scale();

    for _ in 0..restarts {
        // each stage recenters at the current û, so the offset starts at 0
        let mut coords = vec![0.0; kdim];
        let mut best = problem.primal_energy(&uhat)?;
        let mut best_coords = coords.clone();
        let base = center.clone();
        let mut u;
        for k in 1..=inner_iters {
            u = base.clone();
            for (c, eta) in coords.iter().zip(kernel) {
                numerics::axpy(*c, eta, &mut u);
            }
            let mut grad = vec![0.0; kdim];
            for cell in 0..n {
                let x = problem.grid().center(cell);
                let z = &u[cell * ncomp..(cell + 1) * ncomp];
                let gz = subgradient_choice(f, &x, z);
                // subgradient of the L¹ penalty ‖u − center‖
                let d: Vec<f64> = z
                    .iter()
                    .zip(&center[cell * ncomp..(cell + 1) * ncomp])
                    .map(|(a, b)| a - b)
                    .collect();
                let dn = numerics::norm(&d);
                for (j, eta) in kernel.iter().enumerate() {
                    let eslice = &eta[cell * ncomp..(cell + 1) * ncomp];
                    grad[j] += dv * numerics::dot(&gz, eslice);
                    if dn > 1e-14 {
                        let pen: f64 = d.iter().zip(eslice).map(|(di, ei)| di / dn * ei).sum();
                        grad[j] += sqrt_eps * dv * pen;
                    }
                }
            }
            let step = c_step / (k as f64).sqrt();
            for (c, g) in coords.iter_mut().zip(&grad) {
                *c -= step * g;
            }
            u = base.clone();
            for (c, eta) in coords.iter().zip(kernel) {
                numerics::axpy(*c, eta, &mut u);
            }
            let diff: Vec<f64> = u.iter().zip(&center).map(|(a, b)| a - b).collect();
            let value = problem.primal_energy(&u)? + sqrt_eps * l1(&diff);
            if value < best {
                best = value;
                best_coords.copy_from_slice(&coords);
            }
        }
        uhat = base.clone();
        for (c, eta) in best_coords.iter().zip(kernel) {
            numerics::axpy(*c, eta, &mut uhat);
        }
        center = uhat.clone();
    }

    // certificate v* = ∇f(·, û)
    let mut vstar = vec![0.0; op.cols()];
    for cell in 0..n {
        let x = problem.grid().center(cell);
        let z = &uhat[cell * ncomp..(cell + 1) * ncomp];
        let g = f.subgradient(&x, z)?;
        vstar[cell * ncomp..(cell + 1) * ncomp].copy_from_slice(&g);
    }

    let energy = problem.primal_energy(&uhat)?;
    let diff: Vec<f64> = uhat.iter().zip(ubar).map(|(a, b)| a - b).collect();
    let distance = l1(&diff);
    let mut kernel_pairing = 0.0f64;
    for eta in kernel {
        let pairing = dv * numerics::dot(&vstar, eta);
        let eta_l1 = l1(eta);
        if eta_l1 > 0.0 {
            kernel_pairing = kernel_pairing.max(pairing.abs() / eta_l1);
        }
    }
    let report = EkelandReport {
        energy,
        energy_bound: energy_ubar + 2.0 * eps,
        distance_l1: distance,
        distance_bound: sqrt_eps,
        kernel_pairing,
        kernel_bound: sqrt_eps,
        minimality_verified,
    };
    if !report.pass() {
        return Err(Error::CertificateFailed(format!(
            "energy {} vs bound {}, distance {} vs {}, kernel pairing {} vs {}",
            report.energy,
            report.energy_bound,
            report.distance_l1,
            report.distance_bound,
            report.kernel_pairing,
            report.kernel_bound
        )));
    }
    Ok((uhat, vstar, report))
}

const BRUTE_MAX_DOFS: usize = 3;
const BRUTE_POINTS: usize = 401;

/// Exhaustive scan of the primal over kernel coordinates (≤ 3 DOFs):
/// coarse pass on the coercivity box `|c_k| ≤ (M·F[u₀]+1)·M`, one refinement
/// pass at 10× resolution around the best point. Returns `(value, argmin)`.
pub fn brute_force_primal(problem: &Problem) -> Result<(f64, Vec<f64>)> {
    let kernel = problem.operator().kernel_basis();
    let kdim = kernel.len();
    if kdim > BRUTE_MAX_DOFS {
        return Err(Error::TooLarge {
            dofs: kdim,
            limit: BRUTE_MAX_DOFS,
        });
    }
    let m = problem.integrand().growth_constant();
    let f_feasible = problem.primal_energy(problem.source().u0())?;
    let radius = (m * f_feasible + 1.0) * m;

    let eval = |coords: &[f64]| -> Result<f64> {
        let u = problem.from_kernel_coords(coords);
        problem.primal_energy(&u)
    };
    let (mut best_val, mut best) = scan_box(kdim, &vec![0.0; kdim], radius, |c| eval(c))?;
    let coarse_spacing = 2.0 * radius / (BRUTE_POINTS - 1) as f64;
    let (v2, b2) = scan_box(kdim, &best, coarse_spacing, |c| eval(c))?;
    if v2 < best_val {
        best_val = v2;
        best = b2;
    }
    Ok((best_val, problem.from_kernel_coords(&best)))
}

/// Exhaustive dual scan over an orthonormal basis of `im A*` (≤ 3 DOFs),
/// maximising `⟨u₀, p⟩Δx − Σ_c f*(x_c, p_c)Δx` over the slab. Returns the
/// best value together with a certificate recovered through the adjoint
/// pseudo-inverse.
pub fn brute_force_dual(problem: &Problem) -> Result<(f64, DualCertificate)> {
    let basis = problem.operator().row_space_basis().to_vec();
    let (value, p) = brute_force_dual_reduced(problem, &basis)?;
    let w = problem
        .operator()
        .adjoint_preimage(&p)
        .ok_or_else(|| Error::Stalled("scan maximiser left im A*".into()))?;
    Ok((value, DualCertificate::from_wstar(problem, w)?))
}

/// Evenly tabulated 1-D conjugate on `[-M, M]`, built once per cell with
/// the real two-stage search and linearly interpolated inside the dense
/// dual scans (up to 401³ lattice points would otherwise re-run the search
/// billions of times). Interpolation error stays far below the scan
/// resolution the oracle tolerances are stated at.
struct ConjugateTable {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

const CONJ_TABLE_POINTS: usize = 4097;

impl ConjugateTable {
    fn build(f: &ConvexIntegrand, x: &[f64]) -> Result<Self> {
        let m = f.growth_constant();
        let lo = -m;
        let step = 2.0 * m / (CONJ_TABLE_POINTS - 1) as f64;
        let mut values = Vec::with_capacity(CONJ_TABLE_POINTS);
        for i in 0..CONJ_TABLE_POINTS {
            let p = lo + i as f64 * step;
            values.push(match f.conjugate(x, &[p])? {
                ExtendedReal::Finite(v) => v,
                _ => f64::INFINITY,
            });
        }
        Ok(Self { lo, step, values })
    }

    fn lookup(&self, p: f64) -> f64 {
        let t = (p - self.lo) / self.step;
        if t < 0.0 || t > (self.values.len() - 1) as f64 {
            return f64::INFINITY;
        }
        let i = (t as usize).min(self.values.len() - 2);
        let frac = t - i as f64;
        let (a, b) = (self.values[i], self.values[i + 1]);
        if !a.is_finite() || !b.is_finite() {
            return f64::INFINITY;
        }
        a + frac * (b - a)
    }
}

/// Dual scan over an explicit reduction basis of `im A*` (each vector must
/// lie in the adjoint image). Returns `(value, argmax p)`.
pub fn brute_force_dual_reduced(problem: &Problem, basis: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let kdim = basis.len();
    if kdim > BRUTE_MAX_DOFS {
        return Err(Error::TooLarge {
            dofs: kdim,
            limit: BRUTE_MAX_DOFS,
        });
    }
    let mut basis_unit = Vec::with_capacity(basis.len());
    for b in basis {
        if problem.operator().adjoint_preimage(b).is_none() {
            return Err(Error::Domain(
                "reduction basis vector is not in im A*".into(),
            ));
        }
        let norm = numerics::norm(b);
        if norm == 0.0 {
            return Err(Error::Domain("reduction basis vector is zero".into()));
        }
        basis_unit.push(b.iter().map(|v| v / norm).collect::<Vec<f64>>());
    }
    let f = problem.integrand();
    let m = f.growth_constant();
    let n = problem.grid().n_cells();
    let ncomp = f.dimension();
    let dv = problem.grid().cell_volume();
    let u0 = problem.source().u0();
    // the slab forces |p|₂ ≤ √n·M, so unit-basis coordinates live there too
    let radius = (n as f64).sqrt() * m;

    let tables: Option<Vec<ConjugateTable>> = if ncomp == 1 {
        Some(
            (0..n)
                .map(|cell| ConjugateTable::build(f, &problem.grid().center(cell)))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };

    let eval = |coords: &[f64]| -> Result<f64> {
        let mut p = vec![0.0; problem.operator().cols()];
        for (c, b) in coords.iter().zip(&basis_unit) {
            numerics::axpy(*c, b, &mut p);
        }
        let mut conj_sum = 0.0;
        for cell in 0..n {
            let conj = match &tables {
                Some(tabs) => tabs[cell].lookup(p[cell]),
                None => {
                    let x = problem.grid().center(cell);
                    f.conjugate(&x, &p[cell * ncomp..(cell + 1) * ncomp])?
                        .to_f64()
                }
            };
            if !conj.is_finite() {
                return Ok(f64::NEG_INFINITY);
            }
            conj_sum += conj * dv;
        }
        Ok(numerics::dot(u0, &p) * dv - conj_sum)
    };
    let neg = |c: &[f64]| -> Result<f64> { Ok(-(eval(c)?)) };
    let (mut best_val, mut best) = scan_box(kdim, &vec![0.0; kdim], radius, |c| neg(c))?;
    let coarse_spacing = 2.0 * radius / (BRUTE_POINTS - 1) as f64;
    let (v2, b2) = scan_box(kdim, &best, coarse_spacing, |c| neg(c))?;
    if v2 < best_val {
        best_val = v2;
        best = b2;
    }
    let mut p = vec![0.0; problem.operator().cols()];
    for (c, b) in best.iter().zip(&basis_unit) {
        numerics::axpy(*c, b, &mut p);
    }
    Ok((-best_val, p))
}

/// Dense scan of `[center − r, center + r]^k`, minimising `eval`.
fn scan_box(
    kdim: usize,
    center: &[f64],
    radius: f64,
    mut eval: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<(f64, Vec<f64>)> {
    if kdim == 0 {
        let v = eval(&[])?;
        return Ok((v, Vec::new()));
    }
    let mut best_val = f64::INFINITY;
    let mut best = center.to_vec();
    let mut idx = vec![0usize; kdim];
    let mut coords = vec![0.0; kdim];
    let spacing = 2.0 * radius / (BRUTE_POINTS - 1) as f64;
    'outer: loop {
        for a in 0..kdim {
            coords[a] = center[a] - radius + idx[a] as f64 * spacing;
        }
        let v = eval(&coords)?;
        if v.is_nan() {
            return Err(Error::Stalled("NaN during brute-force scan".into()));
        }
        if v < best_val {
            best_val = v;
            best.copy_from_slice(&coords);
        }
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < BRUTE_POINTS {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == kdim {
                break 'outer;
            }
        }
    }
    Ok((best_val, best))
}

/// Outcome of a combined primal + dual solve.
#[derive(Debug)]
pub struct SolveReport {
    pub primal: DiscreteMeasure,
    pub certificate: DualCertificate,
    pub gap: f64,
    pub primal_energy: f64,
    /// Iteration budget granted to each solver phase.
    pub iterations: usize,
    pub converged: bool,
}

/// Run both solvers and assemble the gap report.
pub fn solve(problem: &Problem, opts: &SolveOptions) -> Result<SolveReport> {
    let primal = solve_primal(problem, opts)?;
    let certificate = solve_dual(problem, opts)?;
    let gap = duality_gap(problem, &primal, &certificate)?;
    let primal_energy = problem.relaxed_energy(&primal)?;
    Ok(SolveReport {
        primal,
        certificate,
        gap,
        primal_energy,
        iterations: opts.max_iter,
        converged: gap.is_finite() && gap >= WEAK_DUALITY_FLOOR,
    })
}
