//! The generalized pairing between a measure and a bounded dual field.
//!
//! For a feasible measure `μ` and a dual certificate with `p = A*w*`, the
//! pairing is the weak* limit of `(u_j · p)·L^d` along area-strict recovery
//! sequences `u_j → μ`. On a grid the measure splits linearly into its
//! density and its atoms: the density part already pairs as a bona fide
//! measure `(ρ·p)·L^d` (its recovery sequence is itself), while each atom is
//! pushed through the mollification schedule and the resulting smeared
//! pairings are Richardson-extrapolated into a scalar atom of the limit.
//! This makes `λ ≪ |μ|` — and "no mass where μ has none" — true by
//! construction, and gives `λ` a genuine singular part whose density can be
//! compared against `f^∞`.
//!
//! The saddle-point checker combines three residuals: the cellwise Fenchel
//! identity `f(x,ρ) + f*(x,p) = ρ·p`, the per-atom singular density against
//! `f^∞(x, polar)`, and the duality gap.

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::measure::{
    default_panel, sequence_diagnostic, DiscreteMeasure, MeasureSequenceReport, Region,
};
use crate::numerics;
use crate::primal_dual::{duality_gap, DualCertificate, Problem};
use crate::tolerances::*;

/// A candidate element of the generalized pairing, with its provenance.
#[derive(Debug, Clone)]
pub struct PairingMeasure {
    /// Scalar measure: density `ρ·A*w*` plus one scalar atom per μ-atom.
    pub lambda: DiscreteMeasure,
    /// The mollification schedule that generated the singular part.
    pub schedule: Vec<f64>,
    pub converged: bool,
    /// Worst change of the decomposed masses between the last two steps.
    pub last_change: f64,
}

/// Construct the pairing limit for `(μ, A*w*)` along a strictly decreasing
/// mollification schedule (at least 4 entries, each at or above the cell
/// width). Requires `μ` feasible for the problem.
pub fn pairing_limit(
    problem: &Problem,
    mu: &DiscreteMeasure,
    cert: &DualCertificate,
    schedule: &[f64],
) -> Result<PairingMeasure> {
    if schedule.len() < 4 {
        return Err(Error::Domain(
            "pairing schedule needs at least 4 entries".into(),
        ));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(
            "pairing schedule must be strictly decreasing".into(),
        ));
    }
    let membership = problem.feasibility(mu)?;
    if !membership.in_kernel {
        return Err(Error::Infeasible {
            residual: membership.residual,
            tolerance: membership.threshold,
        });
    }
    let grid = mu.grid().clone();
    let ncomp = mu.components();
    let p = &cert.astar_wstar;
    let n = grid.n_cells();

    // absolutely continuous part: (ρ · p) as a scalar density, exact at
    // every schedule step
    let mut lambda_density = vec![0.0; n];
    for c in 0..n {
        lambda_density[c] = numerics::dot(mu.density_at(c), &p[c * ncomp..(c + 1) * ncomp]);
    }

    // singular part: smear each atom alone, pair, extrapolate the last two
    let mut lambda = DiscreteMeasure::from_density(grid.clone(), 1, lambda_density)?;
    let mut last_change = 0.0f64;
    for atom in mu.atoms() {
        let lone =
            DiscreteMeasure::zero(grid.clone(), ncomp).with_atom(atom.cell, atom.mass.clone())?;
        let mut values = Vec::with_capacity(schedule.len());
        for &delta in schedule {
            let smear = lone.mollify(delta)?;
            values.push(smear.weak_star_pair(p));
        }
        let k = values.len();
        let (d_prev, d_last) = (schedule[k - 2], schedule[k - 1]);
        let (v_prev, v_last) = (values[k - 2], values[k - 1]);
        // first-order Richardson in δ
        let extrapolated = (v_last * d_prev - v_prev * d_last) / (d_prev - d_last);
        last_change = last_change.max((v_last - v_prev).abs());
        lambda = lambda.with_atom(atom.cell, vec![extrapolated])?;
    }
    Ok(PairingMeasure {
        lambda,
        schedule: schedule.to_vec(),
        converged: last_change < TOL_PAIRING,
        last_change,
    })
}

/// One violated region of the mass bound.
#[derive(Debug, Clone)]
pub struct BoundViolation {
    pub description: String,
    pub lambda_mass: f64,
    pub bound: f64,
}

/// Report of the mass inequality `|λ|(ω) ≤ |μ|(ω)·‖A*w*‖_∞(ω)` over single
/// cells, dyadic index intervals and Ω, plus the density bound
/// `|dλ/d|μ|| ≤ ‖A*w*‖_∞` wherever `|μ| > 0`.
#[derive(Debug, Clone)]
pub struct PairingBoundsReport {
    pub regions_checked: usize,
    pub violations: Vec<BoundViolation>,
    /// Smallest slack `bound − |λ|(ω)` over all regions.
    pub min_slack: f64,
}

impl PairingBoundsReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn dyadic_intervals(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, n)];
    while let Some((lo, hi)) = stack.pop() {
        out.push((lo, hi));
        if hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            stack.push((lo, mid));
            stack.push((mid, hi));
        }
    }
    out
}

pub fn verify_pairing_bounds(
    pairing: &PairingMeasure,
    mu: &DiscreteMeasure,
    cert: &DualCertificate,
) -> PairingBoundsReport {
    let grid = mu.grid();
    let n = grid.n_cells();
    let ncomp = mu.components();
    let p = &cert.astar_wstar;
    let cell_pnorm: Vec<f64> = (0..n)
        .map(|c| numerics::norm(&p[c * ncomp..(c + 1) * ncomp]))
        .collect();

    let mut violations = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut regions_checked = 0;

    let mut check = |cells: &[usize], description: String| {
        let region = Region::Cells(cells);
        let lam = pairing.lambda.total_variation(region);
        let mum = mu.total_variation(region);
        let pmax = cells.iter().map(|&c| cell_pnorm[c]).fold(0.0f64, f64::max);
        let bound = mum * pmax;
        let slack = bound - lam;
        regions_checked += 1;
        if slack < min_slack {
            min_slack = slack;
        }
        if lam > bound + 1e-12 * (1.0 + bound) {
            violations.push(BoundViolation {
                description,
                lambda_mass: lam,
                bound,
            });
        }
    };

    for c in 0..n {
        check(&[c], format!("cell {c}"));
    }
    for (lo, hi) in dyadic_intervals(n) {
        let cells: Vec<usize> = (lo..hi).collect();
        check(&cells, format!("dyadic [{lo},{hi})"));
    }

    // density bound where |μ| > 0
    let pmax_all = cell_pnorm.iter().fold(0.0f64, |m, &v| m.max(v));
    for c in 0..n {
        let mu_d = numerics::norm(mu.density_at(c));
        if mu_d > ATOM_MASS_FLOOR {
            let lam_d = pairing.lambda.density_at(c)[0].abs();
            regions_checked += 1;
            if lam_d > mu_d * (pmax_all + 1e-9) {
                violations.push(BoundViolation {
                    description: format!("density ratio at cell {c}"),
                    lambda_mass: lam_d / mu_d,
                    bound: pmax_all,
                });
            }
        }
    }
    for (la, ma) in pairing.lambda.atoms().iter().zip(mu.atoms()) {
        let ratio = la.mass[0].abs() / numerics::norm(&ma.mass);
        regions_checked += 1;
        if ratio > pmax_all + 1e-9 {
            violations.push(BoundViolation {
                description: format!("atom density at cell {}", la.cell),
                lambda_mass: ratio,
                bound: pmax_all,
            });
        }
    }

    PairingBoundsReport {
        regions_checked,
        violations,
        min_slack,
    }
}

/// Per-atom outcome of the singular density comparison.
#[derive(Debug, Clone)]
pub struct AtomDensity {
    pub cell: usize,
    /// `dλ/d|μ^s|` at the atom.
    pub singular_density: f64,
    /// `f^∞(x, polar)` there.
    pub recession_value: f64,
    /// `polar · A*w*` at the atom cell (the strengthened identity).
    pub strict_value: f64,
}

/// Report of the density characterization: the a.e. identity on halo-free
/// cells and the `f^∞` bound at atoms.
#[derive(Debug, Clone)]
pub struct DensityReport {
    pub max_ac_residual: f64,
    pub cells_checked: usize,
    pub halo_cells: usize,
    pub atoms: Vec<AtomDensity>,
    pub ac_ok: bool,
    pub singular_ok: bool,
    /// Only meaningful in strict mode.
    pub strict_ok: bool,
}

impl DensityReport {
    pub fn pass(&self) -> bool {
        self.ac_ok && self.singular_ok
    }
}

/// Check `dλ/dL = (dμ/dL)·A*w*` on cells farther than `2δ_last` from every
/// atom, and `dλ/d|μ^s| ≤ f^∞(x, polar) + tol` at each atom. With
/// `strict_mode` the strengthened identity `dλ/d|μ^s| = polar·A*w*(x_atom)`
/// is asserted as well.
pub fn density_characterization(
    problem: &Problem,
    pairing: &PairingMeasure,
    mu: &DiscreteMeasure,
    cert: &DualCertificate,
    strict_mode: bool,
) -> Result<DensityReport> {
    if !cert.r_value.is_finite() && cert.r_value == ExtendedReal::NegInf {
        return Err(Error::Domain(
            "density characterization needs R[w*] > −∞".into(),
        ));
    }
    let grid = mu.grid();
    let n = grid.n_cells();
    let ncomp = mu.components();
    let p = &cert.astar_wstar;
    let f = problem.integrand();
    let halo = 2.0 * pairing.schedule.last().copied().unwrap_or(0.0);

    let mut excluded = vec![false; n];
    for atom in mu.atoms() {
        for (c, flag) in excluded.iter_mut().enumerate() {
            if grid.center_distance(atom.cell, c) <= halo {
                *flag = true;
            }
        }
    }
    let halo_cells = excluded.iter().filter(|&&e| e).count();
    if halo_cells == n {
        return Err(Error::HaloTooWide { radius: halo });
    }

    let mut max_ac = 0.0f64;
    let mut cells_checked = 0;
    for c in 0..n {
        if excluded[c] {
            continue;
        }
        cells_checked += 1;
        let expected = numerics::dot(mu.density_at(c), &p[c * ncomp..(c + 1) * ncomp]);
        let got = pairing.lambda.density_at(c)[0];
        max_ac = max_ac.max((got - expected).abs());
    }

    let mut atoms = Vec::new();
    let mut singular_ok = true;
    let mut strict_ok = true;
    for (la, ma) in pairing.lambda.atoms().iter().zip(mu.atoms()) {
        let mass = numerics::norm(&ma.mass);
        if mass < ATOM_MASS_FLOOR {
            continue;
        }
        let polar: Vec<f64> = ma.mass.iter().map(|v| v / mass).collect();
        let x = grid.center(ma.cell);
        let rec = f.recession(&x, &polar)?;
        let density = la.mass[0] / mass;
        let strict_value = numerics::dot(&polar, &p[ma.cell * ncomp..(ma.cell + 1) * ncomp]);
        if density > rec + TOL_SINGULAR {
            singular_ok = false;
        }
        if (density - strict_value).abs() > TOL_SINGULAR {
            strict_ok = false;
        }
        atoms.push(AtomDensity {
            cell: ma.cell,
            singular_density: density,
            recession_value: rec,
            strict_value,
        });
    }

    Ok(DensityReport {
        max_ac_residual: max_ac,
        cells_checked,
        halo_cells,
        atoms,
        ac_ok: max_ac <= TOL_AC_IDENTITY,
        singular_ok,
        strict_ok: !strict_mode || strict_ok,
    })
}

/// Tolerances for the optimality verdict.
#[derive(Debug, Clone, Copy)]
pub struct OptimalityTolerances {
    pub ac: f64,
    pub singular: f64,
    pub gap: f64,
}

impl Default for OptimalityTolerances {
    fn default() -> Self {
        Self {
            ac: TOL_AC_RESIDUAL,
            singular: TOL_SINGULAR,
            gap: TOL_GAP,
        }
    }
}

/// Saddle-point verdict for a candidate pair `(μ, w*)`.
#[derive(Debug, Clone)]
pub struct OptimalityReport {
    /// `max_c |f(x,ρ) + f*(x,p) − ρ·p|`; `+∞` when some conjugate diverges.
    pub ac_residual: f64,
    /// `max_atoms |dλ/d|μ^s| − f^∞(x, polar)|`; 0 without atoms.
    pub singular_residual: f64,
    pub gap: f64,
    pub pairing_converged: bool,
    pub cell_residuals: Vec<f64>,
    pub tolerances: OptimalityTolerances,
    pub pass: bool,
}

impl OptimalityReport {
    /// Per-condition verdicts behind the combined `pass`.
    pub fn ac_ok(&self) -> bool {
        self.ac_residual <= self.tolerances.ac
    }

    pub fn singular_ok(&self) -> bool {
        self.singular_residual <= self.tolerances.singular
    }

    pub fn gap_ok(&self) -> bool {
        self.gap <= self.tolerances.gap
    }
}

/// Verify the pointwise saddle-point conditions for `(μ, w*)`: the Fenchel
/// identity cellwise, the singular density identity at atoms (through the
/// pairing limit), and the duality gap. Optimal pairs pass; perturbed pairs
/// fail at least one residual.
pub fn optimality_check(
    problem: &Problem,
    mu: &DiscreteMeasure,
    cert: &DualCertificate,
    schedule: &[f64],
    tolerances: OptimalityTolerances,
) -> Result<OptimalityReport> {
    let grid = mu.grid();
    let n = grid.n_cells();
    let ncomp = mu.components();
    let p = &cert.astar_wstar;
    let f = problem.integrand();

    let gap = duality_gap(problem, mu, cert)?;

    let mut cell_residuals = Vec::with_capacity(n);
    let mut ac_residual = 0.0f64;
    for c in 0..n {
        let x = grid.center(c);
        let rho = mu.density_at(c);
        let pc = &p[c * ncomp..(c + 1) * ncomp];
        let res = match f.conjugate(&x, pc)? {
            ExtendedReal::Finite(conj) => (f.eval(&x, rho) + conj - numerics::dot(rho, pc)).abs(),
            _ => f64::INFINITY,
        };
        cell_residuals.push(res);
        ac_residual = ac_residual.max(res);
    }

    let (singular_residual, pairing_converged) = if mu.atoms().is_empty() {
        (0.0, true)
    } else if gap.is_finite() && ac_residual.is_finite() {
        let pairing = pairing_limit(problem, mu, cert, schedule)?;
        let mut worst = 0.0f64;
        for (la, ma) in pairing.lambda.atoms().iter().zip(mu.atoms()) {
            let mass = numerics::norm(&ma.mass);
            if mass < ATOM_MASS_FLOOR {
                continue;
            }
            let polar: Vec<f64> = ma.mass.iter().map(|v| v / mass).collect();
            let x = grid.center(ma.cell);
            let rec = f.recession(&x, &polar)?;
            worst = worst.max((la.mass[0] / mass - rec).abs());
        }
        (worst, pairing.converged)
    } else {
        (f64::INFINITY, false)
    };

    let pass = ac_residual <= tolerances.ac
        && singular_residual <= tolerances.singular
        && gap <= tolerances.gap
        && pairing_converged;
    Ok(OptimalityReport {
        ac_residual,
        singular_residual,
        gap,
        pairing_converged,
        cell_residuals,
        tolerances,
        pass,
    })
}

/// Report of the minimizing-sequence diagnostics.
#[derive(Debug, Clone)]
pub struct MinimizingSequenceReport {
    /// Energies were not nonincreasing (within 1e-9).
    pub not_minimizing_warning: bool,
    /// Per-step worst panel error of `f(·,u_j)·L^d` against the limit
    /// energy measure.
    pub energy_panel_errors: Vec<f64>,
    pub energy_weak_star: bool,
    /// Area-strict upgrade for strictly convex integrands.
    pub measure_convergence: Option<MeasureSequenceReport>,
}

/// Check that the scalar energy measures `f(·,u_j)·L^d` converge weakly* to
/// the relaxed energy measure of `μ` (density `f(x, dμ/dL)` plus atom
/// weights `f^∞·|m|`), and — when the integrand is strictly convex — that
/// the measures `u_j·L^d` converge area-strictly to `μ`.
pub fn minimizing_sequence_diagnostic(
    problem: &Problem,
    seq: &[Vec<f64>],
    mu: &DiscreteMeasure,
) -> Result<MinimizingSequenceReport> {
    if seq.len() < 3 {
        return Err(Error::Domain("need at least 3 sequence steps".into()));
    }
    let op = problem.operator();
    let f = problem.integrand();
    let grid = problem.grid();
    let n = grid.n_cells();
    let ncomp = f.dimension();
    let tau_norm = 1.0 + numerics::norm(problem.source().tau());
    for u in seq {
        let au = op.apply(u);
        let resid: f64 = au
            .iter()
            .zip(problem.source().tau())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if resid > 1e-8 * tau_norm {
            return Err(Error::Infeasible {
                residual: resid,
                tolerance: 1e-8,
            });
        }
    }
    let energies: Vec<f64> = seq
        .iter()
        .map(|u| problem.primal_energy(u))
        .collect::<Result<_>>()?;
    let not_minimizing_warning = energies.windows(2).any(|w| w[1] > w[0] + 1e-9);

    // limit energy measure: density f(x, dμ/dL) plus scalar atoms f^∞|m|
    let mut limit_density = vec![0.0; n];
    for c in 0..n {
        limit_density[c] = f.eval(&grid.center(c), mu.density_at(c));
    }
    let mut limit = DiscreteMeasure::from_density(grid.clone(), 1, limit_density)?;
    for atom in mu.atoms() {
        let mass = numerics::norm(&atom.mass);
        if mass < ATOM_MASS_FLOOR {
            continue;
        }
        let polar: Vec<f64> = atom.mass.iter().map(|v| v / mass).collect();
        let weight = mass * f.recession(&grid.center(atom.cell), &polar)?;
        limit = limit.with_atom(atom.cell, vec![weight])?;
    }

    let panel = default_panel(grid, 1);
    let limit_pairings: Vec<f64> = panel.iter().map(|phi| limit.weak_star_pair(phi)).collect();
    let mut energy_panel_errors = Vec::with_capacity(seq.len());
    for u in seq {
        let density: Vec<f64> = (0..n)
            .map(|c| f.eval(&grid.center(c), &u[c * ncomp..(c + 1) * ncomp]))
            .collect();
        let step_measure = DiscreteMeasure::from_density(grid.clone(), 1, density)?;
        let mut worst = 0.0f64;
        for (phi, lp) in panel.iter().zip(&limit_pairings) {
            worst = worst.max((step_measure.weak_star_pair(phi) - lp).abs());
        }
        energy_panel_errors.push(worst);
    }
    let last = energy_panel_errors.len() - 1;
    let energy_weak_star = energy_panel_errors[last] < TOL_WEAK
        && energy_panel_errors[last] <= energy_panel_errors[0] + TOL_WEAK;

    let measure_convergence = if f.is_strictly_convex() {
        let step_measures: Vec<DiscreteMeasure> = seq
            .iter()
            .map(|u| DiscreteMeasure::from_density(grid.clone(), ncomp, u.clone()))
            .collect::<Result<_>>()?;
        let mpanel = default_panel(grid, ncomp);
        Some(sequence_diagnostic(&step_measures, mu, &mpanel)?)
    } else {
        None
    };

    Ok(MinimizingSequenceReport {
        not_minimizing_warning,
        energy_panel_errors,
        energy_weak_star,
        measure_convergence,
    })
}
