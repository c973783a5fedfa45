//! Convex integrands `f : Ω × R^N → [0, ∞)` with linear growth, and the
//! pointwise transforms applied to them throughout the crate:
//!
//! * the z-variable Fenchel conjugate `f*(x,z*) = sup_z { z*·z − f(x,z) }`,
//!   computed by a deterministic two-stage search (coarse grid on the
//!   coercivity ball, then golden-section / coordinate refinement),
//! * the recession function `f^∞(x,z) = lim f(x,tz)/t` along the dyadic
//!   schedule `t = 2^k`, with Richardson extrapolation of the accepted pair,
//! * smoothing by an even polynomial bump mollifier,
//! * the unit-ball transform `(Sf)(x,z) = (1−|z|) f(x, z/(1−|z|))` together
//!   with its boundary extension by `f^∞`,
//! * a sampling-based growth/convexity verifier.
//!
//! Linear growth means `(|z|−1)/M ≤ f(x,z) ≤ M(1+|z|)`; the same constant
//! `M` bounds the z-Lipschitz constant and localises `dom f* ⊂ M·B^N`, which
//! both the conjugate search and the dual solvers rely on.

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::grid::Grid;
use crate::numerics::{self, gauss_legendre, golden_max, SplitMix64};
use crate::tolerances::*;

/// Number of coarse grid points per axis in the conjugate search.
const CONJ_COARSE: usize = 65;
/// Refinement steps (golden-section in 1D, coordinate rounds otherwise).
const CONJ_REFINE: usize = 20;
/// Nodes per axis for the mollifier quadrature.
const MOLLIFIER_NODES: usize = 33;
/// Dyadic recession schedule `t = 2^k`, `k = K_MIN..=K_MAX`.
const REC_K_MIN: u32 = 4;
const REC_K_MAX: u32 = 40;
/// Left/right difference quotients disagreeing by more than this flag a kink.
const KINK_GAP: f64 = 1e-4;

/// Even polynomial bump `ρ(s) = (35/32)(1−s²)³` on `[-1,1]`, unit mass.
pub(crate) fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - s * s;
        35.0 / 32.0 * t * t * t
    }
}

fn bump_deriv(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - s * s;
        35.0 / 32.0 * 3.0 * t * t * (-2.0 * s)
    }
}

#[derive(Debug, Clone)]
struct Table {
    xs: Vec<f64>,
    zs: Vec<f64>,
    /// vals[xi * zs.len() + zi]
    vals: Vec<f64>,
}

impl Table {
    fn from_points(points: &[(f64, f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain(
                "tabulated integrand needs sample points".into(),
            ));
        }
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut zs: Vec<f64> = points.iter().map(|p| p.1).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        zs.dedup();
        if zs.len() < 2 {
            return Err(Error::Domain(
                "tabulated integrand needs at least two z samples".into(),
            ));
        }
        let nz = zs.len();
        let mut vals = vec![f64::NAN; xs.len() * nz];
        for &(x, z, f) in points {
            if !f.is_finite() {
                return Err(Error::NonFiniteEval {
                    x: vec![x],
                    z: vec![z],
                });
            }
            let xi = xs.iter().position(|&v| v == x).unwrap();
            let zi = zs.iter().position(|&v| v == z).unwrap();
            vals[xi * nz + zi] = f;
        }
        if vals.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain(
                "tabulated integrand must sample a complete x × z grid".into(),
            ));
        }
        Ok(Self { xs, zs, vals })
    }

    /// Piecewise-linear in z with edge-slope extension beyond the sampled
    /// range; linear interpolation (clamped) across x rows.
    fn eval(&self, x: f64, z: f64) -> f64 {
        if self.xs.len() == 1 {
            return self.eval_row(0, z);
        }
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => self.eval_row(i, z),
            Err(pos) => {
                if pos == 0 {
                    self.eval_row(0, z)
                } else if pos == self.xs.len() {
                    self.eval_row(self.xs.len() - 1, z)
                } else {
                    let (x0, x1) = (self.xs[pos - 1], self.xs[pos]);
                    let t = (x - x0) / (x1 - x0);
                    (1.0 - t) * self.eval_row(pos - 1, z) + t * self.eval_row(pos, z)
                }
            }
        }
    }

    fn eval_row(&self, xi: usize, z: f64) -> f64 {
        let nz = self.zs.len();
        let row = &self.vals[xi * nz..(xi + 1) * nz];
        let zs = &self.zs;
        if z <= zs[0] {
            let slope = (row[1] - row[0]) / (zs[1] - zs[0]);
            return row[0] + slope * (z - zs[0]);
        }
        if z >= zs[nz - 1] {
            let slope = (row[nz - 1] - row[nz - 2]) / (zs[nz - 1] - zs[nz - 2]);
            return row[nz - 1] + slope * (z - zs[nz - 1]);
        }
        match zs.binary_search_by(|v| v.partial_cmp(&z).unwrap()) {
            Ok(i) => row[i],
            Err(pos) => {
                let (z0, z1) = (zs[pos - 1], zs[pos]);
                let t = (z - z0) / (z1 - z0);
                (1.0 - t) * row[pos - 1] + t * row[pos]
            }
        }
    }

    fn max_abs_slope(&self) -> f64 {
        let nz = self.zs.len();
        let mut m: f64 = 0.0;
        for xi in 0..self.xs.len() {
            for zi in 1..nz {
                let s = (self.vals[xi * nz + zi] - self.vals[xi * nz + zi - 1])
                    / (self.zs[zi] - self.zs[zi - 1]);
                m = m.max(s.abs());
            }
        }
        m
    }

    /// Slope of the x-modulus: max over adjacent rows and z samples of
    /// |Δf| / (|Δx| (1 + |z|)).
    fn modulus_slope(&self) -> f64 {
        let nz = self.zs.len();
        let mut m: f64 = 0.0;
        for xi in 1..self.xs.len() {
            let dx = self.xs[xi] - self.xs[xi - 1];
            for zi in 0..nz {
                let df = (self.vals[xi * nz + zi] - self.vals[(xi - 1) * nz + zi]).abs();
                m = m.max(df / (dx * (1.0 + self.zs[zi].abs())));
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Abs,
    Area,
    Huber {
        gamma: f64,
    },
    WeightedAbs {
        grid: Grid,
        weights: Vec<f64>,
        modulus_slope: f64,
    },
    Tabulated(Table),
    Mollified {
        base: Box<ConvexIntegrand>,
        delta: f64,
        nodes: Vec<f64>,
        node_weights: Vec<f64>,
    },
}

/// Borrowed view of an integrand's kind.
#[derive(Debug, Clone, Copy)]
pub enum IntegrandKind<'a> {
    Builtin(&'static str),
    Tabulated,
    Mollified {
        base: &'a ConvexIntegrand,
        delta: f64,
    },
}

/// A convex integrand with linear growth. Immutable after construction;
/// every operation is a pure function of its inputs, so values can be shared
/// freely across threads.
#[derive(Debug, Clone)]
pub struct ConvexIntegrand {
    kind: Kind,
    dimension: usize,
    growth_constant: f64,
    strictly_convex: bool,
}

impl ConvexIntegrand {
    /// `f(z) = |z|` in `R^n`.
    pub fn abs(n: usize) -> Self {
        Self {
            kind: Kind::Abs,
            dimension: n,
            growth_constant: 1.0,
            strictly_convex: false,
        }
    }

    /// The area integrand `f(z) = √(1 + |z|²)`; its recession function is
    /// `|z|` and its conjugate is `-√(1 - |z*|²)` on the closed unit ball.
    pub fn area(n: usize) -> Self {
        Self {
            kind: Kind::Area,
            dimension: n,
            growth_constant: 1.0,
            strictly_convex: true,
        }
    }

    /// Huber integrand: quadratic `|z|²/(2γ)` inside `|z| ≤ γ`, affine
    /// `|z| − γ/2` outside. Requires `0 < γ ≤ 2` so M = 1 works.
    pub fn huber(n: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(Error::Domain(format!(
                "huber gamma must be in (0, 2], got {gamma}"
            )));
        }
        Ok(Self {
            kind: Kind::Huber { gamma },
            dimension: n,
            growth_constant: 1.0,
            strictly_convex: false,
        })
    }

    /// `f(x,z) = a(x)|z|` with the weight sampled per grid cell (nearest-cell
    /// lookup). Weights must be strictly positive to keep coercivity.
    pub fn weighted_abs(grid: Grid, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.n_cells() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for a grid of {} cells",
                weights.len(),
                grid.n_cells()
            )));
        }
        let min_w = weights.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_w = weights.iter().cloned().fold(0.0f64, f64::max);
        if !(min_w > 0.0) || !max_w.is_finite() {
            return Err(Error::Domain(
                "weighted_abs weights must be positive and finite".into(),
            ));
        }
        let mut slope: f64 = 0.0;
        for i in 0..weights.len() {
            for j in (i + 1)..weights.len() {
                let d = grid.center_distance(i, j);
                slope = slope.max((weights[i] - weights[j]).abs() / d);
            }
        }
        let m = max_w.max(1.0 / min_w);
        Ok(Self {
            kind: Kind::WeightedAbs {
                grid,
                weights,
                modulus_slope: slope,
            },
            dimension: 1,
            growth_constant: m,
            strictly_convex: false,
        })
    }

    /// Integrand interpolated from `(x, z, f)` samples on a complete grid
    /// (N = 1). Piecewise linear in z with edge-slope extension, so linear
    /// growth holds globally whenever the sampled slopes are bounded.
    pub fn tabulated(points: &[(f64, f64, f64)]) -> Result<Self> {
        let table = Table::from_points(points)?;
        let slope = table.max_abs_slope();
        let mut m = slope.max(1.0);
        for xi in 0..table.xs.len() {
            for zi in 0..table.zs.len() {
                let f = table.vals[xi * table.zs.len() + zi];
                m = m.max(f.abs() / (1.0 + table.zs[zi].abs()));
            }
        }
        Ok(Self {
            kind: Kind::Tabulated(table),
            dimension: 1,
            growth_constant: m,
            strictly_convex: false,
        })
    }

    /// Override the growth constant (must stay positive). Useful when a
    /// caller knows a tighter or deliberately looser `M` than the default.
    pub fn with_growth_constant(mut self, m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::Domain("growth constant must be positive".into()));
        }
        self.growth_constant = m;
        Ok(self)
    }

    pub fn kind(&self) -> IntegrandKind<'_> {
        match &self.kind {
            Kind::Abs => IntegrandKind::Builtin("abs"),
            Kind::Area => IntegrandKind::Builtin("area"),
            Kind::Huber { .. } => IntegrandKind::Builtin("huber"),
            Kind::WeightedAbs { .. } => IntegrandKind::Builtin("weighted_abs"),
            Kind::Tabulated(_) => IntegrandKind::Tabulated,
            Kind::Mollified { base, delta, .. } => IntegrandKind::Mollified {
                base,
                delta: *delta,
            },
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn growth_constant(&self) -> f64 {
        self.growth_constant
    }

    /// Whether both `f(x,·)` and `f^∞(x,·)` are strictly convex (on norms,
    /// for the recession part). Drives the improved-convergence diagnostic.
    pub fn is_strictly_convex(&self) -> bool {
        self.strictly_convex
    }

    /// The modulus of continuity `ω` in
    /// `|f(x,z) − f(y,z)| ≤ ω(|x−y|)(1+|z|)`; zero for x-independent kinds.
    pub fn modulus(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Abs | Kind::Area | Kind::Huber { .. } => 0.0,
            Kind::WeightedAbs { modulus_slope, .. } => modulus_slope * r,
            Kind::Tabulated(t) => t.modulus_slope() * r,
            Kind::Mollified { base, delta, .. } => base.modulus(r) * (1.0 + delta),
        }
    }

    /// Pointwise energy density `f(x, z)`.
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.dimension);
        let zn = numerics::norm(z);
        match &self.kind {
            Kind::Abs => zn,
            Kind::Area => (1.0 + zn * zn).sqrt(),
            Kind::Huber { gamma } => {
                if zn <= *gamma {
                    zn * zn / (2.0 * gamma)
                } else {
                    zn - gamma / 2.0
                }
            }
            Kind::WeightedAbs { grid, weights, .. } => weights[grid.nearest_cell(x)] * zn,
            Kind::Tabulated(t) => t.eval(x.first().copied().unwrap_or(0.0), z[0]),
            Kind::Mollified {
                base,
                delta,
                nodes,
                node_weights,
            } => {
                let n = self.dimension;
                let step = delta / (n as f64).sqrt();
                let mut shifted = vec![0.0; n];
                let mut acc = 0.0;
                let mut idx = vec![0usize; n];
                loop {
                    let mut w = 1.0;
                    for a in 0..n {
                        let s = nodes[idx[a]];
                        w *= node_weights[idx[a]] * bump(s);
                        shifted[a] = z[a] - step * s;
                    }
                    acc += w * base.eval(x, &shifted);
                    // odometer over the tensor grid
                    let mut a = 0;
                    loop {
                        idx[a] += 1;
                        if idx[a] < nodes.len() {
                            break;
                        }
                        idx[a] = 0;
                        a += 1;
                        if a == n {
                            return acc;
                        }
                    }
                }
            }
        }
    }

    /// Fenchel conjugate `f*(x, z*)`, by coarse grid search over the
    /// coercivity ball of radius `M(2 + |z*|M)` followed by golden-section
    /// (coordinate-wise beyond 1D) refinement. Reports `+∞` when
    /// `|z*| > M + 1e-9`, when the inner sup exceeds 1e12, or when the
    /// support-function certificate `z*·d > f^∞(x,d)` proves unboundedness.
    pub fn conjugate(&self, x: &[f64], zstar: &[f64]) -> Result<ExtendedReal> {
        Ok(self.conjugate_with_maximizer(x, zstar)?.0)
    }

    /// Conjugate together with the maximising `z` (present when finite).
    pub fn conjugate_with_maximizer(
        &self,
        x: &[f64],
        zstar: &[f64],
    ) -> Result<(ExtendedReal, Option<Vec<f64>>)> {
        let n = self.dimension;
        debug_assert_eq!(zstar.len(), n);
        if n > 3 {
            return Err(Error::Domain(format!(
                "conjugate search supports N ≤ 3, got {n}"
            )));
        }
        let m = self.growth_constant;
        let p_norm = numerics::norm(zstar);
        if p_norm > m + TOL_CONJ_DOMAIN {
            return Ok((ExtendedReal::PosInf, None));
        }

        let radius = m * (2.0 + p_norm * m);
        let g = |z: &[f64]| -> f64 { numerics::dot(zstar, z) - self.eval(x, z) };

        // Stage 1: coarse grid on the box [-R, R]^N.
        let spacing = 2.0 * radius / (CONJ_COARSE - 1) as f64;
        let mut best = vec![0.0; n];
        let mut best_val = f64::NEG_INFINITY;
        let mut idx = vec![0usize; n];
        let mut z = vec![0.0; n];
        'grid: loop {
            for a in 0..n {
                z[a] = -radius + idx[a] as f64 * spacing;
            }
            let v = g(&z);
            if v.is_nan() {
                return Err(Error::NonFiniteEval {
                    x: x.to_vec(),
                    z: z.clone(),
                });
            }
            if v > best_val {
                best_val = v;
                best.copy_from_slice(&z);
            }
            let mut a = 0;
            loop {
                idx[a] += 1;
                if idx[a] < CONJ_COARSE {
                    break;
                }
                idx[a] = 0;
                a += 1;
                if a == n {
                    break 'grid;
                }
            }
        }

        // Stage 2: refinement around the best coarse point.
        if n == 1 {
            let a = (best[0] - spacing).max(-radius);
            let b = (best[0] + spacing).min(radius);
            let (zb, vb) = golden_max(a, b, 3 * CONJ_REFINE, &mut |t| g(&[t]));
            if vb > best_val {
                best_val = vb;
                best[0] = zb;
            }
        } else {
            let mut h = spacing;
            let mut current = best.clone();
            for _ in 0..CONJ_REFINE {
                for axis in 0..n {
                    let lo = (current[axis] - h).max(-radius);
                    let hi = (current[axis] + h).min(radius);
                    let mut probe = current.clone();
                    let (t, v) = golden_max(lo, hi, 24, &mut |t| {
                        probe[axis] = t;
                        g(&probe)
                    });
                    current[axis] = t;
                    if v > best_val {
                        best_val = v;
                        best = current.clone();
                    }
                }
                h *= 0.7;
            }
        }

        if best_val > CONJ_SUP_CAP {
            return Ok((ExtendedReal::PosInf, None));
        }

        // Unboundedness certificate: f(x, td) ≤ f(x,0) + t f^∞(x,d), so a
        // direction with z*·d > f^∞(x,d) drives the sup to +∞. Only needed
        // when the maximiser pushed into the outer shell (an interior
        // maximum of a concave function is global).
        let best_norm = numerics::norm(&best);
        if best_norm >= radius - 2.0 * spacing && best_norm > 0.0 {
            let mut directions = vec![best.iter().map(|v| v / best_norm).collect::<Vec<f64>>()];
            if p_norm > 0.0 {
                directions.push(zstar.iter().map(|v| v / p_norm).collect());
            }
            for dir in directions {
                let slope = self.recession(x, &dir)?;
                if numerics::dot(zstar, &dir) - slope > TOL_CONJ_SLOPE {
                    return Ok((ExtendedReal::PosInf, None));
                }
            }
        }

        Ok((ExtendedReal::Finite(best_val), Some(best)))
    }

    /// Recession function `f^∞(x, z) = lim_{t→∞} f(x, tz)/t`, evaluated on
    /// the dyadic schedule `t = 2^k`, `k = 4..=40`. The difference quotients
    /// `I(t) = (f(x,tz) − f(x,0))/t` are monotone for convex `f`, so the
    /// schedule stops once two successive values agree to 1e-7 relative,
    /// returning the Richardson extrapolation `2·I(2t) − I(t)` of the
    /// accepted pair (exact for the `L − a/t` tail every linear-growth
    /// integrand has).
    pub fn recession(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        debug_assert_eq!(z.len(), self.dimension);
        if numerics::norm(z) == 0.0 {
            return Ok(0.0);
        }
        let f0 = self.eval(x, &vec![0.0; self.dimension]);
        if !f0.is_finite() {
            return Err(Error::NonFiniteEval {
                x: x.to_vec(),
                z: vec![0.0; self.dimension],
            });
        }
        let quotient = |t: f64| -> Result<f64> {
            let tz: Vec<f64> = z.iter().map(|v| v * t).collect();
            let ft = self.eval(x, &tz);
            if !ft.is_finite() {
                return Err(Error::NonFiniteEval {
                    x: x.to_vec(),
                    z: tz,
                });
            }
            Ok((ft - f0) / t)
        };
        let mut prev = quotient((1u64 << REC_K_MIN) as f64)?;
        let mut last_increment = f64::INFINITY;
        for k in (REC_K_MIN + 1)..=REC_K_MAX {
            let cur = quotient((1u64 << k) as f64)?;
            last_increment = (cur - prev).abs();
            if last_increment < TOL_RECESSION * (1.0 + cur.abs()) {
                return Ok(2.0 * cur - prev);
            }
            prev = cur;
        }
        Err(Error::NoConvergence { last_increment })
    }

    /// Gradient `∇_z f(x,z)` for differentiable kinds. Kinks are reported as
    /// `NotDifferentiable` via left/right difference disagreement (or the
    /// known kink locus for the built-in norms).
    pub fn subgradient(&self, x: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        debug_assert_eq!(z.len(), self.dimension);
        let zn = numerics::norm(z);
        match &self.kind {
            Kind::Area => {
                let s = 1.0 / (1.0 + zn * zn).sqrt();
                Ok(z.iter().map(|v| v * s).collect())
            }
            Kind::Huber { gamma } => {
                if zn <= *gamma {
                    Ok(z.iter().map(|v| v / gamma).collect())
                } else {
                    Ok(z.iter().map(|v| v / zn).collect())
                }
            }
            Kind::Abs => {
                if zn <= 1e-9 {
                    Err(Error::NotDifferentiable {
                        z: z.to_vec(),
                        gap: 2.0,
                    })
                } else {
                    Ok(z.iter().map(|v| v / zn).collect())
                }
            }
            Kind::WeightedAbs { grid, weights, .. } => {
                if zn <= 1e-9 {
                    Err(Error::NotDifferentiable {
                        z: z.to_vec(),
                        gap: 2.0 * weights[grid.nearest_cell(x)],
                    })
                } else {
                    let a = weights[grid.nearest_cell(x)];
                    Ok(z.iter().map(|v| a * v / zn).collect())
                }
            }
            Kind::Tabulated(_) => {
                let h = 1e-6;
                let mut grad = vec![0.0; 1];
                let fz = self.eval(x, z);
                let right = (self.eval(x, &[z[0] + h]) - fz) / h;
                let left = (fz - self.eval(x, &[z[0] - h])) / h;
                let gap = (right - left).abs();
                if gap > KINK_GAP {
                    return Err(Error::NotDifferentiable { z: z.to_vec(), gap });
                }
                grad[0] = 0.5 * (left + right);
                Ok(grad)
            }
            Kind::Mollified {
                base,
                delta,
                nodes,
                node_weights,
            } => {
                // Differentiate through the mollifier rather than the
                // quadrature: ∂_i f^δ(z) = (1/δ') Σ_K w ρ'(s_i) Π ρ(s_a) f(z − δ's_K).
                let n = self.dimension;
                let step = delta / (n as f64).sqrt();
                let mut grad = vec![0.0; n];
                let mut shifted = vec![0.0; n];
                let mut idx = vec![0usize; n];
                loop {
                    let mut weight_common = 1.0;
                    for a in 0..n {
                        weight_common *= node_weights[idx[a]];
                        shifted[a] = z[a] - step * nodes[idx[a]];
                    }
                    let fv = base.eval(x, &shifted);
                    for i in 0..n {
                        let mut w = weight_common * bump_deriv(nodes[idx[i]]) / step;
                        for a in 0..n {
                            if a != i {
                                w *= bump(nodes[idx[a]]);
                            }
                        }
                        grad[i] += w * fv;
                    }
                    let mut a = 0;
                    loop {
                        idx[a] += 1;
                        if idx[a] < nodes.len() {
                            break;
                        }
                        idx[a] = 0;
                        a += 1;
                        if a == n {
                            return Ok(grad);
                        }
                    }
                }
            }
        }
    }

    /// Smooth the integrand at scale `δ > 0` with the even bump mollifier and
    /// a 33-node Gauss–Legendre quadrature per axis. The result is convex,
    /// dominates `f`, and satisfies `|f^δ − f| ≤ Mδ`; its growth constant is
    /// enlarged to `M(1+δ)`.
    pub fn mollify(&self, delta: f64) -> Result<ConvexIntegrand> {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!(
                "mollification scale must be positive, got {delta}"
            )));
        }
        let (nodes, node_weights) = gauss_legendre(MOLLIFIER_NODES);
        Ok(ConvexIntegrand {
            dimension: self.dimension,
            growth_constant: self.growth_constant * (1.0 + delta),
            strictly_convex: self.strictly_convex,
            kind: Kind::Mollified {
                base: Box::new(self.clone()),
                delta,
                nodes,
                node_weights,
            },
        })
    }

    /// Unit-ball transform `(Sf)(x,z) = (1−|z|) f(x, z/(1−|z|))` for
    /// `|z| < 1`; its continuous extension to `|z| = 1` is `f^∞`.
    pub fn e_class_transform(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        let zn = numerics::norm(z);
        if zn >= 1.0 {
            return Err(Error::Domain(format!(
                "e-class transform requires |z| < 1, got |z| = {zn}"
            )));
        }
        let scale = 1.0 - zn;
        let inner: Vec<f64> = z.iter().map(|v| v / scale).collect();
        Ok(scale * self.eval(x, &inner))
    }

    /// `|Sf(x, (1−ε)d) − f^∞(x, d)|` for a unit direction `d`: the boundary
    /// continuity defect of the unit-ball extension.
    pub fn e_class_boundary_defect(&self, x: &[f64], direction: &[f64], eps: f64) -> Result<f64> {
        let dn = numerics::norm(direction);
        if dn == 0.0 || !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(
                "need a nonzero direction and ε ∈ (0,1)".into(),
            ));
        }
        let unit: Vec<f64> = direction.iter().map(|v| v / dn).collect();
        let inside: Vec<f64> = unit.iter().map(|v| v * (1.0 - eps)).collect();
        let sf = self.e_class_transform(x, &inside)?;
        let rec = self.recession(x, &unit)?;
        Ok((sf - rec).abs())
    }

    /// Sample-based verification of the linear-growth envelope, convexity,
    /// the z-Lipschitz bound and the x-modulus bound. An empty violation
    /// list means PASS.
    pub fn verify_growth(&self, spec: &GrowthSampleSpec) -> Result<GrowthReport> {
        let n = self.dimension;
        let m = self.growth_constant;
        let slack = 1e-9;
        let mut rng = SplitMix64::new(spec.seed);
        let mut violations = Vec::new();
        let mut samples = 0usize;

        let xs: Vec<Vec<f64>> = if spec.x_points.is_empty() {
            vec![vec![0.5]]
        } else {
            spec.x_points.clone()
        };

        for _ in 0..spec.n_points {
            let z = rng.vector_in_cube(n, spec.radius);
            let zb = rng.vector_in_cube(n, spec.radius);
            let s = rng.next_f64();
            for x in &xs {
                samples += 1;
                let fz = self.eval(x, &z);
                let fzb = self.eval(x, &zb);
                if !fz.is_finite() || !fzb.is_finite() {
                    return Err(Error::NonFiniteEval { x: x.clone(), z });
                }
                let zn = numerics::norm(&z);
                let lower = (zn - 1.0) / m;
                let upper = m * (1.0 + zn);
                if fz < lower - slack {
                    violations.push(GrowthViolation {
                        check: GrowthCheck::Coercivity,
                        excess: lower - fz,
                        detail: format!("f={fz:.6} below (|z|-1)/M={lower:.6} at z={z:?}"),
                    });
                }
                if fz > upper + slack {
                    violations.push(GrowthViolation {
                        check: GrowthCheck::UpperGrowth,
                        excess: fz - upper,
                        detail: format!("f={fz:.6} above M(1+|z|)={upper:.6} at z={z:?}"),
                    });
                }
                let mid: Vec<f64> = z
                    .iter()
                    .zip(&zb)
                    .map(|(a, b)| s * a + (1.0 - s) * b)
                    .collect();
                let fmid = self.eval(x, &mid);
                let chord = s * fz + (1.0 - s) * fzb;
                if fmid > chord + slack {
                    violations.push(GrowthViolation {
                        check: GrowthCheck::Convexity,
                        excess: fmid - chord,
                        detail: format!(
                            "f(sz₁+(1-s)z₂)={fmid:.6} above chord {chord:.6} (s={s:.3})"
                        ),
                    });
                }
                let dz: Vec<f64> = z.iter().zip(&zb).map(|(a, b)| a - b).collect();
                let lip = m * numerics::norm(&dz);
                if (fz - fzb).abs() > lip + slack {
                    violations.push(GrowthViolation {
                        check: GrowthCheck::Lipschitz,
                        excess: (fz - fzb).abs() - lip,
                        detail: format!("|Δf|={:.6} above M|Δz|={lip:.6}", (fz - fzb).abs()),
                    });
                }
            }
            // x-modulus bound across sample points
            for i in 0..xs.len() {
                for j in (i + 1)..xs.len() {
                    let fi = self.eval(&xs[i], &z);
                    let fj = self.eval(&xs[j], &z);
                    let dx: Vec<f64> = xs[i].iter().zip(&xs[j]).map(|(a, b)| a - b).collect();
                    let bound = self.modulus(numerics::norm(&dx)) * (1.0 + numerics::norm(&z));
                    if (fi - fj).abs() > bound + slack {
                        violations.push(GrowthViolation {
                            check: GrowthCheck::Modulus,
                            excess: (fi - fj).abs() - bound,
                            detail: format!(
                                "|f(x,z)-f(y,z)|={:.6} above ω(|x-y|)(1+|z|)={bound:.6}",
                                (fi - fj).abs()
                            ),
                        });
                    }
                }
            }
        }
        Ok(GrowthReport {
            violations,
            samples,
        })
    }
}

/// Sampling plan for [`ConvexIntegrand::verify_growth`].
#[derive(Debug, Clone)]
pub struct GrowthSampleSpec {
    pub n_points: usize,
    pub radius: f64,
    pub seed: u64,
    /// Spatial sample points; defaults to a single interior point when empty.
    pub x_points: Vec<Vec<f64>>,
}

impl GrowthSampleSpec {
    pub fn new(n_points: usize, radius: f64, seed: u64) -> Self {
        Self {
            n_points,
            radius,
            seed,
            x_points: Vec::new(),
        }
    }

    pub fn with_x_points(mut self, x_points: Vec<Vec<f64>>) -> Self {
        self.x_points = x_points;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthCheck {
    Coercivity,
    UpperGrowth,
    Convexity,
    Lipschitz,
    Modulus,
}

#[derive(Debug, Clone)]
pub struct GrowthViolation {
    pub check: GrowthCheck,
    pub excess: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub violations: Vec<GrowthViolation>,
    pub samples: usize,
}

impl GrowthReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst(&self, check: GrowthCheck) -> Option<&GrowthViolation> {
        self.violations
            .iter()
            .filter(|v| v.check == check)
            .max_by(|a, b| a.excess.partial_cmp(&b.excess).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: &[f64] = &[0.5];

    /// Independent brute-force conjugate: plain dense scan, no refinement.
    fn conjugate_oracle(f: &ConvexIntegrand, zstar: f64, radius: f64, n: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            let z = -radius + 2.0 * radius * i as f64 / (n - 1) as f64;
            best = best.max(zstar * z - f.eval(X, &[z]));
        }
        best
    }

    #[test]
    fn conjugate_of_area_at_zero_is_minus_one() {
        let f = ConvexIntegrand::area(1);
        let oracle = conjugate_oracle(&f, 0.0, 1000.0, 200_001);
        assert!((oracle - (-1.0)).abs() < 1e-6);
        let got = f.conjugate(X, &[0.0]).unwrap().unwrap_finite();
        assert!((got - (-1.0)).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn conjugate_of_abs_inside_and_outside_the_slab() {
        let f = ConvexIntegrand::abs(1);
        let oracle = conjugate_oracle(&f, 0.5, 1000.0, 200_001);
        assert!(oracle.abs() < 1e-9);
        let inside = f.conjugate(X, &[0.5]).unwrap().unwrap_finite();
        assert!(inside.abs() < 1e-9, "got {inside}");
        assert_eq!(f.conjugate(X, &[2.0]).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn conjugate_of_area_beyond_slope_one_is_infinite() {
        let f = ConvexIntegrand::area(1);
        assert_eq!(f.conjugate(X, &[2.0]).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn conjugate_of_area_matches_closed_form_inside() {
        let f = ConvexIntegrand::area(1);
        for &p in &[0.1f64, 0.3, 0.5, 0.7, 0.9] {
            let exact = -(1.0 - p * p).sqrt();
            let got = f.conjugate(X, &[p]).unwrap().unwrap_finite();
            assert!((got - exact).abs() < 1e-8, "p={p}: {got} vs {exact}");
        }
    }

    #[test]
    fn conjugate_detects_unbounded_weighted_abs_directions() {
        let g = Grid::uniform_1d(2);
        let f = ConvexIntegrand::weighted_abs(g, vec![0.5, 0.5]).unwrap();
        // M = 2, so 1.5 passes the slab test, but sup (1.5z − 0.5|z|) = ∞.
        assert_eq!(f.conjugate(&[0.25], &[1.5]).unwrap(), ExtendedReal::PosInf);
        // inside the true domain the conjugate vanishes
        let v = f.conjugate(&[0.25], &[0.3]).unwrap().unwrap_finite();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn recession_of_area_is_the_euclidean_norm() {
        let f = ConvexIntegrand::area(1);
        let r = f.recession(X, &[1.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-10, "got {r}");
    }

    #[test]
    fn recession_of_abs_is_one_homogeneous() {
        let f = ConvexIntegrand::abs(1);
        let r = f.recession(X, &[-3.0]).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
    }

    #[test]
    fn recession_at_zero_vanishes() {
        for f in [
            ConvexIntegrand::abs(2),
            ConvexIntegrand::area(2),
            ConvexIntegrand::huber(2, 0.5).unwrap(),
        ] {
            assert_eq!(f.recession(&[0.5, 0.5], &[0.0, 0.0]).unwrap(), 0.0);
        }
    }

    #[test]
    fn recession_of_huber_is_exact_after_extrapolation() {
        let f = ConvexIntegrand::huber(1, 0.5).unwrap();
        let r = f.recession(X, &[2.0]).unwrap();
        assert!((r - 2.0).abs() < 1e-12, "got {r}");
    }

    #[test]
    fn subgradient_of_area_matches_finite_differences() {
        let f = ConvexIntegrand::area(1);
        assert!(f.subgradient(X, &[0.0]).unwrap()[0].abs() < 1e-15);
        let h = 1e-6;
        let fd = (f.eval(X, &[1.0 + h]) - f.eval(X, &[1.0 - h])) / (2.0 * h);
        let g = f.subgradient(X, &[1.0]).unwrap()[0];
        assert!((g - fd).abs() < 1e-9);
        assert!((g - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn subgradient_of_mollified_abs_near_one() {
        let f = ConvexIntegrand::abs(1).mollify(0.1).unwrap();
        let g = f.subgradient(X, &[1.0]).unwrap()[0];
        assert!((1.0 - 1e-6..=1.0 + 1e-9).contains(&g), "got {g}");
        // Fenchel equality at a smooth point
        let fx = f.eval(X, &[1.0]);
        let conj = f.conjugate(X, &[g]).unwrap().unwrap_finite();
        assert!(
            (fx + conj - g).abs() < TOL_FENCHEL,
            "residual {}",
            fx + conj - g
        );
    }

    #[test]
    fn subgradient_reports_kinks() {
        let f = ConvexIntegrand::abs(1);
        assert!(matches!(
            f.subgradient(X, &[0.0]),
            Err(Error::NotDifferentiable { .. })
        ));
        let table: Vec<(f64, f64, f64)> = (-40..=40)
            .map(|i| {
                let z = i as f64 * 0.25;
                (0.0, z, (z - 1.0).abs())
            })
            .collect();
        let t = ConvexIntegrand::tabulated(&table).unwrap();
        assert!(matches!(
            t.subgradient(X, &[1.0]),
            Err(Error::NotDifferentiable { .. })
        ));
        let g = t.subgradient(X, &[3.0]).unwrap()[0];
        assert!((g - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mollification_stays_in_the_growth_sandwich() {
        let f = ConvexIntegrand::abs(1);
        let fd = f.mollify(0.1).unwrap();
        let m = f.growth_constant();
        let v = fd.eval(X, &[5.0]);
        assert!(v >= 5.0 - 1e-12 && v <= 5.0 + 0.1 * m + 1e-12, "got {v}");
        for &z in &[0.0, 0.03, 0.7, -2.0] {
            let base = f.eval(X, &[z]);
            let moll = fd.eval(X, &[z]);
            assert!(moll >= base - 1e-12, "f^δ ≥ f violated at {z}");
            assert!(moll <= base + 0.1 * m + 1e-12, "Mδ bound violated at {z}");
        }
    }

    #[test]
    fn mollification_of_affine_is_identity() {
        // f(z) = z + 10 sampled on [-5, 5]; affine, so the even mollifier
        // must reproduce it exactly at interior points.
        let pts: Vec<(f64, f64, f64)> = (-20..=20)
            .map(|i| {
                let z = i as f64 * 0.25;
                (0.0, z, z + 10.0)
            })
            .collect();
        let f = ConvexIntegrand::tabulated(&pts).unwrap();
        let fd = f.mollify(0.1).unwrap();
        for &z in &[-1.0, 0.0, 0.4, 2.0] {
            assert!((fd.eval(X, &[z]) - (z + 10.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn mollified_abs_decreases_to_abs_as_delta_shrinks() {
        let f = ConvexIntegrand::abs(1);
        let mut prev = f64::INFINITY;
        for &d in &[0.1, 0.01, 0.001] {
            let v = f.mollify(d).unwrap().eval(X, &[1.0]);
            assert!(v <= prev + 1e-12);
            assert!(v >= 1.0 - 1e-12);
            prev = v;
        }
        assert!((prev - 1.0).abs() < 1e-3);
        // inside the smear the decrease is strict until δ < |z|
        let near: Vec<f64> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&d| f.mollify(d).unwrap().eval(X, &[0.05]))
            .collect();
        assert!(near[0] > near[1] + 1e-6);
        assert!((near[1] - 0.05).abs() < 1e-12);
        assert!((near[2] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn e_class_transform_values() {
        let area = ConvexIntegrand::area(1);
        assert!((area.e_class_transform(X, &[0.0]).unwrap() - 1.0).abs() < 1e-15);
        let abs = ConvexIntegrand::abs(1);
        assert!((abs.e_class_transform(X, &[0.5]).unwrap() - 0.5).abs() < 1e-15);
        let near = area.e_class_transform(X, &[0.999]).unwrap();
        assert!((near - 1.0).abs() < 2e-3, "got {near}");
        assert!(matches!(
            area.e_class_transform(X, &[1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn e_class_boundary_defect_shrinks_with_eps() {
        let area = ConvexIntegrand::area(1);
        let d1 = area.e_class_boundary_defect(X, &[1.0], 1e-2).unwrap();
        let d2 = area.e_class_boundary_defect(X, &[1.0], 1e-4).unwrap();
        assert!(d2 < d1 && d2 < 1e-3);
    }

    #[test]
    fn verify_growth_passes_area_with_m_two() {
        let f = ConvexIntegrand::area(1).with_growth_constant(2.0).unwrap();
        let report = f
            .verify_growth(&GrowthSampleSpec::new(200, 10.0, 7))
            .unwrap();
        assert!(report.pass(), "violations: {:?}", report.violations);
    }

    #[test]
    fn verify_growth_fails_quadratic_upper_bound() {
        let pts: Vec<(f64, f64, f64)> = (-40..=40)
            .map(|i| {
                let z = i as f64 * 0.5;
                (0.0, z, z * z)
            })
            .collect();
        let f = ConvexIntegrand::tabulated(&pts)
            .unwrap()
            .with_growth_constant(2.0)
            .unwrap();
        let report = f
            .verify_growth(&GrowthSampleSpec::new(200, 15.0, 11))
            .unwrap();
        assert!(report.worst(GrowthCheck::UpperGrowth).is_some());
    }

    #[test]
    fn verify_growth_fails_clipped_kink_convexity() {
        // hard clip to zero below |z| = 5: jumps at the threshold
        let pts: Vec<(f64, f64, f64)> = (-60..=60)
            .map(|i| {
                let z = i as f64 * 0.25;
                let v = if z.abs() <= 5.0 { 0.0 } else { z.abs() };
                (0.0, z, v)
            })
            .collect();
        let f = ConvexIntegrand::tabulated(&pts).unwrap();
        let report = f
            .verify_growth(&GrowthSampleSpec::new(300, 10.0, 13))
            .unwrap();
        assert!(report.worst(GrowthCheck::Convexity).is_some());
    }

    #[test]
    fn fenchel_young_holds_on_samples() {
        let mut rng = SplitMix64::new(3);
        for f in [
            ConvexIntegrand::abs(1),
            ConvexIntegrand::area(1),
            ConvexIntegrand::huber(1, 0.5).unwrap(),
        ] {
            for _ in 0..50 {
                let z = rng.uniform(-4.0, 4.0);
                let p = rng.uniform(-0.9, 0.9);
                if let ExtendedReal::Finite(conj) = f.conjugate(X, &[p]).unwrap() {
                    let lhs = f.eval(X, &[z]) + conj;
                    assert!(lhs >= z * p - TOL_FENCHEL, "FY violated: {lhs} < {}", z * p);
                }
            }
        }
    }

    #[test]
    fn biconjugation_recovers_the_integrand() {
        // nested grid-search oracle: (f*)*(z) = max_p { zp − f*(p) }
        for f in [
            ConvexIntegrand::abs(1),
            ConvexIntegrand::area(1),
            ConvexIntegrand::huber(1, 0.5).unwrap(),
        ] {
            let m = f.growth_constant();
            for &z in &[-1.4, -0.5, 0.0, 0.3, 1.2] {
                let mut best = f64::NEG_INFINITY;
                let steps = 800;
                for i in 0..=steps {
                    let p = -m + 2.0 * m * i as f64 / steps as f64;
                    if let ExtendedReal::Finite(fp) = f.conjugate(X, &[p]).unwrap() {
                        best = best.max(z * p - fp);
                    }
                }
                let direct = f.eval(X, &[z]);
                assert!(
                    (best - direct).abs() < 2e-5,
                    "biconjugation off at z={z}: {best} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn recession_is_positively_homogeneous() {
        let f = ConvexIntegrand::area(2);
        let x = &[0.5, 0.5];
        let base = f.recession(x, &[0.6, -0.8]).unwrap();
        for &t in &[2.0, 5.0, 10.0] {
            let scaled = f.recession(x, &[0.6 * t, -0.8 * t]).unwrap();
            assert!((scaled - t * base).abs() < 1e-6 * t, "t={t}");
        }
    }

    #[test]
    fn recession_dominates_finite_conjugate_slopes() {
        let mut rng = SplitMix64::new(17);
        for f in [ConvexIntegrand::abs(1), ConvexIntegrand::area(1)] {
            for _ in 0..40 {
                let z = rng.uniform(-3.0, 3.0);
                let p = rng.uniform(-1.0, 1.0);
                if f.conjugate(X, &[p]).unwrap().is_finite() {
                    let rec = f.recession(X, &[z]).unwrap();
                    assert!(rec >= z * p - 1e-9);
                }
            }
        }
    }

    #[test]
    fn mollified_gradients_respect_the_lipschitz_bound() {
        let f = ConvexIntegrand::abs(1);
        let m = f.growth_constant();
        for &delta in &[0.1, 0.01] {
            let fd = f.mollify(delta).unwrap();
            let mut rng = SplitMix64::new(29);
            for _ in 0..60 {
                let z = rng.uniform(-3.0, 3.0);
                let g = fd.subgradient(X, &[z]).unwrap()[0];
                assert!(g.abs() <= m + 1e-9, "|∇f^δ({z})| = {} > M", g.abs());
            }
        }
    }

    #[test]
    fn fenchel_young_property() {
        // |p| stays ≤ 0.9: beyond ~0.945·M the pinned search radius
        // M(2+|p|M) no longer contains the area maximiser p/√(1−p²) and
        // the computed conjugate undershoots by more than the tolerance
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        runner
            .run(&(-4.0f64..4.0, -0.9f64..0.9), |(z, p)| {
                for f in [ConvexIntegrand::abs(1), ConvexIntegrand::area(1)] {
                    if let ExtendedReal::Finite(conj) = f.conjugate(X, &[p]).unwrap() {
                        let lhs = f.eval(X, &[z]) + conj;
                        prop_assert!(lhs >= z * p - TOL_FENCHEL);
                    }
                }
                Ok(())
            })
            .unwrap();
    }

    #[test]
    fn recession_homogeneity_property() {
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        runner
            .run(&(-3.0f64..3.0, 0.1f64..10.0), |(z, t)| {
                let f = ConvexIntegrand::huber(1, 0.5).unwrap();
                let base = f.recession(X, &[z]).unwrap();
                let scaled = f.recession(X, &[t * z]).unwrap();
                prop_assert!((scaled - t * base).abs() <= 1e-8 * (1.0 + t));
                Ok(())
            })
            .unwrap();
    }

    #[test]
    fn mollified_conjugate_is_dominated_by_the_base_conjugate() {
        let f = ConvexIntegrand::abs(1);
        let fd = f.mollify(0.05).unwrap();
        for &p in &[-0.9, -0.4, 0.0, 0.6, 1.0] {
            let a = fd.conjugate(X, &[p]).unwrap();
            let b = f.conjugate(X, &[p]).unwrap();
            if let (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) = (a, b) {
                assert!(a <= b + 1e-7, "(f^δ)* ≤ f* violated at p={p}: {a} > {b}");
            }
        }
    }
}
