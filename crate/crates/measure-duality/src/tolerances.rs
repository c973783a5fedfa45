//! Central numeric tolerances.
//!
//! Every threshold used by the library and its verification suites lives
//! here, each with the reasoning that fixed its value. Nothing in the crate
//! hard-codes an ad-hoc epsilon.

/// Fenchel–Young residual bound on unit-scale problems.
///
/// `f(x,z) + f*(x,z*) − z·z*` vanishes exactly at a subgradient pair; the
/// conjugate search resolves interior maximisers to ~1e-9, so 1e-6 absolute
/// leaves three orders of headroom.
pub const TOL_FENCHEL: f64 = 1e-6;

/// Biconjugation residual `|(f*)* − f|` at sampled points.
pub const TOL_BICONJ: f64 = 1e-6;

/// Relative stopping increment for the dyadic recession schedule.
///
/// The difference quotient `(f(x,tz) − f(x,0))/t` is monotone in `t`, so a
/// successive-difference stop is sound; 1e-7 relative puts the extrapolated
/// limit well below 1e-10 absolute for the built-in integrands.
pub const TOL_RECESSION: f64 = 1e-7;

/// Slack added to the growth constant when declaring a conjugate infinite:
/// `f*(x,z*) = +∞` whenever `|z*| > M + TOL_CONJ_DOMAIN`.
pub const TOL_CONJ_DOMAIN: f64 = 1e-9;

/// A conjugate search value above this cap is reported as `+∞`.
pub const CONJ_SUP_CAP: f64 = 1e12;

/// Slope margin for the support-function unboundedness certificate
/// `z*·d > f^∞(x,d)` in the conjugate.
pub const TOL_CONJ_SLOPE: f64 = 1e-9;

/// Mass-preservation bound for discrete mollification (the kernel is
/// renormalised on its discrete support, so only rounding remains).
pub const TOL_MASS: f64 = 1e-10;

/// Weak* panel error bound for the sequence-diagnostic verdicts.
pub const TOL_WEAK: f64 = 1e-3;

/// Area-functional mass error bound for the strict / area-strict verdicts.
pub const TOL_AREA: f64 = 1e-3;

/// Residual bound for membership of a source term in the operator image.
pub const TOL_IMAGE: f64 = 1e-10;

/// Relative singular-value cutoff for rank decisions in the dense SVD.
pub const SVD_CUTOFF: f64 = 1e-10;

/// Scale factor of the distributional kernel-membership threshold:
/// a measure is accepted in `ker_M A` when the worst panel pairing is below
/// `TOL_KERNEL` times the panel scale.
pub const TOL_KERNEL: f64 = 1e-8;

/// Atoms lighter than this contribute nothing to relaxed integrals.
pub const ATOM_MASS_FLOOR: f64 = 1e-14;

/// Energy improvement an atom must offer before the singular-refinement
/// pass of the primal solver keeps it; floating-point noise sits far below.
pub const ATOM_REFINE_TOL: f64 = 1e-6;

/// Per-cell change bound between the last two schedule steps for a pairing
/// limit to be flagged converged.
pub const TOL_PAIRING: f64 = 1e-4;

/// Cellwise bound for the absolutely continuous density identity
/// `dλ/dL = (dμ/dL)·A*w*` away from atom halos.
pub const TOL_AC_IDENTITY: f64 = 1e-5;

/// Per-atom bound for the singular density comparison against `f^∞`.
pub const TOL_SINGULAR: f64 = 1e-3;

/// Duality-gap bound for an optimality verdict on exact certificate pairs.
pub const TOL_GAP: f64 = 1e-4;

/// Fenchel residual bound per cell for an optimality verdict.
pub const TOL_AC_RESIDUAL: f64 = 1e-4;

/// Weak-duality floor: `F̄[μ] − R[w*]` may dip below zero only by rounding.
pub const WEAK_DUALITY_FLOOR: f64 = -1e-9;
