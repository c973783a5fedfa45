//! Discrete convex duality for linear-growth variational problems.
//!
//! The crate discretises PDE-constrained minimisation problems
//!
//! ```text
//!     minimise  ∫_Ω f(x, u(x)) dx   subject to  A u = τ,
//! ```
//!
//! with a convex integrand `f` of linear growth and a linear constraint
//! operator `A` on grid functions, together with everything needed to verify
//! the saddle-point structure of such problems numerically:
//!
//! * [`integrand`] — convex integrands, Fenchel conjugates, recession
//!   functions, mollification, the unit-ball transform and growth checks;
//! * [`measure`] — discrete vector measures (cell densities plus atoms),
//!   total variation, the generalized area functional, weak* pairings,
//!   measure mollification and area-strict sequence diagnostics;
//! * [`operator`] — difference operators with exact transpose adjoints,
//!   kernel bases, image projections and distributional kernel tests;
//! * [`primal_dual`] — primal/relaxed/dual energies, the Lagrangian,
//!   subgradient solvers for both problems, duality-gap verification,
//!   approximate certificates and brute-force oracles;
//! * [`pairing`] — the generalized measure/function pairing, its mass and
//!   density properties, and the saddle-point optimality checker;
//! * [`cli`] — the command-line driver behind the `measure-duality` binary.
//!
//! Start with the runnable examples (`cargo run --example <name>`); each one
//! walks through a single capability end to end.

pub mod cli;
pub mod error;
pub mod extended;
pub mod grid;
pub mod integrand;
pub mod io;
pub mod measure;
pub mod operator;
pub mod pairing;
pub mod primal_dual;
pub mod tolerances;

mod numerics;

pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use grid::Grid;
pub use integrand::{ConvexIntegrand, GrowthSampleSpec};
pub use measure::DiscreteMeasure;
pub use numerics::SplitMix64;
pub use operator::{BoundaryRule, ConstraintOperator, OperatorName, SourceTerm};
pub use primal_dual::{DualCertificate, Problem, SolveOptions, SolveReport};
