//! Extended real values for conjugates and dual energies.

use std::fmt;

/// A value in `[-∞, +∞]`. Conjugation of a finite-valued convex integrand
/// never produces `-∞`; dual energies use it to mark certificates whose
/// conjugate integral diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Finite value or panic; for contexts that have already checked.
    pub fn unwrap_finite(self) -> f64 {
        self.finite().expect("expected a finite extended real")
    }

    /// Collapse to f64 with IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    /// Convex-analysis addition: `a + ∞ = ∞` for every `a > -∞`.
    /// `∞ + (-∞)` never occurs in this crate (debug-asserted).
    pub fn add(self, other: ExtendedReal) -> ExtendedReal {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => {
                debug_assert!(false, "∞ + (-∞) is undefined");
                Finite(f64::NAN)
            }
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtendedReal::NegInf
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => write!(f, "inf"),
        }
    }
}
