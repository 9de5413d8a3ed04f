//! Extended real numbers with tagged infinities.

use std::cmp::Ordering;
use std::fmt;

/// A value in `[-inf, +inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Ext {
    pub const ZERO: Ext = Ext::Finite(0.0);

    /// Maps `f64` infinities onto the tags.
    pub fn from_f64(x: f64) -> Ext {
        if x == f64::INFINITY {
            Ext::PosInf
        } else if x == f64::NEG_INFINITY {
            Ext::NegInf
        } else {
            Ext::Finite(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::Finite(x) => x,
            Ext::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ext::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    /// Multiplication by a nonnegative scalar, with `0 * inf = 0`.
    pub fn scale(self, lambda: f64) -> Ext {
        debug_assert!(lambda >= 0.0);
        if lambda == 0.0 {
            return Ext::ZERO;
        }
        match self {
            Ext::Finite(x) => Ext::Finite(lambda * x),
            other => other,
        }
    }

    /// Sign with tolerance: `-1`, `0` or `1`.
    pub fn sign(self, tol: f64) -> i8 {
        match self {
            Ext::NegInf => -1,
            Ext::PosInf => 1,
            Ext::Finite(x) if x > tol => 1,
            Ext::Finite(x) if x < -tol => -1,
            Ext::Finite(_) => 0,
        }
    }
}

impl From<f64> for Ext {
    fn from(x: f64) -> Self {
        Ext::from_f64(x)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::PosInf => write!(f, "inf"),
            Ext::Finite(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_scale_and_order() {
        assert_eq!(Ext::PosInf.scale(0.0), Ext::ZERO);
        assert_eq!(Ext::Finite(2.0).scale(3.0), Ext::Finite(6.0));
        assert!(Ext::NegInf < Ext::Finite(-1e300));
        assert!(Ext::Finite(1e300) < Ext::PosInf);
        assert_eq!(Ext::from_f64(f64::INFINITY), Ext::PosInf);
        assert_eq!(Ext::Finite(1e-12).sign(1e-9), 0);
    }
}
