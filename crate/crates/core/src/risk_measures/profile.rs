//! Target risk profiles `g` for the g-adjusted Expected Shortfall.

use crate::error::{Error, Result};

/// Formula of one profile piece.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFn {
    Infinite,
    /// `a + c / x`.
    InvAffine {
        a: f64,
        c: f64,
    },
    /// `a + c / (m x + k)`, infinite at the pole.
    Reciprocal {
        a: f64,
        c: f64,
        m: f64,
        k: f64,
    },
    /// Polynomial in `x`, lowest degree first.
    Poly(Vec<f64>),
}

impl ProfileFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ProfileFn::Infinite => f64::INFINITY,
            ProfileFn::InvAffine { a, c } => {
                if x == 0.0 {
                    if *c == 0.0 {
                        *a
                    } else {
                        f64::INFINITY
                    }
                } else {
                    a + c / x
                }
            }
            ProfileFn::Reciprocal { a, c, m, k } => {
                let den = m * x + k;
                if den == 0.0 {
                    f64::INFINITY
                } else {
                    a + c / den
                }
            }
            ProfileFn::Poly(coef) => coef.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    /// `lim_{x -> 0+} x g(x)`.
    fn growth_at_zero(&self) -> f64 {
        match self {
            ProfileFn::Infinite => f64::INFINITY,
            ProfileFn::InvAffine { c, .. } => *c,
            ProfileFn::Reciprocal { c, m, k, .. } if *k == 0.0 => c / m,
            _ => 0.0,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            ProfileFn::InvAffine { a, c } => *a == 0.0 && *c == 0.0,
            ProfileFn::Poly(coef) => coef.iter().all(|c| *c == 0.0),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePiece {
    pub lo: f64,
    pub hi: f64,
    pub f: ProfileFn,
}

/// A nonincreasing `g : (0,1] -> [0, inf]` with `g(1) = 0`, given piecewise on
/// contiguous intervals `[lo, hi]` covering `(0, 1]`. At a shared endpoint
/// the smaller of the two adjacent formulas applies, which is the lower
/// semicontinuous choice for a nonincreasing function.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetProfile {
    pieces: Vec<ProfilePiece>,
}

impl TargetProfile {
    pub fn new(pieces: Vec<ProfilePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("profile needs at least one piece"));
        }
        if pieces[0].lo != 0.0 || pieces.last().unwrap().hi != 1.0 {
            return Err(Error::invalid("profile pieces must cover (0, 1]"));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::invalid("profile pieces must be contiguous"));
            }
        }
        if pieces.iter().any(|p| !(p.lo < p.hi)) {
            return Err(Error::invalid("profile piece has an empty interval"));
        }
        let g = TargetProfile { pieces };
        if g.value(1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("profile must satisfy g(1) = 0, got {}", g.value(1.0))));
        }
        if !(g.beta() < 1.0) {
            return Err(Error::invalid("profile must be finite somewhere below 1"));
        }
        // Nonincreasing and nonnegative on a dense sample of every piece.
        let mut prev = f64::INFINITY;
        for p in &g.pieces {
            for j in 0..=64 {
                let x = p.lo + (p.hi - p.lo) * j as f64 / 64.0;
                if x == 0.0 {
                    continue;
                }
                let v = g.value(x);
                if v.is_nan() || v < -1e-12 {
                    return Err(Error::invalid(format!("profile is negative at {x}")));
                }
                if v > prev + 1e-9 * (1.0 + prev.abs()) {
                    return Err(Error::invalid(format!("profile increases near {x}")));
                }
                prev = v;
            }
        }
        Ok(g)
    }

    /// `g(x) = b (1/x - 1)`.
    pub fn lses(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("LSES sensitivity must be positive"));
        }
        TargetProfile::new(vec![ProfilePiece { lo: 0.0, hi: 1.0, f: ProfileFn::InvAffine { a: -b, c: b } }])
    }

    /// `g = inf` on `(0, alpha0)` and `0` on `[alpha0, 1]`.
    pub fn step(alpha0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0 < 1.0) {
            return Err(Error::invalid("step level must lie in (0, 1)"));
        }
        TargetProfile::new(vec![
            ProfilePiece { lo: 0.0, hi: alpha0, f: ProfileFn::Infinite },
            ProfilePiece { lo: alpha0, hi: 1.0, f: ProfileFn::Poly(vec![0.0]) },
        ])
    }

    /// Interpolates `(x_j, g_j)` linearly in `1/x`. The first value may be
    /// infinite only when `x_0 > 0`, in which case `g` is infinite below
    /// `x_0` and the first segment has a pole at `x_0`. Below a finite first
    /// point `g` is infinite.
    pub fn table(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("profile table needs at least two points"));
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) || points[0].0 <= 0.0 {
            return Err(Error::invalid("profile table abscissae must increase within (0, 1]"));
        }
        if points.last().unwrap().0 != 1.0 {
            return Err(Error::invalid("profile table must end at x = 1"));
        }
        let mut pieces = vec![ProfilePiece { lo: 0.0, hi: points[0].0, f: ProfileFn::Infinite }];
        for w in points.windows(2) {
            let ((x0, g0), (x1, g1)) = (w[0], w[1]);
            let f = if g0.is_infinite() {
                // A pole at x0 shaped like 1/(x - x0), anchored at (x1, g1).
                ProfileFn::Reciprocal { a: g1 - (x1 - x0), c: (x1 - x0) * (x1 - x0), m: 1.0, k: -x0 }
            } else {
                let (s0, s1) = (1.0 / x0, 1.0 / x1);
                let c = (g0 - g1) / (s0 - s1);
                ProfileFn::InvAffine { a: g1 - c * s1, c }
            };
            pieces.push(ProfilePiece { lo: x0, hi: x1, f });
        }
        TargetProfile::new(pieces)
    }

    pub fn pieces(&self) -> &[ProfilePiece] {
        &self.pieces
    }

    pub fn value(&self, x: f64) -> f64 {
        if !(x > 0.0 && x <= 1.0) {
            return f64::INFINITY;
        }
        self.pieces.iter().filter(|p| p.lo <= x && x <= p.hi).map(|p| p.f.eval(x)).fold(f64::INFINITY, f64::min)
    }

    /// `beta = inf dom g`.
    pub fn beta(&self) -> f64 {
        self.pieces.iter().find(|p| !matches!(p.f, ProfileFn::Infinite)).map(|p| p.lo).unwrap_or(1.0)
    }

    /// Limit of `g` as `x` decreases to `beta`, which is `sup g` on its
    /// effective domain.
    fn limit_at_beta(&self) -> f64 {
        let p = self.pieces.iter().find(|p| !matches!(p.f, ProfileFn::Infinite)).unwrap();
        p.f.eval(p.lo)
    }

    /// Whether `g` is bounded on its effective domain.
    pub fn bounded_on_dom(&self) -> bool {
        self.limit_at_beta().is_finite()
    }

    /// Whether `g(beta) < inf`; false when `beta = 0`.
    pub fn finite_at_beta(&self) -> bool {
        let b = self.beta();
        b > 0.0 && self.value(b).is_finite()
    }

    /// `lim_{x -> 0+} x g(x)`; positive exactly when `g(x) >= a + b/x` for
    /// some `a` and `b > 0`.
    pub fn growth_at_zero(&self) -> f64 {
        self.pieces[0].f.growth_at_zero()
    }

    /// Whether `g` only takes the values `0` and `inf`.
    pub fn is_zero_or_infinite(&self) -> bool {
        self.pieces.iter().all(|p| matches!(p.f, ProfileFn::Infinite) || p.f.is_zero())
    }

    /// `Some(b)` when `g(x) = b (1/x - 1)` on all of `(0, 1]`.
    pub fn as_lses(&self) -> Option<f64> {
        match self.pieces.as_slice() {
            [ProfilePiece { f: ProfileFn::InvAffine { a, c }, .. }] if *c > 0.0 && (a + c).abs() <= 1e-15 * c => {
                Some(*c)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_hull_gap_profile_classification() {
        let g = crate::fixtures::hull_gap_profile();
        assert_eq!(g.beta(), 0.5);
        assert!(!g.bounded_on_dom());
        assert!(!g.finite_at_beta());
        assert!((g.value(0.6) - 0.64).abs() < 1e-12);
        assert!((g.value(0.8) - 0.36).abs() < 1e-12);
        assert_eq!(g.growth_at_zero(), f64::INFINITY);
    }

    #[test]
    fn test_step_and_lses() {
        let s = TargetProfile::step(0.25).unwrap();
        assert_eq!(s.beta(), 0.25);
        assert_eq!(s.value(0.25), 0.0);
        assert_eq!(s.value(0.2), f64::INFINITY);
        assert!(s.bounded_on_dom() && s.finite_at_beta() && s.is_zero_or_infinite());

        let l = TargetProfile::lses(0.5).unwrap();
        assert_eq!(l.beta(), 0.0);
        assert!(!l.bounded_on_dom());
        assert_eq!(l.growth_at_zero(), 0.5);
        assert_eq!(l.as_lses(), Some(0.5));
        assert!((l.value(0.25) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn test_table_profiles() {
        let t = TargetProfile::table(&[(0.4, 2.0), (0.8, 0.5), (1.0, 0.0)]).unwrap();
        assert_eq!(t.beta(), 0.4);
        assert!(t.bounded_on_dom() && t.finite_at_beta());
        assert!((t.value(0.8) - 0.5).abs() < 1e-12);
        // Linear in 1/x between the first two points.
        let s = 0.5 * (1.0 / 0.4 + 1.0 / 0.8);
        assert!((t.value(1.0 / s) - 1.25).abs() < 1e-12);

        let u = TargetProfile::table(&[(0.5, f64::INFINITY), (1.0, 0.0)]).unwrap();
        assert!(!u.bounded_on_dom() && !u.finite_at_beta());
        assert!((u.value(1.0)).abs() < 1e-15);
    }

    #[test]
    fn test_invalid_profiles() {
        assert!(TargetProfile::table(&[(0.5, 0.0), (1.0, 1.0)]).is_err());
        assert!(TargetProfile::new(vec![ProfilePiece { lo: 0.0, hi: 1.0, f: ProfileFn::Infinite }]).is_err());
        assert!(TargetProfile::new(vec![ProfilePiece { lo: 0.0, hi: 1.0, f: ProfileFn::Poly(vec![1.0]) }]).is_err());
    }
}
