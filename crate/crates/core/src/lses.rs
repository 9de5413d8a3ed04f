//! Loss Sensitive Expected Shortfall
//! `LSES^b(X) = sup_{alpha in (0,1]} { ES^alpha(X) - b (1/alpha - 1) }`.
//!
//! On a finite space `I_X(alpha) = int_0^alpha (VaR^u - VaR^alpha) du` is a
//! nondecreasing step function, constant on each piece of the quantile
//! function. `ES^alpha - b/alpha` increases on pieces with `I_X < b` and
//! decreases on pieces with `I_X > b`, so the maximizer sits at a breakpoint.

use crate::error::{Error, Result};
use crate::finite_market::RandVar;
use crate::normal;
use crate::risk_measures::TailCurve;

#[derive(Debug, Clone, PartialEq)]
pub struct LsesBreakdown {
    pub value: f64,
    /// Canonical maximizer `alpha*_+ = sup { alpha : I_X(alpha) <= b }`.
    pub alpha_star: f64,
    /// All maximizers `[alpha*_-, alpha*_+]`.
    pub alpha_star_interval: (f64, f64),
    pub es_at_star: f64,
    /// Quantile on the piece ending at `alpha*`.
    pub var_at_star: f64,
    /// `(right end c_k of piece k, I_X on piece k)`.
    pub i_values: Vec<(f64, f64)>,
    /// `(c_k, ES^{c_k} - b (1/c_k - 1))` for audit.
    pub g_values: Vec<(f64, f64)>,
}

/// Evaluates `LSES^b(X)` by sweeping the breakpoints of `I_X`.
///
/// # Panics
/// If `b` is not positive.
pub fn evaluate(x: &RandVar, b: f64) -> LsesBreakdown {
    assert!(b > 0.0, "LSES sensitivity must be positive");
    let tc = TailCurve::new(x);
    let k_len = tc.len();
    let i: Vec<f64> = (0..k_len).map(|k| tc.es_coeffs(k).1).collect();
    let eq_tol = 1e-12 * b.max(1.0);
    // Last piece with I <= b; piece 0 always qualifies since I = 0 there.
    let k_star = i.partition_point(|&v| v <= b + eq_tol) - 1;
    let alpha_hi = tc.upper(k_star);
    let j = i.iter().position(|&v| v >= b - eq_tol);
    let alpha_lo = match j {
        Some(j) if j <= k_star => tc.lower(j).max(f64::MIN_POSITIVE),
        _ => alpha_hi,
    };
    let (a, bb) = tc.es_coeffs(k_star);
    let es_at_star = a + bb / alpha_hi;
    let value = es_at_star - b * (1.0 / alpha_hi - 1.0);
    let i_values = (0..k_len).map(|k| (tc.upper(k), i[k])).collect();
    let g_values = (0..k_len)
        .map(|k| {
            let c = tc.upper(k);
            let (a, bb) = tc.es_coeffs(k);
            (c, a + bb / c - b * (1.0 / c - 1.0))
        })
        .collect();
    LsesBreakdown {
        value,
        alpha_star: alpha_hi,
        alpha_star_interval: (alpha_lo, alpha_hi),
        es_at_star,
        var_at_star: tc.losses[k_star],
        i_values,
        g_values,
    }
}

/// `|LSES - (alpha* ES^{alpha*} + (1 - alpha*) VaR^{alpha*})|`, which
/// vanishes for continuous laws and shrinks along fine discretizations.
pub fn continuous_identity_check(x: &RandVar, b: f64) -> f64 {
    let r = evaluate(x, b);
    let a = r.alpha_star;
    (r.value - (a * r.es_at_star + (1.0 - a) * r.var_at_star)).abs()
}

/// `alpha*` for a normal law with standard deviation `sigma`, solving
/// `phi(Phi^{-1}(alpha)) - alpha Phi^{-1}(1 - alpha) = b / sigma`.
///
/// With `z = Phi^{-1}(1 - alpha)` the left side is `E[(N - z)^+]`, which
/// decreases from `+inf` to `0`; the root is found by bisection in `z`.
/// Returns `1` when the root lies beyond double precision.
pub fn normal_alpha_star(b_over_sigma: f64) -> Result<f64> {
    if !(b_over_sigma > 0.0 && b_over_sigma.is_finite()) {
        return Err(Error::invalid("b / sigma must be positive"));
    }
    let h = |z: f64| normal::pdf(z) - z * normal::cdf(-z);
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    if h(lo) <= b_over_sigma {
        return Ok(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > b_over_sigma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(normal::cdf(-0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_market::FiniteSpace;

    fn two_point() -> RandVar {
        let s = FiniteSpace::new(vec![0.5, 0.5]).unwrap();
        RandVar::new(&s, vec![-1.0, 1.0]).unwrap()
    }

    #[test]
    fn test_large_b_gives_expected_loss() {
        let r = evaluate(&two_point(), 10.0);
        assert_eq!(r.alpha_star, 1.0);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.i_values.last().unwrap().1, 1.0);
    }

    #[test]
    fn test_small_b_stops_at_first_breakpoint() {
        let r = evaluate(&two_point(), 0.25);
        assert_eq!(r.alpha_star, 0.5);
        assert_eq!(r.alpha_star_interval, (0.5, 0.5));
        assert!((r.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn test_constant_and_flat_piece() {
        let s = FiniteSpace::uniform(3).unwrap();
        let c = RandVar::constant(&s, 1.5);
        let r = evaluate(&c, 0.7);
        assert_eq!((r.value, r.alpha_star), (-1.5, 1.0));
        assert_eq!(continuous_identity_check(&c, 0.7), 0.0);
        // I = 1 on the second piece exactly: every alpha in [0.5, 1] is optimal.
        let r = evaluate(&two_point(), 1.0);
        assert_eq!(r.alpha_star_interval, (0.5, 1.0));
        assert!((r.value - 0.0).abs() < 1e-15);
    }

    #[test]
    fn test_normal_alpha_star_anchor() {
        let a = normal_alpha_star(normal::pdf(0.0)).unwrap();
        assert!((a - 0.5).abs() < 1e-12);
        assert!(normal_alpha_star(0.1).unwrap() < normal_alpha_star(0.3).unwrap());
        assert!(normal_alpha_star(1e-6).unwrap() < 1e-3);
        assert!(normal_alpha_star(0.0).is_err());
    }
}
