//! Reference instances: an irregular optimal boundary, a target profile
//! whose convex hull changes the measure, and a market whose martingale
//! density sits exactly on a strict dual bound.

use std::sync::Arc;

use crate::error::Result;
use crate::finite_market::{FiniteSpace, Market, RandVar};
use crate::risk_measures::{ProfileFn, ProfilePiece, TargetProfile};

/// A star-shaped optimal boundary `nu -> rho_nu` that is neither convex nor
/// monotone on `[0, 60]`.
pub fn irregular_boundary(nu: f64) -> f64 {
    if nu <= 10.0 {
        0.0 - nu
    } else if nu <= 15.0 {
        nu / 2.0 - 15.0
    } else if nu <= 20.0 {
        -6.0
    } else if nu <= 40.0 {
        -nu / 4.0
    } else if nu <= 47.0 {
        (nu - 39.0).powi(2) / 10.0 - 8.0
    } else if nu <= 50.0 {
        0.0
    } else if nu <= 53.0 {
        10.0 - (nu - 53.0).powi(2)
    } else {
        nu - 40.0
    }
}

/// `(nu, f(nu))` on a uniform grid of `[0, nu_max]`.
pub fn irregular_boundary_grid(nu_max: f64, steps: usize) -> Vec<(f64, f64)> {
    let steps = steps.max(2);
    (0..steps)
        .map(|i| {
            let nu = nu_max * i as f64 / (steps - 1) as f64;
            (nu, irregular_boundary(nu))
        })
        .collect()
}

/// `g = inf` on `(0, 0.5]`, `1/(2x - 1) - 109/25` on `(0.5, 0.6]`,
/// `1 - x^2` on `(0.6, 1]`: unbounded near `beta = 0.5` and not convex in
/// `1/x`.
pub fn hull_gap_profile() -> TargetProfile {
    TargetProfile::new(vec![
        ProfilePiece { lo: 0.0, hi: 0.5, f: ProfileFn::Infinite },
        ProfilePiece { lo: 0.5, hi: 0.6, f: ProfileFn::Reciprocal { a: -109.0 / 25.0, c: 1.0, m: 2.0, k: -1.0 } },
        ProfilePiece { lo: 0.6, hi: 1.0, f: ProfileFn::Poly(vec![1.0, 0.0, -1.0]) },
    ])
    .expect("valid profile")
}

/// Closed form of the convex hull of `hull_gap_profile` in `1/x`: the last
/// branch becomes `24/(25x) - 24/25`.
pub fn hull_gap_profile_hat() -> TargetProfile {
    TargetProfile::new(vec![
        ProfilePiece { lo: 0.0, hi: 0.5, f: ProfileFn::Infinite },
        ProfilePiece { lo: 0.5, hi: 0.6, f: ProfileFn::Reciprocal { a: -109.0 / 25.0, c: 1.0, m: 2.0, k: -1.0 } },
        ProfilePiece { lo: 0.6, hi: 1.0, f: ProfileFn::InvAffine { a: -24.0 / 25.0, c: 24.0 / 25.0 } },
    ])
    .expect("valid profile")
}

/// `Y = -E` for `E ~ Exp(rate)`, discretized at the quantiles
/// `(i - 0.5) / n` with equal weights.
pub fn exponential_loss(n: usize, rate: f64) -> Result<RandVar> {
    let space = FiniteSpace::uniform(n)?;
    let v = (1..=n).map(|i| {
        let u = (i as f64 - 0.5) / n as f64;
        (-u).ln_1p() / rate
    });
    RandVar::new(&space, v.collect())
}

/// A standard normal law discretized at `n` equiprobable quantile atoms.
pub fn normal_sample(n: usize) -> Result<RandVar> {
    let space: Arc<FiniteSpace> = FiniteSpace::uniform(n)?;
    let v = (1..=n).map(|i| crate::normal::quantile((i as f64 - 0.5) / n as f64)).collect();
    RandVar::new(&space, v)
}

/// Binomial market `p = (1/2, 1/2)`, `R - r = (1, -1/2)`, whose unique
/// martingale density `(2/3, 4/3)` has sup norm `4/3`.
pub fn pinned_binomial() -> Market {
    let s = FiniteSpace::new(vec![0.5, 0.5]).expect("valid space");
    Market::from_excess(&s, 0.0, vec![vec![1.0, -0.5]]).expect("valid market")
}

/// `g = inf` on `(0, 3/4]` and `1/(x - 3/4) - 4` on `(3/4, 1]`: unbounded
/// at `beta = 3/4 = 1 / (4/3)`.
pub fn pinned_profile() -> TargetProfile {
    TargetProfile::new(vec![
        ProfilePiece { lo: 0.0, hi: 0.75, f: ProfileFn::Infinite },
        ProfilePiece { lo: 0.75, hi: 1.0, f: ProfileFn::Reciprocal { a: -4.0, c: 1.0, m: 1.0, k: -0.75 } },
    ])
    .expect("valid profile")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_irregular_spot_values() {
        for (nu, f) in
            [(10.0, -10.0), (15.0, -7.5), (20.0, -6.0), (40.0, -10.0), (47.0, -1.6), (53.0, 10.0), (60.0, 20.0)]
        {
            assert!((irregular_boundary(nu) - f).abs() < 1e-12, "nu={nu}");
        }
    }

    #[test]
    fn test_profiles() {
        let g = hull_gap_profile();
        let h = hull_gap_profile_hat();
        assert!((g.value(0.6) - 0.64).abs() < 1e-12 && (h.value(0.6) - 0.64).abs() < 1e-12);
        assert!(h.value(0.8) <= g.value(0.8));
        assert_eq!(pinned_profile().value(1.0), 0.0);
        assert!(!pinned_profile().bounded_on_dom());
    }
}
