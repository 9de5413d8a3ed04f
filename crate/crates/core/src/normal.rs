//! Standard normal density, distribution and quantile functions.
//!
//! The distribution function is Hart's double-precision rational
//! approximation (as popularized by West), with a continued fraction in the
//! far tail; absolute error is below `5e-11`. The quantile inverts it by
//! bisection.

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

// Coefficients, highest degree first.
const P: [f64; 7] = [
    3.526_249_659_989_11e-2,
    0.700_383_064_443_688,
    6.373_962_203_531_65,
    33.912_866_078_383,
    112.079_291_497_871,
    221.213_596_169_931,
    220.206_867_912_376,
];
const Q: [f64; 8] = [
    8.838_834_764_831_84e-2,
    1.755_667_163_182_64,
    16.064_177_579_207,
    86.780_732_202_946_1,
    296.564_248_779_674,
    637.333_633_378_831,
    793.826_512_519_948,
    440.413_735_824_752,
];

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, c| acc * x + c)
}

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// `P[N(0,1) <= x]`.
pub fn cdf(x: f64) -> f64 {
    let ax = x.abs();
    let tail = if ax > 37.0 {
        0.0
    } else if ax < 7.071_067_811_865_47 {
        let num = horner(&P, ax) * (-0.5 * ax * ax).exp();
        let den = horner(&Q, ax);
        num / den
    } else {
        let e = (-0.5 * ax * ax).exp();
        let mut b = ax + 0.65;
        b = ax + 4.0 / b;
        b = ax + 3.0 / b;
        b = ax + 2.0 / b;
        b = ax + 1.0 / b;
        e / b / SQRT_2PI
    };
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// `Phi^{-1}(u)` for `u` in `(0, 1)` by bisection, resolved to `1e-10`
/// or better. The lower tail is searched directly so that quantiles near
/// `1` keep their accuracy.
///
/// # Panics
/// If `u` is outside `(0, 1)`.
pub fn quantile(u: f64) -> f64 {
    assert!(u > 0.0 && u < 1.0, "quantile level must lie in (0, 1)");
    if u > 0.5 {
        return -quantile(1.0 - u);
    }
    let (mut lo, mut hi) = (-40.0f64, 0.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_known_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-14);
        assert!((cdf(-1.0) - 0.158_655_253_931_457_05).abs() < 1e-14);
        for (x, p) in [
            (-3.0, 1.349_898_031_630_094_5e-3),
            (-6.0, 9.865_876_450_376_98e-10),
            (-8.0, 6.220_960_574_271_784e-16),
            (-10.0, 7.619_853_024_160_526e-24),
            (-20.0, 2.753_624_118_606_233_7e-89),
        ] {
            assert!((cdf(x) - p).abs() < 1e-16, "x={x}: {}", cdf(x));
        }
        assert!((pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
    }

    #[test]
    fn test_quantile_inverts_cdf() {
        for u in [1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
            let q = quantile(u);
            let back = if u > 0.5 { 1.0 - cdf(-q) } else { cdf(q) };
            assert!((back - u).abs() <= 1e-12 * u.min(1.0 - u).max(1e-300) + 1e-16, "u={u}");
        }
        assert!((quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-10);
    }
}
