use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use rhofront::fixtures::{hull_gap_profile, hull_gap_profile_hat};
use rhofront::risk_measures::es;
use rhofront::{g_hat_transform, lses, normal, FiniteSpace, LossFunction, RandVar, RiskSpec};

fn four_atoms() -> RandVar {
    RandVar::new(&FiniteSpace::uniform(4).unwrap(), vec![-3.0, -1.0, 0.0, 2.0]).unwrap()
}

#[test]
fn test_normal_cdf_pdf_quantile_match_statrs() {
    let n = Normal::new(0.0, 1.0).unwrap();
    for k in -800..=800 {
        let x = k as f64 / 100.0;
        assert!((normal::cdf(x) - n.cdf(x)).abs() < 5e-11, "cdf({x})");
        assert!((normal::pdf(x) - n.pdf(x)).abs() < 1e-14, "pdf({x})");
    }
    for k in 1..1000 {
        let u = k as f64 / 1000.0;
        assert!((normal::quantile(u) - n.inverse_cdf(u)).abs() < 1e-9, "quantile({u})");
    }
}

#[test]
fn test_normal_alpha_star_solves_first_order_condition() {
    let n = Normal::new(0.0, 1.0).unwrap();
    for b in [0.01, 0.05, 0.1, 0.2, 0.39894, 0.5, 1.0] {
        let a = lses::normal_alpha_star(b).unwrap();
        let z = n.inverse_cdf(1.0 - a);
        let lhs = n.pdf(z) - z * (1.0 - n.cdf(z));
        assert!((lhs - b).abs() < 1e-7, "b = {b}: alpha* = {a}, lhs = {lhs}");
    }
    // phi(0) = 0.398942..., so alpha* = 1/2 there.
    assert!((lses::normal_alpha_star(1.0 / (2.0 * std::f64::consts::PI).sqrt()).unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn test_lses_hand_computed() {
    // Losses 3, 1, 0, -2 with mass 1/4: ES at 1/4, 1/2, 3/4, 1 is 3, 2, 4/3, 1/2.
    let x = four_atoms();
    let r = lses::evaluate(&x, 0.5);
    assert!((r.value - 1.5).abs() < 1e-12 && (r.alpha_star - 0.5).abs() < 1e-12, "{r:?}");
    let r = lses::evaluate(&x, 1.0);
    assert!((r.value - 1.0).abs() < 1e-12 && (r.alpha_star - 0.75).abs() < 1e-12, "{r:?}");
    let i: Vec<f64> = r.i_values.iter().map(|p| p.1).collect();
    assert_eq!(i.len(), 4);
    for (got, want) in i.iter().zip([0.0, 0.5, 1.0, 2.5]) {
        assert!((got - want).abs() < 1e-12, "{i:?}");
    }
}

#[test]
fn test_es_hand_computed() {
    let x = four_atoms();
    assert!((es(&x, 0.3) - 8.0 / 3.0).abs() < 1e-12);
    assert!((es(&x, 1.0) - 0.5).abs() < 1e-12);
}

#[test]
fn test_exponential_oce_and_shortfall_are_entropic() {
    let x = four_atoms();
    let entropic = (x.values().iter().map(|v| (-v).exp()).sum::<f64>() / 4.0).ln();
    let oce = RiskSpec::oce(LossFunction::Exp).unwrap().eval(&x);
    let sr = RiskSpec::Sr { l: LossFunction::Exp }.eval(&x);
    assert!((oce - entropic).abs() < 1e-9, "{oce} vs {entropic}");
    assert!((sr - entropic).abs() < 1e-9, "{sr} vs {entropic}");
}

#[test]
fn test_g_hat_matches_closed_form() {
    let g = hull_gap_profile();
    let want = hull_gap_profile_hat();
    let got = g_hat_transform(&g, 20_000).unwrap();
    assert_eq!(got.beta(), 0.5);
    for k in 1..=400 {
        let x = 0.5 + 0.5 * k as f64 / 400.0;
        let (a, b) = (got.value(x), want.value(x));
        assert!((a - b).abs() < 1e-3, "x = {x}: {a} vs {b}");
        assert!(a <= g.value(x) + 1e-12);
    }
    assert!(got.value(0.5).is_infinite());
}
