mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhofront::finite_market::check_classical_arbitrage;
use rhofront::fixtures::hull_gap_profile;
use rhofront::frontier::rho_inf_nu;
use rhofront::risk_measures::{es, worst_case};
use rhofront::{
    emit_market, lses, martingale_feasibility, numeric_recession_probe, parse_market, price_bounds, recession_value,
    rho_nu, Ext, LossFunction, PriceKind, RandVar, RiskSpec, TargetProfile,
};

use common::{equivalence_specs, pwl, random_market, random_space, random_var, table_profile};

fn star_shaped_specs() -> Vec<RiskSpec> {
    vec![
        RiskSpec::var(0.2).unwrap(),
        RiskSpec::es(0.3).unwrap(),
        RiskSpec::Wc,
        RiskSpec::ExpectedLoss,
        RiskSpec::lses(0.4).unwrap(),
        RiskSpec::AdjEs { g: table_profile() },
        RiskSpec::AdjEs { g: hull_gap_profile() },
        RiskSpec::oce(LossFunction::Exp).unwrap(),
        RiskSpec::oce(pwl(0.5, &[(0.0, 1.0), (1.0, 3.0)])).unwrap(),
        RiskSpec::Sr { l: LossFunction::Exp },
        RiskSpec::Sr { l: pwl(0.5, &[(0.0, 2.0)]) },
        RiskSpec::Ew { l: pwl(0.5, &[(0.0, 2.0)]) },
    ]
}

fn rng_var(seed: u64) -> (ChaCha8Rng, RandVar) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=12);
    let space = random_space(&mut rng, n);
    let x = random_var(&mut rng, &space);
    (rng, x)
}

fn leq(a: f64, b: Ext) -> bool {
    match b {
        Ext::Finite(b) => a <= b + 1e-9 * b.abs().max(1.0),
        Ext::PosInf => true,
        Ext::NegInf => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recession_majorizes_and_is_homogeneous(seed in any::<u64>(), lambda in 0.1f64..10.0) {
        let (_, x) = rng_var(seed);
        for spec in star_shaped_specs() {
            let r = recession_value(&spec, &x).unwrap();
            prop_assert!(leq(spec.eval(&x), r), "{spec}: rho {} above rho^inf {r:?}", spec.eval(&x));
            let scaled = recession_value(&spec, &x.scale(lambda)).unwrap();
            match (r, scaled) {
                (Ext::Finite(a), Ext::Finite(b)) => prop_assert!((lambda * a - b).abs() <= 1e-8 * b.abs().max(1.0), "{spec}"),
                (a, b) => prop_assert_eq!(a, b, "{}", spec),
            }
        }
    }

    #[test]
    fn recession_probe_is_nondecreasing_and_bounded(seed in any::<u64>()) {
        let (_, x) = rng_var(seed);
        let ladder: Vec<f64> = (0..12).map(|k| 2f64.powi(k)).collect();
        for spec in star_shaped_specs() {
            let probe = numeric_recession_probe(&spec, &x, &ladder).unwrap();
            let r = recession_value(&spec, &x).unwrap();
            for w in probe.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0), "{spec}: {probe:?}");
            }
            prop_assert!(leq(*probe.last().unwrap(), r), "{spec}: {probe:?} vs {r:?}");
        }
    }

    #[test]
    fn lses_is_nonincreasing_in_b_and_between_mean_and_worst(seed in any::<u64>(), b in 0.01f64..5.0, db in 0.0f64..2.0) {
        let (_, x) = rng_var(seed);
        let lo = lses::evaluate(&x, b + db).value;
        let hi = lses::evaluate(&x, b).value;
        prop_assert!(lo <= hi + 1e-12);
        prop_assert!(hi <= worst_case(&x) + 1e-12 && lo >= -x.mean() - 1e-12);
        let r = lses::evaluate(&x, b);
        prop_assert!(r.alpha_star_interval.0 <= r.alpha_star && r.alpha_star <= 1.0);
        prop_assert!((r.es_at_star - es(&x, r.alpha_star)).abs() <= 1e-9 * r.es_at_star.abs().max(1.0));
    }

    #[test]
    fn target_profile_step_matches_es(seed in any::<u64>(), alpha in 0.05f64..1.0) {
        let (_, x) = rng_var(seed);
        let g = TargetProfile::step(alpha).unwrap();
        let v = RiskSpec::AdjEs { g }.eval(&x);
        prop_assert!((v - es(&x, alpha)).abs() <= 1e-9 * v.abs().max(1.0));
    }

    #[test]
    fn ftap_matches_classical_arbitrage(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(d + 1..=7);
        let m = random_market(&mut rng, d, n);
        let density = martingale_feasibility(&m, None).unwrap();
        let arb = check_classical_arbitrage(&m).unwrap();
        prop_assert_eq!(density.is_none(), arb.is_some());
        if let Some(z) = density {
            for row in m.excess() {
                prop_assert!(z.expect(row).abs() < 1e-9);
            }
        }
        if let Some(w) = arb {
            prop_assert!(w.payoff.iter().all(|v| *v >= -1e-9) && w.payoff.iter().any(|v| *v > 1e-9));
        }
    }

    #[test]
    fn market_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(d + 1..=8);
        let m = random_market(&mut rng, d, n);
        let back = parse_market(&emit_market(&m)).unwrap();
        prop_assert_eq!(back.excess(), m.excess());
        prop_assert_eq!(back.space().probs(), m.space().probs());
        prop_assert_eq!(back.r(), m.r());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_below_recession_boundary(seed in any::<u64>(), nu in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(d + 1..=5);
        let m = random_market(&mut rng, d, n);
        for spec in equivalence_specs() {
            let r = rho_nu(&spec, &m, nu).unwrap();
            let ri = rho_inf_nu(&spec, &m, nu).unwrap();
            prop_assert!(r.value <= ri.value || leq(r.value.to_f64(), ri.value), "{spec}: {:?} > {:?}", r.value, ri.value);
            let r2 = rho_nu(&spec, &m, 2.0 * nu).unwrap().value;
            if let (Ext::Finite(a), Ext::Finite(b)) = (r.value, r2) {
                prop_assert!(b >= 2.0 * a - 1e-7 * a.abs().max(1.0), "{spec}: rho_2nu {b} < 2 rho_nu {a}");
            }
        }
    }

    #[test]
    fn price_intervals_nest_and_separate_arbitrage(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=6);
        let m = loop {
            let m = random_market(&mut rng, 1, n);
            if martingale_feasibility(&m, None).unwrap().is_some() {
                break m;
            }
        };
        let y = random_var(&mut rng, m.space()).map(|v| v.abs() + 0.1);
        let Ok(na) = price_bounds(&m, &y, &RiskSpec::ExpectedLoss, PriceKind::NoArb) else { return Ok(()) };
        for spec in [RiskSpec::es(0.3).unwrap(), RiskSpec::lses(0.5).unwrap()] {
            let (Ok(nr), Ok(ns)) = (
                price_bounds(&m, &y, &spec, PriceKind::NoRhoArb),
                price_bounds(&m, &y, &spec, PriceKind::NoStrongRhoArb),
            ) else {
                continue;
            };
            prop_assert!(na.lower <= nr.lower + 1e-8 && nr.upper <= na.upper + 1e-8, "{spec}: {na:?} {nr:?}");
            prop_assert!(ns.lower <= nr.lower + 1e-8 && nr.upper <= ns.upper + 1e-8, "{spec}: {ns:?} {nr:?}");
        }
        let mid = 0.5 * (na.lower + na.upper);
        let inside = m.augmented(mid, y.values()).unwrap();
        prop_assert!(check_classical_arbitrage(&inside).unwrap().is_none());
        let below = na.lower - 0.05 * (1.0 + na.lower.abs());
        if below > 0.0 {
            let outside = m.augmented(below, y.values()).unwrap();
            prop_assert!(check_classical_arbitrage(&outside).unwrap().is_some());
        }
    }
}
