#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rhofront::fixtures::hull_gap_profile;
use rhofront::risk_measures::Pwl;
use rhofront::{FiniteSpace, LossFunction, Market, RandVar, RiskSpec, TargetProfile};

pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> Arc<FiniteSpace> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let s: f64 = w.iter().sum();
    FiniteSpace::new(w.iter().map(|x| x / s).collect()).unwrap()
}

pub fn random_var(rng: &mut ChaCha8Rng, space: &Arc<FiniteSpace>) -> RandVar {
    let scale = [0.5, 1.0, 3.0][rng.gen_range(0..3)];
    let ties = rng.gen_bool(0.2);
    let v = (0..space.len())
        .map(|_| {
            let x: f64 = scale * rng.gen_range(-1.0..1.0);
            if ties {
                (4.0 * x).round() / 4.0
            } else {
                x
            }
        })
        .collect();
    RandVar::new(space, v).unwrap()
}

/// A valid market with `d` assets on `n` atoms; about half of them admit
/// classical arbitrage or rho-arbitrage for tight measures.
pub fn random_market(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Market {
    loop {
        let space = random_space(rng, n);
        let drift: f64 = rng.gen_range(-0.1..0.3);
        let excess = (0..d).map(|_| (0..n).map(|_| drift + rng.gen_range(-1.0..1.0)).collect()).collect();
        if let Ok(m) = Market::from_excess(&space, 0.0, excess) {
            return m;
        }
    }
}

pub fn pwl(first: f64, pairs: &[(f64, f64)]) -> LossFunction {
    LossFunction::Piecewise(Pwl::from_slopes(first, pairs).unwrap())
}

/// Bounded profile with `beta = 0.3`.
pub fn table_profile() -> TargetProfile {
    TargetProfile::table(&[(0.3, 2.0), (0.6, 0.5), (1.0, 0.0)]).unwrap()
}

/// The dual-capable specs exercised by the equivalence suites.
pub fn equivalence_specs() -> Vec<RiskSpec> {
    vec![
        RiskSpec::es(0.1).unwrap(),
        RiskSpec::es(0.5).unwrap(),
        RiskSpec::lses(0.5).unwrap(),
        RiskSpec::AdjEs { g: TargetProfile::step(0.4).unwrap() },
        RiskSpec::AdjEs { g: table_profile() },
        RiskSpec::AdjEs { g: hull_gap_profile() },
        RiskSpec::oce(LossFunction::Exp).unwrap(),
        RiskSpec::Sr { l: pwl(0.5, &[(0.0, 2.0)]) },
    ]
}
