//! Acceptance criteria, one line each. Exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhofront::fixtures::{
    exponential_loss, hull_gap_profile, hull_gap_profile_hat, irregular_boundary, normal_sample, pinned_binomial,
    pinned_profile,
};
use rhofront::frontier::rho_inf_nu;
use rhofront::risk_measures::{adjusted_es, axiom_probe, Axiom};
use rhofront::{
    detect_arbitrage, dual_evaluate, efficient_frontier, lses, optimal_boundary, rho_nu, Error, Ext, FiniteSpace,
    LossFunction, Market, Regime, RiskSpec, TargetProfile,
};

use common::{equivalence_specs, pwl, random_market, random_space, random_var, table_profile};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn hull_gap() -> Outcome {
    let t = Instant::now();
    let y = exponential_loss(200_000, 0.7).map_err(|e| e.to_string())?;
    let g = adjusted_es(&y, &hull_gap_profile()).value;
    let h = adjusted_es(&y, &hull_gap_profile_hat()).value;
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("ES^g = {g:.4}, ES^g_hat = {h:.4}, {secs:.2}s");
    if (g - 1.52).abs() <= 0.02 && (h - 1.53).abs() <= 0.02 && g < h && secs < 5.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn normal_calibration() -> Outcome {
    let t = Instant::now();
    let x = normal_sample(100_000).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for b in [0.05, 0.1, 0.2, 0.39894] {
        let empirical = lses::evaluate(&x, b).alpha_star;
        let analytic = lses::normal_alpha_star(b).map_err(|e| e.to_string())?;
        worst = worst.max((empirical - analytic).abs());
    }
    let anchor = lses::normal_alpha_star(0.39894).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("max |alpha* gap| = {worst:.2e}, alpha*(0.39894) = {anchor:.6}, {secs:.2}s");
    if worst <= 0.01 && (anchor - 0.5).abs() <= 1e-3 && secs < 10.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn primal_dual() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let specs = [
        RiskSpec::es(0.05).unwrap(),
        RiskSpec::es(0.5).unwrap(),
        RiskSpec::es(0.9).unwrap(),
        RiskSpec::lses(0.05).unwrap(),
        RiskSpec::lses(0.5).unwrap(),
        RiskSpec::lses(5.0).unwrap(),
        RiskSpec::AdjEs { g: table_profile() },
        RiskSpec::AdjEs { g: TargetProfile::step(0.25).unwrap() },
        RiskSpec::AdjEs { g: hull_gap_profile() },
        RiskSpec::oce(LossFunction::Exp).unwrap(),
        RiskSpec::oce(pwl(0.0, &[(0.0, 1.0 / 0.3)])).unwrap(),
        RiskSpec::oce(pwl(0.5, &[(0.0, 1.0), (1.0, 3.0)])).unwrap(),
        RiskSpec::Sr { l: LossFunction::Exp },
        RiskSpec::Sr { l: pwl(0.5, &[(0.0, 2.0)]) },
        RiskSpec::Sr { l: pwl(0.2, &[(-1.0, 0.7), (0.0, 4.0)]) },
    ];
    let mut worst = (0.0f64, String::new());
    for k in 0..500 {
        let spec = &specs[k % specs.len()];
        let n = rng.gen_range(1..=30);
        let space = random_space(&mut rng, n);
        let x = random_var(&mut rng, &space);
        let primal = spec.eval(&x);
        let dual = dual_evaluate(spec, &x).map_err(|e| format!("{spec}: {e}"))?;
        let gap = (primal - dual).abs();
        if gap > worst.0 {
            worst = (gap, format!("{spec} on {:?}", x.values()));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    if worst.0 <= 1e-7 && secs < 30.0 {
        Ok(format!("max gap {:.2e} over 500 pairs, {secs:.2}s", worst.0))
    } else {
        Err(format!("max gap {:.2e} ({}), {secs:.2}s", worst.0, worst.1))
    }
}

fn equivalence() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let specs = equivalence_specs();
    let (mut arb, mut strong, mut runs) = (0, 0, 0);
    for _ in 0..200 {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(d + 1..=6);
        let m = random_market(&mut rng, d, n);
        for spec in &specs {
            let rep = match detect_arbitrage(spec, &m) {
                Ok(r) => r,
                Err(Error::Disagreement(s)) => return Err(format!("disagreement: {s}")),
                Err(e) => return Err(format!("{spec}: {e}")),
            };
            let fr = optimal_boundary(spec, &m, 1.0, 2).map_err(|e| format!("{spec}: {e}"))?;
            let empty = efficient_frontier(&fr) == rhofront::EfficientFrontier::Empty;
            if empty != rep.rho_arbitrage || rep.interior_witness.is_some() == rep.rho_arbitrage {
                return Err(format!("{spec}: frontier empty {empty}, rho-arbitrage {}", rep.rho_arbitrage));
            }
            if rep.descent_ray.is_some() != rep.strong_rho_inf_arbitrage {
                return Err(format!("{spec}: ray and strong rho^inf verdicts differ"));
            }
            arb += rep.rho_arbitrage as usize;
            strong += rep.strong_rho_arbitrage as usize;
            runs += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("{runs} runs, {arb} with rho-arbitrage, {strong} strong, 0 disagreements, {secs:.1}s");
    if secs < 120.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn pinned_norm() -> Outcome {
    let spec = RiskSpec::AdjEs { g: pinned_profile() };
    let rep = detect_arbitrage(&spec, &pinned_binomial()).map_err(|e| e.to_string())?;
    let msg = format!(
        "strong rho-arbitrage {}, strong rho^inf-arbitrage {}",
        rep.strong_rho_arbitrage, rep.strong_rho_inf_arbitrage
    );
    if rep.strong_rho_arbitrage && !rep.strong_rho_inf_arbitrage && rep.closure_witness.is_none() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn axioms() -> Outcome {
    let specs = vec![
        RiskSpec::var(0.1).unwrap(),
        RiskSpec::es(0.1).unwrap(),
        RiskSpec::Wc,
        RiskSpec::ExpectedLoss,
        RiskSpec::lses(0.5).unwrap(),
        RiskSpec::AdjEs { g: table_profile() },
        RiskSpec::AdjEs { g: hull_gap_profile() },
        RiskSpec::AdjEs { g: TargetProfile::step(0.25).unwrap() },
        RiskSpec::Ew { l: LossFunction::Exp },
        RiskSpec::Ew { l: pwl(0.5, &[(0.0, 2.0)]) },
        RiskSpec::Ew { l: LossFunction::power(1.0, 2.0).unwrap() },
        RiskSpec::Sr { l: LossFunction::Exp },
        RiskSpec::Sr { l: pwl(0.5, &[(0.0, 2.0)]) },
        RiskSpec::Sr { l: LossFunction::power(1.0, 2.0).unwrap() },
        RiskSpec::oce(LossFunction::Exp).unwrap(),
        RiskSpec::oce(pwl(0.5, &[(0.0, 1.0), (1.0, 3.0)])).unwrap(),
    ];
    let space = FiniteSpace::uniform(7).unwrap();
    for (k, spec) in specs.iter().enumerate() {
        let rep = axiom_probe(spec, &space, 1000, 100 + k as u64).map_err(|e| e.to_string())?;
        if let Some(c) = rep.checks.iter().find(|c| !c.consistent()) {
            return Err(format!("{spec}: {} expected {:?}, witness {:?}", c.axiom, c.expected, c.witness));
        }
        let needs_ph =
            matches!(spec, RiskSpec::Lses { .. }) || matches!(spec, RiskSpec::AdjEs { g } if !g.is_zero_or_infinite());
        if needs_ph && rep.get(Axiom::PositiveHomogeneity).witness.is_none() {
            return Err(format!("{spec}: no positive-homogeneity witness"));
        }
        if matches!(spec, RiskSpec::Ew { .. }) && rep.get(Axiom::CashInvariance).witness.is_none() {
            return Err(format!("{spec}: no cash-invariance witness"));
        }
    }
    Ok(format!("{} specs x 1000 probes consistent; witnesses for LSES, ADJ_ES, EW", specs.len()))
}

fn tol(v: f64) -> f64 {
    1e-7 * v.abs().max(1.0)
}

fn boundary_shapes() -> Outcome {
    let s4 = FiniteSpace::new(vec![0.2, 0.3, 0.3, 0.2]).unwrap();
    let markets = [
        pinned_binomial(),
        Market::from_excess(&s4, 0.0, vec![vec![0.5, -0.3, 0.1, 0.2], vec![-0.2, 0.4, 0.3, -0.4]]).unwrap(),
        Market::from_excess(&s4, 0.0, vec![vec![0.9, 0.3, 0.2, -0.1], vec![-0.2, 0.4, 0.3, -0.4]]).unwrap(),
    ];
    let specs = [
        RiskSpec::es(0.5).unwrap(),
        RiskSpec::es(0.9).unwrap(),
        RiskSpec::lses(0.5).unwrap(),
        RiskSpec::AdjEs { g: table_profile() },
        RiskSpec::oce(LossFunction::Exp).unwrap(),
        RiskSpec::Sr { l: pwl(0.5, &[(0.0, 2.0)]) },
        RiskSpec::Ew { l: pwl(0.5, &[(0.0, 2.0)]) },
    ];
    let mut sweeps = 0;
    for m in &markets {
        for spec in &specs {
            let fr = optimal_boundary(spec, m, 4.0, 9).map_err(|e| format!("{spec}: {e}"))?;
            if let Some(e) = fr.errors.iter().flatten().next() {
                return Err(format!("{spec}: {e}"));
            }
            let v: Vec<f64> = fr.rho_values.iter().map(|r| r.to_f64()).collect();
            // Grid is 0, 0.5, ..., 4: index 2k holds 2 nu_k.
            for k in 1..=4 {
                if v[k].is_finite() && v[2 * k] < 2.0 * v[k] - tol(v[k]) {
                    return Err(format!("{spec}: rho_2nu < 2 rho_nu at nu = {}", fr.nu_grid[k]));
                }
            }
            for (r, ri) in v.iter().zip(&fr.rho_inf_values) {
                if ri.to_f64() < r - tol(*r) {
                    return Err(format!("{spec}: rho^inf_nu below rho_nu"));
                }
            }
            match fr.regime {
                Regime::Negative => {
                    if v.windows(2).any(|w| w[1].is_finite() && w[1] >= w[0] - 1e-12) {
                        return Err(format!("{spec}: NEGATIVE regime but boundary not decreasing: {v:?}"));
                    }
                }
                Regime::Positive | Regime::Infinite => {
                    let k = fr.nu_grid.iter().position(|nu| *nu >= fr.nu_min).unwrap_or(v.len());
                    let inc = v[k.min(v.len() - 1)..].windows(2).all(|w| w[1] >= w[0] - tol(w[0]));
                    let dec = v[..k].windows(2).all(|w| w[1] <= w[0] + tol(w[0]));
                    if !inc || !dec {
                        return Err(format!("{spec}: boundary not unimodal about nu_min = {}: {v:?}", fr.nu_min));
                    }
                }
                Regime::Zero => {
                    if v.windows(2).any(|w| w[1] > w[0] + tol(w[0])) {
                        return Err(format!("{spec}: ZERO regime but boundary increases"));
                    }
                }
            }
            // rho_t / t increases to rho^inf_1.
            if let Ext::Finite(limit) = fr.rho_inf_1 {
                let ts: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
                let mut ratios = Vec::new();
                for &t in &ts {
                    let r = rho_nu(spec, m, t).map_err(|e| e.to_string())?.value.to_f64();
                    ratios.push(r / t);
                }
                if ratios.iter().all(|r| r.is_finite()) {
                    let mono = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-7);
                    let below = ratios.iter().all(|r| *r <= limit + 1e-7);
                    let gap = |k: usize| limit - ratios[k];
                    let fast = gap(10) <= gap(5) / 8.0 + 1e-7;
                    if !(mono && below && fast) {
                        return Err(format!("{spec}: rho_t/t = {ratios:?} vs rho^inf_1 = {limit}"));
                    }
                }
                let r1 = rho_inf_nu(spec, m, 1.0).map_err(|e| e.to_string())?.value;
                if r1 != fr.rho_inf_1 {
                    return Err(format!("{spec}: rho^inf_1 inconsistent"));
                }
            }
            sweeps += 1;
        }
    }
    let spots = [(10.0, -10.0), (15.0, -7.5), (20.0, -6.0), (40.0, -10.0), (47.0, -1.6), (53.0, 10.0), (60.0, 20.0)];
    for (nu, f) in spots {
        if (irregular_boundary(nu) - f).abs() > 1e-12 {
            return Err(format!("irregular boundary f({nu}) = {}", irregular_boundary(nu)));
        }
    }
    Ok(format!("{sweeps} sweeps; 7 irregular-boundary spot values exact"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 7] = [
        ("hull-gap profile values", hull_gap),
        ("normal calibration of alpha*", normal_calibration),
        ("primal-dual equality", primal_dual),
        ("arbitrage equivalence suites", equivalence),
        ("strict dual bound fixture", pinned_norm),
        ("axiom profiles", axioms),
        ("boundary shapes", boundary_shapes),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("PASS {}. {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {name}: {msg}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
