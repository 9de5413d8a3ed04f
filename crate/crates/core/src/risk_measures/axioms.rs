//! Randomized axiom checks and the sensitivity ladder.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{rv, RiskSpec};
use crate::error::{Error, Result};
use crate::finite_market::{FiniteSpace, RandVar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    Monotonicity,
    Normalisation,
    StarShapedness,
    CashInvariance,
    Convexity,
    PositiveHomogeneity,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Monotonicity,
        Axiom::Normalisation,
        Axiom::StarShapedness,
        Axiom::CashInvariance,
        Axiom::Convexity,
        Axiom::PositiveHomogeneity,
    ];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::Normalisation => "normalisation",
            Axiom::StarShapedness => "star-shapedness",
            Axiom::CashInvariance => "cash-invariance",
            Axiom::Convexity => "convexity",
            Axiom::PositiveHomogeneity => "positive-homogeneity",
        };
        f.write_str(s)
    }
}

/// What theory predicts for an axiom and a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    /// Fails in general, so a random probe should find a witness.
    Fails,
    /// May or may not hold depending on the instance.
    NotGuaranteed,
}

impl Expectation {
    /// Expected profile of `spec`.
    pub fn of(spec: &RiskSpec, axiom: Axiom) -> Expectation {
        use Expectation::*;
        let ph = |holds: bool| if holds { Holds } else { Fails };
        match (spec, axiom) {
            (RiskSpec::Var { .. }, Axiom::Convexity) => NotGuaranteed,
            (_, Axiom::PositiveHomogeneity) => match spec {
                RiskSpec::Lses { .. } => Fails,
                RiskSpec::AdjEs { g } => ph(g.is_zero_or_infinite()),
                RiskSpec::Ew { l } | RiskSpec::Oce { l } => ph(l.is_positively_homogeneous()),
                RiskSpec::Sr { l } => ph(l.is_positively_homogeneous() || l.vanishes_on_negatives()),
                _ => Holds,
            },
            (RiskSpec::Ew { l }, Axiom::CashInvariance) => ph(l.is_identity()),
            _ => Holds,
        }
    }
}

/// Outcome of probing one axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub expected: Expectation,
    /// Whether every probe satisfied the axiom.
    pub held: bool,
    pub checks: usize,
    /// A concrete violation, when one was found.
    pub witness: Option<String>,
}

impl AxiomCheck {
    /// Whether the observation is consistent with the expected profile.
    pub fn consistent(&self) -> bool {
        match self.expected {
            Expectation::Holds => self.held,
            Expectation::Fails => !self.held,
            Expectation::NotGuaranteed => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub spec: String,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).expect("every axiom is probed")
    }

    pub fn consistent(&self) -> bool {
        self.checks.iter().all(AxiomCheck::consistent)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn geq(a: f64, b: f64) -> bool {
    a >= b - 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn random_var(rng: &mut ChaCha8Rng, space: &Arc<FiniteSpace>) -> RandVar {
    let scale = [0.1, 1.0, 10.0][rng.gen_range(0..3)];
    let ties = rng.gen_bool(0.3);
    let v = (0..space.len())
        .map(|_| {
            let u: f64 = rng.gen_range(-1.0..1.0);
            let heavy = if rng.gen_bool(0.1) { 5.0 } else { 1.0 };
            let x = scale * u * heavy;
            if ties {
                x.round()
            } else {
                x
            }
        })
        .collect();
    rv(space, v)
}

fn show(x: &RandVar) -> String {
    let v: Vec<String> = x.values().iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", v.join(", "))
}

struct Tally {
    axiom: Axiom,
    checks: usize,
    witness: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }
}

/// Tests the axioms of `spec` on `trials` random outcomes over `space`.
///
/// Tolerances are `1e-9` relative. Each failed axiom carries the first
/// violating instance found.
pub fn axiom_probe(spec: &RiskSpec, space: &Arc<FiniteSpace>, trials: usize, seed: u64) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::invalid("axiom probe needs at least one trial"));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<Tally> = Axiom::ALL.iter().map(|&axiom| Tally { axiom, checks: 0, witness: None }).collect();
    let rho = |x: &RandVar| spec.eval(x);

    let zero = RandVar::constant(space, 0.0);
    let r0 = rho(&zero);
    t[1].record(close(r0, 0.0), || format!("rho(0) = {r0}"));

    for _ in 0..trials {
        let x = random_var(&mut rng, space);
        let rx = rho(&x);

        let bump: Vec<f64> =
            (0..space.len()).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) }).collect();
        let y = rv(space, x.values().iter().zip(&bump).map(|(a, b)| a + b).collect());
        let ry = rho(&y);
        t[0].record(geq(rx, ry), || format!("X = {}, Y = {} >= X: rho(X) = {rx} < rho(Y) = {ry}", show(&x), show(&y)));

        for lambda in [1.0, 1.5, 2.0, 10.0] {
            let rl = rho(&x.scale(lambda));
            t[2].record(geq(rl, lambda * rx), || {
                format!("X = {}, lambda = {lambda}: rho(lambda X) = {rl} < {}", show(&x), lambda * rx)
            });
        }

        let c: f64 = rng.gen_range(-2.0..2.0);
        let rc = rho(&x.shift(c));
        t[3].record(close(rc, rx - c), || format!("X = {}, c = {c}: rho(X + c) = {rc} != {}", show(&x), rx - c));

        let z = random_var(&mut rng, space);
        let rz = rho(&z);
        let mid = x.zip_with(&z, |a, b| 0.5 * (a + b));
        let rm = rho(&mid);
        t[4].record(geq(0.5 * (rx + rz), rm), || {
            format!("X = {}, Y = {}: rho((X+Y)/2) = {rm} > {}", show(&x), show(&z), 0.5 * (rx + rz))
        });

        for lambda in [0.5, 2.0] {
            let rl = rho(&x.scale(lambda));
            t[5].record(close(rl, lambda * rx), || {
                format!("X = {}, lambda = {lambda}: rho(lambda X) = {rl} != {}", show(&x), lambda * rx)
            });
        }
    }

    let checks = t
        .into_iter()
        .map(|t| AxiomCheck {
            axiom: t.axiom,
            expected: Expectation::of(spec, t.axiom),
            held: t.witness.is_none(),
            checks: t.checks,
            witness: t.witness,
        })
        .collect();
    Ok(AxiomReport { spec: spec.to_string(), checks })
}

/// Outcome of the geometric sensitivity ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityProbe {
    pub positive_risk_found: bool,
    /// First `lambda` on the ladder with `rho(lambda X) > 0`.
    pub lambda_star: Option<f64>,
}

impl SensitivityProbe {
    /// A negative outcome only means no unacceptable scaling was found up to
    /// the ladder's end.
    pub fn is_conclusive(&self) -> bool {
        self.positive_risk_found
    }
}

/// Evaluates `rho(lambda X)` for `lambda = 1, 2, 4, ...` up to `lambda_max`.
pub fn numeric_sensitivity_probe(spec: &RiskSpec, x: &RandVar, lambda_max: f64) -> Result<SensitivityProbe> {
    if x.values().iter().all(|v| *v >= 0.0) {
        return Err(Error::invalid("sensitivity probe needs an outcome with a loss on some atom"));
    }
    spec.validate()?;
    let mut lambda = 1.0;
    while lambda <= lambda_max {
        if spec.eval(&x.scale(lambda)) > 0.0 {
            return Ok(SensitivityProbe { positive_risk_found: true, lambda_star: Some(lambda) });
        }
        lambda *= 2.0;
    }
    Ok(SensitivityProbe { positive_risk_found: false, lambda_star: None })
}
