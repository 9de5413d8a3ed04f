//! Price intervals for a contract outside the market that keep the
//! augmented market free of classical, rho- or strong rho-arbitrage.
//!
//! Each endpoint is `min` or `max` of `E[Z Y] / (1 + r)` over martingale
//! densities `Z` in the set matching the arbitrage notion.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::finite_market::{Market, RandVar};
use crate::linalg::rank;
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};
use crate::recession_dual::{closure_dual_set, dual_set, DualDomain, SLACK_TOL};
use crate::risk_measures::RiskSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceKind {
    NoStrongRhoArb,
    NoRhoArb,
    NoArb,
}

impl fmt::Display for PriceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriceKind::NoStrongRhoArb => "NO_STRONG_RHO_ARB",
            PriceKind::NoRhoArb => "NO_RHO_ARB",
            PriceKind::NoArb => "NO_ARB",
        })
    }
}

impl FromStr for PriceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "no-strong-rho-arb" => Ok(PriceKind::NoStrongRhoArb),
            "no-rho-arb" => Ok(PriceKind::NoRhoArb),
            "no-arb" => Ok(PriceKind::NoArb),
            _ => Err(Error::invalid(format!("unknown price kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceInterval {
    pub lower: f64,
    pub upper: f64,
    pub kind: PriceKind,
    pub lower_open: bool,
    pub upper_open: bool,
    /// The density set the endpoints were optimized over.
    pub set: String,
}

impl PriceInterval {
    pub fn contains(&self, y: f64) -> bool {
        let above = if self.lower_open { y > self.lower } else { y >= self.lower };
        let below = if self.upper_open { y < self.upper } else { y <= self.upper };
        above && below
    }
}

/// Density constraints for one endpoint LP.
struct DensitySet {
    domain: Option<DualDomain>,
    /// Whether the set asks for `Z > 0`.
    positive: bool,
    /// Whether the set is the interior of `domain`.
    interior: bool,
    label: String,
}

fn density_set(spec: &RiskSpec, kind: PriceKind) -> Result<DensitySet> {
    Ok(match kind {
        PriceKind::NoArb => DensitySet { domain: None, positive: true, interior: false, label: "P".into() },
        PriceKind::NoRhoArb => {
            let d = dual_set(spec)?.domain;
            DensitySet { label: format!("interior of {d} with Z > 0"), domain: Some(d), positive: true, interior: true }
        }
        PriceKind::NoStrongRhoArb => {
            let d = closure_dual_set(spec)?;
            let interior = matches!(d, DualDomain::SupNorm { strict: true, .. });
            DensitySet { label: format!("{d} intersected with M"), domain: Some(d.closed()), positive: false, interior }
        }
    })
}

/// Either the largest slack `t` by which the set's strict inequalities
/// hold, or a price endpoint over the closed set.
enum Goal<'a> {
    Slack,
    Price(&'a [f64], Sense),
}

fn solve_set(m: &Market, set: &DensitySet, goal: Goal) -> Result<Option<f64>> {
    let p = m.space().probs();
    let disc = 1.0 + m.r();
    let mut lp = LinearProgram::new(match goal {
        Goal::Slack => Sense::Maximize,
        Goal::Price(_, sense) => sense,
    });
    let z: Vec<usize> = (0..m.atoms())
        .map(|i| match goal {
            Goal::Slack => lp.add_nonneg(0.0),
            Goal::Price(y, _) => lp.add_nonneg(p[i] * y[i] / disc),
        })
        .collect();
    let t = matches!(goal, Goal::Slack).then(|| lp.add_var(0.0, 1.0, 1.0));
    // `v >= lo + t` or `v <= hi - t` with `t` present only for strict rows.
    let bound = |lp: &mut LinearProgram, terms: &[(usize, f64)], rel: Relation, rhs: f64, strict: bool| {
        let mut row = terms.to_vec();
        if let (Some(t), true) = (t, strict) {
            row.push((t, if rel == Relation::Ge { -1.0 } else { 1.0 }));
        }
        lp.add_row(&row, rel, rhs);
    };
    for row in m.excess() {
        let c: Vec<(usize, f64)> = z.iter().zip(p).zip(row).map(|((&v, p), e)| (v, p * e)).collect();
        lp.add_row(&c, Relation::Eq, 0.0);
    }
    let mass: Vec<(usize, f64)> = z.iter().zip(p).map(|(&v, &p)| (v, p)).collect();
    lp.add_row(&mass, Relation::Eq, 1.0);
    if set.positive {
        for &v in &z {
            bound(&mut lp, &[(v, 1.0)], Relation::Ge, 0.0, true);
        }
    }
    let strict = set.interior;
    match set.domain {
        None => {}
        Some(DualDomain::Box { lo, hi }) => {
            let strict = strict && lo < hi;
            for &v in &z {
                if lo > 0.0 {
                    bound(&mut lp, &[(v, 1.0)], Relation::Ge, lo, strict);
                }
                if hi.is_finite() {
                    bound(&mut lp, &[(v, 1.0)], Relation::Le, hi, strict);
                }
            }
        }
        Some(DualDomain::SupNorm { bound: b, .. }) => {
            if b.is_finite() {
                for &v in &z {
                    bound(&mut lp, &[(v, 1.0)], Relation::Le, b, strict);
                }
            }
        }
        Some(DualDomain::ScaledBox { a, b }) => {
            // a <= k z <= b with s = 1/k: a s <= z <= b s.
            let s = lp.add_nonneg(0.0);
            for &v in &z {
                bound(&mut lp, &[(v, 1.0), (s, -a)], Relation::Ge, 0.0, strict);
                if b.is_finite() {
                    bound(&mut lp, &[(v, 1.0), (s, -b)], Relation::Le, 0.0, strict);
                }
            }
            bound(&mut lp, &[(s, 1.0)], Relation::Ge, 0.0, strict);
        }
    }
    Ok(match (lp.solve()?, goal) {
        (LpOutcome::Optimal(s), Goal::Slack) => (s.objective > SLACK_TOL).then_some(s.objective),
        (LpOutcome::Optimal(s), Goal::Price(..)) => Some(s.objective),
        (LpOutcome::Infeasible, _) => None,
        (LpOutcome::Unbounded, Goal::Price(_, Sense::Maximize)) => Some(f64::INFINITY),
        (LpOutcome::Unbounded, _) => Some(f64::NEG_INFINITY),
    })
}

fn interval(m: &Market, y: &[f64], spec: &RiskSpec, kind: PriceKind) -> Result<PriceInterval> {
    let set = density_set(spec, kind)?;
    // Once the open set meets M, its closure is the closed set intersected
    // with M, which carries the same endpoints.
    let open = set.positive || set.interior;
    if solve_set(m, &set, Goal::Slack)?.is_none() {
        return Err(Error::Infeasible(format!(
            "{} is empty: the market already admits the arbitrage {kind} excludes",
            set.label
        )));
    }
    let lower = solve_set(m, &set, Goal::Price(y, Sense::Minimize))?;
    let upper = solve_set(m, &set, Goal::Price(y, Sense::Maximize))?;
    match (lower, upper) {
        (Some(lower), Some(upper)) => {
            Ok(PriceInterval { lower, upper, kind, lower_open: open, upper_open: open, set: set.label })
        }
        _ => Err(Error::Solver(format!("{} became infeasible between solves", set.label))),
    }
}

/// Price interval of `payoff` under `kind`.
///
/// The payoff must not be replicable, that is outside
/// `span{1, S^1_1, ..., S^d_1}`.
pub fn price_bounds(m: &Market, payoff: &RandVar, spec: &RiskSpec, kind: PriceKind) -> Result<PriceInterval> {
    spec.validate()?;
    let y = payoff.values();
    if y.len() != m.atoms() {
        return Err(Error::Dimension { expected: m.atoms(), got: y.len() });
    }
    let mut rows = vec![vec![1.0; m.atoms()]];
    rows.extend(m.excess().iter().cloned());
    rows.push(y.to_vec());
    if rank(&rows, 1e-10) != m.dim() + 2 {
        return Err(Error::invalid("payoff is replicable by the riskless and risky assets"));
    }
    if kind != PriceKind::NoArb && !spec.is_dual_capable() {
        return Err(Error::Unsupported(format!("{} has no dual set", spec.family())));
    }
    interval(m, y, spec, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_market::FiniteSpace;

    #[test]
    fn test_complete_market_collapses() {
        let s = FiniteSpace::new(vec![0.5, 0.5]).unwrap();
        let m = Market::from_excess(&s, 0.0, vec![vec![1.0, -0.5]]).unwrap();
        let y = [1.0, 0.0];
        // Unique martingale density (2/3, 4/3).
        for kind in [PriceKind::NoArb, PriceKind::NoRhoArb, PriceKind::NoStrongRhoArb] {
            let iv = interval(&m, &y, &RiskSpec::es(0.5).unwrap(), kind).unwrap();
            assert!((iv.lower - 1.0 / 3.0).abs() < 1e-8 && (iv.upper - 1.0 / 3.0).abs() < 1e-8, "{iv:?}");
        }
        let x = RandVar::new(&s, y.to_vec()).unwrap();
        assert!(price_bounds(&m, &x, &RiskSpec::es(0.5).unwrap(), PriceKind::NoArb).is_err());
    }

    #[test]
    fn test_trinomial_nesting_with_binding_bound() {
        let s = FiniteSpace::uniform(3).unwrap();
        let m = Market::from_excess(&s, 0.0, vec![vec![0.2, 0.0, -0.1]]).unwrap();
        let y = RandVar::new(&s, vec![1.0, 0.0, 0.0]).unwrap();
        let es = RiskSpec::es(0.8).unwrap();
        let na = price_bounds(&m, &y, &es, PriceKind::NoArb).unwrap();
        let nr = price_bounds(&m, &y, &es, PriceKind::NoRhoArb).unwrap();
        assert!(na.lower < nr.lower - 1e-6 && nr.upper < na.upper - 1e-6, "{na:?} {nr:?}");
        assert_eq!("no-rho-arb".parse::<PriceKind>().unwrap(), PriceKind::NoRhoArb);
    }

    #[test]
    fn test_strict_bound_hit_by_unique_density_is_empty() {
        let m = crate::fixtures::pinned_binomial();
        let spec = RiskSpec::AdjEs { g: crate::fixtures::pinned_profile() };
        let r = interval(&m, &[1.0, 0.0], &spec, PriceKind::NoStrongRhoArb);
        assert!(matches!(r, Err(Error::Infeasible(_))), "{r:?}");
    }

    #[test]
    fn test_open_endpoints_are_limits() {
        let s = FiniteSpace::uniform(4).unwrap();
        let m = Market::from_excess(&s, 0.0, vec![vec![0.1, -0.2, 0.1, -0.05]]).unwrap();
        let y = RandVar::new(&s, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let iv = price_bounds(&m, &y, &RiskSpec::es(0.5).unwrap(), PriceKind::NoArb).unwrap();
        assert!(iv.lower_open && iv.lower.abs() < 1e-12 && (iv.upper - 2.0 / 3.0).abs() < 1e-12, "{iv:?}");
        assert!(!iv.contains(0.0) && iv.contains(0.1));
    }
}
