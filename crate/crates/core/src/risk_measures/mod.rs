//! Risk-measure families evaluated on finite probability spaces.

mod axioms;
mod grammar;
pub mod loss;
pub mod profile;

use std::fmt;

use crate::error::{Error, Result};
use crate::finite_market::{FiniteSpace, RandVar};

pub use axioms::{
    axiom_probe, numeric_sensitivity_probe, Axiom, AxiomCheck, AxiomReport, Expectation, SensitivityProbe,
};
pub use loss::{LossFunction, Pwl};
pub use profile::{ProfileFn, ProfilePiece, TargetProfile};

/// Arguments of one-dimensional searches are resolved to this width.
pub(crate) const ARG_TOL: f64 = 1e-10;
pub(crate) const MAX_ITER: usize = 200;

/// Family tag of a [`RiskSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Var,
    Es,
    Wc,
    Lses,
    AdjEs,
    Ew,
    Sr,
    Oce,
    ExpectedLoss,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Var => "VAR",
            Family::Es => "ES",
            Family::Wc => "WC",
            Family::Lses => "LSES",
            Family::AdjEs => "ADJ_ES",
            Family::Ew => "EW",
            Family::Sr => "SR",
            Family::Oce => "OCE",
            Family::ExpectedLoss => "EXPECTED_LOSS",
        };
        f.write_str(s)
    }
}

/// A risk measure together with its parameters.
///
/// Build through the checked constructors or [`str::parse`]; [`RiskSpec::validate`]
/// re-checks a hand-assembled value.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskSpec {
    Var { alpha: f64 },
    Es { alpha: f64 },
    Wc,
    Lses { b: f64 },
    AdjEs { g: TargetProfile },
    Ew { l: LossFunction },
    Sr { l: LossFunction },
    Oce { l: LossFunction },
    ExpectedLoss,
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("level {alpha} must lie in (0, 1]")))
    }
}

impl RiskSpec {
    pub fn var(alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        Ok(RiskSpec::Var { alpha })
    }

    pub fn es(alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        Ok(RiskSpec::Es { alpha })
    }

    pub fn lses(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("LSES sensitivity {b} must be positive")));
        }
        Ok(RiskSpec::Lses { b })
    }

    pub fn oce(l: LossFunction) -> Result<Self> {
        let s = RiskSpec::Oce { l };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RiskSpec::Var { alpha } | RiskSpec::Es { alpha } => check_level(*alpha),
            RiskSpec::Lses { b } => RiskSpec::lses(*b).map(|_| ()),
            RiskSpec::Oce { l } if !l.dominates_identity() => Err(Error::invalid("OCE needs a loss with l(x) >= x")),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            RiskSpec::Var { .. } => Family::Var,
            RiskSpec::Es { .. } => Family::Es,
            RiskSpec::Wc => Family::Wc,
            RiskSpec::Lses { .. } => Family::Lses,
            RiskSpec::AdjEs { .. } => Family::AdjEs,
            RiskSpec::Ew { .. } => Family::Ew,
            RiskSpec::Sr { .. } => Family::Sr,
            RiskSpec::Oce { .. } => Family::Oce,
            RiskSpec::ExpectedLoss => Family::ExpectedLoss,
        }
    }

    /// Whether the family is a convex risk measure with a dual representation.
    pub fn is_dual_capable(&self) -> bool {
        !matches!(self, RiskSpec::Var { .. } | RiskSpec::Ew { .. })
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, RiskSpec::Var { .. })
    }

    /// Evaluates the measure. Every family is finite on a finite space.
    pub fn eval(&self, x: &RandVar) -> f64 {
        match self {
            RiskSpec::Var { alpha } => var(x, *alpha),
            RiskSpec::Es { alpha } => es(x, *alpha),
            RiskSpec::Wc => worst_case(x),
            RiskSpec::Lses { b } => crate::lses::evaluate(x, *b).value,
            RiskSpec::AdjEs { g } => adjusted_es(x, g).value,
            RiskSpec::Ew { l } => expected_weighted_loss(x, l),
            RiskSpec::Sr { l } => shortfall_risk(x, l),
            RiskSpec::Oce { l } => oce(x, l),
            RiskSpec::ExpectedLoss => -x.mean(),
        }
    }

    /// A maximizing density `z` of the dual representation at `x`, in atom
    /// order, so that `rho(Y) >= rho(x) + E[z (x - Y)]` for convex families.
    /// Returned for EW as well, where `z` need not integrate to one.
    pub(crate) fn supergradient(&self, x: &RandVar) -> Option<Vec<f64>> {
        let n = x.values().len();
        let losses: Vec<f64> = x.values().iter().map(|v| -v).collect();
        let p = x.probs();
        match self {
            RiskSpec::Var { .. } => None,
            RiskSpec::Es { alpha } => Some(es_density(x, *alpha)),
            RiskSpec::Wc => Some(es_density(x, f64::MIN_POSITIVE)),
            RiskSpec::Lses { b } => Some(es_density(x, crate::lses::evaluate(x, *b).alpha_star)),
            RiskSpec::AdjEs { g } => Some(es_density(x, adjusted_es(x, g).alpha)),
            RiskSpec::ExpectedLoss => Some(vec![1.0; n]),
            RiskSpec::Ew { l } => Some(losses.iter().map(|&y| l.derivative(y)).collect()),
            RiskSpec::Sr { l } => {
                if l.vanishes_on_negatives() {
                    return Some(es_density(x, f64::MIN_POSITIVE));
                }
                let m = shortfall_risk(x, l);
                Some(normalized_subgradient(l, p, losses.iter().map(|y| y - m)))
            }
            RiskSpec::Oce { l } => {
                let eta = oce_argmin(&losses, p, l);
                Some(normalized_subgradient(l, p, losses.iter().map(|y| y + eta)))
            }
        }
    }
}

/// Picks `z_i` in `[l'_-(y_i), l'_+(y_i)]` with `sum p z = 1`, or rescales
/// when the one-sided sums miss `1` (only through rounding).
fn normalized_subgradient(l: &LossFunction, p: &[f64], ys: impl Iterator<Item = f64>) -> Vec<f64> {
    let ys: Vec<f64> = ys.collect();
    let lo: Vec<f64> = ys.iter().map(|&y| l.left_derivative(y)).collect();
    let hi: Vec<f64> = ys.iter().map(|&y| l.derivative(y)).collect();
    let s_lo: f64 = p.iter().zip(&lo).map(|(p, z)| p * z).sum();
    let s_hi: f64 = p.iter().zip(&hi).map(|(p, z)| p * z).sum();
    if s_lo <= 1.0 && 1.0 <= s_hi && s_hi > s_lo {
        let theta = (1.0 - s_lo) / (s_hi - s_lo);
        lo.iter().zip(&hi).map(|(a, b)| a + theta * (b - a)).collect()
    } else {
        let s = if s_hi > 0.0 { s_hi } else { 1.0 };
        hi.iter().map(|z| z / s).collect()
    }
}

impl fmt::Display for RiskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        grammar::fmt_spec(self, f)
    }
}

impl std::str::FromStr for RiskSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        grammar::parse_spec(s)
    }
}

/// Validates `spec` and evaluates it on `x`.
pub fn evaluate(spec: &RiskSpec, x: &RandVar) -> Result<f64> {
    spec.validate()?;
    Ok(spec.eval(x))
}

/// Losses `L = -X` sorted decreasingly, with equal losses merged.
///
/// Piece `k` of the quantile function covers `[lower(k), cum[k])`, where
/// `VaR^u = losses[k]`.
#[derive(Debug, Clone)]
pub(crate) struct TailCurve {
    pub losses: Vec<f64>,
    pub probs: Vec<f64>,
    pub cum: Vec<f64>,
    /// `partial[k] = sum_{j <= k} probs[j] losses[j]`.
    pub partial: Vec<f64>,
}

impl TailCurve {
    pub fn new(x: &RandVar) -> Self {
        let mut pairs: Vec<(f64, f64)> = x.values().iter().map(|v| -v).zip(x.probs().iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut losses = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (l, p) in pairs {
            if losses.last() == Some(&l) {
                *probs.last_mut().unwrap() += p;
            } else {
                losses.push(l);
                probs.push(p);
            }
        }
        let mut cum = Vec::with_capacity(probs.len());
        let mut partial = Vec::with_capacity(probs.len());
        let (mut c, mut s) = (0.0, 0.0);
        for (l, p) in losses.iter().zip(&probs) {
            c += p;
            s += p * l;
            cum.push(c);
            partial.push(s);
        }
        TailCurve { losses, probs, cum, partial }
    }

    pub fn len(&self) -> usize {
        self.losses.len()
    }

    /// `c_{k-1}`, the left end of piece `k`.
    pub fn lower(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    /// Right end of piece `k`; the last piece ends at exactly `1`.
    pub fn upper(&self, k: usize) -> f64 {
        if k + 1 == self.len() {
            1.0
        } else {
            self.cum[k]
        }
    }

    /// Right-continuous quantile `VaR^u`.
    pub fn var(&self, u: f64) -> f64 {
        let k = self.cum.partition_point(|&c| c <= u + 1e-12);
        self.losses[k.min(self.len() - 1)]
    }

    /// `(A, B)` with `ES^alpha = A + B / alpha` on piece `k`.
    pub fn es_coeffs(&self, k: usize) -> (f64, f64) {
        let l = self.losses[k];
        if k == 0 {
            (l, 0.0)
        } else {
            (l, self.partial[k - 1] - self.cum[k - 1] * l)
        }
    }

    pub fn piece_of(&self, alpha: f64) -> usize {
        self.cum.partition_point(|&c| c <= alpha).min(self.len() - 1)
    }

    pub fn es(&self, alpha: f64) -> f64 {
        let (a, b) = self.es_coeffs(self.piece_of(alpha));
        a + b / alpha
    }

    pub fn worst(&self) -> f64 {
        self.losses[0]
    }

    pub fn mean(&self) -> f64 {
        *self.partial.last().unwrap()
    }

    /// Maximizes `ES^alpha - g(alpha)`; returns `(value, alpha)`.
    pub fn adjusted_es(&self, g: &TargetProfile) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, 1.0);
        let mut consider = |v: f64, a: f64| {
            if v > best.0 {
                best = (v, a);
            }
        };
        for piece in g.pieces() {
            if matches!(piece.f, ProfileFn::Infinite) {
                continue;
            }
            let monotone = match &piece.f {
                ProfileFn::InvAffine { .. } => true,
                ProfileFn::Poly(c) => c.len() <= 1,
                _ => false,
            };
            for k in self.piece_of(piece.lo)..self.len() {
                let (clo, chi) = (self.lower(k), self.upper(k));
                let (u, v) = (clo.max(piece.lo), chi.min(piece.hi));
                if u < v {
                    let (a, b) = self.es_coeffs(k);
                    let f = |al: f64| a + b / al - piece.f.eval(al);
                    consider(f(v), v);
                    if u > 0.0 {
                        consider(f(u), u);
                        if !monotone {
                            let (m, fm) = golden_max(&f, u, v);
                            consider(fm, m);
                        }
                    }
                }
                if chi >= piece.hi {
                    break;
                }
            }
        }
        best
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub(crate) fn golden_max(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..MAX_ITER {
        if b - a <= ARG_TOL {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `VaR^alpha(X) = inf { m : P[m + X < 0] <= alpha }`.
///
/// # Panics
/// If `alpha` is outside `(0, 1]`.
pub fn var(x: &RandVar, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0, "level must lie in (0, 1]");
    TailCurve::new(x).var(alpha)
}

/// `ES^alpha(X) = (1/alpha) int_0^alpha VaR^u(X) du`, integrated exactly.
///
/// # Panics
/// If `alpha` is outside `(0, 1]`.
pub fn es(x: &RandVar, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0, "level must lie in (0, 1]");
    TailCurve::new(x).es(alpha)
}

/// Density attaining `ES^alpha(X) = E[-Z X]`: weight `1/alpha` on the worst
/// outcomes, a fraction on the quantile atom, zero elsewhere.
pub(crate) fn es_density(x: &RandVar, alpha: f64) -> Vec<f64> {
    let p = x.probs();
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&i, &j| x.values()[i].total_cmp(&x.values()[j]));
    let mut z = vec![0.0; p.len()];
    let mut left = alpha.min(1.0);
    for i in idx {
        let take = p[i].min(left);
        z[i] = take / p[i] / alpha.min(1.0);
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    z
}

/// `WC(X) = max(-X)`.
pub fn worst_case(x: &RandVar) -> f64 {
    -x.min()
}

/// `EW^l(X) = E[l(-X)]`.
pub fn expected_weighted_loss(x: &RandVar, l: &LossFunction) -> f64 {
    x.values().iter().zip(x.probs()).map(|(v, p)| p * l.eval(-v)).sum()
}

/// `SR^l(X) = inf { m : E[l(-X - m)] <= 0 }` by bisection; `WC(X)` when `l`
/// vanishes on the negative half-line.
pub fn shortfall_risk(x: &RandVar, l: &LossFunction) -> f64 {
    if l.vanishes_on_negatives() {
        return worst_case(x);
    }
    let p = x.probs();
    let excess = |m: f64| -> f64 { x.values().iter().zip(p).map(|(v, p)| p * l.eval(-v - m)).sum() };
    // Above max(-X) every argument is nonpositive, below min(-X) - 1 every
    // argument is at least 1 and l(y) >= y > 0.
    let (mut lo, mut hi) = (-x.max() - 1.0, -x.min());
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Minimizer of `eta -> E[l(eta + L)] - eta` over the losses `L`.
pub(crate) fn oce_argmin(losses: &[f64], p: &[f64], l: &LossFunction) -> f64 {
    let slope = |eta: f64| -> f64 { losses.iter().zip(p).map(|(y, p)| p * l.derivative(eta + y)).sum::<f64>() - 1.0 };
    let lmax = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lmin = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (-lmax - 1.0, -lmin + 1.0);
    if slope(lo) >= 0.0 {
        // l has slope 1 left of -1, so the objective is flat below `lo`.
        return lo;
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `OCE^l(X) = inf_eta { E[l(eta - X)] - eta }`.
pub fn oce(x: &RandVar, l: &LossFunction) -> f64 {
    let losses: Vec<f64> = x.values().iter().map(|v| -v).collect();
    let p = x.probs();
    let obj = |eta: f64| -> f64 { losses.iter().zip(p).map(|(y, p)| p * l.eval(eta + y)).sum::<f64>() - eta };
    let eta = oce_argmin(&losses, p, l);
    // The bracket end is within rounding of the minimizer; take the better
    // of the two neighbours.
    obj(eta).min(obj(eta - ARG_TOL * 1e-2))
}

/// Value and maximizing level of the g-adjusted Expected Shortfall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedEs {
    pub value: f64,
    pub alpha: f64,
}

/// `ES^g(X) = sup_{alpha in (0,1]} { ES^alpha(X) - g(alpha) }`.
///
/// On each piece of the quantile function `ES^alpha = A + B/alpha`; pieces of
/// `g` that are affine in `1/alpha` are handled at the endpoints, the rest by
/// golden-section search.
pub fn adjusted_es(x: &RandVar, g: &TargetProfile) -> AdjustedEs {
    let (value, alpha) = TailCurve::new(x).adjusted_es(g);
    AdjustedEs { value, alpha }
}

/// Weak and strong sensitivity to large losses and the two suitability
/// properties, decided analytically per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sensitivity {
    pub weak: bool,
    pub strong: bool,
    pub suitable_rm: bool,
    pub suitable_ps: bool,
}

impl Sensitivity {
    fn all(v: bool) -> Self {
        Sensitivity { weak: v, strong: v, suitable_rm: v, suitable_ps: v }
    }
}

/// Classifies `spec` by the analytic criteria for each family.
pub fn classify_sensitivity(spec: &RiskSpec) -> Sensitivity {
    let no = Sensitivity::all(false);
    match spec {
        RiskSpec::Var { .. } | RiskSpec::ExpectedLoss => no,
        RiskSpec::Es { alpha } => Sensitivity { weak: *alpha < 1.0, ..no },
        // Not real-valued on unbounded payoffs.
        RiskSpec::Wc => Sensitivity { suitable_ps: false, ..Sensitivity::all(true) },
        RiskSpec::Lses { .. } => Sensitivity::all(true),
        RiskSpec::AdjEs { g } => {
            if g.beta() > 0.0 {
                Sensitivity { weak: true, ..no }
            } else {
                Sensitivity { weak: true, strong: true, suitable_rm: true, suitable_ps: g.growth_at_zero() > 0.0 }
            }
        }
        RiskSpec::Ew { l } => {
            let s = l.right_slope().is_infinite() || l.left_slope() == 0.0;
            Sensitivity { weak: l.right_slope() > l.left_slope(), strong: s, suitable_rm: s, suitable_ps: s }
        }
        RiskSpec::Sr { l } => {
            if l.vanishes_on_negatives() {
                return classify_sensitivity(&RiskSpec::Wc);
            }
            let s = l.right_slope().is_infinite() || l.left_slope() == 0.0;
            Sensitivity { weak: l.right_slope() > l.left_slope(), strong: s, suitable_rm: s, suitable_ps: s }
        }
        RiskSpec::Oce { l } => {
            let (a, b) = (l.left_slope(), l.right_slope());
            let s = b.is_infinite() && a == 0.0;
            Sensitivity { weak: a < 1.0 && 1.0 < b, strong: s, suitable_rm: s, suitable_ps: s }
        }
    }
}

/// A random variable on `space` with the given values; for internal callers
/// that already checked the length.
pub(crate) fn rv(space: &std::sync::Arc<FiniteSpace>, values: Vec<f64>) -> RandVar {
    RandVar::new(space, values).expect("length matches the space")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(p: f64) -> RandVar {
        let s = FiniteSpace::new(vec![p, 1.0 - p]).unwrap();
        rv(&s, vec![-1.0, 1.0])
    }

    #[test]
    fn test_var_examples() {
        let x = two_point(0.5);
        assert_eq!(var(&x, 0.5), -1.0);
        assert_eq!(var(&x, 0.25), 1.0);
        let c = RandVar::constant(x.space(), 2.5);
        for a in [0.01, 0.5, 1.0] {
            assert_eq!(var(&c, a), -2.5);
        }
    }

    #[test]
    fn test_es_examples() {
        let x = two_point(0.5);
        assert_eq!(es(&x, 0.5), 1.0);
        assert_eq!(es(&x, 1.0), 0.0);
        assert!((es(&x, 0.75) - (0.5 - 0.25) / 0.75).abs() < 1e-15);
        let c = RandVar::constant(x.space(), -3.0);
        assert_eq!(es(&c, 0.3), 3.0);
    }

    #[test]
    fn test_worst_case_and_ew() {
        let x = two_point(0.5);
        assert_eq!(worst_case(&x), 1.0);
        let s = FiniteSpace::uniform(3).unwrap();
        assert_eq!(worst_case(&rv(&s, vec![-3.0, 2.0, -1.0])), 3.0);
        let ew = expected_weighted_loss(&x, &LossFunction::Exp);
        assert!((ew - (1f64.cosh() - 1.0)).abs() < 1e-15);
        let id = LossFunction::Piecewise(Pwl::identity());
        assert_eq!(expected_weighted_loss(&x, &id), 0.0);
    }

    #[test]
    fn test_shortfall_examples() {
        let x = two_point(0.5);
        let sr = shortfall_risk(&x, &LossFunction::Exp);
        assert!((sr - 1f64.cosh().ln()).abs() < 1e-12, "{sr}");
        assert_eq!(shortfall_risk(&x, &LossFunction::power(1.0, 2.0).unwrap()), 1.0);
        let id = LossFunction::Piecewise(Pwl::identity());
        assert!(shortfall_risk(&x, &id).abs() < 1e-12);
    }

    #[test]
    fn test_oce_examples() {
        let x = two_point(0.5);
        assert!((oce(&x, &LossFunction::Exp) - 1f64.cosh().ln()).abs() < 1e-12);
        let cvar = LossFunction::Piecewise(Pwl::cvar(0.5).unwrap());
        assert!((oce(&x, &cvar) - 1.0).abs() < 1e-12);
        let id = LossFunction::Piecewise(Pwl::identity());
        assert!(oce(&x, &id).abs() < 1e-12);
    }

    #[test]
    fn test_adjusted_es_special_profiles() {
        let s = FiniteSpace::new(vec![0.2, 0.3, 0.1, 0.4]).unwrap();
        let x = rv(&s, vec![-2.0, 0.5, 3.0, -0.7]);
        let zero = TargetProfile::new(vec![ProfilePiece { lo: 0.0, hi: 1.0, f: ProfileFn::Poly(vec![0.0]) }]).unwrap();
        assert_eq!(adjusted_es(&x, &zero).value, worst_case(&x));
        let step = TargetProfile::step(0.35).unwrap();
        assert!((adjusted_es(&x, &step).value - es(&x, 0.35)).abs() < 1e-15);
    }

    #[test]
    fn test_es_density_attains_es() {
        let s = FiniteSpace::new(vec![0.2, 0.3, 0.1, 0.4]).unwrap();
        let x = rv(&s, vec![-2.0, 0.5, 3.0, -0.7]);
        for a in [0.05, 0.2, 0.45, 0.9, 1.0] {
            let z = es_density(&x, a);
            let v: f64 = z.iter().zip(x.values()).zip(s.probs()).map(|((z, x), p)| -p * z * x).sum();
            assert!((v - es(&x, a)).abs() < 1e-14);
        }
    }

    #[test]
    fn test_classification_examples() {
        let e = classify_sensitivity(&RiskSpec::es(0.05).unwrap());
        assert!(e.weak && !e.strong);
        let l = classify_sensitivity(&RiskSpec::lses(1.0).unwrap());
        assert!(l.strong && l.suitable_ps);
        let pwl = LossFunction::Piecewise(Pwl::from_slopes(0.5, &[(0.0, 2.0)]).unwrap());
        assert!(!classify_sensitivity(&RiskSpec::Oce { l: pwl }).strong);
    }
}
