//! Recession functions, dual sets and penalties, martingale densities, and
//! the LP kernels behind the dual characterizations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::finite_market::{FiniteSpace, Market, RandVar};
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};
use crate::risk_measures::{golden_max, LossFunction, ProfileFn, ProfilePiece, RiskSpec, TailCurve, TargetProfile};

/// Strict inequalities are decided by maximizing a slack and comparing it
/// with this threshold.
pub const SLACK_TOL: f64 = 1e-9;

/// A probability density `Z >= 0` with `E[Z] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    space: Arc<FiniteSpace>,
    z: Vec<f64>,
}

impl Density {
    pub fn new(space: &Arc<FiniteSpace>, z: Vec<f64>) -> Result<Self> {
        if z.len() != space.len() {
            return Err(Error::Dimension { expected: space.len(), got: z.len() });
        }
        if z.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("density must be finite and nonnegative"));
        }
        let mass = space.expectation(&z);
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("density integrates to {mass}, not 1")));
        }
        Ok(Density { space: Arc::clone(space), z })
    }

    /// Clamps LP round-off and renormalizes.
    fn from_lp(space: &Arc<FiniteSpace>, z: Vec<f64>) -> Self {
        let z: Vec<f64> = z.into_iter().map(|v| v.max(0.0)).collect();
        let mass = space.expectation(&z);
        Density { space: Arc::clone(space), z: z.into_iter().map(|v| v / mass).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn sup_norm(&self) -> f64 {
        self.z.iter().copied().fold(0.0, f64::max)
    }

    /// `E[Z Y]`.
    pub fn expect(&self, y: &[f64]) -> f64 {
        self.space.probs().iter().zip(&self.z).zip(y).map(|((p, z), y)| p * z * y).sum()
    }

    /// CSV rows `atom,p,z` with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("atom,p,z\n");
        for (i, (p, z)) in self.space.probs().iter().zip(&self.z).enumerate() {
            s.push_str(&format!("{i},{p:.17e},{z:.17e}\n"));
        }
        s
    }
}

/// Effective domain of a penalty function.
#[derive(Debug, Clone, PartialEq)]
pub enum DualDomain {
    /// `lo <= z_i <= hi`.
    Box { lo: f64, hi: f64 },
    /// `a <= k z_i <= b` for some `k > 0`.
    ScaledBox { a: f64, b: f64 },
    /// `|Z|_inf <= bound`, or `< bound` when strict.
    SupNorm { bound: f64, strict: bool },
}

impl DualDomain {
    /// The same set with a strict bound relaxed to its closure.
    pub fn closed(&self) -> DualDomain {
        match self {
            DualDomain::SupNorm { bound, .. } => DualDomain::SupNorm { bound: *bound, strict: false },
            other => other.clone(),
        }
    }

    pub fn contains(&self, z: &Density, tol: f64) -> bool {
        let v = z.values();
        let zmax = z.sup_norm();
        let zmin = v.iter().copied().fold(f64::INFINITY, f64::min);
        match *self {
            DualDomain::Box { lo, hi } => zmin >= lo - tol && zmax <= hi + tol,
            DualDomain::ScaledBox { a, b } => {
                if a == 0.0 {
                    true
                } else {
                    zmin > 0.0 && zmax / zmin <= b / a * (1.0 + tol)
                }
            }
            DualDomain::SupNorm { bound, strict } => {
                if strict {
                    zmax < bound
                } else {
                    zmax <= bound + tol
                }
            }
        }
    }
}

impl fmt::Display for DualDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualDomain::Box { lo, hi } => write!(f, "BOX({lo}, {hi})"),
            DualDomain::ScaledBox { a, b } => write!(f, "SCALED_BOX({a}, {b})"),
            DualDomain::SupNorm { bound, strict } => {
                write!(f, "SUPNORM({bound}, {})", if *strict { "strict" } else { "non-strict" })
            }
        }
    }
}

/// Penalty `alpha(Z)` on the domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Penalty {
    Zero,
    /// `E[l*(Z)]`.
    Conjugate(LossFunction),
    /// `inf_{lambda > 0} (1/lambda) E[l*(lambda Z)]`.
    ScaledConjugate(LossFunction),
    /// `g(1 / |Z|_inf)`.
    Profile(TargetProfile),
}

/// Dual set of a convex risk measure: `rho(X) = sup_{Z in domain} E[-Z X] - alpha(Z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSetSpec {
    pub domain: DualDomain,
    pub penalty: Penalty,
}

impl DualSetSpec {
    /// `alpha(Z)`, infinite outside the domain.
    pub fn penalty_at(&self, z: &Density) -> f64 {
        if !self.domain.contains(z, 1e-12) {
            return f64::INFINITY;
        }
        let p = z.space().probs();
        let v = z.values();
        match &self.penalty {
            Penalty::Zero => 0.0,
            Penalty::Conjugate(l) => p.iter().zip(v).map(|(p, z)| p * l.conjugate(*z)).sum(),
            Penalty::Profile(g) => g.value(1.0 / z.sup_norm()),
            Penalty::ScaledConjugate(l) => {
                let (a, b) = (l.left_slope(), l.right_slope());
                let zmax = z.sup_norm();
                let zmin = v.iter().copied().fold(f64::INFINITY, f64::min);
                // t = 1/lambda with a t <= z_i <= b t.
                let t_lo = if b.is_infinite() { 0.0 } else { zmax / b };
                let t_hi = if a == 0.0 { f64::INFINITY } else { zmin / a };
                if t_lo > t_hi {
                    return f64::INFINITY;
                }
                let h = |t: f64| -> f64 {
                    if t <= 0.0 {
                        return f64::INFINITY;
                    }
                    t * p.iter().zip(v).map(|(p, z)| p * l.conjugate(z / t)).sum::<f64>()
                };
                let (lo, hi) = (t_lo.max(1e-12).ln(), t_hi.min(1e12).ln());
                if lo >= hi {
                    return h(t_lo.max(1e-12));
                }
                let (_, fs) = golden_max(&|s: f64| -h(s.exp()), lo, hi);
                (-fs).min(h(lo.exp())).min(h(hi.exp()))
            }
        }
    }
}

/// Emits the dual domain and penalty of `spec`.
pub fn dual_set(spec: &RiskSpec) -> Result<DualSetSpec> {
    let all = DualDomain::SupNorm { bound: f64::INFINITY, strict: false };
    let ds = match spec {
        RiskSpec::Var { .. } | RiskSpec::Ew { .. } => {
            return Err(Error::Unsupported(format!("{} has no convex dual representation", spec.family())))
        }
        RiskSpec::Es { alpha } => {
            DualSetSpec { domain: DualDomain::Box { lo: 0.0, hi: 1.0 / alpha }, penalty: Penalty::Zero }
        }
        RiskSpec::Wc => DualSetSpec { domain: all, penalty: Penalty::Zero },
        RiskSpec::ExpectedLoss => DualSetSpec { domain: DualDomain::Box { lo: 1.0, hi: 1.0 }, penalty: Penalty::Zero },
        RiskSpec::Lses { b } => DualSetSpec { domain: all, penalty: Penalty::Profile(TargetProfile::lses(*b)?) },
        RiskSpec::AdjEs { g } => {
            let beta = g.beta();
            let domain =
                if beta == 0.0 { all } else { DualDomain::SupNorm { bound: 1.0 / beta, strict: !g.finite_at_beta() } };
            DualSetSpec { domain, penalty: Penalty::Profile(g.clone()) }
        }
        RiskSpec::Oce { l } => DualSetSpec {
            domain: DualDomain::Box { lo: l.left_slope(), hi: l.right_slope() },
            penalty: Penalty::Conjugate(l.clone()),
        },
        RiskSpec::Sr { l } => {
            if l.vanishes_on_negatives() {
                DualSetSpec { domain: all, penalty: Penalty::Zero }
            } else {
                DualSetSpec {
                    domain: DualDomain::ScaledBox { a: l.left_slope(), b: l.right_slope() },
                    penalty: Penalty::ScaledConjugate(l.clone()),
                }
            }
        }
    };
    Ok(ds)
}

/// Effective domain of the lower semicontinuous convex hull of the penalty.
pub fn closure_dual_set(spec: &RiskSpec) -> Result<DualDomain> {
    let all = DualDomain::SupNorm { bound: f64::INFINITY, strict: false };
    Ok(match spec {
        RiskSpec::Lses { .. } | RiskSpec::Wc => all,
        RiskSpec::AdjEs { g } => {
            let beta = g.beta();
            if beta == 0.0 {
                all
            } else {
                DualDomain::SupNorm { bound: 1.0 / beta, strict: !g.bounded_on_dom() }
            }
        }
        other => dual_set(other)?.domain,
    })
}

/// Recession function `rho^inf(X) = lim_t rho(tX)/t` of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recession {
    Var(f64),
    Es(f64),
    Wc,
    ExpectedLoss,
    /// `sup { E[Z L] : Z density, lo <= Z <= hi }`.
    BoxSup {
        lo: f64,
        hi: f64,
    },
    /// `sup { E[w L] / E[w] : a <= w <= b }`.
    ScaledBoxSup {
        a: f64,
        b: f64,
    },
    /// `E[b L^+ - a L^-]`.
    EwSlopes {
        a: f64,
        b: f64,
    },
}

impl Recession {
    pub fn of(spec: &RiskSpec) -> Recession {
        match spec {
            RiskSpec::Var { alpha } => Recession::Var(*alpha),
            RiskSpec::Es { alpha } => Recession::Es(*alpha),
            RiskSpec::Wc | RiskSpec::Lses { .. } => Recession::Wc,
            RiskSpec::ExpectedLoss => Recession::ExpectedLoss,
            RiskSpec::AdjEs { g } => {
                if g.beta() > 0.0 {
                    Recession::Es(g.beta())
                } else {
                    Recession::Wc
                }
            }
            RiskSpec::Oce { l } => Recession::BoxSup { lo: l.left_slope(), hi: l.right_slope() },
            RiskSpec::Sr { l } => {
                if l.vanishes_on_negatives() || l.right_slope().is_infinite() {
                    Recession::Wc
                } else {
                    Recession::ScaledBoxSup { a: l.left_slope(), b: l.right_slope() }
                }
            }
            RiskSpec::Ew { l } => Recession::EwSlopes { a: l.left_slope(), b: l.right_slope() },
        }
    }

    /// The positively homogeneous spec whose value is this recession, when
    /// one exists among the families.
    pub fn as_spec(&self) -> Option<RiskSpec> {
        match *self {
            Recession::Var(a) => Some(RiskSpec::Var { alpha: a }),
            Recession::Es(a) => Some(RiskSpec::Es { alpha: a }),
            Recession::Wc => Some(RiskSpec::Wc),
            Recession::ExpectedLoss => Some(RiskSpec::ExpectedLoss),
            _ => None,
        }
    }

    /// Closed-form value on `x`.
    pub fn value(&self, x: &RandVar) -> Ext {
        let tc = TailCurve::new(x);
        match *self {
            Recession::Var(a) => Ext::Finite(tc.var(a)),
            Recession::Es(a) => Ext::Finite(tc.es(a)),
            Recession::Wc => Ext::Finite(tc.worst()),
            Recession::ExpectedLoss => Ext::Finite(tc.mean()),
            Recession::BoxSup { lo, hi } => {
                if lo >= 1.0 || hi <= 1.0 {
                    Ext::Finite(tc.mean())
                } else if hi.is_infinite() {
                    Ext::Finite(lo * tc.mean() + (1.0 - lo) * tc.worst())
                } else {
                    let q = ((1.0 - lo) / (hi - lo)).min(1.0);
                    Ext::Finite(lo * tc.mean() + (1.0 - lo) * tc.es(q))
                }
            }
            Recession::ScaledBoxSup { a, b } => {
                if b.is_infinite() || a == 0.0 {
                    return Ext::Finite(tc.worst());
                }
                if a == b {
                    return Ext::Finite(tc.mean());
                }
                // Root of a E[L - t] + (b - a) E[(L - t)^+], a decreasing
                // piecewise-linear function of t.
                let el = tc.mean();
                for k in 0..tc.len() {
                    let (c, s) = (tc.cum[k], tc.partial[k]);
                    let t = (a * el + (b - a) * s) / (a + (b - a) * c);
                    let below = if k + 1 < tc.len() { tc.losses[k + 1] } else { f64::NEG_INFINITY };
                    if t >= below && t <= tc.losses[k] * (1.0 + 1e-15) + 1e-300 {
                        return Ext::Finite(t);
                    }
                }
                Ext::Finite(tc.worst())
            }
            Recession::EwSlopes { a, b } => {
                let pos: f64 = tc.losses.iter().zip(&tc.probs).filter(|(l, _)| **l > 0.0).map(|(l, p)| l * p).sum();
                if b.is_infinite() {
                    if pos > 0.0 {
                        Ext::PosInf
                    } else {
                        Ext::Finite(a * tc.mean())
                    }
                } else {
                    Ext::Finite(a * tc.mean() + (b - a) * pos)
                }
            }
        }
    }
}

/// `rho^inf(X)`, the smallest positively homogeneous majorant of `rho`.
pub fn recession_value(spec: &RiskSpec, x: &RandVar) -> Result<Ext> {
    spec.validate()?;
    Ok(Recession::of(spec).value(x))
}

/// `rho(tX)/t` along `ladder`, which is nondecreasing by star-shapedness
/// and converges to `rho^inf(X)`.
pub fn numeric_recession_probe(spec: &RiskSpec, x: &RandVar, ladder: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    if ladder.iter().any(|t| *t < 1.0) || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("ladder must be increasing and at least 1"));
    }
    Ok(ladder.iter().map(|&t| spec.eval(&x.scale(t)) / t).collect())
}

fn lp_value(lp: &LinearProgram, what: &str) -> Result<(f64, Vec<f64>)> {
    match lp.solve()? {
        LpOutcome::Optimal(s) => Ok((s.objective, s.x)),
        other => Err(Error::Solver(format!("{what} LP ended {other:?}"))),
    }
}

/// `max E[Z L]` over densities with `z <= s` (`s` may be infinite).
fn capped_sup(p: &[f64], losses: &[f64], lo: f64, s: f64) -> Result<f64> {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let z: Vec<usize> = losses.iter().zip(p).map(|(l, p)| lp.add_var(lo, s, p * l)).collect();
    let row: Vec<(usize, f64)> = z.iter().zip(p).map(|(&v, &p)| (v, p)).collect();
    lp.add_row(&row, Relation::Eq, 1.0);
    Ok(lp_value(&lp, "dual box")?.0)
}

/// `rho(X)` from the dual representation, by LP or a one-dimensional
/// concave search per family.
pub fn dual_evaluate(spec: &RiskSpec, x: &RandVar) -> Result<f64> {
    spec.validate()?;
    let p = x.probs();
    let losses: Vec<f64> = x.values().iter().map(|v| -v).collect();
    match spec {
        RiskSpec::Var { .. } | RiskSpec::Ew { .. } => {
            Err(Error::Unsupported(format!("{} has no convex dual representation", spec.family())))
        }
        RiskSpec::Es { alpha } => capped_sup(p, &losses, 0.0, 1.0 / alpha),
        RiskSpec::Wc => capped_sup(p, &losses, 0.0, f64::INFINITY),
        RiskSpec::ExpectedLoss => capped_sup(p, &losses, 1.0, 1.0),
        RiskSpec::Lses { b } => inv_affine_piece(p, &losses, -b, *b, 1.0, f64::INFINITY),
        RiskSpec::AdjEs { g } => dual_adjusted_es(p, &losses, g),
        RiskSpec::Oce { l } => match l {
            LossFunction::Piecewise(pw) => {
                let mut lp = LinearProgram::new(Sense::Maximize);
                let (a, b) = (l.left_slope(), l.right_slope());
                let mut support: Vec<(f64, f64)> =
                    pw.breaks().iter().copied().zip(pw.values().iter().copied()).collect();
                support.push((0.0, 0.0));
                let mut norm = Vec::new();
                for (li, pi) in losses.iter().zip(p) {
                    let z = lp.add_var(a, b, pi * li);
                    let t = lp.add_free(-pi);
                    for (xk, lk) in &support {
                        // t >= x_k z - l(x_k)
                        lp.add_row(&[(t, 1.0), (z, -xk)], Relation::Ge, -lk);
                    }
                    norm.push((z, *pi));
                }
                lp.add_row(&norm, Relation::Eq, 1.0);
                Ok(lp_value(&lp, "OCE dual")?.0)
            }
            LossFunction::Exp => Ok(gibbs(p, &losses, 1.0)),
            LossFunction::Power { .. } => Err(Error::Unsupported("power loss for OCE".into())),
        },
        RiskSpec::Sr { l } => {
            if l.vanishes_on_negatives() {
                return capped_sup(p, &losses, 0.0, f64::INFINITY);
            }
            match l {
                LossFunction::Piecewise(pw) => {
                    // Perspective form in (z, tau) with tau = 1/lambda.
                    let (a, b) = (l.left_slope(), l.right_slope());
                    let mut lp = LinearProgram::new(Sense::Maximize);
                    let tau = lp.add_nonneg(0.0);
                    let mut support: Vec<(f64, f64)> =
                        pw.breaks().iter().copied().zip(pw.values().iter().copied()).collect();
                    support.push((0.0, 0.0));
                    let mut norm = Vec::new();
                    for (li, pi) in losses.iter().zip(p) {
                        let z = lp.add_nonneg(pi * li);
                        let t = lp.add_free(-pi);
                        for (xk, lk) in &support {
                            lp.add_row(&[(t, 1.0), (z, -xk), (tau, *lk)], Relation::Ge, 0.0);
                        }
                        lp.add_row(&[(z, 1.0), (tau, -a)], Relation::Ge, 0.0);
                        if b.is_finite() {
                            lp.add_row(&[(z, 1.0), (tau, -b)], Relation::Le, 0.0);
                        }
                        norm.push((z, *pi));
                    }
                    lp.add_row(&norm, Relation::Eq, 1.0);
                    Ok(lp_value(&lp, "SR dual")?.0)
                }
                LossFunction::Exp => {
                    let h = |s: f64| gibbs(p, &losses, s.exp());
                    Ok(golden_max(&h, -30.0, 30.0).1)
                }
                LossFunction::Power { .. } => unreachable!("power loss vanishes on negatives"),
            }
        }
    }
}

/// `max_z { E[z L] - tau E[l*(z/tau)] : E[z] = 1 }` for `l = e^x - 1`,
/// attained at `z_i = tau e^{L_i - mu}` with `mu` fixed by the constraint.
fn gibbs(p: &[f64], losses: &[f64], tau: f64) -> f64 {
    let lmax = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mass = |mu: f64| -> f64 { p.iter().zip(losses).map(|(p, l)| p * tau * (l - mu).exp()).sum() };
    // mass is decreasing in mu; bracket around the maximum loss.
    let (mut lo, mut hi) = (lmax + tau.ln() - 1.0, lmax + tau.ln() + 1.0);
    while mass(lo) < 1.0 {
        lo -= (hi - lo).max(1.0);
    }
    while mass(hi) > 1.0 {
        hi += (hi - lo).max(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let conj = |u: f64| if u == 0.0 { 1.0 } else { u * u.ln() - u + 1.0 };
    p.iter()
        .zip(losses)
        .map(|(p, l)| {
            let z = tau * (l - mu).exp();
            p * (z * l - tau * conj(z / tau))
        })
        .sum()
}

/// `max { E[Z L] - a - c M : z <= M, s_lo <= M <= s_hi }`.
fn inv_affine_piece(p: &[f64], losses: &[f64], a: f64, c: f64, s_lo: f64, s_hi: f64) -> Result<f64> {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let m = lp.add_var(s_lo, s_hi, -c);
    let mut norm = Vec::new();
    for (l, pi) in losses.iter().zip(p) {
        let z = lp.add_nonneg(pi * l);
        lp.add_row(&[(z, 1.0), (m, -1.0)], Relation::Le, 0.0);
        norm.push((z, *pi));
    }
    lp.add_row(&norm, Relation::Eq, 1.0);
    Ok(lp_value(&lp, "sup-norm dual")?.0 - a)
}

/// `sup_s { V(s) - g(1/s) }` with `V(s) = max { E[Z L] : |Z|_inf <= s }`.
fn dual_adjusted_es(p: &[f64], losses: &[f64], g: &TargetProfile) -> Result<f64> {
    if let Some(b) = g.as_lses() {
        return inv_affine_piece(p, losses, -b, b, 1.0, f64::INFINITY);
    }
    // V is affine in s between the reciprocals of the cumulative
    // probabilities of the sorted losses and constant beyond the first.
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| losses[j].total_cmp(&losses[i]));
    let mut knots = Vec::new();
    let mut c = 0.0;
    for (r, &i) in order.iter().enumerate() {
        c += p[i];
        let last_tie = r + 1 == order.len() || losses[order[r + 1]] != losses[i];
        if last_tie {
            knots.push(1.0 / c.min(1.0));
        }
    }
    let s_cap = knots[0];
    let mut best = f64::NEG_INFINITY;
    for piece in g.pieces() {
        let (s_lo, s_hi) = (1.0 / piece.hi, if piece.lo == 0.0 { f64::INFINITY } else { 1.0 / piece.lo });
        match &piece.f {
            ProfileFn::Infinite => continue,
            ProfileFn::InvAffine { a, c } => best = best.max(inv_affine_piece(p, losses, *a, *c, s_lo, s_hi)?),
            ProfileFn::Poly(cf) if cf.len() <= 1 => {
                let a0 = cf.first().copied().unwrap_or(0.0);
                best = best.max(inv_affine_piece(p, losses, a0, 0.0, s_lo, s_hi)?);
            }
            f => {
                let hi = s_hi.min(s_cap.max(s_lo));
                let mut pts: Vec<f64> = knots.iter().copied().filter(|&s| s > s_lo && s < hi).collect();
                pts.push(s_lo);
                pts.push(hi);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                let vals = pts.iter().map(|&s| capped_sup(p, losses, 0.0, s)).collect::<Result<Vec<f64>>>()?;
                let gt = |s: f64| f.eval(1.0 / s);
                for (k, w) in pts.windows(2).enumerate() {
                    let (s0, s1) = (w[0], w[1]);
                    let (v0, v1) = (vals[k], vals[k + 1]);
                    let obj = |s: f64| v0 + (v1 - v0) * (s - s0) / (s1 - s0) - gt(s);
                    best = best.max(obj(s0)).max(obj(s1)).max(golden_max(&obj, s0, s1).1);
                }
                if pts.len() == 1 {
                    best = best.max(vals[0] - gt(pts[0]));
                }
            }
        }
    }
    Ok(best)
}

fn martingale_rows(m: &Market, lp: &mut LinearProgram, z: &[usize]) {
    let p = m.space().probs();
    for row in m.excess() {
        let coeffs: Vec<(usize, f64)> = z.iter().zip(p).zip(row).map(|((&v, p), e)| (v, p * e)).collect();
        lp.add_row(&coeffs, Relation::Eq, 0.0);
    }
}

/// A density in `M = { Z : E[Z (R^i - r)] = 0 }` intersected with the
/// closed or strict domain `ds`, or `None` when the intersection is empty.
pub fn martingale_feasibility(m: &Market, ds: Option<&DualDomain>) -> Result<Option<Density>> {
    let space = m.space();
    let p = space.probs();
    let n = m.atoms();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let (lo, hi, scaled, strict_bound) = match ds {
        None => (0.0, f64::INFINITY, false, None),
        Some(DualDomain::Box { lo, hi }) => (*lo, *hi, false, None),
        Some(DualDomain::SupNorm { bound, strict }) => {
            if *strict && bound.is_finite() {
                (0.0, f64::INFINITY, false, Some(*bound))
            } else {
                (0.0, *bound, false, None)
            }
        }
        Some(DualDomain::ScaledBox { a, b }) => {
            if *a == 0.0 && b.is_infinite() {
                (0.0, f64::INFINITY, false, None)
            } else {
                (*a, *b, true, None)
            }
        }
    };
    let z: Vec<usize> = (0..n).map(|_| lp.add_var(lo, hi, 0.0)).collect();
    martingale_rows(m, &mut lp, &z);
    let mass: Vec<(usize, f64)> = z.iter().zip(p).map(|(&v, &p)| (v, p)).collect();
    let mut eps = None;
    if scaled {
        // w = k z with k = E[w] free; with a = 0 the set is a cone near 0,
        // so maximize k, otherwise k >= a already.
        for (&v, &pi) in z.iter().zip(p) {
            lp.set_cost(v, if lo == 0.0 { pi } else { -pi });
        }
    } else {
        lp.add_row(&mass, Relation::Eq, 1.0);
        if let Some(bound) = strict_bound {
            let e = lp.add_var(0.0, 1.0, 1.0);
            for &v in &z {
                lp.add_row(&[(v, 1.0), (e, 1.0)], Relation::Le, bound);
            }
            eps = Some(e);
        }
    }
    let sol = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Ok(None),
        LpOutcome::Unbounded => {
            return Err(Error::Solver("martingale feasibility LP unbounded".into()));
        }
    };
    if let Some(e) = eps {
        if sol.x[e] <= SLACK_TOL {
            return Ok(None);
        }
    }
    let w: Vec<f64> = z.iter().map(|&v| sol.x[v]).collect();
    if scaled && space.expectation(&w) <= SLACK_TOL {
        return Ok(None);
    }
    Ok(Some(Density::from_lp(space, w)))
}

/// A strictly positive martingale density in the relative interior of
/// `ds`, found by maximizing a common slack `eps <= 1`; returns the density
/// and the slack when `eps > SLACK_TOL`.
pub fn interior_martingale_feasibility(m: &Market, ds: &DualDomain) -> Result<Option<(Density, f64)>> {
    let space = m.space();
    let p = space.probs();
    let n = m.atoms();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let e = lp.add_var(0.0, 1.0, 1.0);
    let (lo, hi, scaled) = match *ds {
        DualDomain::Box { lo, hi } => (lo, hi, false),
        DualDomain::SupNorm { bound, .. } => (0.0, bound, false),
        DualDomain::ScaledBox { a, b } => (a, b, !(a == 0.0 && b.is_infinite())),
    };
    let fixed = lo == hi;
    let z: Vec<usize> = (0..n).map(|_| if fixed { lp.add_var(lo, lo, 0.0) } else { lp.add_nonneg(0.0) }).collect();
    for &v in &z {
        lp.add_row(&[(v, 1.0), (e, -1.0)], Relation::Ge, 0.0);
        if !fixed {
            if lo > 0.0 {
                lp.add_row(&[(v, 1.0), (e, -1.0)], Relation::Ge, lo);
            }
            if hi.is_finite() {
                lp.add_row(&[(v, 1.0), (e, 1.0)], Relation::Le, hi);
            }
        }
    }
    martingale_rows(m, &mut lp, &z);
    if !scaled {
        let mass: Vec<(usize, f64)> = z.iter().zip(p).map(|(&v, &p)| (v, p)).collect();
        lp.add_row(&mass, Relation::Eq, 1.0);
    }
    let sol = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Ok(None),
        LpOutcome::Unbounded => return Err(Error::Solver("interior feasibility LP unbounded".into())),
    };
    let eps = sol.x[e];
    if eps <= SLACK_TOL {
        return Ok(None);
    }
    let w: Vec<f64> = z.iter().map(|&v| sol.x[v]).collect();
    Ok(Some((Density::from_lp(space, w), eps)))
}

/// Lower semicontinuous convex hull `g_hat(x) = co g~(1/x)` with
/// `g~(s) = g(1/s)`, from the lower hull of `grid` samples of `g~` on
/// `[1, 1/beta)` plus the breakpoints of `g`. Accuracy is limited by the
/// grid spacing in `s`. Near an infinite `g(beta)` the original pieces are
/// kept from the last hull vertex on, so `g_hat(beta) = inf` is preserved.
pub fn g_hat_transform(g: &TargetProfile, grid: usize) -> Result<TargetProfile> {
    let beta = g.beta();
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("hull transform needs beta in (0, 1)"));
    }
    let grid = grid.max(10_000);
    let s_end = 1.0 / beta;
    let mut s: Vec<f64> = (0..grid).map(|j| 1.0 + (s_end - 1.0) * j as f64 / grid as f64).collect();
    for p in g.pieces() {
        for x in [p.lo, p.hi] {
            if x > beta && x <= 1.0 {
                s.push(1.0 / x);
            }
        }
    }
    let closed = g.bounded_on_dom();
    if closed {
        s.push(s_end);
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    let value = |si: f64| -> f64 {
        if si >= s_end {
            g.pieces().iter().find(|p| !matches!(p.f, ProfileFn::Infinite)).map(|p| p.f.eval(p.lo)).unwrap()
        } else {
            g.value(1.0 / si)
        }
    };
    let pts: Vec<(f64, f64)> = s.iter().map(|&si| (si, value(si))).filter(|(_, v)| v.is_finite()).collect();
    // Andrew's monotone chain, lower hull, keeping sample indices.
    let mut hull: Vec<usize> = Vec::new();
    for (k, &pt) in pts.iter().enumerate() {
        while hull.len() >= 2 {
            let (o, a) = (pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]]);
            let cross = (a.0 - o.0) * (pt.1 - o.1) - (a.1 - o.1) * (pt.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut pieces = vec![ProfilePiece { lo: 0.0, hi: beta, f: ProfileFn::Infinite }];
    let last = pts[*hull.last().unwrap()];
    let x_tail = 1.0 / last.0;
    if !closed && x_tail > beta {
        for p in g.pieces() {
            let (lo, hi) = (p.lo.max(beta), p.hi.min(x_tail));
            if lo < hi && !matches!(p.f, ProfileFn::Infinite) {
                pieces.push(ProfilePiece { lo, hi, f: p.f.clone() });
            }
        }
    }
    for w in hull.windows(2).rev() {
        let ((s0, g0), (s1, g1)) = (pts[w[0]], pts[w[1]]);
        let lo = if closed && s1 >= s_end { beta } else { 1.0 / s1 };
        let (hi, xm) = (1.0 / s0, 2.0 / (s0 + s1));
        // Between adjacent samples where g~ is locally convex the hull is g
        // itself; a chord there would cost accuracy near a steep pole.
        let own = (w[1] == w[0] + 1 && s1 < s_end && g.value(xm) <= 0.5 * (g0 + g1))
            .then(|| g.pieces().iter().find(|p| p.lo < xm && xm <= p.hi).map(|p| p.f.clone()))
            .flatten();
        let f = own.unwrap_or_else(|| {
            // Affine in s = 1/x: g = g0 + c (s - s0).
            let c = (g1 - g0) / (s1 - s0);
            ProfileFn::InvAffine { a: g0 - c * s0, c }
        });
        match pieces.last_mut() {
            Some(prev) if prev.f == f && !matches!(f, ProfileFn::InvAffine { .. }) => prev.hi = hi,
            _ => pieces.push(ProfilePiece { lo, hi, f }),
        }
    }
    pieces.last_mut().unwrap().hi = 1.0;
    if let Some(p) = pieces.get_mut(1) {
        p.lo = beta;
    }
    TargetProfile::new(pieces)
}
