//! Mean-risk optimal boundaries, efficient frontiers, and the primal and
//! dual detectors of (strong) risk-measure arbitrage.
//!
//! `rho_nu` minimizes `rho(X_pi)` over `Pi_nu = { pi : pi . (mu - r) = nu }`.
//! Families whose measure is a piecewise-linear program (ES, WC, LSES and
//! OCE, SR, EW with piecewise-linear losses) and every recession measure are
//! solved as one LP in `pi`. The others use Kelley's cutting-plane method on
//! the null-space coordinates of the slice, with cuts from the dual density.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::finite_market::{check_classical_arbitrage, portfolio_slice, ArbitrageWitness, Market, Portfolio, RandVar};
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};
use crate::recession_dual::{
    closure_dual_set, dual_set, interior_martingale_feasibility, martingale_feasibility, Density, Recession,
};
use crate::risk_measures::{golden_max, LossFunction, RiskSpec};

/// Objective tolerance of the cutting-plane loop.
pub const KELLEY_TOL: f64 = 1e-8;
pub const KELLEY_MAX_ITER: usize = 10_000;
const BOX_CAP: f64 = 1e8;
/// Sign threshold for `rho^inf_1` and the descent-ray optimum.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    /// `min E[v] - eta`, `v >= l(L + eta)`.
    Oce,
    /// `min m`, `E[v] <= 0`, `v >= l(L - m)`.
    Sr,
    /// `min E[v]`, `v >= l(L)`.
    Ew,
    /// `min t + b`, `E[(L - t)^+] <= b`.
    Lses(f64),
}

/// A measure written as a linear program in the losses `L = -X`.
#[derive(Debug, Clone, PartialEq)]
struct PwlKernel {
    form: Form,
    /// Affine pieces `(slope, intercept)` of `l`.
    pieces: Vec<(f64, f64)>,
    /// Adds `l = +inf` on the positive half-line of its argument.
    cap: bool,
}

impl PwlKernel {
    fn oce(pieces: Vec<(f64, f64)>, cap: bool) -> Self {
        PwlKernel { form: Form::Oce, pieces, cap }
    }

    fn es(alpha: f64) -> Self {
        Self::oce(vec![(0.0, 0.0), (1.0 / alpha, 0.0)], false)
    }

    fn wc() -> Self {
        Self::oce(vec![(0.0, 0.0)], true)
    }

    fn expected_loss() -> Self {
        Self::oce(vec![(1.0, 0.0)], false)
    }

    /// Pieces of `l^inf(x) = a x^- ... b x^+`, capped when `b` is infinite.
    fn slopes(form: Form, a: f64, b: f64) -> Self {
        if b.is_infinite() {
            PwlKernel { form, pieces: vec![(a, 0.0)], cap: true }
        } else {
            PwlKernel { form, pieces: vec![(a, 0.0), (b, 0.0)], cap: false }
        }
    }

    fn of_spec(spec: &RiskSpec) -> Option<PwlKernel> {
        let pwl = |l: &LossFunction| match l {
            LossFunction::Piecewise(p) => Some(p.affine_pieces()),
            _ => None,
        };
        match spec {
            RiskSpec::Var { .. } => None,
            RiskSpec::Es { alpha } => Some(Self::es(*alpha)),
            RiskSpec::Wc => Some(Self::wc()),
            RiskSpec::ExpectedLoss => Some(Self::expected_loss()),
            RiskSpec::Lses { b } => Some(PwlKernel { form: Form::Lses(*b), pieces: vec![], cap: false }),
            RiskSpec::AdjEs { g } => {
                if let Some(b) = g.as_lses() {
                    Some(PwlKernel { form: Form::Lses(b), pieces: vec![], cap: false })
                } else if g.is_zero_or_infinite() {
                    // sup of ES^alpha over alpha >= beta is ES^beta.
                    Some(Self::es(g.beta()))
                } else {
                    None
                }
            }
            RiskSpec::Oce { l } => pwl(l).map(|p| Self::oce(p, false)),
            RiskSpec::Sr { l } if l.vanishes_on_negatives() => Some(Self::wc()),
            RiskSpec::Sr { l } => pwl(l).map(|p| PwlKernel { form: Form::Sr, pieces: p, cap: false }),
            RiskSpec::Ew { l } => pwl(l).map(|p| PwlKernel { form: Form::Ew, pieces: p, cap: false }),
        }
    }

    fn of_recession(r: Recession) -> Result<PwlKernel> {
        Ok(match r {
            Recession::Var(_) => return Err(Error::Unsupported("VaR boundary is not a convex program".into())),
            Recession::Es(a) => Self::es(a),
            Recession::Wc => Self::wc(),
            Recession::ExpectedLoss => Self::expected_loss(),
            Recession::BoxSup { lo, hi } => Self::slopes(Form::Oce, lo, hi),
            Recession::ScaledBoxSup { a, b } => Self::slopes(Form::Sr, a, b),
            Recession::EwSlopes { a, b } => Self::slopes(Form::Ew, a, b),
        })
    }
}

/// Feasible portfolios of a kernel LP.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Domain {
    /// `pi . (mu - r) = nu`.
    Level(f64),
    /// `|pi|_1 <= 1`, optionally also on `Pi_0`.
    Ball { null: bool },
}

struct KernelLp {
    lp: LinearProgram,
    pi: Vec<usize>,
    abs: Vec<usize>,
    /// Objective as `(var, coefficient)` plus a constant.
    cost: Vec<(usize, f64)>,
    offset: f64,
}

fn build(kernel: &PwlKernel, m: &Market, domain: Domain) -> KernelLp {
    let d = m.dim();
    let p = m.space().probs();
    let e = m.excess();
    let c = m.mean_excess();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let pi: Vec<usize> = (0..d).map(|_| lp.add_free(0.0)).collect();
    let abs: Vec<usize> = (0..d).map(|_| lp.add_nonneg(0.0)).collect();
    for (&a, &x) in abs.iter().zip(&pi) {
        lp.add_row(&[(a, 1.0), (x, -1.0)], Relation::Ge, 0.0);
        lp.add_row(&[(a, 1.0), (x, 1.0)], Relation::Ge, 0.0);
    }
    let level: Vec<(usize, f64)> = pi.iter().copied().zip(c.iter().copied()).collect();
    match domain {
        Domain::Level(nu) => {
            lp.add_row(&level, Relation::Eq, nu);
        }
        Domain::Ball { null } => {
            let ball: Vec<(usize, f64)> = abs.iter().map(|&a| (a, 1.0)).collect();
            lp.add_row(&ball, Relation::Le, 1.0);
            if null {
                lp.add_row(&level, Relation::Eq, 0.0);
            }
        }
    }
    // Row `coef * L_i + extra >= rhs` with `L_i = -sum_j pi_j e_ji`.
    let loss_row = |i: usize, coef: f64, extra: &[(usize, f64)]| -> Vec<(usize, f64)> {
        let mut row: Vec<(usize, f64)> = pi.iter().enumerate().map(|(j, &v)| (v, -coef * e[j][i])).collect();
        row.extend_from_slice(extra);
        row
    };
    let n = m.atoms();
    let mut cost = Vec::new();
    let mut offset = 0.0;
    match kernel.form {
        Form::Lses(b) => {
            let t = lp.add_free(1.0);
            cost.push((t, 1.0));
            offset = b;
            let mut mass = Vec::with_capacity(n);
            for (i, &pi) in p.iter().enumerate() {
                let u = lp.add_nonneg(0.0);
                // u - L + t >= 0
                lp.add_row(&loss_row(i, -1.0, &[(u, 1.0), (t, 1.0)]), Relation::Ge, 0.0);
                mass.push((u, pi));
            }
            lp.add_row(&mass, Relation::Le, b);
        }
        form => {
            // Shift variable: eta for OCE (argument L + eta), m for SR
            // (argument L - m); EW has none.
            let (shift, sgn) = match form {
                Form::Oce => {
                    let eta = lp.add_free(-1.0);
                    cost.push((eta, -1.0));
                    (Some(eta), 1.0)
                }
                Form::Sr => {
                    let mv = lp.add_free(1.0);
                    cost.push((mv, 1.0));
                    (Some(mv), -1.0)
                }
                _ => (None, 0.0),
            };
            let mut mass = Vec::with_capacity(n);
            for (i, &pi) in p.iter().enumerate() {
                let v = lp.add_free(0.0);
                for &(s, icpt) in &kernel.pieces {
                    // v - s (L + sgn shift) >= icpt
                    let mut extra = vec![(v, 1.0)];
                    if let Some(h) = shift {
                        extra.push((h, -s * sgn));
                    }
                    lp.add_row(&loss_row(i, -s, &extra), Relation::Ge, icpt);
                }
                if kernel.cap {
                    // L + sgn shift <= 0
                    let extra: Vec<(usize, f64)> = shift.map(|h| vec![(h, -sgn)]).unwrap_or_default();
                    lp.add_row(&loss_row(i, -1.0, &extra), Relation::Ge, 0.0);
                }
                mass.push((v, pi));
            }
            if form == Form::Sr {
                lp.add_row(&mass, Relation::Le, 0.0);
            } else {
                for &(v, pi_) in &mass {
                    lp.set_cost(v, pi_);
                }
                cost.extend(mass);
            }
        }
    }
    KernelLp { lp, pi, abs, cost, offset }
}

/// Optimal value and the smallest-`|pi|_1` optimal portfolio.
fn solve_kernel(kernel: &PwlKernel, m: &Market, domain: Domain) -> Result<(Ext, Option<Vec<f64>>)> {
    let k = build(kernel, m, domain);
    let sol = match k.lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Unbounded => return Ok((Ext::NegInf, None)),
        LpOutcome::Infeasible => return Ok((Ext::PosInf, None)),
    };
    let value = sol.objective + k.offset;
    let mut tie = k.lp.clone();
    for v in 0..tie.num_vars() {
        tie.set_cost(v, 0.0);
    }
    for &a in &k.abs {
        tie.set_cost(a, 1.0);
    }
    tie.add_row(&k.cost, Relation::Le, sol.objective + 1e-9 * sol.objective.abs().max(1.0));
    let x = match tie.solve()? {
        LpOutcome::Optimal(s) => s.x,
        _ => sol.x,
    };
    Ok((Ext::Finite(value), Some(k.pi.iter().map(|&v| x[v]).collect())))
}

/// `rho_nu` with its minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoNu {
    pub value: Ext,
    pub portfolio: Option<Portfolio>,
    /// False when the infimum is approached only as `|pi| -> inf`; the
    /// portfolio is then the best one found inside the search box.
    pub attained: bool,
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::invalid(format!("target excess return {nu} must be finite and nonnegative")));
    }
    Ok(())
}

fn portfolio(w: Option<Vec<f64>>) -> Option<Portfolio> {
    w.and_then(|w| Portfolio::new(w).ok())
}

/// `rho_nu = inf { rho(X_pi) : pi in Pi_nu }`.
pub fn rho_nu(spec: &RiskSpec, m: &Market, nu: f64) -> Result<RhoNu> {
    spec.validate()?;
    check_nu(nu)?;
    if let Some(k) = PwlKernel::of_spec(spec) {
        let (value, w) = solve_kernel(&k, m, Domain::Level(nu))?;
        return Ok(RhoNu { value, portfolio: portfolio(w), attained: value.is_finite() });
    }
    if matches!(spec, RiskSpec::Var { .. }) {
        return Err(Error::Unsupported("VaR boundary is not a convex program".into()));
    }
    // A recession direction inside Pi_0 with negative recession risk sends
    // rho to -inf along the slice.
    if m.dim() > 1 {
        let rk = PwlKernel::of_recession(Recession::of(spec))?;
        let neg = match solve_kernel(&rk, m, Domain::Ball { null: true })?.0 {
            Ext::NegInf => true,
            Ext::Finite(v) => v < -SIGN_TOL,
            Ext::PosInf => false,
        };
        if neg {
            return Ok(RhoNu { value: Ext::NegInf, portfolio: None, attained: false });
        }
    }
    kelley(spec, m, nu)
}

fn kelley(spec: &RiskSpec, m: &Market, nu: f64) -> Result<RhoNu> {
    let slice = portfolio_slice(m, nu);
    let k = slice.null_basis.len();
    let space = m.space();
    let eval = |y: &[f64]| -> (f64, Vec<f64>, Vec<f64>) {
        let pi = slice.point(y);
        let x = RandVar::new(space, m.payoff_of(&pi)).expect("payoff has one value per atom");
        let v = spec.eval(&x);
        let z = spec.supergradient(&x).expect("convex family has a supergradient");
        // d rho / d pi_j = -E[z E_j]
        let gpi: Vec<f64> = m
            .excess()
            .iter()
            .map(|e| -space.probs().iter().zip(&z).zip(e).map(|((p, z), e)| p * z * e).sum::<f64>())
            .collect();
        let gy: Vec<f64> = slice.null_basis.iter().map(|b| b.iter().zip(&gpi).map(|(b, g)| b * g).sum()).collect();
        (v, gy, pi)
    };
    if k == 0 {
        let (v, _, pi) = eval(&[]);
        return Ok(RhoNu { value: Ext::Finite(v), portfolio: portfolio(Some(pi)), attained: true });
    }
    let scale = slice.particular.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut half = 10.0 * scale;
    let mut cuts: Vec<(Vec<f64>, f64, Vec<f64>)> = Vec::new();
    let y0 = vec![0.0; k];
    let (f0, g0, pi0) = eval(&y0);
    let mut best = (f0, y0.clone(), pi0);
    cuts.push((y0, f0, g0));
    for _ in 0..KELLEY_MAX_ITER {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let ys: Vec<usize> = (0..k).map(|_| lp.add_var(-half, half, 0.0)).collect();
        let theta = lp.add_free(1.0);
        for (yc, f, g) in &cuts {
            // theta - g . y >= f - g . yc
            let mut row = vec![(theta, 1.0)];
            row.extend(ys.iter().zip(g).map(|(&v, gk)| (v, -gk)));
            let rhs = f - g.iter().zip(yc).map(|(a, b)| a * b).sum::<f64>();
            lp.add_row(&row, Relation::Ge, rhs);
        }
        let sol = lp
            .solve()?
            .optimal()
            .ok_or_else(|| Error::Solver(format!("cutting-plane master LP failed; best bound {}", best.0)))?;
        let lb = sol.objective;
        let y: Vec<f64> = ys.iter().map(|&v| sol.x[v]).collect();
        let (f, g, pi) = eval(&y);
        if f < best.0 {
            best = (f, y.clone(), pi);
        }
        cuts.push((y, f, g));
        if best.0 - lb <= KELLEY_TOL * best.0.abs().max(1.0) {
            let on_edge = best.1.iter().any(|v| v.abs() >= half * (1.0 - 1e-6));
            if on_edge && half < BOX_CAP {
                half *= 4.0;
                continue;
            }
            return Ok(RhoNu { value: Ext::Finite(best.0), portfolio: portfolio(Some(best.2)), attained: !on_edge });
        }
    }
    Err(Error::Solver(format!("cutting plane did not converge in {KELLEY_MAX_ITER} iterations; best value {}", best.0)))
}

/// `rho^inf_nu`, the boundary of the recession measure.
pub fn rho_inf_nu(spec: &RiskSpec, m: &Market, nu: f64) -> Result<RhoNu> {
    spec.validate()?;
    check_nu(nu)?;
    let k = PwlKernel::of_recession(Recession::of(spec))?;
    let (value, w) = solve_kernel(&k, m, Domain::Level(nu))?;
    Ok(RhoNu { value, portfolio: portfolio(w), attained: value.is_finite() })
}

/// `rho^inf_1`, whose sign classifies the arbitrage regime.
pub fn rho_inf_1(spec: &RiskSpec, m: &Market) -> Result<Ext> {
    Ok(rho_inf_nu(spec, m, 1.0)?.value)
}

/// `min { rho^inf(X_pi) : |pi|_1 <= 1 }` when negative, with its minimizer:
/// a descent ray along which `E[X_pi] -> inf` and `rho(X_pi) -> -inf`.
pub fn descent_ray(spec: &RiskSpec, m: &Market) -> Result<Option<(Portfolio, f64)>> {
    spec.validate()?;
    let k = PwlKernel::of_recession(Recession::of(spec))?;
    let (v, w) = solve_kernel(&k, m, Domain::Ball { null: false })?;
    Ok(match (v, portfolio(w)) {
        (Ext::Finite(v), Some(pi)) if v < -SIGN_TOL => Some((pi, v)),
        _ => None,
    })
}

/// Sign of `rho^inf_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Positive,
    Zero,
    Negative,
    /// `rho^inf_1 = +inf`.
    Infinite,
}

impl Regime {
    pub fn of(rho_inf_1: Ext) -> Regime {
        match rho_inf_1 {
            Ext::PosInf => Regime::Infinite,
            Ext::NegInf => Regime::Negative,
            Ext::Finite(v) if v > SIGN_TOL => Regime::Positive,
            Ext::Finite(v) if v < -SIGN_TOL => Regime::Negative,
            Ext::Finite(_) => Regime::Zero,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Positive => "POSITIVE",
            Regime::Zero => "ZERO",
            Regime::Negative => "NEGATIVE",
            Regime::Infinite => "INFINITE",
        })
    }
}

/// The optimal boundary `O_rho` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierResult {
    pub spec: String,
    pub nu_grid: Vec<f64>,
    pub rho_values: Vec<Ext>,
    pub rho_inf_values: Vec<Ext>,
    pub optimal_portfolios: Vec<Option<Portfolio>>,
    /// Solver failure per grid point, if any.
    pub errors: Vec<Option<String>>,
    /// `+inf` when the boundary keeps decreasing.
    pub nu_min: f64,
    pub rho_min: Ext,
    pub rho_inf_1: Ext,
    pub regime: Regime,
}

impl FrontierResult {
    /// CSV with columns `nu, rho_nu, rho_inf_nu, pi_1, ..., pi_d`.
    pub fn to_csv(&self, d: usize) -> String {
        let mut s = String::from("nu,rho_nu,rho_inf_nu");
        for j in 1..=d {
            s.push_str(&format!(",pi_{j}"));
        }
        s.push('\n');
        for (i, nu) in self.nu_grid.iter().enumerate() {
            s.push_str(&format!("{nu},{},{}", self.rho_values[i], self.rho_inf_values[i]));
            match &self.optimal_portfolios[i] {
                Some(p) => p.weights.iter().for_each(|w| s.push_str(&format!(",{w}"))),
                None => (0..d).for_each(|_| s.push(',')),
            }
            s.push('\n');
        }
        s
    }

    /// Risk-return pairs of `O_rho` and of the efficient part, as
    /// `set,risk,return` rows.
    pub fn plot_data(&self, eff: &EfficientFrontier) -> String {
        let mut s = String::from("set,risk,return\n");
        for (nu, r) in self.nu_grid.iter().zip(&self.rho_values) {
            if let Ext::Finite(r) = r {
                s.push_str(&format!("O,{r},{nu}\n"));
            }
        }
        if let EfficientFrontier::Boundary { points, .. } = eff {
            for (nu, r) in points {
                s.push_str(&format!("E,{r},{nu}\n"));
            }
        }
        s
    }
}

/// Samples `rho_nu` on `steps` uniform points of `[0, nu_max]` in parallel
/// and locates `nu_min`, refined by golden section in convex families.
pub fn optimal_boundary(spec: &RiskSpec, m: &Market, nu_max: f64, steps: usize) -> Result<FrontierResult> {
    spec.validate()?;
    if !(nu_max > 0.0 && nu_max.is_finite()) || steps < 2 {
        return Err(Error::invalid("need nu_max > 0 and at least two grid points"));
    }
    let nu_grid: Vec<f64> = (0..steps).map(|i| nu_max * i as f64 / (steps - 1) as f64).collect();
    let points: Vec<(Result<RhoNu>, Result<RhoNu>)> =
        nu_grid.par_iter().map(|&nu| (rho_nu(spec, m, nu), rho_inf_nu(spec, m, nu))).collect();
    let mut rho_values = Vec::with_capacity(steps);
    let mut rho_inf_values = Vec::with_capacity(steps);
    let mut optimal_portfolios = Vec::with_capacity(steps);
    let mut errors = Vec::with_capacity(steps);
    for (r, ri) in points {
        match r {
            Ok(r) => {
                rho_values.push(r.value);
                optimal_portfolios.push(r.portfolio);
                errors.push(None);
            }
            Err(e) => {
                rho_values.push(Ext::from_f64(f64::NAN));
                optimal_portfolios.push(None);
                errors.push(Some(e.to_string()));
            }
        }
        rho_inf_values.push(ri.map(|r| r.value).unwrap_or(Ext::from_f64(f64::NAN)));
    }
    let rho_inf_1 = rho_inf_1(spec, m)?;
    let regime = Regime::of(rho_inf_1);
    let (nu_min, rho_min) = match regime {
        Regime::Negative => (f64::INFINITY, Ext::NegInf),
        _ => {
            let (k, v) = rho_values
                .iter()
                .enumerate()
                .filter_map(|(k, v)| v.finite().filter(|v| !v.is_nan()).map(|v| (k, v)))
                .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
            if regime == Regime::Zero {
                (f64::INFINITY, Ext::Finite(v))
            } else if spec.is_convex() {
                let lo = nu_grid[k.saturating_sub(1)];
                let hi = nu_grid[(k + 1).min(steps - 1)];
                let f =
                    |nu: f64| rho_nu(spec, m, nu).ok().and_then(|r| r.value.finite()).map_or(f64::NEG_INFINITY, |v| -v);
                let (a, fa) = golden_max(&f, lo, hi);
                if -fa < v {
                    (a, Ext::Finite(-fa))
                } else {
                    (nu_grid[k], Ext::Finite(v))
                }
            } else {
                (nu_grid[k], Ext::Finite(v))
            }
        }
    };
    Ok(FrontierResult {
        spec: spec.to_string(),
        nu_grid,
        rho_values,
        rho_inf_values,
        optimal_portfolios,
        errors,
        nu_min,
        rho_min,
        rho_inf_1,
        regime,
    })
}

/// The efficient part `E_rho` of the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum EfficientFrontier {
    /// No efficient portfolios: the market admits rho-arbitrage.
    Empty,
    /// Grid points `(nu, rho_nu)` with `nu >= nu_min`; efficiency holds up
    /// to the grid spacing `resolution` and solver tolerance.
    Boundary { points: Vec<(f64, f64)>, resolution: f64 },
    /// `{ (nu rho^inf_1, nu) : nu >= 0 }` for a positively homogeneous measure.
    Ray { slope: f64 },
    /// `{ (0, 0) }` when `rho^inf_1 = +inf`.
    Origin,
}

/// Efficient frontier of a convex family from its sampled boundary.
pub fn efficient_frontier(fr: &FrontierResult) -> EfficientFrontier {
    if matches!(fr.regime, Regime::Negative | Regime::Zero) {
        return EfficientFrontier::Empty;
    }
    let resolution = fr.nu_grid.get(1).copied().unwrap_or(0.0);
    let points = fr
        .nu_grid
        .iter()
        .zip(&fr.rho_values)
        .filter(|(nu, r)| **nu >= fr.nu_min - resolution * 1e-9 && r.is_finite())
        .map(|(nu, r)| (*nu, r.to_f64()))
        .filter(|(_, r)| !r.is_nan());
    let mut pts: Vec<(f64, f64)> = points.collect();
    if fr.nu_min.is_finite() && !fr.nu_grid.contains(&fr.nu_min) {
        if let Ext::Finite(r) = fr.rho_min {
            pts.insert(0, (fr.nu_min, r));
        }
    }
    EfficientFrontier::Boundary { points: pts, resolution }
}

/// Efficient frontier of the recession measure, which is positively
/// homogeneous.
pub fn recession_efficient_frontier(rho_inf_1: Ext) -> EfficientFrontier {
    match Regime::of(rho_inf_1) {
        Regime::Negative | Regime::Zero => EfficientFrontier::Empty,
        Regime::Infinite => EfficientFrontier::Origin,
        Regime::Positive => EfficientFrontier::Ray { slope: rho_inf_1.to_f64() },
    }
}

/// Primal and dual verdicts on (strong) rho-arbitrage.
#[derive(Debug, Clone, PartialEq)]
pub struct ArbitrageReport {
    pub spec: String,
    pub classical: Option<ArbitrageWitness>,
    pub rho_arbitrage: bool,
    pub rho_inf_1: Ext,
    /// A strictly positive martingale density in the interior of the dual
    /// set, with its slack; present exactly when there is no rho-arbitrage.
    pub interior_witness: Option<(Density, f64)>,
    pub strong_rho_arbitrage: bool,
    /// A martingale density in the closure of the dual set; present exactly
    /// when there is no strong rho-arbitrage.
    pub closure_witness: Option<Density>,
    /// A portfolio with `rho^inf(X_pi) < 0`, which exists exactly when the
    /// market admits strong `rho^inf`-arbitrage.
    pub descent_ray: Option<(Portfolio, f64)>,
    pub strong_rho_inf_arbitrage: bool,
    /// Whether the dual detectors ran (not for EW).
    pub dual_checked: bool,
}

/// Decides rho-arbitrage both by the sign of `rho^inf_1` and by interior
/// martingale feasibility, and strong arbitrage both by the descent-ray LP
/// and by martingale feasibility on the closed dual set. Disagreements are
/// errors.
pub fn detect_arbitrage(spec: &RiskSpec, m: &Market) -> Result<ArbitrageReport> {
    spec.validate()?;
    if matches!(spec, RiskSpec::Var { .. }) {
        return Err(Error::Unsupported("arbitrage detection needs a convex measure".into()));
    }
    let classical = check_classical_arbitrage(m)?;
    let rho_inf_1 = rho_inf_1(spec, m)?;
    let primal_rho = !matches!(Regime::of(rho_inf_1), Regime::Positive | Regime::Infinite);
    let descent_ray = descent_ray(spec, m)?;
    let primal_ray = descent_ray.is_some();
    let mut report = ArbitrageReport {
        spec: spec.to_string(),
        classical,
        rho_arbitrage: primal_rho,
        rho_inf_1,
        interior_witness: None,
        strong_rho_arbitrage: primal_ray,
        closure_witness: None,
        descent_ray,
        strong_rho_inf_arbitrage: primal_ray,
        dual_checked: false,
    };
    if spec.is_dual_capable() {
        let interior = interior_martingale_feasibility(m, &dual_set(spec)?.domain)?;
        if interior.is_some() == primal_rho {
            return Err(Error::Disagreement(format!(
                "{spec}: rho^inf_1 = {rho_inf_1} but interior martingale density {}",
                if interior.is_some() { "exists" } else { "does not exist" }
            )));
        }
        let closure = closure_dual_set(spec)?;
        let closed = martingale_feasibility(m, Some(&closure.closed()))?;
        if closed.is_some() == primal_ray {
            return Err(Error::Disagreement(format!(
                "{spec}: descent ray {} but closed dual set meets M: {}",
                if primal_ray { "found" } else { "absent" },
                closed.is_some()
            )));
        }
        let closure_witness =
            if closure == closure.closed() { closed } else { martingale_feasibility(m, Some(&closure))? };
        report.interior_witness = interior;
        report.strong_rho_arbitrage = closure_witness.is_none();
        report.closure_witness = closure_witness;
        report.dual_checked = true;
    }
    if report.strong_rho_arbitrage && !report.rho_arbitrage {
        return Err(Error::Disagreement(format!("{spec}: strong rho-arbitrage without rho-arbitrage")));
    }
    if report.classical.is_some() && !report.rho_arbitrage {
        return Err(Error::Disagreement(format!("{spec}: classical arbitrage without rho-arbitrage")));
    }
    Ok(report)
}

/// The two mean-risk problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanRhoMode {
    /// `min rho(X_pi)` subject to `E[X_pi] >= nu*`.
    MinRisk(f64),
    /// `max E[X_pi]` subject to `rho(X_pi) <= rho*`.
    MaxReturn(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeanRhoOutcome {
    Solved { nu: f64, rho: f64, portfolio: Option<Portfolio> },
    Unbounded(String),
    Infeasible(String),
}

fn finite_rho(spec: &RiskSpec, m: &Market, nu: f64) -> Result<f64> {
    rho_nu(spec, m, nu)?
        .value
        .finite()
        .ok_or_else(|| Error::Solver(format!("rho_nu not finite at nu = {nu} in a bounded regime")))
}

/// Minimizer of the convex `nu -> rho_nu` on `[lo, inf)` when it grows at
/// infinity.
fn argmin_from(spec: &RiskSpec, m: &Market, lo: f64) -> Result<f64> {
    let mut hi = lo.max(1.0);
    let mut f_hi = finite_rho(spec, m, hi)?;
    loop {
        let f_next = finite_rho(spec, m, 2.0 * hi)?;
        if f_next >= f_hi || hi > 1e12 {
            break;
        }
        hi *= 2.0;
        f_hi = f_next;
    }
    let f = |nu: f64| finite_rho(spec, m, nu).map_or(f64::NEG_INFINITY, |v| -v);
    let (a, fa) = golden_max(&f, lo, 2.0 * hi);
    let f_lo = finite_rho(spec, m, lo)?;
    Ok(if f_lo <= -fa { lo } else { a })
}

/// Solves a mean-risk problem; unbounded whenever the market admits
/// rho-arbitrage.
pub fn mean_rho_solve(spec: &RiskSpec, m: &Market, mode: MeanRhoMode) -> Result<MeanRhoOutcome> {
    spec.validate()?;
    let regime = Regime::of(rho_inf_1(spec, m)?);
    let solved = |nu: f64| -> Result<MeanRhoOutcome> {
        let r = rho_nu(spec, m, nu)?;
        Ok(MeanRhoOutcome::Solved { nu, rho: r.value.to_f64(), portfolio: r.portfolio })
    };
    match mode {
        MeanRhoMode::MinRisk(nu_star) => {
            check_nu(nu_star)?;
            match regime {
                Regime::Negative => Ok(MeanRhoOutcome::Unbounded("rho^inf_1 < 0: risk decreases without bound".into())),
                Regime::Zero => Ok(MeanRhoOutcome::Unbounded("rho^inf_1 = 0: the infimum is not attained".into())),
                _ => solved(argmin_from(spec, m, nu_star)?),
            }
        }
        MeanRhoMode::MaxReturn(rho_star) => {
            if matches!(regime, Regime::Negative | Regime::Zero) {
                return Ok(MeanRhoOutcome::Unbounded(format!("rho^inf_1 <= 0 ({regime}): rho-arbitrage")));
            }
            let nu_min = argmin_from(spec, m, 0.0)?;
            let rho_min = finite_rho(spec, m, nu_min)?;
            if rho_star < rho_min - 1e-12 {
                return Ok(MeanRhoOutcome::Infeasible(format!("rho* = {rho_star} is below rho_min = {rho_min}")));
            }
            let (mut lo, mut hi) = (nu_min, nu_min.max(1.0));
            while finite_rho(spec, m, hi)? <= rho_star {
                lo = hi;
                hi *= 2.0;
                if hi > 1e15 {
                    return Err(Error::Solver("no return level exceeds the risk budget".into()));
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi || hi - lo <= 1e-12 * hi {
                    break;
                }
                if finite_rho(spec, m, mid)? <= rho_star {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            solved(lo)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_market::FiniteSpace;

    fn binomial() -> Market {
        let s = FiniteSpace::new(vec![0.5, 0.5]).unwrap();
        Market::from_excess(&s, 0.0, vec![vec![1.0, -0.5]]).unwrap()
    }

    #[test]
    fn test_binomial_es_boundary() {
        let m = binomial();
        let r = rho_nu(&RiskSpec::es(0.5).unwrap(), &m, 0.25).unwrap();
        assert!((r.value.to_f64() - 0.5).abs() < 1e-12);
        assert_eq!(r.portfolio.unwrap().weights.len(), 1);
        let r0 = rho_nu(&RiskSpec::es(0.5).unwrap(), &m, 0.0).unwrap();
        assert!(r0.value.to_f64().abs() < 1e-12);
    }

    #[test]
    fn test_binomial_regimes() {
        let m = binomial();
        let half = detect_arbitrage(&RiskSpec::es(0.5).unwrap(), &m).unwrap();
        assert!(!half.rho_arbitrage && !half.strong_rho_arbitrage);
        let z = half.interior_witness.unwrap().0;
        assert!((z.values()[1] - 4.0 / 3.0).abs() < 1e-9);
        let tight = detect_arbitrage(&RiskSpec::es(0.8).unwrap(), &m).unwrap();
        assert!(tight.rho_arbitrage && tight.strong_rho_arbitrage && tight.descent_ray.is_some());
        let fr = optimal_boundary(&RiskSpec::es(0.8).unwrap(), &m, 2.0, 5).unwrap();
        assert_eq!(efficient_frontier(&fr), EfficientFrontier::Empty);
        assert_eq!(
            mean_rho_solve(&RiskSpec::es(0.8).unwrap(), &m, MeanRhoMode::MaxReturn(0.1)).unwrap(),
            MeanRhoOutcome::Unbounded("rho^inf_1 <= 0 (NEGATIVE): rho-arbitrage".into())
        );
    }

    #[test]
    fn test_kelley_matches_lp() {
        let s = FiniteSpace::new(vec![0.3, 0.3, 0.4]).unwrap();
        let m = Market::from_excess(&s, 0.0, vec![vec![0.4, -0.2, 0.1], vec![-0.1, 0.3, 0.05]]).unwrap();
        // A profile equal to LSES but not recognized as such goes through
        // the cutting-plane path.
        let g = crate::risk_measures::TargetProfile::new(vec![
            crate::risk_measures::ProfilePiece {
                lo: 0.0,
                hi: 0.5,
                f: crate::risk_measures::ProfileFn::InvAffine { a: -0.5, c: 0.5 },
            },
            crate::risk_measures::ProfilePiece {
                lo: 0.5,
                hi: 1.0,
                f: crate::risk_measures::ProfileFn::InvAffine { a: -0.5, c: 0.5 },
            },
        ])
        .unwrap();
        let a = rho_nu(&RiskSpec::AdjEs { g }, &m, 0.1).unwrap();
        let b = rho_nu(&RiskSpec::lses(0.5).unwrap(), &m, 0.1).unwrap();
        assert!((a.value.to_f64() - b.value.to_f64()).abs() < 1e-6, "{a:?} {b:?}");
    }
}
