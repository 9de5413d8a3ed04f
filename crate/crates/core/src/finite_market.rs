//! Finite probability spaces, random variables and one-period markets.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{dot, rank};
use crate::lp::{LinearProgram, Relation, Sense};

/// Atom probabilities of a finite probability space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    probs: Vec<f64>,
}

impl FiniteSpace {
    pub fn new(probs: Vec<f64>) -> Result<Arc<Self>> {
        if probs.is_empty() {
            return Err(Error::invalid("probability space needs at least one atom"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::invalid(format!("atom probability {p} is not positive")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Arc::new(FiniteSpace { probs }))
    }

    /// `n` equally likely atoms.
    pub fn uniform(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::invalid("probability space needs at least one atom"));
        }
        let mut probs = vec![1.0 / n as f64; n];
        // Push the rounding residue onto the last atom so the sum is exact.
        let head: f64 = probs[..n - 1].iter().sum();
        probs[n - 1] = 1.0 - head;
        FiniteSpace::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn expectation(&self, values: &[f64]) -> f64 {
        dot(&self.probs, values)
    }
}

/// Outcome vector over a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct RandVar {
    space: Arc<FiniteSpace>,
    values: Vec<f64>,
}

impl RandVar {
    pub fn new(space: &Arc<FiniteSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Dimension { expected: space.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("random variable has a non-finite outcome"));
        }
        Ok(RandVar { space: Arc::clone(space), values })
    }

    pub fn constant(space: &Arc<FiniteSpace>, c: f64) -> Self {
        RandVar { space: Arc::clone(space), values: vec![c; space.len()] }
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        self.space.probs()
    }

    pub fn mean(&self) -> f64 {
        self.space.expectation(&self.values)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        RandVar { space: Arc::clone(&self.space), values: self.values.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, lambda: f64) -> Self {
        self.map(|x| lambda * x)
    }

    pub fn shift(&self, c: f64) -> Self {
        self.map(|x| x + c)
    }

    pub fn zip_with(&self, other: &RandVar, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        RandVar {
            space: Arc::clone(&self.space),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// Fractions of wealth held in the risky assets.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    pub weights: Vec<f64>,
}

impl Portfolio {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("portfolio weight is not finite"));
        }
        Ok(Portfolio { weights })
    }

    pub fn zero(d: usize) -> Self {
        Portfolio { weights: vec![0.0; d] }
    }

    /// Fraction held in the riskless asset.
    pub fn riskless_weight(&self) -> f64 {
        1.0 - self.weights.iter().sum::<f64>()
    }
}

/// One-period market with a riskless asset and `d` risky assets.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    space: Arc<FiniteSpace>,
    r: f64,
    /// Excess returns `R^i - r`, one row per asset.
    excess: Vec<Vec<f64>>,
    /// Expected returns `mu^i`.
    mu: Vec<f64>,
    /// Initial prices, `1` when the market was given in return form.
    prices: Vec<f64>,
}

impl Market {
    /// Builds a market from excess returns and validates nonredundancy and
    /// nondegeneracy.
    pub fn from_excess(space: &Arc<FiniteSpace>, r: f64, excess: Vec<Vec<f64>>) -> Result<Self> {
        let d = excess.len();
        Market::with_prices(space, r, excess, vec![1.0; d])
    }

    /// Builds a market from initial prices and terminal payoffs.
    pub fn from_prices(space: &Arc<FiniteSpace>, r: f64, prices: Vec<f64>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if prices.len() != payoffs.len() {
            return Err(Error::Dimension { expected: payoffs.len(), got: prices.len() });
        }
        let mut excess = Vec::with_capacity(prices.len());
        for (s0, pay) in prices.iter().zip(&payoffs) {
            if !(*s0 > 0.0 && s0.is_finite()) {
                return Err(Error::invalid(format!("initial price {s0} is not positive")));
            }
            excess.push(pay.iter().map(|s1| s1 / s0 - 1.0 - r).collect());
        }
        Market::with_prices(space, r, excess, prices)
    }

    pub(crate) fn with_prices(
        space: &Arc<FiniteSpace>,
        r: f64,
        excess: Vec<Vec<f64>>,
        prices: Vec<f64>,
    ) -> Result<Self> {
        if !(r > -1.0 && r.is_finite()) {
            return Err(Error::invalid(format!("riskless rate {r} must exceed -1")));
        }
        if excess.is_empty() {
            return Err(Error::invalid("market needs at least one risky asset"));
        }
        let n = space.len();
        for row in &excess {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("excess return is not finite"));
            }
        }
        // span{1, R^i} = span{1, R^i - r}.
        let mut rows = vec![vec![1.0; n]];
        rows.extend(excess.iter().cloned());
        if rank(&rows, 1e-10) != excess.len() + 1 {
            return Err(Error::invalid("market is redundant: {1, R^1, ..., R^d} are linearly dependent"));
        }
        let mu: Vec<f64> = excess.iter().map(|e| r + space.expectation(e)).collect();
        if mu.iter().all(|m| (m - r).abs() <= 1e-12) {
            return Err(Error::invalid("market is degenerate: every expected return equals r"));
        }
        Ok(Market { space: Arc::clone(space), r, excess, mu, prices })
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.excess.len()
    }

    pub fn atoms(&self) -> usize {
        self.space.len()
    }

    pub fn excess(&self) -> &[Vec<f64>] {
        &self.excess
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    /// `mu - r 1`.
    pub fn mean_excess(&self) -> Vec<f64> {
        self.mu.iter().map(|m| m - self.r).collect()
    }

    /// The market extended by one more asset with price `price` and payoff
    /// `payoff`.
    pub fn augmented(&self, price: f64, payoff: &[f64]) -> Result<Market> {
        if !(price > 0.0) {
            return Err(Error::invalid("augmenting price must be positive"));
        }
        let mut excess = self.excess.clone();
        excess.push(payoff.iter().map(|y| y / price - 1.0 - self.r).collect());
        let mut prices = self.prices.clone();
        prices.push(price);
        Market::with_prices(&self.space, self.r, excess, prices)
    }

    /// Atomwise `X_pi = pi . (R - r 1)` from raw weights.
    pub(crate) fn payoff_of(&self, weights: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.atoms()];
        for (w, row) in weights.iter().zip(&self.excess) {
            if *w != 0.0 {
                for (xi, e) in x.iter_mut().zip(row) {
                    *xi += w * e;
                }
            }
        }
        x
    }
}

/// Excess return `X_pi` of a portfolio.
pub fn excess_return(m: &Market, pi: &Portfolio) -> Result<RandVar> {
    if pi.weights.len() != m.dim() {
        return Err(Error::Dimension { expected: m.dim(), got: pi.weights.len() });
    }
    RandVar::new(m.space(), m.payoff_of(&pi.weights))
}

/// The affine set `Pi_nu = { pi : pi . (mu - r 1) = nu }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub particular: Vec<f64>,
    pub null_basis: Vec<Vec<f64>>,
}

impl Slice {
    /// `particular + sum_k y_k null_basis[k]`.
    pub fn point(&self, y: &[f64]) -> Vec<f64> {
        let mut pi = self.particular.clone();
        for (yk, v) in y.iter().zip(&self.null_basis) {
            for (p, vj) in pi.iter_mut().zip(v) {
                *p += yk * vj;
            }
        }
        pi
    }
}

/// Describes `Pi_nu` by a particular solution and a null-space basis.
///
/// The pivot coordinate is the first whose coefficient is within a factor of
/// ten of the largest, which keeps the basis well conditioned.
pub fn portfolio_slice(m: &Market, nu: f64) -> Slice {
    let c = m.mean_excess();
    let cmax = c.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let k = c.iter().position(|x| x.abs() >= 0.1 * cmax).expect("market is nondegenerate");
    let mut particular = vec![0.0; c.len()];
    particular[k] = nu / c[k];
    let null_basis = (0..c.len())
        .filter(|&j| j != k)
        .map(|j| {
            let mut v = vec![0.0; c.len()];
            v[j] = 1.0;
            v[k] = -c[j] / c[k];
            v
        })
        .collect();
    Slice { particular, null_basis }
}

/// An arbitrage strategy: zero cost, nonnegative payoff, positive somewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ArbitrageWitness {
    /// Fractions of a unit of borrowed wealth put into the risky assets.
    pub pi: Vec<f64>,
    /// Units of the riskless asset (initial price 1) and share holdings.
    pub theta0: f64,
    pub theta: Vec<f64>,
    pub payoff: Vec<f64>,
}

/// Looks for a classical arbitrage by maximizing `E[X_pi]` subject to
/// `X_pi >= 0` and `|pi|_1 <= 1`.
pub fn check_classical_arbitrage(m: &Market) -> Result<Option<ArbitrageWitness>> {
    let d = m.dim();
    let c = m.mean_excess();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let plus: Vec<usize> = (0..d).map(|j| lp.add_nonneg(c[j])).collect();
    let minus: Vec<usize> = (0..d).map(|j| lp.add_nonneg(-c[j])).collect();
    for i in 0..m.atoms() {
        let row: Vec<(usize, f64)> =
            (0..d).flat_map(|j| [(plus[j], m.excess[j][i]), (minus[j], -m.excess[j][i])]).collect();
        lp.add_row(&row, Relation::Ge, 0.0);
    }
    let all: Vec<(usize, f64)> = plus.iter().chain(&minus).map(|&v| (v, 1.0)).collect();
    lp.add_row(&all, Relation::Le, 1.0);
    let sol = lp.solve()?.optimal().ok_or_else(|| Error::Solver("classical arbitrage LP not optimal".into()))?;
    if sol.objective <= 1e-10 {
        return Ok(None);
    }
    let pi: Vec<f64> = (0..d).map(|j| sol.x[plus[j]] - sol.x[minus[j]]).collect();
    let payoff = m.payoff_of(&pi);
    let theta: Vec<f64> = pi.iter().zip(&m.prices).map(|(p, s)| p / s).collect();
    let theta0 = -pi.iter().sum::<f64>();
    Ok(Some(ArbitrageWitness { pi, theta0, theta, payoff }))
}
