//! Loss functions for expected weighted loss, shortfall risk and OCE.

use crate::error::{Error, Result};

/// Continuous convex piecewise-linear loss with `l(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pwl {
    breaks: Vec<f64>,
    /// `slopes[k]` applies left of `breaks[k]`; the last applies right of
    /// the last breakpoint.
    slopes: Vec<f64>,
    values: Vec<f64>,
}

impl Pwl {
    /// Builds the loss from its leftmost slope and `(breakpoint, slope to the
    /// right)` pairs; values are fixed by `l(0) = 0`.
    pub fn from_slopes(first_slope: f64, pairs: &[(f64, f64)]) -> Result<Self> {
        let breaks: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let mut slopes = vec![first_slope];
        slopes.extend(pairs.iter().map(|p| p.1));
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("loss breakpoints must be strictly increasing"));
        }
        // Value at 0 by integrating slopes from the segment containing 0.
        let seg0 = breaks.iter().take_while(|&&x| x <= 0.0).count();
        let mut values = vec![0.0; breaks.len()];
        // Walk right from 0.
        let mut prev_x = 0.0;
        let mut prev_v = 0.0;
        for k in seg0..breaks.len() {
            prev_v += slopes[k] * (breaks[k] - prev_x);
            prev_x = breaks[k];
            values[k] = prev_v;
        }
        // Walk left from 0.
        let mut prev_x = 0.0;
        let mut prev_v = 0.0;
        for k in (0..seg0).rev() {
            prev_v -= slopes[k + 1] * (prev_x - breaks[k]);
            prev_x = breaks[k];
            values[k] = prev_v;
        }
        Pwl::new(breaks, slopes, values)
    }

    /// Builds the loss from breakpoints, slopes and values at breakpoints,
    /// checking continuity and the loss-function axioms.
    pub fn new(breaks: Vec<f64>, slopes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if slopes.len() != breaks.len() + 1 || values.len() != breaks.len() {
            return Err(Error::invalid("loss needs one more slope than breakpoints"));
        }
        if breaks.iter().chain(&slopes).chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("loss parameters must be finite"));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("loss breakpoints must be strictly increasing"));
        }
        for k in 1..breaks.len() {
            let expect = values[k - 1] + slopes[k] * (breaks[k] - breaks[k - 1]);
            if (expect - values[k]).abs() > 1e-10 * (1.0 + values[k].abs()) {
                return Err(Error::invalid("loss is not continuous"));
            }
        }
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("loss is not convex"));
        }
        if slopes[0] < 0.0 {
            return Err(Error::invalid("loss is not nondecreasing"));
        }
        let l = Pwl { breaks, slopes, values };
        if l.eval(0.0).abs() > 1e-12 {
            return Err(Error::invalid("loss must satisfy l(0) = 0"));
        }
        let (a, b) = (l.slopes[0], *l.slopes.last().unwrap());
        if a > 1.0 || b < 1.0 || l.breaks.iter().zip(&l.values).any(|(x, v)| *v < x - 1e-12) {
            return Err(Error::invalid("loss must satisfy l(x) >= x"));
        }
        Ok(l)
    }

    /// `l(x) = x^+ / alpha`, whose OCE is ES at level `alpha`.
    pub fn cvar(alpha: f64) -> Result<Self> {
        Pwl::from_slopes(0.0, &[(0.0, 1.0 / alpha)])
    }

    /// `l(x) = x`.
    pub fn identity() -> Self {
        Pwl { breaks: vec![], slopes: vec![1.0], values: vec![] }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.segment(x);
        if k == 0 {
            match self.breaks.first() {
                Some(&b0) => self.values[0] + self.slopes[0] * (x - b0),
                None => self.slopes[0] * x,
            }
        } else {
            self.values[k - 1] + self.slopes[k] * (x - self.breaks[k - 1])
        }
    }

    /// Affine pieces `(slope, intercept)` whose maximum is `l`.
    pub fn affine_pieces(&self) -> Vec<(f64, f64)> {
        if self.breaks.is_empty() {
            return vec![(self.slopes[0], 0.0)];
        }
        let mut out = Vec::with_capacity(self.slopes.len());
        for (k, &s) in self.slopes.iter().enumerate() {
            let (x, v) =
                if k == 0 { (self.breaks[0], self.values[0]) } else { (self.breaks[k - 1], self.values[k - 1]) };
            out.push((s, v - s * x));
        }
        out
    }

    /// Points `x_k` at which `l*` is attained: the breakpoints and `0`.
    fn conjugate_support(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.breaks.iter().copied().zip(self.values.iter().copied()).collect();
        pts.push((0.0, 0.0));
        pts
    }
}

/// A loss function `l`: nondecreasing, convex, `l(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum LossFunction {
    Piecewise(Pwl),
    /// `e^x - 1`.
    Exp,
    /// `c x^gamma` on `x > 0`, zero otherwise.
    Power {
        c: f64,
        gamma: f64,
    },
}

impl LossFunction {
    pub fn power(c: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::invalid("power loss needs c > 0 and gamma >= 1"));
        }
        Ok(LossFunction::Power { c, gamma })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LossFunction::Piecewise(p) => p.eval(x),
            LossFunction::Exp => x.exp_m1(),
            LossFunction::Power { c, gamma } => {
                if x > 0.0 {
                    c * x.powf(*gamma)
                } else {
                    0.0
                }
            }
        }
    }

    /// Right derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            LossFunction::Piecewise(p) => p.slopes[p.segment(x)],
            LossFunction::Exp => x.exp(),
            LossFunction::Power { c, gamma } => {
                if x > 0.0 || (x == 0.0 && *gamma == 1.0) {
                    c * gamma * x.max(0.0).powf(gamma - 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Left derivative.
    pub fn left_derivative(&self, x: f64) -> f64 {
        match self {
            LossFunction::Piecewise(p) => p.slopes[p.breaks.partition_point(|&b| b < x)],
            LossFunction::Exp => x.exp(),
            LossFunction::Power { c, gamma } => {
                if x > 0.0 {
                    c * gamma * x.powf(gamma - 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Left asymptotic slope `a_l`.
    pub fn left_slope(&self) -> f64 {
        match self {
            LossFunction::Piecewise(p) => p.slopes[0],
            LossFunction::Exp | LossFunction::Power { .. } => 0.0,
        }
    }

    /// Right asymptotic slope `b_l`, possibly infinite.
    pub fn right_slope(&self) -> f64 {
        match self {
            LossFunction::Piecewise(p) => *p.slopes.last().unwrap(),
            LossFunction::Exp => f64::INFINITY,
            LossFunction::Power { c, gamma } => {
                if *gamma == 1.0 {
                    *c
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Convex conjugate `l*(z) = sup_x { z x - l(x) }`.
    pub fn conjugate(&self, z: f64) -> f64 {
        match self {
            LossFunction::Piecewise(p) => {
                let (a, b) = (p.slopes[0], *p.slopes.last().unwrap());
                let tol = 1e-12 * (1.0 + z.abs());
                if z < a - tol || z > b + tol {
                    return f64::INFINITY;
                }
                p.conjugate_support().iter().map(|(x, v)| x * z - v).fold(f64::NEG_INFINITY, f64::max)
            }
            LossFunction::Exp => {
                if z < 0.0 {
                    f64::INFINITY
                } else if z == 0.0 {
                    1.0
                } else {
                    z * z.ln() - z + 1.0
                }
            }
            LossFunction::Power { c, gamma } => {
                if z < 0.0 {
                    f64::INFINITY
                } else if *gamma == 1.0 {
                    if z <= c * (1.0 + 1e-12) {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    let x = (z / (c * gamma)).powf(1.0 / (gamma - 1.0));
                    x * z * (gamma - 1.0) / gamma
                }
            }
        }
    }

    /// Recession function `l^inf(x) = lim l(t x) / t`.
    pub fn recession(&self, x: f64) -> f64 {
        if x > 0.0 {
            let b = self.right_slope();
            if b.is_infinite() {
                f64::INFINITY
            } else {
                b * x
            }
        } else {
            self.left_slope() * x
        }
    }

    /// Whether `l` vanishes on the negative half-line.
    pub fn vanishes_on_negatives(&self) -> bool {
        match self {
            LossFunction::Piecewise(p) => {
                // Left derivative at 0 is the slope of the segment ending at 0.
                let k = p.breaks.partition_point(|&b| b < 0.0);
                p.slopes[k] == 0.0
            }
            LossFunction::Exp => false,
            LossFunction::Power { .. } => true,
        }
    }

    /// Whether `l(x) >= x` holds everywhere.
    pub fn dominates_identity(&self) -> bool {
        match self {
            LossFunction::Piecewise(_) | LossFunction::Exp => true,
            LossFunction::Power { c, gamma } => *gamma == 1.0 && *c >= 1.0,
        }
    }

    /// Whether `l` is the identity on a half-line, in which case OCE
    /// collapses to the expected loss in that direction.
    pub fn is_identity(&self) -> bool {
        matches!(self, LossFunction::Piecewise(p) if p.slopes.iter().all(|s| *s == 1.0))
    }

    /// Whether `l(t x) = t l(x)` for `t > 0`.
    pub fn is_positively_homogeneous(&self) -> bool {
        match self {
            LossFunction::Piecewise(p) => p.breaks.iter().all(|b| *b == 0.0),
            LossFunction::Exp => false,
            LossFunction::Power { gamma, .. } => *gamma == 1.0,
        }
    }
}
