//! Dense two-phase primal simplex.
//!
//! Pricing is Dantzig's rule until a run of degenerate pivots is observed,
//! after which the solver switches permanently to Bland's rule, which cannot
//! cycle. On termination the basic solution and the row duals are recomputed
//! from the original data of the final basis.

use crate::error::{Error, Result};
use crate::linalg::solve_in_place;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// A row over structural columns and the user row it came from.
type StdRow = (Vec<(usize, f64)>, Relation, f64, Option<usize>);

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    rel: Relation,
    rhs: f64,
}

/// A linear program over bounded or free variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Sensitivity of the optimal value to each row's right-hand side.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { sense, objective: Vec::new(), lower: Vec::new(), upper: Vec::new(), rows: Vec::new() }
    }

    /// Adds a variable with bounds `[lo, hi]` (infinite bounds allowed) and
    /// objective coefficient `cost`; returns its index.
    pub fn add_var(&mut self, lo: f64, hi: f64, cost: f64) -> usize {
        debug_assert!(lo <= hi);
        self.objective.push(cost);
        self.lower.push(lo);
        self.upper.push(hi);
        self.objective.len() - 1
    }

    pub fn add_free(&mut self, cost: f64) -> usize {
        self.add_var(f64::NEG_INFINITY, f64::INFINITY, cost)
    }

    pub fn add_nonneg(&mut self, cost: f64) -> usize {
        self.add_var(0.0, f64::INFINITY, cost)
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.objective[var] = cost;
    }

    pub fn add_row(&mut self, coeffs: &[(usize, f64)], rel: Relation, rhs: f64) -> usize {
        self.rows.push(Row { coeffs: coeffs.iter().copied().filter(|c| c.1 != 0.0).collect(), rel, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        StandardForm::build(self).solve(self)
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + col
    Shift { col: usize, offset: f64 },
    /// x = offset - col
    Mirror { col: usize, offset: f64 },
    /// x = plus - minus
    Split { plus: usize, minus: usize },
    /// x = value
    Fixed { value: f64 },
}

/// `min c x  s.t.  A x = b, x >= 0` with `b >= 0`.
struct StandardForm {
    ncols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// `(user row, sign)` for each standard row; user rows first.
    origin: Vec<(Option<usize>, f64)>,
    /// Column index of a `+1` slack usable as an initial basic variable.
    slack_basis: Vec<Option<usize>>,
    maps: Vec<VarMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let mut maps = Vec::with_capacity(n);
        let mut ncols = 0;
        for j in 0..n {
            let (lo, hi) = (lp.lower[j], lp.upper[j]);
            let map = if lo == hi {
                VarMap::Fixed { value: lo }
            } else if lo.is_finite() {
                ncols += 1;
                VarMap::Shift { col: ncols - 1, offset: lo }
            } else if hi.is_finite() {
                ncols += 1;
                VarMap::Mirror { col: ncols - 1, offset: hi }
            } else {
                ncols += 2;
                VarMap::Split { plus: ncols - 2, minus: ncols - 1 }
            };
            maps.push(map);
        }
        let sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let mut c = vec![0.0; ncols];
        for (j, map) in maps.iter().enumerate() {
            let cj = sign * lp.objective[j];
            match *map {
                VarMap::Shift { col, .. } => c[col] += cj,
                VarMap::Mirror { col, .. } => c[col] -= cj,
                VarMap::Split { plus, minus } => {
                    c[plus] += cj;
                    c[minus] -= cj;
                }
                VarMap::Fixed { .. } => {}
            }
        }

        // Rows expressed in the structural columns, before slacks.
        let mut rows: Vec<StdRow> = Vec::new();
        for (i, row) in lp.rows.iter().enumerate() {
            let mut coeffs = Vec::with_capacity(row.coeffs.len());
            let mut rhs = row.rhs;
            for &(j, a) in &row.coeffs {
                match maps[j] {
                    VarMap::Shift { col, offset } => {
                        coeffs.push((col, a));
                        rhs -= a * offset;
                    }
                    VarMap::Mirror { col, offset } => {
                        coeffs.push((col, -a));
                        rhs -= a * offset;
                    }
                    VarMap::Split { plus, minus } => {
                        coeffs.push((plus, a));
                        coeffs.push((minus, -a));
                    }
                    VarMap::Fixed { value } => rhs -= a * value,
                }
            }
            rows.push((coeffs, row.rel, rhs, Some(i)));
        }
        for (j, map) in maps.iter().enumerate() {
            if let VarMap::Shift { col, offset } = *map {
                if lp.upper[j].is_finite() {
                    rows.push((vec![(col, 1.0)], Relation::Le, lp.upper[j] - offset, None));
                }
            }
        }

        let nslack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let total = ncols + nslack;
        let m = rows.len();
        let mut a = vec![0.0; m * total];
        let mut b = vec![0.0; m];
        let mut origin = Vec::with_capacity(m);
        let mut slack_basis = vec![None; m];
        let mut next_slack = ncols;
        for (i, (coeffs, rel, rhs, user)) in rows.into_iter().enumerate() {
            let flip = if rhs < 0.0 { -1.0 } else { 1.0 };
            for (col, v) in coeffs {
                a[i * total + col] += flip * v;
            }
            b[i] = flip * rhs;
            let slack_coef = match rel {
                Relation::Le => Some(1.0),
                Relation::Ge => Some(-1.0),
                Relation::Eq => None,
            };
            if let Some(s) = slack_coef {
                a[i * total + next_slack] = flip * s;
                if flip * s > 0.0 {
                    slack_basis[i] = Some(next_slack);
                }
                next_slack += 1;
            }
            origin.push((user, flip));
        }
        c.resize(total, 0.0);
        StandardForm { ncols: total, a, b, c, origin, slack_basis, maps }
    }

    fn solve(&self, lp: &LinearProgram) -> Result<LpOutcome> {
        let m = self.b.len();
        let n = self.ncols;
        let nart = self.slack_basis.iter().filter(|s| s.is_none()).count();
        let width = n + nart;
        let mut t = Tableau {
            m,
            width,
            a: vec![0.0; m * width],
            b: self.b.clone(),
            basis: vec![0; m],
            d: vec![0.0; width],
            active: vec![true; m],
        };
        let mut art = n;
        for i in 0..m {
            t.a[i * width..i * width + n].copy_from_slice(&self.a[i * n..(i + 1) * n]);
            match self.slack_basis[i] {
                Some(s) => t.basis[i] = s,
                None => {
                    t.a[i * width + art] = 1.0;
                    t.basis[i] = art;
                    art += 1;
                }
            }
        }

        if nart > 0 {
            let mut cost = vec![0.0; width];
            for c in cost.iter_mut().skip(n) {
                *c = 1.0;
            }
            t.price(&cost);
            match t.run(width)? {
                Status::Optimal => {}
                Status::Unbounded => return Err(Error::Solver("phase one unbounded".into())),
            }
            let infeas: f64 = (0..m).filter(|&i| t.basis[i] >= n).map(|i| t.b[i]).sum();
            let scale = 1.0 + self.b.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if infeas > 1e-9 * scale {
                return Ok(LpOutcome::Infeasible);
            }
            for i in 0..m {
                if t.basis[i] < n {
                    continue;
                }
                let entering = (0..n)
                    .filter(|&j| t.a[i * width + j].abs() > PIVOT_TOL)
                    .max_by(|&x, &y| t.a[i * width + x].abs().total_cmp(&t.a[i * width + y].abs()));
                match entering {
                    Some(j) => t.pivot(i, j),
                    None => t.active[i] = false,
                }
            }
        }

        let mut cost = vec![0.0; width];
        cost[..n].copy_from_slice(&self.c);
        t.price(&cost);
        match t.run(n)? {
            Status::Optimal => {}
            Status::Unbounded => return Ok(LpOutcome::Unbounded),
        }
        Ok(LpOutcome::Optimal(self.extract(lp, &t)))
    }

    fn extract(&self, lp: &LinearProgram, t: &Tableau) -> LpSolution {
        let n = self.ncols;
        let rows: Vec<usize> = (0..t.m).filter(|&i| t.active[i]).collect();
        let k = rows.len();
        let basis: Vec<usize> = rows.iter().map(|&i| t.basis[i]).collect();
        let mut xs = vec![0.0; n];
        for &i in &rows {
            xs[t.basis[i]] = t.b[i].max(0.0);
        }

        let mut bmat = vec![0.0; k * k];
        for (r, &i) in rows.iter().enumerate() {
            for (cidx, &col) in basis.iter().enumerate() {
                bmat[r * k + cidx] = self.a[i * n + col];
            }
        }
        let mut rhs: Vec<f64> = rows.iter().map(|&i| self.b[i]).collect();
        let mut refined = bmat.clone();
        if solve_in_place(&mut refined, &mut rhs, k, 1e-13).is_some() && rhs.iter().all(|v| *v > -1e-7) {
            for (cidx, &col) in basis.iter().enumerate() {
                xs[col] = rhs[cidx].max(0.0);
            }
        }

        let mut bt = vec![0.0; k * k];
        for r in 0..k {
            for cidx in 0..k {
                bt[cidx * k + r] = bmat[r * k + cidx];
            }
        }
        let mut cb: Vec<f64> = basis.iter().map(|&col| self.c[col]).collect();
        let mut std_duals = vec![0.0; t.m];
        if solve_in_place(&mut bt, &mut cb, k, 1e-13).is_some() {
            for (r, &i) in rows.iter().enumerate() {
                std_duals[i] = cb[r];
            }
        }
        let sense = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let mut duals = vec![0.0; lp.rows.len()];
        for (i, &(user, flip)) in self.origin.iter().enumerate() {
            if let Some(u) = user {
                duals[u] = sense * flip * std_duals[i];
            }
        }

        let x: Vec<f64> = self
            .maps
            .iter()
            .map(|map| match *map {
                VarMap::Shift { col, offset } => offset + xs[col],
                VarMap::Mirror { col, offset } => offset - xs[col],
                VarMap::Split { plus, minus } => xs[plus] - xs[minus],
                VarMap::Fixed { value } => value,
            })
            .collect();
        let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        LpSolution { x, objective, duals }
    }
}

enum Status {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    width: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs.
    d: Vec<f64>,
    active: Vec<bool>,
}

impl Tableau {
    fn price(&mut self, cost: &[f64]) {
        self.d.copy_from_slice(cost);
        for i in 0..self.m {
            if !self.active[i] {
                continue;
            }
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.width..(i + 1) * self.width];
                for (dj, aij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
    }

    /// Runs simplex iterations with entering candidates restricted to
    /// columns `< limit`.
    fn run(&mut self, limit: usize) -> Result<Status> {
        let mut bland = false;
        let mut degenerate = 0;
        for _ in 0..MAX_PIVOTS {
            let entering = if bland {
                (0..limit).find(|&j| self.d[j] < -COST_TOL)
            } else {
                (0..limit).filter(|&j| self.d[j] < -COST_TOL).min_by(|&x, &y| self.d[x].total_cmp(&self.d[y]))
            };
            let Some(j) = entering else {
                return Ok(Status::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if !self.active[i] {
                    continue;
                }
                let aij = self.a[i * self.width + j];
                if aij <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.b[i].max(0.0) / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((i, ratio)) = leave else {
                return Ok(Status::Unbounded);
            };
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(i, j);
        }
        Err(Error::Solver("simplex pivot limit reached".into()))
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for k in 0..w {
            self.a[r * w + k] /= p;
        }
        self.b[r] /= p;
        self.a[r * w + c] = 1.0;
        let pivot_row: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        let br = self.b[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                let row = &mut self.a[i * w..(i + 1) * w];
                for (x, pr) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * pr;
                }
                row[c] = 0.0;
                self.b[i] -= f * br;
            }
        }
        let f = self.d[c];
        if f != 0.0 {
            for (x, pr) in self.d.iter_mut().zip(&pivot_row) {
                *x -= f * pr;
            }
            self.d[c] = 0.0;
        }
        self.basis[r] = c;
    }
}
