//! Small dense linear programs: two-phase tableau simplex.
//!
//! Instances are tiny (tens of variables, at most a few thousand rows), so a
//! dense tableau is used throughout. Pivoting follows Dantzig's rule and drops
//! to Bland's rule after a run of degenerate pivots, which rules out cycling.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-8;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective·x` subject to linear constraints and optional lower
/// bounds. A variable without a lower bound is free.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Empty unless `status` is `Optimal`.
    pub solution: Vec<f64>,
    pub objective: f64,
}

impl LpInstance {
    /// All variables start nonnegative with a zero objective.
    pub fn new(num_vars: usize) -> Self {
        LpInstance {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            lower_bounds: vec![Some(0.0); num_vars],
        }
    }

    pub fn minimize(&mut self, objective: Vec<f64>) -> &mut Self {
        self.objective = objective;
        self
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn set_lower_bound(&mut self, var: usize, bound: Option<f64>) -> &mut Self {
        self.lower_bounds[var] = bound;
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_lower_bound(var, None)
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.lower_bounds.len() != self.num_vars {
            return Err(Error::Lp(format!(
                "objective/bounds length does not match {} variables",
                self.num_vars
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(Error::Lp(format!(
                    "constraint {i} has {} coefficients, expected {}",
                    c.coeffs.len(),
                    self.num_vars
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::Lp(format!("constraint {i} has non-finite entries")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Lp("non-finite objective coefficient".into()));
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any constraint or bound at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs = dot(&c.coeffs, x);
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (xi, lb) in x.iter().zip(&self.lower_bounds) {
            if let Some(l) = lb {
                worst = worst.max(l - xi);
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How an original variable maps onto nonnegative tableau columns.
#[derive(Clone, Copy)]
enum ColumnMap {
    Shifted { col: usize, offset: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
    /// Columns allowed to enter the basis.
    enterable: Vec<bool>,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64], cost_rhs: &mut f64) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                let row = &mut self.rows[i];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                if self.rhs[i].abs() < 1e-13 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            cost[c] = 0.0;
            *cost_rhs -= f * pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Minimizes the objective whose reduced costs are in `cost`
    /// (`cost_rhs` holds minus the current objective value).
    fn run(&mut self, cost: &mut [f64], cost_rhs: &mut f64, max_iter: usize) -> Result<PhaseOutcome> {
        let mut degenerate_run = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate_run >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -COST_TOL;
            for (j, &cj) in cost.iter().enumerate().take(self.ncols) {
                if !self.enterable[j] || cj >= -COST_TOL {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                if cj < best {
                    best = cj;
                    entering = Some(j);
                }
            }
            let Some(c) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            let mut leaving: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    let better = match leaving {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leaving = Some(i);
                    }
                }
            }
            let Some(r) = leaving else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if best_ratio <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c, cost, cost_rhs);
        }
        Err(Error::Lp(format!("simplex iteration limit {max_iter} reached")))
    }
}

/// Solves `lp` exactly up to floating-point tolerance.
pub fn solve_lp(lp: &LpInstance) -> Result<LpResult> {
    lp.validate()?;
    let n = lp.num_vars;

    // Variable substitution onto nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    for lb in &lp.lower_bounds {
        match lb {
            Some(l) => {
                maps.push(ColumnMap::Shifted { col: ncols, offset: *l });
                ncols += 1;
            }
            None => {
                maps.push(ColumnMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }
    let structural = ncols;

    // Rows in terms of structural columns, with rhs made nonnegative.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(lp.constraints.len());
    for c in &lp.constraints {
        let mut row = vec![0.0; structural];
        let mut rhs = c.rhs;
        for (j, &a) in c.coeffs.iter().enumerate() {
            match maps[j] {
                ColumnMap::Shifted { col, offset } => {
                    row[col] += a;
                    rhs -= a * offset;
                }
                ColumnMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        let mut rel = c.relation;
        if rhs < 0.0 {
            rhs = -rhs;
            row.iter_mut().for_each(|v| *v = -*v);
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push((row, rel, rhs));
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let total = structural + n_slack + n_art;
    let art_start = structural + n_slack;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols: total,
        enterable: vec![true; total],
    };
    let mut slack = structural;
    let mut art = art_start;
    for (row, rel, rhs) in rows {
        let mut full = row;
        full.resize(total, 0.0);
        match rel {
            Relation::Le => {
                full[slack] = 1.0;
                tab.basis.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                full[slack] = -1.0;
                slack += 1;
                full[art] = 1.0;
                tab.basis.push(art);
                art += 1;
            }
            Relation::Eq => {
                full[art] = 1.0;
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(full);
        tab.rhs.push(rhs);
    }

    let max_iter = 50_000 + 50 * (m + total);

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        let mut cost = vec![0.0; total];
        for c in cost.iter_mut().skip(art_start) {
            *c = 1.0;
        }
        let mut cost_rhs = 0.0;
        for i in 0..m {
            if tab.basis[i] >= art_start {
                for (cj, v) in cost.iter_mut().zip(&tab.rows[i]) {
                    *cj -= v;
                }
                cost_rhs -= tab.rhs[i];
            }
        }
        match tab.run(&mut cost, &mut cost_rhs, max_iter)? {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded => return Err(Error::Lp("phase one reported unbounded".into())),
        }
        let scale = 1.0 + tab.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let infeasibility: f64 = (0..m).filter(|&i| tab.basis[i] >= art_start).map(|i| tab.rhs[i]).sum();
        if infeasibility > FEAS_TOL * scale {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                solution: Vec::new(),
                objective: f64::NAN,
            });
        }
        // Drive remaining artificials out of the basis; rows where this is
        // impossible are redundant and keep a zero-valued artificial.
        for i in 0..m {
            if tab.basis[i] >= art_start {
                let col = (0..art_start).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL);
                if let Some(j) = col {
                    let mut dummy = vec![0.0; total];
                    let mut dummy_rhs = 0.0;
                    tab.pivot(i, j, &mut dummy, &mut dummy_rhs);
                }
            }
        }
        for j in art_start..total {
            tab.enterable[j] = false;
        }
    }

    // Phase 2.
    let mut base_cost = vec![0.0; total];
    for (j, &cj) in lp.objective.iter().enumerate() {
        match maps[j] {
            ColumnMap::Shifted { col, .. } => base_cost[col] += cj,
            ColumnMap::Split { pos, neg } => {
                base_cost[pos] += cj;
                base_cost[neg] -= cj;
            }
        }
    }
    let mut cost = base_cost.clone();
    let mut cost_rhs = 0.0;
    for i in 0..m {
        let cb = base_cost[tab.basis[i]];
        if cb != 0.0 {
            for (cj, v) in cost.iter_mut().zip(&tab.rows[i]) {
                *cj -= cb * v;
            }
            cost_rhs -= cb * tab.rhs[i];
        }
    }
    match tab.run(&mut cost, &mut cost_rhs, max_iter)? {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded => {
            return Ok(LpResult {
                status: LpStatus::Unbounded,
                solution: Vec::new(),
                objective: f64::NEG_INFINITY,
            })
        }
    }

    let mut y = vec![0.0; total];
    for i in 0..m {
        y[tab.basis[i]] = tab.rhs[i];
    }
    let solution: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            ColumnMap::Shifted { col, offset } => offset + y[col],
            ColumnMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = lp.objective_value(&solution);
    Ok(LpResult {
        status: LpStatus::Optimal,
        solution,
        objective,
    })
}
