//! Dense two-phase simplex with Bland's rule.
//!
//! Problems are stated as maximisations with `<=`, `>=` and `=` rows and per-variable
//! bounds. Bounds are removed by substitution (shift, reflection or splitting of free
//! variables, extra rows for finite upper bounds); each row is then scaled by its
//! largest coefficient before phase one.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::abs;

/// Feasibility tolerance for phase one and constraint checks.
pub const FEAS_TOL: f64 = 1e-8;
/// Pivots smaller than this are refused.
pub const PIVOT_TOL: f64 = 1e-11;
const OPT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200_000;

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

/// `max objective . x` subject to `constraints` and `bounds` (default `[0, inf)`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { objective, constraints: Vec::new(), bounds: vec![(0.0, f64::INFINITY); n] }
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let gap = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => abs(lhs - c.rhs),
            };
            worst = worst.max(gap);
        }
        for (v, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    pub fn solve(&self) -> Result<LpSolution> {
        solve(self)
    }
}

#[derive(Clone, Copy)]
enum VarMap {
    Shift { col: usize, lo: f64 },
    Reflect { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// Solves `lp`; deterministic for identical input.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.variables();
    if n == 0 {
        return Err(Error::InvalidParameter("linear program needs at least one variable"));
    }
    if lp.bounds.len() != n || lp.constraints.iter().any(|c| c.coeffs.len() != n) {
        return Err(Error::Dimension("linear program coefficient length"));
    }
    let infeasible = || LpSolution { status: LpStatus::Infeasible, x: vec![0.0; n], objective_value: 0.0 };
    if lp.bounds.iter().any(|&(lo, hi)| lo > hi || lo.is_nan() || hi.is_nan() || lo == f64::INFINITY) {
        return Ok(infeasible());
    }

    // substitute bounds away
    let mut maps = Vec::with_capacity(n);
    let mut cols = 0usize;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        if lo.is_finite() {
            maps.push(VarMap::Shift { col: cols, lo });
            if hi.is_finite() {
                extra_rows.push((cols, hi - lo));
            }
            cols += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Reflect { col: cols, hi });
            cols += 1;
        } else {
            maps.push(VarMap::Split { pos: cols, neg: cols + 1 });
            cols += 2;
        }
    }
    let translate = |coeffs: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; cols];
        let mut rhs = rhs;
        for (a, map) in coeffs.iter().zip(&maps) {
            match *map {
                VarMap::Shift { col, lo } => {
                    out[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Reflect { col, hi } => {
                    out[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += a;
                    out[neg] -= a;
                }
            }
        }
        (out, rhs)
    };

    let mut rows: Vec<Row> = Vec::new();
    for c in &lp.constraints {
        let (coeffs, rhs) = translate(&c.coeffs, c.rhs);
        rows.push(Row { coeffs, relation: c.relation, rhs });
    }
    for &(col, width) in &extra_rows {
        let mut coeffs = vec![0.0; cols];
        coeffs[col] = 1.0;
        rows.push(Row { coeffs, relation: Relation::Le, rhs: width });
    }
    let (cost, _) = translate(&lp.objective, 0.0);

    // scale, drop empty rows, make rhs non-negative
    let mut kept = Vec::with_capacity(rows.len());
    for mut row in rows {
        let scale = row.coeffs.iter().fold(0.0f64, |m, a| m.max(abs(*a)));
        if scale == 0.0 {
            let ok = match row.relation {
                Relation::Le => row.rhs >= -FEAS_TOL,
                Relation::Ge => row.rhs <= FEAS_TOL,
                Relation::Eq => abs(row.rhs) <= FEAS_TOL,
            };
            if !ok {
                return Ok(infeasible());
            }
            continue;
        }
        row.coeffs.iter_mut().for_each(|a| *a /= scale);
        row.rhs /= scale;
        if row.rhs < 0.0 {
            row.coeffs.iter_mut().for_each(|a| *a = -*a);
            row.rhs = -row.rhs;
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        kept.push(row);
    }
    let rows = kept;
    let m = rows.len();

    // column layout: structural | slack/surplus | artificial
    let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let width = cols + n_slack + n_art;
    let mut tab = Tableau { m, width, data: vec![0.0; m * (width + 1)], basis: vec![0; m] };
    let mut is_art = vec![false; width];
    let (mut s_idx, mut a_idx) = (cols, cols + n_slack);
    for (i, row) in rows.iter().enumerate() {
        tab.data[i * (width + 1)..i * (width + 1) + cols].copy_from_slice(&row.coeffs);
        *tab.at(i, width) = row.rhs;
        match row.relation {
            Relation::Le => {
                *tab.at(i, s_idx) = 1.0;
                tab.basis[i] = s_idx;
                s_idx += 1;
            }
            Relation::Ge => {
                *tab.at(i, s_idx) = -1.0;
                s_idx += 1;
                *tab.at(i, a_idx) = 1.0;
                is_art[a_idx] = true;
                tab.basis[i] = a_idx;
                a_idx += 1;
            }
            Relation::Eq => {
                *tab.at(i, a_idx) = 1.0;
                is_art[a_idx] = true;
                tab.basis[i] = a_idx;
                a_idx += 1;
            }
        }
    }

    if n_art > 0 {
        let phase1: Vec<f64> = (0..width).map(|j| if is_art[j] { -1.0 } else { 0.0 }).collect();
        let allowed = vec![true; width];
        match tab.optimize(&phase1, &allowed)? {
            Outcome::Optimal => {}
            Outcome::Unbounded => return Err(Error::NumericalFailure("phase one unbounded")),
        }
        let infeas: f64 = (0..m).filter(|&i| is_art[tab.basis[i]]).map(|i| tab.rhs(i)).sum();
        if infeas > FEAS_TOL {
            return Ok(infeasible());
        }
        // drive remaining artificials out of the basis
        for i in 0..m {
            if !is_art[tab.basis[i]] {
                continue;
            }
            let col = (0..width).find(|&j| !is_art[j] && abs(tab.get(i, j)) > 1e-9);
            match col {
                Some(j) => tab.pivot(i, j),
                None => {
                    for j in 0..=width {
                        if j != tab.basis[i] {
                            *tab.at(i, j) = 0.0;
                        }
                    }
                }
            }
        }
    }

    let mut phase2 = vec![0.0; width];
    phase2[..cols].copy_from_slice(&cost);
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    if let Outcome::Unbounded = tab.optimize(&phase2, &allowed)? {
        return Ok(LpSolution { status: LpStatus::Unbounded, x: vec![0.0; n], objective_value: f64::INFINITY });
    }

    let mut xs = vec![0.0; cols];
    for i in 0..m {
        if tab.basis[i] < cols {
            xs[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, lo } => lo + xs[col],
            VarMap::Reflect { col, hi } => hi - xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        })
        .collect();
    let objective_value = lp.objective_at(&x);
    Ok(LpSolution { status: LpStatus::Optimal, x, objective_value })
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * (self.width + 1) + j]
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.width + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.get(i, self.width)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let stride = self.width + 1;
        let p = self.get(r, e);
        for j in 0..stride {
            self.data[r * stride + j] /= p;
        }
        self.data[r * stride + e] = 1.0;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.get(i, e);
            if f == 0.0 {
                continue;
            }
            for j in 0..stride {
                let delta = f * self.data[r * stride + j];
                self.data[i * stride + j] -= delta;
            }
            self.data[i * stride + e] = 0.0;
            let b = &mut self.data[i * stride + self.width];
            if *b < 0.0 && *b > -FEAS_TOL {
                *b = 0.0;
            }
        }
        self.basis[r] = e;
    }

    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<Outcome> {
        let mut in_basis = vec![false; self.width];
        for &b in &self.basis {
            in_basis[b] = true;
        }
        for _ in 0..MAX_ITERATIONS {
            // Bland: lowest-index improving column
            let mut entering = None;
            for j in 0..self.width {
                if !allowed[j] || in_basis[j] {
                    continue;
                }
                let mut z = cost[j];
                for i in 0..self.m {
                    z -= cost[self.basis[i]] * self.get(i, j);
                }
                if z > OPT_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            let mut tiny_positive = false;
            for i in 0..self.m {
                let a = self.get(i, e);
                if a <= PIVOT_TOL {
                    if a > 0.0 {
                        tiny_positive = true;
                    }
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = abs(ratio - best) <= 1e-12 * (1.0 + best);
                        if (tie && self.basis[i] < self.basis[k]) || (!tie && ratio < best) {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                if tiny_positive {
                    return Err(Error::NumericalFailure("pivot below threshold"));
                }
                return Ok(Outcome::Unbounded);
            };
            in_basis[self.basis[r]] = false;
            in_basis[e] = true;
            self.pivot(r, e);
        }
        Err(Error::NumericalFailure("iteration limit"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_maximum() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0, 0.0], Relation::Le, 1.0);
        lp.add_constraint(vec![0.0, 1.0], Relation::Le, 1.0);
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, -1.0);
        lp.add_constraint(vec![1.0], Relation::Ge, 0.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn margin_lp_for_convict() {
        // variables eta0, eta1, t
        let mut lp = LinearProgram::new(vec![0.0, 0.0, 1.0]);
        lp.set_free(2);
        lp.add_constraint(vec![1.0, 1.0, 0.0], Relation::Eq, 1.0);
        lp.add_constraint(vec![-1.0, 1.0, -1.0], Relation::Ge, 0.0);
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-12);
        assert!(sol.x[0].abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.add_constraint(vec![-1.0, 1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn bounded_and_free_variables() {
        // max x - y, x in [-2, 3], y in (-inf, 5] with x + y = 1
        let mut lp = LinearProgram::new(vec![1.0, -1.0]);
        lp.set_bounds(0, -2.0, 3.0).set_bounds(1, f64::NEG_INFINITY, 5.0);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        let sol = lp.solve().unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-12 && (sol.x[1] + 2.0).abs() < 1e-12);
        assert!((sol.objective_value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add_constraint(vec![2.0, 2.0], Relation::Eq, 2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under the textbook largest-coefficient rule
        let mut lp = LinearProgram::new(vec![0.75, -150.0, 0.02, -6.0]);
        lp.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 0.05).abs() < 1e-9);
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(lp.solve(), Err(Error::Dimension(_))));
    }
}
