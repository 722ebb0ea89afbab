//! Exact linear programming over the rationals.
//!
//! Two-phase revised simplex with a dense basis inverse and Bland's
//! smallest-index rule, so degenerate programs cannot cycle. All variables
//! are nonnegative and the objective is maximized. Constraint coefficients
//! are machine integers (every program built in this crate has integer
//! matrices); right-hand sides are arbitrary rationals.
//!
//! Pricing is filtered in floating point: only columns whose approximate
//! reduced cost is not clearly negative are re-checked exactly, and the
//! exact check alone decides entry, so the pivot sequence is identical to
//! pure exact Bland pricing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective·x` subject to the rows and `x ≥ 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<i64>,
    rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value (present iff optimal).
    pub value: Option<Rational>,
    /// Primal vertex solution, one entry per structural variable.
    pub x: Vec<Rational>,
    /// Dual multipliers, one per row, in the caller's row orientation.
    pub duals: Vec<Rational>,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn set_objective(&mut self, var: usize, coeff: i64) {
        self.objective[var] = coeff;
    }

    /// Adds a row; duplicate variable entries are summed and zeros dropped.
    pub fn add_row(&mut self, coeffs: Vec<(usize, i64)>, relation: Relation, rhs: Rational) {
        let mut dense: std::collections::BTreeMap<usize, i64> = Default::default();
        for (j, a) in coeffs {
            assert!(j < self.num_vars, "variable {j} out of range");
            *dense.entry(j).or_insert(0) += a;
        }
        self.rows.push(Row {
            coeffs: dense.into_iter().filter(|&(_, a)| a != 0).collect(),
            relation,
            rhs,
        });
    }

    pub fn solve(&self, max_iterations: usize) -> Result<LpSolution> {
        Simplex::build(self).run(max_iterations)
    }

    /// Exact feasibility check of a candidate point (used by tests and
    /// certificate verification).
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|row| {
                let lhs: Rational = row
                    .coeffs
                    .iter()
                    .map(|&(j, a)| x[j].clone() * Rational::from_i64(a))
                    .sum();
                match row.relation {
                    Relation::Le => lhs <= row.rhs,
                    Relation::Ge => lhs >= row.rhs,
                    Relation::Eq => lhs == row.rhs,
                }
            })
    }

    /// Checks that `duals` is feasible for the dual program (sign
    /// conditions per row and `yᵀA ≥ c` per column) and, if so, returns the
    /// upper bound `b·y` it proves on the optimum.
    pub fn dual_bound(&self, duals: &[Rational]) -> Option<Rational> {
        if duals.len() != self.rows.len() {
            return None;
        }
        let signs_ok = self.rows.iter().zip(duals).all(|(row, y)| match row.relation {
            Relation::Le => !y.is_negative(),
            Relation::Ge => !y.is_positive(),
            Relation::Eq => true,
        });
        if !signs_ok {
            return None;
        }
        let mut reduced: Vec<Rational> = vec![Rational::zero(); self.num_vars];
        for (row, y) in self.rows.iter().zip(duals) {
            for &(j, a) in &row.coeffs {
                reduced[j] += y.clone() * Rational::from_i64(a);
            }
        }
        let covers = reduced
            .iter()
            .zip(&self.objective)
            .all(|(v, &c)| *v >= Rational::from_i64(c));
        covers.then(|| {
            self.rows
                .iter()
                .zip(duals)
                .map(|(row, y)| row.rhs.clone() * y.clone())
                .sum()
        })
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .map(|(&c, v)| v.clone() * Rational::from_i64(c))
            .sum()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Simplex {
    m: usize,
    num_structural: usize,
    /// Sparse columns `(row, coefficient)`.
    columns: Vec<Vec<(usize, i64)>>,
    kinds: Vec<Kind>,
    objective: Vec<i64>,
    negated: Vec<bool>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
    iterations: usize,
}

enum Phase {
    Feasibility,
    Optimality,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let mut columns: Vec<Vec<(usize, i64)>> = vec![Vec::new(); lp.num_vars];
        let mut kinds = vec![Kind::Structural; lp.num_vars];
        let mut negated = vec![false; m];
        let mut rhs = Vec::with_capacity(m);
        let mut basis = vec![usize::MAX; m];
        for (i, row) in lp.rows.iter().enumerate() {
            let flip = row.rhs.is_negative();
            negated[i] = flip;
            let sign = if flip { -1 } else { 1 };
            for &(j, a) in &row.coeffs {
                columns[j].push((i, sign * a));
            }
            rhs.push(if flip { -row.rhs.clone() } else { row.rhs.clone() });
            let relation = if flip { row.relation.flipped() } else { row.relation };
            match relation {
                Relation::Le => {
                    basis[i] = columns.len();
                    columns.push(vec![(i, 1)]);
                    kinds.push(Kind::Slack);
                }
                Relation::Ge => {
                    columns.push(vec![(i, -1)]);
                    kinds.push(Kind::Slack);
                    basis[i] = columns.len();
                    columns.push(vec![(i, 1)]);
                    kinds.push(Kind::Artificial);
                }
                Relation::Eq => {
                    basis[i] = columns.len();
                    columns.push(vec![(i, 1)]);
                    kinds.push(Kind::Artificial);
                }
            }
        }
        let mut is_basic = vec![false; columns.len()];
        for &b in &basis {
            is_basic[b] = true;
        }
        let binv = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| if i == k { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        let mut objective = lp.objective.clone();
        objective.resize(columns.len(), 0);
        Simplex {
            m,
            num_structural: lp.num_vars,
            xb: rhs.clone(),
            columns,
            kinds,
            objective,
            negated,
            rhs,
            basis,
            is_basic,
            binv,
            iterations: 0,
        }
    }

    fn cost(&self, phase: &Phase, j: usize) -> i64 {
        match phase {
            Phase::Feasibility => -((self.kinds[j] == Kind::Artificial) as i64),
            Phase::Optimality => self.objective[j],
        }
    }

    fn duals(&self, phase: &Phase) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.m];
        for (i, &b) in self.basis.iter().enumerate() {
            let c = self.cost(phase, b);
            if c == 0 {
                continue;
            }
            let c = Rational::from_i64(c);
            for (k, yk) in y.iter_mut().enumerate() {
                if !self.binv[i][k].is_zero() {
                    *yk += c.clone() * self.binv[i][k].clone();
                }
            }
        }
        y
    }

    /// Smallest-index column with exactly positive reduced cost.
    fn entering(&self, phase: &Phase) -> Option<usize> {
        let y = self.duals(phase);
        let denom = y
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled: Vec<BigInt> = y
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        let yf: Vec<f64> = y.iter().map(Scalar::to_f64).collect();
        for j in 0..self.columns.len() {
            if self.is_basic[j] {
                continue;
            }
            if matches!(phase, Phase::Optimality) && self.kinds[j] == Kind::Artificial {
                continue;
            }
            let c = self.cost(phase, j);
            let mut approx = c as f64;
            let mut magnitude = 0.0;
            for &(r, a) in &self.columns[j] {
                let term = yf[r] * a as f64;
                approx -= term;
                magnitude += term.abs();
            }
            if approx < -(1e-9 + 1e-12 * (magnitude + (c as f64).abs())) {
                continue;
            }
            let mut exact = BigInt::from(c) * &denom;
            for &(r, a) in &self.columns[j] {
                if !scaled[r].is_zero() {
                    exact -= &scaled[r] * a;
                }
            }
            if exact.is_positive() {
                return Some(j);
            }
        }
        None
    }

    fn direction(&self, j: usize) -> Vec<Rational> {
        (0..self.m)
            .map(|i| {
                let mut acc = Rational::zero();
                for &(r, a) in &self.columns[j] {
                    if !self.binv[i][r].is_zero() {
                        acc += self.binv[i][r].clone() * Rational::from_i64(a);
                    }
                }
                acc
            })
            .collect()
    }

    fn pivot(&mut self, row: usize, j: usize, u: &[Rational]) {
        let p = u[row].clone();
        for v in self.binv[row].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
        self.xb[row] = self.xb[row].clone() / p;
        let pivot_row = self.binv[row].clone();
        let pivot_x = self.xb[row].clone();
        for i in 0..self.m {
            if i == row || u[i].is_zero() {
                continue;
            }
            let f = u[i].clone();
            for (v, pr) in self.binv[i].iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *v -= f.clone() * pr.clone();
                }
            }
            self.xb[i] -= f * pivot_x.clone();
        }
        self.is_basic[self.basis[row]] = false;
        self.is_basic[j] = true;
        self.basis[row] = j;
        self.iterations += 1;
    }

    fn optimize(&mut self, phase: Phase, cap: usize) -> Result<Outcome> {
        loop {
            let Some(j) = self.entering(&phase) else {
                return Ok(Outcome::Optimal);
            };
            if self.iterations >= cap {
                return Err(Error::resource("simplex iteration count", cap));
            }
            let u = self.direction(j);
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                if !u[i].is_positive() {
                    continue;
                }
                let ratio = self.xb[i].clone() / u[i].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Ok(Outcome::Unbounded),
                Some((row, _)) => self.pivot(row, j, &u),
            }
        }
    }

    /// Pivot zero-level artificials out of the basis where possible; those
    /// left belong to redundant rows and stay pinned at zero.
    fn expel_artificials(&mut self) {
        for row in 0..self.m {
            if self.kinds[self.basis[row]] != Kind::Artificial {
                continue;
            }
            let replacement = (0..self.columns.len()).find(|&j| {
                !self.is_basic[j]
                    && self.kinds[j] != Kind::Artificial
                    && self.columns[j].iter().any(|&(r, _)| !self.binv[row][r].is_zero())
                    && {
                        let mut acc = Rational::zero();
                        for &(r, a) in &self.columns[j] {
                            acc += self.binv[row][r].clone() * Rational::from_i64(a);
                        }
                        !acc.is_zero()
                    }
            });
            if let Some(j) = replacement {
                let u = self.direction(j);
                self.pivot(row, j, &u);
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.num_structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_structural {
                x[b] = self.xb[i].clone();
            }
        }
        x
    }

    fn run(mut self, cap: usize) -> Result<LpSolution> {
        let has_artificials = self.kinds.contains(&Kind::Artificial);
        if has_artificials {
            self.optimize(Phase::Feasibility, cap)?;
            let infeasibility: Rational = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&b, _)| self.kinds[b] == Kind::Artificial)
                .map(|(_, v)| v.clone())
                .sum();
            if infeasibility.is_positive() {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    value: None,
                    x: Vec::new(),
                    duals: Vec::new(),
                    iterations: self.iterations,
                });
            }
            self.expel_artificials();
        }
        let outcome = self.optimize(Phase::Optimality, cap)?;
        let x = self.primal();
        let iterations = self.iterations;
        match outcome {
            Outcome::Unbounded => Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: None,
                x,
                duals: Vec::new(),
                iterations,
            }),
            Outcome::Optimal => {
                let duals = self
                    .duals(&Phase::Optimality)
                    .into_iter()
                    .zip(&self.negated)
                    .map(|(y, &neg)| if neg { -y } else { y })
                    .collect();
                let value = x
                    .iter()
                    .zip(&self.objective)
                    .map(|(v, &c)| v.clone() * Rational::from_i64(c))
                    .sum();
                debug_assert!(self.rhs.len() == self.m);
                Ok(LpSolution {
                    status: LpStatus::Optimal,
                    value: Some(value),
                    x,
                    duals,
                    iterations,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1);
        lp.add_row(vec![(0, 1)], Relation::Le, q(1, 1));
        let s = lp.solve(100).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, Some(q(1, 1)));
        assert_eq!(s.duals, vec![q(1, 1)]);
    }

    #[test]
    fn empty_feasible_set() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1);
        lp.add_row(vec![(0, 1)], Relation::Le, q(1, 1));
        lp.add_row(vec![(0, 1)], Relation::Ge, q(2, 1));
        assert_eq!(lp.solve(100).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_objective() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1);
        lp.add_row(vec![(0, 1), (1, -1)], Relation::Le, q(1, 1));
        assert_eq!(lp.solve(100).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_program() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 3);
        lp.set_objective(1, 5);
        lp.add_row(vec![(0, 1)], Relation::Le, q(4, 1));
        lp.add_row(vec![(1, 2)], Relation::Le, q(12, 1));
        lp.add_row(vec![(0, 3), (1, 2)], Relation::Le, q(18, 1));
        let s = lp.solve(100).unwrap();
        assert_eq!(s.value, Some(q(36, 1)));
        assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
        // strong duality: b·y equals the optimum
        let by: Rational = [4, 12, 18].iter().zip(&s.duals).map(|(&b, y)| q(b, 1) * y).sum();
        assert_eq!(by, q(36, 1));
        assert_eq!(lp.dual_bound(&s.duals), Some(q(36, 1)));
        assert_eq!(lp.dual_bound(&[q(0, 1), q(0, 1), q(0, 1)]), None);
    }

    #[test]
    fn equality_rows_negative_rhs_and_redundancy() {
        // max x + y, x - y = -1 (negated internally), 2x - 2y = -2 (redundant), x + y ≤ 3
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1);
        lp.set_objective(1, 1);
        lp.add_row(vec![(0, 1), (1, -1)], Relation::Eq, q(-1, 1));
        lp.add_row(vec![(0, 2), (1, -2)], Relation::Eq, q(-2, 1));
        lp.add_row(vec![(0, 1), (1, 1)], Relation::Le, q(3, 1));
        let s = lp.solve(100).unwrap();
        assert_eq!(s.value, Some(q(3, 1)));
        assert_eq!(s.x, vec![q(1, 1), q(2, 1)]);
        assert!(lp.is_feasible_point(&s.x));
        assert_eq!(lp.dual_bound(&s.duals), Some(q(3, 1)));
    }

    #[test]
    fn fractional_rhs_and_degenerate_vertex() {
        // max t with three tree variables of the triangle, each ≥ t, summing to 1
        let mut lp = LinearProgram::new(4);
        lp.set_objective(3, 1);
        for j in 0..3 {
            lp.add_row(vec![(j, 1), (3, -1)], Relation::Ge, q(0, 1));
        }
        lp.add_row(vec![(0, 1), (1, 1), (2, 1)], Relation::Eq, q(1, 1));
        let s = lp.solve(100).unwrap();
        assert_eq!(s.value, Some(q(1, 3)));
    }

    #[test]
    fn iteration_cap_is_a_resource_error() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1);
        lp.set_objective(1, 1);
        lp.add_row(vec![(0, 1)], Relation::Le, q(1, 1));
        lp.add_row(vec![(1, 1)], Relation::Le, q(1, 1));
        assert!(matches!(lp.solve(1), Err(Error::Resource { .. })));
    }
}
