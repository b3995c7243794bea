//! Dense two-phase simplex over exact rationals, Bland's rule throughout.
//!
//! Sizes here are tiny (tens of variables), so a dense tableau is the right
//! tool; what matters is that no floating point ever decides feasibility.

use num_traits::{One, Signed, Zero};

use crate::linalg::{q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

impl Constraint {
    pub fn int(coeffs: &[i64], relation: Relation, rhs: i64) -> Self {
        Constraint {
            coeffs: coeffs.iter().map(|&c| q(c)).collect(),
            relation,
            rhs: q(rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal { point: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

/// Minimises `objective . x` over free variables `x` subject to `constraints`.
pub fn minimize(num_vars: usize, objective: &[Q], constraints: &[Constraint]) -> Outcome {
    Tableau::build(num_vars, constraints).solve(num_vars, objective)
}

/// Feasibility only (phase one).
pub fn feasible(num_vars: usize, constraints: &[Constraint]) -> bool {
    let mut t = Tableau::build(num_vars, constraints);
    t.phase_one()
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    /// Number of structural columns (2 per free variable) plus slacks.
    real_cols: usize,
    /// Total columns including artificials; the rhs is stored after these.
    cols: usize,
}

impl Tableau {
    fn build(num_vars: usize, constraints: &[Constraint]) -> Tableau {
        let m = constraints.len();
        let slack_count = constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let real_cols = 2 * num_vars + slack_count;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = 2 * num_vars;
        let mut artificial = real_cols;
        let mut needs_artificial = Vec::with_capacity(m);
        for c in constraints {
            let flip = c.rhs.is_negative();
            let sign = if flip { -Q::one() } else { Q::one() };
            let mut row = vec![Q::zero(); real_cols];
            for (j, a) in c.coeffs.iter().enumerate() {
                row[2 * j] = a * &sign;
                row[2 * j + 1] = -(a * &sign);
            }
            let relation = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            let mut basic = None;
            match relation {
                Relation::Le => {
                    row[slack] = Q::one();
                    basic = Some(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Q::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            needs_artificial.push(basic.is_none());
            row.push(&c.rhs * &sign);
            rows.push(row);
            basis.push(basic.unwrap_or(usize::MAX));
        }
        let art_count = needs_artificial.iter().filter(|&&b| b).count();
        let cols = real_cols + art_count;
        for (i, row) in rows.iter_mut().enumerate() {
            let rhs = row.pop().unwrap();
            row.resize(cols, Q::zero());
            if needs_artificial[i] {
                row[artificial] = Q::one();
                basis[i] = artificial;
                artificial += 1;
            }
            row.push(rhs);
        }
        Tableau {
            rows,
            basis,
            real_cols,
            cols,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex on `cost` over columns `< allowed`. Returns false when
    /// unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        let rhs = self.cols;
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if !row[j].is_zero() && !cost[b].is_zero() {
                        d -= &cost[b] * &row[j];
                    }
                }
                d.is_negative()
            });
            let Some(j) = entering else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j].is_positive() {
                    let ratio = &row[rhs] / &row[j];
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
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, j);
        }
    }

    fn phase_one(&mut self) -> bool {
        if self.cols == self.real_cols {
            return true;
        }
        let mut cost = vec![Q::zero(); self.cols];
        for c in cost.iter_mut().skip(self.real_cols) {
            *c = Q::one();
        }
        self.optimize(&cost, self.cols);
        let rhs = self.cols;
        let infeasible = self
            .rows
            .iter()
            .zip(&self.basis)
            .any(|(row, &b)| b >= self.real_cols && row[rhs].is_positive());
        if infeasible {
            return false;
        }
        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.real_cols {
                match (0..self.real_cols).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        true
    }

    fn solve(mut self, num_vars: usize, objective: &[Q]) -> Outcome {
        if !self.phase_one() {
            return Outcome::Infeasible;
        }
        let mut cost = vec![Q::zero(); self.cols];
        for (j, c) in objective.iter().enumerate() {
            cost[2 * j] = c.clone();
            cost[2 * j + 1] = -c.clone();
        }
        if !self.optimize(&cost, self.real_cols) {
            return Outcome::Unbounded;
        }
        let rhs = self.cols;
        let mut values = vec![Q::zero(); self.cols];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            values[b] = row[rhs].clone();
        }
        let point: Vec<Q> = (0..num_vars)
            .map(|j| &values[2 * j] - &values[2 * j + 1])
            .collect();
        let value = point.iter().zip(objective).map(|(x, c)| x * c).sum();
        Outcome::Optimal { point, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Relation::*;

    #[test]
    fn simple_minimum() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let out = minimize(
            2,
            &[q(-1), q(-1)],
            &[Constraint::int(&[1, 2], Le, 4), Constraint::int(&[3, 1], Le, 6)],
        );
        let Outcome::Optimal { point, value } = out else {
            panic!("expected optimum, got {out:?}")
        };
        assert_eq!(point, vec![Q::new(8.into(), 5.into()), Q::new(6.into(), 5.into())]);
        assert_eq!(value, Q::new((-14).into(), 5.into()));
    }

    #[test]
    fn free_variables_go_negative() {
        // min x s.t. x >= -3
        let out = minimize(1, &[q(1)], &[Constraint::int(&[1], Ge, -3)]);
        assert_eq!(
            out,
            Outcome::Optimal {
                point: vec![q(-3)],
                value: q(-3)
            }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = [Constraint::int(&[1, 1], Ge, 1), Constraint::int(&[1, 1], Le, 0)];
        assert_eq!(minimize(2, &[q(0), q(0)], &cons), Outcome::Infeasible);
        assert!(!feasible(2, &cons));
        assert_eq!(
            minimize(1, &[q(-1)], &[Constraint::int(&[1], Ge, 0)]),
            Outcome::Unbounded
        );
    }

    #[test]
    fn equalities_and_redundancy() {
        // x + y = 2, 2x + 2y = 4, min x - y with x >= 0, y >= 0
        let out = minimize(
            2,
            &[q(1), q(-1)],
            &[
                Constraint::int(&[1, 1], Eq, 2),
                Constraint::int(&[2, 2], Eq, 4),
                Constraint::int(&[1, 0], Ge, 0),
                Constraint::int(&[0, 1], Ge, 0),
            ],
        );
        assert_eq!(
            out,
            Outcome::Optimal {
                point: vec![q(0), q(2)],
                value: q(-2)
            }
        );
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let f = |n: i64, d: i64| Q::new(n.into(), d.into());
        let cons = vec![
            Constraint {
                coeffs: vec![f(1, 4), f(-8, 1), f(-1, 1), f(9, 1)],
                relation: Le,
                rhs: q(0),
            },
            Constraint {
                coeffs: vec![f(1, 2), f(-12, 1), f(-1, 2), f(3, 1)],
                relation: Le,
                rhs: q(0),
            },
            Constraint::int(&[0, 0, 1, 0], Le, 1),
            Constraint::int(&[1, 0, 0, 0], Ge, 0),
            Constraint::int(&[0, 1, 0, 0], Ge, 0),
            Constraint::int(&[0, 0, 1, 0], Ge, 0),
            Constraint::int(&[0, 0, 0, 1], Ge, 0),
        ];
        let out = minimize(4, &[f(-3, 4), f(20, 1), f(-1, 2), f(6, 1)], &cons);
        let Outcome::Optimal { value, .. } = out else {
            panic!("expected optimum")
        };
        assert_eq!(value, f(-5, 4));
    }
}
