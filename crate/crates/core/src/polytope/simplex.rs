//! Exact rational two-phase primal simplex with Bland's rule.
//!
//! This is the feasibility and optimality oracle behind redundancy pruning,
//! grid membership checks, and equilibrium split searches. It is deliberately
//! independent of the Fourier-Motzkin path so the two can cross-check each
//! other. Bland's rule guarantees termination; all pivots are exact.

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

use super::{LinearSystem, Relation};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Unbounded,
    Infeasible,
}

/// Maximizes `objective . x` over the feasible set of `sys`. Variables are
/// unrestricted in sign unless the system says otherwise.
pub fn maximize(sys: &LinearSystem, objective: &[Rat]) -> LpOutcome {
    assert_eq!(objective.len(), sys.dim());
    Tableau::build(sys).solve(objective)
}

/// Any feasible point, or `None` when the system is infeasible.
pub fn feasible_point(sys: &LinearSystem) -> Option<Vec<Rat>> {
    let zero_obj = vec![Rat::zero(); sys.dim()];
    match maximize(sys, &zero_obj) {
        LpOutcome::Optimal { point, .. } => Some(point),
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
        LpOutcome::Infeasible => None,
    }
}

/// Dense tableau in equality form. Free variables are split `x = u - v`;
/// column layout is `[u_0, v_0, .., u_{n-1}, v_{n-1}, slacks..., artificials...]`.
struct Tableau {
    n_orig: usize,
    n_struct: usize,
    n_slack: usize,
    rows: Vec<Vec<Rat>>, // m x (cols)
    rhs: Vec<Rat>,       // m, kept nonnegative
    basis: Vec<usize>,   // basic column per row
}

impl Tableau {
    fn build(sys: &LinearSystem) -> Tableau {
        let n = sys.dim();
        let n_struct = 2 * n;
        let n_slack = sys
            .constraints()
            .iter()
            .filter(|c| c.relation == Relation::Le)
            .count();
        let m = sys.constraints().len();
        let cols = n_struct + n_slack + m; // artificial per row, unused ones stay zero

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_idx = 0;
        for (i, c) in sys.constraints().iter().enumerate() {
            let mut row = vec![Rat::zero(); cols];
            let flip = c.rhs.is_negative();
            for (j, a) in c.coeffs.iter().enumerate() {
                let val = if flip { -a.clone() } else { a.clone() };
                row[2 * j] = val.clone();
                row[2 * j + 1] = -val;
            }
            let mut b = if flip { -c.rhs.clone() } else { c.rhs.clone() };
            if b.is_negative() {
                // only possible for rhs == -0, defensive
                b = Rat::zero();
            }
            let mut basic_col = None;
            if c.relation == Relation::Le {
                let scol = n_struct + slack_idx;
                slack_idx += 1;
                row[scol] = if flip { -Rat::one() } else { Rat::one() };
                if !flip {
                    basic_col = Some(scol);
                }
            }
            let basic_col = basic_col.unwrap_or_else(|| {
                let acol = n_struct + n_slack + i;
                row[acol] = Rat::one();
                acol
            });
            rows.push(row);
            rhs.push(b);
            basis.push(basic_col);
        }

        Tableau {
            n_orig: n,
            n_struct,
            n_slack,
            rows,
            rhs,
            basis,
        }
    }

    fn art_start(&self) -> usize {
        self.n_struct + self.n_slack
    }

    fn cols(&self) -> usize {
        self.art_start() + self.rows.len()
    }

    fn solve(mut self, objective: &[Rat]) -> LpOutcome {
        // Phase I: maximize -(sum of artificials).
        let cols = self.cols();
        let art_start = self.art_start();
        let mut cost = vec![Rat::zero(); cols];
        for c in cost[art_start..].iter_mut() {
            *c = -Rat::one();
        }
        let (value, _) = self.run(&cost, true);
        if value.is_negative() {
            return LpOutcome::Infeasible;
        }
        self.evict_artificials();

        // Phase II on the real objective, artificial columns barred.
        let mut cost = vec![Rat::zero(); self.cols()];
        for j in 0..self.n_orig {
            cost[2 * j] = objective[j].clone();
            cost[2 * j + 1] = -objective[j].clone();
        }
        let (value, bounded) = self.run(&cost, false);
        if !bounded {
            return LpOutcome::Unbounded;
        }

        let mut point = vec![Rat::zero(); self.n_orig];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                let var = b / 2;
                if b % 2 == 0 {
                    point[var] += self.rhs[r].clone();
                } else {
                    point[var] -= self.rhs[r].clone();
                }
            }
        }
        LpOutcome::Optimal { value, point }
    }

    /// Runs the simplex for the given cost vector. Returns the objective value
    /// and whether the problem was bounded. `allow_art` permits artificial
    /// columns to enter (Phase I only).
    fn run(&mut self, cost: &[Rat], allow_art: bool) -> (Rat, bool) {
        let cols = self.cols();
        let art_start = self.art_start();
        // Reduced costs: c_j - c_B B^{-1} A_j, maintained by pivoting an
        // explicit objective row.
        let mut obj = cost.to_vec();
        let mut obj_val = Rat::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if !obj[b].is_zero() {
                let factor = obj[b].clone();
                for (o, a) in obj.iter_mut().zip(&self.rows[r]) {
                    let delta = &factor * a;
                    *o -= delta;
                }
                obj_val += factor * &self.rhs[r];
            }
        }

        loop {
            let limit = if allow_art { cols } else { art_start };
            let Some(enter) = (0..limit).find(|&j| obj[j].is_positive()) else {
                return (obj_val, true);
            };
            // Ratio test with Bland tie-break on the leaving basic variable.
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if a.is_positive() {
                    let ratio = &self.rhs[r] / a;
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pivot_row, _)) = leave else {
                return (obj_val, false);
            };
            self.pivot(pivot_row, enter, &mut obj, &mut obj_val);
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [Rat], obj_val: &mut Rat) {
        let inv = {
            let p = self.rows[pr][pc].clone();
            debug_assert!(p.is_positive());
            p.recip()
        };
        for a in self.rows[pr].iter_mut() {
            *a *= &inv;
        }
        self.rhs[pr] *= &inv;
        let pivot_row = self.rows[pr].clone();
        let pivot_rhs = self.rhs[pr].clone();
        for r in 0..self.rows.len() {
            if r == pr {
                continue;
            }
            let factor = self.rows[r][pc].clone();
            if factor.is_zero() {
                continue;
            }
            for (a, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                let delta = &factor * pv;
                *a -= delta;
            }
            let delta = &factor * &pivot_rhs;
            self.rhs[r] -= delta;
        }
        let factor = obj[pc].clone();
        if !factor.is_zero() {
            for (o, pv) in obj.iter_mut().zip(&pivot_row) {
                let delta = &factor * pv;
                *o -= delta;
            }
            *obj_val += factor * pivot_rhs;
        }
        self.basis[pr] = pc;
    }

    /// After Phase I, pivots basic artificials (all at value zero) out of the
    /// basis where possible; rows with no eligible pivot are redundant.
    fn evict_artificials(&mut self) {
        let art_start = self.art_start();
        for r in 0..self.rows.len() {
            if self.basis[r] < art_start {
                continue;
            }
            debug_assert!(self.rhs[r].is_zero());
            let pc = (0..art_start).find(|&j| !self.rows[r][j].is_zero());
            if let Some(pc) = pc {
                // Degenerate pivot; sign of the element does not matter here.
                let mut dummy_obj = vec![Rat::zero(); self.cols()];
                let mut dummy_val = Rat::zero();
                if self.rows[r][pc].is_negative() {
                    for j in 0..self.cols() {
                        let v = -self.rows[r][j].clone();
                        self.rows[r][j] = v;
                    }
                    self.rhs[r] = -self.rhs[r].clone();
                }
                self.pivot(r, pc, &mut dummy_obj, &mut dummy_val);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{Constraint, LinearSystem};
    use crate::rat::{rat, ratio};

    fn le(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint::le(coeffs.iter().map(|&c| rat(c)).collect(), rat(rhs))
    }

    fn eq(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint::eq(coeffs.iter().map(|&c| rat(c)).collect(), rat(rhs))
    }

    #[test]
    fn maximize_over_triangle() {
        // x >= 0, y >= 0, x + y <= 1; max x + y = 1.
        let sys = LinearSystem::new(
            2,
            vec![le(&[-1, 0], 0), le(&[0, -1], 0), le(&[1, 1], 1)],
        );
        match maximize(&sys, &[rat(1), rat(1)]) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(1));
                assert_eq!(&point[0] + &point[1], rat(1));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible() {
        let sys = LinearSystem::new(1, vec![le(&[1], 0), le(&[-1], -1)]);
        assert_eq!(maximize(&sys, &[rat(0)]), LpOutcome::Infeasible);
        assert!(feasible_point(&sys).is_none());
    }

    #[test]
    fn detects_unbounded() {
        let sys = LinearSystem::new(1, vec![le(&[-1], 0)]);
        assert_eq!(maximize(&sys, &[rat(1)]), LpOutcome::Unbounded);
    }

    #[test]
    fn handles_equalities_and_negative_rhs() {
        // x = 3, x + y <= 5, -y <= -1 -> max y = 2 at (3, 2).
        let sys = LinearSystem::new(
            2,
            vec![eq(&[1, 0], 3), le(&[1, 1], 5), le(&[0, -1], -1)],
        );
        match maximize(&sys, &[rat(0), rat(1)]) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(2));
                assert_eq!(point, vec![rat(3), rat(2)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn free_variables_go_negative() {
        // x <= -2 with free x: max x = -2.
        let sys = LinearSystem::new(1, vec![le(&[1], -2)]);
        match maximize(&sys, &[rat(1)]) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(-2));
                assert_eq!(point, vec![rat(-2)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max x subject to 3x <= 1: x = 1/3 exactly.
        let sys = LinearSystem::new(1, vec![le(&[3], 1), le(&[-1], 0)]);
        match maximize(&sys, &[rat(1)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(1, 3)),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn feasible_point_satisfies_system() {
        let sys = LinearSystem::new(
            2,
            vec![le(&[-1, 0], 0), le(&[0, -1], 0), le(&[1, 1], 1), le(&[-1, -1], -1)],
        );
        let p = feasible_point(&sys).unwrap();
        assert!(sys.satisfied_by(&p));
        assert_eq!(&p[0] + &p[1], rat(1));
    }
}
