//! Exact rational halfspace systems, Fourier-Motzkin projection, redundancy
//! pruning, and 2D vertex enumeration.
//!
//! All arithmetic in this module is exact; there is no floating point on any
//! path. Projection is cross-checked elsewhere against the simplex oracle,
//! which shares no code with the elimination routines.

pub mod region2;
pub mod simplex;

pub use region2::{Region2, RegionError, RegionKind};
pub use simplex::{feasible_point, maximize, LpOutcome};

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
}

/// One constraint `coeffs . x <= rhs` or `coeffs . x = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub relation: Relation,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint {
            coeffs,
            rhs,
            relation: Relation::Le,
        }
    }

    pub fn eq(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint {
            coeffs,
            rhs,
            relation: Relation::Eq,
        }
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        self.coeffs
            .iter()
            .zip(point)
            .map(|(a, x)| a * x)
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    pub fn holds_at(&self, point: &[Rat]) -> bool {
        let lhs = self.eval(point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    fn is_zero_row(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// True for rows like `0 <= 1` that constrain nothing.
    fn is_trivially_true(&self) -> bool {
        self.is_zero_row()
            && match self.relation {
                Relation::Le => !self.rhs.is_negative(),
                Relation::Eq => self.rhs.is_zero(),
            }
    }

    /// Scales so the leading nonzero coefficient has absolute value 1. The
    /// scale factor is positive, so the constraint is unchanged as a set.
    fn normalize(&mut self) {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()) {
            let scale = lead.abs().recip();
            for c in &mut self.coeffs {
                *c *= &scale;
            }
            self.rhs *= scale;
        }
    }
}

/// H-representation of a rational polyhedron: a conjunction of `<=` and `=`
/// constraints over `dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    dim: usize,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Self {
        for c in &constraints {
            assert_eq!(c.coeffs.len(), dim, "constraint arity mismatch");
        }
        LinearSystem { dim, constraints }
    }

    pub fn empty(dim: usize) -> Self {
        LinearSystem {
            dim,
            constraints: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn push(&mut self, c: Constraint) {
        assert_eq!(c.coeffs.len(), self.dim);
        self.constraints.push(c);
    }

    pub fn extend(&mut self, other: &LinearSystem) {
        assert_eq!(self.dim, other.dim);
        self.constraints.extend(other.constraints.iter().cloned());
    }

    pub fn satisfied_by(&self, point: &[Rat]) -> bool {
        self.constraints.iter().all(|c| c.holds_at(point))
    }

    /// Syntactically unsatisfiable: contains a zero row with an impossible
    /// right-hand side. Projection of an infeasible system always exposes one.
    pub fn has_contradiction_row(&self) -> bool {
        self.constraints.iter().any(|c| {
            c.is_zero_row()
                && match c.relation {
                    Relation::Le => c.rhs.is_negative(),
                    Relation::Eq => !c.rhs.is_zero(),
                }
        })
    }

    pub fn is_feasible(&self) -> bool {
        !self.has_contradiction_row() && simplex::feasible_point(self).is_some()
    }
}

/// Eliminates variable `var`, returning a system in dimension `n - 1` whose
/// feasible set is the projection of the input's. An equality with a nonzero
/// coefficient on `var` is used for substitution; otherwise inequalities are
/// combined pairwise in the usual Fourier-Motzkin fashion.
pub fn fm_eliminate(sys: &LinearSystem, var: usize) -> LinearSystem {
    assert!(var < sys.dim);
    let drop_col = |c: &Constraint| -> Constraint {
        let mut coeffs = c.coeffs.clone();
        coeffs.remove(var);
        Constraint {
            coeffs,
            rhs: c.rhs.clone(),
            relation: c.relation,
        }
    };

    if let Some(pivot_idx) = sys
        .constraints
        .iter()
        .position(|c| c.relation == Relation::Eq && !c.coeffs[var].is_zero())
    {
        let pivot = &sys.constraints[pivot_idx];
        let inv = pivot.coeffs[var].clone().recip();
        let mut out = Vec::with_capacity(sys.constraints.len() - 1);
        for (i, c) in sys.constraints.iter().enumerate() {
            if i == pivot_idx {
                continue;
            }
            if c.coeffs[var].is_zero() {
                out.push(drop_col(c));
                continue;
            }
            let factor = &c.coeffs[var] * &inv;
            let mut coeffs = Vec::with_capacity(sys.dim - 1);
            for (j, a) in c.coeffs.iter().enumerate() {
                if j == var {
                    continue;
                }
                coeffs.push(a - &(&factor * &pivot.coeffs[j]));
            }
            let rhs = &c.rhs - &(&factor * &pivot.rhs);
            out.push(Constraint {
                coeffs,
                rhs,
                relation: c.relation,
            });
        }
        return dedup(LinearSystem::new(sys.dim - 1, out));
    }

    // No usable equality: split equalities touching var into two inequalities
    // first, then combine by coefficient sign.
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    let mut ineqs: Vec<Constraint> = Vec::new();
    for c in &sys.constraints {
        if c.coeffs[var].is_zero() {
            out.push(drop_col(c));
        } else if c.relation == Relation::Eq {
            ineqs.push(Constraint::le(c.coeffs.clone(), c.rhs.clone()));
            ineqs.push(Constraint::le(
                c.coeffs.iter().map(|a| -a).collect(),
                -c.rhs.clone(),
            ));
        } else {
            ineqs.push(c.clone());
        }
    }
    for c in &ineqs {
        if c.coeffs[var].is_positive() {
            pos.push(c);
        } else {
            neg.push(c);
        }
    }
    for p in &pos {
        let pc = &p.coeffs[var];
        for n in &neg {
            let nc = &n.coeffs[var];
            // (1/pc) * p + (-1/nc) * n cancels var; both scales positive.
            let ps = pc.clone().recip();
            let ns = -nc.clone().recip();
            let mut coeffs = Vec::with_capacity(sys.dim - 1);
            for j in 0..sys.dim {
                if j == var {
                    continue;
                }
                coeffs.push(&(&p.coeffs[j] * &ps) + &(&n.coeffs[j] * &ns));
            }
            let rhs = &(&p.rhs * &ps) + &(&n.rhs * &ns);
            out.push(Constraint::le(coeffs, rhs));
        }
    }
    dedup(LinearSystem::new(sys.dim - 1, out))
}

/// Removes duplicate rows (after normalization), rows that are trivially
/// true, and rows dominated by an identical coefficient vector with a
/// smaller right-hand side. Cheap; no LP involved.
pub fn dedup(sys: LinearSystem) -> LinearSystem {
    use std::collections::HashMap;
    let mut kept: Vec<Constraint> = Vec::new();
    let mut best_le: HashMap<Vec<Rat>, usize> = HashMap::new();
    let mut seen_eq: HashMap<Vec<Rat>, Vec<usize>> = HashMap::new();
    for mut c in sys.constraints {
        c.normalize();
        if c.is_trivially_true() {
            continue;
        }
        match c.relation {
            Relation::Le => {
                if let Some(&i) = best_le.get(&c.coeffs) {
                    if c.rhs < kept[i].rhs {
                        kept[i].rhs = c.rhs;
                    }
                    continue;
                }
                best_le.insert(c.coeffs.clone(), kept.len());
                kept.push(c);
            }
            Relation::Eq => {
                let entry = seen_eq.entry(c.coeffs.clone()).or_default();
                if entry.iter().any(|&i| kept[i].rhs == c.rhs) {
                    continue;
                }
                entry.push(kept.len());
                kept.push(c);
            }
        }
    }
    LinearSystem::new(sys.dim, kept)
}

/// Full redundancy pruning. A `<=` row is removable when maximizing its left
/// side over the remaining rows cannot exceed its bound; the test is exact
/// LP. Contradiction rows are kept as infeasibility witnesses.
pub fn prune(sys: &LinearSystem) -> LinearSystem {
    let mut sys = dedup(sys.clone());
    if sys.has_contradiction_row() {
        return sys;
    }
    let mut i = 0;
    while i < sys.constraints.len() {
        if sys.constraints[i].relation != Relation::Le {
            i += 1;
            continue;
        }
        let candidate = sys.constraints[i].clone();
        let mut rest = sys.clone();
        rest.constraints.remove(i);
        let redundant = match simplex::maximize(&rest, &candidate.coeffs) {
            LpOutcome::Optimal { value, .. } => value <= candidate.rhs,
            LpOutcome::Unbounded => false,
            // The rest alone is infeasible, so the row adds nothing.
            LpOutcome::Infeasible => true,
        };
        if redundant {
            sys.constraints.remove(i);
        } else {
            i += 1;
        }
    }
    sys
}

/// Projects onto the variables in `keep` (ascending order preserved) by
/// repeated elimination, cheapest variable first, with dedup after every
/// step and a full prune at the end.
pub fn project(sys: &LinearSystem, keep: &[usize]) -> LinearSystem {
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    assert!(keep_sorted.iter().all(|&k| k < sys.dim));

    let mut current = dedup(sys.clone());
    // Remaining original variable ids, positionally aligned with columns.
    let mut vars: Vec<usize> = (0..sys.dim).collect();
    while vars.len() > keep_sorted.len() {
        let candidates: Vec<usize> = (0..vars.len())
            .filter(|i| !keep_sorted.contains(&vars[*i]))
            .collect();
        let col = *candidates
            .iter()
            .min_by_key(|&&i| elimination_cost(&current, i))
            .expect("candidate exists");
        current = fm_eliminate(&current, col);
        vars.remove(col);
        if current.has_contradiction_row() {
            // Projection of an empty set: keep one witness row in the target
            // dimension and stop early.
            let witness = Constraint::le(vec![Rat::zero(); keep_sorted.len()], -Rat::one());
            return LinearSystem::new(keep_sorted.len(), vec![witness]);
        }
        // Interleave cheap dedup always, LP pruning when rows pile up.
        if current.constraints.len() > 3 * (current.dim + 1).max(8) {
            current = prune(&current);
        }
    }
    prune(&current)
}

/// Elimination cost heuristic: number of pairwise combinations the step
/// would generate (equality substitution is free).
fn elimination_cost(sys: &LinearSystem, var: usize) -> usize {
    if sys
        .constraints
        .iter()
        .any(|c| c.relation == Relation::Eq && !c.coeffs[var].is_zero())
    {
        return 0;
    }
    let mut pos = 0;
    let mut neg = 0;
    for c in &sys.constraints {
        if c.coeffs[var].is_positive() {
            pos += 1;
        } else if c.coeffs[var].is_negative() {
            neg += 1;
        }
    }
    pos * neg
}
