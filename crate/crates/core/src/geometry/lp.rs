//! Exact rational linear programming.
//!
//! A dense two-phase simplex with Bland's rule, run entirely over
//! `BigRational`. Bland's rule makes every pivot sequence finite, so
//! there is no degeneracy handling beyond that. Strict inequalities
//! are decided by maximizing an auxiliary slack variable: the strict
//! system is feasible iff the relaxed system admits a solution with
//! strictly positive slack on every strict row.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::{Rational, Vector};

use super::types::{LinearConstraint, Relation};

/// Non-strict row for the solver core.
#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rel: CoreRel,
    pub rhs: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreRel {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub enum Solution {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, point: Vec<Rational> },
}

/// Maximizes `objective . x` over free variables subject to `rows`.
pub fn maximize(nvars: usize, rows: &[Row], objective: &[Rational]) -> Solution {
    assert_eq!(objective.len(), nvars);
    Tableau::build(nvars, rows).solve(objective)
}

/// Any point satisfying the rows, if one exists.
pub fn feasible(nvars: usize, rows: &[Row]) -> Option<Vec<Rational>> {
    let zero_obj = vec![Rational::zero(); nvars];
    match maximize(nvars, rows, &zero_obj) {
        Solution::Optimal { point, .. } => Some(point),
        Solution::Infeasible => None,
        Solution::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Exact feasibility of a mixed strict/non-strict/equality system,
/// returning a witness point when feasible.
pub fn feasible_point(constraints: &[LinearConstraint]) -> Result<Option<Vector>, Error> {
    let dim = check_common_dimension(constraints)?;
    let any_strict = constraints.iter().any(|c| c.relation.is_strict());
    if !any_strict {
        let rows: Vec<Row> = constraints.iter().map(|c| to_row(c, dim, false)).collect();
        return Ok(feasible(dim, &rows).map(Vector));
    }

    // Variables: x_0..x_{d-1}, then t. Strict rows get a -t (for <)
    // or +t (for >) margin; the system is strictly feasible iff
    // max t > 0 (t capped at 1 to keep the LP bounded).
    let nvars = dim + 1;
    let mut rows: Vec<Row> = constraints.iter().map(|c| to_row(c, dim, true)).collect();
    let mut cap = vec![Rational::zero(); nvars];
    cap[dim] = Rational::one();
    rows.push(Row {
        coeffs: cap.clone(),
        rel: CoreRel::Le,
        rhs: Rational::one(),
    });
    rows.push(Row {
        coeffs: cap.clone(),
        rel: CoreRel::Ge,
        rhs: Rational::zero(),
    });
    match maximize(nvars, &rows, &cap) {
        Solution::Infeasible => Ok(None),
        Solution::Unbounded => unreachable!("t is capped"),
        Solution::Optimal { value, mut point } => {
            if value.is_positive() {
                point.truncate(dim);
                Ok(Some(Vector(point)))
            } else {
                Ok(None)
            }
        }
    }
}

/// Exact feasibility decision. See [`feasible_point`].
pub fn lp_feasible(constraints: &[LinearConstraint]) -> Result<bool, Error> {
    Ok(feasible_point(constraints)?.is_some())
}

fn check_common_dimension(constraints: &[LinearConstraint]) -> Result<usize, Error> {
    let mut dim = None;
    for c in constraints {
        match dim {
            None => dim = Some(c.dim()),
            Some(d) if d != c.dim() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: c.dim(),
                })
            }
            _ => {}
        }
    }
    Ok(dim.unwrap_or(0))
}

fn to_row(c: &LinearConstraint, dim: usize, with_margin: bool) -> Row {
    let mut coeffs: Vec<Rational> = c.coeffs.0.clone();
    if with_margin {
        // Lt:  a.x + t <= rhs;  Gt:  a.x - t >= rhs
        coeffs.push(match c.relation {
            Relation::Lt => Rational::one(),
            Relation::Gt => -Rational::one(),
            _ => Rational::zero(),
        });
        debug_assert_eq!(coeffs.len(), dim + 1);
    }
    let rel = match c.relation {
        Relation::Lt | Relation::Le => CoreRel::Le,
        Relation::Eq => CoreRel::Eq,
        Relation::Gt | Relation::Ge => CoreRel::Ge,
    };
    Row {
        coeffs,
        rel,
        rhs: c.rhs.clone(),
    }
}

/// Dense simplex tableau. Structural variables are split into
/// positive and negative parts so everything is nonnegative.
struct Tableau {
    /// columns: 2*nvars structural halves, then slacks, then artificials
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    nvars: usize,
    ncols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(nvars: usize, input: &[Row]) -> Tableau {
        let m = input.len();
        let nsplit = 2 * nvars;
        let nslack = input
            .iter()
            .filter(|r| r.rel != CoreRel::Eq)
            .count();
        let ncols = nsplit + nslack + m; // artificial for every row, unused ones stay zero
        let first_artificial = nsplit + nslack;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_idx = nsplit;

        for (i, r) in input.iter().enumerate() {
            assert_eq!(r.coeffs.len(), nvars);
            let mut row = vec![Rational::zero(); ncols];
            let mut b = r.rhs.clone();
            // orient so rhs >= 0
            let flip = b.is_negative();
            for (j, c) in r.coeffs.iter().enumerate() {
                let c = if flip { -c } else { c.clone() };
                row[2 * j] = c.clone();
                row[2 * j + 1] = -c;
            }
            if flip {
                b = -b;
            }
            let rel = match (r.rel, flip) {
                (CoreRel::Eq, _) => CoreRel::Eq,
                (CoreRel::Le, false) | (CoreRel::Ge, true) => CoreRel::Le,
                (CoreRel::Ge, false) | (CoreRel::Le, true) => CoreRel::Ge,
            };
            match rel {
                CoreRel::Le => {
                    row[slack_idx] = Rational::one();
                    basis.push(slack_idx);
                    slack_idx += 1;
                }
                CoreRel::Ge => {
                    row[slack_idx] = -Rational::one();
                    slack_idx += 1;
                    row[first_artificial + i] = Rational::one();
                    basis.push(first_artificial + i);
                }
                CoreRel::Eq => {
                    row[first_artificial + i] = Rational::one();
                    basis.push(first_artificial + i);
                }
            }
            rows.push(row);
            rhs.push(b);
        }

        Tableau {
            rows,
            rhs,
            basis,
            nvars,
            ncols,
            first_artificial,
        }
    }

    fn solve(mut self, objective: &[Rational]) -> Solution {
        // Phase 1: maximize -(sum of artificials).
        let needs_phase1 = self.basis.iter().any(|&b| b >= self.first_artificial);
        if needs_phase1 {
            let mut costs = vec![Rational::zero(); self.ncols];
            for c in costs.iter_mut().skip(self.first_artificial) {
                *c = -Rational::one();
            }
            match self.optimize(&costs, self.ncols) {
                PhaseEnd::Optimal(value) => {
                    if value.is_negative() {
                        return Solution::Infeasible;
                    }
                }
                PhaseEnd::Unbounded => unreachable!("phase 1 objective is bounded"),
            }
            self.evict_artificials();
        }

        // Phase 2: artificial columns are frozen out.
        let mut costs = vec![Rational::zero(); self.ncols];
        for (j, c) in objective.iter().enumerate() {
            costs[2 * j] = c.clone();
            costs[2 * j + 1] = -c.clone();
        }
        match self.optimize(&costs, self.first_artificial) {
            PhaseEnd::Unbounded => Solution::Unbounded,
            PhaseEnd::Optimal(value) => Solution::Optimal {
                value,
                point: self.extract_point(),
            },
        }
    }

    /// Bland's rule simplex over columns `< col_limit`.
    fn optimize(&mut self, costs: &[Rational], col_limit: usize) -> PhaseEnd {
        loop {
            let mut entering = None;
            for j in 0..col_limit {
                if self.basis.contains(&j) {
                    continue;
                }
                if self.reduced_cost(costs, j).is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                let value = self
                    .basis
                    .iter()
                    .zip(&self.rhs)
                    .map(|(&b, v)| &costs[b] * v)
                    .fold(Rational::zero(), |acc, x| acc + x);
                return PhaseEnd::Optimal(value);
            };

            // ratio test, ties broken by smallest basis index (Bland)
            let mut best: Option<(Rational, usize)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][j].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][j];
                    let better = match &best {
                        None => true,
                        Some((r, bi)) => {
                            ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            let Some((_, i)) = best else {
                return PhaseEnd::Unbounded;
            };
            self.pivot(i, j);
        }
    }

    fn reduced_cost(&self, costs: &[Rational], j: usize) -> Rational {
        let mut rc = costs[j].clone();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if !cb.is_zero() && !row[j].is_zero() {
                rc -= cb * &row[j];
            }
        }
        rc
    }

    fn pivot(&mut self, i: usize, j: usize) {
        let piv = self.rows[i][j].clone();
        for x in self.rows[i].iter_mut() {
            *x /= &piv;
        }
        self.rhs[i] /= &piv;
        for k in 0..self.rows.len() {
            if k == i {
                continue;
            }
            let factor = self.rows[k][j].clone();
            if factor.is_zero() {
                continue;
            }
            for col in 0..self.ncols {
                let delta = &factor * &self.rows[i][col];
                self.rows[k][col] -= delta;
            }
            let delta = &factor * &self.rhs[i];
            self.rhs[k] -= delta;
        }
        self.basis[i] = j;
    }

    /// After phase 1, pivot zero-valued artificials out of the basis
    /// where possible (redundant rows keep them, harmlessly frozen).
    fn evict_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            debug_assert!(self.rhs[i].is_zero());
            let j = (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero());
            if let Some(j) = j {
                self.pivot(i, j);
            }
        }
    }

    fn extract_point(&self) -> Vec<Rational> {
        let mut split = vec![Rational::zero(); 2 * self.nvars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < 2 * self.nvars {
                split[b] = self.rhs[i].clone();
            }
        }
        (0..self.nvars)
            .map(|j| &split[2 * j] - &split[2 * j + 1])
            .collect()
    }
}

enum PhaseEnd {
    Optimal(Rational),
    Unbounded,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn c(coeffs: &[i64], rel: Relation, rhs: Rational) -> LinearConstraint {
        LinearConstraint::new(Vector::from_ints(coeffs), rel, rhs)
    }

    #[test]
    fn interval_feasibility() {
        assert!(lp_feasible(&[c(&[1], Relation::Ge, rat(0)), c(&[1], Relation::Le, rat(1))]).unwrap());
        assert!(!lp_feasible(&[c(&[1], Relation::Ge, rat(1)), c(&[1], Relation::Le, rat(0))]).unwrap());
    }

    #[test]
    fn strict_system_with_equality() {
        // x > 0, x < 1/2, 2x = 1/3  ->  x = 1/6
        let sys = [
            c(&[1], Relation::Gt, rat(0)),
            c(&[1], Relation::Lt, ratio(1, 2)),
            c(&[2], Relation::Eq, ratio(1, 3)),
        ];
        let p = feasible_point(&sys).unwrap().unwrap();
        assert_eq!(p[0], ratio(1, 6));
    }

    #[test]
    fn strict_boundary_is_infeasible() {
        // x >= 1, x <= 1, x > 1
        let sys = [
            c(&[1], Relation::Ge, rat(1)),
            c(&[1], Relation::Le, rat(1)),
            c(&[1], Relation::Gt, rat(1)),
        ];
        assert!(!lp_feasible(&sys).unwrap());
        // ... but x >= 1, x <= 1 alone is feasible
        assert!(lp_feasible(&sys[..2]).unwrap());
    }

    #[test]
    fn maximize_over_triangle() {
        // max x+y st x>=0, y>=0, x+y<=1
        let rows = vec![
            Row { coeffs: vec![rat(1), rat(0)], rel: CoreRel::Ge, rhs: rat(0) },
            Row { coeffs: vec![rat(0), rat(1)], rel: CoreRel::Ge, rhs: rat(0) },
            Row { coeffs: vec![rat(1), rat(1)], rel: CoreRel::Le, rhs: rat(1) },
        ];
        match maximize(2, &rows, &[rat(1), rat(1)]) {
            Solution::Optimal { value, point } => {
                assert_eq!(value, rat(1));
                assert_eq!(&point[0] + &point[1], rat(1));
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn detects_unbounded() {
        let rows = vec![Row { coeffs: vec![rat(1)], rel: CoreRel::Ge, rhs: rat(0) }];
        assert!(matches!(maximize(1, &rows, &[rat(1)]), Solution::Unbounded));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let sys = [c(&[1], Relation::Ge, rat(0)), c(&[1, 0], Relation::Le, rat(1))];
        assert!(lp_feasible(&sys).is_err());
    }

    #[test]
    fn free_variables_can_go_negative() {
        let sys = [c(&[1], Relation::Le, rat(-3))];
        let p = feasible_point(&sys).unwrap().unwrap();
        assert!(p[0] <= rat(-3));
    }
}
