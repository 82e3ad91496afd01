//! Fourier-Motzkin variable elimination over exact rationals.
//!
//! Handles strict, non-strict and equality constraints natively:
//! combining a strict bound with anything yields a strict bound, and
//! equalities are eliminated by substitution. This is both the
//! projection engine behind region Minkowski sums / erosions and an
//! independent feasibility oracle for cross-checking the simplex.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::{Rational, Vector};

use super::types::{LinearConstraint, Relation};

/// Scales a constraint by a positive rational so the coefficients and
/// rhs become coprime integers. Purely syntactic; used for deduping.
pub fn normalize_constraint(c: &LinearConstraint) -> LinearConstraint {
    let mut denom_lcm = BigInt::one();
    for x in c.coeffs.0.iter().chain(std::iter::once(&c.rhs)) {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let scaled: Vec<BigInt> = c
        .coeffs
        .0
        .iter()
        .chain(std::iter::once(&c.rhs))
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for x in &scaled {
        g = g.gcd(x);
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    let ints: Vec<Rational> = scaled
        .iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect();
    let (coeffs, rhs) = ints.split_at(c.coeffs.dim());
    LinearConstraint::new(Vector(coeffs.to_vec()), c.relation, rhs[0].clone())
}

/// Eliminates variable `var`. The output constraints live in the same
/// ambient dimension with a zero coefficient on `var`, and denote the
/// exact projection of the input system along that axis.
/// Returns `None` when elimination exposes infeasibility.
pub fn eliminate(
    constraints: &[LinearConstraint],
    var: usize,
) -> Result<Option<Vec<LinearConstraint>>, Error> {
    // Prefer substitution through an equality that mentions `var`.
    if let Some(pivot_idx) = constraints
        .iter()
        .position(|c| c.relation == Relation::Eq && !c.coeffs[var].is_zero())
    {
        let pivot = &constraints[pivot_idx];
        let pk = pivot.coeffs[var].clone();
        let mut out = Vec::with_capacity(constraints.len() - 1);
        for (i, c) in constraints.iter().enumerate() {
            if i == pivot_idx {
                continue;
            }
            if c.coeffs[var].is_zero() {
                out.push(c.clone());
                continue;
            }
            let f = &c.coeffs[var] / &pk;
            let coeffs = &c.coeffs - &pivot.coeffs.scale(&f);
            let rhs = &c.rhs - &(&f * &pivot.rhs);
            out.push(LinearConstraint::new(coeffs, c.relation, rhs));
        }
        return finish(out);
    }

    let mut passthrough = Vec::new();
    let mut uppers = Vec::new(); // coeff on var > 0, as <= / < form
    let mut lowers = Vec::new(); // coeff on var < 0, as <= / < form
    for c in constraints {
        if c.coeffs[var].is_zero() {
            passthrough.push(c.clone());
            continue;
        }
        let up = c.as_upper();
        debug_assert!(up.relation != Relation::Eq);
        if up.coeffs[var].is_positive() {
            uppers.push(up);
        } else {
            lowers.push(up);
        }
    }
    let mut out = passthrough;
    for lo in &lowers {
        for up in &uppers {
            let a = -lo.coeffs[var].clone(); // > 0
            let b = up.coeffs[var].clone(); // > 0
            let coeffs = &lo.coeffs.scale(&b) + &up.coeffs.scale(&a);
            let rhs = &(&b * &lo.rhs) + &(&a * &up.rhs);
            let relation = if lo.relation == Relation::Lt || up.relation == Relation::Lt {
                Relation::Lt
            } else {
                Relation::Le
            };
            debug_assert!(coeffs[var].is_zero());
            out.push(LinearConstraint::new(coeffs, relation, rhs));
        }
    }
    finish(out)
}

fn finish(raw: Vec<LinearConstraint>) -> Result<Option<Vec<LinearConstraint>>, Error> {
    let mut out: Vec<LinearConstraint> = Vec::with_capacity(raw.len());
    for c in raw {
        if c.is_trivially_false() {
            return Ok(None);
        }
        if c.is_trivially_true() {
            continue;
        }
        let n = normalize_constraint(&c);
        if !out.contains(&n) {
            out.push(n);
        }
    }
    Ok(Some(out))
}

/// Projects the system onto its first `keep` coordinates, eliminating
/// the rest, and truncates the output to dimension `keep`.
/// `None` means the input system was infeasible.
pub fn project(
    constraints: &[LinearConstraint],
    keep: usize,
) -> Result<Option<Vec<LinearConstraint>>, Error> {
    let dim = constraints.first().map_or(keep, LinearConstraint::dim);
    let mut current = constraints.to_vec();
    for var in keep..dim {
        match eliminate(&current, var)? {
            Some(next) => current = next,
            None => return Ok(None),
        }
    }
    let truncated = current
        .into_iter()
        .map(|c| {
            debug_assert!(c.coeffs.0[keep..].iter().all(Zero::is_zero));
            LinearConstraint::new(Vector(c.coeffs.0[..keep].to_vec()), c.relation, c.rhs)
        })
        .collect();
    Ok(Some(truncated))
}

/// Feasibility by eliminating every variable. Independent of the
/// simplex path; quadratically explosive, so small systems only.
pub fn fm_feasible(constraints: &[LinearConstraint]) -> Result<bool, Error> {
    let dim = constraints.first().map_or(0, LinearConstraint::dim);
    let mut current = constraints.to_vec();
    for var in 0..dim {
        match eliminate(&current, var)? {
            Some(next) => current = next,
            None => return Ok(false),
        }
    }
    Ok(current.iter().all(|c| !c.is_trivially_false()))
}
