//! Conversions between vertex and halfspace representations.
//!
//! Both directions run through one double description pass on a
//! pointed cone: H->V homogenizes the polytope, V->H enumerates the
//! extreme rays of the dual constraint cone after reducing to the
//! affine hull (so inputs of any dimension work, including segments
//! and single points embedded in higher-dimensional space).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::{Rational, Vector};

use super::hull::canonicalize_vertices;
use super::linalg::{rank_of, rref, solve};
use super::lp::{feasible_point, maximize, CoreRel, Row, Solution};
use super::types::{HPolyhedron, LinearConstraint, Relation, VPolytope};

/// Positive-scales a ray to coprime integer coordinates (rays are only
/// determined up to positive scaling, so the sign pattern is kept).
fn normalize_ray(v: &Vector) -> Vector {
    let mut denom_lcm = BigInt::one();
    for x in &v.0 {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let scaled: Vec<BigInt> = v
        .0
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for x in &scaled {
        g = g.gcd(x);
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    Vector(
        scaled
            .iter()
            .map(|x| Rational::from_integer(x / &g))
            .collect(),
    )
}

/// Extreme rays of the pointed cone `{ y : row . y <= 0 for all rows }`.
///
/// Requires `rank(rows) == dim` (equivalent to pointedness); callers
/// guarantee this. Incremental double description: start from a
/// simplicial subcone given by `dim` independent rows, then cut with
/// the remaining rows, pairing adjacent kept/violating rays.
fn extreme_rays(rows: &[Vector], dim: usize) -> Result<Vec<Vector>, Error> {
    // Greedily pick dim rows of full rank for the initial subcone.
    let mut base_idx: Vec<usize> = Vec::with_capacity(dim);
    let mut picked: Vec<Vector> = Vec::with_capacity(dim);
    for (i, r) in rows.iter().enumerate() {
        if base_idx.len() == dim {
            break;
        }
        picked.push(r.clone());
        if rank_of(&picked) == picked.len() {
            base_idx.push(i);
        } else {
            picked.pop();
        }
    }
    if base_idx.len() != dim {
        return Err(Error::Precondition(
            "double description requires a pointed cone".into(),
        ));
    }

    // Invert the base matrix: rays of {D0 y <= 0} are -columns of D0^-1.
    let mut aug: Vec<Vec<Rational>> = picked
        .iter()
        .map(|r| {
            let mut row = r.0.clone();
            row.extend(std::iter::repeat_with(Rational::zero).take(dim));
            row
        })
        .collect();
    for (j, row) in aug.iter_mut().enumerate() {
        row[dim + j] = Rational::one();
    }
    rref(&mut aug);
    let mut rays: Vec<Vector> = (0..dim)
        .map(|j| {
            normalize_ray(&Vector(
                (0..dim).map(|i| -aug[i][dim + j].clone()).collect(),
            ))
        })
        .collect();

    // Insert the remaining constraints one at a time.
    let mut processed: Vec<&Vector> = base_idx.iter().map(|&i| &rows[i]).collect();
    for (i, cut) in rows.iter().enumerate() {
        if base_idx.contains(&i) {
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|r| cut.dot(r)).collect();
        if vals.iter().all(|v| !v.is_positive()) {
            processed.push(cut);
            continue;
        }
        // Tight sets against everything processed so far, for adjacency.
        let tight: Vec<Vec<bool>> = rays
            .iter()
            .map(|r| processed.iter().map(|p| p.dot(r).is_zero()).collect())
            .collect();
        let adjacent = |a: usize, b: usize| -> bool {
            let common: Vec<usize> = (0..processed.len())
                .filter(|&k| tight[a][k] && tight[b][k])
                .collect();
            !rays.iter().enumerate().any(|(c, _)| {
                c != a && c != b && common.iter().all(|&k| tight[c][k])
            })
        };
        let mut next: Vec<Vector> = Vec::new();
        for (j, r) in rays.iter().enumerate() {
            if !vals[j].is_positive() {
                next.push(r.clone());
            }
        }
        for (p, vp) in vals.iter().enumerate() {
            if !vp.is_positive() {
                continue;
            }
            for (n, vn) in vals.iter().enumerate() {
                if !vn.is_negative() || !adjacent(p, n) {
                    continue;
                }
                // vp * rays[n] - vn * rays[p] is tight on the cut.
                let combo = &rays[n].scale(vp) - &rays[p].scale(vn);
                let combo = normalize_ray(&combo);
                if !combo.is_zero() && !next.contains(&combo) {
                    next.push(combo);
                }
            }
        }
        rays = next;
        processed.push(cut);
    }
    Ok(rays)
}

/// Whether the solution set is bounded (empty counts as bounded).
pub fn is_bounded(h: &HPolyhedron) -> Result<bool, Error> {
    let rows: Vec<Row> = h
        .constraints
        .iter()
        .map(|c| {
            let up = c.as_upper();
            Row {
                coeffs: up.coeffs.0.clone(),
                rel: if up.relation == Relation::Eq {
                    CoreRel::Eq
                } else {
                    CoreRel::Le
                },
                rhs: up.rhs,
            }
        })
        .collect();
    for coord in 0..h.dimension {
        for sign in [1i64, -1] {
            let mut obj = vec![Rational::zero(); h.dimension];
            obj[coord] = Rational::from_integer(sign.into());
            if let Solution::Unbounded = maximize(h.dimension, &rows, &obj) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Vertices of a nonempty bounded closed `HPolyhedron`.
///
/// Strict constraints are rejected: an open set has no vertex list.
pub fn enumerate_vertices(h: &HPolyhedron) -> Result<VPolytope, Error> {
    if h.has_strict() {
        return Err(Error::Precondition(
            "vertex enumeration requires a closed polyhedron".into(),
        ));
    }
    if feasible_point(&h.constraints)?.is_none() {
        return Err(Error::EmptyPolyhedron);
    }
    let d = h.dimension;
    // Homogenize: (x, t) with a.x - b t <= 0 per constraint and -t <= 0.
    let mut rows: Vec<Vector> = Vec::new();
    for c in &h.constraints {
        let up = c.as_upper();
        let mut row = up.coeffs.0.clone();
        row.push(-up.rhs.clone());
        rows.push(Vector(row.clone()));
        if up.relation == Relation::Eq {
            rows.push(-&Vector(row));
        }
    }
    let mut tpos = vec![Rational::zero(); d + 1];
    tpos[d] = -Rational::one();
    rows.push(Vector(tpos));
    if rank_of(&rows) < d + 1 {
        // Lineality in the homogenized cone: an affine line inside the set.
        return Err(Error::Unbounded);
    }
    let mut vertices = Vec::new();
    for ray in extreme_rays(&rows, d + 1)? {
        let t = ray[d].clone();
        if t.is_zero() {
            if !ray.is_zero() {
                return Err(Error::Unbounded);
            }
            continue;
        }
        debug_assert!(t.is_positive());
        vertices.push(Vector(
            ray.0[..d].iter().map(|x| x / &t).collect(),
        ));
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    VPolytope::new(d, canonicalize_vertices(vertices)?)
}

/// Halfspace representation of the convex hull of a vertex list.
///
/// Works at any intrinsic dimension: the affine hull contributes
/// equality constraints, the facets of the hull inside that flat
/// contribute inequalities. Output constraints are normalized and
/// sorted so equal polytopes serialize identically.
pub fn to_halfspaces(v: &VPolytope) -> Result<HPolyhedron, Error> {
    let d = v.dimension;
    let v0 = v.vertices[0].clone();
    let diffs: Vec<Vector> = v.vertices[1..].iter().map(|w| w - &v0).collect();

    let mut constraints: Vec<LinearConstraint> = Vec::new();

    // Affine hull: every normal orthogonal to the span pins an equality.
    let normals = super::linalg::kernel_basis(&diffs, d);
    let r = d - normals.len();
    for n in normals {
        let rhs = n.dot(&v0);
        constraints.push(LinearConstraint::new(n, Relation::Eq, rhs));
    }
    if r == 0 {
        constraints.sort_by(constraint_order);
        return HPolyhedron::new(d, constraints);
    }

    // Independent spanning directions b_1..b_r picked from the diffs.
    let mut basis: Vec<Vector> = Vec::new();
    for diff in &diffs {
        if basis.len() == r {
            break;
        }
        basis.push(diff.clone());
        if rank_of(&basis) != basis.len() {
            basis.pop();
        }
    }
    debug_assert_eq!(basis.len(), r);

    // Coordinates of each vertex inside the flat: solve B y = v_i - v0
    // (one equation per ambient coordinate, consistent by construction).
    let eq_rows: Vec<Vector> = (0..d)
        .map(|coord| Vector(basis.iter().map(|b| b[coord].clone()).collect()))
        .collect();
    let coords: Vec<Vector> = v
        .vertices
        .iter()
        .map(|w| {
            let rhs: Vec<Rational> = (0..d).map(|coord| &w[coord] - &v0[coord]).collect();
            Vector(solve(&eq_rows, &rhs).expect("diff lies in span of basis"))
        })
        .collect();

    // Facets = extreme rays of { (c, c0) : c . y_i <= c0 for all i },
    // which is pointed because the y_i affinely span R^r.
    let rows: Vec<Vector> = coords
        .iter()
        .map(|y| {
            let mut row = y.0.clone();
            row.push(-Rational::one());
            Vector(row)
        })
        .collect();
    for ray in extreme_rays(&rows, r + 1)? {
        let c = Vector(ray.0[..r].to_vec());
        let c0 = ray[r].clone();
        if c.is_zero() {
            continue; // the trivial ray (0, 1)
        }
        // Pull c . y <= c0 back to ambient x: find w with w . b_j = c_j,
        // then w . (x - v0) = c . y on the affine hull.
        let w = Vector(solve(&basis, &c.0).expect("basis rows independent"));
        let rhs = &c0 + &w.dot(&v0);
        constraints.push(super::fourier_motzkin::normalize_constraint(
            &LinearConstraint::new(w, Relation::Le, rhs),
        ));
    }
    constraints.sort_by(constraint_order);
    constraints.dedup();
    HPolyhedron::new(d, constraints)
}

fn constraint_order(a: &LinearConstraint, b: &LinearConstraint) -> std::cmp::Ordering {
    (&a.coeffs.0, a.relation as u8, &a.rhs).cmp(&(&b.coeffs.0, b.relation as u8, &b.rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn le(coeffs: &[i64], rhs: i64) -> LinearConstraint {
        LinearConstraint::new(Vector::from_ints(coeffs), Relation::Le, rat(rhs))
    }

    #[test]
    fn unit_square_h_to_v() {
        let h = HPolyhedron::new(
            2,
            vec![le(&[1, 0], 1), le(&[-1, 0], 0), le(&[0, 1], 1), le(&[0, -1], 0)],
        )
        .unwrap();
        let v = enumerate_vertices(&h).unwrap();
        let expect = VPolytope::from_int_vertices(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(v.vertices, canonicalize_vertices(expect.vertices).unwrap());
    }

    #[test]
    fn unit_square_v_to_h_and_back() {
        let v = VPolytope::from_int_vertices(2, &[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]);
        let h = to_halfspaces(&v).unwrap();
        assert_eq!(h.constraints.len(), 4);
        assert!(h.contains(&Vector(vec![ratio(1, 2), ratio(1, 2)])));
        assert!(!h.contains(&Vector(vec![rat(2), rat(0)])));
        let back = enumerate_vertices(&h).unwrap();
        assert_eq!(back.vertices, canonicalize_vertices(v.vertices).unwrap());
    }

    #[test]
    fn triangle_with_interior_point_round_trip() {
        // the interior point must drop out of the vertex set
        let v = VPolytope::from_int_vertices(2, &[&[0, 0], &[4, 0], &[0, 4], &[1, 1]]);
        let h = to_halfspaces(&v).unwrap();
        let back = enumerate_vertices(&h).unwrap();
        let expect =
            canonicalize_vertices(VPolytope::from_int_vertices(2, &[&[0, 0], &[4, 0], &[0, 4]]).vertices).unwrap();
        assert_eq!(back.vertices, expect);
    }

    #[test]
    fn segment_in_the_plane() {
        // 1-dimensional hull embedded in R^2: one equality, two bounds
        let v = VPolytope::from_int_vertices(2, &[&[0, 0], &[2, 2]]);
        let h = to_halfspaces(&v).unwrap();
        assert!(h.constraints.iter().any(|c| c.relation == Relation::Eq));
        assert!(h.contains(&Vector(vec![rat(1), rat(1)])));
        assert!(!h.contains(&Vector(vec![rat(1), rat(0)])));
        assert!(!h.contains(&Vector(vec![rat(3), rat(3)])));
        let back = enumerate_vertices(&h).unwrap();
        assert_eq!(back.vertices, canonicalize_vertices(v.vertices).unwrap());
    }

    #[test]
    fn single_point() {
        let v = VPolytope::from_int_vertices(3, &[&[1, 2, 3]]);
        let h = to_halfspaces(&v).unwrap();
        assert_eq!(h.constraints.len(), 3);
        assert!(h.constraints.iter().all(|c| c.relation == Relation::Eq));
        let back = enumerate_vertices(&h).unwrap();
        assert_eq!(back.vertices, v.vertices);
    }

    #[test]
    fn cube_in_three_dimensions() {
        let mut cs = Vec::new();
        for i in 0..3 {
            let mut pos = [0i64; 3];
            pos[i] = 1;
            cs.push(le(&pos, 1));
            let neg = [-pos[0], -pos[1], -pos[2]];
            cs.push(le(&neg, 1));
        }
        let h = HPolyhedron::new(3, cs).unwrap();
        let v = enumerate_vertices(&h).unwrap();
        assert_eq!(v.vertices.len(), 8);
        let h2 = to_halfspaces(&v).unwrap();
        assert_eq!(h2.constraints.len(), 6);
    }

    #[test]
    fn unbounded_and_empty_are_reported() {
        let half = HPolyhedron::new(1, vec![le(&[1], 0)]).unwrap();
        assert!(matches!(enumerate_vertices(&half), Err(Error::Unbounded)));
        assert!(!is_bounded(&half).unwrap());

        let empty =
            HPolyhedron::new(1, vec![le(&[1], 0), le(&[-1], -1)]).unwrap();
        assert!(matches!(
            enumerate_vertices(&empty),
            Err(Error::EmptyPolyhedron)
        ));

        let strict = HPolyhedron::new(
            1,
            vec![LinearConstraint::new(
                Vector::from_ints(&[1]),
                Relation::Lt,
                rat(1),
            )],
        )
        .unwrap();
        assert!(matches!(
            enumerate_vertices(&strict),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bounded_equality_system() {
        // x + y = 1, x >= 0, y >= 0: a diagonal segment
        let h = HPolyhedron::new(
            2,
            vec![
                LinearConstraint::new(Vector::from_ints(&[1, 1]), Relation::Eq, rat(1)),
                le(&[-1, 0], 0),
                le(&[0, -1], 0),
            ],
        )
        .unwrap();
        assert!(is_bounded(&h).unwrap());
        let v = enumerate_vertices(&h).unwrap();
        let expect =
            canonicalize_vertices(VPolytope::from_int_vertices(2, &[&[1, 0], &[0, 1]]).vertices).unwrap();
        assert_eq!(v.vertices, expect);
    }
}
