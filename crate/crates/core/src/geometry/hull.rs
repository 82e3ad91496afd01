//! Convex-hull primitives: membership with witness weights,
//! Caratheodory decomposition, separating directions and the
//! hyperplane separation test used by the tuple decider.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::{Rational, Vector};

use super::linalg;
use super::lp::{self, CoreRel, Row, Solution};
use super::types::VPolytope;

/// Membership of `point` in `CH(generators)`; returns convex weights
/// witnessing membership when it holds.
pub fn hull_membership(
    point: &Vector,
    generators: &[Vector],
) -> Result<Option<Vec<Rational>>, Error> {
    if generators.is_empty() {
        return Err(Error::EmptyInput("hull membership needs generators"));
    }
    let dim = point.dim();
    for g in generators {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: g.dim(),
            });
        }
    }
    let k = generators.len();
    let mut rows = Vec::with_capacity(dim + 1 + k);
    // sum_i a_i * g_i = point   (one row per coordinate)
    for coord in 0..dim {
        rows.push(Row {
            coeffs: generators.iter().map(|g| g[coord].clone()).collect(),
            rel: CoreRel::Eq,
            rhs: point[coord].clone(),
        });
    }
    rows.push(Row {
        coeffs: vec![Rational::one(); k],
        rel: CoreRel::Eq,
        rhs: Rational::one(),
    });
    for i in 0..k {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs[i] = Rational::one();
        rows.push(Row {
            coeffs,
            rel: CoreRel::Ge,
            rhs: Rational::zero(),
        });
    }
    Ok(lp::feasible(k, &rows))
}

/// Exact convex combination of `point` over at most `d + 1` of the
/// generators. Errors if `point` is outside the hull.
pub fn caratheodory_decompose(
    point: &Vector,
    generators: &[Vector],
) -> Result<Vec<(usize, Rational)>, Error> {
    let weights = hull_membership(point, generators)?
        .ok_or_else(|| Error::Precondition("point not in the convex hull".into()))?;
    let dim = point.dim();
    let mut support: Vec<(usize, Rational)> = weights
        .into_iter()
        .enumerate()
        .filter(|(_, w)| w.is_positive())
        .collect();
    if support.is_empty() {
        // degenerate all-zero weights cannot happen (they sum to 1)
        return Err(Error::Precondition("empty convex combination".into()));
    }

    // Caratheodory reduction: while more than d+1 generators carry
    // weight, the lifted points (g_i, 1) are dependent; shifting the
    // weights along the dependency zeroes one of them out.
    while support.len() > dim + 1 {
        let lifted: Vec<Vector> = support
            .iter()
            .map(|(i, _)| {
                let mut c = generators[*i].0.clone();
                c.push(Rational::one());
                Vector(c)
            })
            .collect();
        let mut gamma = linalg::column_dependency(&lifted)
            .expect("more than d+1 lifted points are always dependent");
        if !gamma.iter().any(|g| g.is_positive()) {
            for g in gamma.iter_mut() {
                *g = -g.clone();
            }
        }
        let mut theta: Option<(Rational, usize)> = None;
        for (j, g) in gamma.iter().enumerate() {
            if g.is_positive() {
                let ratio = &support[j].1 / g;
                if theta.as_ref().is_none_or(|(t, _)| ratio < *t) {
                    theta = Some((ratio, j));
                }
            }
        }
        let (theta, drop_idx) = theta.expect("some positive dependency coefficient");
        for (j, g) in gamma.iter().enumerate() {
            let delta = &theta * g;
            support[j].1 -= delta;
        }
        support[drop_idx].1 = Rational::zero();
        support.retain(|(_, w)| w.is_positive());
    }
    Ok(support)
}

/// If `0` is outside `CH(generators)`, returns `(u, delta)` with
/// `u . g >= delta > 0` for every generator; otherwise `None`.
/// This stands in for the Euclidean projection: any fixed positive
/// drift per round makes a diverging play.
pub fn separating_direction(
    generators: &[Vector],
) -> Result<Option<(Vector, Rational)>, Error> {
    if generators.is_empty() {
        return Err(Error::EmptyInput("separating direction needs generators"));
    }
    let dim = generators[0].dim();
    let nvars = dim + 1; // u_0..u_{d-1}, t
    let mut rows = Vec::new();
    for g in generators {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: g.dim(),
            });
        }
        let mut coeffs = g.0.clone();
        coeffs.push(-Rational::one());
        rows.push(Row {
            coeffs,
            rel: CoreRel::Ge,
            rhs: Rational::zero(),
        }); // u.g - t >= 0
    }
    for i in 0..dim {
        let mut coeffs = vec![Rational::zero(); nvars];
        coeffs[i] = Rational::one();
        rows.push(Row {
            coeffs: coeffs.clone(),
            rel: CoreRel::Le,
            rhs: Rational::one(),
        });
        rows.push(Row {
            coeffs,
            rel: CoreRel::Ge,
            rhs: -Rational::one(),
        });
    }
    let mut tcap = vec![Rational::zero(); nvars];
    tcap[dim] = Rational::one();
    rows.push(Row {
        coeffs: tcap.clone(),
        rel: CoreRel::Le,
        rhs: Rational::one(),
    });
    rows.push(Row {
        coeffs: tcap.clone(),
        rel: CoreRel::Ge,
        rhs: Rational::zero(),
    });
    match lp::maximize(nvars, &rows, &tcap) {
        Solution::Optimal { value, mut point } if value.is_positive() => {
            point.truncate(dim);
            Ok(Some((Vector(point), value)))
        }
        Solution::Optimal { .. } => Ok(None),
        other => unreachable!("bounded LP cannot be {other:?}"),
    }
}

/// Whether the affine hull of the `d` anchor points strictly
/// separates the origin from every target: the origin lies strictly
/// on one side, every target on the closed opposite side.
pub fn separates(anchors: &[Vector], targets: &[Vector]) -> Result<bool, Error> {
    if anchors.is_empty() {
        return Err(Error::Precondition("separation needs d anchor points".into()));
    }
    let dim = anchors[0].dim();
    if anchors.len() != dim {
        return Err(Error::Precondition(format!(
            "expected {dim} anchor points, got {}",
            anchors.len()
        )));
    }
    let diffs: Vec<Vector> = anchors[1..].iter().map(|x| x - &anchors[0]).collect();
    if linalg::rank_of(&diffs) != dim - 1 {
        return Err(Error::Precondition(
            "anchor points must be affinely independent".into(),
        ));
    }
    let mut normal = linalg::kernel_basis(&diffs, dim)
        .into_iter()
        .next()
        .expect("rank d-1 leaves a one-dimensional kernel");
    let mut offset = normal.dot(&anchors[0]);
    if offset.is_zero() {
        return Ok(false); // origin lies on the hyperplane
    }
    if offset.is_negative() {
        normal = -&normal;
        offset = -offset;
    }
    Ok(targets.iter().all(|y| normal.dot(y) >= offset))
}

/// Removes duplicated and non-extremal points; the result lists
/// exactly the vertices of the hull.
pub fn canonicalize_vertices(mut points: Vec<Vector>) -> Result<Vec<Vector>, Error> {
    points.sort();
    points.dedup();
    let mut i = 0;
    while i < points.len() && points.len() > 1 {
        let candidate = points[i].clone();
        let others: Vec<Vector> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if hull_membership(&candidate, &others)?.is_some() {
            points.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(points)
}

/// Minkowski sum of two V-polytopes: the hull of all pairwise vertex
/// sums, canonicalized.
pub fn minkowski_sum_v(p: &VPolytope, q: &VPolytope) -> Result<VPolytope, Error> {
    if p.dimension != q.dimension {
        return Err(Error::DimensionMismatch {
            expected: p.dimension,
            got: q.dimension,
        });
    }
    let mut sums = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            sums.push(a + b);
        }
    }
    Ok(VPolytope {
        dimension: p.dimension,
        vertices: canonicalize_vertices(sums)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn membership_midpoint() {
        let g = [Vector::from_ints(&[-1]), Vector::from_ints(&[1])];
        let w = hull_membership(&Vector::zero(1), &g).unwrap().unwrap();
        assert_eq!(&w[0] + &w[1], rat(1));
        assert_eq!(&w[0] * rat(-1) + &w[1] * rat(1), rat(0));
    }

    #[test]
    fn membership_singleton_off_origin() {
        let g = [Vector::from_ints(&[1])];
        assert!(hull_membership(&Vector::zero(1), &g).unwrap().is_none());
    }

    #[test]
    fn membership_symmetric_triangle() {
        let g = [
            Vector::from_ints(&[1, 0]),
            Vector::from_ints(&[0, 1]),
            Vector::from_ints(&[-1, -1]),
        ];
        let w = hull_membership(&Vector::zero(2), &g).unwrap().unwrap();
        assert_eq!(w, vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
    }

    #[test]
    fn membership_empty_generators_is_error() {
        assert!(hull_membership(&Vector::zero(1), &[]).is_err());
    }

    #[test]
    fn caratheodory_resums_and_is_small() {
        let corners = [
            Vector::from_ints(&[0, 0]),
            Vector::from_ints(&[1, 0]),
            Vector::from_ints(&[0, 1]),
            Vector::from_ints(&[1, 1]),
        ];
        let p = Vector(vec![ratio(1, 2), ratio(1, 2)]);
        let decomp = caratheodory_decompose(&p, &corners).unwrap();
        assert!(decomp.len() <= 3);
        let mut acc = Vector::zero(2);
        let mut total = Rational::zero();
        for (i, w) in &decomp {
            assert!(w.is_positive());
            acc = &acc + &corners[*i].scale(w);
            total += w;
        }
        assert_eq!(acc, p);
        assert_eq!(total, rat(1));
    }

    #[test]
    fn caratheodory_vertex_is_identity() {
        let g = [Vector::from_ints(&[2, 3]), Vector::from_ints(&[5, 5])];
        let decomp = caratheodory_decompose(&g[0], &g).unwrap();
        assert_eq!(decomp, vec![(0, rat(1))]);
    }

    #[test]
    fn caratheodory_outside_hull_is_error() {
        let g = [Vector::from_ints(&[1])];
        assert!(caratheodory_decompose(&Vector::zero(1), &g).is_err());
    }

    #[test]
    fn separating_direction_examples() {
        let (u, delta) = separating_direction(&[Vector::from_ints(&[1])])
            .unwrap()
            .unwrap();
        assert!(delta.is_positive());
        assert!(u.dot(&Vector::from_ints(&[1])) >= delta);

        assert!(separating_direction(&[
            Vector::from_ints(&[-1]),
            Vector::from_ints(&[1])
        ])
        .unwrap()
        .is_none());

        let g = [Vector::from_ints(&[1, 0]), Vector::from_ints(&[1, 1])];
        let (u, delta) = separating_direction(&g).unwrap().unwrap();
        assert!(delta.is_positive());
        for v in &g {
            assert!(u.dot(v) >= delta);
        }
    }

    #[test]
    fn separates_examples() {
        let anchors = [Vector::from_ints(&[1, 0]), Vector::from_ints(&[0, 1])];
        assert!(separates(&anchors, &[Vector::from_ints(&[1, 1])]).unwrap());
        assert!(!separates(
            &anchors,
            &[Vector(vec![ratio(1, 5), ratio(1, 5)])]
        )
        .unwrap());
        // target exactly on the hyperplane counts (closed far side)
        assert!(separates(&anchors, &[Vector(vec![ratio(1, 2), ratio(1, 2)])]).unwrap());
        // origin on the hyperplane -> false
        let through_zero = [Vector::from_ints(&[0, 0]), Vector::from_ints(&[1, 0])];
        assert!(!separates(&through_zero, &[Vector::from_ints(&[5, 5])]).unwrap());
        // dependent anchors -> precondition error
        assert!(separates(
            &[Vector::from_ints(&[1, 1]), Vector::from_ints(&[1, 1])],
            &[]
        )
        .is_err());
    }

    #[test]
    fn minkowski_segment_doubling() {
        let seg = VPolytope::from_int_vertices(1, &[&[0], &[1]]);
        let sum = minkowski_sum_v(&seg, &seg).unwrap();
        assert_eq!(
            sum.vertices,
            vec![Vector::from_ints(&[0]), Vector::from_ints(&[2])]
        );
    }

    #[test]
    fn minkowski_singleton_translates() {
        let square = VPolytope::from_int_vertices(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let t = VPolytope::from_int_vertices(2, &[&[5, -2]]);
        let sum = minkowski_sum_v(&square, &t).unwrap();
        let expected = canonicalize_vertices(
            square.vertices.iter().map(|v| v + &t.vertices[0]).collect(),
        )
        .unwrap();
        assert_eq!(sum.vertices, expected);
        assert_eq!(sum.vertices.len(), 4);
    }

    #[test]
    fn minkowski_square_doubles() {
        let square = VPolytope::from_int_vertices(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let sum = minkowski_sum_v(&square, &square).unwrap();
        assert_eq!(sum.vertices.len(), 4);
        assert!(sum.vertices.contains(&Vector::from_ints(&[2, 2])));
        assert!(sum.vertices.contains(&Vector::from_ints(&[0, 0])));
    }
}
