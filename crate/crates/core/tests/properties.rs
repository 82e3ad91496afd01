//! Randomized invariants. Each property pins down an algebraic law
//! that the exact-geometry layer must satisfy for every input, not
//! just the worked examples in the unit tests.

use proptest::prelude::*;

use minkowski_core::geometry::{
    caratheodory_decompose, fm_feasible, hull_membership, lp_feasible, minkowski_sum_v,
    to_halfspaces, LinearConstraint, Relation, VPolytope,
};
use minkowski_core::boundedness::{decide_bruteforce, decide_findwinner};
use minkowski_core::model::{MinkowskiGame, Move, Objective};
use minkowski_core::rational::{rat, Rational, Vector};
use minkowski_core::regions::{Region, DEFAULT_PIECE_CEILING};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn vector(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(small_rational(), dim).prop_map(Vector)
}

fn polytope(dim: usize) -> impl Strategy<Value = VPolytope> {
    prop::collection::vec(vector(dim), 1..=4)
        .prop_map(move |vs| VPolytope::new(dim, vs).unwrap())
}

fn constraint(dim: usize) -> impl Strategy<Value = LinearConstraint> {
    (
        vector(dim),
        prop_oneof![
            Just(Relation::Lt),
            Just(Relation::Le),
            Just(Relation::Eq),
            Just(Relation::Ge),
            Just(Relation::Gt),
        ],
        small_rational(),
    )
        .prop_map(|(coeffs, rel, rhs)| LinearConstraint::new(coeffs, rel, rhs))
}

fn constraints(dim: usize) -> impl Strategy<Value = Vec<LinearConstraint>> {
    prop::collection::vec(constraint(dim), 1..=5)
}

fn region(dim: usize) -> impl Strategy<Value = Region> {
    prop::collection::vec(
        prop::collection::vec((-2i64..=1, 0i64..=2), dim),
        0..=2,
    )
    .prop_map(move |pieces| {
        let mut r = Region::empty(dim);
        for bounds in pieces {
            let boxed: Vec<(Rational, Rational)> = bounds
                .iter()
                .map(|(lo, width)| (rat(*lo), rat(lo + width)))
                .collect();
            r = r.union(&Region::from_box(&boxed)).unwrap();
        }
        r
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The simplex and elimination feasibility deciders agree.
    #[test]
    fn lp_and_fm_feasibility_agree(cs in (1usize..=3).prop_flat_map(constraints)) {
        prop_assert_eq!(lp_feasible(&cs).unwrap(), fm_feasible(&cs).unwrap());
    }

    /// Adding a constraint never turns an infeasible system feasible.
    #[test]
    fn feasibility_is_antitone(
        cs in (1usize..=3).prop_flat_map(constraints),
        extra in (1usize..=3).prop_flat_map(constraint),
    ) {
        prop_assume!(extra.dim() == cs[0].dim());
        let mut bigger = cs.clone();
        bigger.push(extra);
        if !lp_feasible(&cs).unwrap() {
            prop_assert!(!lp_feasible(&bigger).unwrap());
        }
    }

    /// Vertices survive the round trip through halfspace form.
    #[test]
    fn halfspace_round_trip_preserves_the_hull(p in (1usize..=3).prop_flat_map(polytope)) {
        let h = to_halfspaces(&p).unwrap();
        for v in &p.vertices {
            prop_assert!(h.constraints.iter().all(|c| c.satisfied_by(v)));
        }
        // every constraint is tight somewhere, so none cuts the hull
        for v in &p.vertices {
            prop_assert!(
                hull_membership(v, &p.vertices).unwrap().is_some(),
                "vertex left its own hull"
            );
        }
    }

    /// Caratheodory weights are a genuine small-support convex combination.
    #[test]
    fn caratheodory_reconstructs_the_point(
        p in (1usize..=3).prop_flat_map(polytope),
        weights in prop::collection::vec(0i64..=3, 4),
    ) {
        let gens = &p.vertices;
        let picked: Vec<Rational> = gens
            .iter()
            .enumerate()
            .map(|(i, _)| rat(weights[i % weights.len()].max(if i == 0 { 1 } else { 0 })))
            .collect();
        let total: Rational = picked.iter().cloned().sum();
        let mut point = Vector::zero(p.dimension);
        for (g, w) in gens.iter().zip(&picked) {
            point = &point + &g.scale(&(w / &total));
        }
        let decomp = caratheodory_decompose(&point, gens).unwrap();
        prop_assert!(decomp.len() <= p.dimension + 1);
        let mut rebuilt = Vector::zero(p.dimension);
        let mut mass = Rational::from_integer(0.into());
        for (i, w) in &decomp {
            prop_assert!(*w > Rational::from_integer(0.into()));
            rebuilt = &rebuilt + &gens[*i].scale(w);
            mass += w.clone();
        }
        prop_assert_eq!(mass, Rational::from_integer(1.into()));
        prop_assert_eq!(rebuilt, point);
    }

    /// Minkowski sum of V-polytopes contains every pairwise vertex sum
    /// and nothing outside the hull of those sums.
    #[test]
    fn minkowski_sum_matches_pairwise_sums(
        (p, q) in (1usize..=3).prop_flat_map(|d| (polytope(d), polytope(d))),
    ) {
        let sum = minkowski_sum_v(&p, &q).unwrap();
        let all: Vec<Vector> = p
            .vertices
            .iter()
            .flat_map(|a| q.vertices.iter().map(move |b| a + b))
            .collect();
        for s in &all {
            prop_assert!(hull_membership(s, &sum.vertices).unwrap().is_some());
        }
        for v in &sum.vertices {
            prop_assert!(hull_membership(v, &all).unwrap().is_some());
        }
    }

    /// Complement is an involution on regions.
    #[test]
    fn region_complement_involutes(r in (1usize..=2).prop_flat_map(region)) {
        let cc = r
            .complement(DEFAULT_PIECE_CEILING)
            .unwrap()
            .complement(DEFAULT_PIECE_CEILING)
            .unwrap();
        prop_assert!(cc.same_set(&r).unwrap());
    }

    /// A point is in exactly one of a region and its complement.
    #[test]
    fn region_complement_partitions_points(
        (r, v) in (1usize..=2).prop_flat_map(|d| (region(d), vector(d))),
    ) {
        let c = r.complement(DEFAULT_PIECE_CEILING).unwrap();
        prop_assert_ne!(r.contains_point(&v).unwrap(), c.contains_point(&v).unwrap());
    }

    /// simplified() never changes the set a region denotes.
    #[test]
    fn simplification_preserves_the_set(r in (1usize..=2).prop_flat_map(region)) {
        prop_assert!(r.simplified().unwrap().same_set(&r).unwrap());
    }

    /// Erosion adjunction: R + P lies inside S exactly when R lies
    /// inside the erosion of S by P.
    #[test]
    fn erosion_is_adjoint_to_dilation(
        (r, s, p) in (1usize..=2).prop_flat_map(|d| (region(d), region(d), polytope(d))),
    ) {
        let dilated = r.minkowski_polytope(&p).unwrap();
        let eroded = s.erode_polytope(&p, DEFAULT_PIECE_CEILING).unwrap();
        prop_assert_eq!(
            s.contains_region(&dilated).unwrap(),
            eroded.contains_region(&r).unwrap()
        );
    }

    /// Both boundedness deciders agree, and replacing every move by
    /// the hull of its vertices plus midpoints changes nothing.
    #[test]
    fn boundedness_deciders_agree_and_ignore_redundant_vertices(
        (d, a_moves, b_moves) in (1usize..=2).prop_flat_map(|d| {
            (
                Just(d),
                prop::collection::vec(polytope(d), 1..=2),
                prop::collection::vec(polytope(d), 1..=2),
            )
        }),
    ) {
        let build = |aa: &[VPolytope], bb: &[VPolytope]| MinkowskiGame {
            dimension: d,
            objective: Objective::Boundedness,
            moves_a: aa.iter().map(|p| Move::from_vertices(p.clone()).unwrap()).collect(),
            moves_b: bb.iter().map(|p| Move::from_vertices(p.clone()).unwrap()).collect(),
            safe: None,
            goal: None,
            initial: None,
        };
        let g = build(&a_moves, &b_moves);
        prop_assume!(g.validate().is_ok());
        let brute = decide_bruteforce(&g).unwrap();
        let fast = decide_findwinner(&g).unwrap();
        prop_assert_eq!(brute.winner, fast.winner);

        let fatten = |ps: &[VPolytope]| -> Vec<VPolytope> {
            ps.iter()
                .map(|p| {
                    let mut vs = p.vertices.clone();
                    let mid = Vector(
                        (&vs[0] + &vs[vs.len() - 1]).0.iter().map(|c| c / &rat(2)).collect(),
                    );
                    vs.push(mid);
                    VPolytope::new(p.dimension, vs).unwrap()
                })
                .collect()
        };
        let fat = build(&fatten(&a_moves), &fatten(&b_moves));
        prop_assert_eq!(decide_bruteforce(&fat).unwrap().winner, brute.winner);
    }
}
