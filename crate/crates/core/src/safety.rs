//! Safety and safety-reachability via greatest-fixed-point iteration,
//! and the exact one-round decider for structural safety.
//!
//! The fixed-point iteration is a semi-decision procedure: safety
//! games over polytopic moves are undecidable in general, so the
//! iterator returns an honest `Unknown` when the budget runs out.

use crate::boundedness::{first_witness, index_tuples};
use crate::error::Error;
use crate::geometry::{feasible_point, to_halfspaces, HPolyhedron, LinearConstraint, VPolytope};
use crate::model::{MinkowskiGame, Move, Objective, Winner};
use crate::rational::{Rational, Vector};
use crate::regions::Region;

/// Outcome of a bounded safety iteration. `PlayerB` carries the first
/// index `n` with `v0` outside `S_n`; `PlayerA` carries the certified
/// fixed-point region; `Unknown` carries the last iterate.
#[derive(Clone, Debug)]
pub enum SafetyVerdict {
    PlayerB { iteration: usize },
    PlayerA { region: Region },
    Unknown { iterations: usize, last: Region },
}

impl SafetyVerdict {
    pub fn winner(&self) -> Winner {
        match self {
            SafetyVerdict::PlayerA { .. } => Winner::PlayerA,
            SafetyVerdict::PlayerB { .. } => Winner::PlayerB,
            SafetyVerdict::Unknown { .. } => Winner::Unknown,
        }
    }
}

/// Controllable predecessor: the set of positions from which Player A
/// has a move forcing the position into `e` after one full round,
/// whatever Player B resolves and plays. Computed as
/// `union_A erode( intersect_B (e + (-B)), A )`.
pub fn cpre(e: &Region, g: &MinkowskiGame, ceiling: usize) -> Result<Region, Error> {
    if e.dimension != g.dimension {
        return Err(Error::DimensionMismatch {
            expected: g.dimension,
            got: e.dimension,
        });
    }
    let mut after_b = e.clone();
    for b in &g.moves_b {
        let shifted = e.minkowski_polytope(&b.polytope.reflected())?;
        after_b = if std::ptr::eq(b, &g.moves_b[0]) {
            shifted
        } else {
            after_b.intersect(&shifted)?
        };
    }
    let eroded = map_moves(&g.moves_a, |a| after_b.erode_polytope(&a.polytope, ceiling))?;
    let mut out = Region::empty(g.dimension);
    for r in eroded {
        out = out.union(&r)?;
        if out.pieces.len() > ceiling {
            return Err(Error::ResourceCeiling {
                pieces: out.pieces.len(),
                ceiling,
            });
        }
    }
    Ok(out)
}

/// Applies `f` to every move, in parallel when enabled; results keep
/// move order, so downstream unions are deterministic either way.
fn map_moves<T, F>(moves: &[Move], f: F) -> Result<Vec<T>, Error>
where
    T: Send,
    F: Fn(&Move) -> Result<T, Error> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        moves.par_iter().map(|m| f(m)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        moves.iter().map(|m| f(m)).collect()
    }
}

fn iterate(
    g: &MinkowskiGame,
    max_iters: usize,
    ceiling: usize,
    goal: Option<&Region>,
) -> Result<SafetyVerdict, Error> {
    g.validate()?;
    let safe = g.safe.as_ref().expect("validated objective requires safe");
    let v0 = g.initial.as_ref().expect("validated objective requires initial");
    // S_1 = Safe (u Goal); one step behind starting from R^d, which is
    // not finitely representable but maps into Safe after one step.
    // Goal joins the base set: a position already in Goal is won even
    // when it lies outside Safe.
    let mut current = match goal {
        Some(goal) => goal.union(safe)?.canonicalized()?,
        None => safe.canonicalized()?,
    };
    if !current.contains_point(v0)? {
        return Ok(SafetyVerdict::PlayerB { iteration: 1 });
    }
    for n in 1..max_iters {
        let mut next = cpre(&current, g, ceiling)?.intersect(safe)?;
        if let Some(goal) = goal {
            next = goal.union(&next)?;
        }
        let next = next.simplified()?;
        if !next.contains_point(v0)? {
            return Ok(SafetyVerdict::PlayerB { iteration: n + 1 });
        }
        if next.contains_region(&current)? {
            return Ok(SafetyVerdict::PlayerA { region: current });
        }
        current = next;
    }
    Ok(SafetyVerdict::Unknown {
        iterations: max_iters,
        last: current,
    })
}

/// Iterates `S_{n+1} = cpre(S_n) n Safe` from `S_1 = Safe` until `v0`
/// falls out (Player B), a fixed point containing `v0` is certified
/// (Player A), or the budget is exhausted.
pub fn safety_iterate(
    g: &MinkowskiGame,
    max_iters: usize,
    ceiling: usize,
) -> Result<SafetyVerdict, Error> {
    if g.objective != Objective::Safety {
        return Err(Error::Usage("safety_iterate requires the safety objective".into()));
    }
    iterate(g, max_iters, ceiling, None)
}

/// Safety-until-reach variant: `S_{n+1} = Goal u (cpre(S_n) n Safe)`.
/// With an empty goal this coincides with `safety_iterate`.
pub fn safety_reach_iterate(
    g: &MinkowskiGame,
    max_iters: usize,
    ceiling: usize,
) -> Result<SafetyVerdict, Error> {
    if g.objective != Objective::SafetyReachability {
        return Err(Error::Usage(
            "safety_reach_iterate requires the safety_reachability objective".into(),
        ));
    }
    g.validate()?;
    let goal = g.goal.clone().expect("validated objective requires goal");
    iterate(g, max_iters, ceiling, Some(&goal))
}

fn single_closed_polytope(r: &Region, what: &str) -> Result<VPolytope, Error> {
    let canon = r.canonicalized()?;
    if canon.pieces.len() != 1 || canon.pieces[0].has_strict() {
        return Err(Error::Precondition(format!(
            "{what} must be a single closed polytope"
        )));
    }
    crate::geometry::enumerate_vertices(&canon.pieces[0])
}

/// Reduces a one-sided safety-reachability game with closed polytopic
/// `Safe` and `Goal` to an equivalent safety game one dimension up:
/// `Safe' = CH((Safe x {0}) u (Goal x {1}))`, Player A gains the two
/// unit moves along the new axis, and `v0' = (v0, 0)`. The extra
/// coordinate acts as a commitment flag Player A can only raise while
/// standing in positions that reach `Goal`.
pub fn lift_safety_reach_to_safety(g: &MinkowskiGame) -> Result<MinkowskiGame, Error> {
    g.validate()?;
    if g.objective != Objective::SafetyReachability {
        return Err(Error::Usage("lifting requires a safety_reachability game".into()));
    }
    if !g.is_single_sided() {
        return Err(Error::Usage("lifting is defined for single-sided games only".into()));
    }
    let d = g.dimension;
    let safe_v = single_closed_polytope(g.safe.as_ref().unwrap(), "safe")?;
    let goal_v = single_closed_polytope(g.goal.as_ref().unwrap(), "goal")?;
    let pad = |vs: &[Vector], flag: i64| -> Vec<Vector> {
        vs.iter()
            .map(|v| v.concat(&Vector::from_ints(&[flag])))
            .collect()
    };
    let mut prime_vertices = pad(&safe_v.vertices, 0);
    prime_vertices.extend(pad(&goal_v.vertices, 1));
    let safe_prime = Region::new(
        d + 1,
        vec![to_halfspaces(&VPolytope::new(d + 1, prime_vertices)?)?],
    )?;
    let mut moves_a: Vec<Move> = g
        .moves_a
        .iter()
        .map(|m| Move::from_vertices(VPolytope::new(d + 1, pad(m.vertices(), 0))?))
        .collect::<Result<_, _>>()?;
    for flag in [1i64, -1] {
        let mut u = Vector::zero(d + 1);
        u[d] = Rational::from_integer(flag.into());
        moves_a.push(Move::from_vertices(VPolytope::singleton(u))?);
    }
    let lifted = MinkowskiGame {
        dimension: d + 1,
        objective: Objective::Safety,
        moves_a,
        moves_b: vec![Move::from_vertices(VPolytope::singleton(Vector::zero(d + 1)))?],
        safe: Some(safe_prime),
        goal: None,
        initial: Some(
            g.initial
                .as_ref()
                .unwrap()
                .concat(&Vector::zero(1)),
        ),
    };
    lifted.validate()?;
    Ok(lifted)
}

/// Decides structural safety: Player A wins iff from *every* position
/// of `Safe` some move keeps all its vertices inside
/// `Safe'' = intersect_B (Safe + (-B))`. Player B wins iff some
/// position `v` defeats every move, found by enumerating, per move, a
/// vertex and a violated facet of `Safe''` and testing the resulting
/// strict system for feasibility. Returns the winner and, for Player
/// B, a witness position.
pub fn decide_structural(
    g: &MinkowskiGame,
    ceiling: usize,
) -> Result<(Winner, Option<Vector>), Error> {
    g.validate()?;
    if g.objective != Objective::StructuralSafety {
        return Err(Error::Usage(
            "decide_structural requires the structural_safety objective".into(),
        ));
    }
    let safe = g.safe.as_ref().unwrap().canonicalized()?;
    if safe.pieces.len() > 1 || safe.pieces.iter().any(HPolyhedron::has_strict) {
        return Err(Error::Usage("structural safety needs a single closed convex safe set".into()));
    }
    if safe.pieces.is_empty() {
        return Ok((Winner::PlayerA, None)); // vacuous: no starting position
    }
    let safe_piece = &safe.pieces[0];
    let mut shrunk = safe.clone();
    for b in &g.moves_b {
        shrunk = shrunk
            .intersect(&safe.minkowski_polytope(&b.polytope.reflected())?)?
            .canonicalized()?;
        if shrunk.pieces.len() > ceiling {
            return Err(Error::ResourceCeiling {
                pieces: shrunk.pieces.len(),
                ceiling,
            });
        }
    }
    if shrunk.pieces.is_empty() {
        // Safe'' empty but Safe is not: every position loses.
        let v = feasible_point(&safe_piece.constraints)?
            .expect("canonicalized nonempty piece is feasible");
        return Ok((Winner::PlayerB, Some(v)));
    }
    // violations[k]: strict negations of every facet of Safe''; a
    // move A is defeated at v iff some vertex a with v + a satisfying
    // one of them exists.
    let violations: Vec<LinearConstraint> = shrunk.pieces[0]
        .constraints
        .iter()
        .flat_map(LinearConstraint::negations)
        .collect();
    if violations.is_empty() {
        return Ok((Winner::PlayerA, None)); // Safe'' = R^d
    }
    // Depth-first over moves, extending the system one defeated move
    // at a time and pruning infeasible prefixes; the first level is
    // searched in parallel. Leaf systems are feasible by construction.
    let first_level = index_tuples(&[g.moves_a[0].vertices().len() * violations.len()]);
    let witness = first_witness(&first_level, |choice| {
        let mut system = safe_piece.constraints.clone();
        push_defeat(&mut system, g, 0, choice[0], &violations);
        if !crate::geometry::lp_feasible(&system)? {
            return Ok(None);
        }
        defeat_rest(g, &violations, system, 1)
    })?;
    match witness {
        Some(v) => Ok((Winner::PlayerB, Some(v))),
        None => Ok((Winner::PlayerA, None)),
    }
}

/// Adds the constraint "position + chosen vertex of move `a_idx`
/// satisfies the chosen facet negation" to `system`.
fn push_defeat(
    system: &mut Vec<LinearConstraint>,
    g: &MinkowskiGame,
    a_idx: usize,
    code: usize,
    violations: &[LinearConstraint],
) {
    let vertex = &g.moves_a[a_idx].vertices()[code / violations.len()];
    let violated = &violations[code % violations.len()];
    system.push(violated.translated(&-vertex));
}

fn defeat_rest(
    g: &MinkowskiGame,
    violations: &[LinearConstraint],
    system: Vec<LinearConstraint>,
    a_idx: usize,
) -> Result<Option<Vector>, Error> {
    if a_idx == g.moves_a.len() {
        return feasible_point(&system);
    }
    for code in 0..g.moves_a[a_idx].vertices().len() * violations.len() {
        let mut extended = system.clone();
        push_defeat(&mut extended, g, a_idx, code, violations);
        if !crate::geometry::lp_feasible(&extended)? {
            continue;
        }
        if let Some(v) = defeat_rest(g, violations, extended, a_idx + 1)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Safety winning regions are closed under `g`: re-checks that a
/// claimed `PlayerA` region is a fixed point containing the start.
pub fn verify_fixed_point(g: &MinkowskiGame, w: &Region, ceiling: usize) -> Result<bool, Error> {
    let safe = match &g.safe {
        Some(s) => s,
        None => return Ok(false),
    };
    if !safe.contains_region(w)? {
        return Ok(false);
    }
    if let Some(v0) = &g.initial {
        if !w.contains_point(v0)? {
            return Ok(false);
        }
    }
    let mut image = cpre(w, g, ceiling)?.intersect(safe)?;
    if g.objective == Objective::SafetyReachability {
        if let Some(goal) = &g.goal {
            image = goal.union(&image)?;
        }
    }
    image.contains_region(w)
}
