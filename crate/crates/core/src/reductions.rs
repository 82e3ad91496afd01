//! Labeled-instance generators: 3-CNF formulas reduce to boundedness
//! and structural-safety games, two-counter machines reduce to
//! safety-reachability games. A brute-force SAT check serves as the
//! ground-truth labeler for the CNF families.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{to_halfspaces, LinearConstraint, Relation, VPolytope};
use crate::model::{MinkowskiGame, Move, Objective};
use crate::rational::{rat, Rational, Vector};
use crate::regions::Region;

// ---------------------------------------------------------------------------
// 3-CNF

/// A literal over variable `var` (1-based, DIMACS style).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Literal {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Literal {
        Literal { var, positive: false }
    }
}

/// CNF with exactly three (possibly repeated) literals per clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf3 {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self, Error> {
        let cnf = Cnf3 { num_vars, clauses };
        cnf.validate()?;
        Ok(cnf)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.num_vars == 0 {
            return Err(Error::validation("num_vars", "must be positive"));
        }
        for (i, c) in self.clauses.iter().enumerate() {
            for l in c {
                if l.var == 0 || l.var > self.num_vars {
                    return Err(Error::Validation {
                        path: format!("clauses[{i}]"),
                        message: format!("variable {} out of range 1..={}", l.var, self.num_vars),
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses DIMACS CNF. Clauses of one or two literals are padded by
    /// repetition (harmless: `x or x or y` is `x or y`); longer
    /// clauses are rejected.
    pub fn parse_dimacs(text: &str) -> Result<Cnf3, Error> {
        let mut num_vars = None;
        let mut clauses = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::Parse(format!("bad problem line: {line:?}")));
                }
                num_vars = Some(
                    parts[1]
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad variable count: {:?}", parts[1])))?,
                );
                continue;
            }
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad literal: {tok:?}")))?;
                if v == 0 {
                    if current.is_empty() {
                        return Err(Error::Parse("empty clause".into()));
                    }
                    if current.len() > 3 {
                        return Err(Error::Parse(format!(
                            "clause with {} literals (at most 3 supported)",
                            current.len()
                        )));
                    }
                    while current.len() < 3 {
                        current.push(*current.last().unwrap());
                    }
                    clauses.push([current[0], current[1], current[2]]);
                    current.clear();
                } else {
                    current.push(Literal {
                        var: v.unsigned_abs() as usize,
                        positive: v > 0,
                    });
                }
            }
        }
        if !current.is_empty() {
            return Err(Error::Parse("unterminated clause".into()));
        }
        let num_vars = num_vars.ok_or_else(|| Error::Parse("missing problem line".into()))?;
        Cnf3::new(num_vars, clauses)
    }
}

/// Exhaustive truth-table satisfiability; the labeling oracle for the
/// CNF generators. Guarded to keep runtimes sane.
pub fn sat_bruteforce(cnf: &Cnf3) -> Result<bool, Error> {
    cnf.validate()?;
    if cnf.num_vars > 24 {
        return Err(Error::Usage(format!(
            "brute force capped at 24 variables, got {}",
            cnf.num_vars
        )));
    }
    'assignment: for bits in 0u64..(1u64 << cnf.num_vars) {
        for clause in &cnf.clauses {
            let sat = clause
                .iter()
                .any(|l| (bits >> (l.var - 1)) & 1 == u64::from(l.positive));
            if !sat {
                continue 'assignment;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// `+1` at dimension `2k-1`, `-1` at `2k` (1-based) for `x_k`;
/// negated for `not x_k`. Opposite literals sum to zero, which is what
/// both CNF reductions exploit.
fn literal_vector(l: Literal, dimension: usize) -> Vector {
    let mut v = Vector::zero(dimension);
    let sign = if l.positive { 1 } else { -1 };
    v[2 * l.var - 2] = rat(sign);
    v[2 * l.var - 1] = rat(-sign);
    v
}

/// One-sided boundedness game in dimension `2m`: one move per clause,
/// the hull of its three literal vectors. Player B wins iff the
/// formula is satisfiable (a satisfying assignment picks, per clause,
/// a true literal; the chosen vertices all live in the open halfspace
/// of the assignment's signing, so their hull misses `0`).
pub fn threesat_to_boundedness(cnf: &Cnf3) -> Result<MinkowskiGame, Error> {
    cnf.validate()?;
    let d = 2 * cnf.num_vars;
    let moves = cnf
        .clauses
        .iter()
        .map(|c| {
            let verts = c.iter().map(|&l| literal_vector(l, d)).collect();
            Move::from_vertices(VPolytope::new(d, verts)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    MinkowskiGame::one_sided_boundedness(d, moves)
}

/// One-sided structural-safety game in dimension `2m`: same clause
/// moves, `Safe` couples each variable's two coordinates by
/// `x_{j1} + x_{j2} = 0` inside `[-1,1]^2`. Player B wins iff the
/// formula is satisfiable, with the `±1` encoding of a satisfying
/// assignment as witness position.
pub fn threesat_to_structural(cnf: &Cnf3) -> Result<MinkowskiGame, Error> {
    cnf.validate()?;
    let d = 2 * cnf.num_vars;
    let moves = cnf
        .clauses
        .iter()
        .map(|c| {
            let verts = c.iter().map(|&l| literal_vector(l, d)).collect();
            Move::from_vertices(VPolytope::new(d, verts)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut constraints = Vec::with_capacity(3 * cnf.num_vars);
    for j in 0..cnf.num_vars {
        for k in [2 * j, 2 * j + 1] {
            let mut c = Vector::zero(d);
            c[k] = rat(1);
            constraints.push(LinearConstraint::new(c.clone(), Relation::Le, rat(1)));
            constraints.push(LinearConstraint::new(c, Relation::Ge, rat(-1)));
        }
        let mut c = Vector::zero(d);
        c[2 * j] = rat(1);
        c[2 * j + 1] = rat(1);
        constraints.push(LinearConstraint::new(c, Relation::Eq, rat(0)));
    }
    let g = MinkowskiGame {
        dimension: d,
        objective: Objective::StructuralSafety,
        moves_a: moves,
        moves_b: vec![Move::from_vertices(VPolytope::singleton(Vector::zero(d)))?],
        safe: Some(Region::from_constraints(d, constraints)?),
        goal: None,
        initial: None,
    };
    g.validate()?;
    Ok(g)
}

// ---------------------------------------------------------------------------
// two-counter machines

/// Edge labels. `Inc`/`Dec`/`IsZero`/`IsNotZero` belong to raw
/// machines; the split `IncA`/`IncB`/`DecA`/`DecB` labels only appear
/// after subdivision. The counter index is 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EdgeLabel {
    Inc { counter: u8 },
    Dec { counter: u8 },
    IsZero { counter: u8 },
    IsNotZero { counter: u8 },
    IncA { counter: u8 },
    IncB { counter: u8 },
    DecA { counter: u8 },
    DecB { counter: u8 },
}

/// Labels carried by states of a subdivided machine (the former test
/// edges move their label onto the inserted midpoint state).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StateLabel {
    IsZero { counter: u8 },
    IsNotZero { counter: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<StateLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<EdgeLabel>,
}

/// A two-counter machine over named control states. Counters start at
/// `counters`; `start` names the initial state. Machines may be given
/// raw (edge labels `Inc`/`Dec`/`IsZero`/`IsNotZero`, no state
/// labels) or pre-subdivided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCounterMachine {
    pub states: Vec<State>,
    pub edges: Vec<Edge>,
    pub start: String,
    pub counters: (u32, u32),
}

impl TwoCounterMachine {
    pub fn parse(text: &[u8]) -> Result<TwoCounterMachine, Error> {
        let m: TwoCounterMachine =
            serde_json::from_slice(text).map_err(|e| Error::Parse(e.to_string()))?;
        m.check_names()?;
        Ok(m)
    }

    fn check_names(&self) -> Result<(), Error> {
        let mut seen = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if seen.insert(s.name.as_str(), i).is_some() {
                return Err(Error::Validation {
                    path: format!("states[{i}]"),
                    message: format!("duplicate state name {:?}", s.name),
                });
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for end in [&e.from, &e.to] {
                if !seen.contains_key(end.as_str()) {
                    return Err(Error::Validation {
                        path: format!("edges[{i}]"),
                        message: format!("unknown state {end:?}"),
                    });
                }
            }
        }
        if !seen.contains_key(self.start.as_str()) {
            return Err(Error::validation("start", "unknown state"));
        }
        Ok(())
    }

    fn index_of(&self, name: &str) -> usize {
        self.states
            .iter()
            .position(|s| s.name == name)
            .expect("checked names")
    }

    fn is_raw(&self) -> bool {
        self.states.iter().all(|s| s.label.is_none())
            && self.edges.iter().all(|e| {
                !matches!(
                    e.label,
                    Some(
                        EdgeLabel::IncA { .. }
                            | EdgeLabel::IncB { .. }
                            | EdgeLabel::DecA { .. }
                            | EdgeLabel::DecB { .. }
                    )
                )
            })
    }

    /// Splits every edge with a fresh midpoint state: `Inc`/`Dec`
    /// become an `IncA`/`IncB` (`DecA`/`DecB`) pair, test labels move
    /// onto the midpoint. Already-subdivided machines pass through
    /// validation unchanged.
    pub fn subdivided(&self) -> Result<TwoCounterMachine, Error> {
        self.check_names()?;
        if !self.is_raw() {
            let m = self.clone();
            m.check_discipline()?;
            return Ok(m);
        }
        let mut states = self.states.clone();
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let label = e.label.ok_or_else(|| Error::Validation {
                path: format!("edges[{i}]"),
                message: "raw machine edges must be labeled".into(),
            })?;
            let counter = match label {
                EdgeLabel::Inc { counter }
                | EdgeLabel::Dec { counter }
                | EdgeLabel::IsZero { counter }
                | EdgeLabel::IsNotZero { counter } => counter,
                _ => unreachable!("is_raw checked"),
            };
            if counter > 1 {
                return Err(Error::Validation {
                    path: format!("edges[{i}]"),
                    message: format!("counter index {counter} out of range"),
                });
            }
            let mid = format!("{}__{}__{}", e.from, i, e.to);
            let (mid_label, first, second) = match label {
                EdgeLabel::Inc { counter } => (
                    None,
                    Some(EdgeLabel::IncA { counter }),
                    Some(EdgeLabel::IncB { counter }),
                ),
                EdgeLabel::Dec { counter } => (
                    None,
                    Some(EdgeLabel::DecA { counter }),
                    Some(EdgeLabel::DecB { counter }),
                ),
                EdgeLabel::IsZero { counter } => (Some(StateLabel::IsZero { counter }), None, None),
                EdgeLabel::IsNotZero { counter } => {
                    (Some(StateLabel::IsNotZero { counter }), None, None)
                }
                _ => unreachable!(),
            };
            states.push(State {
                name: mid.clone(),
                label: mid_label,
            });
            edges.push(Edge {
                from: e.from.clone(),
                to: mid.clone(),
                label: first,
            });
            edges.push(Edge {
                from: mid,
                to: e.to.clone(),
                label: second,
            });
        }
        let m = TwoCounterMachine {
            states,
            edges,
            start: self.start.clone(),
            counters: self.counters,
        };
        m.check_discipline()?;
        Ok(m)
    }

    /// Out-degree and label discipline of subdivided machines:
    /// out-degree at most 2; two outgoing edges only when both are
    /// unlabeled and lead to an `IsZero`/`IsNotZero` pair on one
    /// counter; an `IncA`/`DecA` edge is continued by the matching
    /// `IncB`/`DecB` edge.
    fn check_discipline(&self) -> Result<(), Error> {
        let mut out: Vec<Vec<&Edge>> = vec![Vec::new(); self.states.len()];
        for e in &self.edges {
            out[self.index_of(&e.from)].push(e);
        }
        for (qi, outgoing) in out.iter().enumerate() {
            let path = || format!("states[{qi}]");
            match outgoing.len() {
                0 | 1 => {}
                2 => {
                    let mut labels = Vec::new();
                    for e in outgoing {
                        if e.label.is_some() {
                            return Err(Error::Validation {
                                path: path(),
                                message: "branching edges must be unlabeled".into(),
                            });
                        }
                        labels.push(self.states[self.index_of(&e.to)].label);
                    }
                    let ok = matches!(
                        (labels[0], labels[1]),
                        (
                            Some(StateLabel::IsZero { counter: a }),
                            Some(StateLabel::IsNotZero { counter: b }),
                        ) | (
                            Some(StateLabel::IsNotZero { counter: a }),
                            Some(StateLabel::IsZero { counter: b }),
                        ) if a == b
                    );
                    if !ok {
                        return Err(Error::Validation {
                            path: path(),
                            message: "branch targets must carry a matching zero-test pair".into(),
                        });
                    }
                }
                n => {
                    return Err(Error::Validation {
                        path: path(),
                        message: format!("out-degree {n} exceeds 2"),
                    })
                }
            }
            for e in outgoing {
                let followup = |want: EdgeLabel| -> Result<(), Error> {
                    let next = &out[self.index_of(&e.to)];
                    if next.len() == 1 && next[0].label == Some(want) {
                        Ok(())
                    } else {
                        Err(Error::Validation {
                            path: path(),
                            message: format!("edge {:?} -> {:?} lacks its second half", e.from, e.to),
                        })
                    }
                };
                match e.label {
                    Some(EdgeLabel::IncA { counter }) => followup(EdgeLabel::IncB { counter })?,
                    Some(EdgeLabel::DecA { counter }) => followup(EdgeLabel::DecB { counter })?,
                    Some(
                        EdgeLabel::Inc { .. }
                        | EdgeLabel::Dec { .. }
                        | EdgeLabel::IsZero { .. }
                        | EdgeLabel::IsNotZero { .. },
                    ) => {
                        return Err(Error::Validation {
                            path: path(),
                            message: "raw label on a subdivided machine".into(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// The counter-plane part of an edge's move: a pair of vertices in
/// the `(x, y)` plane of the touched counter, zero elsewhere.
fn xy_vertices(label: Option<EdgeLabel>) -> (u8, Vec<(i64, i64)>) {
    match label {
        None => (0, vec![(0, 0)]),
        Some(EdgeLabel::IncA { counter }) => (counter, vec![(0, 0), (1, -1)]),
        Some(EdgeLabel::IncB { counter }) => (counter, vec![(0, 0), (-1, 0)]),
        Some(EdgeLabel::DecA { counter }) => (counter, vec![(0, 0), (1, 0)]),
        Some(EdgeLabel::DecB { counter }) => (counter, vec![(0, 0), (-1, 1)]),
        Some(_) => unreachable!("raw labels rejected by discipline check"),
    }
}

/// Interval blocks whose hull is the safe set: every state keeps all
/// four counter coordinates in `[0,1]`; a `IsNotZero` state caps the
/// tested `y` at `7/10`, a `IsZero` state pins it to `1`.
fn safe_block_vertices(d: usize, q: usize, label: Option<StateLabel>) -> Vec<Vector> {
    let y_range = |c: u8| -> [(Rational, Rational); 4] {
        let mut r = [
            (rat(0), rat(1)),
            (rat(0), rat(1)),
            (rat(0), rat(1)),
            (rat(0), rat(1)),
        ];
        let y = 1 + 2 * c as usize;
        match label {
            Some(StateLabel::IsNotZero { .. }) => r[y] = (rat(0), Rational::new(7.into(), 10.into())),
            Some(StateLabel::IsZero { .. }) => r[y] = (rat(1), rat(1)),
            None => {}
        }
        r
    };
    let ranges = y_range(match label {
        Some(StateLabel::IsZero { counter } | StateLabel::IsNotZero { counter }) => counter,
        None => 0,
    });
    let mut out = Vec::new();
    for bits in 0..16u8 {
        let mut v = Vector::zero(d);
        let mut degenerate_dup = false;
        for (k, (lo, hi)) in ranges.iter().enumerate() {
            let pick_hi = (bits >> k) & 1 == 1;
            if pick_hi && lo == hi {
                degenerate_dup = true;
                break;
            }
            v[k] = if pick_hi { hi.clone() } else { lo.clone() };
        }
        if degenerate_dup {
            continue;
        }
        v[4 + q] = rat(1);
        out.push(v);
    }
    out
}

/// Reduces a two-counter machine to a one-sided safety-reachability
/// game in dimension `4 + |Q|`. Counter value `k` is encoded as
/// `y = 2^{-k}`; each edge is a Player A move shifting mass between
/// `x` and `y` of the touched counter and moving the control-state
/// indicator; `Goal` (positions where Player B mishandled the halving
/// protocol, `y != x != 0` on some counter) is winning for Player A.
/// Player A wins iff the machine has an infinite valid computation.
///
/// The output targets the native safety-reachability iterator: `Goal`
/// is open, so the closed-polytope lifting to a plain safety game
/// does not apply.
pub fn cm2_to_safety_reach(machine: &TwoCounterMachine) -> Result<MinkowskiGame, Error> {
    let m = machine.subdivided()?;
    let nq = m.states.len();
    let d = 4 + nq;

    let mut out_degree = vec![0usize; nq];
    for e in &m.edges {
        out_degree[m.index_of(&e.from)] += 1;
    }

    let mut moves = Vec::with_capacity(m.edges.len());
    for e in &m.edges {
        let (counter, xy) = xy_vertices(e.label);
        let (qi, qf) = (m.index_of(&e.from), m.index_of(&e.to));
        let base = 2 * counter as usize;
        let verts = xy
            .into_iter()
            .map(|(x, y)| {
                let mut v = Vector::zero(d);
                v[base] = rat(x);
                v[base + 1] = rat(y);
                v[4 + qi] += rat(-1);
                v[4 + qf] += rat(1);
                v
            })
            .collect();
        moves.push(Move::from_vertices(VPolytope::new(d, verts)?)?);
    }

    let mut hull_vertices = Vec::new();
    for (q, s) in m.states.iter().enumerate() {
        if s.label.is_none() && out_degree[q] == 0 {
            continue; // halted: no safe block
        }
        hull_vertices.extend(safe_block_vertices(d, q, s.label));
    }
    if hull_vertices.is_empty() {
        return Err(Error::EmptyInput("machine has no live states"));
    }
    let safe_piece = to_halfspaces(&VPolytope::new(d, hull_vertices)?)?;
    let safe = Region::new(d, vec![safe_piece])?;

    // y != x != 0 on either counter. Deliberately not intersected
    // with Safe: a resolution that mishandles the halving protocol is
    // punished even when it simultaneously escapes Safe (otherwise the
    // resolver could overshoot the x-restoring half of an increment
    // past x = 0 and win every game containing one).
    let mut mishandled = Region::empty(d);
    for counter in 0..2usize {
        let (x, y) = (2 * counter, 2 * counter + 1);
        for x_rel in [Relation::Lt, Relation::Gt] {
            for xy_rel in [Relation::Lt, Relation::Gt] {
                let mut cx = Vector::zero(d);
                cx[x] = rat(1);
                let mut cxy = Vector::zero(d);
                cxy[y] = rat(1);
                cxy[x] = rat(-1);
                mishandled = mishandled.union(&Region::from_constraints(
                    d,
                    vec![
                        LinearConstraint::new(cx, x_rel, rat(0)),
                        LinearConstraint::new(cxy, xy_rel, rat(0)),
                    ],
                )?)?;
            }
        }
    }
    let goal = mishandled;

    let mut initial = Vector::zero(d);
    initial[1] = Rational::new(1.into(), (1i64 << m.counters.0.min(62)).into());
    initial[3] = Rational::new(1.into(), (1i64 << m.counters.1.min(62)).into());
    initial[4 + m.index_of(&m.start)] = rat(1);

    let g = MinkowskiGame {
        dimension: d,
        objective: Objective::SafetyReachability,
        moves_a: moves,
        moves_b: vec![Move::from_vertices(VPolytope::singleton(Vector::zero(d)))?],
        safe: Some(safe),
        goal: Some(goal),
        initial: Some(initial),
    };
    g.validate()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundedness::decide_findwinner;
    use crate::model::Winner;
    use crate::rational::ratio;
    use crate::regions::DEFAULT_PIECE_CEILING;
    use crate::safety::decide_structural;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn cnf(num_vars: usize, clauses: &[[i64; 3]]) -> Cnf3 {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.map(|v| Literal {
                    var: v.unsigned_abs() as usize,
                    positive: v > 0,
                })
            })
            .collect();
        Cnf3::new(num_vars, clauses).unwrap()
    }

    #[test]
    fn sat_bruteforce_basics() {
        assert!(sat_bruteforce(&cnf(1, &[[1, 1, 1]])).unwrap());
        assert!(!sat_bruteforce(&cnf(1, &[[1, 1, 1], [-1, -1, -1]])).unwrap());
        assert!(sat_bruteforce(&cnf(2, &[])).unwrap());
        assert!(sat_bruteforce(&Cnf3 { num_vars: 25, clauses: vec![] }).is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c a comment\np cnf 3 2\n1 -2 3 0\n-1 2 0\n";
        let parsed = Cnf3::parse_dimacs(text).unwrap();
        assert_eq!(parsed, cnf(3, &[[1, -2, 3], [-1, 2, 2]]));
        assert!(Cnf3::parse_dimacs("p cnf 2 1\n1 2 1 2 0\n").is_err());
        assert!(Cnf3::parse_dimacs("1 2 0\n").is_err());
        assert!(Cnf3::parse_dimacs("p cnf 2 1\n1 2\n").is_err());
    }

    #[test]
    fn clause_move_has_the_documented_vertices() {
        let g = threesat_to_boundedness(&cnf(3, &[[1, -2, 3]])).unwrap();
        assert_eq!(g.dimension, 6);
        let verts = g.moves_a[0].vertices();
        let expect = [
            Vector::from_ints(&[1, -1, 0, 0, 0, 0]),
            Vector::from_ints(&[0, 0, -1, 1, 0, 0]),
            Vector::from_ints(&[0, 0, 0, 0, 1, -1]),
        ];
        for e in &expect {
            assert!(verts.contains(e), "missing {e:?}");
        }
        assert_eq!(verts.len(), 3);
    }

    #[test]
    fn boundedness_reduction_on_tiny_formulas() {
        // UNSAT: x and not-x
        let g = threesat_to_boundedness(&cnf(1, &[[1, 1, 1], [-1, -1, -1]])).unwrap();
        assert_eq!(decide_findwinner(&g).unwrap().winner, Winner::PlayerA);
        // SAT: single clause
        let g = threesat_to_boundedness(&cnf(2, &[[1, -2, 2]])).unwrap();
        assert_eq!(decide_findwinner(&g).unwrap().winner, Winner::PlayerB);
    }

    #[test]
    fn structural_safe_set_couples_the_coordinate_pairs() {
        let g = threesat_to_structural(&cnf(1, &[[1, 1, 1]])).unwrap();
        let safe = g.safe.as_ref().unwrap();
        assert!(safe.contains_point(&Vector::from_ints(&[1, -1])).unwrap());
        assert!(safe.contains_point(&Vector::from_ints(&[-1, 1])).unwrap());
        assert!(safe.contains_point(&Vector::from_ints(&[0, 0])).unwrap());
        assert!(!safe.contains_point(&Vector::from_ints(&[1, 1])).unwrap());
        assert!(!safe.contains_point(&Vector(vec![ratio(1, 2), ratio(1, 2)])).unwrap());
    }

    #[test]
    fn structural_reduction_on_tiny_formulas() {
        let g = threesat_to_structural(&cnf(1, &[[1, 1, 1], [-1, -1, -1]])).unwrap();
        let (w, _) = decide_structural(&g, DEFAULT_PIECE_CEILING).unwrap();
        assert_eq!(w, Winner::PlayerA);
        let g = threesat_to_structural(&cnf(1, &[[1, 1, 1]])).unwrap();
        let (w, v) = decide_structural(&g, DEFAULT_PIECE_CEILING).unwrap();
        assert_eq!(w, Winner::PlayerB);
        // witness encodes the satisfying assignment x1 = true: x11 = 1
        let v = v.unwrap();
        assert_eq!(v[0], rat(1));
        assert_eq!(v[1], rat(-1));
    }

    fn random_cnf(rng: &mut ChaCha8Rng, max_vars: usize, max_clauses: usize) -> Cnf3 {
        let m = rng.gen_range(1..=max_vars);
        let n = rng.gen_range(1..=max_clauses);
        let clauses = (0..n)
            .map(|_| {
                [0; 3].map(|_| Literal {
                    var: rng.gen_range(1..=m),
                    positive: rng.gen_bool(0.5),
                })
            })
            .collect();
        Cnf3::new(m, clauses).unwrap()
    }

    #[test]
    fn boundedness_reduction_matches_sat_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let cnf = random_cnf(&mut rng, 3, 3);
            let expected = if sat_bruteforce(&cnf).unwrap() {
                Winner::PlayerB
            } else {
                Winner::PlayerA
            };
            let g = threesat_to_boundedness(&cnf).unwrap();
            assert_eq!(
                crate::boundedness::decide_bruteforce(&g).unwrap().winner,
                expected,
                "{cnf:?}"
            );
        }
    }

    #[test]
    fn structural_reduction_matches_sat_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let cnf = random_cnf(&mut rng, 3, 3);
            let expected = if sat_bruteforce(&cnf).unwrap() {
                Winner::PlayerB
            } else {
                Winner::PlayerA
            };
            let g = threesat_to_structural(&cnf).unwrap();
            let (w, _) = decide_structural(&g, DEFAULT_PIECE_CEILING).unwrap();
            assert_eq!(w, expected, "{cnf:?}");
        }
    }

    fn raw_edge(from: &str, to: &str, label: EdgeLabel) -> Edge {
        Edge {
            from: from.into(),
            to: to.into(),
            label: Some(label),
        }
    }

    fn plain_state(name: &str) -> State {
        State {
            name: name.into(),
            label: None,
        }
    }

    #[test]
    fn subdivision_splits_and_relabels() {
        let m = TwoCounterMachine {
            states: vec![plain_state("q0"), plain_state("q1"), plain_state("q2")],
            edges: vec![
                raw_edge("q0", "q1", EdgeLabel::IsZero { counter: 0 }),
                raw_edge("q0", "q2", EdgeLabel::IsNotZero { counter: 0 }),
                raw_edge("q1", "q0", EdgeLabel::Inc { counter: 0 }),
                raw_edge("q2", "q0", EdgeLabel::Dec { counter: 0 }),
            ],
            start: "q0".into(),
            counters: (0, 0),
        };
        let s = m.subdivided().unwrap();
        assert_eq!(s.states.len(), 7);
        assert_eq!(s.edges.len(), 8);
        assert_eq!(
            s.states
                .iter()
                .filter(|st| matches!(st.label, Some(StateLabel::IsZero { counter: 0 })))
                .count(),
            1
        );
        // subdividing again is the identity
        assert_eq!(s.subdivided().unwrap(), s);
    }

    #[test]
    fn discipline_rejects_labeled_branches() {
        let m = TwoCounterMachine {
            states: vec![plain_state("q0"), plain_state("q1"), plain_state("q2")],
            edges: vec![
                raw_edge("q0", "q1", EdgeLabel::IncA { counter: 0 }),
                raw_edge("q0", "q2", EdgeLabel::IncA { counter: 0 }),
            ],
            start: "q0".into(),
            counters: (0, 0),
        };
        assert!(m.subdivided().is_err());
    }

    fn looping_machine() -> TwoCounterMachine {
        // q0 --INC0--> q0: runs forever
        TwoCounterMachine {
            states: vec![plain_state("q0")],
            edges: vec![raw_edge("q0", "q0", EdgeLabel::Inc { counter: 0 })],
            start: "q0".into(),
            counters: (0, 0),
        }
    }

    #[test]
    fn generated_game_shape() {
        let g = cm2_to_safety_reach(&looping_machine()).unwrap();
        // one mid state added: |Q| = 2, d = 6
        assert_eq!(g.dimension, 6);
        assert_eq!(g.moves_a.len(), 2);
        let inca = g.moves_a[0].vertices();
        assert!(inca.contains(&Vector::from_ints(&[0, 0, 0, 0, -1, 1])));
        assert!(inca.contains(&Vector::from_ints(&[1, -1, 0, 0, -1, 1])));
        assert_eq!(g.initial, Some(Vector::from_ints(&[0, 1, 0, 1, 1, 0])));
        assert!(g.safe.as_ref().unwrap().contains_point(g.initial.as_ref().unwrap()).unwrap());
        // goal excludes the start
        assert!(!g.goal.as_ref().unwrap().contains_point(g.initial.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn initial_positions_stay_safe_for_small_counters() {
        for n0 in 0..=4u32 {
            for n1 in 0..=4u32 {
                let mut m = looping_machine();
                m.counters = (n0, n1);
                let g = cm2_to_safety_reach(&m).unwrap();
                assert!(
                    g.safe
                        .as_ref()
                        .unwrap()
                        .contains_point(g.initial.as_ref().unwrap())
                        .unwrap(),
                    "n0={n0} n1={n1}"
                );
            }
        }
    }

    #[test]
    fn goal_flags_mishandled_halving() {
        let g = cm2_to_safety_reach(&looping_machine()).unwrap();
        let goal = g.goal.as_ref().unwrap();
        // x = 1/4, y = 1: B moved mass off the protocol
        let mut p = Vector(vec![ratio(1, 4), rat(1), rat(0), rat(1), rat(1), rat(0)]);
        assert!(goal.contains_point(&p).unwrap());
        // x = 0 is always protocol-conform
        p[0] = rat(0);
        assert!(!goal.contains_point(&p).unwrap());
        // x = y = 1/2 is the halving handshake
        p[0] = ratio(1, 2);
        p[1] = ratio(1, 2);
        assert!(!goal.contains_point(&p).unwrap());
    }

    #[test]
    fn decrement_at_zero_loses() {
        // q0 --DEC0--> q1 (sink), counters start at 0
        let m = TwoCounterMachine {
            states: vec![plain_state("q0"), plain_state("q1")],
            edges: vec![raw_edge("q0", "q1", EdgeLabel::Dec { counter: 0 })],
            start: "q0".into(),
            counters: (0, 0),
        };
        let g = cm2_to_safety_reach(&m).unwrap();
        let verdict =
            crate::safety::safety_reach_iterate(&g, 8, DEFAULT_PIECE_CEILING).unwrap();
        assert_eq!(verdict.winner(), Winner::PlayerB);
    }

    #[test]
    fn machine_json_round_trip() {
        let m = looping_machine().subdivided().unwrap();
        let text = serde_json::to_vec(&m).unwrap();
        assert_eq!(TwoCounterMachine::parse(&text).unwrap(), m);
        assert!(TwoCounterMachine::parse(b"{\"states\":[]}").is_err());
    }
}
