//! Game data model: moves, the game record for all objectives,
//! validation with field-path error messages, and JSON (de)serialization
//! with a byte-stable canonical output form.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{
    canonicalize_vertices, enumerate_vertices, to_halfspaces, HPolyhedron, VPolytope,
};
use crate::rational::{format_rational, parse_rational, Rational, Vector};
use crate::regions::{ConstraintWire, Region};

/// A move: a nonempty closed bounded rational polytope. Stored in
/// V-representation with canonicalized vertices; an H input is
/// converted (and thereby checked bounded and nonempty) at parse time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub polytope: VPolytope,
}

impl Move {
    pub fn from_vertices(p: VPolytope) -> Result<Self, Error> {
        Ok(Move {
            polytope: VPolytope::new(p.dimension, canonicalize_vertices(p.vertices)?)?,
        })
    }

    pub fn from_halfspaces(h: &HPolyhedron) -> Result<Self, Error> {
        Move::from_vertices(enumerate_vertices(h)?)
    }

    pub fn dimension(&self) -> usize {
        self.polytope.dimension
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.polytope.vertices
    }

    pub fn halfspaces(&self) -> Result<HPolyhedron, Error> {
        to_halfspaces(&self.polytope)
    }

    /// True iff the move's point set is exactly `{0}`.
    pub fn is_zero_singleton(&self) -> bool {
        self.polytope.vertices.iter().all(Vector::is_zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Boundedness,
    Safety,
    SafetyReachability,
    StructuralSafety,
}

/// Winner tag. Deciders that produce certificates or iteration counts
/// return them alongside this tag in their own result types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    PlayerA,
    PlayerB,
    Unknown,
}

/// A Minkowski game over `R^d`: Player A owns `moves_a`, Player B owns
/// `moves_b`; the optional fields are required or ignored depending on
/// the objective (see `validate`).
#[derive(Clone, Debug)]
pub struct MinkowskiGame {
    pub dimension: usize,
    pub objective: Objective,
    pub moves_a: Vec<Move>,
    pub moves_b: Vec<Move>,
    pub safe: Option<Region>,
    pub goal: Option<Region>,
    pub initial: Option<Vector>,
}

impl MinkowskiGame {
    /// One-sided boundedness game: `moves_b = {{0}}`.
    pub fn one_sided_boundedness(dimension: usize, moves_a: Vec<Move>) -> Result<Self, Error> {
        let g = MinkowskiGame {
            dimension,
            objective: Objective::Boundedness,
            moves_a,
            moves_b: vec![Move::from_vertices(VPolytope::singleton(Vector::zero(
                dimension,
            )))?],
            safe: None,
            goal: None,
            initial: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// True iff Player B's move list denotes the single move `{0}`.
    pub fn is_single_sided(&self) -> bool {
        !self.moves_b.is_empty() && self.moves_b.iter().all(Move::is_zero_singleton)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.dimension == 0 {
            return Err(Error::validation("dimension", "must be positive"));
        }
        if self.moves_a.is_empty() {
            return Err(Error::validation("moves_a", "must be nonempty"));
        }
        if self.moves_b.is_empty() {
            return Err(Error::validation("moves_b", "must be nonempty"));
        }
        for (side, moves) in [("moves_a", &self.moves_a), ("moves_b", &self.moves_b)] {
            for (i, m) in moves.iter().enumerate() {
                if m.dimension() != self.dimension {
                    return Err(Error::validation(
                        format!("{side}[{i}]"),
                        format!("dimension {} != game dimension {}", m.dimension(), self.dimension),
                    ));
                }
            }
        }
        for (name, region) in [("safe", &self.safe), ("goal", &self.goal)] {
            if let Some(r) = region {
                if r.dimension != self.dimension {
                    return Err(Error::validation(
                        name,
                        format!("dimension {} != game dimension {}", r.dimension, self.dimension),
                    ));
                }
            }
        }
        if let Some(v) = &self.initial {
            if v.dim() != self.dimension {
                return Err(Error::validation(
                    "initial",
                    format!("dimension {} != game dimension {}", v.dim(), self.dimension),
                ));
            }
        }
        match self.objective {
            Objective::Boundedness => {}
            Objective::Safety | Objective::SafetyReachability => {
                let safe = self
                    .safe
                    .as_ref()
                    .ok_or_else(|| Error::validation("safe", "required for this objective"))?;
                let initial = self
                    .initial
                    .as_ref()
                    .ok_or_else(|| Error::validation("initial", "required for this objective"))?;
                if !safe.contains_point(initial)? {
                    return Err(Error::validation("initial", "initial \u{2209} safe"));
                }
                if self.objective == Objective::SafetyReachability {
                    // goal may extend beyond safe: a play that enters
                    // it at the moment it leaves safe still counts
                    self.goal
                        .as_ref()
                        .ok_or_else(|| Error::validation("goal", "required for this objective"))?;
                }
            }
            Objective::StructuralSafety => {
                if self.safe.is_none() {
                    return Err(Error::validation("safe", "required for this objective"));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// wire format

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum MoveWire {
    V { vertices: Vec<Vec<String>> },
    H { constraints: Vec<ConstraintWire> },
}

#[derive(Serialize, Deserialize)]
struct GameWire {
    dimension: usize,
    objective: Objective,
    moves_a: Vec<MoveWire>,
    moves_b: Vec<MoveWire>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    safe: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    goal: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    initial: Option<Vec<String>>,
}

fn parse_vector(raw: &[String], dim: usize, at: &str) -> Result<Vector, Error> {
    if raw.len() != dim {
        return Err(Error::validation(
            at,
            format!("expected {} coordinates, got {}", dim, raw.len()),
        ));
    }
    let coords: Result<Vec<Rational>, _> = raw.iter().map(|s| parse_rational(s)).collect();
    Ok(Vector(coords.map_err(|_| {
        Error::validation(at, "malformed rational")
    })?))
}

fn parse_move(wire: &MoveWire, dim: usize, at: &str) -> Result<Move, Error> {
    match wire {
        MoveWire::V { vertices } => {
            if vertices.is_empty() {
                return Err(Error::validation(format!("{at}.vertices"), "must be nonempty"));
            }
            let vs: Result<Vec<Vector>, Error> = vertices
                .iter()
                .enumerate()
                .map(|(i, raw)| parse_vector(raw, dim, &format!("{at}.vertices[{i}]")))
                .collect();
            Move::from_vertices(VPolytope::new(dim, vs?)?)
        }
        MoveWire::H { constraints } => {
            let cs: Result<Vec<_>, Error> = constraints
                .iter()
                .enumerate()
                .map(|(i, cw)| cw.to_constraint(dim, &format!("{at}.constraints[{i}]")))
                .collect();
            let h = HPolyhedron::new(dim, cs?)?;
            Move::from_halfspaces(&h).map_err(|e| match e {
                Error::Unbounded => Error::validation(at, "move unbounded"),
                Error::EmptyPolyhedron => Error::validation(at, "move empty"),
                other => other,
            })
        }
    }
}

/// Parses and fully validates a game from JSON bytes.
pub fn parse_game(text: &[u8]) -> Result<MinkowskiGame, Error> {
    let wire: GameWire =
        serde_json::from_slice(text).map_err(|e| Error::Parse(e.to_string()))?;
    if wire.dimension == 0 {
        return Err(Error::validation("dimension", "must be positive"));
    }
    let d = wire.dimension;
    let moves_a: Result<Vec<Move>, Error> = wire
        .moves_a
        .iter()
        .enumerate()
        .map(|(i, m)| parse_move(m, d, &format!("moves_a[{i}]")))
        .collect();
    let moves_b: Result<Vec<Move>, Error> = wire
        .moves_b
        .iter()
        .enumerate()
        .map(|(i, m)| parse_move(m, d, &format!("moves_b[{i}]")))
        .collect();
    let initial = wire
        .initial
        .as_ref()
        .map(|raw| parse_vector(raw, d, "initial"))
        .transpose()?;
    let game = MinkowskiGame {
        dimension: d,
        objective: wire.objective,
        moves_a: moves_a?,
        moves_b: moves_b?,
        safe: wire.safe,
        goal: wire.goal,
        initial,
    };
    game.validate()?;
    Ok(game)
}

/// Canonical serialization: moves always in V form with canonical
/// vertex order, rationals in lowest terms. Serializing a just-parsed
/// game is byte-stable under parse/serialize round trips.
pub fn serialize_game(g: &MinkowskiGame) -> Result<Vec<u8>, Error> {
    let move_wire = |m: &Move| MoveWire::V {
        vertices: m
            .vertices()
            .iter()
            .map(|v| v.0.iter().map(format_rational).collect())
            .collect(),
    };
    let wire = GameWire {
        dimension: g.dimension,
        objective: g.objective,
        moves_a: g.moves_a.iter().map(move_wire).collect(),
        moves_b: g.moves_b.iter().map(move_wire).collect(),
        safe: g.safe.clone(),
        goal: g.goal.clone(),
        initial: g
            .initial
            .as_ref()
            .map(|v| v.0.iter().map(format_rational).collect()),
    };
    let mut out = serde_json::to_vec_pretty(&wire).map_err(|e| Error::Parse(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct PolytopeFile {
    dimension: usize,
    #[serde(flatten)]
    body: MoveWire,
}

/// Parses a standalone polytope file (same `type: V|H` body as a
/// game's move, plus an explicit `dimension`).
pub fn parse_polytope(text: &[u8]) -> Result<Move, Error> {
    let wire: PolytopeFile =
        serde_json::from_slice(text).map_err(|e| Error::Parse(e.to_string()))?;
    if wire.dimension == 0 {
        return Err(Error::validation("dimension", "must be positive"));
    }
    parse_move(&wire.body, wire.dimension, "polytope")
}

/// Standalone polytope in canonical V form.
pub fn serialize_polytope_v(m: &Move) -> Result<Vec<u8>, Error> {
    let wire = PolytopeFile {
        dimension: m.dimension(),
        body: MoveWire::V {
            vertices: m
                .vertices()
                .iter()
                .map(|v| v.0.iter().map(format_rational).collect())
                .collect(),
        },
    };
    let mut out = serde_json::to_vec_pretty(&wire).map_err(|e| Error::Parse(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Standalone polytope in H form.
pub fn serialize_polytope_h(h: &HPolyhedron) -> Result<Vec<u8>, Error> {
    let wire = PolytopeFile {
        dimension: h.dimension,
        body: MoveWire::H {
            constraints: h.constraints.iter().map(ConstraintWire::from_constraint).collect(),
        },
    };
    let mut out = serde_json::to_vec_pretty(&wire).map_err(|e| Error::Parse(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_move(dim: usize, vs: &[&[i64]]) -> Move {
        Move::from_vertices(VPolytope::from_int_vertices(dim, vs)).unwrap()
    }

    #[test]
    fn one_sided_detection_uses_set_semantics() {
        let g = MinkowskiGame::one_sided_boundedness(1, vec![v_move(1, &[&[-1]]), v_move(1, &[&[1]])])
            .unwrap();
        assert!(g.is_single_sided());

        let mut two_zeros = g.clone();
        two_zeros.moves_b.push(v_move(1, &[&[0]]));
        assert!(two_zeros.is_single_sided());

        let mut fat = g;
        fat.moves_b = vec![v_move(1, &[&[-1], &[1]])];
        assert!(!fat.is_single_sided());
    }

    #[test]
    fn parse_valid_one_sided_game() {
        let text = br#"{
            "dimension": 1,
            "objective": "boundedness",
            "moves_a": [{"type":"V","vertices":[["-1"]]}, {"type":"V","vertices":[["1"]]}],
            "moves_b": [{"type":"V","vertices":[["0"]]}]
        }"#;
        let g = parse_game(text).unwrap();
        assert!(g.is_single_sided());
        assert_eq!(g.moves_a.len(), 2);
        assert_eq!(g.objective, Objective::Boundedness);
    }

    #[test]
    fn h_moves_are_converted_and_checked() {
        let ok = br#"{
            "dimension": 1,
            "objective": "boundedness",
            "moves_a": [{"type":"H","constraints":[
                {"coeffs":["1"],"rel":"<=","rhs":"1"},
                {"coeffs":["1"],"rel":">=","rhs":"0"}]}],
            "moves_b": [{"type":"V","vertices":[["0"]]}]
        }"#;
        let g = parse_game(ok).unwrap();
        assert_eq!(g.moves_a[0].vertices().len(), 2);

        let unbounded = br#"{
            "dimension": 1,
            "objective": "boundedness",
            "moves_a": [{"type":"H","constraints":[{"coeffs":["1"],"rel":">=","rhs":"0"}]}],
            "moves_b": [{"type":"V","vertices":[["0"]]}]
        }"#;
        match parse_game(unbounded) {
            Err(Error::Validation { path, message }) => {
                assert_eq!(path, "moves_a[0]");
                assert!(message.contains("unbounded"));
            }
            other => panic!("expected unbounded-move validation error, got {other:?}"),
        }
    }

    #[test]
    fn safety_requires_initial_inside_safe() {
        let text = br#"{
            "dimension": 1,
            "objective": "safety",
            "moves_a": [{"type":"V","vertices":[["0"]]}],
            "moves_b": [{"type":"V","vertices":[["0"]]}],
            "safe": {"dimension":1,"pieces":[[
                {"coeffs":["1"],"rel":">=","rhs":"0"},
                {"coeffs":["1"],"rel":"<=","rhs":"1"}]]},
            "initial": ["2"]
        }"#;
        match parse_game(text) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "initial"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_objective_fields_are_reported() {
        let text = br#"{
            "dimension": 1,
            "objective": "structural_safety",
            "moves_a": [{"type":"V","vertices":[["0"]]}],
            "moves_b": [{"type":"V","vertices":[["0"]]}]
        }"#;
        match parse_game(text) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "safe"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn serialize_is_byte_stable() {
        let text = br#"{
            "dimension": 2,
            "objective": "boundedness",
            "moves_a": [
                {"type":"H","constraints":[
                    {"coeffs":["1","0"],"rel":"<=","rhs":"1"},
                    {"coeffs":["-1","0"],"rel":"<=","rhs":"0"},
                    {"coeffs":["0","1"],"rel":"<=","rhs":"1"},
                    {"coeffs":["0","-1"],"rel":"<=","rhs":"0"}]},
                {"type":"V","vertices":[["1/2","2/4"]]}
            ],
            "moves_b": [{"type":"V","vertices":[["0","0"]]}]
        }"#;
        let once = serialize_game(&parse_game(text).unwrap()).unwrap();
        let twice = serialize_game(&parse_game(&once).unwrap()).unwrap();
        assert_eq!(once, twice);
        // canonical output reduces 2/4
        assert!(String::from_utf8(once.clone()).unwrap().contains("\"1/2\""));
        assert!(!String::from_utf8(once).unwrap().contains("2/4"));
    }

    #[test]
    fn reach_objective_requires_a_goal() {
        let text = br#"{
            "dimension": 1,
            "objective": "safety_reachability",
            "moves_a": [{"type":"V","vertices":[["0"]]}],
            "moves_b": [{"type":"V","vertices":[["0"]]}],
            "safe": {"dimension":1,"pieces":[[
                {"coeffs":["1"],"rel":">=","rhs":"0"},
                {"coeffs":["1"],"rel":"<=","rhs":"1"}]]},
            "initial": ["0"]
        }"#;
        match parse_game(text) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "goal"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }
}
