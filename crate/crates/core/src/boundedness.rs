//! Boundedness deciders: an exhaustive vertex-tuple check and an
//! independent separating-hyperplane enumeration. Both return the same
//! winner on every game; Player B verdicts carry a machine-checkable
//! divergence certificate.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{hull_membership, rank_of, separates, separating_direction};
use crate::model::{MinkowskiGame, Objective, Winner};
use crate::rational::{format_rational, parse_rational, Rational, Vector};

/// Proof that Player B forces divergence: resolving each `A_i` to the
/// chosen vertex and always playing `b_move` gains at least `drift`
/// along `direction` every round, whatever Player A does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergenceCertificate {
    /// One vertex index into `Ver(A_i)` per move of Player A.
    pub vertex_choice: Vec<usize>,
    /// Index of the B move to play every round.
    pub b_move: usize,
    pub direction: Vector,
    pub drift: Rational,
}

#[derive(Clone, Debug)]
pub struct BoundednessOutcome {
    pub winner: Winner,
    pub certificate: Option<DivergenceCertificate>,
}

impl BoundednessOutcome {
    fn player_a() -> Self {
        BoundednessOutcome {
            winner: Winner::PlayerA,
            certificate: None,
        }
    }

    fn player_b(cert: DivergenceCertificate) -> Self {
        BoundednessOutcome {
            winner: Winner::PlayerB,
            certificate: Some(cert),
        }
    }
}

fn require_boundedness(g: &MinkowskiGame) -> Result<(), Error> {
    if g.objective != Objective::Boundedness {
        return Err(Error::Usage(
            "boundedness deciders require objective = boundedness".into(),
        ));
    }
    g.validate()
}

/// All index tuples `(i_0..i_{n-1})` with `i_k < sizes[k]`, in
/// lexicographic order.
pub(crate) fn index_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for prefix in &out {
            for i in 0..s {
                let mut t = prefix.clone();
                t.push(i);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Evaluates one (vertex tuple, B move) pair of the exhaustive check;
/// `Some(cert)` when the pair witnesses a Player B win.
fn bruteforce_witness(
    g: &MinkowskiGame,
    tuple: &[usize],
    b_idx: usize,
) -> Result<Option<DivergenceCertificate>, Error> {
    let points = sum_points(g, tuple, b_idx);
    if hull_membership(&Vector::zero(g.dimension), &points)?.is_some() {
        return Ok(None);
    }
    let (direction, drift) = separating_direction(&points)?
        .expect("0 outside the hull admits a separating direction");
    Ok(Some(DivergenceCertificate {
        vertex_choice: tuple.to_vec(),
        b_move: b_idx,
        direction,
        drift,
    }))
}

/// `{a_i + b : i <= n, b in Ver(B)}` for the chosen vertex tuple.
fn sum_points(g: &MinkowskiGame, tuple: &[usize], b_idx: usize) -> Vec<Vector> {
    let b = &g.moves_b[b_idx];
    let mut points = Vec::new();
    for (i, &vi) in tuple.iter().enumerate() {
        let a = &g.moves_a[i].vertices()[vi];
        for bv in b.vertices() {
            points.push(a + bv);
        }
    }
    points
}

/// Runs `eval` over `work` and returns the first `Some` in input
/// order, or `None`. Parallel when the `parallel` feature is on;
/// `find_first` keeps the reported witness deterministic.
pub(crate) fn first_witness<W, T, F>(work: &[W], eval: F) -> Result<Option<T>, Error>
where
    W: Sync,
    T: Send,
    F: Fn(&W) -> Result<Option<T>, Error> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let hit = work
            .par_iter()
            .map(|w| eval(w))
            .find_first(|r| !matches!(r, Ok(None)));
        match hit {
            None => Ok(None),
            Some(r) => r,
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        for w in work {
            if let Some(t) = eval(w)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }
}

/// Exhaustive decider: Player A wins iff `0` lies in
/// `CH{a_i} + CH(B)` for every vertex tuple `(a_i)` and every `B`.
pub fn decide_bruteforce(g: &MinkowskiGame) -> Result<BoundednessOutcome, Error> {
    require_boundedness(g)?;
    let sizes: Vec<usize> = g.moves_a.iter().map(|m| m.vertices().len()).collect();
    let mut work: Vec<(Vec<usize>, usize)> = Vec::new();
    for tuple in index_tuples(&sizes) {
        for b_idx in 0..g.moves_b.len() {
            work.push((tuple.clone(), b_idx));
        }
    }
    let witness = first_witness(&work, |(tuple, b_idx)| {
        bruteforce_witness(g, tuple, *b_idx)
    })?;
    Ok(match witness {
        Some(cert) => BoundednessOutcome::player_b(cert),
        None => BoundednessOutcome::player_a(),
    })
}

/// All `k`-element index combinations with repetition from `0..n`,
/// lexicographic (nondecreasing tuples).
fn combinations_with_repetition(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for prefix in &out {
            let lo = prefix.last().copied().unwrap_or(0);
            for i in lo..n {
                let mut t = prefix.clone();
                t.push(i);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Checks whether the affine hull of one candidate tuple witnesses a
/// Player B win against `B_j`: every move `A_i` must admit a vertex
/// `a_i` with `a_i + B_j` on the far side. Returns the certificate.
fn tuple_witness(
    g: &MinkowskiGame,
    points: &[Vector],
    tuple: &[usize],
    b_idx: usize,
) -> Result<Option<DivergenceCertificate>, Error> {
    let d = g.dimension;
    let anchors: Vec<Vector> = tuple.iter().map(|&i| points[i].clone()).collect();
    let diffs: Vec<Vector> = anchors[1..].iter().map(|x| x - &anchors[0]).collect();
    if rank_of(&diffs) != d - 1 {
        return Ok(None);
    }
    let b_verts = g.moves_b[b_idx].vertices();
    let mut choice = Vec::with_capacity(g.moves_a.len());
    for a in &g.moves_a {
        let found = a.vertices().iter().position(|av| {
            let targets: Vec<Vector> = b_verts.iter().map(|bv| av + bv).collect();
            separates(&anchors, &targets).unwrap_or(false)
        });
        match found {
            Some(vi) => choice.push(vi),
            None => return Ok(None),
        }
    }
    // The tuple covers every move; extract the drift certificate from
    // the summed vertex cloud (0 is strictly outside its hull).
    let points = sum_points(g, &choice, b_idx);
    let (direction, drift) = separating_direction(&points)?
        .expect("covered tuple implies 0 outside the hull");
    Ok(Some(DivergenceCertificate {
        vertex_choice: choice,
        b_move: b_idx,
        direction,
        drift,
    }))
}

/// Hyperplane-enumeration decider: for each `B_j`, searches for `d`
/// candidate points whose affine hull separates the origin from some
/// vertex translate of every `A_i`. Agrees with `decide_bruteforce`.
pub fn decide_findwinner(g: &MinkowskiGame) -> Result<BoundednessOutcome, Error> {
    require_boundedness(g)?;
    let d = g.dimension;
    for b_idx in 0..g.moves_b.len() {
        // candidate points: all vertex sums a + b, plus the basis
        let mut points: Vec<Vector> = Vec::new();
        for a in &g.moves_a {
            for av in a.vertices() {
                for bv in g.moves_b[b_idx].vertices() {
                    let p = av + bv;
                    if !points.contains(&p) {
                        points.push(p);
                    }
                }
            }
        }
        for i in 0..d {
            let e = Vector::unit(d, i);
            if !points.contains(&e) {
                points.push(e);
            }
        }
        let tuples = combinations_with_repetition(points.len(), d);
        let witness = first_witness(&tuples, |tuple| tuple_witness(g, &points, tuple, b_idx))?;
        if let Some(cert) = witness {
            return Ok(BoundednessOutcome::player_b(cert));
        }
    }
    Ok(BoundednessOutcome::player_a())
}

/// Exact certificate check: `direction . (a_i + b) >= drift > 0` for
/// the chosen vertex of every `A_i` and every vertex of the B move.
pub fn verify_divergence_certificate(
    g: &MinkowskiGame,
    cert: &DivergenceCertificate,
) -> Result<bool, Error> {
    if cert.vertex_choice.len() != g.moves_a.len() {
        return Err(Error::Precondition(format!(
            "certificate chooses {} vertices for {} moves",
            cert.vertex_choice.len(),
            g.moves_a.len()
        )));
    }
    if cert.b_move >= g.moves_b.len() {
        return Err(Error::Precondition(format!(
            "b_move {} out of range",
            cert.b_move
        )));
    }
    for (i, &vi) in cert.vertex_choice.iter().enumerate() {
        if vi >= g.moves_a[i].vertices().len() {
            return Err(Error::Precondition(format!(
                "vertex_choice[{i}] = {vi} out of range"
            )));
        }
    }
    if cert.direction.dim() != g.dimension {
        return Err(Error::DimensionMismatch {
            expected: g.dimension,
            got: cert.direction.dim(),
        });
    }
    if !cert.drift.is_positive() || cert.direction.is_zero() {
        return Ok(false);
    }
    let b_verts = g.moves_b[cert.b_move].vertices();
    for (i, &vi) in cert.vertex_choice.iter().enumerate() {
        let a = &g.moves_a[i].vertices()[vi];
        for bv in b_verts {
            if cert.direction.dot(&(a + bv)) < cert.drift {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// wire format for `--emit-certificate`

#[derive(Serialize, Deserialize)]
struct CertificateWire {
    vertex_choice: Vec<usize>,
    b_move: usize,
    direction: Vec<String>,
    drift: String,
}

impl Serialize for DivergenceCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateWire {
            vertex_choice: self.vertex_choice.clone(),
            b_move: self.b_move,
            direction: self.direction.0.iter().map(format_rational).collect(),
            drift: format_rational(&self.drift),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivergenceCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = CertificateWire::deserialize(d)?;
        let direction: Result<Vec<Rational>, _> =
            wire.direction.iter().map(|s| parse_rational(s)).collect();
        Ok(DivergenceCertificate {
            vertex_choice: wire.vertex_choice,
            b_move: wire.b_move,
            direction: Vector(
                direction.map_err(|_| D::Error::custom("direction: malformed rational"))?,
            ),
            drift: parse_rational(&wire.drift)
                .map_err(|_| D::Error::custom("drift: malformed rational"))?,
        })
    }
}
