//! Constructive strategies for both players and a round simulator.
//!
//! Player A's general boundedness strategy runs three layers deep:
//! the position is kept as an exact weighted sum of per-move anchor
//! points (`BookkeepingState`-style fields on `GeneralStrategy`), the
//! choice of which move to play is a +1/-1 indexing game over the
//! move list (`PlusMinusState`), and the +1/-1 game itself is won by
//! convex approximation over the standard basis (`ConvexApproxState`).

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundedness::{verify_divergence_certificate, DivergenceCertificate};
use crate::error::Error;
use crate::geometry::{caratheodory_decompose, hull_membership};
use crate::model::{MinkowskiGame, Move};
use crate::rational::{Rational, Vector};

// ---------------------------------------------------------------------------
// convex approximation (the engine behind everything else)

/// Approximates a stream of points `v_k` from `CH(B)` by points of the
/// finite set `B`, keeping the running deviation `sum(v_k - u_k)`
/// inside `d CH(B) - c`.
#[derive(Clone, Debug)]
pub struct ConvexApproxState {
    pub base_set: Vec<Vector>,
    pub offset_c: Vector,
    pub deviation: Vector,
    dimension: usize,
}

impl ConvexApproxState {
    /// Requires `c` in `d CH(B)` so the zero deviation starts inside
    /// the invariant set.
    pub fn new(base_set: Vec<Vector>, offset_c: Vector) -> Result<Self, Error> {
        if base_set.is_empty() {
            return Err(Error::EmptyInput("convex approximation needs a base set"));
        }
        let dimension = base_set[0].dim();
        let d = Rational::from_integer((dimension as i64).into());
        let scaled: Vec<Rational> = offset_c.0.iter().map(|x| x / &d).collect();
        if hull_membership(&Vector(scaled), &base_set)?.is_none() {
            return Err(Error::Precondition(
                "offset c must lie in d * CH(base set)".into(),
            ));
        }
        Ok(ConvexApproxState {
            deviation: Vector::zero(dimension),
            base_set,
            offset_c,
            dimension,
        })
    }

    /// Standard basis with `c = (1, ..., 1)`; the +1/-1 configuration.
    pub fn standard_basis(dimension: usize) -> Self {
        ConvexApproxState {
            base_set: (0..dimension).map(|i| Vector::unit(dimension, i)).collect(),
            offset_c: Vector((0..dimension).map(|_| Rational::one()).collect()),
            deviation: Vector::zero(dimension),
            dimension,
        }
    }

    /// True iff `deviation + c` lies in `d CH(B)` (the invariant).
    pub fn invariant_holds(&self) -> Result<bool, Error> {
        let d = Rational::from_integer((self.dimension as i64).into());
        let shifted = &self.deviation + &self.offset_c;
        let scaled: Vec<Rational> = shifted.0.iter().map(|x| x / &d).collect();
        Ok(hull_membership(&Vector(scaled), &self.base_set)?.is_some())
    }
}

/// One approximation step: decomposes `(v + deviation + c) / (d+1)`
/// over the base set and returns the index of the maximum-weight
/// generator (lowest index on ties). The deviation invariant is
/// preserved because stripping the heaviest generator from a
/// `(d+1)`-fold hull point leaves a `d`-fold hull point.
pub fn convex_approx_respond(state: &mut ConvexApproxState, v: &Vector) -> Result<usize, Error> {
    if hull_membership(v, &state.base_set)?.is_none() {
        return Err(Error::Precondition(
            "input point outside the hull of the base set".into(),
        ));
    }
    let dplus1 = Rational::from_integer((state.dimension as i64 + 1).into());
    let target = Vector(
        (&(&(v + &state.deviation) + &state.offset_c)).0
            .iter()
            .map(|x| x / &dplus1)
            .collect(),
    );
    let decomp = caratheodory_decompose(&target, &state.base_set)?;
    let mut best: Option<(usize, &Rational)> = None;
    for (i, w) in &decomp {
        let better = match &best {
            None => true,
            Some((bi, bw)) => w > bw || (w == *bw && i < bi),
        };
        if better {
            best = Some((*i, w));
        }
    }
    let (idx, _) = best.expect("nonempty decomposition");
    let u = state.base_set[idx].clone();
    state.deviation = &(&state.deviation + v) - &u;
    Ok(idx)
}

/// Greedy variant: picks the base point nearest (squared Euclidean)
/// to `deviation + v`. Only keeps bounded deviation under the metric
/// hypothesis `d(x, B) = d(x, CH(B))` outside the hull; not checked.
pub fn convex_approx_respond_nearest(
    state: &mut ConvexApproxState,
    v: &Vector,
) -> Result<usize, Error> {
    let goal = &state.deviation + v;
    let mut best: Option<(usize, Rational)> = None;
    for (i, b) in state.base_set.iter().enumerate() {
        let diff = &goal - b;
        let dist2 = diff.dot(&diff);
        let better = match &best {
            None => true,
            Some((_, bd)) => dist2 < *bd,
        };
        if better {
            best = Some((i, dist2));
        }
    }
    let (idx, _) = best.expect("nonempty base set");
    state.deviation = &goal - &state.base_set[idx];
    Ok(idx)
}

// ---------------------------------------------------------------------------
// the +1/-1 game

/// State of the +1/-1 game with `d` positions: each round Player A
/// increments one component and Player B subtracts a stochastic
/// vector. Player A's embedded convex approximation keeps every
/// component of `accumulators` above `-d`.
#[derive(Clone, Debug)]
pub struct PlusMinusState {
    pub dimension: usize,
    pub accumulators: Vector,
    approx: ConvexApproxState,
    pending: Option<Vector>,
    started: bool,
}

impl PlusMinusState {
    pub fn new(dimension: usize) -> Self {
        PlusMinusState {
            dimension,
            accumulators: Vector::zero(dimension),
            approx: ConvexApproxState::standard_basis(dimension),
            pending: None,
            started: false,
        }
    }
}

fn check_stochastic(w: &Vector, dim: usize) -> Result<(), Error> {
    if w.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: w.dim(),
        });
    }
    if w.0.iter().any(Rational::is_negative) {
        return Err(Error::Precondition("stochastic vector has a negative component".into()));
    }
    let total: Rational = w.0.iter().sum();
    if !total.is_one() {
        return Err(Error::Precondition("stochastic vector must sum to 1".into()));
    }
    Ok(())
}

/// Player A's +1/-1 move: feeds the opponent's last stochastic vector
/// (absent only on the first round) into the convex approximation and
/// plays the returned index. Updates the accumulators on both events.
pub fn plusminus_player_a(
    state: &mut PlusMinusState,
    last_b_vector: Option<&Vector>,
) -> Result<usize, Error> {
    let idx = match last_b_vector {
        None => {
            if state.started {
                return Err(Error::Precondition(
                    "opponent vector required after the first round".into(),
                ));
            }
            0
        }
        Some(w) => {
            check_stochastic(w, state.dimension)?;
            state.accumulators = &state.accumulators - w;
            state.pending = Some(w.clone());
            convex_approx_respond(&mut state.approx, w)?
        }
    };
    state.started = true;
    state.accumulators[idx] += Rational::one();
    Ok(idx)
}

/// Player B's harmonic counter-strategy for the +1/-1 game.
///
/// `a_history` lists the indices Player A has played. When it already
/// contains the current round's index (length `round + 1`), B plays
/// `1/|T|` on a target set `T` that starts as all positions except
/// A's first choice and deterministically loses one element per round
/// (the element A just played, else the largest). The surviving
/// position accumulates exactly `-(1/(d-1) + ... + 1)` over `d - 1`
/// rounds. With only `round` entries (current choice unseen) it falls
/// back to uniform weight over the never-played positions.
pub fn plusminus_player_b_harmonic(
    dimension: usize,
    round: usize,
    a_history: &[usize],
) -> Result<Vector, Error> {
    if a_history.len() > round + 1 {
        return Err(Error::Precondition(format!(
            "history of {} entries is too long for round {round}",
            a_history.len()
        )));
    }
    if a_history.iter().any(|&i| i >= dimension) {
        return Err(Error::Precondition("history index out of range".into()));
    }
    let uniform_over = |targets: &[usize]| {
        let w = Rational::new(1.into(), (targets.len() as i64).into());
        let mut v = Vector::zero(dimension);
        for &t in targets {
            v[t] = w.clone();
        }
        v
    };
    if a_history.len() == round + 1 && dimension > 1 {
        let mut t: Vec<usize> = (0..dimension).filter(|&i| i != a_history[0]).collect();
        for &played in &a_history[1..] {
            if t.len() <= 1 {
                break;
            }
            if let Some(pos) = t.iter().position(|&x| x == played) {
                t.remove(pos);
            } else {
                t.pop(); // drop the largest
            }
        }
        if !t.is_empty() {
            return Ok(uniform_over(&t));
        }
    }
    let unplayed: Vec<usize> = (0..dimension)
        .filter(|i| !a_history.contains(i))
        .collect();
    if unplayed.is_empty() {
        Ok(uniform_over(&(0..dimension).collect::<Vec<_>>()))
    } else {
        Ok(uniform_over(&unplayed))
    }
}

// ---------------------------------------------------------------------------
// strategy interfaces and the simulator

/// Player A: chooses own moves, resolves B's moves to points.
pub trait PlayerAStrategy {
    fn choose_move(&mut self, g: &MinkowskiGame) -> Result<usize, Error>;
    fn observe_resolution(
        &mut self,
        g: &MinkowskiGame,
        a_idx: usize,
        point: &Vector,
    ) -> Result<(), Error>;
    fn resolve_b(&mut self, g: &MinkowskiGame, b_idx: usize) -> Result<Vector, Error>;
}

/// Player B: resolves A's moves to points, chooses own moves.
pub trait PlayerBStrategy {
    fn resolve_a(&mut self, g: &MinkowskiGame, a_idx: usize) -> Result<Vector, Error>;
    fn choose_move(&mut self, g: &MinkowskiGame) -> Result<usize, Error>;
}

/// Seeded random player: uniform move choice, uniform vertex
/// resolution. Serves as both an A- and a B-side adversary.
pub struct RandomStrategy {
    rng: ChaCha8Rng,
}

impl RandomStrategy {
    pub fn seeded(seed: u64) -> Self {
        RandomStrategy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn pick_vertex(&mut self, m: &Move) -> Vector {
        let k = self.rng.gen_range(0..m.vertices().len());
        m.vertices()[k].clone()
    }
}

impl PlayerAStrategy for RandomStrategy {
    fn choose_move(&mut self, g: &MinkowskiGame) -> Result<usize, Error> {
        Ok(self.rng.gen_range(0..g.moves_a.len()))
    }

    fn observe_resolution(&mut self, _: &MinkowskiGame, _: usize, _: &Vector) -> Result<(), Error> {
        Ok(())
    }

    fn resolve_b(&mut self, g: &MinkowskiGame, b_idx: usize) -> Result<Vector, Error> {
        Ok(self.pick_vertex(&g.moves_b[b_idx]))
    }
}

impl PlayerBStrategy for RandomStrategy {
    fn resolve_a(&mut self, g: &MinkowskiGame, a_idx: usize) -> Result<Vector, Error> {
        Ok(self.pick_vertex(&g.moves_a[a_idx]))
    }

    fn choose_move(&mut self, g: &MinkowskiGame) -> Result<usize, Error> {
        Ok(self.rng.gen_range(0..g.moves_b.len()))
    }
}

/// Result of a finite simulation: positions after every half-round
/// (starting with the initial position), the maximum infinity norm
/// reached, and the first trace index beyond the threshold, if any.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub trace: Vec<Vector>,
    pub max_norm: Rational,
    pub exceeded_at: Option<usize>,
}

/// Plays `rounds` full rounds. Every resolution is checked for
/// membership in the offered move; a violation aborts with an error
/// naming the offender.
pub fn simulate(
    g: &MinkowskiGame,
    a: &mut dyn PlayerAStrategy,
    b: &mut dyn PlayerBStrategy,
    rounds: usize,
    threshold: Option<&Rational>,
) -> Result<Simulation, Error> {
    let mut position = g
        .initial
        .clone()
        .unwrap_or_else(|| Vector::zero(g.dimension));
    let mut trace = vec![position.clone()];
    for _ in 0..rounds {
        let a_idx = a.choose_move(g)?;
        if a_idx >= g.moves_a.len() {
            return Err(Error::InconsistentStrategy {
                offender: format!("player A chose move index {a_idx}"),
            });
        }
        let pa = b.resolve_a(g, a_idx)?;
        // vertex answers skip the membership LP
        if !g.moves_a[a_idx].vertices().contains(&pa)
            && hull_membership(&pa, g.moves_a[a_idx].vertices())?.is_none()
        {
            return Err(Error::InconsistentStrategy {
                offender: format!("player B resolving moves_a[{a_idx}]"),
            });
        }
        a.observe_resolution(g, a_idx, &pa)?;
        position = &position + &pa;
        trace.push(position.clone());

        let b_idx = PlayerBStrategy::choose_move(b, g)?;
        if b_idx >= g.moves_b.len() {
            return Err(Error::InconsistentStrategy {
                offender: format!("player B chose move index {b_idx}"),
            });
        }
        let pb = a.resolve_b(g, b_idx)?;
        if !g.moves_b[b_idx].vertices().contains(&pb)
            && hull_membership(&pb, g.moves_b[b_idx].vertices())?.is_none()
        {
            return Err(Error::InconsistentStrategy {
                offender: format!("player A resolving moves_b[{b_idx}]"),
            });
        }
        position = &position + &pb;
        trace.push(position.clone());
    }
    let max_norm = trace
        .iter()
        .map(Vector::norm_inf)
        .max()
        .expect("trace contains the start");
    let exceeded_at = threshold.and_then(|t| trace.iter().position(|p| &p.norm_inf() > t));
    Ok(Simulation {
        trace,
        max_norm,
        exceeded_at,
    })
}

// ---------------------------------------------------------------------------
// Player A, single-sided games

/// Winning Player A strategy for single-sided boundedness games:
/// writes the position as `sum alpha_i x_i` over the last resolution
/// `x_i` of each move with `alpha_i` in `[0, 1]`, replaying any move
/// whose coefficient is zero and rescaling through a convex
/// representation of `0` when none is.
pub struct OneSidedStrategy {
    alphas: Vec<Rational>,
    points: Vec<Option<Vector>>,
    chosen: Option<usize>,
}

impl OneSidedStrategy {
    /// Requires a single-sided game won by Player A.
    pub fn new(g: &MinkowskiGame) -> Result<Self, Error> {
        if !g.is_single_sided() {
            return Err(Error::Usage("strategy requires a single-sided game".into()));
        }
        let outcome = crate::boundedness::decide_bruteforce(g)?;
        if outcome.winner != crate::model::Winner::PlayerA {
            return Err(Error::Usage("game is not won by Player A".into()));
        }
        Ok(OneSidedStrategy {
            alphas: vec![Rational::zero(); g.moves_a.len()],
            points: vec![None; g.moves_a.len()],
            chosen: None,
        })
    }

    /// `sum alpha_i x_i`: must equal the simulator position exactly
    /// (relative to the start).
    pub fn tracked_position(&self, dimension: usize) -> Vector {
        let mut acc = Vector::zero(dimension);
        for (a, p) in self.alphas.iter().zip(&self.points) {
            if let Some(x) = p {
                acc = &acc + &x.scale(a);
            }
        }
        acc
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }
}

impl PlayerAStrategy for OneSidedStrategy {
    fn choose_move(&mut self, _g: &MinkowskiGame) -> Result<usize, Error> {
        if let Some(k) = self.alphas.iter().position(Rational::is_zero) {
            self.chosen = Some(k);
            return Ok(k);
        }
        // every alpha positive: rescale along a representation 0 = sum beta_i x_i
        let points: Vec<Vector> = self
            .points
            .iter()
            .map(|p| p.clone().expect("positive alpha implies a stored point"))
            .collect();
        let dim = points[0].dim();
        let beta = hull_membership(&Vector::zero(dim), &points)?.ok_or_else(|| {
            Error::InconsistentStrategy {
                offender: "tracked points no longer contain 0 in their hull".into(),
            }
        })?;
        let mut best: Option<(usize, Rational)> = None;
        for (i, b) in beta.iter().enumerate() {
            if !b.is_positive() {
                continue;
            }
            let r = b / &self.alphas[i];
            let better = match &best {
                None => true,
                Some((_, br)) => r > *br,
            };
            if better {
                best = Some((i, r));
            }
        }
        let (k, r) = best.expect("convex weights include a positive entry");
        for (a, b) in self.alphas.iter_mut().zip(&beta) {
            *a -= b / &r;
        }
        self.alphas[k] = Rational::zero(); // exact by choice of r
        self.chosen = Some(k);
        Ok(k)
    }

    fn observe_resolution(
        &mut self,
        _g: &MinkowskiGame,
        a_idx: usize,
        point: &Vector,
    ) -> Result<(), Error> {
        if self.chosen != Some(a_idx) {
            return Err(Error::Precondition("resolution for an unchosen move".into()));
        }
        self.points[a_idx] = Some(point.clone());
        self.alphas[a_idx] = Rational::one();
        self.chosen = None;
        Ok(())
    }

    fn resolve_b(&mut self, g: &MinkowskiGame, _b_idx: usize) -> Result<Vector, Error> {
        Ok(Vector::zero(g.dimension)) // single-sided: B's move is {0}
    }
}

// ---------------------------------------------------------------------------
// Player A, general games

/// Winning Player A strategy for arbitrary A-winning boundedness
/// games. Position is tracked exactly as `sum x_i a_i + p` with
/// anchors `a_i` in `CH(A_i)`; move selection delegates to the +1/-1
/// game over move indices.
pub struct GeneralStrategy {
    weights: Vec<Rational>,
    anchors: Vec<Vector>,
    offset: Vector,
    plus: PlusMinusState,
    pending_alpha: Option<Vector>,
    chosen: Option<usize>,
    initial_norm: Rational,
}

impl GeneralStrategy {
    pub fn new(g: &MinkowskiGame) -> Result<Self, Error> {
        let outcome = crate::boundedness::decide_bruteforce(g)?;
        if outcome.winner != crate::model::Winner::PlayerA {
            return Err(Error::Usage("game is not won by Player A".into()));
        }
        let n = g.moves_a.len();
        let weights = vec![Rational::from_integer((n as i64).into()); n];
        let anchors: Vec<Vector> = g
            .moves_a
            .iter()
            .map(|m| m.vertices()[0].clone())
            .collect();
        let start = g
            .initial
            .clone()
            .unwrap_or_else(|| Vector::zero(g.dimension));
        // start = sum x_i a_i + p
        let mut anchored = Vector::zero(g.dimension);
        for (x, a) in weights.iter().zip(&anchors) {
            anchored = &anchored + &a.scale(x);
        }
        Ok(GeneralStrategy {
            initial_norm: start.norm_inf(),
            offset: &start - &anchored,
            weights,
            anchors,
            plus: PlusMinusState::new(n),
            pending_alpha: None,
            chosen: None,
        })
    }

    pub fn tracked_position(&self) -> Vector {
        let mut acc = self.offset.clone();
        for (x, a) in self.weights.iter().zip(&self.anchors) {
            acc = &acc + &a.scale(x);
        }
        acc
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// `(n^2 + 1) R + |p_0|` with `R` the largest vertex coordinate:
    /// an a-priori bound on the infinity norm of any reachable
    /// position under this strategy.
    pub fn norm_bound(&self, g: &MinkowskiGame) -> Rational {
        let n = g.moves_a.len() as i64;
        let mut r = Rational::zero();
        for m in g.moves_a.iter().chain(&g.moves_b) {
            let candidate = m.polytope.norm_inf();
            if candidate > r {
                r = candidate;
            }
        }
        &(&Rational::from_integer((n * n + 1).into()) * &r) + &self.initial_norm
    }

    /// Rounds a stochastic `alpha` down to multiples of `1/4096` and
    /// recomputes `b = -sum alpha_i a_i`, trying every index as the
    /// recipient of the rounding slack (each choice perturbs `b` in a
    /// different direction). Returns the first variant whose `b`
    /// stays inside the convex hull of the move's vertices, `None`
    /// when there is none.
    fn snap_alpha(
        &self,
        alpha: &[Rational],
        b_verts: &[Vector],
    ) -> Result<Option<(Vec<Rational>, Vector)>, Error> {
        let grid = Rational::from_integer(4096.into());
        let floored: Vec<Rational> =
            alpha.iter().map(|a| (a * &grid).floor() / &grid).collect();
        let mut spent = Rational::zero();
        for f in &floored {
            spent += f;
        }
        let slack = &Rational::one() - &spent;
        if floored == alpha {
            return Ok(None); // already on the grid, nothing to check
        }
        let dim = self.offset.dim();
        let mut base = Vector::zero(dim);
        for (al, a) in floored.iter().zip(&self.anchors) {
            base = &base - &a.scale(al);
        }
        for i in 0..alpha.len() {
            let b = &base - &self.anchors[i].scale(&slack);
            if hull_membership(&b, b_verts)?.is_some() {
                let mut snapped = floored.clone();
                snapped[i] += slack.clone();
                return Ok(Some((snapped, b)));
            }
        }
        Ok(None)
    }

    /// Last resort when no grid alpha balances against the anchors as
    /// they are (a move pinned to a point leaves `b` no room at all):
    /// re-derive every anchor together with `b` so the grid alpha
    /// still keeps `sum x_i a_i + p` exact. One hull query in the
    /// lifted space `R^(d+n)` whose extra coordinates meter out the
    /// leftover weight per move; `b` comes back as a convex
    /// combination of the move's vertices, so no membership check is
    /// needed. Fails only when every degree of freedom is pinned.
    fn snap_with_reanchor(
        &mut self,
        g: &MinkowskiGame,
        alpha: &[Rational],
        b_verts: &[Vector],
    ) -> Result<Option<(Vec<Rational>, Vector)>, Error> {
        let grid = Rational::from_integer(4096.into());
        let mut snapped: Vec<Rational> =
            alpha.iter().map(|a| (a * &grid).floor() / &grid).collect();
        let mut spent = Rational::zero();
        for f in &snapped {
            spent += f;
        }
        let largest = alpha
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.cmp(y))
            .map(|(i, _)| i)
            .expect("at least one move");
        snapped[largest] += &Rational::one() - &spent;
        if snapped == alpha {
            return Ok(None); // on the grid: the exact pair is already fine
        }
        if snapped.iter().zip(&self.weights).any(|(al, x)| al > x) {
            return Ok(None); // leftover weight would go negative
        }
        let n = self.anchors.len();
        let d = g.dimension;
        let leftover: Vec<Rational> = self
            .weights
            .iter()
            .zip(&snapped)
            .map(|(x, al)| x - al)
            .collect();
        let mut mass = Rational::one();
        for y in &leftover {
            mass += y;
        }
        // generators (vertex of A_i, e_i) and (-vertex of B, 0);
        // target (sum x_i a_i, leftover) / mass
        let mut gens = Vec::new();
        let mut owners: Vec<(Option<usize>, Vector)> = Vec::new();
        for (i, mv) in g.moves_a.iter().enumerate() {
            for v in mv.vertices() {
                let mut c = v.0.clone();
                c.extend((0..n).map(|j| {
                    if j == i {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                }));
                gens.push(Vector(c));
                owners.push((Some(i), v.clone()));
            }
        }
        for bv in b_verts {
            let mut c: Vec<Rational> = bv.0.iter().map(|x| -x).collect();
            c.extend((0..n).map(|_| Rational::zero()));
            gens.push(Vector(c));
            owners.push((None, bv.clone()));
        }
        let mut anchored = Vector::zero(d);
        for (x, a) in self.weights.iter().zip(&self.anchors) {
            anchored = &anchored + &a.scale(x);
        }
        let mut target = anchored.0;
        target.extend(leftover.iter().cloned());
        let target = Vector(target.into_iter().map(|c| c / &mass).collect());
        let lambda = match hull_membership(&target, &gens)? {
            Some(l) => l,
            None => return Ok(None),
        };
        let mut new_anchors = vec![Vector::zero(d); n];
        let mut b = Vector::zero(d);
        for (lk, (owner, v)) in lambda.iter().zip(&owners) {
            let w = lk * &mass;
            match owner {
                Some(i) => new_anchors[*i] = &new_anchors[*i] + &v.scale(&w),
                None => b = &b + &v.scale(&w),
            }
        }
        for (i, y) in leftover.iter().enumerate() {
            if y.is_zero() {
                new_anchors[i] = self.anchors[i].clone();
            } else {
                new_anchors[i] = Vector(new_anchors[i].0.iter().map(|c| c / y).collect());
            }
        }
        self.anchors = new_anchors;
        Ok(Some((snapped, b)))
    }
}

impl PlayerAStrategy for GeneralStrategy {
    fn choose_move(&mut self, _g: &MinkowskiGame) -> Result<usize, Error> {
        let alpha = self.pending_alpha.take();
        let idx = plusminus_player_a(&mut self.plus, alpha.as_ref())?;
        self.chosen = Some(idx);
        Ok(idx)
    }

    fn observe_resolution(
        &mut self,
        _g: &MinkowskiGame,
        a_idx: usize,
        point: &Vector,
    ) -> Result<(), Error> {
        if self.chosen != Some(a_idx) {
            return Err(Error::Precondition("resolution for an unchosen move".into()));
        }
        // a_i <- (x_i a_i + a') / (x_i + 1), x_i <- x_i + 1 keeps
        // sum x a + p equal to the new position.
        let x = self.weights[a_idx].clone();
        let xp1 = &x + &Rational::one();
        let blended = &self.anchors[a_idx].scale(&x) + point;
        self.anchors[a_idx] = Vector(blended.0.iter().map(|c| c / &xp1).collect());
        self.weights[a_idx] = xp1;
        self.chosen = None;
        Ok(())
    }

    fn resolve_b(&mut self, g: &MinkowskiGame, b_idx: usize) -> Result<Vector, Error> {
        // find stochastic alpha and b in CH(B) with sum alpha_i a_i + b = 0
        let b_verts = g.moves_b[b_idx].vertices();
        // Try the barycenter of the move first: an interior target
        // leaves the snapping step below room to perturb b without
        // leaving the move. Minimal-support vertex solutions tend to
        // pin b to a vertex, where every perturbation is a coin flip.
        let nv = Rational::from_integer((b_verts.len() as i64).into());
        let mut bary = Vector::zero(g.dimension);
        for bv in b_verts {
            bary = &bary + bv;
        }
        let bary = Vector(bary.0.iter().map(|c| c / &nv).collect());
        let neg_bary = Vector(bary.0.iter().map(|c| -c).collect());
        let mut exact: Option<(Vec<Rational>, Vector)> =
            hull_membership(&neg_bary, &self.anchors)?.map(|al| (al, bary));
        if exact.is_none() {
            let mut generators = Vec::with_capacity(self.anchors.len() * b_verts.len());
            for a in &self.anchors {
                for bv in b_verts {
                    generators.push(a + bv);
                }
            }
            let w = caratheodory_decompose(&Vector::zero(g.dimension), &generators).map_err(
                |e| match e {
                    Error::Precondition(_) => Error::InconsistentStrategy {
                        offender: "anchor hull drifted away from 0 (game not A-winning?)".into(),
                    },
                    other => other,
                },
            )?;
            let nb = b_verts.len();
            let mut al = vec![Rational::zero(); self.anchors.len()];
            let mut b_point = Vector::zero(g.dimension);
            for (k, wk) in &w {
                al[k / nb] += wk;
                b_point = &b_point + &b_verts[k % nb].scale(wk);
            }
            exact = Some((al, b_point));
        }
        let (mut alpha, mut b_point) = exact.expect("filled by one of the two branches");
        // The exact solution has determinant-sized entries that feed
        // back into the weights and from there into the anchors, so a
        // naive update blows the rationals up exponentially over a
        // play. Any stochastic alpha with -sum alpha_i a_i inside the
        // move is just as good, so snap alpha to the 1/4096 grid and
        // rederive b from it; keep the exact pair when no snapped b
        // stays inside the move.
        if let Some((snapped_alpha, snapped_b)) = self.snap_alpha(&alpha, b_verts)? {
            alpha = snapped_alpha;
            b_point = snapped_b;
        } else if let Some((snapped_alpha, snapped_b)) =
            self.snap_with_reanchor(g, &alpha, b_verts)?
        {
            alpha = snapped_alpha;
            b_point = snapped_b;
        }
        for (x, al) in self.weights.iter_mut().zip(&alpha) {
            *x -= al;
        }
        self.pending_alpha = Some(Vector(alpha));
        Ok(b_point)
    }
}

// ---------------------------------------------------------------------------
// Player B

/// Player B's simple divergence strategy read off a verified
/// certificate: fixed vertex per A move, fixed own move.
pub struct CertificateStrategy {
    cert: DivergenceCertificate,
}

impl CertificateStrategy {
    pub fn new(g: &MinkowskiGame, cert: DivergenceCertificate) -> Result<Self, Error> {
        if !verify_divergence_certificate(g, &cert)? {
            return Err(Error::Usage("certificate does not verify".into()));
        }
        Ok(CertificateStrategy { cert })
    }

    pub fn certificate(&self) -> &DivergenceCertificate {
        &self.cert
    }
}

impl PlayerBStrategy for CertificateStrategy {
    fn resolve_a(&mut self, g: &MinkowskiGame, a_idx: usize) -> Result<Vector, Error> {
        let vi = self.cert.vertex_choice[a_idx];
        Ok(g.moves_a[a_idx].vertices()[vi].clone())
    }

    fn choose_move(&mut self, _g: &MinkowskiGame) -> Result<usize, Error> {
        Ok(self.cert.b_move)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VPolytope;
    use crate::model::{MinkowskiGame, Move, Winner};
    use crate::rational::{rat, ratio};

    fn game(moves_a: &[&[&[i64]]], dim: usize) -> MinkowskiGame {
        let moves = moves_a
            .iter()
            .map(|vs| Move::from_vertices(VPolytope::from_int_vertices(dim, vs)).unwrap())
            .collect();
        MinkowskiGame::one_sided_boundedness(dim, moves).unwrap()
    }

    #[test]
    fn convex_approx_scalar_example() {
        // B = {0, 1}, c = 1: the first response to v = 0 is u = 0
        let base = vec![Vector::from_ints(&[0]), Vector::from_ints(&[1])];
        let mut st = ConvexApproxState::new(base, Vector::from_ints(&[1])).unwrap();
        let idx = convex_approx_respond(&mut st, &Vector::zero(1)).unwrap();
        assert_eq!(idx, 0);
        assert!(st.invariant_holds().unwrap());
    }

    #[test]
    fn convex_approx_basis_example() {
        let mut st = ConvexApproxState::standard_basis(2);
        let idx = convex_approx_respond(&mut st, &Vector(vec![ratio(1, 2), ratio(1, 2)])).unwrap();
        assert_eq!(idx, 0); // tie broken toward the first basis vector
        assert_eq!(st.deviation, Vector(vec![ratio(-1, 2), ratio(1, 2)]));
        assert!(st.invariant_holds().unwrap());
    }

    #[test]
    fn convex_approx_rejects_outside_points() {
        let mut st = ConvexApproxState::standard_basis(2);
        assert!(convex_approx_respond(&mut st, &Vector::from_ints(&[2, 2])).is_err());
    }

    #[test]
    fn nearest_variant_examples() {
        let base = vec![Vector::from_ints(&[0]), Vector::from_ints(&[1])];
        let mut st = ConvexApproxState::new(base, Vector::from_ints(&[1])).unwrap();
        let i1 = convex_approx_respond_nearest(&mut st, &Vector(vec![ratio(1, 4)])).unwrap();
        assert_eq!(i1, 0);
        assert_eq!(st.deviation, Vector(vec![ratio(1, 4)]));
        let i2 = convex_approx_respond_nearest(&mut st, &Vector(vec![ratio(1, 2)])).unwrap();
        assert_eq!(i2, 1);
        assert_eq!(st.deviation, Vector(vec![ratio(-1, 4)]));
    }

    #[test]
    fn plusminus_against_constant_adversary() {
        let mut st = PlusMinusState::new(2);
        let first = plusminus_player_a(&mut st, None).unwrap();
        assert_eq!(first, 0);
        let w = Vector::from_ints(&[1, 0]);
        for _ in 0..100 {
            let idx = plusminus_player_a(&mut st, Some(&w)).unwrap();
            assert_eq!(idx, 0);
            for c in &st.accumulators.0 {
                assert!(*c >= rat(-2));
            }
        }
    }

    #[test]
    fn plusminus_rejects_bad_vectors() {
        let mut st = PlusMinusState::new(2);
        plusminus_player_a(&mut st, None).unwrap();
        assert!(plusminus_player_a(&mut st, Some(&Vector::from_ints(&[1, 1]))).is_err());
        assert!(plusminus_player_a(&mut st, Some(&Vector(vec![ratio(3, 2), ratio(-1, 2)]))).is_err());
        assert!(plusminus_player_a(&mut st, None).is_err());
    }

    #[test]
    fn harmonic_without_current_index_is_uniform_over_unplayed() {
        let w0 = plusminus_player_b_harmonic(3, 0, &[]).unwrap();
        assert_eq!(w0, Vector(vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)]));
        let w1 = plusminus_player_b_harmonic(3, 1, &[0]).unwrap();
        assert_eq!(w1, Vector(vec![rat(0), ratio(1, 2), ratio(1, 2)]));
        let w2 = plusminus_player_b_harmonic(2, 0, &[]).unwrap();
        assert_eq!(w2, Vector(vec![ratio(1, 2), ratio(1, 2)]));
    }

    #[test]
    fn harmonic_with_current_index_targets_the_survivors() {
        // d=2: B sees A's move and puts everything on the other position
        let w = plusminus_player_b_harmonic(2, 0, &[0]).unwrap();
        assert_eq!(w, Vector(vec![rat(0), rat(1)]));
        // d=3, A plays 1 then 1 again: T = {0,2} -> drop largest -> {0}
        let w0 = plusminus_player_b_harmonic(3, 0, &[1]).unwrap();
        assert_eq!(w0, Vector(vec![ratio(1, 2), rat(0), ratio(1, 2)]));
        let w1 = plusminus_player_b_harmonic(3, 1, &[1, 1]).unwrap();
        assert_eq!(w1, Vector(vec![rat(1), rat(0), rat(0)]));
    }

    #[test]
    fn harmonic_forces_minus_h_for_small_d() {
        // every A sequence of length d-1 ends with some component at
        // exactly -(1/(d-1) + ... + 1)
        for d in 2..=4usize {
            let h: Rational = (1..d).map(|k| Rational::new(1.into(), (k as i64).into())).sum();
            let seqs = all_sequences(d, d - 1);
            for seq in seqs {
                let mut acc = Vector::zero(d);
                for (round, &a_idx) in seq.iter().enumerate() {
                    acc[a_idx] += Rational::one();
                    let w =
                        plusminus_player_b_harmonic(d, round, &seq[..=round]).unwrap();
                    acc = &acc - &w;
                }
                let min = acc.0.iter().min().unwrap();
                assert_eq!(*min, -h.clone(), "sequence {seq:?} in d={d}");
            }
        }
    }

    fn all_sequences(d: usize, len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for s in &out {
                for i in 0..d {
                    let mut t = s.clone();
                    t.push(i);
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn one_sided_strategy_stays_bounded() {
        let g = game(&[&[&[-1]], &[&[1]]], 1);
        let mut a = OneSidedStrategy::new(&g).unwrap();
        let mut b = RandomStrategy::seeded(7);
        let sim = simulate(&g, &mut a, &mut b, 500, Some(&rat(1))).unwrap();
        assert!(sim.exceeded_at.is_none(), "max norm {:?}", sim.max_norm);
        assert_eq!(a.tracked_position(1), sim.trace.last().unwrap().clone());
        assert!(a.alphas().iter().all(|x| *x >= rat(0) && *x <= rat(1)));
    }

    #[test]
    fn one_sided_strategy_on_symmetric_triangle() {
        let g = game(&[&[&[1, 0]], &[&[0, 1]], &[&[-1, -1]]], 2);
        let mut a = OneSidedStrategy::new(&g).unwrap();
        let mut b = RandomStrategy::seeded(11);
        let sim = simulate(&g, &mut a, &mut b, 300, Some(&rat(3))).unwrap();
        assert!(sim.exceeded_at.is_none());
    }

    #[test]
    fn one_sided_strategy_rejects_b_winning_games() {
        let g = game(&[&[&[-1], &[1]]], 1);
        assert!(matches!(OneSidedStrategy::new(&g), Err(Error::Usage(_))));
    }

    #[test]
    fn general_strategy_stays_under_its_bound() {
        let g = game(&[&[&[-1]], &[&[1]]], 1);
        let mut a = GeneralStrategy::new(&g).unwrap();
        let bound = a.norm_bound(&g);
        let mut b = RandomStrategy::seeded(3);
        let sim = simulate(&g, &mut a, &mut b, 500, Some(&bound)).unwrap();
        assert!(sim.exceeded_at.is_none());
        assert_eq!(a.tracked_position(), sim.trace.last().unwrap().clone());
        assert!(a.weights().iter().all(|x| !x.is_negative()));
        let total: Rational = a.weights().iter().sum();
        assert!(total <= rat(5)); // n^2 + 1 with n = 2
    }

    #[test]
    fn general_strategy_with_real_b_moves() {
        // A can always cancel B's forced drift of {-1} with moves
        // {0} and {2}; 0 in CH{a_i} + CH{-1} needs both anchors.
        let moves_a = vec![
            Move::from_vertices(VPolytope::from_int_vertices(1, &[&[0]])).unwrap(),
            Move::from_vertices(VPolytope::from_int_vertices(1, &[&[2]])).unwrap(),
        ];
        let moves_b =
            vec![Move::from_vertices(VPolytope::from_int_vertices(1, &[&[-1]])).unwrap()];
        let g = MinkowskiGame {
            dimension: 1,
            objective: crate::model::Objective::Boundedness,
            moves_a,
            moves_b,
            safe: None,
            goal: None,
            initial: None,
        };
        assert_eq!(
            crate::boundedness::decide_bruteforce(&g).unwrap().winner,
            Winner::PlayerA
        );
        let mut a = GeneralStrategy::new(&g).unwrap();
        let bound = a.norm_bound(&g);
        let mut b = RandomStrategy::seeded(19);
        let sim = simulate(&g, &mut a, &mut b, 400, Some(&bound)).unwrap();
        assert!(sim.exceeded_at.is_none());
        assert_eq!(a.tracked_position(), sim.trace.last().unwrap().clone());
    }

    #[test]
    fn certificate_strategy_drifts_linearly() {
        let g = game(&[&[&[-1], &[1]]], 1);
        let out = crate::boundedness::decide_bruteforce(&g).unwrap();
        let cert = out.certificate.unwrap();
        let mut b = CertificateStrategy::new(&g, cert.clone()).unwrap();
        let mut a = RandomStrategy::seeded(23);
        let sim = simulate(&g, &mut a, &mut b, 50, None).unwrap();
        // check drift >= delta per round along the certificate direction
        for k in 0..50 {
            let before = &sim.trace[2 * k];
            let after = &sim.trace[2 * k + 2];
            let gain = cert.direction.dot(after) - cert.direction.dot(before);
            assert!(gain >= cert.drift);
        }
    }

    #[test]
    fn simulator_checks_membership() {
        struct Cheat;
        impl PlayerBStrategy for Cheat {
            fn resolve_a(&mut self, g: &MinkowskiGame, _: usize) -> Result<Vector, Error> {
                Ok(Vector::from_ints(
                    &vec![7; g.dimension].into_iter().collect::<Vec<_>>(),
                ))
            }
            fn choose_move(&mut self, _: &MinkowskiGame) -> Result<usize, Error> {
                Ok(0)
            }
        }
        let g = game(&[&[&[0]]], 1);
        let mut a = RandomStrategy::seeded(0);
        let mut b = Cheat;
        match simulate(&g, &mut a, &mut b, 1, None) {
            Err(Error::InconsistentStrategy { offender }) => {
                assert!(offender.contains("moves_a[0]"), "{offender}");
            }
            other => panic!("expected inconsistency error, got {other:?}"),
        }
    }

    #[test]
    fn zero_rounds_trace_is_start() {
        let mut g = game(&[&[&[0]]], 1);
        g.initial = Some(Vector::from_ints(&[5]));
        let mut a = RandomStrategy::seeded(0);
        let mut b = RandomStrategy::seeded(1);
        let sim = simulate(&g, &mut a, &mut b, 0, None).unwrap();
        assert_eq!(sim.trace, vec![Vector::from_ints(&[5])]);
        assert_eq!(sim.max_norm, rat(5));
    }
}
