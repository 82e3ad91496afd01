//! Finite unions of (possibly strict) polyhedra and their algebra.
//!
//! Regions are the working set type of the safety fixed points: they
//! must survive complement, Minkowski sum with a polytope and erosion
//! by a polytope without approximation. Complement and erosion can
//! multiply piece counts, so both take an explicit ceiling and abort
//! with a resource error instead of degrading silently.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{
    fm_feasible, lp_feasible, normalize_constraint, project, to_halfspaces, HPolyhedron,
    LinearConstraint, Relation, VPolytope,
};
use crate::rational::{format_rational, parse_rational, Rational, Vector};

/// Default bound on the number of pieces an operation may produce.
pub const DEFAULT_PIECE_CEILING: usize = 10_000;

/// A finite union of `HPolyhedron` pieces sharing one dimension.
/// No pieces means the empty set; a piece with no constraints is R^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub dimension: usize,
    pub pieces: Vec<HPolyhedron>,
}

impl Region {
    pub fn new(dimension: usize, pieces: Vec<HPolyhedron>) -> Result<Self, Error> {
        for p in &pieces {
            if p.dimension != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: p.dimension,
                });
            }
        }
        Ok(Region { dimension, pieces })
    }

    pub fn empty(dimension: usize) -> Self {
        Region {
            dimension,
            pieces: Vec::new(),
        }
    }

    pub fn universe(dimension: usize) -> Self {
        Region {
            dimension,
            pieces: vec![HPolyhedron::universe(dimension)],
        }
    }

    /// Region holding exactly the solution set of one constraint list.
    pub fn from_constraints(
        dimension: usize,
        constraints: Vec<LinearConstraint>,
    ) -> Result<Self, Error> {
        Ok(Region {
            dimension,
            pieces: vec![HPolyhedron::new(dimension, constraints)?],
        })
    }

    /// Axis-aligned box `[lo_i, hi_i]` in each coordinate.
    pub fn from_box(bounds: &[(Rational, Rational)]) -> Self {
        let d = bounds.len();
        let mut cs = Vec::with_capacity(2 * d);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut e = Vector::zero(d);
            e[i] = Rational::from_integer(1.into());
            cs.push(LinearConstraint::new(e.clone(), Relation::Ge, lo.clone()));
            cs.push(LinearConstraint::new(e, Relation::Le, hi.clone()));
        }
        Region {
            dimension: d,
            pieces: vec![HPolyhedron { dimension: d, constraints: cs }],
        }
    }

    fn check_dim(&self, other: usize) -> Result<(), Error> {
        if self.dimension != other {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other,
            });
        }
        Ok(())
    }

    /// Drops empty pieces and normalizes/dedupes constraints per piece.
    pub fn canonicalized(&self) -> Result<Region, Error> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            if !lp_feasible(&p.constraints)? {
                continue;
            }
            let mut cs: Vec<LinearConstraint> = Vec::new();
            for c in &p.constraints {
                if c.is_trivially_true() {
                    continue;
                }
                let n = normalize_constraint(c);
                if !cs.contains(&n) {
                    cs.push(n);
                }
            }
            cs.sort_by(constraint_order);
            pieces.push(HPolyhedron {
                dimension: self.dimension,
                constraints: cs,
            });
        }
        Ok(Region {
            dimension: self.dimension,
            pieces,
        })
    }

    pub fn union(&self, other: &Region) -> Result<Region, Error> {
        self.check_dim(other.dimension)?;
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Region {
            dimension: self.dimension,
            pieces,
        }
        .canonicalized()
    }

    pub fn intersect(&self, other: &Region) -> Result<Region, Error> {
        self.check_dim(other.dimension)?;
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                let mut cs = p.constraints.clone();
                cs.extend(q.constraints.iter().cloned());
                pieces.push(HPolyhedron {
                    dimension: self.dimension,
                    constraints: cs,
                });
            }
        }
        Region {
            dimension: self.dimension,
            pieces,
        }
        .canonicalized()
    }

    /// `R^d` minus this region. Distributes the intersection of the
    /// piece complements into union form, pruning infeasible,
    /// duplicate and subsumed partial products as it goes; `ceiling`
    /// bounds the working piece count.
    ///
    /// Dropping a partial subsumed by another is sound mid-way:
    /// both would be extended by the same branch options, so every
    /// piece the dropped one could contribute is covered.
    pub fn complement(&self, ceiling: usize) -> Result<Region, Error> {
        let mut acc: Vec<Vec<LinearConstraint>> = vec![Vec::new()];
        for piece in &self.pieces {
            if piece.constraints.is_empty() {
                return Ok(Region::empty(self.dimension));
            }
            // complement of one piece: union of single negated constraints
            let branches: Vec<LinearConstraint> = piece
                .constraints
                .iter()
                .flat_map(LinearConstraint::negations)
                .map(|c| normalize_constraint(&c))
                .collect();
            let mut next: Vec<Vec<LinearConstraint>> = Vec::new();
            for partial in &acc {
                for b in &branches {
                    if partial.contains(b) {
                        // no-op extension: the partial survives as is
                        let cs = partial.clone();
                        if !next.contains(&cs) {
                            next.push(cs);
                        }
                        continue;
                    }
                    let mut cs = partial.clone();
                    cs.push(b.clone());
                    cs.sort_by(constraint_order);
                    if next.contains(&cs) || !lp_feasible(&cs)? {
                        continue;
                    }
                    next.push(cs);
                }
                if next.len() > ceiling {
                    return Err(Error::ResourceCeiling {
                        pieces: next.len(),
                        ceiling,
                    });
                }
            }
            // drop partials whose constraint set contains another's:
            // fewer constraints = larger piece = subsumes
            let mut keep = vec![true; next.len()];
            for i in 0..next.len() {
                for j in 0..next.len() {
                    if i != j
                        && keep[j]
                        && next[j].len() < next[i].len()
                        && next[j].iter().all(|c| next[i].contains(c))
                    {
                        keep[i] = false;
                        break;
                    }
                }
            }
            acc = next
                .into_iter()
                .zip(keep)
                .filter_map(|(cs, k)| k.then_some(cs))
                .collect();
        }
        Region {
            dimension: self.dimension,
            pieces: acc
                .into_iter()
                .map(|cs| HPolyhedron {
                    dimension: self.dimension,
                    constraints: cs,
                })
                .collect(),
        }
        .canonicalized()
    }

    pub fn translate(&self, t: &Vector) -> Result<Region, Error> {
        self.check_dim(t.dim())?;
        // x ranges over r + t iff x - t ranges over r
        Ok(Region {
            dimension: self.dimension,
            pieces: self
                .pieces
                .iter()
                .map(|p| HPolyhedron {
                    dimension: p.dimension,
                    constraints: p.constraints.iter().map(|c| c.translated(t)).collect(),
                })
                .collect(),
        })
    }

    /// Minkowski sum with a polytope: `{x + y | x in r, y in p}`.
    /// Per piece, sets up `y in piece, x - y in p` over (x, y) and
    /// projects `y` away by exact elimination, so strictness survives.
    pub fn minkowski_polytope(&self, p: &VPolytope) -> Result<Region, Error> {
        self.check_dim(p.dimension)?;
        let d = self.dimension;
        let hp = to_halfspaces(p)?;
        let mut pieces = Vec::new();
        for piece in &self.pieces {
            let mut sys: Vec<LinearConstraint> = Vec::new();
            // piece constraints on y (coordinates d..2d)
            for c in &piece.constraints {
                let mut coeffs = vec![Rational::zero(); d];
                coeffs.extend(c.coeffs.0.iter().cloned());
                sys.push(LinearConstraint::new(Vector(coeffs), c.relation, c.rhs.clone()));
            }
            // p constraints on x - y
            for c in &hp.constraints {
                let mut coeffs = c.coeffs.0.clone();
                coeffs.extend(c.coeffs.0.iter().map(|a| -a));
                sys.push(LinearConstraint::new(Vector(coeffs), c.relation, c.rhs.clone()));
            }
            if let Some(cs) = project(&sys, d)? {
                pieces.push(HPolyhedron {
                    dimension: d,
                    constraints: cs,
                });
            }
        }
        Region {
            dimension: d,
            pieces,
        }
        .canonicalized()
    }

    /// Erosion: `{x | x + p subseteq r}`, exact for non-convex `r` via
    /// `complement(complement(r) + (-p))`. The intermediate regions
    /// are simplified: complement's branching factor is the constraint
    /// count, so redundant constraints blow up doubly here.
    pub fn erode_polytope(&self, p: &VPolytope, ceiling: usize) -> Result<Region, Error> {
        self.check_dim(p.dimension)?;
        self.simplified()?
            .complement(ceiling)?
            .simplified()?
            .minkowski_polytope(&p.reflected())?
            .simplified()?
            .complement(ceiling)?
            .simplified()
    }

    /// Semantic cleanup on top of `canonicalized`: drops constraints
    /// implied by the rest of their piece and pieces contained in
    /// another piece. Quadratic in LP calls; worth it before any
    /// complement.
    pub fn simplified(&self) -> Result<Region, Error> {
        let canon = self.canonicalized()?;
        let mut pieces: Vec<HPolyhedron> = Vec::with_capacity(canon.pieces.len());
        for p in &canon.pieces {
            let mut kept = p.constraints.clone();
            let mut i = 0;
            while i < kept.len() {
                let removed = kept.remove(i);
                if constraints_imply(&kept, &removed)? {
                    continue; // redundant, stays removed
                }
                kept.insert(i, removed);
                i += 1;
            }
            pieces.push(HPolyhedron {
                dimension: self.dimension,
                constraints: kept,
            });
        }
        let mut keep = vec![true; pieces.len()];
        for i in 0..pieces.len() {
            for j in 0..pieces.len() {
                if i == j || !keep[i] || !keep[j] {
                    continue;
                }
                // drop i when piece i subseteq piece j (ties: keep the later
                // check's survivor deterministic by only dropping i > j on equality)
                if piece_subset(&pieces[i], &pieces[j])?
                    && (!piece_subset(&pieces[j], &pieces[i])? || i > j)
                {
                    keep[i] = false;
                }
            }
        }
        let pieces = pieces
            .into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect();
        Ok(Region {
            dimension: self.dimension,
            pieces,
        })
    }

    pub fn is_empty(&self) -> Result<bool, Error> {
        for p in &self.pieces {
            if lp_feasible(&p.constraints)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains_point(&self, v: &Vector) -> Result<bool, Error> {
        self.check_dim(v.dim())?;
        Ok(self.pieces.iter().any(|p| p.contains(v)))
    }

    /// `inner subseteq self`, decided exactly: inner piece by piece,
    /// each piece must be covered by the union, tested by emptiness of
    /// `piece \ self` (distributing complements of self's pieces with
    /// the inner piece's constraints as pruning context).
    pub fn contains_region(&self, inner: &Region) -> Result<bool, Error> {
        self.check_dim(inner.dimension)?;
        for piece in &inner.pieces {
            if !lp_feasible(&piece.constraints)? {
                continue;
            }
            // difference = piece AND (for every outer piece, some negated constraint)
            let mut base = piece.constraints.clone();
            base.sort_by(constraint_order);
            let mut acc: Vec<Vec<LinearConstraint>> = vec![base];
            let mut covered = false;
            for outer in &self.pieces {
                if outer.constraints.is_empty() {
                    covered = true;
                    break;
                }
                // an outer piece disjoint from the inner piece removes
                // nothing from the difference
                let mut meet = piece.constraints.clone();
                meet.extend(outer.constraints.iter().cloned());
                if !lp_feasible(&meet)? {
                    continue;
                }
                let branches: Vec<LinearConstraint> = outer
                    .constraints
                    .iter()
                    .flat_map(LinearConstraint::negations)
                    .map(|c| normalize_constraint(&c))
                    .collect();
                // same dedupe / subsumption pruning as complement():
                // the surviving partials all extend by identical
                // branch options, so larger (fewer-constraint) cells
                // cover the pieces of the ones they subsume
                let mut next: Vec<Vec<LinearConstraint>> = Vec::new();
                for partial in &acc {
                    for b in &branches {
                        if partial.contains(b) {
                            let cs = partial.clone();
                            if !next.contains(&cs) {
                                next.push(cs);
                            }
                            continue;
                        }
                        let mut cs = partial.clone();
                        cs.push(b.clone());
                        cs.sort_by(constraint_order);
                        if next.contains(&cs) || !lp_feasible(&cs)? {
                            continue;
                        }
                        next.push(cs);
                    }
                }
                let mut keep = vec![true; next.len()];
                for i in 0..next.len() {
                    for j in 0..next.len() {
                        if i != j
                            && keep[j]
                            && next[j].len() < next[i].len()
                            && next[j].iter().all(|c| next[i].contains(c))
                        {
                            keep[i] = false;
                            break;
                        }
                    }
                }
                acc = next
                    .into_iter()
                    .zip(keep)
                    .filter_map(|(cs, k)| k.then_some(cs))
                    .collect();
                if acc.is_empty() {
                    covered = true;
                    break;
                }
            }
            if !covered && !acc.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Semantic equality by mutual containment.
    pub fn same_set(&self, other: &Region) -> Result<bool, Error> {
        Ok(self.contains_region(other)? && other.contains_region(self)?)
    }
}

// ---------------------------------------------------------------------------
// wire format

#[derive(Serialize, Deserialize)]
pub(crate) struct ConstraintWire {
    pub(crate) coeffs: Vec<String>,
    pub(crate) rel: Relation,
    pub(crate) rhs: String,
}

impl ConstraintWire {
    pub(crate) fn from_constraint(c: &LinearConstraint) -> Self {
        ConstraintWire {
            coeffs: c.coeffs.0.iter().map(format_rational).collect(),
            rel: c.relation,
            rhs: format_rational(&c.rhs),
        }
    }

    /// Decodes with a field-path prefix for error messages.
    pub(crate) fn to_constraint(&self, dim: usize, at: &str) -> Result<LinearConstraint, Error> {
        if self.coeffs.len() != dim {
            return Err(Error::validation(
                format!("{at}.coeffs"),
                format!("expected {} coefficients, got {}", dim, self.coeffs.len()),
            ));
        }
        let coeffs: Result<Vec<Rational>, _> =
            self.coeffs.iter().map(|s| parse_rational(s)).collect();
        let coeffs = coeffs
            .map_err(|_| Error::validation(format!("{at}.coeffs"), "malformed rational"))?;
        let rhs = parse_rational(&self.rhs)
            .map_err(|_| Error::validation(format!("{at}.rhs"), "malformed rational"))?;
        Ok(LinearConstraint::new(Vector(coeffs), self.rel, rhs))
    }
}

#[derive(Serialize, Deserialize)]
struct RegionWire {
    dimension: usize,
    pieces: Vec<Vec<ConstraintWire>>,
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RegionWire {
            dimension: self.dimension,
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    p.constraints
                        .iter()
                        .map(ConstraintWire::from_constraint)
                        .collect()
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = RegionWire::deserialize(d)?;
        if wire.dimension == 0 {
            return Err(D::Error::custom("dimension: must be positive"));
        }
        let mut pieces = Vec::with_capacity(wire.pieces.len());
        for (i, pw) in wire.pieces.iter().enumerate() {
            let mut cs = Vec::with_capacity(pw.len());
            for (j, cw) in pw.iter().enumerate() {
                let at = |field: &str| format!("pieces[{i}][{j}].{field}");
                if cw.coeffs.len() != wire.dimension {
                    return Err(D::Error::custom(format!(
                        "{}: expected {} coefficients, got {}",
                        at("coeffs"),
                        wire.dimension,
                        cw.coeffs.len()
                    )));
                }
                let coeffs: Result<Vec<Rational>, _> =
                    cw.coeffs.iter().map(|s| parse_rational(s)).collect();
                let coeffs =
                    coeffs.map_err(|_| D::Error::custom(format!("{}: malformed rational", at("coeffs"))))?;
                let rhs = parse_rational(&cw.rhs)
                    .map_err(|_| D::Error::custom(format!("{}: malformed rational", at("rhs"))))?;
                cs.push(LinearConstraint::new(Vector(coeffs), cw.rel, rhs));
            }
            pieces.push(HPolyhedron {
                dimension: wire.dimension,
                constraints: cs,
            });
        }
        Ok(Region {
            dimension: wire.dimension,
            pieces,
        })
    }
}

/// Feasibility cross-check entry point used by property tests: the
/// elimination-based oracle applied to one piece.
fn constraint_order(a: &LinearConstraint, b: &LinearConstraint) -> std::cmp::Ordering {
    (&a.coeffs.0, a.relation as u8, &a.rhs).cmp(&(&b.coeffs.0, b.relation as u8, &b.rhs))
}

/// True iff every point satisfying `premises` satisfies `claim`.
fn constraints_imply(premises: &[LinearConstraint], claim: &LinearConstraint) -> Result<bool, Error> {
    for neg in claim.negations() {
        let mut sys = premises.to_vec();
        sys.push(neg);
        if lp_feasible(&sys)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `inner subseteq outer`, both single pieces.
fn piece_subset(inner: &HPolyhedron, outer: &HPolyhedron) -> Result<bool, Error> {
    for c in &outer.constraints {
        if !constraints_imply(&inner.constraints, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn piece_feasible_by_elimination(p: &HPolyhedron) -> Result<bool, Error> {
    fm_feasible(&p.constraints)
}
