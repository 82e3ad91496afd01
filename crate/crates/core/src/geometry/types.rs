//! Constraint and polytope representations.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{Rational, Vector};

/// Comparison relation of a linear constraint. Strict relations are
/// first-class: region complements and structural-safety violation
/// systems depend on them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt)
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// `coeffs . x  REL  rhs`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coeffs: Vector,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vector, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn satisfied_by(&self, point: &Vector) -> bool {
        self.relation.holds(&self.coeffs.dot(point), &self.rhs)
    }

    /// Logical negation: relation flipped with strictness toggled.
    /// An equality negates into two strict pieces.
    pub fn negations(&self) -> Vec<LinearConstraint> {
        let flip = |relation| {
            LinearConstraint::new(self.coeffs.clone(), relation, self.rhs.clone())
        };
        match self.relation {
            Relation::Lt => vec![flip(Relation::Ge)],
            Relation::Le => vec![flip(Relation::Gt)],
            Relation::Ge => vec![flip(Relation::Lt)],
            Relation::Gt => vec![flip(Relation::Le)],
            Relation::Eq => vec![flip(Relation::Lt), flip(Relation::Gt)],
        }
    }

    /// Rewrites as `coeffs . x <= rhs` / `< ` / `=` (Ge/Gt get negated).
    pub fn as_upper(&self) -> LinearConstraint {
        match self.relation {
            Relation::Ge => LinearConstraint::new(
                -&self.coeffs,
                Relation::Le,
                -self.rhs.clone(),
            ),
            Relation::Gt => LinearConstraint::new(
                -&self.coeffs,
                Relation::Lt,
                -self.rhs.clone(),
            ),
            _ => self.clone(),
        }
    }

    /// The constraint on `x + t` that this constraint imposes on `x`.
    pub fn translated(&self, t: &Vector) -> LinearConstraint {
        LinearConstraint::new(
            self.coeffs.clone(),
            self.relation,
            &self.rhs + &self.coeffs.dot(t),
        )
    }

    /// `0 . x REL rhs` with no solution, i.e. a trivially false constant.
    pub fn is_trivially_false(&self) -> bool {
        self.coeffs.is_zero() && !self.relation.holds(&Rational::zero(), &self.rhs)
    }

    pub fn is_trivially_true(&self) -> bool {
        self.coeffs.is_zero() && self.relation.holds(&Rational::zero(), &self.rhs)
    }
}

/// Solution set of finitely many linear constraints. An empty
/// constraint list denotes all of `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolyhedron {
    pub dimension: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl HPolyhedron {
    pub fn new(dimension: usize, constraints: Vec<LinearConstraint>) -> Result<Self, Error> {
        for c in &constraints {
            if c.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: c.dim(),
                });
            }
        }
        Ok(HPolyhedron {
            dimension,
            constraints,
        })
    }

    pub fn universe(dimension: usize) -> Self {
        HPolyhedron {
            dimension,
            constraints: Vec::new(),
        }
    }

    pub fn contains(&self, point: &Vector) -> bool {
        self.constraints.iter().all(|c| c.satisfied_by(point))
    }

    pub fn has_strict(&self) -> bool {
        self.constraints.iter().any(|c| c.relation.is_strict())
    }
}

/// Convex hull of a finite, nonempty vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    pub dimension: usize,
    pub vertices: Vec<Vector>,
}

impl VPolytope {
    pub fn new(dimension: usize, vertices: Vec<Vector>) -> Result<Self, Error> {
        if vertices.is_empty() {
            return Err(Error::EmptyInput("VPolytope requires at least one vertex"));
        }
        for v in &vertices {
            if v.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: v.dim(),
                });
            }
        }
        Ok(VPolytope {
            dimension,
            vertices,
        })
    }

    pub fn singleton(point: Vector) -> Self {
        VPolytope {
            dimension: point.dim(),
            vertices: vec![point],
        }
    }

    pub fn from_int_vertices(dimension: usize, vertices: &[&[i64]]) -> Self {
        VPolytope {
            dimension,
            vertices: vertices.iter().map(|v| Vector::from_ints(v)).collect(),
        }
    }

    /// Point reflection through the origin (`-P`).
    pub fn reflected(&self) -> VPolytope {
        VPolytope {
            dimension: self.dimension,
            vertices: self.vertices.iter().map(|v| -v).collect(),
        }
    }

    pub fn translated(&self, t: &Vector) -> VPolytope {
        VPolytope {
            dimension: self.dimension,
            vertices: self.vertices.iter().map(|v| v + t).collect(),
        }
    }

    /// Max |coordinate| over all vertices (infinity-norm radius).
    pub fn norm_inf(&self) -> Rational {
        self.vertices
            .iter()
            .map(Vector::norm_inf)
            .max()
            .expect("nonempty vertex list")
    }
}

/// Affine hyperplane `normal . x = offset` with `normal != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub normal: Vector,
    pub offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: Vector, offset: Rational) -> Result<Self, Error> {
        if normal.is_zero() {
            return Err(Error::Precondition("hyperplane normal must be nonzero".into()));
        }
        Ok(Hyperplane { normal, offset })
    }
}
