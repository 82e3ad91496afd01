//! Exact rational computational geometry: linear programming,
//! variable elimination, hull queries and representation conversion.
//!
//! Everything here is exact; no floating point anywhere. Feasibility
//! has two independent implementations (simplex in [`lp`],
//! elimination in [`fourier_motzkin`]) so each can check the other.

pub mod convert;
pub mod fourier_motzkin;
pub mod hull;
pub mod linalg;
pub mod lp;
pub mod types;

pub use convert::{enumerate_vertices, is_bounded, to_halfspaces};
pub use fourier_motzkin::{fm_feasible, normalize_constraint, project};
pub use hull::{
    caratheodory_decompose, canonicalize_vertices, hull_membership, minkowski_sum_v,
    separates, separating_direction,
};
pub use linalg::{kernel_basis, rank_of};
pub use lp::{feasible_point, lp_feasible, maximize, CoreRel, Row, Solution};
pub use types::{HPolyhedron, Hyperplane, LinearConstraint, Relation, VPolytope};
