//! Deciders, strategies and instance generators for Minkowski games:
//! two players alternately pick convex polytopic move sets, the
//! opponent resolves each pick to a concrete translation vector, and
//! the objective is stated over the resulting trajectory in R^d
//! (boundedness, safety, safety-until-reach, structural safety).
//!
//! All arithmetic is exact over arbitrary-precision rationals.

pub mod boundedness;
pub mod error;
pub mod geometry;
pub mod model;
pub mod rational;
pub mod reductions;
pub mod regions;
pub mod safety;
pub mod strategies;

pub use error::Error;
pub use rational::{Rational, Vector};
