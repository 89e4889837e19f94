//! An exact-arithmetic laboratory for assignment-based extended formulations
//! of the traveling salesman problem.
//!
//! The crate builds the assignment polytope and its extensions by travel-leg
//! and triplet variables, solves linear programs over them with an exact
//! rational simplex, and checks extension, equivalence and cost-accounting
//! properties against brute-force oracles on small instances.

pub mod consys;
pub mod error;
pub mod instances;
pub mod lp;
pub mod projection;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
