//! Flag-shaped blockers of 123-avoiding permutation matrices.
//!
//! A blocker is a set of cells of an n×n grid met by every 123-avoiding
//! permutation matrix. This crate builds the flag-shaped family, decides
//! blocker properties by exhaustive enumeration, computes exact face ranks
//! and searches for all minimum blockers of small orders.

pub mod blocker_model;
pub mod cardinality;
pub mod error;
pub mod oracle;
pub mod perm_core;
pub mod polytope_rank;
pub mod search_engine;

pub use blocker_model::{Cell, FlagSpec, PositionSet};
pub use error::{Error, Result};
pub use perm_core::{HankelLabel, Permutation, Symmetry, DEFAULT_ORDER_LIMIT};
