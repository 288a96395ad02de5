//! Judgment aggregation with integrity constraints in restricted languages.
//!
//! Profiles of binary ballots are aggregated by Kemeny, Slater, reversal
//! scoring, Young, Max-Hamming and ranked agenda (Tideman). Constraints can be
//! CNF formulas (with Krom/Horn fragment detection), DNNF circuits or budget
//! limits. Tractable engines are used where the constraint language allows
//! them and exact enumeration everywhere else.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod amc;
pub mod circuit;
mod error;
pub mod logic;
pub mod model;
pub mod rules;

pub use error::{Error, Result};
pub use logic::{Assignment, Clause, CnfFormula, Fragments, Lit, Var};
pub use model::{Ballot, IssueSet, PartialBallot, Profile};
