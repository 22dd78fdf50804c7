//! Credal inference for probabilistic answer set programs (PASP).
//!
//! A PASP is a normal logic program extended with independent probabilistic
//! facts `p::a`. Each subset of the probabilistic facts selects a *world*;
//! a world may have several answer sets, so a query receives a probability
//! interval `[lower, upper]` rather than a point value.
//!
//! The crate computes those intervals exactly, either directly on the whole
//! program or on the query's *residual program*: the part of the grounding
//! that is still undefined in the well-founded model and reachable from the
//! query. The residual preserves the bounds while usually being much
//! smaller.
//!
//! Pipeline:
//!
//! 1. [`syntax`] parses and renders programs.
//! 2. [`residual::encode_probabilistic_facts`] turns every `p::a` into an
//!    even loop `a :- not na. na :- not a.`.
//! 3. [`ground`] instantiates the rules bottom-up and builds call and
//!    dependency graphs.
//! 4. [`wfs`] computes the well-founded model and the WF reduct.
//! 5. [`residual::extract_residual`] keeps the query-relevant undefined part
//!    and decodes the even loops back into probabilistic facts.
//! 6. [`credal`] evaluates the bounds by world enumeration or as a
//!    second-level algebraic model count.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod bench;
pub mod corpus;
pub mod credal;
mod error;
pub mod ground;
pub mod residual;
mod search;
pub mod stable;
pub mod syntax;
pub mod wfs;

pub use error::{Error, Result};
pub use syntax::{parse_program, parse_query, render_program, Atom, Literal, ProbFact, Program, Query, Rule, Term};
