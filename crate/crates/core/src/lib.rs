//! Computational universal algebra on small finite domains.
//!
//! `clonelab` evaluates primitive positive formulas, builds pp-powers,
//! searches homomorphisms, enumerates polymorphisms and decides whether a
//! minor condition (a set of height-one identities) is satisfiable in a
//! polymorphism clone. On top of that it ships a corpus of pp-constructions
//! and witnesses for clones of self-dual operations on `{0,1,2}` and a report
//! that re-derives the separating minor conditions between those clones.
//!
//! Module map:
//!
//! * [`algebra`]: operations, relations, structures, minors, duals.
//! * [`catalog`]: named relations, operations and structures.
//! * [`ppform`]: pp-formula syntax, evaluation and pp-powers.
//! * [`csp`]: the finite-domain table-constraint solver underneath everything.
//! * [`galois`]: polymorphisms, generated clones, pp-definability.
//! * [`minorcond`]: minor conditions, witnesses and their decision.
//! * [`homsearch`]: homomorphisms and pp-construction verification.
//! * [`corpus`]: loader and self-test for the shipped data files.
//! * [`report`]: the separation table report.
//! * [`textfmt`]: the plain-text structure and operation file format.

pub mod algebra;
pub mod catalog;
pub mod corpus;
pub mod csp;
pub mod error;
pub mod galois;
pub mod homsearch;
mod lex;
pub mod minorcond;
pub mod ppform;
pub mod report;
pub mod textfmt;

pub use algebra::{DomainSize, Operation, Permutation, Relation, Structure, VarMap};
pub use error::{Error, Result};
