//! Primitive positive formulas.
//!
//! A formula is `exists v1 .. vm. atom & .. & atom` where an atom is
//! `Name(t1,..,tk)` or `t1 = t2`, and a term is a variable or a domain
//! constant. `true` is the empty conjunction. Programs are lists of
//! `let Name(x,y) := formula` lines; `#` starts a comment and a line ending
//! in `&` continues on the next.

mod ast;
mod eval;
mod parse;
mod power;

pub use ast::{Atom, Binding, PpFormula, PpProgram, Term};
pub use eval::{eval_pp, eval_program};
pub use parse::{parse_formula, parse_program};
pub use power::{coordinate_name, parse_power, pp_power, PowerRelation, PpPowerSpec};
