//! Goal-directed evaluation of predicate answer set programs with
//! constructive negation, disequality and order constraints, and dynamic
//! consistency checking (DCC).
//!
//! The pipeline: [`syntax`] parses the input language; [`transform`] compiles
//! a program into its dual program, loop-analysis denials, the `nmr_check`
//! and the DCC rules; [`engine`] runs the top-down interpreter; [`output`]
//! renders answers, bindings, justification trees and statistics.

pub mod constraints;
pub mod engine;
pub mod output;
pub mod syntax;
pub mod transform;

pub use constraints::{ConstraintError, Store};
pub use engine::{run_query, Answer, EngineError, RunOptions, Stats};
pub use output::{render_bindings, render_code, render_justification, render_model, render_stats, RenderOptions};
pub use syntax::{
    parse_dump, parse_program, parse_query, Atom, Clause, CmpOp, Goal, Lit, ParseError, Program,
    Query, Rat, Sym, Term, Var,
};
pub use transform::{compile, CompileOptions, CompiledProgram, DccRule, DependencyGraph};
