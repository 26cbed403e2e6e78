//! A small language for q-series identities.
//!
//! See `docs/dsl.md` for the grammar.

mod ast;
mod eval;
mod exppoly;
mod parser;
mod printer;

pub use ast::{Expr, Factor, IdentityRecord, InstanceSpec, Length, MonoExpr, Poch, Range, RecordBody, SumExpr, Term};
pub use eval::{evaluate, evaluate_mono, EvalError, InvalidReason, QSub, Specialization};
pub use exppoly::{ExpEvalError, ExpPoly};
pub use parser::{parse_expr, parse_file, parse_mono, parse_record, ParseError};
pub use printer::{print_expr, print_mono, print_record};
