//! LTL syntax, parsing, printing, rewriting and lasso-trace evaluation.
//!
//! Formulas are immutable trees; every operation here is a pure function and
//! safe to call concurrently.

mod ast;
pub(crate) mod lexer;
mod parser;
mod printer;
mod rewrite;
mod trace;

pub use ast::{Ap, Formula};
pub(crate) use parser::parse_with_calls_tokens;
pub use parser::{parse, parse_with_calls, parse_with_known, CallExpander, ParseError, Parsed};
pub use printer::print;
pub use rewrite::{nnf, simplify};
pub use trace::{evaluate_on_lasso, EvalError, LassoTrace, TraceError};
