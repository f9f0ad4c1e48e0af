//! Concrete syntax: parser, canonical printer, solver emitters.

mod emit;
mod lexer;
mod parser;
mod printer;

pub use emit::{emit_qepcad_style, emit_smt2};
pub use parser::{parse_formula, parse_term};
pub use printer::{print_formula, print_term};

use std::fmt;

/// Byte range into the parsed text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}..{}: expected {}, found {}",
            self.span.start,
            self.span.end,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}
