//! Real arithmetic formulas with division: lazy partial evaluation, a grid
//! oracle for fair satisfiability, and translation into division-free
//! formulas guarded against vanishing denominators.

// `Term::add`, `Formula::not` and friends are AST constructors
#![allow(clippy::should_implement_trait)]

pub mod algebra;
pub mod error;
pub mod fraction;
pub mod nullify;
pub mod oracle;
pub mod peval;
pub mod rewrite;
pub mod syntax;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;
pub mod translate;

pub use algebra::{
    term_to_polynomial, Atom, Block, BlockStructure, Formula, FreshState, Monomial, Polynomial,
    PropKind, PropVar, Quant, Rational, RelOp, Term, Var,
};
pub use error::{Error, Result};
