//! Exact arithmetic, terms, polynomials and formulas.

mod blocks;
mod formula;
mod fresh;
mod poly;
mod term;
mod var;

pub use blocks::{block_structure_of, Block, BlockStructure, Quant};
pub use formula::{Atom, Formula, PropKind, PropVar, RelOp};
pub use fresh::FreshState;
pub use poly::{term_to_polynomial, Monomial, Polynomial};
pub(crate) use term::pow_rat;
pub use term::Term;
pub use var::Var;

use num_bigint::BigInt;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q` with optional sign.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(n, d))
}
