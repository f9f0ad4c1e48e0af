use std::collections::BTreeMap;

use crate::algebra::{BlockStructure, Formula, Polynomial, Rational, RelOp, Term, Var};
use crate::error::{Error, Result};

/// A conjunction `c_1 = 0 /\ ... /\ c_t = 0`. `None` stands for false; an
/// empty list is true.
pub type ZeroSystem = Option<Vec<Polynomial>>;

pub fn zero_atom(p: &Polynomial) -> Formula {
    Formula::atom(p.to_term(), RelOp::Eq, Term::int(0))
}

pub fn system_formula(sys: &ZeroSystem) -> Formula {
    match sys {
        None => Formula::False,
        Some(cs) => Formula::and_all(cs.iter().map(zero_atom)),
    }
}

/// Two polynomials that agree up to a nonzero constant factor give the same
/// equation.
pub(crate) fn same_zero_set(p: &Polynomial, q: &Polynomial) -> bool {
    match (p.leading_coefficient(), q.leading_coefficient()) {
        (Some(a), Some(b)) => p.scale(&a.recip()) == q.scale(&b.recip()),
        (None, None) => true,
        _ => false,
    }
}

/// Collects equations, folding constants: a nonzero constant makes the
/// system false and a zero polynomial is dropped.
pub(crate) fn fold_system(cs: impl IntoIterator<Item = Polynomial>) -> ZeroSystem {
    let mut out: Vec<Polynomial> = Vec::new();
    for c in cs {
        if c.is_zero() {
            continue;
        }
        if c.is_constant() {
            return None;
        }
        if !out.iter().any(|d| same_zero_set(d, &c)) {
            out.push(c);
        }
    }
    Some(out)
}

/// Coefficient system of `p` at level `i`, before conversion to a formula.
pub fn nullsys_system(p: &Polynomial, i: usize, bs: &BlockStructure) -> Result<ZeroSystem> {
    let k = bs.k();
    if i < 1 || i > k + 1 {
        return Err(Error::LevelOutOfRange { level: i, blocks: k });
    }
    let inner = bs.vars_from_level(i);
    if p.vars().is_disjoint(&inner) {
        return Ok(fold_system([p.clone()]));
    }
    Ok(fold_system(p.coefficients(&inner)))
}

/// The level-`i` nullifying system of `p`: every coefficient of `p`, viewed
/// as a polynomial in the variables of blocks `i..=k`, equals zero.
pub fn nullsys(p: &Polynomial, i: usize, bs: &BlockStructure) -> Result<Formula> {
    Ok(system_formula(&nullsys_system(p, i, bs)?))
}

/// Whether fixing `fixed = g` leaves the zero polynomial.
pub fn is_nullified(p: &Polynomial, fixed: &[Var], g: &[Rational]) -> Result<bool> {
    if fixed.len() != g.len() {
        return Err(Error::LengthMismatch { vars: fixed.len(), values: g.len() });
    }
    let env: BTreeMap<Var, Rational> = fixed.iter().cloned().zip(g.iter().cloned()).collect();
    Ok(p.substitute(&env).is_zero())
}
