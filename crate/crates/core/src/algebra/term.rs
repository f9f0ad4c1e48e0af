use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::{Rational, Var};

/// Arithmetic expression over exact rationals. `Div` is a real node and is
/// never simplified away.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Rational),
    Var(Var),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
    Div(Box<Term>, Box<Term>),
}

impl Term {
    pub fn c(r: Rational) -> Term {
        Term::Const(r)
    }

    pub fn int(n: i64) -> Term {
        Term::Const(super::int(n))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Term, n: u32) -> Term {
        assert!(n >= 1, "exponent must be positive");
        Term::Pow(Box::new(a), n)
    }

    pub fn div(a: Term, b: Term) -> Term {
        Term::Div(Box::new(a), Box::new(b))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Term::Const(c) if c.is_zero())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Neg(a) | Term::Pow(a, _) => a.collect_vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Const(_) => false,
            Term::Var(v) => v == x,
            Term::Neg(a) | Term::Pow(a, _) => a.contains_var(x),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                a.contains_var(x) || b.contains_var(x)
            }
        }
    }

    pub fn has_div(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => false,
            Term::Div(..) => true,
            Term::Neg(a) | Term::Pow(a, _) => a.has_div(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => a.has_div() || b.has_div(),
        }
    }

    /// Nesting depth of division nodes (0 for a div-free term).
    pub fn div_depth(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 0,
            Term::Div(a, b) => 1 + a.div_depth().max(b.div_depth()),
            Term::Neg(a) | Term::Pow(a, _) => a.div_depth(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => a.div_depth().max(b.div_depth()),
        }
    }

    pub fn rename(&self, from: &Var, to: &Var) -> Term {
        self.map_vars(&|v| if v == from { Term::Var(to.clone()) } else { Term::Var(v.clone()) })
    }

    pub fn map_vars(&self, f: &dyn Fn(&Var) -> Term) -> Term {
        match self {
            Term::Const(_) => self.clone(),
            Term::Var(v) => f(v),
            Term::Neg(a) => Term::neg(a.map_vars(f)),
            Term::Pow(a, n) => Term::pow(a.map_vars(f), *n),
            Term::Add(a, b) => Term::add(a.map_vars(f), b.map_vars(f)),
            Term::Sub(a, b) => Term::sub(a.map_vars(f), b.map_vars(f)),
            Term::Mul(a, b) => Term::mul(a.map_vars(f), b.map_vars(f)),
            Term::Div(a, b) => Term::div(a.map_vars(f), b.map_vars(f)),
        }
    }

    /// Eager evaluation. `None` on division by zero or an unbound variable.
    pub fn eval(&self, env: &BTreeMap<Var, Rational>) -> Option<Rational> {
        Some(match self {
            Term::Const(c) => c.clone(),
            Term::Var(v) => env.get(v)?.clone(),
            Term::Neg(a) => -a.eval(env)?,
            Term::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Term::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Term::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Term::Pow(a, n) => pow_rat(&a.eval(env)?, *n),
            Term::Div(a, b) => {
                let num = a.eval(env)?;
                let den = b.eval(env)?;
                if den.is_zero() {
                    return None;
                }
                num / den
            }
        })
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::Neg(a) | Term::Pow(a, _) => 1 + a.size(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

pub(crate) fn pow_rat(r: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..n {
        acc *= r;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn eval_detects_zero_division() {
        let t = Term::div(Term::int(1), Term::sub(Term::var("x"), Term::var("x")));
        let env = [(Var::new("x"), rat(3, 1))].into_iter().collect();
        assert_eq!(t.eval(&env), None);
    }

    #[test]
    fn div_depth_counts_nesting() {
        let inner = Term::div(Term::int(1), Term::var("b"));
        let t = Term::div(Term::int(1), Term::add(Term::var("a"), inner));
        assert_eq!(t.div_depth(), 2);
        assert!(t.has_div());
        assert_eq!(t.vars().len(), 2);
    }
}
