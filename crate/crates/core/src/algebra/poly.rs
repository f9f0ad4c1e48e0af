use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::term::pow_rat;
use super::{Rational, Term, Var};
use crate::error::{Error, Result};

/// Power product, sorted by variable with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn from_factors(mut f: Vec<(Var, u32)>) -> Monomial {
        f.retain(|(_, e)| *e > 0);
        f.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(f.len());
        for (v, e) in f {
            match out.last_mut() {
                Some((w, k)) if *w == v => *k += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exp(&self, v: &Var) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut f = self.0.clone();
        f.extend(other.0.iter().cloned());
        Monomial::from_factors(f)
    }

    /// Splits into the part over `inside` and the rest.
    pub fn split(&self, inside: &BTreeSet<Var>) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(v, _)| inside.contains(v));
        (Monomial(a), Monomial(b))
    }

    fn without(&self, v: &Var, k: u32) -> Monomial {
        Monomial::from_factors(
            self.0
                .iter()
                .map(|(w, e)| if w == v { (w.clone(), e - k) } else { (w.clone(), *e) })
                .collect(),
        )
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the larger exponent
    /// in the earliest variable wins.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a[i].1.cmp(&b[j].1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                },
            }
        }
        (a.len() - i).cmp(&(b.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with rational coefficients. No zero
/// coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn var(v: Var) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rational)>) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the leading monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, k)| (m.clone(), k * c)))
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, env: &BTreeMap<Var, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                t *= pow_rat(env.get(v)?, *e);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Substitutes values for some variables, leaving the others symbolic.
    pub fn substitute(&self, env: &BTreeMap<Var, Rational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut k = c.clone();
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                match env.get(v) {
                    Some(a) => k *= pow_rat(a, *e),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(Monomial(rest), k);
        }
        out
    }

    /// Coefficients of `self` viewed as a polynomial in `in_vars`, listed
    /// from the leading power product down.
    pub fn coefficients(&self, in_vars: &BTreeSet<Var>) -> Vec<Polynomial> {
        let mut groups: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split(in_vars);
            groups.entry(inside).or_default().add_term(outside, c.clone());
        }
        groups.into_iter().rev().map(|(_, p)| p).filter(|p| !p.is_zero()).collect()
    }

    /// Multiplies by the positive lcm of the coefficient denominators.
    pub fn integer_cleared(&self) -> Polynomial {
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        self.scale(&Rational::from_integer(l))
    }

    /// Returns `v` when the polynomial is `c * v^e`.
    pub fn as_single_var_power(&self) -> Option<Var> {
        if self.terms.len() != 1 {
            return None;
        }
        let m = self.terms.keys().next()?;
        match m.0.as_slice() {
            [(v, _)] => Some(v.clone()),
            _ => None,
        }
    }

    /// Removes the largest power of `v` dividing every term.
    pub fn divide_out(&self, v: &Var) -> Polynomial {
        let k = self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0);
        if k == 0 {
            return self.clone();
        }
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.without(v, k), c.clone())))
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    /// Rebuilds an expression tree that prints as the canonical polynomial
    /// text, e.g. `a x^2 + b x - 1`.
    pub fn to_term(&self) -> Term {
        let mut acc: Option<Term> = None;
        for (m, c) in self.terms() {
            acc = Some(match acc {
                None => monomial_term(m, c),
                Some(t) if c.is_negative() => Term::sub(t, monomial_term(m, &-c)),
                Some(t) => Term::add(t, monomial_term(m, c)),
            });
        }
        acc.unwrap_or_else(|| Term::Const(Rational::zero()))
    }
}

fn monomial_term(m: &Monomial, c: &Rational) -> Term {
    let factors: Vec<Term> = m
        .0
        .iter()
        .map(|(v, e)| if *e == 1 { Term::Var(v.clone()) } else { Term::pow(Term::Var(v.clone()), *e) })
        .collect();
    if factors.is_empty() {
        return Term::Const(c.clone());
    }
    let mut it = factors.into_iter();
    let first = it.next().unwrap();
    let mut acc = if c.is_one() {
        first
    } else if (-c).is_one() {
        Term::neg(first)
    } else {
        Term::mul(Term::Const(c.clone()), first)
    };
    for f in it {
        acc = Term::mul(acc, f);
    }
    acc
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

/// Expands a division-free term.
pub fn term_to_polynomial(t: &Term) -> Result<Polynomial> {
    Ok(match t {
        Term::Const(c) => Polynomial::constant(c.clone()),
        Term::Var(v) => Polynomial::var(v.clone()),
        Term::Neg(a) => -&term_to_polynomial(a)?,
        Term::Add(a, b) => &term_to_polynomial(a)? + &term_to_polynomial(b)?,
        Term::Sub(a, b) => &term_to_polynomial(a)? - &term_to_polynomial(b)?,
        Term::Mul(a, b) => &term_to_polynomial(a)? * &term_to_polynomial(b)?,
        Term::Pow(a, n) => term_to_polynomial(a)?.pow(*n),
        Term::Div(..) => return Err(Error::DivPresent),
    })
}
