//! Rational-function view of terms. A term with divisions is rewritten as
//! `N / (p_1^e_1 ... p_r^e_r)` where every `p_i` is the cleared denominator
//! polynomial of one division node. This is the bookkeeping behind both the
//! legality test and atom clearing.

use num_traits::Zero;

use crate::algebra::{Atom, Polynomial, RelOp, Term};

struct Entry {
    poly: Polynomial,
    depth: usize,
    seq: usize,
}

#[derive(Default)]
struct Registry {
    entries: Vec<Entry>,
}

impl Registry {
    fn register(&mut self, poly: Polynomial, depth: usize) -> usize {
        if let Some(i) = self.entries.iter().position(|e| e.poly == poly) {
            return i;
        }
        let seq = self.entries.len();
        self.entries.push(Entry { poly, depth, seq });
        seq
    }

    /// Registration order of the elimination loop: most deeply nested
    /// first, leftmost among equals.
    fn ordered(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.entries.len()).collect();
        idx.sort_by_key(|&i| (std::cmp::Reverse(self.entries[i].depth), self.entries[i].seq));
        idx
    }
}

#[derive(Clone)]
struct Frac {
    num: Polynomial,
    exps: Vec<u32>,
}

impl Frac {
    fn poly(p: Polynomial) -> Frac {
        Frac { num: p, exps: Vec::new() }
    }

    fn exp(&self, i: usize) -> u32 {
        self.exps.get(i).copied().unwrap_or(0)
    }
}

fn den_power(reg: &Registry, exps: &[(usize, u32)]) -> Polynomial {
    let mut acc = Polynomial::one();
    for &(i, e) in exps {
        if e > 0 {
            acc = &acc * &reg.entries[i].poly.pow(e);
        }
    }
    acc
}

/// Brings two fractions over the common denominator (max exponent per
/// polynomial) and returns the rescaled numerators.
fn common(reg: &Registry, a: &Frac, b: &Frac) -> (Polynomial, Polynomial, Vec<u32>) {
    let n = a.exps.len().max(b.exps.len());
    let exps: Vec<u32> = (0..n).map(|i| a.exp(i).max(b.exp(i))).collect();
    let lift = |f: &Frac| {
        let extra: Vec<(usize, u32)> = (0..n).map(|i| (i, exps[i] - f.exp(i))).collect();
        &f.num * &den_power(reg, &extra)
    };
    (lift(a), lift(b), exps)
}

fn frac(t: &Term, depth: usize, reg: &mut Registry) -> Frac {
    match t {
        Term::Const(c) => Frac::poly(Polynomial::constant(c.clone())),
        Term::Var(v) => Frac::poly(Polynomial::var(v.clone())),
        Term::Neg(a) => {
            let f = frac(a, depth, reg);
            Frac { num: -&f.num, exps: f.exps }
        }
        Term::Add(a, b) | Term::Sub(a, b) => {
            let fa = frac(a, depth, reg);
            let fb = frac(b, depth, reg);
            let (na, nb, exps) = common(reg, &fa, &fb);
            let num = if matches!(t, Term::Add(..)) { &na + &nb } else { &na - &nb };
            Frac { num, exps }
        }
        Term::Mul(a, b) => {
            let fa = frac(a, depth, reg);
            let fb = frac(b, depth, reg);
            let n = fa.exps.len().max(fb.exps.len());
            Frac { num: &fa.num * &fb.num, exps: (0..n).map(|i| fa.exp(i) + fb.exp(i)).collect() }
        }
        Term::Pow(a, k) => {
            let f = frac(a, depth, reg);
            Frac { num: f.num.pow(*k), exps: f.exps.iter().map(|e| e * k).collect() }
        }
        Term::Div(a, b) => {
            let fa = frac(a, depth, reg);
            let fb = frac(b, depth + 1, reg);
            // a / (Nb / D) = a * D / Nb
            let d: Vec<(usize, u32)> = fb.exps.iter().copied().enumerate().collect();
            let num = &fa.num * &den_power(reg, &d);
            match fb.num.constant_value() {
                Some(c) if !c.is_zero() => {
                    let inv = c.recip();
                    Frac { num: num.scale(&inv), exps: fa.exps }
                }
                _ => {
                    let i = reg.register(fb.num, depth);
                    let mut exps = fa.exps;
                    if exps.len() <= i {
                        exps.resize(i + 1, 0);
                    }
                    exps[i] += 1;
                    Frac { num, exps }
                }
            }
        }
    }
}

/// Final denominator polynomials of `t`, in elimination order. A nonzero
/// constant denominator is folded and never listed.
pub fn denominators(t: &Term) -> Vec<Polynomial> {
    let mut reg = Registry::default();
    frac(t, 0, &mut reg);
    reg.ordered().into_iter().map(|i| reg.entries[i].poly.clone()).collect()
}

/// True when some final denominator of `t` is the zero polynomial, i.e. no
/// assignment to the remaining variables avoids a division by zero.
pub fn has_null_denominator(t: &Term) -> bool {
    denominators(t).iter().any(Polynomial::is_zero)
}

/// `t` as numerator over a product of powers of its final denominators.
pub fn to_fraction(t: &Term) -> (Polynomial, Vec<(Polynomial, u32)>) {
    let mut reg = Registry::default();
    let f = frac(t, 0, &mut reg);
    let den = reg.ordered().into_iter().map(|i| (reg.entries[i].poly.clone(), f.exp(i))).collect();
    (f.num, den)
}

/// Division-free form of an atom: `poly op 0`, together with the final
/// denominator polynomials of both sides in elimination order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClearedAtom {
    pub poly: Polynomial,
    pub op: RelOp,
    pub denominators: Vec<Polynomial>,
}

impl ClearedAtom {
    pub fn to_atom(&self) -> Atom {
        Atom::new(self.poly.to_term(), self.op, Term::int(0))
    }
}

/// Clears every denominator of `a`. For `=` and `/=` the cleared polynomial
/// is the numerator of `lhs - rhs`; for order relations each odd power of a
/// denominator contributes one extra factor so the sign is preserved.
pub fn clear(a: &Atom) -> ClearedAtom {
    let mut reg = Registry::default();
    let diff = Term::sub(a.lhs.clone(), a.rhs.clone());
    let f = frac(&diff, 0, &mut reg);
    let mut poly = f.num.clone();
    if a.op.is_order() {
        for (i, e) in f.exps.iter().enumerate() {
            if e % 2 == 1 {
                poly = &poly * &reg.entries[i].poly;
            }
        }
    }
    let denominators = reg.ordered().into_iter().map(|i| reg.entries[i].poly.clone()).collect();
    ClearedAtom { poly: poly.integer_cleared(), op: a.op, denominators }
}
