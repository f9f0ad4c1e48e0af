//! Random inputs and property checks shared by the unit tests and the
//! acceptance runner. Enabled by the `testkit` feature.

pub mod props;

use std::collections::BTreeMap;

use proptest::prelude::*;

use crate::algebra::{int, rat, Atom, Formula, PropVar, Quant, Rational, RelOp, Term, Var};
use crate::oracle::CandidateGrid;

/// Terms over `names` whose divisions all have numerator 1, with at most
/// `max_divs` division nodes.
pub fn arb_unit_div_term(names: &'static [&'static str], max_divs: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        2 => prop::sample::select(names.to_vec()).prop_map(Term::var),
        1 => (-2i64..3).prop_map(Term::int),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
            inner.clone().prop_map(|a| Term::pow(a, 2)),
            inner.prop_map(|b| Term::div(Term::int(1), b)),
        ]
    })
    .prop_filter("too many divisions", move |t| div_count(t) <= max_divs)
}

pub fn div_count(t: &Term) -> usize {
    match t {
        Term::Const(_) | Term::Var(_) => 0,
        Term::Neg(a) | Term::Pow(a, _) => div_count(a),
        Term::Div(a, b) => 1 + div_count(a) + div_count(b),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => div_count(a) + div_count(b),
    }
}

pub fn arb_op() -> impl Strategy<Value = RelOp> {
    prop::sample::select(RelOp::ALL.to_vec())
}

/// Atoms with at least one division, at most `max_divs` in total.
pub fn arb_div_atom(names: &'static [&'static str], max_divs: usize) -> impl Strategy<Value = Atom> {
    (arb_unit_div_term(names, max_divs), arb_op(), arb_unit_div_term(names, max_divs))
        .prop_map(|(l, op, r)| Atom::new(l, op, r))
        .prop_filter("needs a division within budget", move |a| {
            let n = div_count(&a.lhs) + div_count(&a.rhs);
            n >= 1 && n <= max_divs
        })
}

/// Small rationals, biased towards values that make denominators vanish.
pub fn arb_value() -> impl Strategy<Value = Rational> {
    prop_oneof![
        4 => (-1i64..2).prop_map(int),
        1 => prop::sample::select(vec![int(2), int(-2), rat(1, 2), rat(-1, 2), rat(3, 2)]),
    ]
}

/// A quantifier for each variable in `names`; consecutive equal quantifiers
/// merge into one block.
pub fn arb_prefix(names: &'static [&'static str]) -> impl Strategy<Value = Vec<(Quant, Var)>> {
    prop::collection::vec(prop::bool::ANY, names.len()).prop_map(move |qs| {
        names
            .iter()
            .zip(qs)
            .map(|(n, q)| (if q { Quant::Forall } else { Quant::Exists }, Var::new(n)))
            .collect()
    })
}

pub fn env(vars: &[Var], vals: &[Rational]) -> BTreeMap<Var, Rational> {
    vars.iter().cloned().zip(vals.iter().cloned()).collect()
}

pub fn div_count_formula(f: &Formula) -> usize {
    f.atoms().iter().map(|a| div_count(&a.lhs) + div_count(&a.rhs)).sum()
}

/// Builds random closed formulas from a byte string, so proptest can drive
/// scoped generation. Binders get distinct names `v0, v1, ..`, so the result
/// is standardized apart.
pub struct Builder<'a> {
    bytes: &'a [u8],
    pos: usize,
    next_var: usize,
    next_prop: u32,
    divs_left: usize,
    pub props: bool,
    pub negations: bool,
}

impl<'a> Builder<'a> {
    pub fn new(bytes: &'a [u8], max_divs: usize) -> Builder<'a> {
        Builder { bytes, pos: 0, next_var: 0, next_prop: 1, divs_left: max_divs, props: false, negations: true }
    }

    fn pick(&mut self, n: usize) -> usize {
        let b = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b as usize % n
    }

    pub fn fresh_var(&mut self) -> Var {
        let v = Var::new(&format!("v{}", self.next_var));
        self.next_var += 1;
        v
    }

    pub fn term(&mut self, scope: &[Var], depth: usize) -> Term {
        let c = self.pick(8);
        if depth == 0 || c < 3 {
            if !scope.is_empty() && self.pick(3) > 0 {
                return Term::Var(scope[self.pick(scope.len())].clone());
            }
            return Term::int(self.pick(4) as i64 - 1);
        }
        match c {
            3 => Term::add(self.term(scope, depth - 1), self.term(scope, depth - 1)),
            4 => Term::sub(self.term(scope, depth - 1), self.term(scope, depth - 1)),
            5 => Term::mul(self.term(scope, depth - 1), self.term(scope, depth - 1)),
            6 => Term::pow(self.term(scope, depth - 1), 2),
            _ if self.divs_left > 0 => {
                self.divs_left -= 1;
                Term::div(Term::int(1), self.term(scope, depth - 1))
            }
            _ => self.term(scope, depth - 1),
        }
    }

    pub fn atom(&mut self, scope: &[Var]) -> Formula {
        let l = self.term(scope, 2);
        let op = RelOp::ALL[self.pick(6)];
        let r = self.term(scope, 1);
        Formula::atom(l, op, r)
    }

    /// Outside every quantifier only constants and propositional variables
    /// are produced: no evaluation rule reaches an atom there.
    fn leaf(&mut self, scope: &[Var]) -> Formula {
        if scope.is_empty() && !self.props {
            return if self.pick(2) == 0 { Formula::True } else { Formula::False };
        }
        if self.props && (scope.is_empty() || self.pick(4) == 0) {
            let i = self.next_prop;
            self.next_prop += 1;
            let p = if self.pick(2) == 0 { Formula::u(i) } else { Formula::v(i) };
            return if self.pick(2) == 0 { Formula::not(p) } else { p };
        }
        self.atom(scope)
    }

    /// Any closed formula over `/\`, `\/`, `~` and quantifiers.
    pub fn formula(&mut self, scope: &mut Vec<Var>, depth: usize) -> Formula {
        let c = self.pick(10);
        if depth == 0 || c < 3 {
            return self.leaf(scope);
        }
        match c {
            3 if self.negations => Formula::not(self.formula(scope, depth - 1)),
            3 | 4 => Formula::and(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            5 => Formula::or(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            _ => {
                let v = self.fresh_var();
                scope.push(v.clone());
                let body = self.formula(scope, depth - 1);
                scope.pop();
                if c < 8 {
                    Formula::exists(vec![v], body)
                } else {
                    Formula::forall(vec![v], body)
                }
            }
        }
    }

    /// A positive prenex formula over `n` fresh variables.
    pub fn prenex(&mut self, n: usize, depth: usize) -> Formula {
        let vars: Vec<Var> = (0..n).map(|_| self.fresh_var()).collect();
        let prefix: Vec<(Quant, Var)> = vars
            .iter()
            .map(|v| (if self.pick(2) == 0 { Quant::Exists } else { Quant::Forall }, v.clone()))
            .collect();
        let saved = self.negations;
        self.negations = false;
        let mut scope = vars.clone();
        let m = self.quantifier_free(&mut scope, depth);
        self.negations = saved;
        crate::rewrite::requantify(&prefix, m)
    }

    fn quantifier_free(&mut self, scope: &mut Vec<Var>, depth: usize) -> Formula {
        let c = self.pick(4);
        if depth == 0 || c < 2 {
            return self.leaf(scope);
        }
        if c == 2 {
            Formula::and(self.quantifier_free(scope, depth - 1), self.quantifier_free(scope, depth - 1))
        } else {
            Formula::or(self.quantifier_free(scope, depth - 1), self.quantifier_free(scope, depth - 1))
        }
    }
}

pub fn arb_bytes() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 64)
}

/// Peval-safe shaped formulas over `x, y, z` with quantifiers anywhere.
pub fn arb_safe() -> impl Strategy<Value = Formula> {
    let atom = (prop::sample::select(vec!["x", "y", "z"]), arb_op(), -2i64..3)
        .prop_map(|(v, op, c)| Formula::atom(Term::var(v), op, Term::int(c)));
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        atom,
        Just(Formula::u(0)),
        Just(Formula::v(0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (prop::sample::select(vec!["x", "y", "z"]), inner.clone())
                .prop_map(|(v, a)| Formula::exists(vec![Var::new(v)], a)),
            (prop::sample::select(vec!["x", "y", "z"]), inner)
                .prop_map(|(v, a)| Formula::forall(vec![Var::new(v)], a)),
        ]
    })
    .prop_map(|f| number_props(&f))
}

/// Propositional formulas over `U`/`V` literals and constants, at most `max`
/// variables.
pub fn arb_prop(max: usize) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        3 => (any::<bool>(), any::<bool>()).prop_map(|(u, neg)| {
            let p = if u { Formula::u(0) } else { Formula::v(0) };
            if neg { Formula::not(p) } else { p }
        }),
        1 => any::<bool>().prop_map(|b| if b { Formula::True } else { Formula::False }),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.prop_map(Formula::not),
        ]
    })
    .prop_map(|f| number_props(&f))
    .prop_filter("too many variables", move |f| f.props().len() <= max)
}

/// Gives every propositional occurrence its own index, left to right.
pub fn number_props(f: &Formula) -> Formula {
    fn go(f: &Formula, n: &mut u32) -> Formula {
        match f {
            Formula::Prop(p) => {
                *n += 1;
                Formula::Prop(PropVar { kind: p.kind, index: *n })
            }
            Formula::Not(a) => Formula::not(go(a, n)),
            Formula::And(a, b) => {
                let a = go(a, n);
                Formula::and(a, go(b, n))
            }
            Formula::Or(a, b) => {
                let a = go(a, n);
                Formula::or(a, go(b, n))
            }
            Formula::Exists(vs, a) => Formula::exists(vs.clone(), go(a, n)),
            Formula::Forall(vs, a) => Formula::forall(vs.clone(), go(a, n)),
            _ => f.clone(),
        }
    }
    go(f, &mut 0)
}

/// `{-1, 0, 1, 2}` for every builder variable.
pub fn small_grid() -> CandidateGrid {
    let names: Vec<Var> = (0..8).map(|i| Var::new(&format!("v{i}"))).collect();
    CandidateGrid::uniform(&names, &[int(-1), int(0), int(1), int(2)])
}

pub fn closed(bytes: &[u8], props: bool, negations: bool) -> Formula {
    let mut b = Builder::new(bytes, 2);
    b.props = props;
    b.negations = negations;
    b.formula(&mut Vec::new(), 4)
}
