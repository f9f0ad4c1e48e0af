use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{pow_rat, Atom, Formula, FreshState, Rational, Term, Var};
use crate::error::{Error, Result};
use crate::fraction::has_null_denominator;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermResult {
    Value(Term),
    Fail,
}

impl TermResult {
    pub fn value(self) -> Option<Term> {
        match self {
            TermResult::Value(t) => Some(t),
            TermResult::Fail => None,
        }
    }
}

/// Substitutes `a` for `x`, folding an operation only when all its operands
/// have become constants.
pub fn peval_term(t: &Term, x: &Var, a: &Rational) -> TermResult {
    if !t.contains_var(x) {
        return TermResult::Value(t.clone());
    }
    go(t, x, a).map_or(TermResult::Fail, TermResult::Value)
}

/// Value of a closed term, `None` if it has variables or divides by zero.
/// Operands with a value count as real constants when folding.
fn closed_value(t: &Term) -> Option<Rational> {
    match t {
        Term::Const(c) => Some(c.clone()),
        _ if t.vars().is_empty() => t.eval(&BTreeMap::new()),
        _ => None,
    }
}

fn go(t: &Term, x: &Var, a: &Rational) -> Option<Term> {
    if !t.contains_var(x) {
        return Some(t.clone());
    }
    Some(match t {
        Term::Const(_) => t.clone(),
        Term::Var(_) => Term::Const(a.clone()),
        Term::Neg(s) => {
            let s = go(s, x, a)?;
            match closed_value(&s) {
                Some(c) => Term::Const(-c),
                None => Term::neg(s),
            }
        }
        Term::Pow(s, n) => {
            let s = go(s, x, a)?;
            match closed_value(&s) {
                Some(c) => Term::Const(pow_rat(&c, *n)),
                None => Term::pow(s, *n),
            }
        }
        Term::Add(l, r) | Term::Sub(l, r) | Term::Mul(l, r) | Term::Div(l, r) => {
            let (l, r) = (go(l, x, a)?, go(r, x, a)?);
            let (lv, rv) = (closed_value(&l), closed_value(&r));
            if let (Term::Div(..), Some(d)) = (t, &rv) {
                if d.is_zero() {
                    return None;
                }
            }
            match (lv, rv, t) {
                (Some(p), Some(q), Term::Add(..)) => Term::Const(p + q),
                (Some(p), Some(q), Term::Sub(..)) => Term::Const(p - q),
                (Some(p), Some(q), Term::Mul(..)) => Term::Const(p * q),
                (Some(p), Some(q), _) => Term::Const(p / q),
                (_, _, Term::Add(..)) => Term::add(l, r),
                (_, _, Term::Sub(..)) => Term::sub(l, r),
                (_, _, Term::Mul(..)) => Term::mul(l, r),
                _ => Term::div(l, r),
            }
        }
    })
}

fn check_len(xs: &[Var], g: &[Rational]) -> Result<()> {
    if xs.len() != g.len() {
        return Err(Error::LengthMismatch { vars: xs.len(), values: g.len() });
    }
    Ok(())
}

pub fn pevalp_term(t: &Term, xs: &[Var], g: &[Rational]) -> Result<TermResult> {
    check_len(xs, g)?;
    let mut cur = t.clone();
    for (x, a) in xs.iter().zip(g) {
        match peval_term(&cur, x, a) {
            TermResult::Value(v) => cur = v,
            TermResult::Fail => return Ok(TermResult::Fail),
        }
    }
    Ok(TermResult::Value(cur))
}

/// Whether some extension of the prefix `g` (assigned to the first `g.len()`
/// variables of `order`) evaluates `t` without failure. Decided by
/// nullification of the final denominators rather than by search.
pub fn is_legal(t: &Term, order: &[Var], g: &[Rational]) -> Result<bool> {
    if let Some(v) = t.vars().into_iter().find(|v| !order.contains(v)) {
        return Err(Error::OrderIncomplete(v.name().to_string()));
    }
    if g.len() > order.len() {
        return Err(Error::LengthMismatch { vars: order.len(), values: g.len() });
    }
    Ok(match pevalp_term(t, &order[..g.len()], g)? {
        TermResult::Fail => false,
        TermResult::Value(r) => !has_null_denominator(&r),
    })
}

/// Result of evaluating one side at `x = a`: `None` when the side is illegal.
fn legal_side(t: &Term, x: &Var, a: &Rational) -> Option<Term> {
    let r = peval_term(t, x, a).value()?;
    (!has_null_denominator(&r)).then_some(r)
}

fn peval_atom(at: &Atom, x: &Var, a: &Rational, fs: &mut FreshState) -> Formula {
    match (legal_side(&at.lhs, x, a), legal_side(&at.rhs, x, a)) {
        (Some(l), Some(r)) => match (closed_value(&l), closed_value(&r)) {
            (Some(p), Some(q)) => {
                if at.op.holds(p.cmp(&q)) {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            _ => Formula::atom(l, at.op, r),
        },
        _ => Formula::u(fs.fresh()),
    }
}

fn peval_rec(h: &Formula, x: &Var, a: &Rational, fs: &mut FreshState) -> Result<Formula> {
    Ok(match h {
        Formula::True | Formula::False | Formula::Prop(_) => h.clone(),
        Formula::Atom(at) => peval_atom(at, x, a, fs),
        Formula::Not(b) => Formula::not(peval_rec(b, x, a, fs)?),
        Formula::And(l, r) => {
            let l = peval_rec(l, x, a, fs)?;
            Formula::and(l, peval_rec(r, x, a, fs)?)
        }
        Formula::Or(l, r) => {
            let l = peval_rec(l, x, a, fs)?;
            Formula::or(l, peval_rec(r, x, a, fs)?)
        }
        Formula::Implies(..) => return Err(Error::NotNormalized("implication present")),
        Formula::Exists(vs, b) | Formula::Forall(vs, b) => {
            if vs.contains(x) {
                return Ok(h.clone());
            }
            let b = peval_rec(b, x, a, fs)?;
            if matches!(h, Formula::Exists(..)) {
                Formula::exists(vs.clone(), b)
            } else {
                Formula::forall(vs.clone(), b)
            }
        }
    })
}

/// Partial evaluation of a formula. Atoms that become illegal turn into
/// fresh `U` variables; the counter never reuses an index already in `h`.
pub fn peval_formula(h: &Formula, x: &Var, a: &Rational, fs: FreshState) -> Result<(Formula, FreshState)> {
    if h.has_implies() {
        return Err(Error::NotNormalized("implication present"));
    }
    let mut fs = fs;
    fs.reserve(h.max_prop_index());
    let out = peval_rec(h, x, a, &mut fs)?;
    Ok((out, fs))
}

pub fn pevalp_formula(
    h: &Formula,
    xs: &[Var],
    g: &[Rational],
    fs: FreshState,
) -> Result<(Formula, FreshState)> {
    check_len(xs, g)?;
    let mut cur = (h.clone(), fs);
    for (x, a) in xs.iter().zip(g) {
        cur = peval_formula(&cur.0, x, a, cur.1)?;
    }
    Ok(cur)
}

/// Folds atoms without variables that lie outside every quantifier: a
/// failing side becomes a fresh `U`, otherwise the comparison is decided.
/// No partial evaluation step ever reaches those atoms; atoms under a
/// quantifier are left for the step that eliminates it.
pub fn fold_closed_atoms(h: &Formula, fs: FreshState) -> (Formula, FreshState) {
    fn go(h: &Formula, fs: &mut FreshState) -> Formula {
        match h {
            Formula::Atom(at) if at.vars().is_empty() => {
                let empty = BTreeMap::new();
                match (at.lhs.eval(&empty), at.rhs.eval(&empty)) {
                    (Some(l), Some(r)) if at.op.holds(l.cmp(&r)) => Formula::True,
                    (Some(_), Some(_)) => Formula::False,
                    _ => Formula::u(fs.fresh()),
                }
            }
            Formula::Not(a) => Formula::not(go(a, fs)),
            Formula::And(a, b) => {
                let a = go(a, fs);
                Formula::and(a, go(b, fs))
            }
            Formula::Or(a, b) => {
                let a = go(a, fs);
                Formula::or(a, go(b, fs))
            }
            Formula::Implies(a, b) => {
                let a = go(a, fs);
                Formula::implies(a, go(b, fs))
            }
            _ => h.clone(),
        }
    }
    let mut fs = fs;
    fs.reserve(h.max_prop_index());
    let out = go(h, &mut fs);
    (out, fs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};
    use crate::rewrite::lower_implies;
    use crate::syntax::{parse_formula, parse_term, print_formula, print_term};
    use proptest::prelude::*;

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    fn pt(t: &str, x: &str, a: Rational) -> String {
        match peval_term(&parse_term(t).unwrap(), &v(x), &a) {
            TermResult::Value(t) => print_term(&t),
            TermResult::Fail => "FAIL".into(),
        }
    }

    fn pf(f: &str, x: &str, a: Rational) -> Formula {
        peval_formula(&parse_formula(f).unwrap(), &v(x), &a, FreshState::new()).unwrap().0
    }

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn term_fixtures() {
        assert_eq!(pt("x*(1/y)", "x", int(0)), "0*(1/y)");
        assert_eq!(pt("x*(1/y)", "y", int(0)), "FAIL");
        assert_eq!(pt("(x*2) - y", "x", rat(3, 4)), "3/2 - y");
    }

    #[test]
    fn tuple_evaluation() {
        let t = parse_term("x*(1/y)").unwrap();
        assert_eq!(pevalp_term(&t, &[], &[]).unwrap(), TermResult::Value(t.clone()));
        assert_eq!(pevalp_term(&t, &[v("x"), v("y")], &[int(0), int(0)]).unwrap(), TermResult::Fail);
        let t = parse_term("x + 1").unwrap();
        assert_eq!(pevalp_term(&t, &[v("x")], &[int(1)]).unwrap(), TermResult::Value(Term::int(2)));
        assert_eq!(
            pevalp_term(&t, &[v("x")], &[]),
            Err(Error::LengthMismatch { vars: 1, values: 0 })
        );
    }

    #[test]
    fn legality_depends_on_order() {
        let t = parse_term("1/(x z - y)").unwrap();
        let (x, y, z) = (v("x"), v("y"), v("z"));
        assert!(!is_legal(&t, &[x.clone(), y.clone(), z.clone()], &[int(0), int(0)]).unwrap());
        assert!(is_legal(&t, &[x.clone(), z.clone(), y.clone()], &[int(0), int(0)]).unwrap());
        assert!(is_legal(&parse_term("1/2").unwrap(), &[x.clone()], &[int(0)]).unwrap());
        assert_eq!(is_legal(&t, &[x, y], &[]), Err(Error::OrderIncomplete("z".into())));
    }

    #[test]
    fn formula_fixtures() {
        let h = "x*(1/y) > 0 /\\ x < 5 \\/ U1";
        assert_eq!(pf(h, "x", int(0)), p("0*(1/y) > 0 /\\ true \\/ U1"));
        assert_eq!(pf(h, "y", int(0)), p("U2 /\\ x < 5 \\/ U1"));
        assert_eq!(pf("ex x[x/y > 1 /\\ x/(y - 3) > x^2]", "y", int(3)), p("ex x[x/3 > 1 /\\ U1]"));
        let h = parse_formula("x*(y^2 - 1) /= 0 /\\ y*(1/x) < 3").unwrap();
        let (r, _) = pevalp_formula(&h, &[v("y"), v("x")], &[int(0), int(0)], FreshState::new()).unwrap();
        assert_eq!(print_formula(&r), "false /\\ U1");
    }

    #[test]
    fn implication_row_after_lowering() {
        let h = parse_formula("1/y > 0 ==> 1/y > 0").unwrap();
        assert_eq!(
            peval_formula(&h, &v("y"), &int(0), FreshState::new()),
            Err(Error::NotNormalized("implication present"))
        );
        let (r, _) = peval_formula(&lower_implies(&h), &v("y"), &int(0), FreshState::new()).unwrap();
        assert_eq!(print_formula(&r), "~U1 \\/ U2");
    }

    #[test]
    fn quantifier_example_from_definition() {
        assert_eq!(pf("ex r[all y[x >= r \\/ y^2/(x - 1) <= 0]]", "x", int(1)), p("ex r[all y[1 >= r \\/ U1]]"));
        assert_eq!(pf("ex x[x > 0]", "x", int(1)), p("ex x[x > 0]"));
    }

    #[test]
    fn example_one_branch() {
        // F' of the first fair-SAT example at x = a, then y = a
        let f = parse_formula("ex y[2 + y = 3*2/(2 - y) /\\ y + 1 = 2*2]").unwrap();
        let Formula::Exists(_, body) = f else { unreachable!() };
        let (r, _) = peval_formula(&body, &v("y"), &int(2), FreshState::new()).unwrap();
        assert_eq!(print_formula(&r), "U1 /\\ false");
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (-3i64..4).prop_map(Term::int),
            prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        ];
        grow(leaf)
    }

    fn arb_var_term() -> impl Strategy<Value = Term> {
        grow(prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var))
    }

    fn grow(leaf: impl Strategy<Value = Term> + 'static) -> impl Strategy<Value = Term> {
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::neg),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::div(a, b)),
                (inner, 1u32..3).prop_map(|(a, n)| Term::pow(a, n)),
            ]
        })
    }

    fn strip_divs(t: &Term) -> Term {
        match t {
            Term::Div(a, b) => Term::mul(strip_divs(a), strip_divs(b)),
            Term::Neg(a) => Term::neg(strip_divs(a)),
            Term::Pow(a, n) => Term::pow(strip_divs(a), *n),
            Term::Add(a, b) => Term::add(strip_divs(a), strip_divs(b)),
            Term::Sub(a, b) => Term::sub(strip_divs(a), strip_divs(b)),
            Term::Mul(a, b) => Term::mul(strip_divs(a), strip_divs(b)),
            _ => t.clone(),
        }
    }

    /// Laziness: a folded constant only appears where every operand was
    /// constant, so the result has no operator node over two constants.
    fn no_foldable_node(t: &Term) -> bool {
        match t {
            Term::Const(_) | Term::Var(_) => true,
            Term::Neg(a) | Term::Pow(a, _) => a.as_const().is_none() && no_foldable_node(a),
            Term::Div(a, b) if b.is_zero_const() => no_foldable_node(a) && no_foldable_node(b),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                !(a.as_const().is_some() && b.as_const().is_some()) && no_foldable_node(a) && no_foldable_node(b)
            }
        }
    }

    /// Value of a fully evaluated result; closed subterms that never
    /// mentioned a substituted variable are evaluated here.
    fn settle(r: &TermResult) -> Option<Rational> {
        match r {
            TermResult::Fail => None,
            TermResult::Value(t) => t.eval(&BTreeMap::new()),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn laziness(t in arb_var_term(), a in -2i64..3) {
            if let TermResult::Value(r) = peval_term(&t, &v("x"), &int(a)) {
                prop_assert!(no_foldable_node(&r), "{}", print_term(&r));
            }
        }

        #[test]
        fn div_free_agreement(t in arb_term(), g in prop::collection::vec(-3i64..4, 3)) {
            let t = strip_divs(&t);
            let xs = [v("x"), v("y"), v("z")];
            let g: Vec<Rational> = g.into_iter().map(int).collect();
            let env: BTreeMap<Var, Rational> = xs.iter().cloned().zip(g.iter().cloned()).collect();
            let r = pevalp_term(&t, &xs, &g).unwrap();
            let want = t.eval(&env).unwrap();
            if t.vars().is_empty() {
                // untouched by substitution, but still a closed term of that value
                prop_assert_eq!(settle(&r), Some(want));
            } else {
                prop_assert_eq!(r, TermResult::Value(Term::Const(want)));
            }
        }

        #[test]
        fn full_evaluation_matches_eager(t in arb_term(), g in prop::collection::vec(-2i64..3, 3)) {
            let xs = [v("x"), v("y"), v("z")];
            let g: Vec<Rational> = g.into_iter().map(int).collect();
            let env: BTreeMap<Var, Rational> = xs.iter().cloned().zip(g.iter().cloned()).collect();
            let r = pevalp_term(&t, &xs, &g).unwrap();
            prop_assert_eq!(settle(&r), t.eval(&env));
        }

        #[test]
        fn legality_monotone(t in arb_term(), g in prop::collection::vec(-2i64..3, 3), cut in 0usize..3) {
            let order = [v("x"), v("y"), v("z")];
            let g: Vec<Rational> = g.into_iter().map(int).collect();
            if !is_legal(&t, &order, &g[..cut]).unwrap() {
                for k in cut..=3 {
                    prop_assert!(!is_legal(&t, &order, &g[..k]).unwrap());
                }
            }
            // a legal full point evaluates without failure
            if is_legal(&t, &order, &g).unwrap() {
                prop_assert!(pevalp_term(&t, &order, &g).unwrap() != TermResult::Fail);
            }
        }

        #[test]
        fn legal_prefix_has_good_extension(t in arb_term(), a in -2i64..3) {
            // exhaustive search over a small box must find a witness when the
            // nullification test says legal (denominators are low degree)
            let order = [v("x"), v("y"), v("z")];
            if is_legal(&t, &order, &[int(a)]).unwrap() {
                let vals: Vec<Rational> = (-4..=4).map(int).collect();
                let mut found = false;
                'o: for b in &vals {
                    for c in &vals {
                        let g = [int(a), b.clone(), c.clone()];
                        if pevalp_term(&t, &order, &g).unwrap() != TermResult::Fail {
                            found = true;
                            break 'o;
                        }
                    }
                }
                prop_assert!(found);
            }
        }

        #[test]
        fn fresh_indices_distinct(t1 in arb_term(), t2 in arb_term(), a in -1i64..2, b in -1i64..2) {
            let h = Formula::or(
                Formula::and(Formula::atom(t1.clone(), crate::algebra::RelOp::Lt, t2.clone()), Formula::u(3)),
                Formula::atom(t1, crate::algebra::RelOp::Eq, t2),
            );
            let start = FreshState::new();
            let (r, _) = pevalp_formula(&h, &[v("x"), v("y")], &[int(a), int(b)], start).unwrap();
            let props = r.props();
            let mut idx: Vec<u32> = props.iter().map(|p| p.index).collect();
            let n = idx.len();
            idx.sort();
            idx.dedup();
            prop_assert_eq!(idx.len(), n);
            prop_assert!(idx.iter().all(|&i| i >= start.peek()));
        }
    }

    #[test]
    fn same_atom_twice_gets_two_variables() {
        assert_eq!(pf("1/y > 0 /\\ 1/y > 0", "y", int(0)), p("U1 /\\ U2"));
    }

    #[test]
    fn closed_atoms_fold() {
        let h = parse_formula("1 + 1 < 3 /\\ 1/0 > 0 /\\ U1").unwrap();
        let (r, fs) = fold_closed_atoms(&h, FreshState::new());
        assert_eq!(print_formula(&r), "true /\\ U2 /\\ U1");
        assert_eq!(fs.peek(), 3);
        // left for the step that eliminates the quantifier
        let h = parse_formula("ex x[1/0 > 0]").unwrap();
        assert_eq!(fold_closed_atoms(&h, FreshState::new()).0, h);
    }
}
