use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed};

use crate::algebra::{term_to_polynomial, Atom, Formula, PropVar, Quant, Term, Var};
use crate::error::{Error, Result};
use crate::syntax::print_formula;

/// Replaces `A ==> B` by `~A \/ B` everywhere.
pub fn lower_implies(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(lower_implies(a)),
        Formula::And(a, b) => Formula::and(lower_implies(a), lower_implies(b)),
        Formula::Or(a, b) => Formula::or(lower_implies(a), lower_implies(b)),
        Formula::Implies(a, b) => Formula::or(Formula::not(lower_implies(a)), lower_implies(b)),
        Formula::Exists(vs, a) => Formula::exists(vs.clone(), lower_implies(a)),
        Formula::Forall(vs, a) => Formula::forall(vs.clone(), lower_implies(a)),
    }
}

fn unit_numerators(t: &Term) -> Term {
    match t {
        Term::Const(_) | Term::Var(_) => t.clone(),
        Term::Neg(a) => Term::neg(unit_numerators(a)),
        Term::Pow(a, n) => Term::pow(unit_numerators(a), *n),
        Term::Add(a, b) => Term::add(unit_numerators(a), unit_numerators(b)),
        Term::Sub(a, b) => Term::sub(unit_numerators(a), unit_numerators(b)),
        Term::Mul(a, b) => Term::mul(unit_numerators(a), unit_numerators(b)),
        Term::Div(a, b) => {
            let (a, b) = (unit_numerators(a), unit_numerators(b));
            match a.as_const() {
                Some(c) if c.is_one() => Term::div(a, b),
                _ => Term::mul(a, Term::div(Term::int(1), b)),
            }
        }
    }
}

/// Rewrites `div(a, b)` to `a * div(1, b)`, innermost first.
pub fn normalize_divs(f: &Formula) -> Formula {
    lower_implies(f).map_atoms(&mut |a| {
        Formula::Atom(Atom::new(unit_numerators(&a.lhs), a.op, unit_numerators(&a.rhs)))
    })
}

pub fn normalize_term(t: &Term) -> Term {
    unit_numerators(t)
}

fn rename_term(t: &Term, env: &BTreeMap<Var, Var>) -> Term {
    if env.is_empty() {
        return t.clone();
    }
    t.map_vars(&|v| Term::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())))
}

fn apart(f: &Formula, env: &BTreeMap<Var, Var>, taken: &mut BTreeSet<Var>, all: &BTreeSet<Var>) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
        Formula::Atom(a) => Formula::Atom(Atom::new(rename_term(&a.lhs, env), a.op, rename_term(&a.rhs, env))),
        Formula::Not(a) => Formula::not(apart(a, env, taken, all)),
        Formula::And(a, b) => {
            let a = apart(a, env, taken, all);
            Formula::and(a, apart(b, env, taken, all))
        }
        Formula::Or(a, b) => {
            let a = apart(a, env, taken, all);
            Formula::or(a, apart(b, env, taken, all))
        }
        Formula::Implies(a, b) => {
            let a = apart(a, env, taken, all);
            Formula::implies(a, apart(b, env, taken, all))
        }
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let mut inner = env.clone();
            let mut bound = Vec::new();
            for v in vs {
                let mut name = v.clone();
                if taken.contains(&name) {
                    while taken.contains(&name) || all.contains(&name) {
                        name = Var::new(&format!("{}'", name.name()));
                    }
                }
                taken.insert(name.clone());
                if name != *v {
                    inner.insert(v.clone(), name.clone());
                } else {
                    inner.remove(v);
                }
                bound.push(name);
            }
            let body = apart(body, &inner, taken, all);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(bound, body)
            } else {
                Formula::forall(bound, body)
            }
        }
    }
}

/// Renames bound variables so that every quantifier binds a distinct
/// variable that is also distinct from every free variable. Later binders
/// are renamed by appending primes until the name is unused.
pub fn standardize_apart(f: &Formula) -> Formula {
    apart(f, &BTreeMap::new(), &mut f.free_vars(), &f.all_vars())
}

pub fn is_standardized_apart(f: &Formula) -> bool {
    first_clash(f).is_none()
}

fn first_clash(f: &Formula) -> Option<Var> {
    let free = f.free_vars();
    let mut seen = BTreeSet::new();
    f.bound_vars_in_order().into_iter().find(|v| free.contains(v) || !seen.insert(v.clone()))
}

/// Pushes negations inward until they rest on propositional variables;
/// negated atoms take the complementary relation.
pub fn posform(f: &Formula) -> Formula {
    pos(f, false)
}

fn pos(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True | Formula::False => {
            if neg == matches!(f, Formula::True) {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Prop(_) => {
            if neg {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Atom(a) => Formula::Atom(if neg { a.negated() } else { a.clone() }),
        Formula::Not(a) => pos(a, !neg),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (a, b) = (pos(a, neg), pos(b, neg));
            if matches!(f, Formula::And(..)) != neg {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            }
        }
        Formula::Implies(a, b) => {
            let lowered = Formula::or(Formula::not((**a).clone()), (**b).clone());
            pos(&lowered, neg)
        }
        Formula::Exists(vs, a) | Formula::Forall(vs, a) => {
            let body = pos(a, neg);
            if matches!(f, Formula::Exists(..)) != neg {
                Formula::exists(vs.clone(), body)
            } else {
                Formula::forall(vs.clone(), body)
            }
        }
    }
}

pub fn is_positive(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) | Formula::Atom(_) => true,
        Formula::Not(a) => matches!(**a, Formula::Prop(_)),
        Formula::And(a, b) | Formula::Or(a, b) => is_positive(a) && is_positive(b),
        Formula::Implies(..) => false,
        Formula::Exists(_, a) | Formula::Forall(_, a) => is_positive(a),
    }
}

fn strip(f: &Formula, prefix: &mut Vec<(Quant, Var)>) -> Formula {
    match f {
        Formula::And(a, b) => {
            let a = strip(a, prefix);
            Formula::and(a, strip(b, prefix))
        }
        Formula::Or(a, b) => {
            let a = strip(a, prefix);
            Formula::or(a, strip(b, prefix))
        }
        Formula::Exists(vs, a) | Formula::Forall(vs, a) => {
            let q = if matches!(f, Formula::Exists(..)) { Quant::Exists } else { Quant::Forall };
            prefix.extend(vs.iter().map(|v| (q, v.clone())));
            strip(a, prefix)
        }
        _ => f.clone(),
    }
}

/// Wraps `matrix` in the given quantifiers, merging runs of the same kind
/// into one binder list.
pub fn requantify(prefix: &[(Quant, Var)], matrix: Formula) -> Formula {
    let mut blocks: Vec<(Quant, Vec<Var>)> = Vec::new();
    for (q, v) in prefix {
        match blocks.last_mut() {
            Some((lq, vs)) if lq == q => vs.push(v.clone()),
            _ => blocks.push((*q, vec![v.clone()])),
        }
    }
    blocks.into_iter().rev().fold(matrix, |body, (q, vs)| match q {
        Quant::Exists => Formula::exists(vs, body),
        Quant::Forall => Formula::forall(vs, body),
    })
}

/// Moves every quantifier of a positive, standardized-apart formula to the
/// front, keeping their left-to-right order.
pub fn prenex(f: &Formula) -> Result<Formula> {
    if !is_positive(f) {
        return Err(Error::NotPositive);
    }
    if let Some(v) = first_clash(f) {
        return Err(Error::NotStandardizedApart(v.name().to_string()));
    }
    let mut prefix = Vec::new();
    let matrix = strip(f, &mut prefix);
    Ok(requantify(&prefix, matrix))
}

fn check_peval_safe(f: &Formula) -> Result<()> {
    if f.has_implies() {
        return Err(Error::NotPevalSafe("implication present"));
    }
    let mut idx: Vec<u32> = f.props().iter().map(|p| p.index).collect();
    let n = idx.len();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() != n {
        return Err(Error::NotPevalSafe("propositional index used twice"));
    }
    Ok(())
}

/// Exchanges `U_i` and `V_i`.
pub fn flip(f: &Formula) -> Result<Formula> {
    check_peval_safe(f)?;
    Ok(flip_rec(f))
}

/// Negation fused with the `U`/`V` exchange and quantifier dualization.
pub fn flop(f: &Formula) -> Result<Formula> {
    check_peval_safe(f)?;
    Ok(flop_rec(f))
}

fn flip_rec(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Prop(p) => Formula::Prop(p.flipped()),
        Formula::Not(a) => flop_rec(a),
        Formula::And(a, b) => Formula::and(flip_rec(a), flip_rec(b)),
        Formula::Or(a, b) => Formula::or(flip_rec(a), flip_rec(b)),
        Formula::Exists(vs, a) => Formula::exists(vs.clone(), flip_rec(a)),
        Formula::Forall(vs, a) => Formula::forall(vs.clone(), flip_rec(a)),
        Formula::Implies(..) => unreachable!("rejected by check_peval_safe"),
    }
}

fn flop_rec(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Prop(p) => Formula::not(Formula::Prop(p.flipped())),
        Formula::Atom(a) => Formula::Atom(a.negated()),
        Formula::Not(a) => flip_rec(a),
        Formula::And(a, b) => Formula::or(flop_rec(a), flop_rec(b)),
        Formula::Or(a, b) => Formula::and(flop_rec(a), flop_rec(b)),
        Formula::Exists(vs, a) => Formula::forall(vs.clone(), flop_rec(a)),
        Formula::Forall(vs, a) => Formula::exists(vs.clone(), flop_rec(a)),
        Formula::Implies(..) => unreachable!("rejected by check_peval_safe"),
    }
}

/// Canonical `p op 0` form of a division-free atom with a positive leading
/// coefficient and integer coefficients; atoms with divisions are kept.
pub fn canonical_atom(a: &Atom) -> Atom {
    let (Ok(l), Ok(r)) = (term_to_polynomial(&a.lhs), term_to_polynomial(&a.rhs)) else {
        return a.clone();
    };
    let mut p = (&l - &r).integer_cleared();
    let mut op = a.op;
    if p.leading_coefficient().is_some_and(|c| c.is_negative()) {
        p = -&p;
        op = op.converse();
    }
    Atom::new(p.to_term(), op, Term::int(0))
}

fn flatten(f: Formula, and: bool, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) if and => {
            flatten(*a, and, out);
            flatten(*b, and, out);
        }
        Formula::Or(a, b) if !and => {
            flatten(*a, and, out);
            flatten(*b, and, out);
        }
        g => out.push(g),
    }
}

/// Normal form modulo associativity, commutativity and idempotence of
/// `/\` and `\/`, with atoms in canonical polynomial form. Used to compare
/// formulas that differ only in conjunct or disjunct order.
pub fn ac_normalize(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
        Formula::Atom(a) => Formula::Atom(canonical_atom(a)),
        Formula::Not(a) => Formula::not(ac_normalize(a)),
        Formula::Implies(a, b) => Formula::implies(ac_normalize(a), ac_normalize(b)),
        Formula::And(..) | Formula::Or(..) => {
            let and = matches!(f, Formula::And(..));
            let mut parts = Vec::new();
            flatten(f.clone(), and, &mut parts);
            let mut keyed: Vec<(String, Formula)> = parts
                .iter()
                .map(ac_normalize)
                .flat_map(|g| {
                    let mut inner = Vec::new();
                    flatten(g, and, &mut inner);
                    inner
                })
                .map(|g| (print_formula(&g), g))
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            keyed.dedup_by(|a, b| a.0 == b.0);
            let mut it = keyed.into_iter().map(|(_, g)| g);
            let first = it.next().expect("a connective has operands");
            it.fold(first, |acc, g| if and { Formula::and(acc, g) } else { Formula::or(acc, g) })
        }
        Formula::Exists(vs, a) => Formula::exists(vs.clone(), ac_normalize(a)),
        Formula::Forall(vs, a) => Formula::forall(vs.clone(), ac_normalize(a)),
    }
}

/// Propositional variables of `f` with the polarity they have in its
/// positive form (`true` for a positive occurrence).
pub fn prop_polarities(f: &Formula) -> Vec<(PropVar, bool)> {
    let mut out = Vec::new();
    polarities(f, true, &mut out);
    out
}

fn polarities(f: &Formula, positive: bool, out: &mut Vec<(PropVar, bool)>) {
    match f {
        Formula::Prop(p) => out.push((*p, positive)),
        Formula::Not(a) => polarities(a, !positive, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            polarities(a, positive, out);
            polarities(b, positive, out);
        }
        Formula::Implies(a, b) => {
            polarities(a, !positive, out);
            polarities(b, positive, out);
        }
        Formula::Exists(_, a) | Formula::Forall(_, a) => polarities(a, positive, out),
        Formula::True | Formula::False | Formula::Atom(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term, print_term};
    use crate::testkit::{arb_safe, props};
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn show(f: &Formula) -> String {
        print_formula(f)
    }

    #[test]
    fn div_normalization() {
        assert_eq!(show(&normalize_divs(&p("x + y = 3 x/(x - y)"))), "x + y = 3 x*(1/(x - y))");
        assert_eq!(show(&normalize_divs(&p("1/q > 0"))), "1/q > 0");
        let t = normalize_term(&parse_term("(a/b)/c").unwrap());
        assert_eq!(print_term(&t), "a*(1/b)*(1/c)");
        assert_eq!(show(&normalize_divs(&p("x/y > 0 ==> x > 0"))), "~x*(1/y) > 0 \\/ x > 0");
    }

    #[test]
    fn apart_renames_later_binders() {
        assert_eq!(show(&standardize_apart(&p("ex x[x < 2] \\/ ex x[x > 2]"))), "ex x[x < 2] \\/ ex x'[x' > 2]");
        let f = p("ex x[U1 /\\ x^2 < 2] \\/ ex y[2/y = 0 /\\ U2]");
        assert_eq!(standardize_apart(&f), f);
        assert_eq!(
            show(&standardize_apart(&p("ex x[U1 /\\ x^2 < 2] \\/ ex x[2/x = 0 /\\ U2]"))),
            "ex x[U1 /\\ x^2 < 2] \\/ ex x'[2/x' = 0 /\\ U2]"
        );
        // free occurrences keep their name
        assert_eq!(show(&standardize_apart(&p("x > 0 /\\ ex x[x < 0]"))), "x > 0 /\\ ex x'[x' < 0]");
        // a prime already in use is skipped
        let f = standardize_apart(&p("ex x[x < 2] \\/ ex x[x > 2] \\/ ex x'[x' = 0]"));
        assert!(is_standardized_apart(&f), "{}", show(&f));
    }

    #[test]
    fn positive_form() {
        assert_eq!(show(&posform(&p("~[x < y \\/ [U1 /\\ y <= 0]]"))), "x >= y /\\ [~U1 \\/ y > 0]");
        assert_eq!(show(&posform(&p("x = 0"))), "x = 0");
        assert_eq!(show(&posform(&p("~ex x[1/x^2 < 0]"))), "all x[1/x^2 >= 0]");
        assert_eq!(show(&posform(&p("~~U1"))), "U1");
    }

    #[test]
    fn prenex_hoists_left_to_right() {
        let f = posform(&p("all x[~[0 <= 1/x + 2 /\\ 1/x - 2 <= 0] \\/ ex y[y^2 < 5 /\\ 3 x^2 - 1/y + 1 < 0]]"));
        assert_eq!(
            prenex(&f).unwrap(),
            p("all x[ex y[0 > 1/x + 2 \\/ 1/x - 2 > 0 \\/ y^2 < 5 /\\ 3 x^2 - 1/y + 1 < 0]]")
        );
        assert_eq!(prenex(&p("x > 0")).unwrap(), p("x > 0"));
        assert_eq!(show(&prenex(&p("ex x[x > 0] /\\ y > 0")).unwrap()), "ex x[x > 0 /\\ y > 0]");
        assert_eq!(show(&prenex(&p("ex x[x > 0] /\\ ex y[y > 0]")).unwrap()), "ex x,y[x > 0 /\\ y > 0]");
        assert_eq!(prenex(&p("ex x[x > 0] /\\ ex x[x < 0]")), Err(Error::NotStandardizedApart("x".into())));
        assert_eq!(prenex(&p("~ex x[x > 0]")), Err(Error::NotPositive));
    }

    #[test]
    fn flip_flop_fixtures() {
        assert_eq!(show(&flop(&p("all x[x^2 >= 0 /\\ U1]")).unwrap()), "ex x[x^2 < 0 \\/ ~V1]");
        assert_eq!(flip(&p("U3")).unwrap(), p("V3"));
        assert_eq!(flop(&Formula::True).unwrap(), Formula::False);
        assert_eq!(
            show(&flop(&p("ex a[all b[ex x[x^2 + a x + 1/(a b) <= 0]]]")).unwrap()),
            "all a[ex b[all x[x^2 + a x + 1/(a b) > 0]]]"
        );
        assert!(matches!(flop(&p("U1 /\\ V1")), Err(Error::NotPevalSafe(_))));
        assert!(matches!(flip(&p("U1 ==> U2")), Err(Error::NotPevalSafe(_))));
    }

    #[test]
    fn ac_normal_form_ignores_order() {
        let a = ac_normalize(&p("[b = 0 /\\ a = 0] \\/ [a x^2 + b x - 1 = 0 /\\ a x + b /= 0]"));
        let b = ac_normalize(&p("[a x + b /= 0 /\\ -a x^2 - b x + 1 = 0] \\/ [a = 0 /\\ b = 0]"));
        assert_eq!(a, b);
        assert_eq!(ac_normalize(&p("0 < x")), p("x > 0"));
    }

    fn flip_props(f: &Formula) -> Formula {
        match f {
            Formula::Prop(p) => Formula::Prop(p.flipped()),
            Formula::Not(a) => Formula::not(flip_props(a)),
            Formula::And(a, b) => Formula::and(flip_props(a), flip_props(b)),
            Formula::Or(a, b) => Formula::or(flip_props(a), flip_props(b)),
            Formula::Exists(vs, a) => Formula::exists(vs.clone(), flip_props(a)),
            Formula::Forall(vs, a) => Formula::forall(vs.clone(), flip_props(a)),
            _ => f.clone(),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn flip_and_flop_are_involutions(f in arb_safe()) {
            props::flip_flop_involution(f)?;
        }

        #[test]
        fn flop_is_posform_of_negation(f in arb_safe()) {
            prop_assert_eq!(flop(&f).unwrap(), posform(&Formula::not(flip_props(&f))));
        }

        #[test]
        fn flop_ignores_posform(f in arb_safe()) {
            prop_assert_eq!(flop(&f).unwrap(), flop(&posform(&f)).unwrap());
        }

        #[test]
        fn posform_idempotent_and_keeps_terms(f in arb_safe()) {
            let g = posform(&f);
            prop_assert!(is_positive(&g));
            prop_assert_eq!(posform(&g), g.clone());
            let terms = |h: &Formula| {
                let mut t: Vec<(Term, Term)> = h.atoms().iter().map(|a| (a.lhs.clone(), a.rhs.clone())).collect();
                t.sort_by_key(|(a, b)| (print_term(a), print_term(b)));
                t
            };
            prop_assert_eq!(terms(&f), terms(&g));
        }

        #[test]
        fn prenex_keeps_quantifier_sequence(f in arb_safe()) {
            let g = standardize_apart(&posform(&f));
            prop_assert!(is_standardized_apart(&g));
            let h = prenex(&g).unwrap();
            let kinds = |h: &Formula| {
                let mut out = Vec::new();
                h.visit(&mut |s| match s {
                    Formula::Exists(vs, _) => out.extend(vs.iter().map(|v| (true, v.clone()))),
                    Formula::Forall(vs, _) => out.extend(vs.iter().map(|v| (false, v.clone()))),
                    _ => {}
                });
                out
            };
            prop_assert_eq!(kinds(&g), kinds(&h));
            prop_assert!(crate::algebra::BlockStructure::of_prenex(&h).is_ok());
        }
    }
}
