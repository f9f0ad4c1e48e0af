//! Property bodies. Each takes one generated input and reports a failing
//! case through `TestCaseError`; `suite` runs them all with a fixed budget.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use super::*;
use crate::algebra::{BlockStructure, FreshState};
use crate::oracle::{base_order, check_fsfse, fair_sat_grid, qbf_base_eval, qbf_brute};
use crate::peval::is_legal;
use crate::rewrite::{ac_normalize, flip, flop, posform, prenex, requantify};
use crate::syntax::print_formula;
use crate::translate::{clear_atom, translate_atom, translate_formula, ClearMode};

type Outcome = Result<(), TestCaseError>;

const NAMES: &[&str] = &["a", "x", "y"];

fn atom_holds(a: &Atom, env: &BTreeMap<Var, Rational>) -> Option<bool> {
    Some(a.op.holds(a.lhs.eval(env)?.cmp(&a.rhs.eval(env)?)))
}

fn legal_prefix(a: &Atom, order: &[Var], g: &[Rational]) -> bool {
    is_legal(&a.lhs, order, g).unwrap() && is_legal(&a.rhs, order, g).unwrap()
}

/// Exact on positive formulas; a negated atom comes back with the
/// complementary relation instead of the negation.
pub fn flip_flop_involution(f: Formula) -> Outcome {
    let g = posform(&f);
    prop_assert_eq!(flip(&flip(&g).unwrap()).unwrap(), g.clone());
    prop_assert_eq!(flop(&flop(&g).unwrap()).unwrap(), g.clone());
    prop_assert_eq!(flop(&flop(&f).unwrap()).unwrap(), g);
    Ok(())
}

pub fn base_eval_matches_enumeration(f: Formula) -> Outcome {
    prop_assert_eq!(qbf_base_eval(&f).unwrap(), qbf_brute(&f, &base_order(&f)).unwrap());
    Ok(())
}

pub fn shuffled_order() -> impl Strategy<Value = (Formula, Vec<crate::algebra::PropVar>)> {
    arb_prop(5).prop_flat_map(|f| {
        let ps = f.props();
        (Just(f), Just(ps).prop_shuffle())
    })
}

pub fn quantifier_order_is_irrelevant((f, order): (Formula, Vec<crate::algebra::PropVar>)) -> Outcome {
    prop_assert_eq!(qbf_brute(&f, &order).unwrap(), qbf_brute(&f, &base_order(&f)).unwrap());
    Ok(())
}

pub fn cleared_points() -> impl Strategy<Value = (Atom, Vec<Vec<Rational>>)> {
    (
        arb_div_atom(&["a", "b", "x", "y"], 3),
        prop::collection::vec(prop::collection::vec(arb_value(), 4), 1000),
    )
}

/// Clearing keeps the truth value wherever the original atom is defined.
pub fn cleared_atom_agrees_at_legal_points((a, pts): (Atom, Vec<Vec<Rational>>)) -> Outcome {
    let vars: Vec<Var> = ["a", "b", "x", "y"].iter().map(|n| Var::new(n)).collect();
    let c = clear_atom(&a);
    prop_assert!(!c.has_div());
    for g in &pts {
        let env = env(&vars, g);
        if let Some(t) = atom_holds(&a, &env) {
            prop_assert_eq!(Some(t), atom_holds(&c, &env), "at {:?}", g);
        }
    }
    Ok(())
}

pub type IllegalInput = (Atom, Vec<(Quant, Var)>, Vec<Rational>, Vec<Vec<Rational>>);

pub fn illegal_points() -> impl Strategy<Value = IllegalInput> {
    (
        arb_div_atom(NAMES, 3),
        arb_prefix(&["a", "x", "y"]),
        prop::collection::vec(arb_value(), 4),
        prop::collection::vec(prop::collection::vec(arb_value(), 4), 50),
    )
}

/// Once a prefix is illegal, every extension sends the translation to the
/// constant of the block that made it illegal.
pub fn illegal_points_go_to_the_block_constant((a, prefix, g, exts): IllegalInput) -> Outcome {
    // b is free and comes first
    let a = Atom::new(Term::add(a.lhs, Term::var("b")), a.op, a.rhs);
    let f = requantify(&prefix, Formula::Atom(a.clone()));
    let (bs, _) = BlockStructure::of_prenex(&f).unwrap();
    let order = bs.order();
    let h0 = translate_atom(&bs, &a).unwrap();
    let Some(m) = (0..=order.len()).find(|&m| !legal_prefix(&a, &order, &g[..m])) else {
        return Ok(());
    };
    // illegality before any assignment counts as free
    let expected = m > 0 && bs.quant_of(&order[m - 1]) == Some(Quant::Forall);
    for ext in &exts {
        let full: Vec<Rational> = g[..m].iter().chain(&ext[m..]).cloned().collect();
        prop_assert_eq!(h0.eval_qf(&env(&order, &full)), Some(expected), "{} at {:?}", print_formula(&h0), full);
    }
    Ok(())
}

pub type LegalInput = (Atom, Vec<(Quant, Var)>, Vec<Vec<Rational>>);

pub fn legal_points() -> impl Strategy<Value = LegalInput> {
    (
        arb_div_atom(NAMES, 3),
        arb_prefix(&["a", "x", "y"]),
        prop::collection::vec(prop::collection::vec(arb_value(), 3), 50),
    )
}

pub fn legal_points_keep_the_atom((a, prefix, pts): LegalInput) -> Outcome {
    let f = requantify(&prefix, Formula::Atom(a.clone()));
    let (bs, _) = BlockStructure::of_prenex(&f).unwrap();
    let order = bs.order();
    let h0 = translate_atom(&bs, &a).unwrap();
    for g in &pts {
        let env = env(&order, g);
        if let Some(t) = atom_holds(&a, &env) {
            prop_assert_eq!(h0.eval_qf(&env), Some(t));
        }
    }
    Ok(())
}

/// Two-atom prenex formulas with at most two divisions in total.
pub fn two_atom_prenex() -> impl Strategy<Value = Formula> {
    (arb_div_atom(NAMES, 2), arb_unit_div_term(NAMES, 1), arb_op(), prop::bool::ANY, arb_prefix(&["a", "x", "y"]))
        .prop_map(|(l, r, op, and, prefix)| {
            let second = Formula::atom(r, op, Term::var("x"));
            let m = if and { Formula::and(Formula::Atom(l), second) } else { Formula::or(Formula::Atom(l), second) };
            requantify(&prefix, m)
        })
        .prop_filter("too many divisions", |f| div_count_formula(f) <= 2)
}

pub fn flop_negates_the_translation(f: Formula) -> Outcome {
    let lhs = translate_formula(&flop(&f).unwrap(), ClearMode::Fair).unwrap();
    let rhs = posform(&Formula::not(translate_formula(&f, ClearMode::Fair).unwrap()));
    prop_assert_eq!(ac_normalize(&lhs), ac_normalize(&rhs));
    Ok(())
}

pub fn posform_and_prenex_keep_fair_sat(bytes: Vec<u8>) -> Outcome {
    let f = closed(&bytes, true, true);
    let grid = small_grid();
    let r = fair_sat_grid(&f, &grid, FreshState::new()).unwrap();
    let pf = posform(&f);
    prop_assert_eq!(r, fair_sat_grid(&pf, &grid, FreshState::new()).unwrap());
    prop_assert_eq!(r, fair_sat_grid(&prenex(&pf).unwrap(), &grid, FreshState::new()).unwrap());
    Ok(())
}

pub fn fsfse_agreement(bytes: Vec<u8>) -> Outcome {
    let f = closed(&bytes, true, false);
    let grid = CandidateGrid::uniform(&f.bound_vars_in_order(), &[int(-1), int(0), int(1)]);
    prop_assert!(check_fsfse(&f, &grid).unwrap());
    Ok(())
}

/// Outcome of one property run.
pub struct Report {
    pub name: &'static str,
    pub cases: u32,
    pub result: Result<(), String>,
}

fn run<S: Strategy>(name: &'static str, cases: u32, s: S, test: impl Fn(S::Value) -> Outcome) -> Report {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let result = runner.run(&s, test).map_err(|e| e.to_string());
    Report { name, cases, result }
}

/// Runs every property with its case budget.
pub fn suite() -> Vec<Report> {
    vec![
        run("flip/flop involutions", 300, arb_safe(), flip_flop_involution),
        run("base evaluation vs enumeration", 300, arb_prop(6), base_eval_matches_enumeration),
        run("quantifier reordering", 300, shuffled_order(), quantifier_order_is_irrelevant),
        run("cleared atom at 1000 legal points", 200, cleared_points(), cleared_atom_agrees_at_legal_points),
        run("illegal prefixes go to the block constant", 200, illegal_points(), illegal_points_go_to_the_block_constant),
        run("legal points keep the atom", 200, legal_points(), legal_points_keep_the_atom),
        run("flop commutes with translation", 200, two_atom_prenex(), flop_negates_the_translation),
        run("posform/prenex keep fair-SAT", 200, arb_bytes(), posform_and_prenex_keep_fair_sat),
        run("fair-SAT vs fse", 100, arb_bytes(), fsfse_agreement),
    ]
}
