use crate::algebra::{Atom, BlockStructure, Formula, Polynomial, Quant, RelOp, Term};
use crate::error::{Error, Result};
use crate::fraction::{clear, ClearedAtom};
use crate::nullify::{fold_system, nullsys_system, system_formula, ZeroSystem};
use crate::rewrite::{is_positive, posform};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClearMode {
    NoGuard,
    Naive,
    Fair,
}

impl std::str::FromStr for ClearMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "noguard" => Ok(ClearMode::NoGuard),
            "naive" => Ok(ClearMode::Naive),
            "fair" => Ok(ClearMode::Fair),
            _ => Err(format!("unknown mode `{s}` (expected noguard, naive or fair)")),
        }
    }
}

/// One eliminated denominator: its polynomial, the highest block level it
/// mentions, and its nullifying systems at levels `1..=s+1`, both as
/// computed and after substituting the single-variable equations.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub poly: Polynomial,
    pub s: usize,
    pub raw: Vec<Formula>,
    pub systems: Vec<Formula>,
}

/// Intermediate results of translating one atom. `n[i-1]`, `g[i-1]` hold
/// level `i`; `h[j]` holds `H_{k+1-j}`, so `h.last()` is `H_0`.
#[derive(Clone, Debug)]
pub struct GuardLadder {
    pub eliminations: Vec<Elimination>,
    pub n: Vec<Vec<Formula>>,
    pub g: Vec<Formula>,
    pub h: Vec<Formula>,
}

impl GuardLadder {
    pub fn h0(&self) -> &Formula {
        self.h.last().expect("ladder has H_0")
    }

    /// Human-readable listing in the order the quantities are computed.
    pub fn render(&self) -> String {
        use crate::syntax::print_formula;
        let mut out = String::new();
        for e in &self.eliminations {
            out.push_str(&format!("denominator {} (s = {})\n", crate::syntax::print_term(&e.poly.to_term()), e.s));
            for (i, (raw, sys)) in e.raw.iter().zip(&e.systems).enumerate() {
                let (r, t) = (print_formula(raw), print_formula(sys));
                if r == t {
                    out.push_str(&format!("  nullsys level {}: {}\n", i + 1, r));
                } else {
                    out.push_str(&format!("  nullsys level {}: {} = {}\n", i + 1, r, t));
                }
            }
        }
        for (i, ni) in self.n.iter().enumerate() {
            let items: Vec<String> = ni.iter().map(print_formula).collect();
            out.push_str(&format!("N_{} = {{{}}}\n", i + 1, items.join(", ")));
        }
        for (i, gi) in self.g.iter().enumerate() {
            out.push_str(&format!("G_{} = {}\n", i + 1, print_formula(gi)));
        }
        let k1 = self.h.len() - 1;
        for (j, hj) in self.h.iter().enumerate() {
            out.push_str(&format!("H_{} = {}\n", k1 - j, print_formula(hj)));
        }
        out
    }
}

/// Division-free version of an atom with the same truth value wherever the
/// atom is legal. Division-free atoms are returned unchanged.
pub fn clear_atom(a: &Atom) -> Atom {
    if !a.has_div() {
        return a.clone();
    }
    clear(a).to_atom()
}

fn cleared(a: &Atom) -> (Formula, Vec<Polynomial>) {
    if !a.has_div() {
        return (Formula::Atom(a.clone()), Vec::new());
    }
    let c: ClearedAtom = clear(a);
    (Formula::Atom(c.to_atom()), c.denominators)
}

/// A guard: disjunction of zero systems (each a conjunction of `p = 0`).
type Guard = Vec<Vec<Polynomial>>;

fn guard_formula(g: &Option<Guard>) -> Formula {
    match g {
        None => Formula::True,
        Some(ds) => Formula::or_all(ds.iter().map(|d| system_formula(&Some(d.clone())))),
    }
}

/// Substitutes `v = 0` for every conjunct of the form `c v^e = 0`.
fn propagate_zero_vars(d: Vec<Polynomial>) -> ZeroSystem {
    let mut cur = d;
    loop {
        let zero_vars: Vec<_> = cur.iter().filter_map(Polynomial::as_single_var_power).collect();
        let env = zero_vars.iter().map(|v| (v.clone(), num_traits::Zero::zero())).collect();
        let mut changed = false;
        let next: Vec<Polynomial> = cur
            .iter()
            .map(|p| {
                if p.as_single_var_power().is_some() {
                    return p.clone();
                }
                let q = p.substitute(&env);
                changed |= q != *p;
                q
            })
            .collect();
        let folded = fold_system(next)?;
        if !changed {
            return Some(folded);
        }
        cur = folded;
    }
}

/// Simplification of a guard disjunction valid whenever `context` is false.
/// Inside each disjunct a conjunct `c v^e = 0` is substituted into the
/// others; a variable whose vanishing is itself a context disjunct is known
/// nonzero and divided out. Constant, duplicate and context disjuncts are
/// then removed.
fn simplify(w: &[Vec<Polynomial>], context: &[Vec<Polynomial>]) -> Option<Guard> {
    let nonzero: Vec<_> = context
        .iter()
        .filter_map(|d| match d.as_slice() {
            [p] => p.as_single_var_power(),
            _ => None,
        })
        .collect();
    let mut out: Guard = Vec::new();
    for d in w {
        let Some(d) = propagate_zero_vars(d.clone()) else { continue };
        let reduced = d.iter().map(|p| {
            if p.as_single_var_power().is_some_and(|v| nonzero.contains(&v)) {
                return Polynomial::one();
            }
            nonzero.iter().fold(p.clone(), |q, v| q.divide_out(v))
        });
        let Some(mut d) = fold_system(reduced) else { continue };
        // lowest coefficient first
        d.reverse();
        if d.is_empty() {
            return None;
        }
        if !out.contains(&d) && !context.contains(&d) {
            out.push(d);
        }
    }
    Some(out)
}

/// Guard simplification on formulas: `w` and `context` must be disjunctions
/// of conjunctions of equations `p = 0`, as produced by `nullsys`. Any
/// other shape of `w` is returned unchanged.
pub fn simplify_guard(w: &Formula, context: &Formula) -> Formula {
    let Some(wg) = as_guard(w) else { return w.clone() };
    match as_guard(context) {
        // under a true context every guard is acceptable
        Some(None) => Formula::False,
        Some(Some(cd)) => guard_formula(&level_guard(wg, &cd)),
        None => guard_formula(&level_guard(wg, &[])),
    }
}

fn level_guard(w: Option<Guard>, context: &[Vec<Polynomial>]) -> Option<Guard> {
    match w {
        None => None,
        Some(ds) => simplify(&ds, context),
    }
}

/// Reads a disjunction of conjunctions of `p = 0`. `Some(None)` is true.
fn as_guard(f: &Formula) -> Option<Option<Guard>> {
    fn conj(f: &Formula, out: &mut Vec<Polynomial>) -> Option<bool> {
        match f {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Atom(a) if a.op == RelOp::Eq => {
                let p = &crate::algebra::term_to_polynomial(&a.lhs).ok()?
                    - &crate::algebra::term_to_polynomial(&a.rhs).ok()?;
                out.push(p);
                Some(true)
            }
            Formula::And(a, b) => Some(conj(a, out)? & conj(b, out)?),
            _ => None,
        }
    }
    fn disj(f: &Formula, out: &mut Guard) -> Option<bool> {
        match f {
            Formula::Or(a, b) => Some(disj(a, out)? | disj(b, out)?),
            _ => {
                let mut c = Vec::new();
                match conj(f, &mut c)? {
                    false => Some(false),
                    true if c.is_empty() => Some(true),
                    true => {
                        out.push(c);
                        Some(false)
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    Some(if disj(f, &mut out)? { None } else { Some(out) })
}

fn or_folded(g: Formula, h: Formula) -> Formula {
    match (&g, &h) {
        (Formula::False, _) => h,
        (Formula::True, _) => Formula::True,
        _ => Formula::or(g, h),
    }
}

/// `H /\ ~G`, with the cleared part first.
fn and_not_folded(g: Formula, h: Formula) -> Formula {
    match &g {
        Formula::False => h,
        Formula::True => Formula::False,
        _ => Formula::and(h, posform(&Formula::not(g))),
    }
}

fn check_vars(bs: &BlockStructure, a: &Atom) -> Result<()> {
    match a.vars().into_iter().find(|v| bs.level_of(v).is_none()) {
        Some(v) => Err(Error::BlockMismatch(v.name().to_string())),
        None => Ok(()),
    }
}

/// Translates one atom into a division-free formula whose guards route
/// illegal points to true under a universal block and false otherwise.
pub fn translate_atom_traced(bs: &BlockStructure, a: &Atom) -> Result<GuardLadder> {
    check_vars(bs, a)?;
    let k = bs.k();
    let (h_top, dens) = cleared(a);
    let mut n: Vec<Vec<Formula>> = vec![Vec::new(); k + 1];
    let mut systems: Vec<Vec<Vec<Polynomial>>> = vec![Vec::new(); k + 1];
    let mut any_true = vec![false; k + 1];
    let mut eliminations = Vec::new();
    for p in dens {
        let s = p.vars().iter().filter_map(|v| bs.level_of(v)).max().unwrap_or(0);
        let (mut raw, mut sys_formulas) = (Vec::new(), Vec::new());
        for i in 1..=s + 1 {
            let r = nullsys_system(&p, i, bs)?;
            raw.push(system_formula(&r));
            let sys = r.and_then(propagate_zero_vars);
            let f = system_formula(&sys);
            match sys {
                Some(cs) if cs.is_empty() => any_true[i - 1] = true,
                Some(cs) => systems[i - 1].push(cs),
                None => {}
            }
            if !n[i - 1].contains(&f) {
                n[i - 1].push(f.clone());
            }
            sys_formulas.push(f);
        }
        eliminations.push(Elimination { poly: p, s, raw, systems: sys_formulas });
    }
    let mut context: Option<Guard> = Some(Vec::new());
    let mut g = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let w = if any_true[i] { None } else { Some(systems[i].clone()) };
        let gi = match &context {
            None => Some(Vec::new()),
            Some(c) => level_guard(w, c),
        };
        context = match (context, &gi) {
            (Some(mut c), Some(ds)) => {
                c.extend(ds.iter().cloned());
                Some(c)
            }
            _ => None,
        };
        g.push(guard_formula(&gi));
    }
    // the variable whose assignment exposes level-i illegality: the last of
    // block i-1, or for i = 1 the first variable assigned at all, which is
    // in B_1 when nothing is free
    let exposer = |i: usize| match i {
        1 if bs.free_vars.is_empty() => bs.blocks.first().map(|b| b.quant),
        1 => None,
        _ => Some(bs.blocks[i - 2].quant),
    };
    let mut h = vec![h_top];
    for i in (1..=k + 1).rev() {
        let hi = h.last().unwrap().clone();
        let gi = g[i - 1].clone();
        let next = if exposer(i) == Some(Quant::Forall) {
            or_folded(gi, hi)
        } else {
            and_not_folded(gi, hi)
        };
        h.push(next);
    }
    Ok(GuardLadder { eliminations, n, g, h })
}

pub fn translate_atom(bs: &BlockStructure, a: &Atom) -> Result<Formula> {
    Ok(translate_atom_traced(bs, a)?.h0().clone())
}

fn naive_atom(a: &Atom) -> Formula {
    let (c, dens) = cleared(a);
    let guards = dens.iter().map(|p| Formula::atom(p.to_term(), RelOp::Ne, Term::int(0)));
    Formula::and_all(std::iter::once(c).chain(guards))
}

/// Replaces every atom with divisions by its translation under `mode`,
/// keeping the quantifier prefix and boolean skeleton.
pub fn translate_formula(f: &Formula, mode: ClearMode) -> Result<Formula> {
    if !f.props().is_empty() {
        return Err(Error::PropVarPresent);
    }
    if !is_positive(f) {
        return Err(Error::NotPositivePrenex);
    }
    let (bs, _) = BlockStructure::of_prenex(f).map_err(|_| Error::NotPositivePrenex)?;
    replace_atoms(f, &|a| match mode {
        ClearMode::NoGuard => Ok(Formula::Atom(clear_atom(a))),
        ClearMode::Naive => Ok(naive_atom(a)),
        ClearMode::Fair => translate_atom(&bs, a),
    })
}

/// Conjuncts or disjuncts of a left-nested chain.
fn chain(f: Formula, and: bool, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) if and => {
            chain(*a, and, out);
            chain(*b, and, out);
        }
        Formula::Or(a, b) if !and => {
            chain(*a, and, out);
            chain(*b, and, out);
        }
        g => out.push(g),
    }
}

/// Rebuilds the formula with every division atom replaced. A replacement
/// with the same top connective as its parent is spliced into the parent's
/// chain so it prints without brackets; nothing else is re-associated.
fn replace_atoms(f: &Formula, tr: &dyn Fn(&Atom) -> Result<Formula>) -> Result<Formula> {
    let replaced = |g: &Formula| matches!(g, Formula::Atom(a) if a.has_div());
    Ok(match f {
        Formula::Atom(a) if a.has_div() => tr(a)?,
        Formula::And(a, b) | Formula::Or(a, b) => {
            let and = matches!(f, Formula::And(..));
            let join = |x, y| if and { Formula::and(x, y) } else { Formula::or(x, y) };
            let mut acc = replace_atoms(a, tr)?;
            let rb = replace_atoms(b, tr)?;
            if replaced(b) {
                let mut parts = Vec::new();
                chain(rb, and, &mut parts);
                for p in parts {
                    acc = join(acc, p);
                }
                acc
            } else {
                join(acc, rb)
            }
        }
        Formula::Not(a) => Formula::not(replace_atoms(a, tr)?),
        Formula::Exists(vs, a) => Formula::exists(vs.clone(), replace_atoms(a, tr)?),
        Formula::Forall(vs, a) => Formula::forall(vs.clone(), replace_atoms(a, tr)?),
        _ => f.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::ac_normalize;
    use crate::syntax::{parse_formula, print_formula};
    use crate::testkit::props;
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn matrix_atom(f: &Formula) -> (BlockStructure, Atom) {
        let (bs, m) = BlockStructure::of_prenex(f).unwrap();
        let Formula::Atom(a) = m else { panic!("matrix is not an atom") };
        (bs, a.clone())
    }

    fn same(actual: &Formula, expected: &str) {
        assert_eq!(
            ac_normalize(actual),
            ac_normalize(&p(expected)),
            "\n got: {}\nwant: {}",
            print_formula(actual),
            expected
        );
    }

    #[test]
    fn nested_denominator_ladder() {
        let f = p("all a,b[ex x[x - 1/(a x + b*(1/(b+1))) = 0]]");
        let (bs, a) = matrix_atom(&f);
        let l = translate_atom_traced(&bs, &a).unwrap();
        let dens: Vec<String> = l.eliminations.iter().map(|e| crate::syntax::print_term(&e.poly.to_term())).collect();
        assert_eq!(dens, ["b + 1", "a b x + a x + b"]);
        assert_eq!(print_formula(&l.eliminations[1].raw[1]), "a b + a = 0 /\\ b = 0");
        assert_eq!(l.n[0], [Formula::False]);
        same(&Formula::or_all(l.n[1].clone()), "b + 1 = 0 \\/ a = 0 /\\ b = 0");
        same(&Formula::or_all(l.n[2].clone()), "(b+1) a x + b = 0");
        assert_eq!(l.g[0], Formula::False);
        same(&l.g[1], "b + 1 = 0 \\/ a = 0 /\\ b = 0");
        same(&l.g[2], "(b+1) a x + b = 0");
        same(&l.h[0], "((b+1) a x + b) x - (b+1) = 0");
        same(&l.h[1], "(b+1) a x + b /= 0 /\\ ((b+1) a x + b) x - (b+1) = 0");
        let h0 = "[b + 1 = 0 \\/ a = 0 /\\ b = 0] \\/ (b+1) a x + b /= 0 /\\ ((b+1) a x + b) x - (b+1) = 0";
        same(&l.h[2], h0);
        same(l.h0(), h0);
        let text = l.render();
        assert!(text.contains("nullsys level 2: a b + a = 0 /\\ b = 0 = a = 0 /\\ b = 0"), "{text}");
        assert!(text.contains("H_0 = "), "{text}");
    }

    #[test]
    fn tarski_clear_mode_lines() {
        let f = p("all a,b[ex x[b^2 + 4 a < 0 \\/ x = 1/(a x + b)]]");
        assert_eq!(
            print_formula(&translate_formula(&f, ClearMode::NoGuard).unwrap()),
            "all a,b[ex x[b^2 + 4 a < 0 \\/ a x^2 + b x - 1 = 0]]"
        );
        assert_eq!(
            print_formula(&translate_formula(&f, ClearMode::Fair).unwrap()),
            "all a,b[ex x[b^2 + 4 a < 0 \\/ [b = 0 /\\ a = 0] \\/ [a x^2 + b x - 1 = 0 /\\ a x + b /= 0]]]",
        );
        assert_eq!(
            print_formula(&translate_formula(&f, ClearMode::Naive).unwrap()),
            "all a,b[ex x[b^2 + 4 a < 0 \\/ [a x^2 + b x - 1 = 0 /\\ a x + b /= 0]]]",
        );
    }

    #[test]
    fn f2_example() {
        let f = p("all a[ex b[all x[x^2 + a x + 1/(a b) > 0]]]");
        same(
            &translate_formula(&f, ClearMode::Fair).unwrap(),
            "all a[ex b[all x[a = 0 \\/ b /= 0 /\\ (a b x^2 + a^2 b x + 1)*(a b) > 0]]]",
        );
    }

    #[test]
    fn pathology() {
        let e = p("ex x[1/x^2 < 0]");
        let u = p("all x[1/x^2 >= 0]");
        same(&translate_formula(&e, ClearMode::Fair).unwrap(), "ex x[x^2 /= 0 /\\ x^2 < 0]");
        same(&translate_formula(&u, ClearMode::Fair).unwrap(), "all x[x^2 = 0 \\/ x^2 >= 0]");
        same(&translate_formula(&e, ClearMode::Naive).unwrap(), "ex x[x^2 < 0 /\\ x^2 /= 0]");
        same(&translate_formula(&u, ClearMode::Naive).unwrap(), "all x[x^2 >= 0 /\\ x^2 /= 0]");
    }

    #[test]
    fn div_free_is_unchanged() {
        let f = p("all a[ex x[a x^2 + 1 > 0 /\\ x /= a]]");
        for mode in [ClearMode::NoGuard, ClearMode::Naive, ClearMode::Fair] {
            assert_eq!(translate_formula(&f, mode).unwrap(), f);
        }
        let (bs, a) = matrix_atom(&p("ex x[x^2 = 2]"));
        let l = translate_atom_traced(&bs, &a).unwrap();
        assert!(l.n.iter().all(Vec::is_empty));
        assert!(l.g.iter().all(|g| *g == Formula::False));
        assert_eq!(*l.h0(), Formula::Atom(a));
    }

    #[test]
    fn preconditions() {
        assert_eq!(translate_formula(&p("ex x[x = 1/y] /\\ U1"), ClearMode::Fair), Err(Error::PropVarPresent));
        assert_eq!(translate_formula(&p("~ex x[x = 1/y]"), ClearMode::Fair), Err(Error::NotPositivePrenex));
        assert_eq!(translate_formula(&p("x > 0 /\\ ex y[y = 1/x]"), ClearMode::Fair), Err(Error::NotPositivePrenex));
        let bs = block_structure_of_str("ex x[x = 0]");
        let Formula::Atom(a) = p("y = 1/x") else { unreachable!() };
        assert_eq!(translate_atom(&bs, &a), Err(Error::BlockMismatch("y".into())));
    }

    fn block_structure_of_str(s: &str) -> BlockStructure {
        BlockStructure::of_prenex(&p(s)).unwrap().0
    }

    #[test]
    fn guard_simplification() {
        let ctx = Formula::False;
        assert_eq!(print_formula(&simplify_guard(&p("false \\/ b + 1 = 0"), &ctx)), "b + 1 = 0");
        assert_eq!(simplify_guard(&Formula::False, &ctx), Formula::False);
        assert_eq!(print_formula(&simplify_guard(&p("a = 0 /\\ b = 0 \\/ a = 0 /\\ b = 0"), &ctx)), "b = 0 /\\ a = 0");
        assert_eq!(simplify_guard(&p("a = 0 \\/ 3 = 0 /\\ b = 0"), &ctx), p("a = 0"));
        assert_eq!(simplify_guard(&p("a = 0 \\/ 0 = 0"), &ctx), Formula::True);
        // a disjunct already in the context is redundant
        assert_eq!(simplify_guard(&p("b + 1 = 0 \\/ a = 0"), &p("b + 1 = 0")), p("a = 0"));
        // known nonzero variables are divided out
        assert_eq!(simplify_guard(&p("a b = 0 /\\ a x = 0"), &p("a = 0")), p("x = 0 /\\ b = 0"));
        assert_eq!(simplify_guard(&p("a = 0"), &Formula::True), Formula::False);
    }

    #[test]
    fn mode_names() {
        assert_eq!("fair".parse::<ClearMode>(), Ok(ClearMode::Fair));
        assert_eq!("naive".parse::<ClearMode>(), Ok(ClearMode::Naive));
        assert_eq!("noguard".parse::<ClearMode>(), Ok(ClearMode::NoGuard));
        assert!("loose".parse::<ClearMode>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn cleared_atom_agrees_at_legal_points(input in props::cleared_points()) {
            props::cleared_atom_agrees_at_legal_points(input)?;
        }

        #[test]
        fn illegal_points_go_to_the_block_constant(input in props::illegal_points()) {
            props::illegal_points_go_to_the_block_constant(input)?;
        }

        #[test]
        fn legal_points_keep_the_atom(input in props::legal_points()) {
            props::legal_points_keep_the_atom(input)?;
        }

        #[test]
        fn flop_negates_the_translation(f in props::two_atom_prenex()) {
            props::flop_negates_the_translation(f)?;
        }
    }
}
