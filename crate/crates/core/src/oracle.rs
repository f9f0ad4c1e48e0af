//! Desk-scale semantics for formulas with division. Quantifiers range over
//! a finite candidate grid, so every answer is relative to that grid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{int, parse_rational, rat, Formula, FreshState, Polynomial, PropKind, PropVar, Quant, Rational, Term, Var};
use crate::error::{Error, Result};
use crate::fraction::denominators;
use crate::peval::{fold_closed_atoms, peval_formula, pevalp_formula};
use crate::rewrite::{flop, is_standardized_apart, lower_implies, normalize_divs, prop_polarities, standardize_apart};
use crate::syntax::{print_formula, print_term};
use crate::translate::clear_atom;

/// Finite candidate values per variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateGrid {
    per_var: BTreeMap<Var, Vec<Rational>>,
}

impl CandidateGrid {
    pub fn new() -> CandidateGrid {
        CandidateGrid::default()
    }

    pub fn default_values() -> Vec<Rational> {
        vec![int(-2), int(-1), rat(-1, 2), int(0), rat(1, 2), int(1), int(2)]
    }

    /// The same candidates for every listed variable.
    pub fn uniform<'a>(vars: impl IntoIterator<Item = &'a Var>, values: &[Rational]) -> CandidateGrid {
        let mut g = CandidateGrid::new();
        for v in vars {
            g.set(v.clone(), values.to_vec());
        }
        g
    }

    pub fn set(&mut self, v: Var, mut values: Vec<Rational>) {
        values.sort();
        values.dedup();
        self.per_var.insert(v, values);
    }

    pub fn candidates(&self, v: &Var) -> Option<&[Rational]> {
        self.per_var.get(v).map(Vec::as_slice).filter(|c| !c.is_empty())
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.per_var.keys()
    }

    /// First variable of `f` without candidates.
    pub fn missing(&self, f: &Formula) -> Option<Var> {
        f.all_vars().into_iter().find(|v| self.candidates(v).is_none())
    }

    /// Default candidates for every variable of `f`, plus the rational roots
    /// of each denominator polynomial in one variable after fixing its other
    /// variables to default candidates.
    pub fn auto(f: &Formula) -> CandidateGrid {
        let base = CandidateGrid::default_values();
        let mut per: BTreeMap<Var, BTreeSet<Rational>> =
            f.all_vars().into_iter().map(|v| (v, base.iter().cloned().collect())).collect();
        for a in f.atoms() {
            for p in denominators(&Term::sub(a.lhs.clone(), a.rhs.clone())) {
                for v in p.vars() {
                    let others: Vec<Var> = p.vars().into_iter().filter(|w| *w != v).collect();
                    for point in product(&others, &base, 512) {
                        let q = p.substitute(&point);
                        if let Some(set) = per.get_mut(&v) {
                            set.extend(rational_roots(&q, &v));
                        }
                    }
                }
            }
        }
        CandidateGrid { per_var: per.into_iter().map(|(v, s)| (v, s.into_iter().collect())).collect() }
    }
}

impl std::str::FromStr for CandidateGrid {
    type Err = String;

    /// `x:-1,0,1;y:1/2,2`
    fn from_str(s: &str) -> std::result::Result<CandidateGrid, String> {
        let mut g = CandidateGrid::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, vals) = part.split_once(':').ok_or_else(|| format!("expected `var:values` in `{part}`"))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(format!("missing variable name in `{part}`"));
            }
            let values = vals
                .split(',')
                .map(|t| parse_rational(t.trim()).ok_or_else(|| format!("bad rational `{}`", t.trim())))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err(format!("no values for `{name}`"));
            }
            g.set(Var::new(name), values);
        }
        Ok(g)
    }
}

impl fmt::Display for CandidateGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .per_var
            .iter()
            .map(|(v, vals)| {
                let vs: Vec<String> = vals.iter().map(show_rat).collect();
                format!("{}:{}", v.name(), vs.join(","))
            })
            .collect();
        f.write_str(&parts.join(";"))
    }
}

fn show_rat(r: &Rational) -> String {
    print_term(&Term::c(r.clone()))
}

/// Assignments of `vars` over `values`, at most `cap` of them.
fn product(vars: &[Var], values: &[Rational], cap: usize) -> Vec<BTreeMap<Var, Rational>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        let mut next = Vec::new();
        'outer: for m in &out {
            for a in values {
                if next.len() >= cap {
                    break 'outer;
                }
                let mut m = m.clone();
                m.insert(v.clone(), a.clone());
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots of `q` as a polynomial in `v` alone.
fn rational_roots(q: &Polynomial, v: &Var) -> Vec<Rational> {
    if q.is_zero() || q.vars().iter().any(|w| w != v) {
        return Vec::new();
    }
    let q = q.integer_cleared();
    let coeff = |e: u32| -> BigInt {
        q.terms().filter(|(m, _)| m.exp(v) == e).map(|(_, c)| c.to_integer()).sum()
    };
    let low = q.terms().map(|(m, _)| m.exp(v)).min().unwrap_or(0);
    let high = q.degree_in(v);
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(Rational::zero());
    }
    let (Some(ps), Some(qs)) = (divisors(&coeff(low)), divisors(&coeff(high))) else {
        return roots;
    };
    for p in &ps {
        for d in &qs {
            for s in [1i64, -1] {
                let r = Rational::new(BigInt::from(*p) * s, BigInt::from(*d));
                let env = BTreeMap::from([(v.clone(), r.clone())]);
                if q.eval(&env).is_some_and(|x| x.is_zero()) && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriState {
    FairSat,
    NotFairSatOnGrid,
    Unknown,
}

impl TriState {
    pub fn negate(self) -> TriState {
        match self {
            TriState::FairSat => TriState::NotFairSatOnGrid,
            TriState::NotFairSatOnGrid => TriState::FairSat,
            TriState::Unknown => TriState::Unknown,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TriState::FairSat => "fair-sat",
            TriState::NotFairSatOnGrid => "not-fair-sat-on-grid",
            TriState::Unknown => "unknown",
        }
    }

    fn of(b: bool) -> TriState {
        if b {
            TriState::FairSat
        } else {
            TriState::NotFairSatOnGrid
        }
    }
}

/// Boolean value of a formula built from constants, propositional variables
/// and connectives under `env`.
fn eval_prop(f: &Formula, env: &BTreeMap<PropVar, bool>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Prop(p) => env.get(p).copied().unwrap_or(false),
        Formula::Not(a) => !eval_prop(a, env),
        Formula::And(a, b) => eval_prop(a, env) && eval_prop(b, env),
        Formula::Or(a, b) => eval_prop(a, env) || eval_prop(b, env),
        Formula::Implies(a, b) => !eval_prop(a, env) || eval_prop(b, env),
        Formula::Atom(_) | Formula::Exists(..) | Formula::Forall(..) => unreachable!("not propositional"),
    }
}

fn quant_of(p: PropVar) -> Quant {
    match p.kind {
        PropKind::U => Quant::Forall,
        PropKind::V => Quant::Exists,
    }
}

/// Value of `forall U.. exists V..[f]`, computed with a single assignment:
/// each `U` takes the value that falsifies its literal and each `V` the one
/// that satisfies it.
pub fn qbf_base_eval(f: &Formula) -> Result<bool> {
    if !f.is_propositional() {
        return Err(Error::RealVarsPresent);
    }
    let env = prop_polarities(f)
        .into_iter()
        .map(|(p, positive)| (p, if p.kind == PropKind::U { !positive } else { positive }))
        .collect();
    Ok(eval_prop(f, &env))
}

/// Value of `f` under the propositional quantifiers taken in `order`, each
/// `U` universal and each `V` existential, by enumeration.
pub fn qbf_brute(f: &Formula, order: &[PropVar]) -> Result<bool> {
    if !f.is_propositional() {
        return Err(Error::RealVarsPresent);
    }
    fn go(f: &Formula, order: &[PropVar], env: &mut BTreeMap<PropVar, bool>) -> bool {
        let Some((&p, rest)) = order.split_first() else { return eval_prop(f, env) };
        let mut branch = |b: bool| {
            env.insert(p, b);
            go(f, rest, env)
        };
        match quant_of(p) {
            Quant::Forall => branch(false) && branch(true),
            Quant::Exists => branch(false) || branch(true),
        }
    }
    Ok(go(f, order, &mut BTreeMap::new()))
}

/// Propositional variables ordered `U`s first, then `V`s.
pub fn base_order(f: &Formula) -> Vec<PropVar> {
    let mut ps = f.props();
    ps.sort_by_key(|p| p.kind);
    ps.dedup();
    ps
}

/// One partial-evaluation step of the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub var: Var,
    pub value: Rational,
    pub formula: Formula,
}

#[derive(Clone, Debug)]
pub struct FairSatReport {
    pub result: TriState,
    /// Witness steps for `FairSat`, every explored step otherwise.
    pub steps: Vec<Step>,
    pub grid: CandidateGrid,
}

impl FairSatReport {
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.result.label());
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "step {}: {}={} -> {}\n",
                i + 1,
                s.var.name(),
                show_rat(&s.value),
                print_formula(&s.formula)
            ));
        }
        out
    }
}

fn split_first(vs: &[Var], body: &Formula, forall: bool) -> (Var, Formula) {
    let rest = if vs.len() == 1 {
        body.clone()
    } else if forall {
        Formula::forall(vs[1..].to_vec(), body.clone())
    } else {
        Formula::exists(vs[1..].to_vec(), body.clone())
    };
    (vs[0].clone(), rest)
}

struct Search<'a> {
    grid: &'a CandidateGrid,
}

impl Search<'_> {
    fn sat(&self, f: &Formula, fs: FreshState) -> Result<(TriState, Vec<Step>)> {
        let (f, fs) = fold_closed_atoms(f, fs);
        if f.is_propositional() {
            return Ok((TriState::of(qbf_base_eval(&f)?), Vec::new()));
        }
        match &f {
            Formula::Not(g) => {
                let pushed = match g.as_ref() {
                    Formula::And(a, b) => Formula::or(Formula::not((**a).clone()), Formula::not((**b).clone())),
                    Formula::Or(a, b) => Formula::and(Formula::not((**a).clone()), Formula::not((**b).clone())),
                    Formula::Not(a) => (**a).clone(),
                    Formula::Exists(vs, a) => Formula::forall(vs.clone(), Formula::not((**a).clone())),
                    Formula::Forall(vs, a) => Formula::exists(vs.clone(), Formula::not((**a).clone())),
                    _ => return Err(Error::NotClosed(first_free(g))),
                };
                self.sat(&pushed, fs)
            }
            Formula::Or(a, b) => {
                let (ra, sa) = self.sat(a, fs)?;
                if ra == TriState::FairSat {
                    return Ok((ra, sa));
                }
                let (rb, sb) = self.sat(b, fs)?;
                let r = match (ra, rb) {
                    (_, TriState::FairSat) => return Ok((rb, sb)),
                    (TriState::NotFairSatOnGrid, TriState::NotFairSatOnGrid) => TriState::NotFairSatOnGrid,
                    _ => TriState::Unknown,
                };
                Ok((r, [sa, sb].concat()))
            }
            Formula::And(a, b) => {
                let (ra, sa) = self.sat(a, fs)?;
                if ra == TriState::NotFairSatOnGrid {
                    return Ok((ra, sa));
                }
                let (rb, sb) = self.sat(b, fs)?;
                let r = match (ra, rb) {
                    (_, TriState::NotFairSatOnGrid) => return Ok((rb, sb)),
                    (TriState::FairSat, TriState::FairSat) => TriState::FairSat,
                    _ => TriState::Unknown,
                };
                Ok((r, [sa, sb].concat()))
            }
            Formula::Exists(vs, body) => {
                let (x, rest) = split_first(vs, body, false);
                let Some(cands) = self.grid.candidates(&x) else {
                    return Ok((TriState::Unknown, Vec::new()));
                };
                let mut all = Vec::new();
                let mut unknown = false;
                for a in cands {
                    let (g, fs2) = peval_formula(&rest, &x, a, fs)?;
                    let step = Step { var: x.clone(), value: a.clone(), formula: g.clone() };
                    let (r, sub) = self.sat(&g, fs2)?;
                    if r == TriState::FairSat {
                        return Ok((r, [vec![step], sub].concat()));
                    }
                    unknown |= r == TriState::Unknown;
                    all.push(step);
                    all.extend(sub);
                }
                Ok((if unknown { TriState::Unknown } else { TriState::NotFairSatOnGrid }, all))
            }
            Formula::Forall(vs, body) => {
                let (x, rest) = split_first(vs, body, true);
                let dual = Formula::exists(vec![x], flop(&rest)?);
                let (r, steps) = self.sat(&dual, fs)?;
                Ok((r.negate(), steps))
            }
            Formula::Implies(..) => unreachable!("implications are lowered on entry"),
            Formula::Atom(_) | Formula::True | Formula::False | Formula::Prop(_) => {
                Err(Error::NotClosed(first_free(&f)))
            }
        }
    }
}

fn first_free(f: &Formula) -> String {
    f.free_vars().into_iter().next().map(|v| v.name().to_string()).unwrap_or_default()
}

fn prepare(f: &Formula) -> Result<Formula> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::NotClosed(v.name().to_string()));
    }
    let f = lower_implies(f);
    Ok(if is_standardized_apart(&f) { f } else { standardize_apart(&f) })
}

/// Fair satisfiability of a closed formula with every quantifier ranging
/// over the grid. `Unknown` is returned when a quantified variable has no
/// candidates.
pub fn fair_sat_grid_traced(f: &Formula, grid: &CandidateGrid, fs: FreshState) -> Result<FairSatReport> {
    let f = prepare(f)?;
    let (result, steps) = Search { grid }.sat(&f, fs)?;
    Ok(FairSatReport { result, steps, grid: grid.clone() })
}

pub fn fair_sat_grid(f: &Formula, grid: &CandidateGrid, fs: FreshState) -> Result<TriState> {
    Ok(fair_sat_grid_traced(f, grid, fs)?.result)
}

/// A quantified boolean formula over `U`/`V` variables. In a base node each
/// `U` is universal and each `V` existential, quantified in the listed
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Qbf {
    Base { prefix: Vec<PropVar>, matrix: Formula },
    Not(Box<Qbf>),
    And(Box<Qbf>, Box<Qbf>),
    Or(Box<Qbf>, Box<Qbf>),
}

impl Qbf {
    pub fn base(matrix: Formula) -> Qbf {
        let mut prefix = Vec::new();
        for p in matrix.props() {
            if !prefix.contains(&p) {
                prefix.push(p);
            }
        }
        Qbf::Base { prefix, matrix }
    }

    /// Negation; a double negation cancels.
    pub fn negate(self) -> Qbf {
        match self {
            Qbf::Not(q) => *q,
            q => Qbf::Not(Box::new(q)),
        }
    }

    pub fn eval(&self) -> bool {
        match self {
            Qbf::Base { prefix, matrix } => qbf_brute(matrix, prefix).expect("matrix is propositional"),
            Qbf::Not(q) => !q.eval(),
            Qbf::And(a, b) => a.eval() && b.eval(),
            Qbf::Or(a, b) => a.eval() || b.eval(),
        }
    }
}

impl fmt::Display for Qbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qbf::Base { prefix, matrix } => {
                for p in prefix {
                    let q = if p.kind == PropKind::U { "all" } else { "ex" };
                    write!(f, "{q} {}[", print_formula(&Formula::Prop(*p)))?;
                }
                write!(f, "{}", print_formula(matrix))?;
                write!(f, "{}", "]".repeat(prefix.len()))
            }
            Qbf::Not(q) => write!(f, "~[{q}]"),
            Qbf::And(a, b) => write!(f, "[{a}] /\\ [{b}]"),
            Qbf::Or(a, b) => write!(f, "[{a}] \\/ [{b}]"),
        }
    }
}

fn negated_quantifier(f: &Formula) -> bool {
    let mut hit = false;
    f.visit(&mut |g| {
        if let Formula::Not(a) = g {
            hit |= a.has_quantifier();
        }
    });
    hit
}

fn fse_rec(f: &Formula, alpha: &[Rational], fs: FreshState) -> Result<(Qbf, FreshState)> {
    let (f, fs) = fold_closed_atoms(f, fs);
    if f.is_propositional() {
        return Ok((Qbf::base(f), fs));
    }
    match &f {
        Formula::Or(a, b) | Formula::And(a, b) => {
            let n = a.bound_vars_in_order().len();
            let (qa, fs) = fse_rec(a, &alpha[..n], fs)?;
            let (qb, fs) = fse_rec(b, &alpha[n..], fs)?;
            let q = if matches!(f, Formula::Or(..)) {
                Qbf::Or(Box::new(qa), Box::new(qb))
            } else {
                Qbf::And(Box::new(qa), Box::new(qb))
            };
            Ok((q, fs))
        }
        Formula::Exists(vs, body) => {
            let (x, rest) = split_first(vs, body, false);
            let (g, fs) = peval_formula(&rest, &x, &alpha[0], fs)?;
            fse_rec(&g, &alpha[1..], fs)
        }
        Formula::Forall(vs, body) => {
            let (x, rest) = split_first(vs, body, true);
            let (q, fs) = fse_rec(&Formula::exists(vec![x], flop(&rest)?), alpha, fs)?;
            Ok((q.negate(), fs))
        }
        _ => Err(Error::NotClosed(first_free(&f))),
    }
}

/// Fair-SAT evaluation of `f` at `alpha`, one value per quantified variable
/// in left-to-right order of introduction.
pub fn fse(f: &Formula, alpha: &[Rational]) -> Result<Qbf> {
    if f.has_implies() {
        return Err(Error::NotPevalSafe("implication present"));
    }
    if negated_quantifier(f) {
        return Err(Error::NotPevalSafe("a negated subformula contains quantifiers"));
    }
    let n = f.bound_vars_in_order().len();
    if n != alpha.len() {
        return Err(Error::ArityMismatch { expected: n, got: alpha.len() });
    }
    let fs = FreshState::starting_at(f.max_prop_index() + 1);
    Ok(fse_rec(f, alpha, fs)?.0)
}

fn introductions(f: &Formula, out: &mut Vec<(Quant, Var)>) {
    f.visit(&mut |g| match g {
        Formula::Exists(vs, _) => out.extend(vs.iter().map(|v| (Quant::Exists, v.clone()))),
        Formula::Forall(vs, _) => out.extend(vs.iter().map(|v| (Quant::Forall, v.clone()))),
        _ => {}
    });
}

/// Compares fair satisfiability of `f` with the quantified evaluation of
/// `fse(f)` over the grid. True when they agree.
pub fn check_fsfse(f: &Formula, grid: &CandidateGrid) -> Result<bool> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::NotClosed(v.name().to_string()));
    }
    if !is_standardized_apart(f) {
        return Err(Error::NotStandardizedApart(String::new()));
    }
    let mut intro = Vec::new();
    introductions(f, &mut intro);
    if let Some((_, v)) = intro.iter().find(|(_, v)| grid.candidates(v).is_none()) {
        return Err(Error::GridIncomplete(v.name().to_string()));
    }
    let lhs = fair_sat_grid(f, grid, FreshState::new())? == TriState::FairSat;
    fn quantify(f: &Formula, intro: &[(Quant, Var)], grid: &CandidateGrid, alpha: &mut Vec<Rational>) -> Result<bool> {
        let Some(((q, v), rest)) = intro.split_first() else {
            return Ok(fse(f, alpha)?.eval());
        };
        for a in grid.candidates(v).expect("checked above") {
            alpha.push(a.clone());
            let r = quantify(f, rest, grid, alpha)?;
            alpha.pop();
            if r == (*q == Quant::Exists) {
                return Ok(r);
            }
        }
        Ok(*q == Quant::Forall)
    }
    let rhs = quantify(f, &intro, grid, &mut Vec::new())?;
    Ok(lhs == rhs)
}

fn sorted_free(fs: &[&Formula]) -> Vec<Var> {
    let mut s = BTreeSet::new();
    for f in fs {
        s.extend(f.free_vars());
    }
    s.into_iter().collect()
}

fn decide_at(f: &Formula, xs: &[Var], g: &[Rational], grid: Option<&CandidateGrid>) -> Option<TriState> {
    let (h, fs) = pevalp_formula(&lower_implies(f), xs, g, FreshState::new()).ok()?;
    let grid = grid.cloned().unwrap_or_else(|| CandidateGrid::auto(&h));
    fair_sat_grid(&h, &grid, fs).ok()
}

/// Evaluates both formulas at each point (values for their free variables
/// in name order) and decides the results on the automatic grid. True when
/// no point tells them apart.
pub fn equiv_on_samples(f: &Formula, g: &Formula, points: &[Vec<Rational>]) -> bool {
    let xs = sorted_free(&[f, g]);
    points.iter().all(|p| {
        if p.len() != xs.len() {
            return false;
        }
        let (a, b) = (decide_at(f, &xs, p, None), decide_at(g, &xs, p, None));
        a.is_some() && a == b
    })
}

/// Division-free formula obtained by clearing every atom without guards.
pub fn clear_formula(f: &Formula) -> Formula {
    normalize_divs(f).map_atoms(&mut |a| Formula::Atom(clear_atom(a)))
}

/// Checks, at every grid assignment to the free variables, that the cleared
/// formula is true exactly when the original is fair-SAT. A `false` result
/// refutes well-definedness; `true` only means no grid point refutes it.
pub fn check_well_defined_on_grid(f: &Formula, grid: &CandidateGrid) -> bool {
    let xs: Vec<Var> = f.free_vars().into_iter().collect();
    if xs.iter().any(|v| grid.candidates(v).is_none()) {
        return false;
    }
    let cleared = clear_formula(f);
    let values: Vec<Vec<Rational>> = xs.iter().map(|v| grid.candidates(v).unwrap().to_vec()).collect();
    let mut idx = vec![0usize; xs.len()];
    loop {
        let g: Vec<Rational> = idx.iter().zip(&values).map(|(&i, vs)| vs[i].clone()).collect();
        let a = decide_at(&cleared, &xs, &g, Some(grid));
        let b = decide_at(f, &xs, &g, Some(grid));
        if a.is_none() || a != b {
            return false;
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return true;
            }
            idx[k] += 1;
            if idx[k] < values[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
