use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use super::{Rational, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl RelOp {
    /// The complementary relation.
    pub fn negate(self) -> RelOp {
        match self {
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
            RelOp::Lt => RelOp::Ge,
            RelOp::Ge => RelOp::Lt,
            RelOp::Gt => RelOp::Le,
            RelOp::Le => RelOp::Gt,
        }
    }

    /// The relation with its arguments swapped.
    pub fn converse(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Gt,
            RelOp::Gt => RelOp::Lt,
            RelOp::Le => RelOp::Ge,
            RelOp::Ge => RelOp::Le,
            op => op,
        }
    }

    pub fn is_order(self) -> bool {
        !matches!(self, RelOp::Eq | RelOp::Ne)
    }

    /// Truth of `a op b` given `a.cmp(b)`.
    pub fn holds(self, o: Ordering) -> bool {
        match self {
            RelOp::Eq => o == Ordering::Equal,
            RelOp::Ne => o != Ordering::Equal,
            RelOp::Lt => o == Ordering::Less,
            RelOp::Gt => o == Ordering::Greater,
            RelOp::Le => o != Ordering::Greater,
            RelOp::Ge => o != Ordering::Less,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "/=",
            RelOp::Lt => "<",
            RelOp::Gt => ">",
            RelOp::Le => "<=",
            RelOp::Ge => ">=",
        }
    }

    pub const ALL: [RelOp; 6] = [RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Gt, RelOp::Le, RelOp::Ge];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropKind {
    U,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropVar {
    pub kind: PropKind,
    pub index: u32,
}

impl PropVar {
    pub fn u(index: u32) -> PropVar {
        PropVar { kind: PropKind::U, index }
    }

    pub fn v(index: u32) -> PropVar {
        PropVar { kind: PropKind::V, index }
    }

    pub fn flipped(self) -> PropVar {
        let kind = match self.kind {
            PropKind::U => PropKind::V,
            PropKind::V => PropKind::U,
        };
        PropVar { kind, index: self.index }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Term,
    pub op: RelOp,
    pub rhs: Term,
}

impl Atom {
    pub fn new(lhs: Term, op: RelOp, rhs: Term) -> Atom {
        Atom { lhs, op, rhs }
    }

    pub fn negated(&self) -> Atom {
        Atom { lhs: self.lhs.clone(), op: self.op.negate(), rhs: self.rhs.clone() }
    }

    pub fn has_div(&self) -> bool {
        self.lhs.has_div() || self.rhs.has_div()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.lhs.vars();
        self.rhs.collect_vars(&mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(PropVar),
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn atom(lhs: Term, op: RelOp, rhs: Term) -> Formula {
        Formula::Atom(Atom::new(lhs, op, rhs))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(vars: Vec<Var>, f: Formula) -> Formula {
        assert!(!vars.is_empty(), "empty quantifier");
        Formula::Exists(vars, Box::new(f))
    }

    pub fn forall(vars: Vec<Var>, f: Formula) -> Formula {
        assert!(!vars.is_empty(), "empty quantifier");
        Formula::Forall(vars, Box::new(f))
    }

    pub fn u(i: u32) -> Formula {
        Formula::Prop(PropVar::u(i))
    }

    pub fn v(i: u32) -> Formula {
        Formula::Prop(PropVar::v(i))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn and_all(it: impl IntoIterator<Item = Formula>) -> Formula {
        it.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn or_all(it: impl IntoIterator<Item = Formula>) -> Formula {
        it.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => {}
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, a) | Formula::Forall(vs, a) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                a.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => out.extend(a.vars()),
            Formula::Exists(vs, _) | Formula::Forall(vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    fn any(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        let mut hit = false;
        self.visit(&mut |f| hit |= pred(f));
        hit
    }

    pub fn has_quantifier(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Exists(..) | Formula::Forall(..)))
    }

    pub fn has_div(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Atom(a) if a.has_div()))
    }

    pub fn has_implies(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Implies(..)))
    }

    pub fn has_atoms(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Atom(_)))
    }

    pub fn props(&self) -> Vec<PropVar> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Prop(p) = f {
                out.push(*p);
            }
        });
        out
    }

    pub fn max_prop_index(&self) -> u32 {
        self.props().iter().map(|p| p.index).max().unwrap_or(0)
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        collect_atoms(self, &mut out);
        out
    }

    /// Only constants, propositional variables and connectives.
    pub fn is_propositional(&self) -> bool {
        !self.any(&|f| matches!(f, Formula::Atom(_) | Formula::Exists(..) | Formula::Forall(..)))
    }

    /// Rebuilds the formula with every atom replaced.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => self.clone(),
            Formula::Atom(a) => f(a),
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::And(a, b) => {
                let a = a.map_atoms(f);
                Formula::and(a, b.map_atoms(f))
            }
            Formula::Or(a, b) => {
                let a = a.map_atoms(f);
                Formula::or(a, b.map_atoms(f))
            }
            Formula::Implies(a, b) => {
                let a = a.map_atoms(f);
                Formula::implies(a, b.map_atoms(f))
            }
            Formula::Exists(vs, a) => Formula::exists(vs.clone(), a.map_atoms(f)),
            Formula::Forall(vs, a) => Formula::forall(vs.clone(), a.map_atoms(f)),
        }
    }

    /// Number of quantified variable introductions, left to right.
    pub fn bound_vars_in_order(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Exists(vs, _) | Formula::Forall(vs, _) = f {
                out.extend(vs.iter().cloned());
            }
        });
        out
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Truth value of a quantifier-free formula without propositional
    /// variables at a point covering its variables. `None` on a division by
    /// zero, a missing value, a quantifier or a propositional variable.
    pub fn eval_qf(&self, env: &BTreeMap<Var, Rational>) -> Option<bool> {
        Some(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.op.holds(a.lhs.eval(env)?.cmp(&a.rhs.eval(env)?)),
            Formula::Not(a) => !a.eval_qf(env)?,
            Formula::And(a, b) => {
                let (a, b) = (a.eval_qf(env)?, b.eval_qf(env)?);
                a && b
            }
            Formula::Or(a, b) => {
                let (a, b) = (a.eval_qf(env)?, b.eval_qf(env)?);
                a || b
            }
            Formula::Implies(a, b) => {
                let (a, b) = (a.eval_qf(env)?, b.eval_qf(env)?);
                !a || b
            }
            Formula::Prop(_) | Formula::Exists(..) | Formula::Forall(..) => return None,
        })
    }
}

fn collect_atoms<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
    match f {
        Formula::Atom(a) => out.push(a),
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => collect_atoms(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        _ => {}
    }
}
