use num_traits::Signed;

use crate::algebra::{Formula, PropKind, Rational, Term};

fn rat_text(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Binding strength of the printed form, used to decide parentheses.
fn prec(t: &Term) -> u8 {
    match t {
        Term::Const(c) if !c.is_integer() => 2,
        Term::Const(c) if c.is_negative() => 3,
        Term::Const(_) | Term::Var(_) => 5,
        Term::Pow(..) => 4,
        Term::Neg(_) => 3,
        Term::Mul(..) | Term::Div(..) => 2,
        Term::Add(..) | Term::Sub(..) => 1,
    }
}

fn at_least(t: &Term, p: u8) -> String {
    if prec(t) >= p {
        print_term(t)
    } else {
        format!("({})", print_term(t))
    }
}

fn juxtaposable(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Pow(b, _) => matches!(**b, Term::Var(_)),
        _ => false,
    }
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Const(c) => rat_text(c),
        Term::Var(v) => v.name().to_string(),
        Term::Neg(a) => match **a {
            Term::Const(_) => format!("-({})", print_term(a)),
            _ => format!("-{}", at_least(a, 3)),
        },
        Term::Add(a, b) => format!("{} + {}", at_least(a, 1), at_least(b, 2)),
        Term::Sub(a, b) => format!("{} - {}", at_least(a, 1), at_least(b, 2)),
        Term::Mul(a, b) if juxtaposable(b) => format!("{} {}", at_least(a, 2), print_term(b)),
        Term::Mul(a, b) => format!("{}*{}", at_least(a, 2), at_least(b, 3)),
        Term::Div(a, b) => format!("{}/{}", at_least(a, 2), at_least(b, 3)),
        Term::Pow(a, n) => format!("{}^{}", at_least(a, 5), n),
    }
}

fn is_binary_bool(f: &Formula) -> bool {
    matches!(f, Formula::And(..) | Formula::Or(..) | Formula::Implies(..))
}

fn bracket(s: String) -> String {
    format!("[{s}]")
}

pub fn print_formula(f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Prop(p) => {
            let k = if p.kind == PropKind::U { "U" } else { "V" };
            format!("{k}{}", p.index)
        }
        Formula::Atom(a) => format!("{} {} {}", print_term(&a.lhs), a.op.symbol(), print_term(&a.rhs)),
        Formula::Not(a) => {
            if is_binary_bool(a) {
                format!("~{}", bracket(print_formula(a)))
            } else {
                format!("~{}", print_formula(a))
            }
        }
        Formula::And(a, b) => {
            let l = match **a {
                Formula::Or(..) => bracket(print_formula(a)),
                _ => print_formula(a),
            };
            let r = match **b {
                Formula::Or(..) | Formula::And(..) => bracket(print_formula(b)),
                _ => print_formula(b),
            };
            format!("{l} /\\ {r}")
        }
        Formula::Or(a, b) => {
            let l = match **a {
                Formula::And(..) => bracket(print_formula(a)),
                _ => print_formula(a),
            };
            let r = match **b {
                Formula::Or(..) | Formula::And(..) => bracket(print_formula(b)),
                _ => print_formula(b),
            };
            format!("{l} \\/ {r}")
        }
        Formula::Implies(a, b) => {
            let l = if is_binary_bool(a) { bracket(print_formula(a)) } else { print_formula(a) };
            let r = match **b {
                Formula::Or(..) | Formula::And(..) => bracket(print_formula(b)),
                _ => print_formula(b),
            };
            format!("{l} ==> {r}")
        }
        Formula::Exists(vs, a) | Formula::Forall(vs, a) => {
            let q = if matches!(f, Formula::Exists(..)) { "ex" } else { "all" };
            let names: Vec<&str> = vs.iter().map(|v| v.name()).collect();
            format!("{q} {}[{}]", names.join(","), print_formula(a))
        }
    }
}
