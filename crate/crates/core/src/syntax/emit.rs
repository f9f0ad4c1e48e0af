use num_traits::Signed;

use super::printer::print_term;
use crate::algebra::{term_to_polynomial, BlockStructure, Formula, Quant, Rational, RelOp, Term, Var};
use crate::error::{Error, Result};

fn smt_symbol(v: &Var) -> String {
    let n = v.name();
    if n.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
        n.to_string()
    } else {
        format!("|{n}|")
    }
}

fn smt_rat(r: &Rational) -> String {
    let mag = r.abs();
    let body = if mag.is_integer() {
        mag.numer().to_string()
    } else {
        format!("(/ {} {})", mag.numer(), mag.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn smt_term(t: &Term) -> String {
    match t {
        Term::Const(c) => smt_rat(c),
        Term::Var(v) => smt_symbol(v),
        Term::Neg(a) => format!("(- {})", smt_term(a)),
        Term::Add(a, b) => format!("(+ {} {})", smt_term(a), smt_term(b)),
        Term::Sub(a, b) => format!("(- {} {})", smt_term(a), smt_term(b)),
        Term::Mul(a, b) => format!("(* {} {})", smt_term(a), smt_term(b)),
        Term::Div(a, b) => format!("(/ {} {})", smt_term(a), smt_term(b)),
        Term::Pow(a, 1) => smt_term(a),
        Term::Pow(a, n) => {
            let base = smt_term(a);
            format!("(* {})", vec![base; *n as usize].join(" "))
        }
    }
}

fn smt_formula(f: &Formula) -> Result<String> {
    Ok(match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Prop(_) => return Err(Error::PropVarPresent),
        Formula::Atom(a) => {
            let (l, r) = (smt_term(&a.lhs), smt_term(&a.rhs));
            match a.op {
                RelOp::Eq => format!("(= {l} {r})"),
                RelOp::Ne => format!("(not (= {l} {r}))"),
                RelOp::Lt => format!("(< {l} {r})"),
                RelOp::Gt => format!("(> {l} {r})"),
                RelOp::Le => format!("(<= {l} {r})"),
                RelOp::Ge => format!("(>= {l} {r})"),
            }
        }
        Formula::Not(a) => format!("(not {})", smt_formula(a)?),
        Formula::And(a, b) => format!("(and {} {})", smt_formula(a)?, smt_formula(b)?),
        Formula::Or(a, b) => format!("(or {} {})", smt_formula(a)?, smt_formula(b)?),
        Formula::Implies(a, b) => format!("(=> {} {})", smt_formula(a)?, smt_formula(b)?),
        Formula::Exists(vs, a) | Formula::Forall(vs, a) => {
            let q = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            let binds: Vec<String> = vs.iter().map(|v| format!("({} Real)", smt_symbol(v))).collect();
            format!("({q} ({}) {})", binds.join(" "), smt_formula(a)?)
        }
    })
}

/// SMT-LIB2 script: one `declare-const` per free variable, one assertion,
/// `check-sat`.
pub fn emit_smt2(f: &Formula) -> Result<String> {
    let body = smt_formula(f)?;
    let mut out = String::new();
    for v in f.free_vars() {
        out.push_str(&format!("(declare-const {} Real)\n", smt_symbol(&v)));
    }
    out.push_str(&format!("(assert {body})\n(check-sat)\n"));
    Ok(out)
}

fn qepcad_matrix(f: &Formula) -> Result<String> {
    Ok(match f {
        Formula::True => "TRUE".into(),
        Formula::False => "FALSE".into(),
        Formula::Prop(_) => return Err(Error::PropVarPresent),
        Formula::Atom(a) => {
            let p = &term_to_polynomial(&a.lhs)? - &term_to_polynomial(&a.rhs)?;
            format!("{} {} 0", print_term(&p.integer_cleared().to_term()), a.op.symbol())
        }
        Formula::Not(a) => format!("~[{}]", qepcad_matrix(a)?),
        Formula::And(a, b) => format!("[{} /\\ {}]", qepcad_matrix(a)?, qepcad_matrix(b)?),
        Formula::Or(a, b) => format!("[{} \\/ {}]", qepcad_matrix(a)?, qepcad_matrix(b)?),
        Formula::Implies(a, b) => format!("[{} ==> {}]", qepcad_matrix(a)?, qepcad_matrix(b)?),
        Formula::Exists(..) | Formula::Forall(..) => return Err(Error::NotPrenex),
    })
}

/// QEPCAD-style input: informal description, variable list (free variables
/// first), number of free variables, prenex formula, `finish`.
pub fn emit_qepcad_style(f: &Formula) -> Result<String> {
    if f.has_div() {
        return Err(Error::DivPresent);
    }
    let (bs, matrix) = BlockStructure::of_prenex(f)?;
    let order: Vec<String> = bs.order().iter().map(|v| v.name().to_string()).collect();
    let mut prefix = String::new();
    for b in &bs.blocks {
        let q = if b.quant == Quant::Forall { "A" } else { "E" };
        for v in &b.vars {
            prefix.push_str(&format!("({q} {v})"));
        }
    }
    Ok(format!(
        "[ fairdiv ]\n({})\n{}\n{}[{}].\nfinish\n",
        order.join(","),
        bs.free_vars.len(),
        prefix,
        qepcad_matrix(matrix)?
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn squash(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn smt_free_variable() {
        let f = parse_formula("x > 0").unwrap();
        let s = emit_smt2(&f).unwrap();
        assert_eq!(s.split_whitespace().collect::<String>(), "(declare-constxReal)(assert(>x0))(check-sat)");
    }

    #[test]
    fn smt_quantified_division() {
        let f = parse_formula("ex x[1/x^2 < 0]").unwrap();
        let s = squash(&emit_smt2(&f).unwrap());
        assert!(s.contains("(exists ((x Real)) (< (/ 1 (* x x)) 0))"), "{s}");
        assert!(!s.contains("declare-const"));
    }

    #[test]
    fn smt_rejects_props_and_balances() {
        assert_eq!(emit_smt2(&parse_formula("U1 \\/ x > 0").unwrap()), Err(Error::PropVarPresent));
        let s = emit_smt2(&parse_formula("all x[ex y'[x - 1/2 y' /= -3 ==> ~[x < y']]]").unwrap()).unwrap();
        let mut depth = 0i32;
        for c in s.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            assert!(depth >= 0);
        }
        assert_eq!(depth, 0);
        assert!(s.contains("|y'|"));
    }

    #[test]
    fn qepcad_universal() {
        let s = emit_qepcad_style(&parse_formula("all x[x^2 >= 0]").unwrap()).unwrap();
        assert!(s.contains("(A x)"));
        assert!(s.contains("x^2 >= 0"));
        assert!(s.contains("(x)\n0\n"));
    }

    #[test]
    fn qepcad_free_only() {
        let s = emit_qepcad_style(&parse_formula("a > 0").unwrap()).unwrap();
        assert!(s.contains("(a)\n1\n"));
        assert!(!s.contains("(A ") && !s.contains("(E "));
    }

    #[test]
    fn qepcad_preconditions() {
        assert_eq!(emit_qepcad_style(&parse_formula("ex x[1/x > 0]").unwrap()), Err(Error::DivPresent));
        assert_eq!(
            emit_qepcad_style(&parse_formula("x > 0 /\\ ex y[y > 0]").unwrap()),
            Err(Error::NotPrenex)
        );
    }
}
