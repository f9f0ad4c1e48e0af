use num_traits::{ToPrimitive, Zero};

use super::lexer::{lex, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::algebra::{Formula, PropVar, Rational, RelOp, Term, Var};

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let f = p.disj()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let t = p.sum()?;
    p.expect_eof()?;
    Ok(t)
}

const KEYWORDS: [&str; 4] = ["all", "ex", "true", "false"];

fn prop_var(s: &str) -> Option<PropVar> {
    let (kind, digits) = s.split_at(1);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let index: u32 = digits.parse().ok()?;
    if index == 0 {
        return None;
    }
    match kind {
        "U" => Some(PropVar::u(index)),
        "V" => Some(PropVar::v(index)),
        _ => None,
    }
}

fn is_var_name(s: &str) -> bool {
    !KEYWORDS.contains(&s) && prop_var(s).is_none()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            let want = format!("`{}`", t.text());
            self.err(&[want.as_str()])
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(&["end of input"])
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unit()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unit()?);
        }
        Ok(f)
    }

    fn unit(&mut self) -> Result<Formula, ParseError> {
        let f = self.prefix()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(Formula::implies(f, self.unit()?));
        }
        Ok(f)
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.prefix()?))
            }
            Tok::LBrack => {
                self.bump();
                let f = self.disj()?;
                self.expect(Tok::RBrack)?;
                Ok(f)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                "all" | "ex" => {
                    self.bump();
                    let vars = self.varlist()?;
                    self.expect(Tok::LBrack)?;
                    let body = self.disj()?;
                    self.expect(Tok::RBrack)?;
                    Ok(if s == "all" { Formula::forall(vars, body) } else { Formula::exists(vars, body) })
                }
                _ => match prop_var(&s) {
                    Some(p) => {
                        self.bump();
                        Ok(Formula::Prop(p))
                    }
                    None => self.atom(),
                },
            },
            Tok::Num(_) | Tok::LParen | Tok::Minus => self.atom(),
            _ => self.err(&["`~`", "`[`", "`all`", "`ex`", "`true`", "`false`", "a propositional variable", "a term"]),
        }
    }

    fn varlist(&mut self) -> Result<Vec<Var>, ParseError> {
        let mut vars: Vec<Var> = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(s) if is_var_name(&s) => {
                    let v = Var::new(&s);
                    if vars.contains(&v) {
                        return self.err(&["a variable not already in the list"]);
                    }
                    self.bump();
                    vars.push(v);
                }
                _ => return self.err(&["a variable name"]),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(vars);
            }
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Rel("=") => RelOp::Eq,
            Tok::Rel("/=") => RelOp::Ne,
            Tok::Rel("<") => RelOp::Lt,
            Tok::Rel("<=") => RelOp::Le,
            Tok::Rel(">") => RelOp::Gt,
            Tok::Rel(">=") => RelOp::Ge,
            _ => return self.err(&["`=`", "`/=`", "`<`", "`<=`", "`>`", "`>=`"]),
        };
        self.bump();
        let rhs = self.sum()?;
        Ok(Formula::atom(lhs, op, rhs))
    }

    fn sum(&mut self) -> Result<Term, ParseError> {
        let mut t = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    t = Term::add(t, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    t = Term::sub(t, self.product()?);
                }
                _ => return Ok(t),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Tok::Num(_) | Tok::LParen => true,
            Tok::Ident(s) => is_var_name(s),
            _ => false,
        }
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut t = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    t = Term::mul(t, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    let d = self.unary()?;
                    t = match (&t, &d) {
                        (Term::Const(a), Term::Const(b)) if !b.is_zero() => Term::Const(a / b),
                        _ => Term::div(t, d),
                    };
                }
                _ if self.starts_factor() => {
                    t = Term::mul(t, self.power()?);
                }
                _ => return Ok(t),
            }
        }
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Minus {
            if let (Tok::Num(n), next) = (self.peek_at(1).clone(), self.peek_at(2)) {
                if *next != Tok::Caret {
                    self.bump();
                    self.bump();
                    return Ok(Term::Const(Rational::from_integer(-n)));
                }
            }
            self.bump();
            return Ok(Term::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Term, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return match self.peek().clone() {
                Tok::Num(n) => match n.to_u32() {
                    Some(e) if e >= 1 => {
                        self.bump();
                        Ok(Term::pow(base, e))
                    }
                    _ => self.err(&["a positive exponent"]),
                },
                _ => self.err(&["a positive exponent"]),
            };
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Term::Const(Rational::from_integer(n)))
            }
            Tok::Ident(s) if is_var_name(&s) => {
                self.bump();
                Ok(Term::Var(Var::new(&s)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.err(&["a number", "a variable", "`(`"]),
        }
    }
}
