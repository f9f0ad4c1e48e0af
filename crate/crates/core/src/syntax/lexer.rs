use num_bigint::BigInt;

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(BigInt),
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Tilde,
    And,
    Or,
    Implies,
    Rel(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            t => format!("`{}`", t.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::Tilde => "~",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Implies => "==>",
            Tok::Rel(r) => r,
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &src[i..];
        let (tok, len) = if c.is_ascii_alphabetic() || c == b'_' {
            let n = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'\'')
                .count();
            (Tok::Ident(rest[..n].to_string()), n)
        } else if c.is_ascii_digit() {
            let n = rest.bytes().take_while(|b| b.is_ascii_digit()).count();
            (Tok::Num(rest[..n].parse().expect("digits")), n)
        } else if rest.starts_with("==>") {
            (Tok::Implies, 3)
        } else if rest.starts_with("/\\") {
            (Tok::And, 2)
        } else if rest.starts_with("\\/") {
            (Tok::Or, 2)
        } else if rest.starts_with("/=") {
            (Tok::Rel("/="), 2)
        } else if rest.starts_with("<=") {
            (Tok::Rel("<="), 2)
        } else if rest.starts_with(">=") {
            (Tok::Rel(">="), 2)
        } else {
            let t = match c {
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'~' => Tok::Tilde,
                b'=' => Tok::Rel("="),
                b'<' => Tok::Rel("<"),
                b'>' => Tok::Rel(">"),
                _ => {
                    let ch = rest.chars().next().unwrap();
                    return Err(ParseError {
                        span: SourceSpan { start, end: start + ch.len_utf8() },
                        expected: vec!["a token".into()],
                        found: format!("`{ch}`"),
                    });
                }
            };
            (t, 1)
        };
        i += len;
        out.push(Token { tok, span: SourceSpan { start, end: i } });
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan { start: src.len(), end: src.len() } });
    Ok(out)
}
