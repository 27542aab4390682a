//! Lexer and recursive-descent parser for `.lq` source.
//!
//! The parser produces a named [`Surface`] tree that still contains the sugar
//! forms (`let`, `case`, tuples, numerals); lowering to the nameless [`Term`]
//! happens in [`crate::prelude::sugar`].

use std::fmt;

use thiserror::Error;

use super::term::Constant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unknown constant `{name}` at {pos}")]
    UnknownConstant { pos: Pos, name: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::UnknownConstant { pos, .. } => *pos,
        }
    }

    fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lambda,
    BangLambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    HashBracket,
    RBracket,
    Comma,
    Bang,
    Colon,
    Equals,
    Arrow,
    Ident(String),
    Const(Constant),
    Nat(u64),
    Let,
    In,
    Case,
    Of,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lambda => f.write_str("`\\`"),
            Tok::BangLambda => f.write_str("`\\!`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::HashBracket => f.write_str("`#[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Const(c) => write!(f, "constant `{c}`"),
            Tok::Nat(n) => write!(f, "numeral `{n}n`"),
            Tok::Let => f.write_str("`let`"),
            Tok::In => f.write_str("`in`"),
            Tok::Case => f.write_str("`case`"),
            Tok::Of => f.write_str("`of`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub(crate) const KEYWORDS: [&str; 4] = ["let", "in", "case", "of"];

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let simple = match c {
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, pos));
            bump!();
            continue;
        }
        match c {
            '\\' | 'λ' => {
                bump!();
                if i < chars.len() && chars[i] == '!' {
                    bump!();
                    out.push((Tok::BangLambda, pos));
                } else {
                    out.push((Tok::Lambda, pos));
                }
            }
            '!' => {
                bump!();
                out.push((Tok::Bang, pos));
            }
            '#' if next == Some('[') => {
                bump!();
                bump!();
                out.push((Tok::HashBracket, pos));
            }
            '-' if next == Some('>') => {
                bump!();
                bump!();
                out.push((Tok::Arrow, pos));
            }
            'φ' => {
                return Err(ParseError::syntax(
                    pos,
                    "the placeholder `φ` cannot appear in source programs",
                ))
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
                let digits: String = chars[start..i].iter().collect();
                if i < chars.len() && chars[i] == 'n' {
                    bump!();
                    if i < chars.len() && is_ident_continue(chars[i]) {
                        return Err(ParseError::syntax(pos, "malformed numeral"));
                    }
                    let n = digits
                        .parse::<u64>()
                        .map_err(|_| ParseError::syntax(pos, "numeral too large"))?;
                    out.push((Tok::Nat(n), pos));
                } else if i < chars.len() && is_ident_continue(chars[i]) {
                    return Err(ParseError::syntax(pos, "malformed numeral"));
                } else {
                    match digits.as_str() {
                        "0" => out.push((Tok::Const(Constant::Bit0), pos)),
                        "1" => out.push((Tok::Const(Constant::Bit1), pos)),
                        _ => {
                            return Err(ParseError::syntax(
                                pos,
                                format!(
                                    "`{digits}` is not a bit; write `{digits}n` for a Church numeral"
                                ),
                            ))
                        }
                    }
                }
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    bump!();
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "let" => Tok::Let,
                    "in" => Tok::In,
                    "case" => Tok::Case,
                    "of" => Tok::Of,
                    w => match Constant::from_symbol(w) {
                        Some(c) if !c.is_bit() => Tok::Const(c),
                        _ if w.starts_with(|c: char| c.is_ascii_uppercase()) => {
                            return Err(ParseError::UnknownConstant { pos, name: word })
                        }
                        _ => Tok::Ident(word),
                    },
                };
                out.push((tok, pos));
            }
            other => {
                return Err(ParseError::syntax(
                    pos,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Whether a binder is linear (`\x`) or nonlinear (`\!x`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Linearity {
    Linear,
    Nonlinear,
}

/// Parsed source before desugaring and name resolution.
#[derive(Clone, Debug)]
pub enum Surface {
    Var(String),
    Const(Constant),
    /// `3n`: a Church numeral value.
    Nat(u64),
    Lam(Linearity, String, Box<Surface>),
    App(Box<Surface>, Box<Surface>),
    Bang(Box<Surface>),
    /// `[a, b]` or `(a, b)`: a list built with `cons`.
    Tuple(Vec<Surface>),
    /// `#[a, b]`: an already-constructed list value.
    ListValue(Vec<Surface>),
    /// `h : t`
    Cons(Box<Surface>, Box<Surface>),
    Let(Pattern, Box<Surface>, Box<Surface>),
    CaseList {
        scrutinee: Box<Surface>,
        nil: Box<Surface>,
        head: String,
        tail: String,
        cons: Box<Surface>,
    },
    CaseNat {
        scrutinee: Box<Surface>,
        zero: Box<Surface>,
        pred: String,
        succ: Box<Surface>,
    },
    /// An already-lowered closed term (used by desugaring).
    Embed(super::term::Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// `let x = e in b`
    Var(String),
    /// `let !x = e in b`
    BangVar(String),
    /// `let (x, y, …) = e in b`
    Tuple(Vec<String>),
    /// `let h:t = e in b`
    Cons(String, String),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(ParseError::syntax(
                self.pos(),
                format!("expected {want}, found {}", self.peek()),
            ))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            other => Err(ParseError::syntax(
                self.pos(),
                format!("expected an identifier, found {other}"),
            )),
        }
    }

    fn term(&mut self) -> Result<Surface, ParseError> {
        match self.peek() {
            Tok::Lambda | Tok::BangLambda => {
                let lin = if self.advance() == Tok::Lambda {
                    Linearity::Linear
                } else {
                    Linearity::Nonlinear
                };
                let name = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Surface::Lam(lin, name, Box::new(body)))
            }
            Tok::Let => {
                self.advance();
                let pat = self.pattern()?;
                self.expect(Tok::Equals)?;
                let value = self.term()?;
                self.expect(Tok::In)?;
                let body = self.term()?;
                Ok(Surface::Let(pat, Box::new(value), Box::new(body)))
            }
            Tok::Case => self.case(),
            _ => {
                let head = self.app()?;
                if *self.peek() == Tok::Colon {
                    self.advance();
                    let tail = self.term()?;
                    Ok(Surface::Cons(Box::new(head), Box::new(tail)))
                } else {
                    Ok(head)
                }
            }
        }
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let pos = self.pos();
        let pat = match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Pattern::BangVar(self.ident()?)
            }
            Tok::LParen | Tok::LBracket => {
                let close = if self.advance() == Tok::LParen {
                    Tok::RParen
                } else {
                    Tok::RBracket
                };
                let mut names = vec![self.ident()?];
                while *self.peek() == Tok::Comma {
                    self.advance();
                    names.push(self.ident()?);
                }
                self.expect(close.clone())?;
                if close == Tok::RParen && names.len() < 2 {
                    return Err(ParseError::syntax(
                        pos,
                        "a parenthesized pattern needs at least two names; use `[x]` for one",
                    ));
                }
                Pattern::Tuple(names)
            }
            Tok::Ident(h) => {
                self.advance();
                if *self.peek() == Tok::Colon {
                    self.advance();
                    Pattern::Cons(h, self.ident()?)
                } else {
                    Pattern::Var(h)
                }
            }
            other => {
                return Err(ParseError::syntax(
                    pos,
                    format!("expected a let pattern, found {other}"),
                ))
            }
        };
        let names: Vec<&String> = match &pat {
            Pattern::Tuple(ns) => ns.iter().collect(),
            Pattern::Cons(h, t) => vec![h, t],
            _ => Vec::new(),
        };
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ParseError::syntax(pos, format!("`{n}` bound twice in pattern")));
            }
        }
        Ok(pat)
    }

    fn case(&mut self) -> Result<Surface, ParseError> {
        let pos = self.pos();
        self.expect(Tok::Case)?;
        let scrutinee = Box::new(self.term()?);
        self.expect(Tok::Of)?;
        self.expect(Tok::LParen)?;
        let first = self.alt()?;
        self.expect(Tok::Comma)?;
        let second = self.alt()?;
        self.expect(Tok::RParen)?;
        match (first, second) {
            (Alt::Nil(nil), Alt::Cons(head, tail, cons))
            | (Alt::Cons(head, tail, cons), Alt::Nil(nil)) => Ok(Surface::CaseList {
                scrutinee,
                nil: Box::new(nil),
                head,
                tail,
                cons: Box::new(cons),
            }),
            (Alt::Zero(zero), Alt::Succ(pred, succ)) | (Alt::Succ(pred, succ), Alt::Zero(zero)) => {
                Ok(Surface::CaseNat {
                    scrutinee,
                    zero: Box::new(zero),
                    pred,
                    succ: Box::new(succ),
                })
            }
            _ => Err(ParseError::syntax(
                pos,
                "case needs one empty/cons pair or one 0n/suc pair of alternatives",
            )),
        }
    }

    fn alt(&mut self) -> Result<Alt, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(w) if w == "empty" => {
                self.advance();
                self.expect(Tok::Arrow)?;
                Ok(Alt::Nil(self.term()?))
            }
            Tok::LBracket if *self.peek2() == Tok::RBracket => {
                self.advance();
                self.advance();
                self.expect(Tok::Arrow)?;
                Ok(Alt::Nil(self.term()?))
            }
            Tok::Nat(0) => {
                self.advance();
                self.expect(Tok::Arrow)?;
                Ok(Alt::Zero(self.term()?))
            }
            Tok::Ident(w) if w == "suc" => {
                self.advance();
                let m = self.ident()?;
                self.expect(Tok::Arrow)?;
                Ok(Alt::Succ(m, self.term()?))
            }
            Tok::Ident(h) => {
                self.advance();
                self.expect(Tok::Colon)?;
                let t = self.ident()?;
                if t == h {
                    return Err(ParseError::syntax(pos, format!("`{h}` bound twice in pattern")));
                }
                self.expect(Tok::Arrow)?;
                Ok(Alt::Cons(h, t, self.term()?))
            }
            other => Err(ParseError::syntax(
                pos,
                format!("expected a case alternative, found {other}"),
            )),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Const(_)
                | Tok::Nat(_)
                | Tok::Bang
                | Tok::LParen
                | Tok::LBracket
                | Tok::HashBracket
        )
    }

    fn app(&mut self) -> Result<Surface, ParseError> {
        if !self.starts_atom() {
            return Err(ParseError::syntax(
                self.pos(),
                format!("expected a term, found {}", self.peek()),
            ));
        }
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Surface::App(Box::new(t), Box::new(a));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Surface, ParseError> {
        let pos = self.pos();
        match self.advance() {
            Tok::Ident(s) => Ok(Surface::Var(s)),
            Tok::Const(c) => Ok(Surface::Const(c)),
            Tok::Nat(n) => Ok(Surface::Nat(n)),
            Tok::Bang => {
                if !self.starts_atom() {
                    return Err(ParseError::syntax(
                        self.pos(),
                        format!("expected a term after `!`, found {}", self.peek()),
                    ));
                }
                Ok(Surface::Bang(Box::new(self.atom()?)))
            }
            Tok::LParen => {
                let first = self.term()?;
                if *self.peek() == Tok::Comma {
                    let mut items = vec![first];
                    while *self.peek() == Tok::Comma {
                        self.advance();
                        items.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Surface::Tuple(items))
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(first)
                }
            }
            open @ (Tok::LBracket | Tok::HashBracket) => {
                let mut items = Vec::new();
                if *self.peek() != Tok::RBracket {
                    items.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.advance();
                        items.push(self.term()?);
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(if open == Tok::LBracket {
                    Surface::Tuple(items)
                } else {
                    Surface::ListValue(items)
                })
            }
            other => Err(ParseError::syntax(
                pos,
                format!("expected a term, found {other}"),
            )),
        }
    }
}

enum Alt {
    Nil(Surface),
    Cons(String, String, Surface),
    Zero(Surface),
    Succ(String, Surface),
}

/// Parses source text into the surface tree.
pub fn parse_surface(src: &str) -> Result<Surface, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0 };
    if *p.peek() == Tok::Eof {
        return Err(ParseError::syntax(p.pos(), "empty program"));
    }
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(ParseError::syntax(
            p.pos(),
            format!("unexpected {} after end of term", p.peek()),
        ));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_line_and_column() {
        let err = parse_surface("\\x.\n  (x").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 2, col: 5 });
    }

    #[test]
    fn unknown_uppercase_constant() {
        let err = parse_surface("Q 0").unwrap_err();
        assert!(matches!(err, ParseError::UnknownConstant { ref name, .. } if name == "Q"));
    }

    #[test]
    fn comments_are_skipped() {
        assert!(matches!(
            parse_surface("-- hadamard\nH 0 -- trailing").unwrap(),
            Surface::App(..)
        ));
    }

    #[test]
    fn placeholder_rejected() {
        assert!(parse_surface("φ").is_err());
    }

    #[test]
    fn bad_numerals() {
        assert!(parse_surface("2").is_err());
        assert!(parse_surface("2nx").is_err());
        assert!(matches!(parse_surface("12n").unwrap(), Surface::Nat(12)));
    }

    #[test]
    fn case_alternatives_in_either_order() {
        let a = parse_surface("case l of (h:t -> h, empty -> 0)").unwrap();
        assert!(matches!(a, Surface::CaseList { .. }));
        let b = parse_surface("case n of (suc m -> m, 0n -> 0n)").unwrap();
        assert!(matches!(b, Surface::CaseNat { .. }));
        assert!(parse_surface("case n of (suc m -> m, h:t -> t)").is_err());
    }
}
