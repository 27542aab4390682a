//! Printing terms back to concrete syntax.
//!
//! Applications associate to the left and abstraction bodies extend as far
//! right as possible, so parentheses appear only around abstractions in
//! operator or operand position and around applications in operand position.
//! A suspension of a compound term prints as `!(…)`, e.g. `!(\x.x)`.
//!
//! Binder names come from the hints kept on the term, renamed with a numeric
//! suffix whenever a hint would clash with an enclosing binder or a free
//! name. Closed Church numerals print as `3n` and closed list values as
//! `#[a, b]`; both forms parse back to the same term.

use std::collections::HashSet;

use super::parse::{is_ident_continue, is_ident_start, KEYWORDS};
use super::term::{Constant, Term, TermKind};
use crate::prelude::{decode_list_value, decode_nat_value};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Fun,
    Arg,
}

struct Printer {
    free: HashSet<String>,
    scope: Vec<String>,
    out: String,
}

fn collect_free(t: &Term, out: &mut HashSet<String>) {
    if let TermKind::Free(name) = t.kind() {
        out.insert(name.to_string());
    }
    for (_, c) in t.children() {
        collect_free(c, out);
    }
}

fn usable_hint(hint: Option<&str>) -> Option<&str> {
    let name = hint?;
    let mut chars = name.chars();
    let first = chars.next()?;
    let ok = is_ident_start(first)
        && !first.is_ascii_uppercase()
        && name.chars().all(is_ident_continue)
        && !KEYWORDS.contains(&name)
        && Constant::from_symbol(name).is_none();
    ok.then_some(name)
}

impl Printer {
    fn fresh(&self, hint: Option<&str>) -> String {
        let base = usable_hint(hint).unwrap_or("x");
        let taken = |n: &str| self.scope.iter().any(|s| s == n) || self.free.contains(n);
        if !taken(base) {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|n| !taken(n))
            .expect("an unbounded counter always finds a fresh name")
    }

    fn binder(&mut self, lead: &str, hint: Option<&str>, body: &Term, ctx: Ctx) {
        let name = self.fresh(hint);
        let paren = ctx != Ctx::Top;
        if paren {
            self.out.push('(');
        }
        self.out.push_str(lead);
        self.out.push_str(&name);
        self.out.push('.');
        self.scope.push(name);
        self.term(body, Ctx::Top);
        self.scope.pop();
        if paren {
            self.out.push(')');
        }
    }

    fn term(&mut self, t: &Term, ctx: Ctx) {
        if t.is_closed() {
            if let Some(n) = decode_nat_value(t) {
                self.out.push_str(&format!("{n}n"));
                return;
            }
            if let Some(items) = decode_list_value(t) {
                if !items.is_empty() {
                    self.out.push_str("#[");
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            self.out.push_str(", ");
                        }
                        self.term(item, Ctx::Top);
                    }
                    self.out.push(']');
                    return;
                }
            }
        }
        match t.kind() {
            TermKind::Var(i) => {
                let depth = self.scope.len();
                match depth.checked_sub(*i as usize + 1) {
                    Some(k) => {
                        let name = self.scope[k].clone();
                        self.out.push_str(&name);
                    }
                    None => self.out.push_str(&format!("^{}", *i as usize - depth)),
                }
            }
            TermKind::Free(name) => self.out.push_str(name),
            TermKind::Const(c) => self.out.push_str(c.symbol()),
            TermKind::Placeholder => self.out.push('φ'),
            TermKind::Lam(h, b) => self.binder("\\", h.as_str(), b, ctx),
            TermKind::BangLam(h, b) => self.binder("\\!", h.as_str(), b, ctx),
            TermKind::Erased(b) => {
                let paren = ctx != Ctx::Top;
                if paren {
                    self.out.push('(');
                }
                self.out.push_str("φ.");
                self.scope.push("φ".to_string());
                self.term(b, Ctx::Top);
                self.scope.pop();
                if paren {
                    self.out.push(')');
                }
            }
            TermKind::App(f, a) => {
                let paren = ctx == Ctx::Arg;
                if paren {
                    self.out.push('(');
                }
                self.term(f, Ctx::Fun);
                self.out.push(' ');
                self.term(a, Ctx::Arg);
                if paren {
                    self.out.push(')');
                }
            }
            TermKind::Bang(b) => {
                self.out.push('!');
                self.term(b, Ctx::Arg);
            }
        }
    }
}

/// Renders `t` in concrete syntax.
pub fn pretty(t: &Term) -> String {
    let mut free = HashSet::new();
    collect_free(t, &mut free);
    let mut p = Printer {
        free,
        scope: Vec::new(),
        out: String::new(),
    };
    p.term(t, Ctx::Top);
    p.out
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&pretty(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Hint};

    #[test]
    fn identity() {
        assert_eq!(pretty(&Term::lam(Hint::none(), Term::var(0))), "\\x.x");
    }

    #[test]
    fn left_associated_application() {
        let t = Term::apps(Term::free("f"), [Term::free("g"), Term::free("h")]);
        assert_eq!(pretty(&t), "f g h");
        let r = Term::app(Term::free("f"), Term::app(Term::free("g"), Term::free("h")));
        assert_eq!(pretty(&r), "f (g h)");
    }

    #[test]
    fn suspended_abstraction_is_parenthesized() {
        let t = Term::bang(Term::lam(Hint::named("x"), Term::var(0)));
        assert_eq!(pretty(&t), "!(\\x.x)");
    }

    #[test]
    fn clashing_hints_are_renamed() {
        let t = Term::lam(
            Hint::named("x"),
            Term::lam(Hint::named("x"), Term::app(Term::var(1), Term::var(0))),
        );
        assert_eq!(pretty(&t), "\\x.\\x1.x x1");
        assert_eq!(parse(&pretty(&t)).unwrap(), t);
    }

    #[test]
    fn free_names_are_not_captured() {
        let t = Term::lam(Hint::named("y"), Term::app(Term::free("y"), Term::var(0)));
        assert_eq!(pretty(&t), "\\y1.y y1");
    }

    #[test]
    fn numerals_and_lists() {
        assert_eq!(pretty(&parse("3n").unwrap()), "3n");
        assert_eq!(pretty(&parse("#[0, 1]").unwrap()), "#[0, 1]");
    }

    #[test]
    fn history_syntax() {
        let frame = Term::app(
            Term::lam(
                Hint::named("f"),
                Term::erased(Term::app(Term::var(1), Term::placeholder())),
            ),
            Term::placeholder(),
        );
        assert_eq!(pretty(&frame), "(\\f.φ.f φ) φ");
    }
}
