//! Standard definitions: Church numerals and linear lists, recursion, list
//! combinators, and the names programs can use without defining them.
//!
//! The encodings use nonlinear selectors so that a numeral or list can throw
//! away the branch it does not take:
//!
//! ```text
//! empty = 0n = \!x.\!y.x !id
//! cons       = \h.\t.\!x.\!y.y h t
//! suc        = \n.\!x.\!y.y n
//! ```
//!
//! `empty` passes `!id` (a suspension) to its first selector because the case
//! branches are nonlinear abstractions `\!z.…`, which only accept
//! suspensions.

pub mod classical;
pub mod sugar;

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::reducer;
use crate::syntax::{parse_surface, shift, Hint, Term, TermKind};

fn lam(name: &str, body: Term) -> Term {
    Term::lam(Hint::named(name), body)
}

fn bang_lam(name: &str, body: Term) -> Term {
    Term::bang_lam(Hint::named(name), body)
}

/// `\x.x`
pub fn id() -> Term {
    lam("x", Term::var(0))
}

/// The empty list, which is also the numeral zero.
pub fn empty() -> Term {
    bang_lam(
        "x",
        bang_lam("y", Term::app(Term::var(1), Term::bang(id()))),
    )
}

pub fn zero() -> Term {
    empty()
}

pub fn cons() -> Term {
    lam(
        "h",
        lam(
            "t",
            bang_lam(
                "x",
                bang_lam(
                    "y",
                    Term::apps(Term::var(0), [Term::var(3), Term::var(2)]),
                ),
            ),
        ),
    )
}

pub fn suc() -> Term {
    lam(
        "n",
        bang_lam("x", bang_lam("y", Term::app(Term::var(0), Term::var(2)))),
    )
}

/// The value of `suc` applied to the value `n` (which must be closed).
fn suc_value(n: Term) -> Term {
    bang_lam("x", bang_lam("y", Term::app(Term::var(0), shift(&n, 2, 0))))
}

/// The Church numeral value for `n`.
pub fn church_nat(n: u64) -> Term {
    (0..n).fold(zero(), |acc, _| suc_value(acc))
}

/// The list value holding `items`, as `cons` would build it.
pub fn list_value(items: &[Term]) -> Term {
    items.iter().rev().fold(empty(), |tail, h| {
        bang_lam(
            "x",
            bang_lam(
                "y",
                Term::apps(Term::var(0), [shift(h, 2, 0), shift(&tail, 2, 0)]),
            ),
        )
    })
}

/// `[a, b, …]` as an unevaluated chain of `cons` applications.
pub fn tuple(items: &[Term]) -> Term {
    items
        .iter()
        .rev()
        .fold(empty(), |tail, h| Term::apps(cons(), [h.clone(), tail]))
}

fn selector_body(t: &Term) -> Option<&Term> {
    match t.kind() {
        TermKind::BangLam(_, inner) => match inner.kind() {
            TermKind::BangLam(_, body) => Some(body),
            _ => None,
        },
        _ => None,
    }
}

fn is_empty_value(t: &Term) -> bool {
    let Some(body) = selector_body(t) else {
        return false;
    };
    let TermKind::App(f, a) = body.kind() else {
        return false;
    };
    matches!(f.kind(), TermKind::Var(1))
        && matches!(a.kind(), TermKind::Bang(i) if matches!(i.kind(), TermKind::Lam(_, b) if matches!(b.kind(), TermKind::Var(0))))
}

/// Reads a numeral value without evaluating anything.
pub fn decode_nat_value(t: &Term) -> Option<u64> {
    let mut n = 0;
    let mut cur = t.clone();
    loop {
        if is_empty_value(&cur) {
            return Some(n);
        }
        let body = selector_body(&cur)?;
        let TermKind::App(f, inner) = body.kind() else {
            return None;
        };
        if !matches!(f.kind(), TermKind::Var(0)) || !inner.is_closed() {
            return None;
        }
        n += 1;
        cur = inner.clone();
    }
}

/// Reads a list value into its elements without evaluating anything.
pub fn decode_list_value(t: &Term) -> Option<Vec<Term>> {
    let mut items = Vec::new();
    let mut cur = t.clone();
    loop {
        if is_empty_value(&cur) {
            return Some(items);
        }
        let body = selector_body(&cur)?;
        let TermKind::App(fh, tail) = body.kind() else {
            return None;
        };
        let TermKind::App(f, h) = fh.kind() else {
            return None;
        };
        if !matches!(f.kind(), TermKind::Var(0)) {
            return None;
        }
        let local = |x: &Term| !crate::syntax::occurs(x, 0) && !crate::syntax::occurs(x, 1);
        if !local(h) || !local(tail) {
            return None;
        }
        items.push(shift(h, -2, 0));
        cur = shift(tail, -2, 0);
    }
}

/// Evaluates a closed, gate-free term to a numeral and reads it off.
pub fn eval_nat(t: &Term) -> Option<u64> {
    if let Some(n) = decode_nat_value(t) {
        return Some(n);
    }
    match reducer::reduce_to_normal(t, 10_000) {
        reducer::Outcome::Normal(state) if state.len() == 1 => {
            decode_nat_value(state.branches().next()?.0)
        }
        _ => None,
    }
}

/// `fix = (\!u.\!f.f !(u !u !f)) !(\!u.\!f.f !(u !u !f))`; `fix !t` reduces to
/// `t !(fix !t)`.
pub const FIX: &str = "(\\!u.\\!f.f !(u !u !f)) !(\\!u.\\!f.f !(u !u !f))";

/// Source of the naive `append`, which uses `y` inside both case branches and
/// is therefore not well formed. Not part of the prelude.
pub const APPEND_NAIVE: &str =
    "fix !(\\!app.\\x.\\y. case x of (empty -> y, h:t -> h : app t y))";

pub(crate) enum Def {
    Built(fn() -> Term),
    Source(&'static str),
}

const DEFINITIONS: &[(&str, Def)] = &[
    ("id", Def::Built(id)),
    ("apply", Def::Source("\\f.\\x.f x")),
    ("empty", Def::Built(empty)),
    ("zero", Def::Built(zero)),
    ("cons", Def::Built(cons)),
    ("suc", Def::Built(suc)),
    ("pred", Def::Source("\\n. case n of (0n -> 0n, suc m -> m)")),
    ("fix", Def::Source(FIX)),
    (
        "add",
        Def::Source(
            "fix !(\\!add.\\m.\\n. (case m of (0n -> \\u.u, suc k -> \\u. add k (suc u))) n)",
        ),
    ),
    // Self-application instead of fix: add = t !t.
    (
        "add_rec",
        Def::Source(
            "(\\!f.\\m.\\n. (case m of (0n -> \\u.u, suc k -> \\u. f !f k (suc u))) n) \
             !(\\!f.\\m.\\n. (case m of (0n -> \\u.u, suc k -> \\u. f !f k (suc u))) n)",
        ),
    ),
    ("double", Def::Source("\\!x. add x x")),
    (
        "map",
        Def::Source("fix !(\\!map.\\!f.\\list. case list of (empty -> empty, h:t -> f h : map !f t))"),
    ),
    // The case returns a function of y, so y is used once outside the branches.
    (
        "append",
        Def::Source("fix !(\\!app.\\x.\\y. (case x of (empty -> \\u.u, h:t -> \\u. h : app t u)) y)"),
    ),
    (
        "reverse",
        Def::Source(
            "fix !(\\!rev.\\list. case list of (empty -> empty, h:t -> append (rev t) [h]))",
        ),
    ),
];

struct Registry {
    order: Vec<&'static str>,
    terms: HashMap<&'static str, Term>,
}

fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg = Registry {
            order: Vec::new(),
            terms: HashMap::new(),
        };
        for (name, def) in DEFINITIONS.iter().chain(crate::algorithms::DEFINITIONS) {
            let term = match def {
                Def::Built(f) => f(),
                Def::Source(src) => {
                    let surface = parse_surface(src)
                        .unwrap_or_else(|e| panic!("prelude definition `{name}`: {e}"));
                    sugar::lower(&surface, &|n| reg.terms.get(n).cloned())
                }
            };
            reg.order.push(name);
            reg.terms.insert(name, term);
        }
        reg
    })
}

/// The prelude definition named `name`.
pub fn lookup(name: &str) -> Option<Term> {
    registry().terms.get(name).cloned()
}

/// Like [`lookup`], panicking on unknown names.
pub fn get(name: &str) -> Term {
    lookup(name).unwrap_or_else(|| panic!("`{name}` is not defined in the prelude"))
}

/// All prelude names in definition order.
pub fn names() -> Vec<&'static str> {
    registry().order.clone()
}

pub fn pred() -> Term {
    get("pred")
}

pub fn add() -> Term {
    get("add")
}

/// Addition by self-application `t !t`, without `fix`.
pub fn add_rec() -> Term {
    get("add_rec")
}

pub fn fix() -> Term {
    get("fix")
}

pub fn map() -> Term {
    get("map")
}

pub fn append() -> Term {
    get("append")
}

/// The naive `append`; rejected by the linearity checker.
pub fn append_naive() -> Term {
    crate::syntax::parse(APPEND_NAIVE).expect("naive append parses")
}

pub fn reverse() -> Term {
    get("reverse")
}

pub fn double() -> Term {
    get("double")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearity::check_well_formed;

    #[test]
    fn every_definition_is_well_formed() {
        for name in names() {
            let t = get(name);
            assert!(t.is_closed(), "{name}");
            assert!(check_well_formed(&t).is_ok(), "{name}: {t}");
        }
    }

    #[test]
    fn numeral_values_decode() {
        for n in 0..=32 {
            assert_eq!(decode_nat_value(&church_nat(n)), Some(n));
        }
        assert_eq!(decode_nat_value(&id()), None);
    }

    #[test]
    fn list_values_decode() {
        let items = vec![Term::bit(1), Term::bit(0), church_nat(2)];
        assert_eq!(decode_list_value(&list_value(&items)), Some(items));
        assert_eq!(decode_list_value(&empty()), Some(Vec::new()));
    }

    #[test]
    fn naive_append_is_rejected() {
        assert!(check_well_formed(&append_naive()).is_err());
    }

    #[test]
    fn eval_nat_normalizes() {
        let t = Term::app(suc(), Term::app(suc(), church_nat(3)));
        assert_eq!(eval_nat(&t), Some(5));
    }
}
