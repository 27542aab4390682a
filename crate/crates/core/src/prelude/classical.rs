//! Classical (untyped, call-by-value) encodings and their embedding into λ_q.
//!
//! Classical terms use only linear-looking abstractions `\x.t` with no
//! linearity discipline. [`embed`] turns any such term into a well-formed λ_q
//! term by suspending every value and making every binder nonlinear:
//!
//! ```text
//! x*       = !x
//! (\x.t)*  = !(\!x.t*)
//! (t u)*   = ((\!z.z) t*) u*
//! ```

use crate::syntax::{parse_surface, Hint, Term, TermKind};

use super::sugar;

/// Classical numeral zero, `\x.\y.x (\w.w)`.
pub fn zero() -> Term {
    source("\\x.\\y.x (\\w.w)")
}

/// Classical successor, `\n.\x.\y.y n`.
pub fn suc() -> Term {
    source("\\n.\\x.\\y.y n")
}

/// The classical numeral value for `n`.
pub fn nat(n: u64) -> Term {
    let mut t = zero();
    for _ in 0..n {
        t = Term::lam(
            Hint::named("x"),
            Term::lam(
                Hint::named("y"),
                Term::app(Term::var(0), crate::syntax::shift(&t, 2, 0)),
            ),
        );
    }
    t
}

/// Reads a classical numeral value.
pub fn decode_nat(t: &Term) -> Option<u64> {
    let mut n = 0;
    let mut cur = t.clone();
    loop {
        if cur == zero() {
            return Some(n);
        }
        let TermKind::Lam(_, a) = cur.kind() else {
            return None;
        };
        let TermKind::Lam(_, body) = a.kind() else {
            return None;
        };
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

/// Classical addition by self-application: `add = t t` with
/// `t = \f.\m.\n. m (\z.n) (\k.(f f) k (suc n))`.
pub fn add() -> Term {
    let t = "(\\f.\\m.\\n. m (\\z.n) (\\k.f f k (suc n)))";
    source(&format!("{t} {t}"))
}

/// Parses a classical program, with `zero`, `suc` and `add` available by name.
pub fn source(src: &str) -> Term {
    let surface = parse_surface(src).unwrap_or_else(|e| panic!("classical source: {e}"));
    sugar::lower(&surface, &|n| match n {
        "zero" => Some(zero()),
        "suc" => Some(suc()),
        "add" => Some(add()),
        _ => None,
    })
}

/// The embedding of a classical term into λ_q.
///
/// Constants are treated like variables and suspended.
pub fn embed(t: &Term) -> Term {
    match t.kind() {
        TermKind::Var(_) | TermKind::Free(_) | TermKind::Const(_) | TermKind::Placeholder => {
            Term::bang(t.clone())
        }
        TermKind::Lam(h, b) | TermKind::BangLam(h, b) => {
            Term::bang(Term::bang_lam(h.clone(), embed(b)))
        }
        TermKind::Erased(b) => Term::bang(Term::erased(embed(b))),
        TermKind::App(f, a) => Term::app(
            Term::app(Term::bang_lam(Hint::named("z"), Term::var(0)), embed(f)),
            embed(a),
        ),
        TermKind::Bang(b) => Term::bang(embed(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearity::check_well_formed;

    #[test]
    fn numerals_round_trip() {
        for n in 0..10 {
            assert_eq!(decode_nat(&nat(n)), Some(n));
        }
    }

    #[test]
    fn embedding_is_well_formed() {
        for t in [add(), source("\\x.\\y.x"), source("(\\x.x x) (\\x.x x)")] {
            assert!(check_well_formed(&embed(&t)).is_ok());
        }
    }
}
