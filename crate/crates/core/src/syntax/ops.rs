use super::term::{Constant, Dir, Term, TermKind};

/// Which calculus a term is interpreted in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Calculus {
    /// The intermediate calculus λ_i: no `!`, linear β may discard its argument.
    Intermediate,
    /// The quantum lambda calculus λ_q.
    Quantum,
}

impl Calculus {
    pub fn name(self) -> &'static str {
        match self {
            Calculus::Intermediate => "λ_i",
            Calculus::Quantum => "λ_q",
        }
    }
}

/// Adds `delta` to every de Bruijn index `>= cutoff`.
pub fn shift(t: &Term, delta: i64, cutoff: u32) -> Term {
    if delta == 0 || t.free_bound() <= cutoff {
        return t.clone();
    }
    match t.kind() {
        TermKind::Var(i) if *i >= cutoff => {
            let shifted = i64::from(*i) + delta;
            assert!(shifted >= 0, "shift produced a negative de Bruijn index");
            Term::var(shifted as u32)
        }
        TermKind::Lam(h, b) => Term::lam(h.clone(), shift(b, delta, cutoff + 1)),
        TermKind::BangLam(h, b) => Term::bang_lam(h.clone(), shift(b, delta, cutoff + 1)),
        TermKind::Erased(b) => Term::erased(shift(b, delta, cutoff + 1)),
        TermKind::App(f, a) => Term::app(shift(f, delta, cutoff), shift(a, delta, cutoff)),
        TermKind::Bang(b) => Term::bang(shift(b, delta, cutoff)),
        _ => t.clone(),
    }
}

/// `body[value/x]` where `x` is index 0 of `body` (the body of an abstraction).
/// Capture-avoiding: `value` is shifted under binders and the indices above the
/// instantiated one drop by one.
pub fn substitute(body: &Term, value: &Term) -> Term {
    fn go(t: &Term, value: &Term, depth: u32) -> Term {
        if t.free_bound() <= depth {
            return t.clone();
        }
        match t.kind() {
            TermKind::Var(i) if *i == depth => shift(value, i64::from(depth), 0),
            TermKind::Var(i) if *i > depth => Term::var(i - 1),
            TermKind::Lam(h, b) => Term::lam(h.clone(), go(b, value, depth + 1)),
            TermKind::BangLam(h, b) => Term::bang_lam(h.clone(), go(b, value, depth + 1)),
            TermKind::Erased(b) => Term::erased(go(b, value, depth + 1)),
            TermKind::App(f, a) => Term::app(go(f, value, depth), go(a, value, depth)),
            TermKind::Bang(b) => Term::bang(go(b, value, depth)),
            _ => t.clone(),
        }
    }
    go(body, value, 0)
}

/// Does de Bruijn index `index` (relative to `t`) occur free in `t`?
pub fn occurs(t: &Term, index: u32) -> bool {
    if t.free_bound() <= index {
        return false;
    }
    match t.kind() {
        TermKind::Var(i) => *i == index,
        TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b) => occurs(b, index + 1),
        TermKind::App(f, a) => occurs(f, index) || occurs(a, index),
        TermKind::Bang(b) => occurs(b, index),
        _ => false,
    }
}

/// Number of free occurrences of index `index` in `t`.
pub fn count_occurrences(t: &Term, index: u32) -> usize {
    if t.free_bound() <= index {
        return 0;
    }
    match t.kind() {
        TermKind::Var(i) => usize::from(*i == index),
        TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b) => {
            count_occurrences(b, index + 1)
        }
        TermKind::App(f, a) => count_occurrences(f, index) + count_occurrences(a, index),
        TermKind::Bang(b) => count_occurrences(b, index),
        _ => 0,
    }
}

/// Keeps only the skeleton of `t` leading to occurrences of the variable
/// `binder` (an index relative to `t`); every maximal subterm without it
/// becomes `φ`, and abstractions on the way become erased binders `φ.`.
///
/// Suspensions containing the variable keep their `!` so the skeleton still
/// lines up with the substituted term.
pub fn erase_keep(t: &Term, binder: u32) -> Term {
    fn go(t: &Term, x: u32) -> Option<Term> {
        if t.free_bound() <= x {
            return None;
        }
        match t.kind() {
            TermKind::Var(i) => (*i == x).then(|| t.clone()),
            TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b) => {
                go(b, x + 1).map(Term::erased)
            }
            TermKind::App(f, a) => {
                let ef = go(f, x);
                let ea = go(a, x);
                if ef.is_none() && ea.is_none() {
                    return None;
                }
                Some(Term::app(
                    ef.unwrap_or_else(Term::placeholder),
                    ea.unwrap_or_else(Term::placeholder),
                ))
            }
            TermKind::Bang(b) => go(b, x).map(Term::bang),
            _ => None,
        }
    }
    go(t, binder).unwrap_or_else(Term::placeholder)
}

/// Same shape, differing at most at bit-constant leaves.
pub fn congruent(a: &Term, b: &Term) -> bool {
    if a.ptr_eq(b) {
        return true;
    }
    if a.size() != b.size() {
        return false;
    }
    match (a.kind(), b.kind()) {
        (TermKind::Const(x), TermKind::Const(y)) => x == y || (x.is_bit() && y.is_bit()),
        (TermKind::Lam(_, x), TermKind::Lam(_, y))
        | (TermKind::BangLam(_, x), TermKind::BangLam(_, y))
        | (TermKind::Erased(x), TermKind::Erased(y))
        | (TermKind::Bang(x), TermKind::Bang(y)) => congruent(x, y),
        (TermKind::App(f1, a1), TermKind::App(f2, a2)) => congruent(f1, f2) && congruent(a1, a2),
        (x, y) => x == y,
    }
}

/// Value grammar of the selected calculus.
///
/// A conditional-phase constant already applied to its numeral suspension,
/// `(cphase !n)`, counts as a value in both calculi: it is the gate symbol
/// waiting for its qubit pair.
pub fn is_value(t: &Term, calculus: Calculus) -> bool {
    match t.kind() {
        TermKind::Var(_)
        | TermKind::Free(_)
        | TermKind::Const(_)
        | TermKind::Lam(..)
        | TermKind::BangLam(..) => true,
        TermKind::Bang(_) => calculus == Calculus::Quantum,
        TermKind::App(..) => is_parameterized_gate(t),
        TermKind::Erased(_) | TermKind::Placeholder => false,
    }
}

/// `(cphase !n)`.
pub fn is_parameterized_gate(t: &Term) -> bool {
    match t.kind() {
        TermKind::App(f, a) => {
            matches!(f.kind(), TermKind::Const(Constant::CPhase))
                && matches!(a.kind(), TermKind::Bang(_))
        }
        _ => false,
    }
}

/// Paths to every bit constant in `t`, in left-to-right order.
pub fn bit_slots(t: &Term) -> Vec<Vec<Dir>> {
    fn go(t: &Term, path: &mut Vec<Dir>, out: &mut Vec<Vec<Dir>>) {
        if t.as_bit().is_some() {
            out.push(path.clone());
            return;
        }
        for (d, c) in t.children() {
            path.push(d);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// True if `t` contains a `!` suspension or a nonlinear abstraction.
pub fn uses_bang(t: &Term) -> bool {
    match t.kind() {
        TermKind::Bang(_) | TermKind::BangLam(..) => true,
        _ => t.children().into_iter().any(|(_, c)| uses_bang(c)),
    }
}

/// True if `t` contains `φ` or an erased binder (history-only syntax).
pub fn has_placeholder(t: &Term) -> bool {
    match t.kind() {
        TermKind::Placeholder | TermKind::Erased(_) => true,
        _ => t.children().into_iter().any(|(_, c)| has_placeholder(c)),
    }
}

/// True if `t` contains a gate or bit constant.
pub fn has_quantum_constants(t: &Term) -> bool {
    match t.kind() {
        TermKind::Const(_) => true,
        _ => t.children().into_iter().any(|(_, c)| has_quantum_constants(c)),
    }
}
