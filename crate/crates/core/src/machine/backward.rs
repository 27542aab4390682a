//! Undoing a machine step from the frame it left in the history.

use crate::quantum_state::{BitSlot, Configuration, GateSpec, Superposition};
use crate::syntax::{Calculus, Dir, Term, TermKind};

use super::{operand_slots, MachineError, RuleTag, StepRule};

fn malformed(msg: impl Into<String>) -> MachineError {
    MachineError::MalformedHistory(msg.into())
}

/// Peels the application contexts recorded around the redex frame.
fn unwrap_frame<'a>(frame: &'a Term, path: &[Dir]) -> Result<&'a Term, MachineError> {
    let mut t = frame;
    for d in path {
        let TermKind::App(f, a) = t.kind() else {
            return Err(malformed(format!("expected a context frame, found {frame}")));
        };
        t = match d {
            Dir::Fun if a.is_placeholder() => f,
            Dir::Arg if f.is_placeholder() => a,
            _ => return Err(malformed(format!("frame {frame} does not lead to {d:?}"))),
        };
    }
    Ok(t)
}

/// `Some(t)` with every free index lowered by `depth`, if none is below it.
fn unshift(t: &Term, depth: u32) -> Option<Term> {
    fn below(t: &Term, depth: u32, binders: u32) -> bool {
        if t.free_bound() <= binders {
            return false;
        }
        match t.kind() {
            TermKind::Var(i) => *i >= binders && *i < binders + depth,
            TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b) => {
                below(b, depth, binders + 1)
            }
            TermKind::App(f, a) => below(f, depth, binders) || below(a, depth, binders),
            TermKind::Bang(b) => below(b, depth, binders),
            _ => false,
        }
    }
    if below(t, depth, 0) {
        return None;
    }
    Some(crate::syntax::shift(t, -i64::from(depth), 0))
}

/// Rebuilds the abstraction body `E` and the substituted value `v` from the
/// skeleton `Ē_x` and the current subterm `E[v/x]`.
fn unsubstitute(
    skel: &Term,
    current: &Term,
    depth: u32,
    value: &mut Option<Term>,
) -> Result<Term, MachineError> {
    match skel.kind() {
        TermKind::Placeholder => Ok(crate::syntax::shift(current, 1, depth)),
        TermKind::Var(i) if *i == depth => {
            let v = unshift(current, depth)
                .ok_or_else(|| malformed("substituted value refers to inner binders"))?;
            match value {
                Some(seen) if *seen != v => {
                    return Err(malformed("occurrences of the bound variable disagree"))
                }
                Some(_) => {}
                None => *value = Some(v),
            }
            Ok(Term::var(depth))
        }
        TermKind::Erased(sk) => match current.kind() {
            TermKind::Lam(h, c) => Ok(Term::lam(h.clone(), unsubstitute(sk, c, depth + 1, value)?)),
            TermKind::BangLam(h, c) => {
                Ok(Term::bang_lam(h.clone(), unsubstitute(sk, c, depth + 1, value)?))
            }
            _ => Err(malformed(format!("expected an abstraction, found {current}"))),
        },
        TermKind::App(s1, s2) => match current.kind() {
            TermKind::App(c1, c2) => Ok(Term::app(
                unsubstitute(s1, c1, depth, value)?,
                unsubstitute(s2, c2, depth, value)?,
            )),
            _ => Err(malformed(format!("expected an application, found {current}"))),
        },
        TermKind::Bang(sk) => match current.kind() {
            TermKind::Bang(c) => Ok(Term::bang(unsubstitute(sk, c, depth, value)?)),
            _ => Err(malformed(format!("expected a suspension, found {current}"))),
        },
        _ => Err(malformed(format!("unexpected skeleton node {skel}"))),
    }
}

/// The redex a frame and the current redex contents came from.
fn restore(frame: &Term, current: &Term, rule: &StepRule) -> Result<Term, MachineError> {
    let TermKind::App(f, a) = frame.kind() else {
        return Err(malformed(format!("expected a redex frame, found {frame}")));
    };
    let lifted = || crate::syntax::shift(current, 1, 0);
    match (rule.tag, f.kind()) {
        (RuleTag::Beta1, TermKind::Lam(h, skel)) if a.is_placeholder() => {
            let mut v = None;
            let body = unsubstitute(skel, current, 0, &mut v)?;
            let v = v.ok_or_else(|| malformed("bound variable does not occur"))?;
            Ok(Term::app(Term::lam(h.clone(), body), v))
        }
        (RuleTag::Beta2, TermKind::Lam(h, b)) if b.is_placeholder() => {
            Ok(Term::app(Term::lam(h.clone(), lifted()), a.clone()))
        }
        (RuleTag::BangBeta1, TermKind::BangLam(h, skel)) if a.is_placeholder() => {
            let mut v = None;
            let body = unsubstitute(skel, current, 0, &mut v)?;
            let v = v.ok_or_else(|| malformed("bound variable does not occur"))?;
            Ok(Term::app(Term::bang_lam(h.clone(), body), Term::bang(v)))
        }
        (RuleTag::BangBeta2, TermKind::BangLam(h, b))
            if b.is_placeholder() && matches!(a.kind(), TermKind::Bang(_)) =>
        {
            Ok(Term::app(Term::bang_lam(h.clone(), lifted()), a.clone()))
        }
        (RuleTag::Gate, _) if a.is_placeholder() => Ok(Term::app(f.clone(), current.clone())),
        _ => Err(malformed(format!("frame {frame} does not match {}", rule.tag.name()))),
    }
}

/// Inverts the step `rule` that produced `psi`.
pub fn step_backward(
    psi: &Superposition,
    rule: &StepRule,
    calculus: Calculus,
) -> Result<Superposition, MachineError> {
    if calculus == Calculus::Quantum && rule.tag == RuleTag::Beta2 {
        return Err(MachineError::IllFormedRegister(rule.path.clone()));
    }
    let dirs = rule.path.dirs();
    let state = match rule.gate {
        Some(g) => {
            let spec = GateSpec::from_id(g).expect("gate ids name unitaries");
            let operand = psi
                .first_register()
                .and_then(|r| r.at(dirs))
                .ok_or(MachineError::EmptyState)?;
            let slots: Vec<BitSlot> = operand_slots(operand, spec.arity)
                .ok_or_else(|| malformed(format!("{operand} is not a gate operand")))?
                .into_iter()
                .map(|s| dirs.iter().chain(&s).copied().collect())
                .collect();
            psi.apply_unitary(&slots, &spec.adjoint())?
        }
        None => psi.clone(),
    };
    let mut out = Vec::with_capacity(state.len());
    for (c, amp) in state.branches() {
        let (frame, prev) = c
            .history
            .pop()
            .ok_or_else(|| malformed("history is empty"))?;
        let register = if rule.tag == RuleTag::Id {
            if !frame.is_placeholder() {
                return Err(malformed(format!("expected φ, found {frame}")));
            }
            c.register.clone()
        } else {
            let inner = unwrap_frame(frame, dirs)?;
            let current = c
                .register
                .at(dirs)
                .ok_or_else(|| malformed(format!("no subterm at {}", rule.path)))?;
            let redex = restore(inner, current, rule)?;
            c.register.replace_at(dirs, |_| redex).expect("path was just followed")
        };
        out.push((Configuration::new(prev.clone(), register), *amp));
    }
    Ok(Superposition::from_branches(out))
}
