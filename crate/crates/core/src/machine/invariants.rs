//! Per-step checks of the properties every reachable machine state has:
//! unit norm, congruence, well-formedness, definite suspensions, a shared
//! history in λ_q, and exact reversibility.

use thiserror::Error;

use crate::linearity::check_well_formed;
use crate::quantum_state::{CongruenceViolation, History, Superposition};
use crate::syntax::{Calculus, Dir, Path, Term, TermKind};

use super::{step_backward, Execution, MachineError, RuleTag, Status, StepRule};

/// Largest amplitude error tolerated when undoing a step.
pub const REVERSE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum InvariantError {
    #[error("norm changed by {drift:e} in one step")]
    Norm { drift: f64 },
    #[error(transparent)]
    Congruence(#[from] CongruenceViolation),
    #[error("register is not well formed: {0}")]
    NotWellFormed(String),
    #[error("suspension at {0} differs between branches")]
    SuspensionNotDefinite(Path),
    #[error("branches do not share one history")]
    HistoryNotDefinite,
    #[error("undoing `{rule}` failed: {reason}")]
    Irreversible { rule: String, reason: String },
    #[error("halting read from the history disagrees with the register")]
    Unobservable,
}

/// Paths of the outermost `!` subterms of `t`.
pub fn suspension_paths(t: &Term) -> Vec<Path> {
    fn go(t: &Term, path: &mut Vec<Dir>, out: &mut Vec<Path>) {
        match t.kind() {
            TermKind::Bang(_) => out.push(Path(path.clone())),
            _ => {
                for (d, c) in t.children() {
                    path.push(d);
                    go(c, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Every `!` subterm of the shared register shape is the same term in all
/// branches.
pub fn suspensions_definite(psi: &Superposition) -> Result<(), InvariantError> {
    let Some(first) = psi.first_register() else {
        return Ok(());
    };
    for path in suspension_paths(first) {
        let expected = first.at(path.dirs());
        if psi.branches().any(|(c, _)| c.register.at(path.dirs()) != expected) {
            return Err(InvariantError::SuspensionNotDefinite(path));
        }
    }
    Ok(())
}

/// The history shared by every branch.
pub fn definite_history(psi: &Superposition) -> Result<History, InvariantError> {
    psi.factor_history()
        .map(|(h, _)| h)
        .map_err(|_| InvariantError::HistoryNotDefinite)
}

/// The machine has fired `Id`, read off the last history frame alone.
pub fn stopped_by_history(history: &History) -> bool {
    history.last().is_some_and(Term::is_placeholder)
}

/// Checks the state a step produced, including that undoing the step gives
/// back `before` exactly.
pub fn check_step(
    before: &Superposition,
    rule: &StepRule,
    after: &Superposition,
    calculus: Calculus,
) -> Result<(), InvariantError> {
    let drift = (after.norm() - before.norm()).abs();
    if drift > 1e-12 {
        return Err(InvariantError::Norm { drift });
    }
    after.check_congruence()?;
    suspensions_definite(after)?;
    if calculus == Calculus::Quantum {
        // congruent registers differ only in bits, so one check covers all
        if let Some(r) = after.first_register() {
            check_well_formed(r).map_err(|vs| {
                InvariantError::NotWellFormed(vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))
            })?;
        }
        definite_history(after)?;
    }
    let back = step_backward(after, rule, calculus).map_err(|e| InvariantError::Irreversible {
        rule: rule.to_string(),
        reason: e.to_string(),
    })?;
    if !back.approx_eq(before, REVERSE_TOL) {
        return Err(InvariantError::Irreversible {
            rule: rule.to_string(),
            reason: "restored state differs".into(),
        });
    }
    Ok(())
}

/// Outcome of a fully checked run.
#[derive(Clone, Debug)]
pub struct Audit {
    pub status: Status,
    pub steps: usize,
    pub final_state: Superposition,
    /// Largest norm change in a single step.
    pub max_step_drift: f64,
    /// `|‖ψ_final‖² − 1|`.
    pub total_drift: f64,
    /// First failed check, with the step number (from 1) it happened at.
    pub failure: Option<(usize, InvariantError)>,
}

impl Audit {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Runs `t` checking every invariant after every step.
pub fn audit_run(t: &Term, calculus: Calculus, max_steps: usize) -> Result<Audit, MachineError> {
    let mut max_step_drift = 0f64;
    let mut failure = None;
    let mut n = 0;
    let result = Execution::new(t, calculus)?.run_observed(max_steps, |before, rule, after| {
        n += 1;
        max_step_drift = max_step_drift.max((after.norm() - before.norm()).abs());
        if failure.is_none() {
            if let Err(e) = check_step(before, rule, after, calculus) {
                failure = Some((n, e));
            }
        }
        if rule.tag == RuleTag::Id && failure.is_none() && calculus == Calculus::Quantum {
            let halted_by_history = after.factor_history().is_ok_and(|(h, _)| stopped_by_history(&h));
            if !halted_by_history {
                failure = Some((n, InvariantError::Unobservable));
            }
        }
    })?;
    Ok(Audit {
        status: result.status,
        steps: result.steps,
        total_drift: (result.state.norm() - 1.0).abs(),
        final_state: result.state,
        max_step_drift,
        failure,
    })
}
