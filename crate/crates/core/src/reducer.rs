//! Register-only reduction: call-by-value steps on superpositions of bare
//! terms, with no history. This is the equational reading of the machine
//! and serves as its oracle.

use std::fmt;

use num_complex::Complex64;

use crate::linearity::check_well_formed;
use crate::machine::{self, Execution, MachineError, RuleTag};
use crate::prelude;
use crate::quantum_state::{Amplitude, GateSpec, RegisterState};
use crate::syntax::{
    bit_slots, is_parameterized_gate, is_value, substitute, Calculus, Constant, Dir, Path, Term,
    TermKind,
};

/// The rule a reduction step contracted with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Beta,
    BangBeta,
    Gate,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Beta => "beta",
            Rule::BangBeta => "!beta",
            Rule::Gate => "U",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Next(RegisterState, Rule),
    /// The register is a value.
    Normal,
    /// A non-value register with no applicable rule.
    Stuck,
}

enum Local {
    Value,
    Stuck,
    Next(Vec<(Term, Amplitude)>, Rule),
}

fn one(t: Term, rule: Rule) -> Local {
    Local::Next(vec![(t, Complex64::new(1.0, 0.0))], rule)
}

/// The gate an operator stands for.
fn gate(op: &Term) -> Option<GateSpec> {
    match op.kind() {
        TermKind::Const(Constant::CPhase) => None,
        TermKind::Const(c) => GateSpec::for_constant(*c),
        TermKind::App(_, n) if is_parameterized_gate(op) => {
            let TermKind::Bang(n) = n.kind() else {
                return None;
            };
            prelude::eval_nat(n).map(GateSpec::cphase)
        }
        _ => None,
    }
}

/// `U|b⟩` for the bits of `operand`, which must be a bit or a list value of
/// exactly `arity` bits.
fn apply_gate(g: &GateSpec, operand: &Term) -> Option<Vec<(Term, Amplitude)>> {
    let slots: Vec<Vec<Dir>> = match g.arity {
        1 => {
            operand.as_bit()?;
            vec![Vec::new()]
        }
        n => {
            let items = prelude::decode_list_value(operand)?;
            if items.len() != n || items.iter().any(|b| b.as_bit().is_none()) {
                return None;
            }
            let slots = bit_slots(operand);
            debug_assert_eq!(slots.len(), n);
            slots
        }
    };
    let column = slots
        .iter()
        .fold(0, |acc, s| (acc << 1) | operand.at(s).and_then(Term::as_bit).unwrap_or(0));
    let out = (0..g.matrix.nrows())
        .filter(|&row| g.matrix[(row, column)].norm() > 0.0)
        .map(|row| {
            let t = slots.iter().enumerate().fold(operand.clone(), |t, (k, s)| {
                let bit = (row >> (g.arity - 1 - k)) & 1;
                t.replace_at(s, |_| Term::bit(bit)).expect("slot exists")
            });
            (t, g.matrix[(row, column)])
        })
        .collect();
    Some(out)
}

fn step_term(t: &Term, calculus: Calculus) -> Local {
    let TermKind::App(f, a) = t.kind() else {
        return if is_value(t, calculus) { Local::Value } else { Local::Stuck };
    };
    let wrap = |inner: Local, rebuild: &dyn Fn(Term) -> Term| match inner {
        Local::Next(items, rule) => {
            Local::Next(items.into_iter().map(|(x, amp)| (rebuild(x), amp)).collect(), rule)
        }
        other => other,
    };
    if !is_value(f, calculus) {
        return wrap(step_term(f, calculus), &|x| Term::app(x, a.clone()));
    }
    if !is_value(a, calculus) {
        return wrap(step_term(a, calculus), &|x| Term::app(f.clone(), x));
    }
    if is_value(t, calculus) {
        return Local::Value;
    }
    match (f.kind(), a.kind()) {
        (TermKind::Lam(_, body), _) => one(substitute(body, a), Rule::Beta),
        (TermKind::BangLam(_, body), TermKind::Bang(inner)) => {
            one(substitute(body, inner), Rule::BangBeta)
        }
        _ => match gate(f).and_then(|g| apply_gate(&g, a)) {
            Some(items) => Local::Next(items, Rule::Gate),
            None => Local::Stuck,
        },
    }
}

/// One step on every branch. Branches are congruent, so they agree on
/// whether a rule applies.
pub fn reduce_step(state: &RegisterState, calculus: Calculus) -> Step {
    let mut out = Vec::new();
    let mut fired = None;
    for (t, amp) in state.branches() {
        match step_term(t, calculus) {
            Local::Value => return Step::Normal,
            Local::Stuck => return Step::Stuck,
            Local::Next(items, rule) => {
                fired = Some(rule);
                out.extend(items.into_iter().map(|(x, u)| (x, u * amp)));
            }
        }
    }
    match fired {
        Some(rule) => Step::Next(RegisterState::from_branches(out), rule),
        None => Step::Normal,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Normal(RegisterState),
    Stuck(RegisterState),
    Budget(RegisterState),
}

impl Outcome {
    pub fn state(&self) -> &RegisterState {
        match self {
            Outcome::Normal(s) | Outcome::Stuck(s) | Outcome::Budget(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub outcome: Outcome,
    pub steps: usize,
}

/// Reduces `state` until it is normal, stuck, or `max_steps` steps are used.
pub fn reduce(state: RegisterState, calculus: Calculus, max_steps: usize) -> Reduction {
    let mut state = state;
    for steps in 0..=max_steps {
        match reduce_step(&state, calculus) {
            Step::Normal => return Reduction { outcome: Outcome::Normal(state), steps },
            Step::Stuck => return Reduction { outcome: Outcome::Stuck(state), steps },
            Step::Next(next, _) if steps < max_steps => state = next,
            Step::Next(..) => break,
        }
    }
    Reduction {
        outcome: Outcome::Budget(state),
        steps: max_steps,
    }
}

/// Reduces `t` in λ_q.
pub fn reduce_to_normal(t: &Term, max_steps: usize) -> Outcome {
    reduce(RegisterState::single(t.clone()), Calculus::Quantum, max_steps).outcome
}

/// A term with one hole, not under a `!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermContext {
    term: Term,
    hole: Path,
}

impl TermContext {
    /// The context around the subterm of `t` at `hole`; `None` if the path
    /// does not exist or passes through a suspension.
    pub fn new(t: &Term, hole: Path) -> Option<TermContext> {
        if hole.dirs().contains(&Dir::Inner) {
            return None;
        }
        t.at(hole.dirs())?;
        Some(TermContext {
            term: t.clone(),
            hole,
        })
    }

    pub fn plug(&self, filler: &Term) -> Term {
        self.term
            .replace_at(self.hole.dirs(), |_| filler.clone())
            .expect("hole path checked on construction")
    }
}

/// Equality by joinability: both terms reduce to the same normal state.
pub fn joinable(a: &Term, b: &Term, max_steps: usize) -> bool {
    match (reduce_to_normal(a, max_steps), reduce_to_normal(b, max_steps)) {
        (Outcome::Normal(x), Outcome::Normal(y)) => x.approx_eq_up_to_phase(&y, 1e-9),
        _ => false,
    }
}

/// Where and why the machine and the reducer stopped agreeing.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    /// Machine step count (from 1) after which the states differ.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Agreement {
    pub status: machine::Status,
    pub steps: usize,
    pub divergence: Option<Divergence>,
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        self.divergence.is_none()
    }
}

/// Register tolerance for comparing the machine with the reducer.
pub const AGREEMENT_TOL: f64 = 1e-9;

/// Runs the λ_q machine and the reducer side by side, comparing the
/// machine's register marginal with the reducer state after every step.
pub fn agrees_with_machine(t: &Term, max_steps: usize) -> Result<Agreement, MachineError> {
    check_well_formed(t).map_err(MachineError::NotWellFormed)?;
    let mut exec = Execution::new(t, Calculus::Quantum)?;
    if max_steps == 0 {
        return Err(MachineError::InvalidBudget);
    }
    let mut reg = RegisterState::single(t.clone());
    let diverge = |step, reason: String| Divergence { step, reason };
    while exec.status().is_none() && exec.steps() < max_steps {
        let expected = reduce_step(&reg, Calculus::Quantum);
        let rule = exec.step()?;
        let n = exec.steps();
        let divergence = if rule.tag == RuleTag::Id {
            match (exec.status(), expected) {
                (Some(machine::Status::Halted), Step::Normal)
                | (Some(machine::Status::Stuck), Step::Stuck) => None,
                (status, step) => Some(diverge(
                    n,
                    format!("machine stopped as {status:?}, reducer gave {step:?}"),
                )),
            }
        } else {
            match expected {
                Step::Next(next, _) => {
                    reg = next;
                    match exec.state().factor_history() {
                        Err(e) => Some(diverge(n, e.to_string())),
                        Ok((_, marginal)) if !marginal.approx_eq_up_to_phase(&reg, AGREEMENT_TOL) => {
                            Some(diverge(n, format!("machine register\n{marginal}reducer\n{reg}")))
                        }
                        Ok(_) => None,
                    }
                }
                other => Some(diverge(n, format!("machine fired {rule}, reducer gave {other:?}"))),
            }
        };
        if divergence.is_some() {
            return Ok(Agreement {
                status: exec.status().unwrap_or(machine::Status::BudgetExceeded),
                steps: n,
                divergence,
            });
        }
    }
    Ok(Agreement {
        status: exec.status().unwrap_or(machine::Status::BudgetExceeded),
        steps: exec.steps(),
        divergence: None,
    })
}
