//! The reversible machine: superpositions of history-track configurations
//! evolving by call-by-value rules that record just enough in the history to
//! undo every step.
//!
//! Each step picks one redex position from the shared shape of the registers
//! and rewrites every branch there. The recorded frame keeps the path to the
//! redex as nested applications with `φ` on the untouched side: a step inside
//! the operator records `(h φ)`, one inside the operand records `(φ h)`.

mod backward;
pub mod invariants;

use std::fmt;

use thiserror::Error;

use crate::linearity::{check_well_formed, Violation};
use crate::prelude;
use crate::quantum_state::{BitSlot, Configuration, GateId, GateSpec, History, StateError, Superposition};
use crate::syntax::{
    erase_keep, has_placeholder, is_parameterized_gate, is_value, occurs, shift, substitute,
    uses_bang, Calculus, Constant, Dir, Path, Term, TermKind,
};

pub use backward::step_backward;

/// Default step budget.
pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// The rule fired at the redex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleTag {
    App1,
    App2,
    Beta1,
    Beta2,
    BangBeta1,
    BangBeta2,
    Gate,
    Id,
}

impl RuleTag {
    pub fn name(self) -> &'static str {
        match self {
            RuleTag::App1 => "app1",
            RuleTag::App2 => "app2",
            RuleTag::Beta1 => "beta1",
            RuleTag::Beta2 => "beta2",
            RuleTag::BangBeta1 => "!beta1",
            RuleTag::BangBeta2 => "!beta2",
            RuleTag::Gate => "U",
            RuleTag::Id => "Id",
        }
    }
}

/// A step: the rule applied at the redex, where the redex sits, and the gate
/// for gate steps.
///
/// A redex below the root is reached through the congruence rules; the
/// first direction of the path says which one (`app1` for the operator,
/// `app2` for the operand).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepRule {
    pub tag: RuleTag,
    pub path: Path,
    pub gate: Option<GateId>,
}

impl StepRule {
    fn at(tag: RuleTag, path: Path) -> Self {
        StepRule {
            tag,
            path,
            gate: None,
        }
    }

    pub fn id() -> Self {
        StepRule::at(RuleTag::Id, Path::root())
    }

    /// The outermost rule: `app1`/`app2` when the redex is below the root.
    pub fn outer_tag(&self) -> RuleTag {
        match self.path.dirs().first() {
            Some(Dir::Fun) => RuleTag::App1,
            Some(Dir::Arg) => RuleTag::App2,
            _ => self.tag,
        }
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gate {
            Some(g) => write!(f, "U[{g}] at {}", self.path),
            None => write!(f, "{} at {}", self.tag.name(), self.path),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MachineError {
    #[error("program is not well formed:\n{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
    NotWellFormed(Vec<Violation>),
    #[error("`!` and `\\!` are not part of λ_i")]
    UnsupportedInCalculus,
    #[error("program contains history-only syntax (φ)")]
    Placeholder,
    #[error("the step budget must be at least 1")]
    InvalidBudget,
    #[error("register is not well formed for λ_q: linear abstraction discards its argument at {0}")]
    IllFormedRegister(Path),
    #[error("superposition is empty")]
    EmptyState,
    #[error("history does not match the rule being undone: {0}")]
    MalformedHistory(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Bit slots of a gate operand, relative to the operand: the bit itself for
/// one-bit gates, the two head bits of a two-element list for two-bit gates.
pub fn operand_slots(operand: &Term, arity: usize) -> Option<Vec<BitSlot>> {
    match arity {
        1 => operand.as_bit().map(|_| vec![Vec::new()]),
        2 => {
            let (h1, rest) = list_cell(operand)?;
            let (h2, nil) = list_cell(rest)?;
            if h1.as_bit().is_none() || h2.as_bit().is_none() || !is_nil(nil) {
                return None;
            }
            let head = [Dir::Body, Dir::Body, Dir::Fun, Dir::Arg];
            let tail = [Dir::Body, Dir::Body, Dir::Arg];
            let second: Vec<Dir> = tail.iter().chain(&head).copied().collect();
            Some(vec![head.to_vec(), second])
        }
        _ => None,
    }
}

fn selector_body(t: &Term) -> Option<&Term> {
    let inner = match t.kind() {
        TermKind::Lam(_, b) | TermKind::BangLam(_, b) => b,
        _ => return None,
    };
    match inner.kind() {
        TermKind::Lam(_, b) | TermKind::BangLam(_, b) => Some(b),
        _ => None,
    }
}

/// `\x.\y.y h t` (either kind of binder) split into head and tail.
fn list_cell(t: &Term) -> Option<(&Term, &Term)> {
    let TermKind::App(yh, tail) = selector_body(t)?.kind() else {
        return None;
    };
    let TermKind::App(y, head) = yh.kind() else {
        return None;
    };
    matches!(y.kind(), TermKind::Var(0)).then_some((head, tail))
}

/// `\x.\y.x v` (either kind of binder).
fn is_nil(t: &Term) -> bool {
    matches!(selector_body(t).map(Term::kind), Some(TermKind::App(x, _)) if matches!(x.kind(), TermKind::Var(1)))
}

/// The gate an operator denotes, if it is one: a gate constant, or
/// `(cphase !n)` whose numeral evaluates.
pub fn gate_of(op: &Term) -> Option<GateId> {
    match op.kind() {
        TermKind::Const(c) if c.is_gate() && *c != Constant::CPhase => Some(GateId::Const(*c)),
        TermKind::App(_, a) if is_parameterized_gate(op) => {
            let TermKind::Bang(n) = a.kind() else {
                return None;
            };
            prelude::eval_nat(n).map(GateId::CPhase)
        }
        _ => None,
    }
}

fn gate_spec(id: GateId) -> GateSpec {
    GateSpec::from_id(id).expect("gate ids name unitaries")
}

/// Finds the next redex of `shape`: the leftmost non-value operand position
/// in call-by-value order, operator before operand. Returns `Id` for values
/// and for applications no rule covers.
pub fn select_redex(shape: &Term, calculus: Calculus) -> StepRule {
    let mut path = Vec::new();
    let mut t = shape;
    loop {
        let TermKind::App(f, a) = t.kind() else {
            return StepRule::id();
        };
        if !is_value(f, calculus) {
            path.push(Dir::Fun);
            t = f;
            continue;
        }
        if !is_value(a, calculus) {
            path.push(Dir::Arg);
            t = a;
            continue;
        }
        if is_value(t, calculus) {
            // (cphase !n) waiting for its operand
            return StepRule::id();
        }
        let here = Path(path);
        return match f.kind() {
            TermKind::Lam(_, body) => {
                if occurs(body, 0) {
                    StepRule::at(RuleTag::Beta1, here)
                } else {
                    StepRule::at(RuleTag::Beta2, here)
                }
            }
            TermKind::BangLam(_, body) if matches!(a.kind(), TermKind::Bang(_)) => {
                if occurs(body, 0) {
                    StepRule::at(RuleTag::BangBeta1, here)
                } else {
                    StepRule::at(RuleTag::BangBeta2, here)
                }
            }
            _ => match gate_of(f) {
                Some(g) if operand_slots(a, gate_spec(g).arity).is_some() => StepRule {
                    tag: RuleTag::Gate,
                    path: here,
                    gate: Some(g),
                },
                _ => StepRule::id(),
            },
        };
    }
}

/// Wraps a frame recorded at `path` into the application contexts above it.
fn wrap_frame(frame: Term, path: &[Dir]) -> Term {
    path.iter().rev().fold(frame, |inner, d| match d {
        Dir::Fun => Term::app(inner, Term::placeholder()),
        Dir::Arg => Term::app(Term::placeholder(), inner),
        _ => unreachable!("redexes are only reached through applications"),
    })
}

/// The frame and new redex contents for one branch.
fn rewrite(redex: &Term, rule: &StepRule) -> (Term, Term) {
    let TermKind::App(f, a) = redex.kind() else {
        unreachable!("redex of a non-Id rule is an application");
    };
    let phi = Term::placeholder;
    match (rule.tag, f.kind()) {
        (RuleTag::Beta1, TermKind::Lam(h, body)) => (
            Term::app(Term::lam(h.clone(), erase_keep(body, 0)), phi()),
            substitute(body, a),
        ),
        (RuleTag::Beta2, TermKind::Lam(h, body)) => (
            Term::app(Term::lam(h.clone(), phi()), a.clone()),
            shift(body, -1, 0),
        ),
        (RuleTag::BangBeta1, TermKind::BangLam(h, body)) => {
            let TermKind::Bang(inner) = a.kind() else {
                unreachable!("!beta selected only for suspension operands")
            };
            (
                Term::app(Term::bang_lam(h.clone(), erase_keep(body, 0)), phi()),
                substitute(body, inner),
            )
        }
        (RuleTag::BangBeta2, TermKind::BangLam(h, body)) => (
            Term::app(Term::bang_lam(h.clone(), phi()), a.clone()),
            shift(body, -1, 0),
        ),
        (RuleTag::Gate, _) => (Term::app(f.clone(), phi()), a.clone()),
        _ => unreachable!("rule {:?} does not match redex", rule.tag),
    }
}

/// One machine step on every branch.
pub fn step(psi: &Superposition, calculus: Calculus) -> Result<(Superposition, StepRule), MachineError> {
    let shape = psi.first_register().ok_or(MachineError::EmptyState)?;
    let rule = select_redex(shape, calculus);
    if calculus == Calculus::Quantum && rule.tag == RuleTag::Beta2 {
        return Err(MachineError::IllFormedRegister(rule.path.clone()));
    }
    let next = apply_rule(psi, &rule)?;
    Ok((next, rule))
}

/// Applies `rule` (selected for the shape of `psi`) to every branch.
pub fn apply_rule(psi: &Superposition, rule: &StepRule) -> Result<Superposition, MachineError> {
    // Branches sharing a history also share the new history node when their
    // frames agree, which keeps history comparison cheap.
    let mut last: Option<(History, Term, History)> = None;
    let mut extend = |h: &History, frame: Term| -> History {
        if let Some((prev, f, node)) = &last {
            if prev.ptr_eq(h) && *f == frame {
                return node.clone();
            }
        }
        let node = h.push(frame.clone());
        last = Some((h.clone(), frame, node.clone()));
        node
    };
    if rule.tag == RuleTag::Id {
        let out = psi
            .branches()
            .map(|(c, a)| (Configuration::new(extend(&c.history, Term::placeholder()), c.register.clone()), *a));
        return Ok(Superposition::from_branches(out.collect::<Vec<_>>()));
    }
    let dirs = rule.path.dirs();
    let mut out = Vec::with_capacity(psi.len());
    for (c, a) in psi.branches() {
        let redex = c.register.at(dirs).ok_or_else(|| {
            MachineError::MalformedHistory(format!("no redex at {} in {}", rule.path, c.register))
        })?;
        let (frame, new) = rewrite(redex, rule);
        let register = c.register.replace_at(dirs, |_| new).expect("path was just followed");
        out.push((Configuration::new(extend(&c.history, wrap_frame(frame, dirs)), register), *a));
    }
    let rewritten = Superposition::from_branches(out);
    match rule.gate {
        Some(g) => {
            let spec = gate_spec(g);
            let operand = rewritten
                .first_register()
                .and_then(|r| r.at(dirs))
                .ok_or(MachineError::EmptyState)?;
            let slots: Vec<BitSlot> = operand_slots(operand, spec.arity)
                .ok_or_else(|| MachineError::MalformedHistory(format!("{operand} is not a gate operand")))?
                .into_iter()
                .map(|s| dirs.iter().chain(&s).copied().collect())
                .collect();
            Ok(rewritten.apply_unitary(&slots, &spec)?)
        }
        None => Ok(rewritten),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// The register reached a value.
    Halted,
    /// No rule applies to a non-value register.
    Stuck,
    BudgetExceeded,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Halted => "halted",
            Status::Stuck => "stuck",
            Status::BudgetExceeded => "budget",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub status: Status,
    pub state: Superposition,
    pub steps: usize,
    pub trace: Option<Vec<StepRule>>,
}

/// Rejects programs the chosen calculus cannot run.
pub fn admit(t: &Term, calculus: Calculus) -> Result<(), MachineError> {
    if has_placeholder(t) {
        return Err(MachineError::Placeholder);
    }
    match calculus {
        Calculus::Quantum => check_well_formed(t).map_err(MachineError::NotWellFormed),
        Calculus::Intermediate if uses_bang(t) => Err(MachineError::UnsupportedInCalculus),
        Calculus::Intermediate => Ok(()),
    }
}

/// A run in progress, stepped one rule at a time.
#[derive(Clone, Debug)]
pub struct Execution {
    calculus: Calculus,
    state: Superposition,
    steps: usize,
    status: Option<Status>,
}

impl Execution {
    pub fn new(t: &Term, calculus: Calculus) -> Result<Self, MachineError> {
        admit(t, calculus)?;
        Ok(Execution {
            calculus,
            state: Superposition::from_term(t.clone()),
            steps: 0,
            status: None,
        })
    }

    pub fn state(&self) -> &Superposition {
        &self.state
    }

    pub fn calculus(&self) -> Calculus {
        self.calculus
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `Halted` or `Stuck` once an `Id` step has fired.
    pub fn status(&self) -> Option<Status> {
        self.status
    }

    /// Fires one rule. After the first `Id` step the run is over and the
    /// status is set from the register.
    pub fn step(&mut self) -> Result<StepRule, MachineError> {
        let (next, rule) = step(&self.state, self.calculus)?;
        self.state = next;
        self.steps += 1;
        if rule.tag == RuleTag::Id {
            let value = self
                .state
                .first_register()
                .is_some_and(|r| is_value(r, self.calculus));
            self.status = Some(if value { Status::Halted } else { Status::Stuck });
        }
        Ok(rule)
    }

    /// Steps until `Id` fires or `max_steps` steps have been taken, calling
    /// `observe` with the state before, the rule and the state after.
    pub fn run_observed(
        mut self,
        max_steps: usize,
        mut observe: impl FnMut(&Superposition, &StepRule, &Superposition),
    ) -> Result<RunResult, MachineError> {
        if max_steps == 0 {
            return Err(MachineError::InvalidBudget);
        }
        let mut trace = Vec::new();
        while self.status.is_none() && self.steps < max_steps {
            let before = self.state.clone();
            let rule = self.step()?;
            observe(&before, &rule, &self.state);
            trace.push(rule);
        }
        Ok(RunResult {
            status: self.status.unwrap_or(Status::BudgetExceeded),
            state: self.state,
            steps: self.steps,
            trace: Some(trace),
        })
    }
}

/// Runs `t` from `|t⟩` until it halts, gets stuck or uses up `max_steps`.
pub fn run(t: &Term, calculus: Calculus, max_steps: usize) -> Result<RunResult, MachineError> {
    let mut r = Execution::new(t, calculus)?.run_observed(max_steps, |_, _, _| {})?;
    r.trace = None;
    Ok(r)
}

/// Like [`run`], keeping the list of rules fired.
pub fn run_traced(t: &Term, calculus: Calculus, max_steps: usize) -> Result<RunResult, MachineError> {
    Execution::new(t, calculus)?.run_observed(max_steps, |_, _, _| {})
}
