//! Superpositions of machine configurations and of bare registers.

mod gates;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub use gates::{GateId, GateSpec};

use crate::syntax::{congruent, Dir, Term};

pub type Amplitude = Complex64;

/// Amplitudes at or below this magnitude are dropped.
pub const PRUNE: f64 = 1e-12;

/// Path from the register root to a bit constant.
pub type BitSlot = Vec<Dir>;

struct HistoryNode {
    frame: Term,
    prev: History,
    len: usize,
}

/// The history track `h₁; …; hₙ`, a persistent list shared between
/// configurations that agree on a prefix.
#[derive(Clone, Default)]
pub struct History(Option<Arc<HistoryNode>>);

impl History {
    pub fn new() -> History {
        History(None)
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn push(&self, frame: Term) -> History {
        History(Some(Arc::new(HistoryNode {
            frame,
            prev: self.clone(),
            len: self.len() + 1,
        })))
    }

    /// The newest frame and the history before it.
    pub fn pop(&self) -> Option<(&Term, &History)> {
        self.0.as_ref().map(|n| (&n.frame, &n.prev))
    }

    pub fn last(&self) -> Option<&Term> {
        self.0.as_ref().map(|n| &n.frame)
    }

    /// Frames newest first.
    pub fn iter_newest(&self) -> impl Iterator<Item = &Term> {
        let mut cur = self;
        std::iter::from_fn(move || {
            let n = cur.0.as_ref()?;
            cur = &n.prev;
            Some(&n.frame)
        })
    }

    /// Frames oldest first.
    pub fn frames(&self) -> Vec<Term> {
        let mut v: Vec<Term> = self.iter_newest().cloned().collect();
        v.reverse();
        v
    }

    pub fn from_frames(frames: impl IntoIterator<Item = Term>) -> History {
        frames.into_iter().fold(History::new(), |h, f| h.push(f))
    }

    pub fn ptr_eq(&self, other: &History) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl PartialEq for History {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for History {}

impl PartialOrd for History {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for History {
    /// Shorter histories first, then frame by frame from the newest.
    fn cmp(&self, other: &Self) -> Ordering {
        let by_len = self.len().cmp(&other.len());
        if by_len != Ordering::Equal {
            return by_len;
        }
        let (mut a, mut b) = (self, other);
        loop {
            if a.ptr_eq(b) {
                return Ordering::Equal;
            }
            let (Some(x), Some(y)) = (&a.0, &b.0) else {
                return Ordering::Equal;
            };
            match x.frame.cmp(&y.frame) {
                Ordering::Equal => {
                    a = &x.prev;
                    b = &y.prev;
                }
                o => return o,
            }
        }
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.frames()).finish()
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, frame) in self.frames().iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{frame}")?;
        }
        Ok(())
    }
}

/// One basis state of the machine: `h₁; …; hₙ; t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Configuration {
    pub history: History,
    pub register: Term,
}

impl Configuration {
    pub fn new(history: History, register: Term) -> Self {
        Configuration { history, register }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.history.is_empty() {
            write!(f, "{} ; ", self.history)?;
        }
        write!(f, "{}", self.register)
    }
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// `(re,im)` with six decimals and no negative zero.
pub fn format_amplitude(a: Amplitude) -> String {
    let re = format!("{:.6}", clean(a.re));
    let im = format!("{:.6}", clean(a.im));
    let fix = |s: String| if s == "-0.000000" { "0.000000".to_string() } else { s };
    format!("({},{})", fix(re), fix(im))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("no bit constant at slot {slot:?} of register {register}")]
    SlotNotBit { slot: BitSlot, register: String },
    #[error("gate acts on {expected} bits but {given} slots were given")]
    ArityMismatch { expected: usize, given: usize },
}

/// Applies `g` to the bits at `slots` of every `(key, register, amplitude)`
/// entry, grouping entries that agree everywhere except at those bits.
fn apply_grouped<K: Ord + Clone>(
    entries: impl IntoIterator<Item = (K, Term, Amplitude)>,
    slots: &[BitSlot],
    g: &GateSpec,
) -> Result<Vec<(K, Term, Amplitude)>, StateError> {
    if slots.len() != g.arity {
        return Err(StateError::ArityMismatch {
            expected: g.arity,
            given: slots.len(),
        });
    }
    let dim = 1usize << g.arity;
    let mut groups: BTreeMap<(K, Term), Vec<Amplitude>> = BTreeMap::new();
    for (key, reg, amp) in entries {
        let mut index = 0usize;
        let mut blank = reg.clone();
        for slot in slots {
            let bit = reg.at(slot).and_then(Term::as_bit).ok_or_else(|| StateError::SlotNotBit {
                slot: slot.clone(),
                register: reg.to_string(),
            })?;
            index = (index << 1) | bit;
            if bit != 0 {
                blank = blank
                    .replace_at(slot, |_| Term::bit(0))
                    .expect("slot was just read");
            }
        }
        groups
            .entry((key, blank))
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim])[index] += amp;
    }
    let mut out = Vec::new();
    for ((key, blank), v) in groups {
        for (row, coeffs) in g.matrix.row_iter().enumerate() {
            let amp: Amplitude = coeffs.iter().zip(&v).map(|(u, a)| u * a).sum();
            if amp.norm() <= PRUNE {
                continue;
            }
            let mut reg = blank.clone();
            for (k, slot) in slots.iter().enumerate() {
                if (row >> (g.arity - 1 - k)) & 1 == 1 {
                    reg = reg.replace_at(slot, |_| Term::bit(1)).expect("slot exists");
                }
            }
            out.push((key.clone(), reg, amp));
        }
    }
    Ok(out)
}

/// A finite superposition of configurations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Superposition {
    branches: BTreeMap<Configuration, Amplitude>,
}

impl Superposition {
    /// `|t⟩` with an empty history.
    pub fn from_term(t: Term) -> Self {
        Self::from_branches([(Configuration::new(History::new(), t), Complex64::new(1.0, 0.0))])
    }

    /// Sums amplitudes of equal configurations and drops negligible ones.
    pub fn from_branches(items: impl IntoIterator<Item = (Configuration, Amplitude)>) -> Self {
        let mut branches: BTreeMap<Configuration, Amplitude> = BTreeMap::new();
        for (c, a) in items {
            *branches.entry(c).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        branches.retain(|_, a| a.norm() > PRUNE);
        Superposition { branches }
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn branches(&self) -> impl Iterator<Item = (&Configuration, &Amplitude)> {
        self.branches.iter()
    }

    pub fn amplitude(&self, c: &Configuration) -> Amplitude {
        self.branches.get(c).copied().unwrap_or_default()
    }

    /// Some register; all registers share its shape in reachable states.
    pub fn first_register(&self) -> Option<&Term> {
        self.branches.keys().next().map(|c| &c.register)
    }

    /// `Σ|amp|²`.
    pub fn norm(&self) -> f64 {
        self.branches.values().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `g` to the register bits at `slots` in every branch.
    pub fn apply_unitary(&self, slots: &[BitSlot], g: &GateSpec) -> Result<Self, StateError> {
        let entries = self
            .branches
            .iter()
            .map(|(c, a)| (c.history.clone(), c.register.clone(), *a));
        let out = apply_grouped(entries, slots, g)?;
        Ok(Self::from_branches(
            out.into_iter()
                .map(|(h, r, a)| (Configuration::new(h, r), a)),
        ))
    }

    /// Splits off a history shared by every branch.
    pub fn factor_history(&self) -> Result<(History, RegisterState), NotProduct> {
        let mut it = self.branches.iter();
        let Some((first, _)) = it.next() else {
            return Err(NotProduct);
        };
        if !it.all(|(c, _)| c.history == first.history) {
            return Err(NotProduct);
        }
        let register = RegisterState {
            branches: self
                .branches
                .iter()
                .map(|(c, a)| (c.register.clone(), *a))
                .collect(),
        };
        Ok((first.history.clone(), register))
    }

    /// The register density matrix with the history traced out.
    pub fn density_matrix(&self) -> DensityMatrix {
        let labels: Vec<Term> = {
            let mut v: Vec<Term> = self.branches.keys().map(|c| c.register.clone()).collect();
            v.sort();
            v.dedup();
            v
        };
        let index = |t: &Term| labels.binary_search(t).expect("label collected above");
        let mut by_history: BTreeMap<&History, Vec<(usize, Amplitude)>> = BTreeMap::new();
        for (c, a) in &self.branches {
            by_history.entry(&c.history).or_default().push((index(&c.register), *a));
        }
        let n = labels.len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for column in by_history.values() {
            for &(i, a) in column {
                for &(j, b) in column {
                    m[(i, j)] += a * b.conj();
                }
            }
        }
        DensityMatrix { labels, matrix: m }
    }

    /// Same configurations with amplitudes within `tol`.
    pub fn approx_eq(&self, other: &Superposition, tol: f64) -> bool {
        self.branches.len() == other.branches.len()
            && self
                .branches
                .iter()
                .zip(&other.branches)
                .all(|((c, a), (d, b))| c == d && (a - b).norm() <= tol)
    }

    /// Every register and every history is congruent to those of the first branch.
    pub fn check_congruence(&self) -> Result<(), CongruenceViolation> {
        let mut it = self.branches.keys();
        let Some(first) = it.next() else {
            return Ok(());
        };
        for c in it {
            if !congruent(&first.register, &c.register) {
                return Err(CongruenceViolation {
                    part: "register",
                    first: first.register.to_string(),
                    other: c.register.to_string(),
                });
            }
            if !histories_congruent(&first.history, &c.history) {
                return Err(CongruenceViolation {
                    part: "history",
                    first: first.history.to_string(),
                    other: c.history.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Reduced density matrix of the bits at `slots`, tracing out the
    /// history and the rest of the register.
    pub fn reduced_density(&self, slots: &[BitSlot]) -> Result<DMatrix<Complex64>, StateError> {
        reduced(
            self.branches
                .iter()
                .map(|(c, a)| (c.history.clone(), &c.register, *a)),
            slots,
        )
    }
}

fn histories_congruent(a: &History, b: &History) -> bool {
    if a.ptr_eq(b) {
        return true;
    }
    a.len() == b.len()
        && a
            .iter_newest()
            .zip(b.iter_newest())
            .all(|(x, y)| congruent(x, y))
}

fn reduced<'a, K: Ord + Clone>(
    entries: impl Iterator<Item = (K, &'a Term, Amplitude)>,
    slots: &[BitSlot],
) -> Result<DMatrix<Complex64>, StateError> {
    let dim = 1usize << slots.len();
    let mut env: BTreeMap<(K, Term), Vec<Amplitude>> = BTreeMap::new();
    for (key, reg, amp) in entries {
        let mut index = 0;
        let mut blank = reg.clone();
        for slot in slots {
            let bit = reg.at(slot).and_then(Term::as_bit).ok_or_else(|| StateError::SlotNotBit {
                slot: slot.clone(),
                register: reg.to_string(),
            })?;
            index = (index << 1) | bit;
            blank = blank.replace_at(slot, |_| Term::bit(0)).expect("slot exists");
        }
        env.entry((key, blank))
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim])[index] += amp;
    }
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for v in env.values() {
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    Ok(m)
}

impl fmt::Display for Superposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, a) in &self.branches {
            writeln!(f, "{}  {}", format_amplitude(*a), c)?;
        }
        Ok(())
    }
}

/// The branches do not share a single history.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("state is not a product of one history and a register superposition")]
pub struct NotProduct;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{part} terms are not congruent: `{first}` vs `{other}`")]
pub struct CongruenceViolation {
    pub part: &'static str,
    pub first: String,
    pub other: String,
}

/// A density matrix indexed by distinct register terms.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub labels: Vec<Term>,
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).iter().all(|e| e.norm() <= tol)
    }

    /// Eigenvalues of the (Hermitian) matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// A superposition of bare registers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegisterState {
    branches: BTreeMap<Term, Amplitude>,
}

impl RegisterState {
    pub fn single(t: Term) -> Self {
        Self::from_branches([(t, Complex64::new(1.0, 0.0))])
    }

    pub fn from_branches(items: impl IntoIterator<Item = (Term, Amplitude)>) -> Self {
        let mut branches: BTreeMap<Term, Amplitude> = BTreeMap::new();
        for (t, a) in items {
            *branches.entry(t).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        branches.retain(|_, a| a.norm() > PRUNE);
        RegisterState { branches }
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn branches(&self) -> impl Iterator<Item = (&Term, &Amplitude)> {
        self.branches.iter()
    }

    pub fn amplitude(&self, t: &Term) -> Amplitude {
        self.branches.get(t).copied().unwrap_or_default()
    }

    pub fn first(&self) -> Option<&Term> {
        self.branches.keys().next()
    }

    pub fn norm(&self) -> f64 {
        self.branches.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_unitary(&self, slots: &[BitSlot], g: &GateSpec) -> Result<Self, StateError> {
        let entries = self.branches.iter().map(|(t, a)| ((), t.clone(), *a));
        let out = apply_grouped(entries, slots, g)?;
        Ok(Self::from_branches(out.into_iter().map(|(_, t, a)| (t, a))))
    }

    pub fn check_congruence(&self) -> Result<(), CongruenceViolation> {
        let mut it = self.branches.keys();
        let Some(first) = it.next() else {
            return Ok(());
        };
        for t in it {
            if !congruent(first, t) {
                return Err(CongruenceViolation {
                    part: "register",
                    first: first.to_string(),
                    other: t.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Multiplies every amplitude by the phase that makes the first nonzero
    /// one real and positive.
    pub fn phase_aligned(&self) -> RegisterState {
        let Some(a) = self.branches.values().next() else {
            return self.clone();
        };
        let phase = a.conj() / a.norm();
        RegisterState {
            branches: self.branches.iter().map(|(t, b)| (t.clone(), b * phase)).collect(),
        }
    }

    /// Same terms, amplitudes within `tol` after phase alignment.
    pub fn approx_eq_up_to_phase(&self, other: &RegisterState, tol: f64) -> bool {
        let (a, b) = (self.phase_aligned(), other.phase_aligned());
        a.branches.len() == b.branches.len()
            && a
                .branches
                .iter()
                .zip(&b.branches)
                .all(|((s, x), (t, y))| s == t && (x - y).norm() <= tol)
    }

    /// Reduced density matrix of the bits at `slots`.
    pub fn reduced_density(&self, slots: &[BitSlot]) -> Result<DMatrix<Complex64>, StateError> {
        reduced(self.branches.iter().map(|(t, a)| ((), t, *a)), slots)
    }
}

impl fmt::Display for RegisterState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, a) in &self.branches {
            writeln!(f, "{}  {}", format_amplitude(*a), t)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Constant};

    fn h() -> GateSpec {
        GateSpec::for_constant(Constant::H).unwrap()
    }

    #[test]
    fn hadamard_on_zero_and_one() {
        let s = 1.0 / 2f64.sqrt();
        let zero = Superposition::from_term(Term::bit(0));
        let out = zero.apply_unitary(&[vec![]], &h()).unwrap();
        let amp = |st: &Superposition, b| st.amplitude(&Configuration::new(History::new(), Term::bit(b)));
        assert!((amp(&out, 0) - s).norm() < 1e-15 && (amp(&out, 1) - s).norm() < 1e-15);
        let one = Superposition::from_term(Term::bit(1));
        let out = one.apply_unitary(&[vec![]], &h()).unwrap();
        assert!((amp(&out, 1) + s).norm() < 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_on_list_value() {
        let reg = parse("#[1, 0]").unwrap();
        let slots = crate::syntax::bit_slots(&reg);
        let g = GateSpec::for_constant(Constant::Cnot).unwrap();
        let out = RegisterState::single(reg).apply_unitary(&slots, &g).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.first().unwrap(), &parse("#[1, 1]").unwrap());
    }

    #[test]
    fn slot_not_bit_is_reported() {
        let st = RegisterState::single(parse("\\x.x").unwrap());
        assert!(matches!(
            st.apply_unitary(&[vec![]], &h()),
            Err(StateError::SlotNotBit { .. })
        ));
    }

    #[test]
    fn merging_sums_once() {
        let c = Configuration::new(History::new(), Term::bit(0));
        let st = Superposition::from_branches([
            (c.clone(), Complex64::new(0.5, 0.0)),
            (c.clone(), Complex64::new(0.5, 0.0)),
        ]);
        assert_eq!(st.amplitude(&c), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn congruence_violation_detected() {
        let st = Superposition::from_branches([
            (Configuration::new(History::new(), parse("H 0").unwrap()), Complex64::new(0.6, 0.0)),
            (Configuration::new(History::new(), parse("S 0").unwrap()), Complex64::new(0.8, 0.0)),
        ]);
        assert!(st.check_congruence().is_err());
    }

    #[test]
    fn density_of_singleton() {
        let d = Superposition::from_term(Term::bit(0)).density_matrix();
        assert_eq!(d.matrix.shape(), (1, 1));
        assert!((d.matrix[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn amplitude_format_has_no_negative_zero() {
        assert_eq!(format_amplitude(Complex64::new(-0.0, -1e-9)), "(0.000000,0.000000)");
        assert_eq!(format_amplitude(Complex64::new(0.5, -0.25)), "(0.500000,-0.250000)");
    }
}
