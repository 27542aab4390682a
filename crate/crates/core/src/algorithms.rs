//! Quantum programs written in the calculus: EPR pairs, teleportation,
//! Deutsch's algorithm and the quantum Fourier transform, with the
//! conditional gates they need.
//!
//! All definitions join the prelude, so programs can name them directly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::prelude::{self, Def};
use crate::quantum_state::GateSpec;
use crate::reducer::{self, Outcome};
use crate::syntax::{Constant, Term};

pub(crate) const DEFINITIONS: &[(&str, Def)] = &[
    ("epr", Def::Source("cnot [H 0, 0]")),
    ("cX", Def::Source("cnot")),
    // (I ⊗ H) · cnot · (I ⊗ H)
    (
        "cZ",
        Def::Source("\\p. let (c, t) = p in let (c', t') = cnot [c, H t] in [c', H t']"),
    ),
    ("alice", Def::Source("\\p. let (x', y') = cnot p in [H x', y']")),
    (
        "bob",
        Def::Source(
            "\\p. let (x', y', e2) = p in \
             let (y'', e2') = cX [y', e2] in \
             let (x'', e2'') = cZ [x', e2'] in \
             [x'', y'', e2'']",
        ),
    ),
    (
        "teleport",
        Def::Source(
            "\\x. let (e1, e2) = epr in let (x', y') = alice [x, e1] in bob [x', y', e2]",
        ),
    ),
    ("deutsch", Def::Source("\\uf. let (x, y) = uf [H 0, H 1] in [H x, y]")),
    // The four one-bit functions f as oracles (x, y) -> (x, y ⊕ f x).
    ("uf_zero", Def::Source("\\p. p")),
    ("uf_one", Def::Source("\\p. let (x, y) = p in [x, X y]")),
    ("uf_id", Def::Source("cnot")),
    ("uf_not", Def::Source("\\p. let (x, y) = cnot p in [x, X y]")),
    (
        "phases",
        Def::Source(
            "fix !(\\!phases.\\target.\\controls.\\!n. \
             (case controls of \
               (empty -> \\tg. [tg], \
                c:t -> \\tg. let (c', tg') = (cphase !n) [c, tg] in \
                             let tg'':t' = phases tg' t !(suc n) in \
                             tg'' : c' : t')) target)",
        ),
    ),
    (
        "fourier'",
        Def::Source(
            "fix !(\\!fourier'.\\list. case list of \
               (empty -> empty, \
                h:t -> let h':t' = phases (H h) t !2n in h' : fourier' t'))",
        ),
    ),
    ("fourier", Def::Source("\\list. reverse (fourier' list)")),
    ("hadamard_all", Def::Source("\\list. map !H list")),
];

pub fn epr() -> Term {
    prelude::get("epr")
}

pub fn alice() -> Term {
    prelude::get("alice")
}

pub fn bob() -> Term {
    prelude::get("bob")
}

/// Teleports the qubit `xprep` evaluates to; the result is the list
/// `[x'', y'', e2'']` with the teleported qubit last.
pub fn teleport(xprep: &Term) -> Term {
    Term::app(prelude::get("teleport"), xprep.clone())
}

/// Deutsch's algorithm on the two-qubit oracle `uf`.
pub fn deutsch(uf: &Term) -> Term {
    Term::app(prelude::get("deutsch"), uf.clone())
}

/// A one-bit function, for building Deutsch oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitFunction {
    Zero,
    One,
    Identity,
    Not,
}

impl BitFunction {
    pub const ALL: [BitFunction; 4] = [
        BitFunction::Zero,
        BitFunction::One,
        BitFunction::Identity,
        BitFunction::Not,
    ];

    pub fn eval(self, x: usize) -> usize {
        match self {
            BitFunction::Zero => 0,
            BitFunction::One => 1,
            BitFunction::Identity => x,
            BitFunction::Not => 1 - x,
        }
    }

    pub fn is_balanced(self) -> bool {
        self.eval(0) != self.eval(1)
    }

    /// The oracle `(x, y) -> (x, y ⊕ f x)`.
    pub fn oracle(self) -> Term {
        prelude::get(match self {
            BitFunction::Zero => "uf_zero",
            BitFunction::One => "uf_one",
            BitFunction::Identity => "uf_id",
            BitFunction::Not => "uf_not",
        })
    }
}

/// Two-qubit gates the programs use beyond the primitives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivedGate {
    CX,
    CZ,
    CPhase(u64),
}

impl DerivedGate {
    /// The gate as a term over a two-element list.
    pub fn term(self) -> Term {
        match self {
            DerivedGate::CX => prelude::get("cX"),
            DerivedGate::CZ => prelude::get("cZ"),
            DerivedGate::CPhase(n) => Term::app(
                Term::constant(Constant::CPhase),
                Term::bang(prelude::church_nat(n)),
            ),
        }
    }

    /// The 4×4 unitary the term computes, read off by reduction.
    pub fn unitary(self) -> DMatrix<Complex64> {
        unitary_of(&self.term(), 2, 10_000).expect("derived gates reduce on basis inputs")
    }

    /// The intended matrix for the primitive conditional phase.
    pub fn spec(n: u64) -> GateSpec {
        GateSpec::cphase(n)
    }
}

/// The list term `[b₁, …, bₙ]` for the bits of `index`, first bit most
/// significant.
pub fn basis_input(index: usize, n: usize) -> Term {
    let bits: Vec<Term> = (0..n).map(|k| Term::bit((index >> (n - 1 - k)) & 1)).collect();
    prelude::tuple(&bits)
}

/// The matrix of `f` on `n`-qubit lists: column `j` is the reduced state of
/// `f` applied to basis input `j`. `None` if some run does not end in a
/// superposition of `n`-bit list values.
pub fn unitary_of(f: &Term, n: usize, max_steps: usize) -> Option<DMatrix<Complex64>> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let Outcome::Normal(out) = reducer::reduce_to_normal(&Term::app(f.clone(), basis_input(j, n)), max_steps)
        else {
            return None;
        };
        for (t, amp) in out.branches() {
            let bits = prelude::decode_list_value(t)?;
            if bits.len() != n {
                return None;
            }
            let row = bits
                .iter()
                .try_fold(0, |acc, b| b.as_bit().map(|v| (acc << 1) | v))?;
            m[(row, j)] = *amp;
        }
    }
    Some(m)
}

/// `fourier` applied to the basis input `index` of `n` qubits.
pub fn fourier_on(index: usize, n: usize) -> Term {
    Term::app(prelude::get("fourier"), basis_input(index, n))
}

pub fn fourier() -> Term {
    prelude::get("fourier")
}

/// `H` on every qubit of a list.
pub fn hadamard_all() -> Term {
    prelude::get("hadamard_all")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearity::check_well_formed;

    #[test]
    fn programs_are_well_formed() {
        for (name, _) in DEFINITIONS {
            let t = prelude::get(name);
            assert!(check_well_formed(&t).is_ok(), "{name}: {:?}", check_well_formed(&t));
        }
        for f in BitFunction::ALL {
            assert!(check_well_formed(&deutsch(&f.oracle())).is_ok());
        }
    }

    #[test]
    fn cx_is_cnot() {
        let m = DerivedGate::CX.unitary();
        let cnot = GateSpec::for_constant(Constant::Cnot).unwrap().matrix;
        assert!((m - cnot).iter().all(|e| e.norm() < 1e-12));
    }

    #[test]
    fn single_qubit_fourier_is_hadamard() {
        let m = unitary_of(&fourier(), 1, 10_000).unwrap();
        let h = GateSpec::for_constant(Constant::H).unwrap().matrix;
        assert!((m - h).iter().all(|e| e.norm() < 1e-12));
    }
}
