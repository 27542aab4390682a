mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use common::*;
use qlam_core::algorithms::{self, unitary_of, BitFunction, DerivedGate};
use qlam_core::machine::{self, Status};
use qlam_core::syntax::bit_slots;
use qlam_core::{parse, Calculus, RegisterState, Term};

fn run(t: &Term) -> RegisterState {
    let r = machine::run(t, Calculus::Quantum, machine::DEFAULT_MAX_STEPS).unwrap();
    assert_eq!(r.status, Status::Halted);
    r.state.factor_history().unwrap().1
}

fn phase(n: u32) -> DMatrix<C> {
    let mut m = DMatrix::identity(4, 4);
    m[(3, 3)] = C::from_polar(1.0, 2.0 * PI / f64::from(1u32 << n));
    m
}

#[test]
fn derived_two_qubit_gates() {
    assert!(max_diff(&DerivedGate::CX.unitary(), &cnot()) < 1e-12);
    assert!(max_diff(&DerivedGate::CZ.unitary(), &phase(1)) < 1e-12);
    for n in 1..=5 {
        assert!(max_diff(&DerivedGate::CPhase(u64::from(n)).unitary(), &phase(n)) < 1e-12, "{n}");
        assert!(max_diff(&DerivedGate::spec(u64::from(n)).matrix, &phase(n)) < 1e-12, "{n}");
    }
    let out = run(&parse("cX [1, 0]").unwrap());
    assert_eq!(out.first(), Some(&parse("#[1, 1]").unwrap()));
}

#[test]
fn fourier_matrices() {
    for n in 1..=3 {
        let m = unitary_of(&algorithms::fourier(), n, 100_000).unwrap();
        assert!(max_diff(&m, &dft(n)) < 1e-9, "n = {n}");
    }
}

#[test]
fn hadamard_on_every_qubit() {
    let m = unitary_of(&algorithms::hadamard_all(), 3, 100_000).unwrap();
    assert!(max_diff(&m, &kron(&kron(&h(), &h()), &h())) < 1e-12);
}

#[test]
fn oracles_compute_their_functions() {
    for f in BitFunction::ALL {
        let m = unitary_of(&f.oracle(), 2, 1000).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let out = (x << 1) | (y ^ f.eval(x));
                assert!((m[(out, (x << 1) | y)] - c(1.0, 0.0)).norm() < 1e-12, "{f:?}");
            }
        }
    }
}

#[test]
fn deutsch_decides_balance() {
    for f in BitFunction::ALL {
        let out = run(&algorithms::deutsch(&f.oracle()));
        let v = state_vector(&out, 2).unwrap();
        let rho = qubit_density(&v, 2, 0);
        let expected = if f.is_balanced() { 1 } else { 0 };
        assert!((rho[(expected, expected)].re - 1.0).abs() < 1e-12, "{f:?}");
    }
}

/// Single-qubit states reachable with up to three gates from a basis state.
fn preparation() -> impl Strategy<Value = (usize, Vec<&'static str>)> {
    (0usize..2, proptest::collection::vec(prop_oneof![Just("H"), Just("S"), Just("R"), Just("Y")], 0..=3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn teleportation_transfers_the_state((bit, gates) in preparation()) {
        let src = gates.iter().fold(bit.to_string(), |acc, g| format!("{g} ({acc})"));
        let psi = gates.iter().fold(basis(2, bit), |v: DVector<C>, g| one_qubit_matrix(g) * v);
        let out = run(&algorithms::teleport(&parse(&src).unwrap()));
        let slots = bit_slots(out.first().unwrap());
        prop_assert_eq!(slots.len(), 3);
        let rho = out.reduced_density(&slots[2..]).unwrap();
        prop_assert!((fidelity(&psi, &rho) - 1.0).abs() < 1e-9, "{}", src);
    }
}
