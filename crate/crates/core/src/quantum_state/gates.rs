use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::syntax::Constant;

/// Identifies the unitary a gate step applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateId {
    /// One of the fixed gate constants.
    Const(Constant),
    /// `(cphase !n)`: `diag(1, 1, 1, e^{2πi/2ⁿ})`.
    CPhase(u64),
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateId::Const(c) => write!(f, "{c}"),
            GateId::CPhase(n) => write!(f, "cphase({n})"),
        }
    }
}

/// A named unitary acting on `arity` bits. Basis states are indexed with the
/// first bit most significant.
#[derive(Clone, Debug)]
pub struct GateSpec {
    pub id: GateId,
    pub arity: usize,
    pub matrix: DMatrix<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl GateSpec {
    /// The unitary of a gate constant; `None` for bits and for `cphase`,
    /// which needs its parameter (see [`GateSpec::cphase`]).
    pub fn for_constant(k: Constant) -> Option<GateSpec> {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        let h = c(FRAC_1_SQRT_2, 0.0);
        let (arity, entries): (usize, Vec<Complex64>) = match k {
            Constant::H => (1, vec![h, h, h, -h]),
            Constant::S => (1, vec![o, z, z, i]),
            Constant::R => (1, vec![o, z, z, Complex64::from_polar(1.0, PI / 4.0)]),
            Constant::X => (1, vec![z, o, o, z]),
            Constant::Y => (1, vec![z, -i, i, z]),
            Constant::Z => (1, vec![o, z, z, -o]),
            Constant::Cnot => (
                2,
                vec![
                    o, z, z, z, //
                    z, o, z, z, //
                    z, z, z, o, //
                    z, z, o, z,
                ],
            ),
            Constant::Bit0 | Constant::Bit1 | Constant::CPhase => return None,
        };
        let dim = 1 << arity;
        Some(GateSpec {
            id: GateId::Const(k),
            arity,
            matrix: DMatrix::from_row_slice(dim, dim, &entries),
        })
    }

    /// Conditional phase `diag(1, 1, 1, e^{2πi/2ⁿ})`.
    pub fn cphase(n: u64) -> GateSpec {
        let mut m = DMatrix::identity(4, 4);
        let angle = 2.0 * PI / 2f64.powi(n.min(1024) as i32);
        m[(3, 3)] = Complex64::from_polar(1.0, angle);
        GateSpec {
            id: GateId::CPhase(n),
            arity: 2,
            matrix: m,
        }
    }

    pub fn from_id(id: GateId) -> Option<GateSpec> {
        match id {
            GateId::Const(k) => GateSpec::for_constant(k),
            GateId::CPhase(n) => Some(GateSpec::cphase(n)),
        }
    }

    /// The inverse gate `U†`.
    pub fn adjoint(&self) -> GateSpec {
        GateSpec {
            id: self.id,
            arity: self.arity,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `‖U†U − I‖∞ ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let dim = self.matrix.nrows();
        let prod = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<Complex64>::identity(dim, dim);
        (prod - id).iter().all(|e| e.norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_gates_unitary() {
        for k in Constant::ALL {
            if let Some(g) = GateSpec::for_constant(k) {
                assert!(g.is_unitary(1e-12), "{k}");
                assert_eq!(g.matrix.nrows(), 1 << g.arity);
            }
        }
        for n in 1..8 {
            assert!(GateSpec::cphase(n).is_unitary(1e-12));
        }
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let g = GateSpec::for_constant(Constant::Cnot).unwrap();
        // |10⟩ (index 2) goes to |11⟩ (index 3)
        assert_eq!(g.matrix[(3, 2)], c(1.0, 0.0));
        assert_eq!(g.matrix[(2, 2)], c(0.0, 0.0));
    }

    #[test]
    fn cphase_one_is_controlled_z() {
        let g = GateSpec::cphase(1);
        assert!((g.matrix[(3, 3)] - c(-1.0, 0.0)).norm() < 1e-15);
    }
}
