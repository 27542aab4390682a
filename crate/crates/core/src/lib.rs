//! An interpreter for the quantum lambda calculi λ_i and λ_q.
//!
//! Programs are parsed into nameless [`Term`]s, checked for linearity, and run
//! either on the reversible [`machine`], which keeps a history track next to a
//! superposition of registers, or by the history-free [`reducer`].
//!
//! ```
//! use qlam_core::{machine, parse, Calculus, Status};
//!
//! let t = parse("H (H 0)").unwrap();
//! let r = machine::run(&t, Calculus::Quantum, 100).unwrap();
//! assert_eq!(r.status, Status::Halted);
//! let (_, register) = r.state.factor_history().unwrap();
//! assert_eq!(register.first(), Some(&qlam_core::Term::bit(0)));
//! ```

pub mod algorithms;
pub mod linearity;
pub mod machine;
pub mod prelude;
pub mod quantum_state;
pub mod reducer;
pub mod syntax;

pub use linearity::{check_in_context, check_well_formed, CheckContext, Violation, ViolationKind};
pub use machine::{run, step, step_backward, MachineError, RunResult, Status, StepRule};
pub use quantum_state::{
    Amplitude, Configuration, DensityMatrix, GateId, GateSpec, History, RegisterState, Superposition,
};
pub use syntax::{parse, pretty, Calculus, Constant, ParseError, Path, Term, TermKind};
