//! Terms of λ_i and λ_q: representation, concrete syntax and the basic
//! syntactic operations.

mod ops;
mod parse;
mod pretty;
mod term;

pub use ops::{
    bit_slots, congruent, count_occurrences, erase_keep, has_placeholder, has_quantum_constants,
    is_parameterized_gate, is_value, occurs, shift, substitute, uses_bang, Calculus,
};
pub use parse::{parse_surface, Linearity, ParseError, Pattern, Pos, Surface};
pub use pretty::pretty;
pub use term::{Constant, Dir, Hint, Path, Term, TermKind};

use crate::prelude::{self, sugar};

/// Parses a program, resolving free names against the prelude.
///
/// Names bound in the program shadow prelude definitions; names that are
/// neither bound nor defined stay free symbols.
pub fn parse(source: &str) -> Result<Term, ParseError> {
    parse_with(source, &|_| None)
}

/// Like [`parse`], consulting `env` before the prelude for free names.
pub fn parse_with(
    source: &str,
    env: &dyn Fn(&str) -> Option<Term>,
) -> Result<Term, ParseError> {
    let surface = parse_surface(source)?;
    Ok(sugar::lower(&surface, &|name| {
        env(name).or_else(|| prelude::lookup(name))
    }))
}

/// Parses without consulting the prelude: every unbound name stays free.
pub fn parse_bare(source: &str) -> Result<Term, ParseError> {
    let surface = parse_surface(source)?;
    Ok(sugar::lower(&surface, &|_| None))
}
