//! Programs shared by the benchmarks.

/// `(name, source)` pairs, from a few steps to a few hundred.
pub const PROGRAMS: &[(&str, &str)] = &[
    ("hadamard", "H (H 0)"),
    ("epr", "cnot [H 0, 0]"),
    ("teleport", "teleport (R (H 0))"),
    ("deutsch", "deutsch cnot"),
    ("add", "add 3n 4n"),
    ("qft2", "fourier [1, 0]"),
    ("qft3", "fourier [1, 0, 1]"),
];
