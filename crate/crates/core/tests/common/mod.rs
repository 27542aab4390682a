//! Oracles shared by the integration tests. Nothing here calls into the
//! machine or the reducer: the classical evaluator and the matrix helpers
//! are written from scratch so they can check both.

#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qlam_core::{parse, Term, TermKind};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

// ---------------------------------------------------------------------------
// Classical call-by-value evaluator over its own term type.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cl {
    Var(usize),
    Lam(Box<Cl>),
    App(Box<Cl>, Box<Cl>),
}

impl Cl {
    pub fn from_term(t: &Term) -> Option<Cl> {
        Some(match t.kind() {
            TermKind::Var(i) => Cl::Var(*i as usize),
            TermKind::Lam(_, b) => Cl::Lam(Box::new(Cl::from_term(b)?)),
            TermKind::App(f, a) => Cl::App(Box::new(Cl::from_term(f)?), Box::new(Cl::from_term(a)?)),
            _ => return None,
        })
    }

    pub fn to_term(&self) -> Term {
        match self {
            Cl::Var(i) => Term::var(*i as u32),
            Cl::Lam(b) => Term::lam(qlam_core::syntax::Hint::none(), b.to_term()),
            Cl::App(f, a) => Term::app(f.to_term(), a.to_term()),
        }
    }

    fn lift(&self, by: usize, cutoff: usize) -> Cl {
        match self {
            Cl::Var(i) if *i >= cutoff => Cl::Var(i + by),
            Cl::Var(i) => Cl::Var(*i),
            Cl::Lam(b) => Cl::Lam(Box::new(b.lift(by, cutoff + 1))),
            Cl::App(f, a) => Cl::App(Box::new(f.lift(by, cutoff)), Box::new(a.lift(by, cutoff))),
        }
    }

    /// `self[v/depth]`, removing the binder at `depth`. `v` is closed.
    fn subst(&self, v: &Cl, depth: usize) -> Cl {
        match self {
            Cl::Var(i) if *i == depth => v.lift(depth, 0),
            Cl::Var(i) if *i > depth => Cl::Var(i - 1),
            Cl::Var(i) => Cl::Var(*i),
            Cl::Lam(b) => Cl::Lam(Box::new(b.subst(v, depth + 1))),
            Cl::App(f, a) => Cl::App(Box::new(f.subst(v, depth)), Box::new(a.subst(v, depth))),
        }
    }
}

/// Big-step call-by-value evaluation of a closed term; `None` if stuck or
/// out of fuel.
pub fn eval_cbv(t: &Cl, fuel: &mut usize) -> Option<Cl> {
    match t {
        Cl::Lam(_) => Some(t.clone()),
        Cl::Var(_) => None,
        Cl::App(f, a) => {
            let Cl::Lam(body) = eval_cbv(f, fuel)? else {
                return None;
            };
            let v = eval_cbv(a, fuel)?;
            *fuel = fuel.checked_sub(1)?;
            eval_cbv(&body.subst(&v, 0), fuel)
        }
    }
}

/// A random closed classical expression of depth at most `depth` that
/// denotes a natural number, built from numerals, `suc`, `add`,
/// abstraction and the K and I combinators.
pub fn random_nat_expr(rng: &mut ChaCha8Rng, depth: usize) -> String {
    if depth <= 1 {
        return numeral(rng.random_range(0..4));
    }
    let d = depth - 1;
    match rng.random_range(0..6) {
        0 => numeral(rng.random_range(0..4)),
        1 => format!("(suc {})", random_nat_expr(rng, d)),
        2 => format!("(add {} {})", random_nat_expr(rng, d), random_nat_expr(rng, d)),
        3 => format!("((\\x.\\y.x) {} {})", random_nat_expr(rng, d), random_nat_expr(rng, d)),
        4 => format!("((\\v.v) {})", random_nat_expr(rng, d)),
        _ => format!("((\\n.add n n) {})", random_nat_expr(rng, d)),
    }
}

fn numeral(n: u64) -> String {
    (0..n).fold("zero".to_string(), |acc, _| format!("(suc {acc})"))
}

// ---------------------------------------------------------------------------
// Matrices.

pub fn h() -> DMatrix<C> {
    let s = c(FRAC_1_SQRT_2, 0.0);
    DMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

pub fn s() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

pub fn r() -> DMatrix<C> {
    DMatrix::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C::from_polar(1.0, PI / 4.0)],
    )
}

pub fn x() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn id2() -> DMatrix<C> {
    DMatrix::identity(2, 2)
}

/// Permutation matrix of `(a, b) -> (a, a ⊕ b)`, first bit most significant.
pub fn cnot() -> DMatrix<C> {
    let mut m = DMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            m[((a << 1) | (a ^ b), (a << 1) | b)] = c(1.0, 0.0);
        }
    }
    m
}

pub fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

pub fn basis(dim: usize, i: usize) -> DVector<C> {
    let mut v = DVector::zeros(dim);
    v[i] = c(1.0, 0.0);
    v
}

/// `F_N[k, j] = e^{2πijk/N} / √N`.
pub fn dft(n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    DMatrix::from_fn(dim, dim, |k, j| {
        C::from_polar(1.0 / (dim as f64).sqrt(), 2.0 * PI * (j * k) as f64 / dim as f64)
    })
}

pub fn max_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(psi: &DVector<C>, rho: &DMatrix<C>) -> f64 {
    (psi.adjoint() * rho * psi)[(0, 0)].re
}

/// Partial trace keeping qubit `keep` of an `n`-qubit pure state.
pub fn qubit_density(psi: &DVector<C>, n: usize, keep: usize) -> DMatrix<C> {
    let mut rho = DMatrix::zeros(2, 2);
    let shift = n - 1 - keep;
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            if (i & !(1 << shift)) == (j & !(1 << shift)) {
                rho[((i >> shift) & 1, (j >> shift) & 1)] += psi[i] * psi[j].conj();
            }
        }
    }
    rho
}

// ---------------------------------------------------------------------------
// Reading registers.

/// Reads a list value of bits as an index, first bit most significant.
pub fn bits_of(t: &Term) -> Option<usize> {
    let items = qlam_core::prelude::decode_list_value(t)?;
    items
        .iter()
        .try_fold(0, |acc, b| b.as_bit().map(|v| (acc << 1) | v))
}

/// The register superposition as a vector over `n`-bit list values.
pub fn state_vector(reg: &qlam_core::RegisterState, n: usize) -> Option<DVector<C>> {
    let mut v = DVector::zeros(1 << n);
    for (t, a) in reg.branches() {
        if qlam_core::prelude::decode_list_value(t)?.len() != n {
            return None;
        }
        v[bits_of(t)?] += *a;
    }
    Some(v)
}

// ---------------------------------------------------------------------------
// The example corpus.

pub fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn load(dir: &Path) -> Vec<(String, Term)> {
    let mut out: Vec<(String, Term)> = std::fs::read_dir(dir)
        .expect("examples directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lq"))
        .map(|p| {
            let src = std::fs::read_to_string(&p).expect("readable example");
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let t = parse(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, t)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// λ_q programs.
pub fn corpus() -> Vec<(String, Term)> {
    load(&examples_dir())
}

/// Programs for λ_i.
pub fn corpus_intermediate() -> Vec<(String, Term)> {
    load(&examples_dir().join("lambda_i"))
}

// ---------------------------------------------------------------------------
// Random circuits written as programs.

/// A gate of a random circuit on qubits numbered from 0.
#[derive(Clone, Debug)]
pub enum Op {
    One(&'static str, usize),
    Two(&'static str, usize, usize),
}

pub const ONE_QUBIT: [&str; 6] = ["H", "S", "R", "X", "Y", "Z"];
pub const TWO_QUBIT: [&str; 4] = ["cnot", "cZ", "(cphase !2n)", "(cphase !3n)"];

pub fn one_qubit_matrix(g: &str) -> DMatrix<C> {
    match g {
        "H" => h(),
        "S" => s(),
        "R" => r(),
        "X" => x(),
        "Y" => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        "Z" => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        _ => panic!("unknown gate {g}"),
    }
}

pub fn two_qubit_matrix(g: &str) -> DMatrix<C> {
    let phase = |n: i32| {
        let mut m = DMatrix::identity(4, 4);
        m[(3, 3)] = C::from_polar(1.0, 2.0 * PI / 2f64.powi(n));
        m
    };
    match g {
        "cnot" => cnot(),
        "cZ" => phase(1),
        "(cphase !2n)" => phase(2),
        "(cphase !3n)" => phase(3),
        _ => panic!("unknown gate {g}"),
    }
}

/// The circuit as a program returning the list of its `n` qubits.
pub fn circuit_source(n: usize, init: usize, ops: &[Op]) -> String {
    let mut src = String::new();
    for k in 0..n {
        src += &format!("let q{k} = {} in ", (init >> (n - 1 - k)) & 1);
    }
    for op in ops {
        src += &match op {
            Op::One(g, i) => format!("let q{i} = {g} q{i} in "),
            Op::Two(g, i, j) => format!("let (q{i}, q{j}) = {g} [q{i}, q{j}] in "),
        };
    }
    let qs: Vec<String> = (0..n).map(|k| format!("q{k}")).collect();
    src + &format!("[{}]", qs.join(", "))
}

/// State vector of the circuit, qubit 0 most significant.
pub fn circuit_state(n: usize, init: usize, ops: &[Op]) -> DVector<C> {
    let dim = 1 << n;
    let bit = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
    let mut v = basis(dim, init);
    for op in ops {
        let mut next = DVector::zeros(dim);
        for idx in 0..dim {
            if v[idx].norm() == 0.0 {
                continue;
            }
            match op {
                Op::One(g, q) => {
                    let m = one_qubit_matrix(g);
                    for out in 0..2 {
                        let target = (idx & !(1 << (n - 1 - q))) | (out << (n - 1 - q));
                        next[target] += m[(out, bit(idx, *q))] * v[idx];
                    }
                }
                Op::Two(g, a, b) => {
                    let m = two_qubit_matrix(g);
                    let col = (bit(idx, *a) << 1) | bit(idx, *b);
                    for row in 0..4 {
                        let cleared = idx & !(1 << (n - 1 - a)) & !(1 << (n - 1 - b));
                        let target = cleared | ((row >> 1) << (n - 1 - a)) | ((row & 1) << (n - 1 - b));
                        next[target] += m[(row, col)] * v[idx];
                    }
                }
            }
        }
        v = next;
    }
    v
}
