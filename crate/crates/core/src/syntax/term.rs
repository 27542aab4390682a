use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Display name carried by a binder.
///
/// Hints never take part in equality, ordering or hashing, so two terms that
/// differ only in bound-variable names are the same `Term`.
#[derive(Clone, Default)]
pub struct Hint(Option<Arc<str>>);

impl Hint {
    pub fn named(name: &str) -> Self {
        Hint(Some(Arc::from(name)))
    }

    pub fn none() -> Self {
        Hint(None)
    }

    pub fn as_str(&self) -> Option<&str> {
        self.0.as_deref()
    }
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Some(name) => write!(f, "{name:?}"),
            None => f.write_str("_"),
        }
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Hint {}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

/// Built-in constants: the two bit values and the quantum gate symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Bit0,
    Bit1,
    H,
    S,
    R,
    Cnot,
    X,
    Y,
    Z,
    /// Conditional phase `diag(1, 1, 1, e^{2πi/2ⁿ})`, applied as `(cphase !n)`
    /// where `n` is a Church numeral.
    CPhase,
}

impl Constant {
    pub const ALL: [Constant; 10] = [
        Constant::Bit0,
        Constant::Bit1,
        Constant::H,
        Constant::S,
        Constant::R,
        Constant::Cnot,
        Constant::X,
        Constant::Y,
        Constant::Z,
        Constant::CPhase,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Constant::Bit0 => "0",
            Constant::Bit1 => "1",
            Constant::H => "H",
            Constant::S => "S",
            Constant::R => "R",
            Constant::Cnot => "cnot",
            Constant::X => "X",
            Constant::Y => "Y",
            Constant::Z => "Z",
            Constant::CPhase => "cphase",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Constant> {
        Constant::ALL.into_iter().find(|c| c.symbol() == s)
    }

    pub fn is_bit(self) -> bool {
        matches!(self, Constant::Bit0 | Constant::Bit1)
    }

    pub fn bit_value(self) -> Option<usize> {
        match self {
            Constant::Bit0 => Some(0),
            Constant::Bit1 => Some(1),
            _ => None,
        }
    }

    pub fn bit(value: usize) -> Constant {
        if value == 0 {
            Constant::Bit0
        } else {
            Constant::Bit1
        }
    }

    /// Number of bits the gate acts on; `None` for the bit constants.
    pub fn arity(self) -> Option<usize> {
        match self {
            Constant::Bit0 | Constant::Bit1 => None,
            Constant::H | Constant::S | Constant::R | Constant::X | Constant::Y | Constant::Z => {
                Some(1)
            }
            Constant::Cnot | Constant::CPhase => Some(2),
        }
    }

    pub fn is_gate(self) -> bool {
        self.arity().is_some()
    }

    /// Member of the universal gate set {H, S, R, cnot}.
    pub fn is_universal(self) -> bool {
        matches!(self, Constant::H | Constant::S | Constant::R | Constant::Cnot)
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The shape of one term node. Variables are de Bruijn indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    /// Bound variable, counted outward from the nearest enclosing binder.
    Var(u32),
    /// Free, named variable (an opaque symbol such as `apple`).
    Free(Arc<str>),
    /// Linear abstraction `λx.t`.
    Lam(Hint, Term),
    /// Nonlinear abstraction `λ!x.t`.
    BangLam(Hint, Term),
    /// Erased binder slot `φ.t`; only produced when recording history frames.
    Erased(Term),
    App(Term, Term),
    Const(Constant),
    /// `!t`, a suspension.
    Bang(Term),
    /// `φ`; only produced when recording history frames.
    Placeholder,
}

struct Node {
    kind: TermKind,
    /// One past the largest free de Bruijn index (0 when closed).
    free_bound: u32,
    size: usize,
}

/// An immutable, cheaply clonable lambda term in nameless form.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    pub fn new(kind: TermKind) -> Term {
        let (free_bound, size) = match &kind {
            TermKind::Var(i) => (i + 1, 1),
            TermKind::Free(_) | TermKind::Const(_) | TermKind::Placeholder => (0, 1),
            TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b) => {
                (b.free_bound().saturating_sub(1), b.size() + 1)
            }
            TermKind::Bang(b) => (b.free_bound(), b.size() + 1),
            TermKind::App(f, a) => (f.free_bound().max(a.free_bound()), f.size() + a.size() + 1),
        };
        Term(Arc::new(Node {
            kind,
            free_bound,
            size,
        }))
    }

    pub fn var(index: u32) -> Term {
        Term::new(TermKind::Var(index))
    }

    pub fn free(name: &str) -> Term {
        Term::new(TermKind::Free(Arc::from(name)))
    }

    pub fn lam(hint: Hint, body: Term) -> Term {
        Term::new(TermKind::Lam(hint, body))
    }

    pub fn bang_lam(hint: Hint, body: Term) -> Term {
        Term::new(TermKind::BangLam(hint, body))
    }

    pub fn erased(body: Term) -> Term {
        Term::new(TermKind::Erased(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::new(TermKind::App(fun, arg))
    }

    /// Left-nested application `f a₁ a₂ …`.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn constant(c: Constant) -> Term {
        Term::new(TermKind::Const(c))
    }

    pub fn bit(value: usize) -> Term {
        Term::constant(Constant::bit(value))
    }

    pub fn bang(inner: Term) -> Term {
        Term::new(TermKind::Bang(inner))
    }

    pub fn placeholder() -> Term {
        Term::new(TermKind::Placeholder)
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn free_bound(&self) -> u32 {
        self.0.free_bound
    }

    /// Closed with respect to de Bruijn indices (named free variables allowed).
    pub fn is_closed(&self) -> bool {
        self.0.free_bound == 0
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_placeholder(&self) -> bool {
        matches!(self.kind(), TermKind::Placeholder)
    }

    pub fn as_bit(&self) -> Option<usize> {
        match self.kind() {
            TermKind::Const(c) => c.bit_value(),
            _ => None,
        }
    }

    /// Immediate children with the direction leading to each.
    pub fn children(&self) -> Vec<(Dir, &Term)> {
        match self.kind() {
            TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b) => {
                vec![(Dir::Body, b)]
            }
            TermKind::Bang(b) => vec![(Dir::Inner, b)],
            TermKind::App(f, a) => vec![(Dir::Fun, f), (Dir::Arg, a)],
            _ => Vec::new(),
        }
    }

    pub fn child(&self, dir: Dir) -> Option<&Term> {
        match (self.kind(), dir) {
            (TermKind::App(f, _), Dir::Fun) => Some(f),
            (TermKind::App(_, a), Dir::Arg) => Some(a),
            (TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b), Dir::Body) => {
                Some(b)
            }
            (TermKind::Bang(b), Dir::Inner) => Some(b),
            _ => None,
        }
    }

    pub fn at(&self, path: &[Dir]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &d| t.child(d))
    }

    /// Rebuilds the spine along `path`, replacing the subterm there with `f(old)`.
    pub fn replace_at(&self, path: &[Dir], f: impl FnOnce(&Term) -> Term) -> Option<Term> {
        let Some((&dir, rest)) = path.split_first() else {
            return Some(f(self));
        };
        let child = self.child(dir)?;
        let new_child = child.replace_at(rest, f)?;
        Some(self.with_child(dir, new_child))
    }

    fn with_child(&self, dir: Dir, child: Term) -> Term {
        match (self.kind(), dir) {
            (TermKind::App(_, a), Dir::Fun) => Term::app(child, a.clone()),
            (TermKind::App(f, _), Dir::Arg) => Term::app(f.clone(), child),
            (TermKind::Lam(h, _), Dir::Body) => Term::lam(h.clone(), child),
            (TermKind::BangLam(h, _), Dir::Body) => Term::bang_lam(h.clone(), child),
            (TermKind::Erased(_), Dir::Body) => Term::erased(child),
            (TermKind::Bang(_), Dir::Inner) => Term::bang(child),
            _ => unreachable!("with_child called with a direction the node lacks"),
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || (self.size() == other.size() && self.kind() == other.kind())
    }
}

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.kind().cmp(other.kind())
    }
}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind().hash(state)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind().fmt(f)
    }
}

/// One step from a node to a child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    /// Operator of an application.
    Fun,
    /// Operand of an application.
    Arg,
    /// Body of an abstraction.
    Body,
    /// Contents of a `!` suspension.
    Inner,
}

impl Dir {
    pub fn label(self) -> &'static str {
        match self {
            Dir::Fun => "fn",
            Dir::Arg => "arg",
            Dir::Body => "body",
            Dir::Inner => "bang",
        }
    }
}

/// A position inside a term, from the root down.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<Dir>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn child(&self, dir: Dir) -> Path {
        let mut v = self.0.clone();
        v.push(dir);
        Path(v)
    }

    pub fn join(&self, rest: &[Dir]) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(rest);
        Path(v)
    }

    pub fn dirs(&self) -> &[Dir] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for d in &self.0 {
            write!(f, "/{}", d.label())?;
        }
        Ok(())
    }
}
