//! Well-formedness of λ_q terms.
//!
//! The check is syntax-directed: a linear binder `\x` must have exactly one
//! occurrence of `x` in its body, and that occurrence may not sit inside a
//! `!` suspension; nonlinear binders `\!x` are unrestricted. This is the
//! occurrence-counting reading of the usual rules with weakening,
//! contraction and dereliction for nonlinear assumptions.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Dir, Path, Term, TermKind};

pub use crate::syntax::Linearity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    LinearUsedZero,
    LinearUsedMany,
    LinearUnderBang,
    DuplicateBinder,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::LinearUsedZero => "LinearUsedZero",
            ViolationKind::LinearUsedMany => "LinearUsedMany",
            ViolationKind::LinearUnderBang => "LinearUnderBang",
            ViolationKind::DuplicateBinder => "DuplicateBinder",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One reason a term is not well formed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The binder for zero/many uses, the offending `!` for uses under a
    /// suspension, or the root for context problems.
    pub path: Path,
    pub binder: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  {}  {}", self.path, self.kind, self.binder)
    }
}

/// Linearity assumptions for the free names of a term.
///
/// Names not listed are treated as nonlinear symbols.
#[derive(Clone, Debug, Default)]
pub struct CheckContext {
    vars: Vec<(String, Linearity)>,
    duplicates: Vec<String>,
}

impl CheckContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an assumption. Adding a name twice is recorded and reported as
    /// [`ViolationKind::DuplicateBinder`] by the check.
    pub fn with(mut self, name: &str, linearity: Linearity) -> Self {
        if self.vars.iter().any(|(n, _)| n == name) {
            self.duplicates.push(name.to_string());
        } else {
            self.vars.push((name.to_string(), linearity));
        }
        self
    }

    pub fn linearity(&self, name: &str) -> Option<Linearity> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, l)| *l)
    }
}

struct Binder {
    name: String,
    linear: bool,
    path: Path,
    count: usize,
    /// Number of enclosing suspensions at the binder.
    bangs: usize,
    under_bang: Option<Path>,
}

struct Walk<'a> {
    env: Vec<Binder>,
    bangs: Vec<Path>,
    ctx: &'a CheckContext,
    free: BTreeMap<String, Binder>,
    out: Vec<Violation>,
}

impl Walk<'_> {
    fn occurrence(bangs: &[Path], b: &mut Binder) {
        b.count += 1;
        if b.under_bang.is_none() && bangs.len() > b.bangs {
            b.under_bang = Some(bangs[b.bangs].clone());
        }
    }

    fn finish(&mut self, b: Binder) {
        if !b.linear {
            return;
        }
        let kind = match b.count {
            0 => Some(ViolationKind::LinearUsedZero),
            1 => None,
            _ => Some(ViolationKind::LinearUsedMany),
        };
        if let Some(kind) = kind {
            self.out.push(Violation {
                kind,
                path: b.path.clone(),
                binder: b.name.clone(),
            });
        }
        if let Some(path) = b.under_bang {
            self.out.push(Violation {
                kind: ViolationKind::LinearUnderBang,
                path,
                binder: b.name,
            });
        }
    }

    fn go(&mut self, t: &Term, path: &mut Vec<Dir>) {
        match t.kind() {
            TermKind::Var(i) => {
                let depth = self.env.len();
                if let Some(k) = depth.checked_sub(*i as usize + 1) {
                    Self::occurrence(&self.bangs, &mut self.env[k]);
                }
            }
            TermKind::Free(name) => {
                if let Some(b) = self.free.get_mut(name.as_ref()) {
                    Self::occurrence(&self.bangs, b);
                }
            }
            TermKind::Lam(_, body) | TermKind::BangLam(_, body) | TermKind::Erased(body) => {
                let linear = matches!(t.kind(), TermKind::Lam(..));
                let name = match t.kind() {
                    TermKind::Lam(h, _) | TermKind::BangLam(h, _) => h_name(h.as_str(), self.env.len()),
                    _ => "φ".to_string(),
                };
                self.env.push(Binder {
                    name,
                    linear,
                    path: Path(path.clone()),
                    count: 0,
                    bangs: self.bangs.len(),
                    under_bang: None,
                });
                path.push(Dir::Body);
                self.go(body, path);
                path.pop();
                let b = self.env.pop().expect("binder pushed above");
                self.finish(b);
            }
            TermKind::App(f, a) => {
                path.push(Dir::Fun);
                self.go(f, path);
                path.pop();
                path.push(Dir::Arg);
                self.go(a, path);
                path.pop();
            }
            TermKind::Bang(inner) => {
                self.bangs.push(Path(path.clone()));
                path.push(Dir::Inner);
                self.go(inner, path);
                path.pop();
                self.bangs.pop();
            }
            TermKind::Const(_) | TermKind::Placeholder => {}
        }
    }
}

fn h_name(hint: Option<&str>, depth: usize) -> String {
    match hint {
        Some(h) => h.trim_start_matches('%').to_string(),
        None => format!("#{depth}"),
    }
}

/// Checks `t` with every free name nonlinear.
pub fn check_well_formed(t: &Term) -> Result<(), Vec<Violation>> {
    check_in_context(t, &CheckContext::new())
}

/// Checks `t` against linearity assumptions for its free names.
pub fn check_in_context(t: &Term, ctx: &CheckContext) -> Result<(), Vec<Violation>> {
    let mut w = Walk {
        env: Vec::new(),
        bangs: Vec::new(),
        ctx,
        free: BTreeMap::new(),
        out: Vec::new(),
    };
    for d in &ctx.duplicates {
        w.out.push(Violation {
            kind: ViolationKind::DuplicateBinder,
            path: Path::root(),
            binder: d.clone(),
        });
    }
    for (name, lin) in &w.ctx.vars {
        w.free.insert(
            name.clone(),
            Binder {
                name: name.clone(),
                linear: *lin == Linearity::Linear,
                path: Path::root(),
                count: 0,
                bangs: 0,
                under_bang: None,
            },
        );
    }
    w.go(t, &mut Vec::new());
    let free = std::mem::take(&mut w.free);
    for (_, b) in free {
        w.finish(b);
    }
    if w.out.is_empty() {
        Ok(())
    } else {
        Err(w.out)
    }
}

/// A free variable of a term: a dangling de Bruijn index or a named symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRef {
    /// Index relative to the root of the term.
    Bound(u32),
    Free(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Usage {
    pub count: usize,
    /// Some occurrence sits inside a `!` suspension.
    pub under_bang: bool,
}

/// Occurrence counts of the free variables of `t`.
pub fn free_linear_uses(t: &Term) -> BTreeMap<VarRef, Usage> {
    fn go(t: &Term, depth: u32, bangs: usize, out: &mut BTreeMap<VarRef, Usage>) {
        let mut hit = |r: VarRef| {
            let u = out.entry(r).or_default();
            u.count += 1;
            u.under_bang |= bangs > 0;
        };
        match t.kind() {
            TermKind::Var(i) if *i >= depth => hit(VarRef::Bound(i - depth)),
            TermKind::Free(name) => hit(VarRef::Free(name.to_string())),
            TermKind::Lam(_, b) | TermKind::BangLam(_, b) | TermKind::Erased(b) => {
                go(b, depth + 1, bangs, out)
            }
            TermKind::App(f, a) => {
                go(f, depth, bangs, out);
                go(a, depth, bangs, out);
            }
            TermKind::Bang(b) => go(b, depth, bangs + 1, out),
            _ => {}
        }
    }
    let mut out = BTreeMap::new();
    go(t, 0, 0, &mut out);
    out
}
