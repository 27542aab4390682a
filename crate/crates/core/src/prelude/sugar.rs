//! Lowering of the surface tree to nameless terms, expanding the sugar forms.
//!
//! * `n` numerals and `#[…]` list literals become the corresponding values.
//! * `[a, b]`, `(a, b)` and `h : t` become `cons` applications ending in `empty`.
//! * `case e of (empty -> a, h:t -> b)` is `e !(\!z.a) !(\h.\t.b)`, and the
//!   numeral form `case e of (0n -> a, suc m -> b)` is `e !(\!z.a) !(\m.b)`.
//!   Both branches sit under `!`, so they may not mention outer linear
//!   variables; programs get around that by returning a function from the
//!   case and applying it afterwards.
//! * `let x = e in b` is `(\x.b) e` and `let !x = e in b` is `(\!x.b) e`.
//! * `let (x1, …, xk) = e in b` peels the list one cell at a time with the
//!   list case. Every linear variable of the enclosing scope that `b` uses is
//!   threaded through the branches as an extra argument, which keeps the
//!   expansion well formed. The unreachable branches (a list that is too short
//!   or too long) hand their linear variables back as a list.

use std::collections::HashSet;

use crate::syntax::{Hint, Linearity, Pattern, Surface, Term};

use super::{church_nat, cons, empty, list_value};

type Resolver<'a> = &'a dyn Fn(&str) -> Option<Term>;

struct Lowering<'a> {
    resolve: Resolver<'a>,
    scope: Vec<(String, Linearity)>,
    fresh: usize,
}

/// Converts a parsed program to a nameless term. Unbound names go through
/// `resolve` (which must return closed terms) and otherwise become free
/// symbols.
pub fn lower(s: &Surface, resolve: Resolver<'_>) -> Term {
    let mut l = Lowering {
        resolve,
        scope: Vec::new(),
        fresh: 0,
    };
    l.go(s)
}

fn hint_for(name: &str) -> Hint {
    Hint::named(name.trim_start_matches('%'))
}

fn var(name: &str) -> Surface {
    Surface::Var(name.to_string())
}

fn app(f: Surface, a: Surface) -> Surface {
    Surface::App(Box::new(f), Box::new(a))
}

fn apps(f: Surface, args: impl IntoIterator<Item = Surface>) -> Surface {
    args.into_iter().fold(f, app)
}

fn bang(s: Surface) -> Surface {
    Surface::Bang(Box::new(s))
}

fn lam(lin: Linearity, name: &str, body: Surface) -> Surface {
    Surface::Lam(lin, name.to_string(), Box::new(body))
}

fn linear_lams(names: &[String], body: Surface) -> Surface {
    names
        .iter()
        .rev()
        .fold(body, |b, n| lam(Linearity::Linear, n, b))
}

/// Returns the given linear variables as a list so that none is dropped.
fn junk(names: &[String]) -> Surface {
    if names.is_empty() {
        Surface::Embed(empty())
    } else {
        Surface::Tuple(names.iter().map(|n| var(n)).collect())
    }
}

fn free_names_under(
    names: &[&String],
    body: &Surface,
    bound: &mut Vec<String>,
    out: &mut HashSet<String>,
) {
    let n = bound.len();
    bound.extend(names.iter().map(|s| s.to_string()));
    free_names(body, bound, out);
    bound.truncate(n);
}

fn free_names(s: &Surface, bound: &mut Vec<String>, out: &mut HashSet<String>) {
    match s {
        Surface::Var(name) => {
            if !bound.contains(name) {
                out.insert(name.clone());
            }
        }
        Surface::Const(_) | Surface::Nat(_) | Surface::Embed(_) => {}
        Surface::Lam(_, x, b) => free_names_under(&[x], b, bound, out),
        Surface::App(f, a) | Surface::Cons(f, a) => {
            free_names(f, bound, out);
            free_names(a, bound, out);
        }
        Surface::Bang(b) => free_names(b, bound, out),
        Surface::Tuple(items) | Surface::ListValue(items) => {
            for i in items {
                free_names(i, bound, out);
            }
        }
        Surface::Let(pat, e, b) => {
            free_names(e, bound, out);
            let names: Vec<&String> = match pat {
                Pattern::Var(x) | Pattern::BangVar(x) => vec![x],
                Pattern::Tuple(xs) => xs.iter().collect(),
                Pattern::Cons(h, t) => vec![h, t],
            };
            free_names_under(&names, b, bound, out);
        }
        Surface::CaseList {
            scrutinee,
            nil,
            head,
            tail,
            cons,
        } => {
            free_names(scrutinee, bound, out);
            free_names(nil, bound, out);
            free_names_under(&[head, tail], cons, bound, out);
        }
        Surface::CaseNat {
            scrutinee,
            zero,
            pred,
            succ,
        } => {
            free_names(scrutinee, bound, out);
            free_names(zero, bound, out);
            free_names_under(&[pred], succ, bound, out);
        }
    }
}

impl Lowering<'_> {
    fn fresh(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("%{base}{}", self.fresh)
    }

    /// Outer linear variables used by `body`, excluding `shadowed`, outermost first.
    fn linear_captures(&self, body: &Surface, shadowed: &[String]) -> Vec<String> {
        let mut used = HashSet::new();
        free_names(body, &mut shadowed.to_vec(), &mut used);
        let mut out: Vec<String> = Vec::new();
        for (i, (name, lin)) in self.scope.iter().enumerate() {
            let innermost = !self.scope[i + 1..].iter().any(|(n, _)| n == name);
            if innermost && *lin == Linearity::Linear && used.contains(name) {
                out.push(name.clone());
            }
        }
        out
    }

    fn go(&mut self, s: &Surface) -> Term {
        match s {
            Surface::Var(name) => {
                if let Some(pos) = self.scope.iter().rposition(|(n, _)| n == name) {
                    Term::var((self.scope.len() - 1 - pos) as u32)
                } else if let Some(t) = (self.resolve)(name) {
                    t
                } else {
                    Term::free(name)
                }
            }
            Surface::Const(c) => Term::constant(*c),
            Surface::Nat(n) => church_nat(*n),
            Surface::Embed(t) => t.clone(),
            Surface::Lam(lin, name, body) => {
                self.scope.push((name.clone(), *lin));
                let b = self.go(body);
                self.scope.pop();
                match lin {
                    Linearity::Linear => Term::lam(hint_for(name), b),
                    Linearity::Nonlinear => Term::bang_lam(hint_for(name), b),
                }
            }
            Surface::App(f, a) => {
                let f = self.go(f);
                let a = self.go(a);
                Term::app(f, a)
            }
            Surface::Bang(b) => Term::bang(self.go(b)),
            Surface::Tuple(items) => {
                let mut t = empty();
                for item in items.iter().rev() {
                    let h = self.go(item);
                    t = Term::apps(cons(), [h, t]);
                }
                t
            }
            Surface::ListValue(items) => {
                let lowered: Vec<Term> = items.iter().map(|i| self.go(i)).collect();
                list_value(&lowered)
            }
            Surface::Cons(h, t) => {
                let h = self.go(h);
                let t = self.go(t);
                Term::apps(cons(), [h, t])
            }
            Surface::CaseList {
                scrutinee,
                nil,
                head,
                tail,
                cons,
            } => {
                let z = self.fresh("z");
                let expanded = apps(
                    (**scrutinee).clone(),
                    [
                        bang(lam(Linearity::Nonlinear, &z, (**nil).clone())),
                        bang(lam(
                            Linearity::Linear,
                            head,
                            lam(Linearity::Linear, tail, (**cons).clone()),
                        )),
                    ],
                );
                self.go(&expanded)
            }
            Surface::CaseNat {
                scrutinee,
                zero,
                pred,
                succ,
            } => {
                let z = self.fresh("z");
                let expanded = apps(
                    (**scrutinee).clone(),
                    [
                        bang(lam(Linearity::Nonlinear, &z, (**zero).clone())),
                        bang(lam(Linearity::Linear, pred, (**succ).clone())),
                    ],
                );
                self.go(&expanded)
            }
            Surface::Let(pat, value, body) => {
                let expanded = match pat {
                    Pattern::Var(x) => app(lam(Linearity::Linear, x, (**body).clone()), (**value).clone()),
                    Pattern::BangVar(x) => {
                        app(lam(Linearity::Nonlinear, x, (**body).clone()), (**value).clone())
                    }
                    Pattern::Tuple(names) => {
                        let lifted = self.linear_captures(body, names);
                        self.destructure((**value).clone(), names, None, &lifted, (**body).clone())
                    }
                    Pattern::Cons(h, t) => {
                        let shadowed = [h.clone(), t.clone()];
                        let lifted = self.linear_captures(body, &shadowed);
                        self.destructure(
                            (**value).clone(),
                            std::slice::from_ref(h),
                            Some(t),
                            &lifted,
                            (**body).clone(),
                        )
                    }
                };
                self.go(&expanded)
            }
        }
    }

    /// Binds `names` to the leading cells of the list `scrutinee`. With
    /// `tail` set, the remaining list is bound to it; otherwise the list must
    /// end exactly after `names`.
    fn destructure(
        &mut self,
        scrutinee: Surface,
        names: &[String],
        tail: Option<&String>,
        lifted: &[String],
        body: Surface,
    ) -> Surface {
        let mut bound: Vec<String> = Vec::new();
        self.level(scrutinee, names, tail, &mut bound, lifted, body)
    }

    fn level(
        &mut self,
        scrutinee: Surface,
        names: &[String],
        tail: Option<&String>,
        bound: &mut Vec<String>,
        lifted: &[String],
        body: Surface,
    ) -> Surface {
        let (x, rest) = names.split_first().expect("let patterns bind at least one name");
        let carried: Vec<String> = bound.iter().chain(lifted).cloned().collect();
        let t = match (rest.is_empty(), tail) {
            (true, Some(t)) => t.clone(),
            _ => self.fresh("t"),
        };
        bound.push(x.clone());
        let next = if !rest.is_empty() {
            self.level(var(&t), rest, tail, bound, lifted, body)
        } else if tail.is_some() {
            body
        } else {
            let done: Vec<String> = bound.iter().chain(lifted).cloned().collect();
            let z = self.fresh("z");
            let (h2, t2) = (self.fresh("h"), self.fresh("t"));
            let mut leftovers = vec![h2.clone(), t2.clone()];
            leftovers.extend(done.iter().cloned());
            apps(
                var(&t),
                [
                    bang(lam(Linearity::Nonlinear, &z, linear_lams(&done, body))),
                    bang(lam(
                        Linearity::Linear,
                        &h2,
                        lam(Linearity::Linear, &t2, linear_lams(&done, junk(&leftovers))),
                    )),
                ],
            )
            .pipe_apply(&done)
        };
        let z = self.fresh("z");
        apps(
            scrutinee,
            [
                bang(lam(Linearity::Nonlinear, &z, linear_lams(&carried, junk(&carried)))),
                bang(lam(
                    Linearity::Linear,
                    x,
                    lam(Linearity::Linear, &t, linear_lams(&carried, next)),
                )),
            ],
        )
        .pipe_apply(&carried)
    }
}

trait ApplyVars {
    fn pipe_apply(self, names: &[String]) -> Surface;
}

impl ApplyVars for Surface {
    fn pipe_apply(self, names: &[String]) -> Surface {
        apps(self, names.iter().map(|n| var(n)))
    }
}

#[cfg(test)]
mod tests {
    use crate::linearity::check_well_formed;
    use crate::syntax::parse;

    #[test]
    fn let_tuple_lifts_outer_linear_variables() {
        let t = parse("\\q.\\p. let (a, b) = p in [q, a, b]").unwrap();
        assert!(check_well_formed(&t).is_ok(), "{t}");
    }

    #[test]
    fn cons_pattern_keeps_tail() {
        let t = parse("\\l. let h:t = l in [t, h]").unwrap();
        assert!(check_well_formed(&t).is_ok());
    }

    #[test]
    fn pattern_names_shadow_outer_binders() {
        // the outer x is never used, so the program is rejected
        let t = parse("\\x.\\p. let (x, y) = p in [x, y]").unwrap();
        assert!(check_well_formed(&t).is_err());
    }
}
