//! Syntactic unification and the unification-based edge approximations for
//! dependency graphs.

use std::collections::BTreeSet;

use crate::rewrite::Trs;
use crate::term::{Rule, Substitution, Symbol, Term, Var};

/// Most general unifier of `t` and `u`, fully applied and idempotent.
pub fn unify(t: &Term, u: &Term) -> Option<Substitution> {
    let mut mgu = Substitution::new();
    let mut todo = vec![(t.clone(), u.clone())];
    while let Some((a, b)) = todo.pop() {
        let a = a.apply(&mgu);
        let b = b.apply(&mgu);
        if a == b {
            continue;
        }
        match (&a, &b) {
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.vars().contains(x) {
                    return None;
                }
                let bind: Substitution = [(*x, other.clone())].into_iter().collect();
                mgu = mgu.compose(&bind);
            }
            (Term::App(fa), Term::App(ga)) => {
                if fa.symbol() != ga.symbol() || fa.args().len() != ga.args().len() {
                    return None;
                }
                todo.extend(fa.args().iter().cloned().zip(ga.args().iter().cloned()));
            }
        }
    }
    Some(mgu)
}

pub fn unifiable(t: &Term, u: &Term) -> bool {
    unify(t, u).is_some()
}

/// Replaces every variable and every defined-headed subterm of `t` by fresh
/// variables `next_fresh, next_fresh+1, …` in pre-order. The result is
/// linear.
pub fn ren_cap(defined: &BTreeSet<Symbol>, next_fresh: Var, t: &Term) -> Term {
    fn go(defined: &BTreeSet<Symbol>, t: &Term, next: &mut Var) -> Term {
        match t.root() {
            Some(f) if !defined.contains(f) => Term::rebuild(
                f.clone(),
                t.args().iter().map(|u| go(defined, u, next)).collect(),
            ),
            _ => {
                let v = *next;
                *next += 1;
                Term::var(v)
            }
        }
    }
    let mut next = next_fresh;
    go(defined, t, &mut next)
}

/// Can an instance of `u` rewrite (below the root, any number of steps) to
/// an instance of `v`? Over-approximated by unifiability of `ren_cap(u)`
/// with `v`.
pub fn connectable(trs: &Trs, u: &Term, v: &Term) -> bool {
    let capped = ren_cap(&trs.defined_symbols(), v.maxvar() + 1, u);
    unifiable(&capped, v)
}

/// Edge iff the root of `r1`'s rhs equals the root of `r2`'s lhs; a variable
/// side always yields an edge.
pub fn hde_edge(r1: &Rule, r2: &Rule) -> bool {
    match (r1.rhs.root(), r2.lhs.root()) {
        (Some(f), Some(g)) => f == g,
        _ => true,
    }
}

pub fn dpg_unif_edge(trs: &Trs, r1: &Rule, r2: &Rule) -> bool {
    connectable(trs, &r1.rhs, &r2.lhs)
}

/// The graph approximations a decomposition may be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Approx {
    /// Equality of top symbols.
    Hde,
    /// Unifiability after renaming the cap.
    Unif,
}

impl Approx {
    pub fn name(self) -> &'static str {
        match self {
            Approx::Hde => "hde",
            Approx::Unif => "unif",
        }
    }

    /// The edge predicate, with `trs` the rules used below the root.
    pub fn edge<'a>(self, trs: &'a Trs) -> impl Fn(&Rule, &Rule) -> bool + 'a {
        let defined = trs.defined_symbols();
        move |r1, r2| match self {
            Approx::Hde => hde_edge(r1, r2),
            Approx::Unif => {
                let capped = ren_cap(&defined, r2.lhs.maxvar() + 1, &r1.rhs);
                unifiable(&capped, &r2.lhs)
            }
        }
    }
}

impl std::str::FromStr for Approx {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hde" => Ok(Approx::Hde),
            "unif" => Ok(Approx::Unif),
            other => Err(format!("unknown graph approximation `{other}`")),
        }
    }
}
