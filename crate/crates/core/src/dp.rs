//! Dependency pairs: defined symbols, pair extraction, marking, and the
//! constructor cap / alien decomposition.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::rewrite::{Trs, TrsError};
use crate::term::{Rule, Signature, Substitution, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("left-hand side of rule {0} is a variable")]
    VarLhs(usize),
    #[error("rule {rule} introduces variable x{var} not occurring in its left-hand side")]
    FreshRhsVar { rule: usize, var: Var },
    #[error("dependency pair {0} has a variable side and cannot be marked")]
    RootIsVariable(Rule),
    #[error(transparent)]
    Trs(#[from] TrsError),
}

pub fn defined_symbols(trs: &Trs) -> BTreeSet<Symbol> {
    trs.defined_symbols()
}

/// No left-hand side is a variable and every rule preserves variables.
pub fn check_dp_preconditions(trs: &Trs) -> Result<(), DpError> {
    for (i, rule) in trs.rules().iter().enumerate() {
        if rule.lhs.is_var() {
            return Err(DpError::VarLhs(i));
        }
        let lhs_vars = rule.lhs.vars();
        if let Some(&var) = rule.rhs.vars().difference(&lhs_vars).next() {
            return Err(DpError::FreshRhsVar { rule: i, var });
        }
    }
    Ok(())
}

/// Subterms of `t` headed by a defined symbol, in pre-order. Nested calls
/// and duplicates are kept.
pub fn calls(defined: &BTreeSet<Symbol>, t: &Term) -> Vec<Term> {
    t.subterms()
        .into_iter()
        .filter(|(_, s)| s.root().is_some_and(|f| defined.contains(f)))
        .map(|(_, s)| s.clone())
        .collect()
}

/// Unmarked dependency pairs, in rule order then call order.
pub fn mkdp(trs: &Trs) -> Vec<Rule> {
    let defined = trs.defined_symbols();
    trs.rules()
        .iter()
        .flat_map(|rule| {
            calls(&defined, &rule.rhs)
                .into_iter()
                .filter(|s| !s.is_strict_subterm_of(&rule.lhs))
                .map(|s| Rule::new(rule.lhs.clone(), s))
        })
        .collect()
}

/// Output of [`mark`]: the sharped signature, the original rules over it,
/// and the pairs with both roots marked.
#[derive(Debug, Clone)]
pub struct Marked {
    pub sig: Signature,
    pub trs: Trs,
    pub pairs: Vec<Rule>,
}

pub fn mark(trs: &Trs, pairs: &[Rule]) -> Result<Marked, DpError> {
    let sig = trs.sig().with_marks();
    let marked = pairs
        .iter()
        .map(|p| {
            let lhs = mark_root(&p.lhs);
            let rhs = mark_root(&p.rhs);
            match (lhs, rhs) {
                (Some(lhs), Some(rhs)) => Ok(Rule::new(lhs, rhs)),
                _ => Err(DpError::RootIsVariable(p.clone())),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Marked {
        trs: trs.with_sig(sig.clone())?,
        sig,
        pairs: marked,
    })
}

fn mark_root(t: &Term) -> Option<Term> {
    t.with_root(t.root()?.marked())
}

pub fn unmark_root(t: &Term) -> Term {
    match t.root() {
        Some(f) => t.with_root(f.unmarked()).expect("application"),
        None => t.clone(),
    }
}

/// Constructor cap of a term and the aliens it abstracts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapResult {
    pub cap: Term,
    pub aliens: Vec<Term>,
    pub alien_subst: Substitution,
}

impl CapResult {
    pub fn alien_count(&self) -> usize {
        self.aliens.len()
    }
}

/// Replaces each maximal defined-headed subterm of `t` by a fresh variable
/// `maxvar(t)+1, maxvar(t)+2, …`, left to right.
pub fn cap(trs: &Trs, t: &Term) -> CapResult {
    fn go(defined: &BTreeSet<Symbol>, t: &Term, next: &mut Var, aliens: &mut Vec<Term>) -> Term {
        match t.root() {
            None => t.clone(),
            Some(f) if defined.contains(f) => {
                aliens.push(t.clone());
                let v = *next;
                *next += 1;
                Term::var(v)
            }
            Some(f) => Term::rebuild(
                f.clone(),
                t.args()
                    .iter()
                    .map(|u| go(defined, u, next, aliens))
                    .collect(),
            ),
        }
    }

    let defined = trs.defined_symbols();
    let base = t.maxvar() + 1;
    let mut next = base;
    let mut aliens = Vec::new();
    let cap = go(&defined, t, &mut next, &mut aliens);
    let alien_subst = aliens
        .iter()
        .enumerate()
        .map(|(i, a)| (base + i, a.clone()))
        .collect();
    CapResult {
        cap,
        aliens,
        alien_subst,
    }
}
