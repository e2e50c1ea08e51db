//! One-step rewriting as finite successor enumeration.
//!
//! Successors are listed rule by rule (in rule order), and for each rule by
//! redex position in pre-order, so outputs are deterministic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::term::{match_term, Position, Rule, Signature, Substitution, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error("rule {index} ({rule}) is not well-formed over the signature")]
    IllFormedRule { index: usize, rule: Rule },
}

/// A finite, ordered list of rules over a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trs {
    sig: Signature,
    rules: Vec<Rule>,
}

impl Trs {
    pub fn new(sig: Signature, rules: Vec<Rule>) -> Result<Self, TrsError> {
        for (index, rule) in rules.iter().enumerate() {
            if !sig.well_formed(&rule.lhs) || !sig.well_formed(&rule.rhs) {
                return Err(TrsError::IllFormedRule {
                    index,
                    rule: rule.clone(),
                });
            }
        }
        Ok(Trs { sig, rules })
    }

    pub fn empty(sig: Signature) -> Self {
        Trs {
            sig,
            rules: Vec::new(),
        }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// The same rules over a larger compatible signature.
    pub fn with_sig(&self, sig: Signature) -> Result<Trs, TrsError> {
        Trs::new(sig, self.rules.clone())
    }

    /// The same signature with a different rule list.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Result<Trs, TrsError> {
        Trs::new(self.sig.clone(), rules)
    }

    /// Root symbols of left-hand sides.
    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.rules
            .iter()
            .filter_map(|r| r.lhs.root().cloned())
            .collect()
    }
}

/// Witness for one rewrite step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: usize,
    pub position: Position,
    pub subst: Substitution,
    pub result: Term,
}

impl RewriteStep {
    /// Recomputes the reduct from `source` and checks it against `result`.
    pub fn replays(&self, trs: &Trs, source: &Term) -> bool {
        let Some(rule) = trs.rules().get(self.rule) else {
            return false;
        };
        let Some(redex) = source.subterm_at(&self.position) else {
            return false;
        };
        if rule.lhs.apply(&self.subst) != *redex {
            return false;
        }
        match source.context_at(&self.position) {
            Some(c) => c.fill(rule.rhs.apply(&self.subst)) == self.result,
            None => false,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Where {
    Anywhere,
    Root,
    BelowRoot,
}

fn enumerate(trs: &Trs, t: &Term, at: Where) -> Vec<RewriteStep> {
    let subterms = t.subterms();
    let mut out = Vec::new();
    for (index, rule) in trs.rules().iter().enumerate() {
        for (pos, u) in &subterms {
            let ok = match at {
                Where::Anywhere => true,
                Where::Root => pos.is_empty(),
                Where::BelowRoot => !pos.is_empty(),
            };
            if !ok {
                continue;
            }
            if let Some(subst) = match_term(&rule.lhs, u) {
                let contractum = rule.rhs.apply(&subst);
                let result = t
                    .replace_at(pos, contractum)
                    .expect("position comes from the subterm enumeration");
                out.push(RewriteStep {
                    rule: index,
                    position: pos.clone(),
                    subst,
                    result,
                });
            }
        }
    }
    out
}

/// All one-step successors of `t`.
pub fn reducts(trs: &Trs, t: &Term) -> Vec<RewriteStep> {
    enumerate(trs, t, Where::Anywhere)
}

/// Successors by a step at the root.
pub fn hd_reducts(trs: &Trs, t: &Term) -> Vec<RewriteStep> {
    enumerate(trs, t, Where::Root)
}

/// Successors by a step strictly below the root.
pub fn int_reducts(trs: &Trs, t: &Term) -> Vec<RewriteStep> {
    enumerate(trs, t, Where::BelowRoot)
}

/// Every term reachable from `t` in at most `steps` steps, `t` included.
/// With `internal_only`, only steps below the root are taken.
pub fn descendants(trs: &Trs, t: &Term, steps: usize, internal_only: bool) -> BTreeSet<Term> {
    let mut seen = BTreeSet::from([t.clone()]);
    let mut frontier = vec![t.clone()];
    for _ in 0..steps {
        let mut next = Vec::new();
        for u in &frontier {
            let succ = if internal_only {
                int_reducts(trs, u)
            } else {
                reducts(trs, u)
            };
            for step in succ {
                if seen.insert(step.result.clone()) {
                    next.push(step.result);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

/// A rewrite trace `trace[0] -> … -> trace[k]` whose last term contains an
/// instance of `trace[earlier]` as a subterm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loop {
    pub trace: Vec<Term>,
    pub earlier: usize,
}

/// Depth-bounded search for a looping trace from any of `seeds`.
///
/// This only ever proves non-termination: `None` means no loop of length at
/// most `depth` exists from the given seeds.
pub fn bounded_search_nonterm(trs: &Trs, seeds: &[Term], depth: usize) -> Option<Loop> {
    fn go(trs: &Trs, trace: &mut Vec<Term>, depth: usize) -> Option<Loop> {
        if trace.len() > depth {
            return None;
        }
        let last = trace.last().expect("trace is never empty").clone();
        for step in reducts(trs, &last) {
            let next = step.result;
            let found = trace.iter().position(|earlier| {
                next.subterms()
                    .iter()
                    .any(|(_, s)| match_term(earlier, s).is_some())
            });
            trace.push(next);
            if let Some(earlier) = found {
                return Some(Loop {
                    trace: trace.clone(),
                    earlier,
                });
            }
            if let Some(l) = go(trs, trace, depth) {
                return Some(l);
            }
            trace.pop();
        }
        None
    }

    seeds.iter().find_map(|seed| {
        let mut trace = vec![seed.clone()];
        go(trs, &mut trace, depth)
    })
}

/// Left-hand sides with every variable replaced by `ground`.
pub fn ground_lhs_seeds(trs: &Trs, ground: &Term) -> Vec<Term> {
    trs.rules()
        .iter()
        .map(|r| {
            let s = r
                .lhs
                .vars()
                .into_iter()
                .map(|x| (x, ground.clone()))
                .collect();
            r.lhs.apply(&s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Context;
    use crate::testing::*;
    use proptest::prelude::*;

    #[test]
    fn trs_rejects_ill_formed_rules() {
        let sig = r8_sig();
        let bad = Term::rebuild(Symbol::new("succ"), vec![]);
        let err = Trs::new(sig, vec![Rule::new(bad, Term::var(0))]).unwrap_err();
        assert!(matches!(err, TrsError::IllFormedRule { index: 0, .. }));
    }

    #[test]
    fn full_reducts() {
        let (r, b) = (r8(), b());
        let steps = reducts(&r, &b.minus(b.zero()));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].result, b.zero());
        assert!(reducts(&r, &Term::var(0)).is_empty());
        let steps = reducts(&r, &b.quot(b.zero(), b.succ(b.zero())));
        assert_eq!(steps.len(), 1);
        assert_eq!((steps[0].rule, steps[0].result.clone()), (2, b.zero()));
        assert!(steps[0].position.is_empty());
    }

    #[test]
    fn root_reducts() {
        let (r, b) = (r8(), b());
        assert!(hd_reducts(&r, &b.succ(b.minus(b.zero()))).is_empty());
        let steps = hd_reducts(&r, &b.minus(b.succ(b.zero())));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].result, b.succ(b.minus(b.zero())));
        assert!(hd_reducts(&r, &Term::var(1)).is_empty());
    }

    #[test]
    fn internal_reducts() {
        let (r, b) = (r8(), b());
        let steps = int_reducts(&r, &b.succ(b.minus(b.zero())));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].result, b.succ(b.zero()));
        assert_eq!(steps[0].position, vec![0]);
        assert!(int_reducts(&r, &b.minus(b.zero())).is_empty());
        assert!(int_reducts(&r, &b.zero()).is_empty());
    }

    #[test]
    fn r8_has_no_short_loop() {
        let (r, b) = (r8(), b());
        let seeds = ground_lhs_seeds(&r, &b.zero());
        assert_eq!(seeds.len(), 4);
        assert_eq!(bounded_search_nonterm(&r, &seeds, 6), None);
    }

    #[test]
    fn finds_trivial_loop() {
        let sig = Signature::from_pairs([("a", 0)]).unwrap();
        let a = sig.constant("a").unwrap();
        let r = Trs::new(sig, vec![Rule::new(a.clone(), a.clone())]).unwrap();
        let l = bounded_search_nonterm(&r, std::slice::from_ref(&a), 1).unwrap();
        assert_eq!(l.trace, vec![a.clone(), a]);
        assert_eq!(l.earlier, 0);
    }

    #[test]
    fn finds_growing_loop() {
        let sig = Signature::from_pairs([("f", 1), ("zero", 0)]).unwrap();
        let f = |t| sig.apply("f", vec![t]).unwrap();
        let rule = Rule::new(f(Term::var(0)), f(f(Term::var(0))));
        let r = Trs::new(sig.clone(), vec![rule]).unwrap();
        let seed = f(sig.constant("zero").unwrap());
        let l = bounded_search_nonterm(&r, &[seed], 2).unwrap();
        assert_eq!(l.trace.len(), 2);
    }

    #[test]
    fn descendants_are_bounded() {
        let (r, b) = (r8(), b());
        let t = b.quot(b.succ(b.zero()), b.succ(b.zero()));
        let all = descendants(&r, &t, 10, false);
        assert!(all.contains(&b.succ(b.zero())));
        let internal = descendants(&r, &t, 10, true);
        assert_eq!(internal, BTreeSet::from([t]));
    }

    fn arb_ground(depth: u32) -> impl Strategy<Value = Term> {
        let b = b();
        let leaf = prop_oneof![Just(b.zero()), (0usize..3).prop_map(Term::var)];
        leaf.prop_recursive(depth, 32, 2, |inner| {
            let b = crate::testing::b();
            let b2 = crate::testing::b();
            let b3 = crate::testing::b();
            prop_oneof![
                inner.clone().prop_map(move |t| b.succ(t)),
                inner.clone().prop_map(move |t| b2.minus(t)),
                (inner.clone(), inner).prop_map(move |(u, v)| b3.quot(u, v)),
            ]
        })
    }

    proptest! {
        #[test]
        fn partition_and_replay(t in arb_ground(4)) {
            let r = r8();
            let all = reducts(&r, &t);
            let hd = hd_reducts(&r, &t);
            let int = int_reducts(&r, &t);
            prop_assert_eq!(all.len(), hd.len() + int.len());
            for s in &all {
                prop_assert!(s.replays(&r, &t));
                let bucket = if s.position.is_empty() { &hd } else { &int };
                prop_assert!(bucket.contains(s));
            }
            prop_assert!(all.len() <= r.len() * t.subterms().len());
        }

        #[test]
        fn closure_under_context(t in arb_ground(3), wrap in 0usize..3) {
            let (r, b) = (r8(), b());
            let c = match wrap {
                0 => Context::Hole,
                1 => Context::node(r.sig(), &Symbol::new("succ"), vec![], Context::Hole, vec![]).unwrap(),
                _ => Context::node(r.sig(), &Symbol::new("quot"), vec![b.zero()], Context::Hole, vec![]).unwrap(),
            };
            let outer: Vec<Term> = reducts(&r, &c.fill(t.clone())).into_iter().map(|s| s.result).collect();
            for s in reducts(&r, &t) {
                prop_assert!(outer.contains(&c.fill(s.result)));
            }
        }

        #[test]
        fn closure_under_substitution(t in arb_ground(3), u in arb_ground(2)) {
            let r = r8();
            let sigma: Substitution = [(0, u.clone()), (1, u)].into_iter().collect();
            let targets: Vec<Term> = hd_reducts(&r, &t.apply(&sigma)).into_iter().map(|s| s.result).collect();
            for s in hd_reducts(&r, &t) {
                prop_assert!(targets.contains(&s.result.apply(&sigma)));
            }
        }
    }
}
