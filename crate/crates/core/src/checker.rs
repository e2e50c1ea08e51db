//! Certificate verification.
//!
//! A [`Proof`] is checked against a [`Problem`] step by step. Each step either
//! discharges the problem or produces the sub-problems its child proofs must
//! solve. The first failure, in tree order, is reported with its position in
//! the proof tree.

use std::fmt;

use thiserror::Error;

use crate::dp::{check_dp_preconditions, mark, mkdp, DpError};
use crate::graph::{check_decomposition, co_scc, DecompError};
use crate::poly::{PolyError, PolyInterpretation};
use crate::rewrite::Trs;
use crate::term::{Rule, Signature, Symbol};
use crate::unify::Approx;

/// A termination problem: full termination of a TRS, or relative top
/// termination of `top` steps modulo `modulo` steps anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Problem {
    Full(Trs),
    TopRel { modulo: Trs, top: Vec<Rule> },
}

impl Problem {
    pub fn sig(&self) -> &Signature {
        match self {
            Problem::Full(trs) => trs.sig(),
            Problem::TopRel { modulo, .. } => modulo.sig(),
        }
    }

    /// The rules whose steps must eventually be exhausted.
    pub fn counted_rules(&self) -> &[Rule] {
        match self {
            Problem::Full(trs) => trs.rules(),
            Problem::TopRel { top, .. } => top,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub rules: Vec<Rule>,
    pub proof: Option<Proof>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proof {
    DpTrans(Box<Proof>),
    Decomp {
        approx: Approx,
        components: Vec<Component>,
    },
    PolyOrd {
        interpretation: PolyInterpretation,
        sub: Box<Proof>,
    },
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Dp,
    Decomp,
    Component(usize),
    PolyOrd,
    Trivial,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Dp => f.write_str("dp"),
            Step::Decomp => f.write_str("decomp"),
            Step::Component(i) => write!(f, "component[{i}]"),
            Step::PolyOrd => f.write_str("manna_ness"),
            Step::Trivial => f.write_str("trivial"),
        }
    }
}

/// Location of a step in the proof tree, from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofPath(pub Vec<Step>);

impl ProofPath {
    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn last(&self) -> Option<Step> {
        self.0.last().copied()
    }
}

impl fmt::Display for ProofPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for s in &self.0 {
            write!(f, "/{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("dependency pair transformation requires a full termination problem")]
    NotAFullProblem,
    #[error("graph decomposition requires a dependency pair problem")]
    NotATopProblem,
    #[error("dependency pair preconditions fail: {0}")]
    DpPreconditionFailed(DpError),
    #[error("invalid decomposition: {0}")]
    Decomposition(#[from] DecompError),
    #[error("rule {0} is not well-formed over the problem signature")]
    IllFormedRule(Rule),
    #[error("component {0} has no proof and is not acyclic in the graph")]
    AcyclicCheckFailed(usize),
    #[error("interpretation of {0} has a negative coefficient")]
    NotWeaklyMonotone(Symbol),
    #[error("interpretation of {0} is not strictly monotone in every argument")]
    NotStronglyMonotone(Symbol),
    #[error("rule {rule} is not weakly decreasing: [lhs] - [rhs] = {difference}")]
    RuleNotWeaklyCompatible { rule: Rule, difference: String },
    #[error(transparent)]
    Interpretation(#[from] PolyError),
    #[error("{} rule(s) remain, first {}", .remaining.len(), .remaining[0])]
    NotTrivial { remaining: Vec<Rule> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { path: ProofPath, reason: CheckError },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("ACCEPTED"),
            Verdict::Rejected { path, reason } => write!(f, "REJECTED at {path}: {reason}"),
        }
    }
}

/// Dependency pair transformation: a full problem becomes the relative top
/// problem of the marked pairs modulo the original rules.
pub fn step_dp_trans(problem: &Problem) -> Result<Problem, CheckError> {
    let Problem::Full(trs) = problem else {
        return Err(CheckError::NotAFullProblem);
    };
    check_dp_preconditions(trs).map_err(CheckError::DpPreconditionFailed)?;
    let marked = mark(trs, &mkdp(trs)).map_err(CheckError::DpPreconditionFailed)?;
    Ok(Problem::TopRel {
        modulo: marked.trs,
        top: marked.pairs,
    })
}

/// Validates a decomposition of the pairs and returns, in order, the
/// sub-problem of every component that carries a proof. Components without
/// a proof must be acyclic.
pub fn step_decomp<'p>(
    problem: &Problem,
    approx: Approx,
    components: &'p [Component],
) -> Result<Vec<(usize, Problem, &'p Proof)>, CheckError> {
    let Problem::TopRel { modulo, top } = problem else {
        return Err(CheckError::NotATopProblem);
    };
    let sig = modulo.sig();
    for rule in components.iter().flat_map(|c| &c.rules) {
        if !sig.well_formed(&rule.lhs) || !sig.well_formed(&rule.rhs) {
            return Err(CheckError::IllFormedRule(rule.clone()));
        }
    }
    let edge = approx.edge(modulo);
    let cs: Vec<Vec<Rule>> = components.iter().map(|c| c.rules.clone()).collect();
    check_decomposition(&edge, top, &cs)?;
    let mut subs = Vec::new();
    for (i, c) in components.iter().enumerate() {
        match &c.proof {
            None if !co_scc(&edge, &c.rules) => return Err(CheckError::AcyclicCheckFailed(i)),
            None => {}
            Some(p) => subs.push((
                i,
                Problem::TopRel {
                    modulo: modulo.clone(),
                    top: c.rules.clone(),
                },
                p,
            )),
        }
    }
    Ok(subs)
}

/// Rule removal with a polynomial interpretation: all rules must weakly
/// decrease; strictly decreasing counted rules are dropped.
pub fn step_poly_ord(problem: &Problem, pi: &PolyInterpretation) -> Result<Problem, CheckError> {
    let pi = pi.restrict(problem.sig())?;
    let weakly = |rule: &Rule| -> Result<(), CheckError> {
        let difference = pi.rule_poly_ge(rule)?;
        if difference.coef_pos() {
            Ok(())
        } else {
            Err(CheckError::RuleNotWeaklyCompatible {
                rule: rule.clone(),
                difference: difference.to_string(),
            })
        }
    };
    let keep_non_strict = |rules: &[Rule]| -> Result<Vec<Rule>, CheckError> {
        let mut kept = Vec::new();
        for rule in rules {
            if !pi.strictly_decreasing(rule)? {
                kept.push(rule.clone());
            }
        }
        Ok(kept)
    };
    match problem {
        Problem::Full(trs) => {
            if let Some(f) = pi.not_strongly_monotone() {
                return Err(CheckError::NotStronglyMonotone(f.clone()));
            }
            trs.rules().iter().try_for_each(weakly)?;
            let kept = keep_non_strict(trs.rules())?;
            Ok(Problem::Full(
                trs.with_rules(kept).expect("subset of well-formed rules"),
            ))
        }
        Problem::TopRel { modulo, top } => {
            if let Some(f) = pi.not_weakly_monotone() {
                return Err(CheckError::NotWeaklyMonotone(f.clone()));
            }
            modulo.rules().iter().try_for_each(weakly)?;
            top.iter().try_for_each(weakly)?;
            Ok(Problem::TopRel {
                modulo: modulo.clone(),
                top: keep_non_strict(top)?,
            })
        }
    }
}

/// Succeeds iff no counted rule is left.
pub fn step_trivial(problem: &Problem) -> Result<(), CheckError> {
    let remaining = problem.counted_rules();
    if remaining.is_empty() {
        Ok(())
    } else {
        Err(CheckError::NotTrivial {
            remaining: remaining.to_vec(),
        })
    }
}

pub fn check(problem: &Problem, proof: &Proof) -> Verdict {
    let mut path = Vec::new();
    match check_at(problem, proof, &mut path) {
        Ok(()) => Verdict::Accepted,
        Err(reason) => Verdict::Rejected {
            path: ProofPath(path),
            reason,
        },
    }
}

/// On error, `path` is left pointing at the failing step.
fn check_at(problem: &Problem, proof: &Proof, path: &mut Vec<Step>) -> Result<(), CheckError> {
    match proof {
        Proof::Trivial => {
            path.push(Step::Trivial);
            step_trivial(problem)?;
        }
        Proof::DpTrans(sub) => {
            path.push(Step::Dp);
            let next = step_dp_trans(problem)?;
            check_at(&next, sub, path)?;
        }
        Proof::PolyOrd {
            interpretation,
            sub,
        } => {
            path.push(Step::PolyOrd);
            let next = step_poly_ord(problem, interpretation)?;
            check_at(&next, sub, path)?;
        }
        Proof::Decomp { approx, components } => {
            path.push(Step::Decomp);
            let subs = step_decomp(problem, *approx, components).map_err(|e| {
                if let CheckError::AcyclicCheckFailed(i) = e {
                    path.push(Step::Component(i));
                }
                e
            })?;
            for (i, sub_problem, sub_proof) in subs {
                path.push(Step::Component(i));
                check_at(&sub_problem, sub_proof, path)?;
                path.pop();
            }
        }
    }
    path.pop();
    Ok(())
}
