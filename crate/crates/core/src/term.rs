//! Signatures, first-order terms, substitutions, contexts and rules.
//!
//! Terms are built through [`Signature::app`], which rejects applications
//! whose argument count differs from the symbol's arity. Operations that
//! only rearrange existing well-formed subterms (substitution, context
//! filling, root relabelling) preserve that invariant and construct nodes
//! directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Variables are natural-number indices.
pub type Var = usize;

/// Path from the root to a subterm: 0-based child indices.
pub type Position = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("symbol {symbol} expects {expected} argument(s), got {got}")]
    ArityMismatch {
        symbol: Symbol,
        expected: usize,
        got: usize,
    },
    #[error("symbol {0} is not declared in the signature")]
    UnknownSymbol(Symbol),
    #[error("symbol {symbol} declared with arity {existing} and {requested}")]
    ArityConflict {
        symbol: Symbol,
        existing: usize,
        requested: usize,
    },
}

/// A function symbol. Identity is the name together with the mark flag, so
/// `f` and its sharped copy `f#` are distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    marked: bool,
}

impl Symbol {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Symbol {
            name: name.into(),
            marked: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_marked(&self) -> bool {
        self.marked
    }

    /// The sharped copy of this symbol.
    pub fn marked(&self) -> Symbol {
        Symbol {
            name: self.name.clone(),
            marked: true,
        }
    }

    pub fn unmarked(&self) -> Symbol {
        Symbol {
            name: self.name.clone(),
            marked: false,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.marked {
            write!(f, "{}#", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// A finite set of symbols, each with exactly one arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a signature from `(name, arity)` pairs of unmarked symbols.
    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = (&'a str, usize)>,
    ) -> Result<Self, TermError> {
        let mut sig = Signature::new();
        for (name, arity) in pairs {
            sig.declare(Symbol::new(name), arity)?;
        }
        Ok(sig)
    }

    /// Adds `symbol` with `arity`. Re-declaring with the same arity is a no-op.
    pub fn declare(&mut self, symbol: Symbol, arity: usize) -> Result<(), TermError> {
        match self.arities.get(&symbol) {
            Some(&existing) if existing != arity => Err(TermError::ArityConflict {
                symbol,
                existing,
                requested: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(symbol, arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, symbol: &Symbol) -> Option<usize> {
        self.arities.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.arities.contains_key(symbol)
    }

    /// Looks up an unmarked symbol by name.
    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        let s = Symbol::new(name);
        self.contains(&s).then_some(s)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.arities.iter().map(|(s, &a)| (s, a))
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// Checked application: the only public way to build an application node.
    pub fn app(&self, symbol: &Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        let expected = self
            .arity(symbol)
            .ok_or_else(|| TermError::UnknownSymbol(symbol.clone()))?;
        if expected != args.len() {
            return Err(TermError::ArityMismatch {
                symbol: symbol.clone(),
                expected,
                got: args.len(),
            });
        }
        Ok(Term::App(App {
            symbol: symbol.clone(),
            args,
        }))
    }

    /// Same as [`Signature::app`] with the symbol looked up by name (unmarked).
    pub fn apply(&self, name: &str, args: Vec<Term>) -> Result<Term, TermError> {
        self.app(&Symbol::new(name), args)
    }

    /// Constant (nullary application) shorthand.
    pub fn constant(&self, name: &str) -> Result<Term, TermError> {
        self.apply(name, Vec::new())
    }

    /// Recursive audit of the arity invariant.
    pub fn well_formed(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(a) => {
                self.arity(&a.symbol) == Some(a.args.len())
                    && a.args.iter().all(|u| self.well_formed(u))
            }
        }
    }

    /// Signatures are compatible iff they agree on the arity of shared symbols.
    pub fn is_compatible(&self, other: &Signature) -> bool {
        self.arities
            .iter()
            .all(|(s, a)| other.arity(s).is_none_or(|b| b == *a))
    }

    /// Union of two compatible signatures.
    pub fn merge(&self, other: &Signature) -> Result<Signature, TermError> {
        let mut out = self.clone();
        for (s, a) in other.symbols() {
            out.declare(s.clone(), a)?;
        }
        Ok(out)
    }

    /// The sharped extension: every unmarked symbol duplicated with its
    /// marked copy at the same arity.
    pub fn with_marks(&self) -> Signature {
        let mut out = self.clone();
        for (s, a) in self.symbols() {
            if !s.is_marked() {
                out.arities.insert(s.marked(), a);
            }
        }
        out
    }
}

/// An application node. Fields are private so that only the checked
/// constructors can produce one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct App {
    symbol: Symbol,
    args: Vec<Term>,
}

impl App {
    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(App),
}

impl Term {
    /// Rebuilds a node from a symbol of an existing node and new arguments of
    /// the same count.
    pub(crate) fn rebuild(symbol: Symbol, args: Vec<Term>) -> Term {
        Term::App(App { symbol, args })
    }

    pub fn var(x: Var) -> Term {
        Term::Var(x)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(a) => Some(&a.symbol),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(a) => &a.args,
        }
    }

    /// The same term with its root symbol replaced by one of equal arity.
    pub fn with_root(&self, symbol: Symbol) -> Option<Term> {
        match self {
            Term::Var(_) => None,
            Term::App(a) => Some(Term::rebuild(symbol, a.args.clone())),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(x) => {
                out.insert(*x);
            }
            Term::App(a) => a.args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Largest variable index, 0 for ground terms.
    pub fn maxvar(&self) -> Var {
        match self {
            Term::Var(x) => *x,
            Term::App(a) => a.args.iter().map(Term::maxvar).max().unwrap_or(0),
        }
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn vars_in_order(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(*x);
                }
            }
            Term::App(a) => a.args.iter().for_each(|t| t.vars_in_order(out)),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (_, t) in self.subterms() {
            if let Some(f) = t.root() {
                out.insert(f.clone());
            }
        }
        out
    }

    /// All subterms in pre-order, the term itself first at the empty position.
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut pos = Vec::new();
        self.collect_subterms(&mut pos, &mut out);
        out
    }

    fn collect_subterms<'a>(&'a self, pos: &mut Position, out: &mut Vec<(Position, &'a Term)>) {
        out.push((pos.clone(), self));
        for (i, t) in self.args().iter().enumerate() {
            pos.push(i);
            t.collect_subterms(pos, out);
            pos.pop();
        }
    }

    pub fn subterm_at(&self, pos: &[usize]) -> Option<&Term> {
        pos.iter().try_fold(self, |t, &i| t.args().get(i))
    }

    /// True iff `self` occurs in `t` at a non-empty position.
    pub fn is_strict_subterm_of(&self, t: &Term) -> bool {
        t.args()
            .iter()
            .any(|u| u == self || self.is_strict_subterm_of(u))
    }

    pub fn is_subterm_of(&self, t: &Term) -> bool {
        self == t || self.is_strict_subterm_of(t)
    }

    pub fn apply(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(x) => s.get(*x).cloned().unwrap_or(Term::Var(*x)),
            Term::App(a) => Term::rebuild(
                a.symbol.clone(),
                a.args.iter().map(|t| t.apply(s)).collect(),
            ),
        }
    }

    /// Renames variables through `map`; unmapped variables are kept.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Term {
        match self {
            Term::Var(x) => Term::Var(*map.get(x).unwrap_or(x)),
            Term::App(a) => Term::rebuild(
                a.symbol.clone(),
                a.args.iter().map(|t| t.rename(map)).collect(),
            ),
        }
    }

    /// The context obtained by punching a hole at `pos`.
    pub fn context_at(&self, pos: &[usize]) -> Option<Context> {
        match pos.split_first() {
            None => Some(Context::Hole),
            Some((&i, rest)) => {
                let Term::App(a) = self else { return None };
                let inner = a.args.get(i)?.context_at(rest)?;
                Some(Context::Node {
                    symbol: a.symbol.clone(),
                    before: a.args[..i].to_vec(),
                    inner: Box::new(inner),
                    after: a.args[i + 1..].to_vec(),
                })
            }
        }
    }

    /// Replaces the subterm at `pos` by `new`.
    pub fn replace_at(&self, pos: &[usize], new: Term) -> Option<Term> {
        Some(self.context_at(pos)?.fill(new))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "x{x}"),
            Term::App(a) => {
                write!(f, "{}", a.symbol)?;
                if !a.args.is_empty() {
                    f.write_str("(")?;
                    for (i, t) in a.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{t}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Finite map from variables to terms; variables outside the domain are
/// mapped to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: Var) -> Option<&Term> {
        self.map.get(&x)
    }

    pub fn insert(&mut self, x: Var, t: Term) -> Option<Term> {
        self.map.insert(x, t)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Term)> {
        self.map.iter().map(|(x, t)| (*x, t))
    }

    /// `self ; then`: first apply `self`, then `then`.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        let mut map: BTreeMap<Var, Term> =
            self.map.iter().map(|(x, t)| (*x, t.apply(then))).collect();
        for (x, t) in &then.map {
            map.entry(*x).or_insert_with(|| t.clone());
        }
        map.retain(|x, t| *t != Term::Var(*x));
        Substitution { map }
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "x{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// Computes the unique substitution `s` on `vars(pattern)` with
/// `pattern.apply(s) == subject`, if there is one.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    let mut todo = vec![(pattern, subject)];
    while let Some((p, t)) = todo.pop() {
        match p {
            Term::Var(x) => match s.get(*x) {
                Some(bound) if bound != t => return None,
                Some(_) => {}
                None => {
                    s.insert(*x, t.clone());
                }
            },
            Term::App(pa) => {
                let Term::App(ta) = t else { return None };
                if pa.symbol != ta.symbol || pa.args.len() != ta.args.len() {
                    return None;
                }
                todo.extend(pa.args.iter().zip(ta.args.iter()));
            }
        }
    }
    Some(s)
}

/// A term with exactly one hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Context {
    Hole,
    Node {
        symbol: Symbol,
        before: Vec<Term>,
        inner: Box<Context>,
        after: Vec<Term>,
    },
}

impl Context {
    /// Checked node constructor: `before.len() + 1 + after.len()` must equal
    /// the symbol's arity.
    pub fn node(
        sig: &Signature,
        symbol: &Symbol,
        before: Vec<Term>,
        inner: Context,
        after: Vec<Term>,
    ) -> Result<Context, TermError> {
        let expected = sig
            .arity(symbol)
            .ok_or_else(|| TermError::UnknownSymbol(symbol.clone()))?;
        let got = before.len() + 1 + after.len();
        if expected != got {
            return Err(TermError::ArityMismatch {
                symbol: symbol.clone(),
                expected,
                got,
            });
        }
        Ok(Context::Node {
            symbol: symbol.clone(),
            before,
            inner: Box::new(inner),
            after,
        })
    }

    pub fn fill(&self, t: Term) -> Term {
        match self {
            Context::Hole => t,
            Context::Node {
                symbol,
                before,
                inner,
                after,
            } => {
                let mut args = Vec::with_capacity(before.len() + 1 + after.len());
                args.extend(before.iter().cloned());
                args.push(inner.fill(t));
                args.extend(after.iter().cloned());
                Term::rebuild(symbol.clone(), args)
            }
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Context::Hole)
    }

    pub fn hole_position(&self) -> Position {
        let mut pos = Vec::new();
        let mut c = self;
        while let Context::Node { before, inner, .. } = c {
            pos.push(before.len());
            c = inner;
        }
        pos
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Rule { lhs, rhs }
    }

    pub fn maxvar(&self) -> Var {
        self.lhs.maxvar().max(self.rhs.maxvar())
    }

    /// Variables renamed to 0, 1, … in order of first occurrence in the lhs
    /// and then the rhs. Two rules are variants of each other iff their
    /// canonical forms are equal.
    pub fn canonical(&self) -> Rule {
        let mut order = Vec::new();
        self.lhs.vars_in_order(&mut order);
        self.rhs.vars_in_order(&mut order);
        let map = order.into_iter().enumerate().map(|(i, x)| (x, i)).collect();
        Rule::new(self.lhs.rename(&map), self.rhs.rename(&map))
    }

    pub fn is_variant_of(&self, other: &Rule) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}
