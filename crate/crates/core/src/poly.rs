//! Integer polynomials in a fixed number of variables and polynomial
//! interpretations of signatures over the natural numbers.
//!
//! A [`Polynomial`] is a list of `(coefficient, monomial)` pairs and need not
//! be canonical: the same monomial may occur several times. Its meaning is
//! given by [`Polynomial::coef`], which sums over duplicates. Arithmetic
//! results are normalized (duplicates merged, zero coefficients dropped),
//! which does not change any coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::term::{Rule, Signature, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial dimension mismatch: expected {expected} variable(s), got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable x{var} exceeds the bound {bound}")]
    BoundExceeded { var: Var, bound: Var },
    #[error("no interpretation for symbol {0}")]
    MissingInterpretation(Symbol),
    #[error("interpretation of {symbol} has {nvars} variable(s) but the symbol has arity {arity}")]
    ArityMismatch {
        symbol: Symbol,
        arity: usize,
        nvars: usize,
    },
}

fn same_dim(expected: usize, got: usize) -> Result<(), PolyError> {
    if expected == got {
        Ok(())
    } else {
        Err(PolyError::DimensionMismatch { expected, got })
    }
}

/// Exponent vector: `[3, 1]` is `x_1^3 x_2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The constant monomial in `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// `x_i` (0-based `i`) in `n` variables.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

#[derive(Debug, Clone)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(BigInt, Monomial)>,
}

impl Polynomial {
    /// Raw constructor; keeps the given representation as is.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (BigInt, Monomial)>,
    ) -> Result<Self, PolyError> {
        let terms: Vec<_> = terms.into_iter().collect();
        for (_, m) in &terms {
            same_dim(nvars, m.nvars())?;
        }
        Ok(Polynomial { nvars, terms })
    }

    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Polynomial {
            nvars,
            terms: vec![(c.into(), Monomial::one(nvars))],
        }
        .normalized()
    }

    /// The polynomial `x_i` (0-based `i`) in `nvars` variables.
    pub fn var(nvars: usize, i: usize) -> Result<Self, PolyError> {
        if i >= nvars {
            return Err(PolyError::DimensionMismatch {
                expected: nvars,
                got: i + 1,
            });
        }
        Ok(Polynomial {
            nvars,
            terms: vec![(BigInt::one(), Monomial::var(nvars, i))],
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// The stored representation, possibly with repeated monomials.
    pub fn terms(&self) -> &[(BigInt, Monomial)] {
        &self.terms
    }

    /// Sum of the coefficients of every entry whose monomial is `m`.
    pub fn coef(&self, m: &Monomial) -> Result<BigInt, PolyError> {
        same_dim(self.nvars, m.nvars())?;
        Ok(self
            .terms
            .iter()
            .filter(|(_, m2)| m2 == m)
            .map(|(c, _)| c)
            .sum())
    }

    /// Merged, zero-free representation sorted by monomial.
    pub fn normalized(&self) -> Self {
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (c, m) in &self.terms {
            *acc.entry(m.clone()).or_default() += c;
        }
        Polynomial {
            nvars: self.nvars,
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (c, m))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.normalized().terms.is_empty()
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        same_dim(self.nvars, other.nvars)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Ok(Polynomial {
            nvars: self.nvars,
            terms,
        }
        .normalized())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(c, m)| (-c, m.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        same_dim(self.nvars, other.nvars)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, m1) in &self.terms {
            for (c2, m2) in &other.terms {
                terms.push((c1 * c2, m1.mul(m2)));
            }
        }
        Ok(Polynomial {
            nvars: self.nvars,
            terms,
        }
        .normalized())
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.nvars, 1);
        for _ in 0..k {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// Substitutes `qs[i]` for `x_i`. All `qs` must share one dimension `m`;
    /// the result lives in `m` variables.
    pub fn compose(&self, qs: &[Polynomial]) -> Result<Polynomial, PolyError> {
        same_dim(self.nvars, qs.len())?;
        let m = match qs.first() {
            Some(q) => q.nvars,
            // A polynomial in zero variables is a constant; keep dimension 0.
            None => 0,
        };
        for q in qs {
            same_dim(m, q.nvars)?;
        }
        let mut out = Polynomial::zero(m);
        for (c, mono) in &self.terms {
            let mut t = Polynomial::constant(m, c.clone());
            for (q, &e) in qs.iter().zip(mono.exponents()) {
                if e > 0 {
                    t = t.mul(&q.pow(e))?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Like [`Polynomial::compose`] but with an explicit target dimension,
    /// needed when `self` has no variables.
    pub fn compose_into(&self, m: usize, qs: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if qs.is_empty() {
            same_dim(self.nvars, 0)?;
            let c: BigInt = self.terms.iter().map(|(c, _)| c).sum();
            return Ok(Polynomial::constant(m, c));
        }
        let out = self.compose(qs)?;
        same_dim(m, out.nvars)?;
        Ok(out)
    }

    pub fn eval(&self, values: &[BigInt]) -> Result<BigInt, PolyError> {
        same_dim(self.nvars, values.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(c, m)| {
                m.exponents()
                    .iter()
                    .zip(values)
                    .fold(c.clone(), |acc, (&e, v)| {
                        acc * num_traits::pow(v.clone(), e as usize)
                    })
            })
            .sum())
    }

    /// Convenience wrapper over [`Polynomial::eval`] for small naturals.
    pub fn eval_u64(&self, values: &[u64]) -> Result<BigInt, PolyError> {
        let values: Vec<BigInt> = values.iter().map(|&v| BigInt::from(v)).collect();
        self.eval(&values)
    }

    /// Absolute positiveness: every coefficient is non-negative.
    pub fn coef_pos(&self) -> bool {
        self.normalized()
            .terms
            .iter()
            .all(|(c, _)| !c.is_negative())
    }
}

/// Coefficient-level equality.
impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.normalized().terms == other.normalized().terms
    }
}

impl Eq for Polynomial {}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.normalized();
        if n.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest degree first.
        let mut terms = n.terms;
        terms.sort_by(|(_, a), (_, b)| b.degree().cmp(&a.degree()).then_with(|| b.cmp(a)));
        for (i, (c, m)) in terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let abs = c.abs();
            let mut parts = Vec::new();
            if !abs.is_one() || m.is_constant() {
                parts.push(abs.to_string());
            }
            for (v, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("x_{}", v + 1)),
                    _ => parts.push(format!("x_{}^{e}", v + 1)),
                }
            }
            f.write_str(&parts.join("."))?;
        }
        Ok(())
    }
}

/// A term whose variables are all at most `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedTerm<'a> {
    term: &'a Term,
    bound: Var,
}

impl<'a> BoundedTerm<'a> {
    pub fn new(term: &'a Term, bound: Var) -> Result<Self, PolyError> {
        match term.vars().into_iter().find(|&v| v > bound) {
            Some(var) => Err(PolyError::BoundExceeded { var, bound }),
            None => Ok(BoundedTerm { term, bound }),
        }
    }

    pub fn term(&self) -> &Term {
        self.term
    }

    pub fn bound(&self) -> Var {
        self.bound
    }
}

/// One polynomial per symbol, in as many variables as the symbol's arity.
/// A marked symbol without an entry of its own uses the entry of its
/// unmarked original.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolyInterpretation {
    map: BTreeMap<Symbol, Polynomial>,
}

impl PolyInterpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, symbol: Symbol, p: Polynomial) -> Option<Polynomial> {
        self.map.insert(symbol, p)
    }

    pub fn get(&self, symbol: &Symbol) -> Option<&Polynomial> {
        self.map.get(symbol).or_else(|| {
            if symbol.is_marked() {
                self.map.get(&symbol.unmarked())
            } else {
                None
            }
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Polynomial)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Explicit interpretation of exactly the symbols of `sig` (marked ones
    /// resolved through their originals), checking every dimension.
    pub fn restrict(&self, sig: &Signature) -> Result<PolyInterpretation, PolyError> {
        let mut out = PolyInterpretation::new();
        for (f, arity) in sig.symbols() {
            let p = self
                .get(f)
                .ok_or_else(|| PolyError::MissingInterpretation(f.clone()))?;
            if p.nvars() != arity {
                return Err(PolyError::ArityMismatch {
                    symbol: f.clone(),
                    arity,
                    nvars: p.nvars(),
                });
            }
            out.insert(f.clone(), p.clone());
        }
        Ok(out)
    }

    /// Polynomial of a term in `bound + 1` variables, variable `i` of the
    /// term becoming `x_{i+1}`.
    pub fn termpoly(&self, t: &BoundedTerm<'_>) -> Result<Polynomial, PolyError> {
        let n = t.bound + 1;
        self.termpoly_in(n, t.term)
    }

    fn termpoly_in(&self, n: usize, t: &Term) -> Result<Polynomial, PolyError> {
        match t {
            Term::Var(x) => Polynomial::var(n, *x),
            Term::App(a) => {
                let p = self
                    .get(a.symbol())
                    .ok_or_else(|| PolyError::MissingInterpretation(a.symbol().clone()))?;
                let qs = a
                    .args()
                    .iter()
                    .map(|u| self.termpoly_in(n, u))
                    .collect::<Result<Vec<_>, _>>()?;
                p.compose_into(n, &qs)
            }
        }
    }

    /// `[l] - [r]` over `max(maxvar l, maxvar r) + 1` variables.
    pub fn rule_poly_ge(&self, rule: &Rule) -> Result<Polynomial, PolyError> {
        let k = rule.maxvar();
        let l = self.termpoly(&BoundedTerm::new(&rule.lhs, k)?)?;
        let r = self.termpoly(&BoundedTerm::new(&rule.rhs, k)?)?;
        l.sub(&r)
    }

    /// `[l] - [r] - 1`.
    pub fn rule_poly_gt(&self, rule: &Rule) -> Result<Polynomial, PolyError> {
        let ge = self.rule_poly_ge(rule)?;
        ge.sub(&Polynomial::constant(ge.nvars(), 1))
    }

    /// `l >= r` for all valuations, by absolute positiveness.
    pub fn weakly_decreasing(&self, rule: &Rule) -> Result<bool, PolyError> {
        Ok(self.rule_poly_ge(rule)?.coef_pos())
    }

    /// `l > r` for all valuations, by absolute positiveness.
    pub fn strictly_decreasing(&self, rule: &Rule) -> Result<bool, PolyError> {
        Ok(self.rule_poly_gt(rule)?.coef_pos())
    }

    /// First symbol with a negative coefficient.
    pub fn not_weakly_monotone(&self) -> Option<&Symbol> {
        self.map.iter().find(|(_, p)| !p.coef_pos()).map(|(f, _)| f)
    }

    /// First symbol that is not weakly monotone or has some argument whose
    /// linear monomial has coefficient below 1.
    pub fn not_strongly_monotone(&self) -> Option<&Symbol> {
        self.map
            .iter()
            .find(|(_, p)| {
                !p.coef_pos()
                    || (0..p.nvars()).any(|i| {
                        p.coef(&Monomial::var(p.nvars(), i))
                            .map_or(true, |c| c < BigInt::one())
                    })
            })
            .map(|(f, _)| f)
    }

    pub fn weak_monotone(&self) -> bool {
        self.not_weakly_monotone().is_none()
    }

    pub fn strong_monotone(&self) -> bool {
        self.not_strongly_monotone().is_none()
    }
}
