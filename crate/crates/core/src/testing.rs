//! Fixtures shared by the unit tests.

use crate::rewrite::Trs;
use crate::term::{Rule, Signature, Term};

pub(crate) fn r8_sig() -> Signature {
    Signature::from_pairs([("zero", 0), ("succ", 1), ("minus", 1), ("quot", 2)]).unwrap()
}

pub(crate) struct Builder(pub Signature);

impl Builder {
    pub fn zero(&self) -> Term {
        self.0.constant("zero").unwrap()
    }
    pub fn succ(&self, t: Term) -> Term {
        self.0.apply("succ", vec![t]).unwrap()
    }
    pub fn minus(&self, t: Term) -> Term {
        self.0.apply("minus", vec![t]).unwrap()
    }
    pub fn quot(&self, a: Term, b: Term) -> Term {
        self.0.apply("quot", vec![a, b]).unwrap()
    }
    pub fn minus_s(&self, t: Term) -> Term {
        let f = crate::term::Symbol::new("minus").marked();
        self.0.with_marks().app(&f, vec![t]).unwrap()
    }
    pub fn quot_s(&self, a: Term, b: Term) -> Term {
        let f = crate::term::Symbol::new("quot").marked();
        self.0.with_marks().app(&f, vec![a, b]).unwrap()
    }
}

pub(crate) fn b() -> Builder {
    Builder(r8_sig())
}

pub(crate) fn x() -> Term {
    Term::var(0)
}

pub(crate) fn y() -> Term {
    Term::var(1)
}

/// The argument-filtered quotient system.
pub(crate) fn r8() -> Trs {
    let b = b();
    let rules = vec![
        Rule::new(b.minus(b.zero()), b.zero()),
        Rule::new(b.minus(b.succ(x())), b.succ(b.minus(x()))),
        Rule::new(b.quot(b.zero(), b.succ(y())), b.zero()),
        Rule::new(
            b.quot(b.succ(x()), b.succ(y())),
            b.succ(b.quot(b.minus(x()), b.succ(y()))),
        ),
    ];
    Trs::new(r8_sig(), rules).unwrap()
}

/// The three marked dependency pairs of [`r8`], in the order the
/// decomposition lists them.
pub(crate) fn r8_pairs() -> [Rule; 3] {
    let b = b();
    [
        Rule::new(b.minus_s(b.succ(x())), b.minus_s(x())),
        Rule::new(b.quot_s(b.succ(x()), b.succ(y())), b.minus_s(x())),
        Rule::new(
            b.quot_s(b.succ(x()), b.succ(y())),
            b.quot_s(b.minus(x()), b.succ(y())),
        ),
    ]
}
