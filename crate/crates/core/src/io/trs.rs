//! The `.trs` concrete syntax:
//!
//! ```text
//! file ::= "(VAR" name* ")" "(RULES" rule* ")"
//! rule ::= term "->" term
//! term ::= name | name "(" term ("," term)* ")"
//! ```
//!
//! Names are non-empty runs of letters, digits, `_` and `'`. A name is a
//! variable iff it is listed under `VAR`. `#` starts a comment running to the
//! end of the line. Symbol arities are fixed by their first use; variables
//! are numbered per rule in order of first occurrence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::rewrite::Trs;
use crate::term::{Rule, Signature, Symbol, Term, TermError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("symbol {0} is used with different arities")]
    ArityConflict(String),
}

/// Source names of symbols and, per rule, of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameTable {
    symbols: BTreeMap<String, Symbol>,
    rule_vars: Vec<Vec<String>>,
}

impl NameTable {
    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    /// Variable names of rule `rule`, indexed by variable number.
    pub fn rule_vars(&self, rule: usize) -> &[String] {
        self.rule_vars.get(rule).map_or(&[], Vec::as_slice)
    }

    pub fn var_index(&self, rule: usize, name: &str) -> Option<Var> {
        self.rule_vars(rule).iter().position(|n| n == name)
    }

    pub fn var_name(&self, rule: usize, var: Var) -> Option<&str> {
        self.rule_vars(rule).get(var).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    Name(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
                continue;
            }
            '(' => {
                bump(&mut chars);
                Tok::Open
            }
            ')' => {
                bump(&mut chars);
                Tok::Close
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() != Some(&'>') {
                    return Err(ParseError::Syntax {
                        line: tl,
                        col: tc,
                        message: "expected `->`".into(),
                    });
                }
                bump(&mut chars);
                Tok::Arrow
            }
            c if is_name_char(c) => {
                let mut name = String::new();
                while let Some(&c) = chars.peek().filter(|&&c| is_name_char(c)) {
                    name.push(c);
                    bump(&mut chars);
                }
                Tok::Name(name)
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tl,
                    col: tc,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push(Token {
            tok,
            line: tl,
            col: tc,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    vars: BTreeSet<String>,
    sig: Signature,
    names: NameTable,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col));
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Name(n)) if n == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{kw}`"))),
        }
    }

    fn file(mut self) -> Result<(Trs, NameTable), ParseError> {
        self.expect(Tok::Open, "`(VAR`")?;
        self.keyword("VAR")?;
        while let Some(Tok::Name(_)) = self.peek() {
            let n = self.name()?;
            self.vars.insert(n);
        }
        self.expect(Tok::Close, "`)` closing VAR")?;
        self.expect(Tok::Open, "`(RULES`")?;
        self.keyword("RULES")?;
        let mut rules = Vec::new();
        while self.peek() != Some(&Tok::Close) {
            if self.peek().is_none() {
                return Err(self.error("unterminated RULES section"));
            }
            let mut scope = Vec::new();
            let lhs = self.term(&mut scope)?;
            self.expect(Tok::Arrow, "`->`")?;
            let rhs = self.term(&mut scope)?;
            rules.push(Rule::new(lhs, rhs));
            self.names.rule_vars.push(scope);
        }
        self.expect(Tok::Close, "`)` closing RULES")?;
        if self.peek().is_some() {
            return Err(self.error("trailing input after RULES"));
        }
        let trs = Trs::new(self.sig, rules).expect("terms were built through the signature");
        Ok((trs, self.names))
    }

    fn term(&mut self, scope: &mut Vec<String>) -> Result<Term, ParseError> {
        let name = self.name()?;
        let has_args = self.peek() == Some(&Tok::Open);
        if self.vars.contains(&name) {
            if has_args {
                return Err(self.error(format!("variable `{name}` applied to arguments")));
            }
            let index = match scope.iter().position(|n| *n == name) {
                Some(i) => i,
                None => {
                    scope.push(name);
                    scope.len() - 1
                }
            };
            return Ok(Term::var(index));
        }
        let mut args = Vec::new();
        if has_args {
            self.pos += 1;
            args.push(self.term(scope)?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                args.push(self.term(scope)?);
            }
            self.expect(Tok::Close, "`,` or `)`")?;
        }
        let symbol = Symbol::new(name.as_str());
        self.sig
            .declare(symbol.clone(), args.len())
            .map_err(|_| ParseError::ArityConflict(name.clone()))?;
        self.names
            .symbols
            .entry(name)
            .or_insert_with(|| symbol.clone());
        self.sig.app(&symbol, args).map_err(|e: TermError| match e {
            TermError::ArityMismatch { symbol, .. } | TermError::ArityConflict { symbol, .. } => {
                ParseError::ArityConflict(symbol.name().to_string())
            }
            TermError::UnknownSymbol(s) => ParseError::ArityConflict(s.name().to_string()),
        })
    }
}

pub fn parse_trs(text: &str) -> Result<(Trs, NameTable), ParseError> {
    let toks = tokenize(text)?;
    let end = text
        .lines()
        .enumerate()
        .last()
        .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    Parser {
        toks,
        pos: 0,
        end,
        vars: BTreeSet::new(),
        sig: Signature::new(),
        names: NameTable::default(),
    }
    .file()
}

/// Writes `t` with variable `i` named `var_names[i]` (or `x<i>` when absent).
/// Marked symbols are written with a trailing `#`.
pub fn write_term(out: &mut String, t: &Term, var_names: &[String]) {
    match t {
        Term::Var(x) => match var_names.get(*x) {
            Some(n) => out.push_str(n),
            None => {
                let _ = write!(out, "x{x}");
            }
        },
        Term::App(a) => {
            let _ = write!(out, "{}", a.symbol());
            if !a.args().is_empty() {
                out.push('(');
                for (i, u) in a.args().iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_term(out, u, var_names);
                }
                out.push(')');
            }
        }
    }
}

pub fn rule_to_string(rule: &Rule, var_names: &[String]) -> String {
    let mut s = String::new();
    write_term(&mut s, &rule.lhs, var_names);
    s.push_str(" -> ");
    write_term(&mut s, &rule.rhs, var_names);
    s
}

/// Prints a TRS in the concrete syntax. Variable names come from `names`
/// when given; otherwise fresh names not clashing with any symbol are used.
/// Only unmarked signatures can be printed back in parseable form.
pub fn print_trs(trs: &Trs, names: Option<&NameTable>) -> String {
    let symbol_names: BTreeSet<&str> = trs.sig().symbols().map(|(s, _)| s.name()).collect();
    let fresh = |i: usize| {
        let mut n = format!("x{i}");
        while symbol_names.contains(n.as_str()) {
            n.push('\'');
        }
        n
    };
    let mut per_rule = Vec::new();
    let mut declared = BTreeSet::new();
    for (ri, rule) in trs.rules().iter().enumerate() {
        let width = rule.maxvar() + 1;
        let given = names.map_or(&[][..], |n| n.rule_vars(ri));
        let vs: Vec<String> = (0..width)
            .map(|i| given.get(i).cloned().unwrap_or_else(|| fresh(i)))
            .collect();
        let used = rule.lhs.vars().into_iter().chain(rule.rhs.vars());
        for v in used {
            declared.insert(vs[v].clone());
        }
        per_rule.push(vs);
    }
    let mut out = String::from("(VAR");
    for v in &declared {
        out.push(' ');
        out.push_str(v);
    }
    out.push_str(")\n(RULES\n");
    for (rule, vs) in trs.rules().iter().zip(&per_rule) {
        out.push_str("  ");
        out.push_str(&rule_to_string(rule, vs));
        out.push('\n');
    }
    out.push_str(")\n");
    out
}
