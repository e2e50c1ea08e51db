//! Certificate documents.
//!
//! ```text
//! proof     ::= <dp>proof</dp>
//!             | <decomp><graph>(<hde/>|<unif/>)</graph> component+ </decomp>
//!             | <manna_ness><poly_int>mapping+</poly_int>proof</manna_ness>
//!             | <trivial/>
//! component ::= <component><rules>rule*</rules> proof? </component>
//! rule      ::= <rule><lhs>xterm</lhs><rhs>xterm</rhs></rule>
//! xterm     ::= <var>NAT</var> | <app><fun sharp="true"?>NAME</fun> xterm* </app>
//! mapping   ::= <fun>NAME</fun><polynomial>monomial*</polynomial>
//! monomial  ::= <monomial coef="INT"> (<exp var="NAT" pow="NAT"/>)* </monomial>
//! ```
//!
//! Monomial variables are 1-based (`x_1 … x_arity`). Comments and
//! whitespace between elements are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use roxmltree::{Document, Node};
use thiserror::Error;

use super::trs::NameTable;
use crate::checker::{Component, Proof};
use crate::poly::{Monomial, PolyInterpretation, Polynomial};
use crate::term::{Rule, Signature, Symbol, Term, TermError};
use crate::unify::Approx;

/// Largest exponent accepted in a monomial.
pub const MAX_EXPONENT: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: u32,
        col: u32,
        message: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("interpretation of {0} uses a variable beyond its arity")]
    PolyArityMismatch(String),
    #[error("ill-formed term: {0}")]
    Term(#[from] TermError),
}

struct Ctx<'a> {
    doc: &'a Document<'a>,
    sig: &'a Signature,
    marked: Signature,
    names: &'a NameTable,
}

impl<'a> Ctx<'a> {
    fn err(&self, node: Node<'_, '_>, message: impl Into<String>) -> CertError {
        let pos = self.doc.text_pos_at(node.range().start);
        CertError::Syntax {
            line: pos.row,
            col: pos.col,
            message: message.into(),
        }
    }

    /// Child elements, rejecting stray text.
    fn children<'n>(&self, node: Node<'n, 'a>) -> Result<Vec<Node<'n, 'a>>, CertError> {
        let mut out = Vec::new();
        for c in node.children() {
            if c.is_element() {
                out.push(c);
            } else if c.is_text() && !c.text().unwrap_or("").trim().is_empty() {
                return Err(self.err(c, format!("unexpected text inside <{}>", tag(node))));
            }
        }
        Ok(out)
    }

    fn text(&self, node: Node<'_, '_>) -> Result<String, CertError> {
        let mut s = String::new();
        for c in node.children() {
            if c.is_element() {
                return Err(self.err(c, format!("<{}> must contain only text", tag(node))));
            }
            if c.is_text() {
                s.push_str(c.text().unwrap_or(""));
            }
        }
        Ok(s.trim().to_string())
    }

    fn expect_tag(&self, node: Node<'_, '_>, name: &str) -> Result<(), CertError> {
        if tag(node) == name {
            Ok(())
        } else {
            Err(self.err(node, format!("expected <{name}>, found <{}>", tag(node))))
        }
    }

    fn exactly<'n, const N: usize>(
        &self,
        node: Node<'n, 'a>,
    ) -> Result<[Node<'n, 'a>; N], CertError> {
        let kids = self.children(node)?;
        let got = kids.len();
        kids.try_into().map_err(|_| {
            self.err(
                node,
                format!("<{}> expects {N} child element(s), found {got}", tag(node)),
            )
        })
    }

    fn proof(&self, node: Node<'_, '_>) -> Result<Proof, CertError> {
        match tag(node) {
            "trivial" => {
                self.exactly::<0>(node)?;
                Ok(Proof::Trivial)
            }
            "dp" => {
                let [sub] = self.exactly::<1>(node)?;
                Ok(Proof::DpTrans(Box::new(self.proof(sub)?)))
            }
            "decomp" => self.decomp(node),
            "manna_ness" => {
                let [pi, sub] = self.exactly::<2>(node)?;
                self.expect_tag(pi, "poly_int")?;
                Ok(Proof::PolyOrd {
                    interpretation: self.poly_int(pi)?,
                    sub: Box::new(self.proof(sub)?),
                })
            }
            other => Err(self.err(node, format!("unknown proof step <{other}>"))),
        }
    }

    fn decomp(&self, node: Node<'_, '_>) -> Result<Proof, CertError> {
        let kids = self.children(node)?;
        let Some((graph, comps)) = kids.split_first() else {
            return Err(self.err(node, "<decomp> needs a <graph> and components"));
        };
        self.expect_tag(*graph, "graph")?;
        let [kind] = self.exactly::<1>(*graph)?;
        self.exactly::<0>(kind)?;
        let approx = match tag(kind) {
            "hde" => Approx::Hde,
            "unif" => Approx::Unif,
            other => return Err(self.err(kind, format!("unknown graph approximation <{other}>"))),
        };
        if comps.is_empty() {
            return Err(self.err(node, "<decomp> needs at least one <component>"));
        }
        let components = comps
            .iter()
            .map(|&c| self.component(c))
            .collect::<Result<_, _>>()?;
        Ok(Proof::Decomp { approx, components })
    }

    fn component(&self, node: Node<'_, '_>) -> Result<Component, CertError> {
        self.expect_tag(node, "component")?;
        let kids = self.children(node)?;
        let (rules_node, proof_node) = match kids.as_slice() {
            [r] => (*r, None),
            [r, p] => (*r, Some(*p)),
            _ => return Err(self.err(node, "<component> expects <rules> and an optional proof")),
        };
        self.expect_tag(rules_node, "rules")?;
        let rules = self
            .children(rules_node)?
            .into_iter()
            .map(|r| self.rule(r))
            .collect::<Result<_, _>>()?;
        let proof = proof_node.map(|p| self.proof(p)).transpose()?;
        Ok(Component { rules, proof })
    }

    fn rule(&self, node: Node<'_, '_>) -> Result<Rule, CertError> {
        self.expect_tag(node, "rule")?;
        let [lhs, rhs] = self.exactly::<2>(node)?;
        self.expect_tag(lhs, "lhs")?;
        self.expect_tag(rhs, "rhs")?;
        let [l] = self.exactly::<1>(lhs)?;
        let [r] = self.exactly::<1>(rhs)?;
        // Only the variant matters, and canonical numbering keeps indices small.
        Ok(Rule::new(self.xterm(l)?, self.xterm(r)?).canonical())
    }

    fn xterm(&self, node: Node<'_, '_>) -> Result<Term, CertError> {
        match tag(node) {
            "var" => {
                let text = self.text(node)?;
                let v: usize = text
                    .parse()
                    .map_err(|_| self.err(node, format!("bad variable index `{text}`")))?;
                Ok(Term::var(v))
            }
            "app" => {
                let kids = self.children(node)?;
                let Some((fun, args)) = kids.split_first() else {
                    return Err(self.err(node, "<app> needs a <fun>"));
                };
                let symbol = self.fun(*fun)?;
                let args = args
                    .iter()
                    .map(|&a| self.xterm(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(self.marked.app(&symbol, args)?)
            }
            other => Err(self.err(node, format!("expected <var> or <app>, found <{other}>"))),
        }
    }

    fn fun(&self, node: Node<'_, '_>) -> Result<Symbol, CertError> {
        self.expect_tag(node, "fun")?;
        let name = self.text(node)?;
        let base = self
            .names
            .symbol(&name)
            .cloned()
            .or_else(|| self.sig.symbol(&name))
            .ok_or_else(|| CertError::UnknownSymbol(name.clone()))?;
        match node.attribute("sharp") {
            None | Some("false") => Ok(base),
            Some("true") => Ok(base.marked()),
            Some(other) => Err(self.err(node, format!("bad sharp attribute `{other}`"))),
        }
    }

    fn poly_int(&self, node: Node<'_, '_>) -> Result<PolyInterpretation, CertError> {
        let kids = self.children(node)?;
        if kids.is_empty() || kids.len() % 2 != 0 {
            return Err(self.err(node, "<poly_int> expects <fun>/<polynomial> pairs"));
        }
        let mut pi = PolyInterpretation::new();
        for pair in kids.chunks(2) {
            let symbol = self.fun(pair[0])?;
            self.expect_tag(pair[1], "polynomial")?;
            let arity = self
                .marked
                .arity(&symbol)
                .ok_or_else(|| CertError::UnknownSymbol(symbol.to_string()))?;
            let p = self.polynomial(pair[1], &symbol, arity)?;
            if pi.insert(symbol.clone(), p).is_some() {
                return Err(self.err(pair[0], format!("{symbol} is interpreted twice")));
            }
        }
        Ok(pi)
    }

    fn polynomial(
        &self,
        node: Node<'_, '_>,
        symbol: &Symbol,
        arity: usize,
    ) -> Result<Polynomial, CertError> {
        let mut terms = Vec::new();
        for m in self.children(node)? {
            self.expect_tag(m, "monomial")?;
            let coef = m
                .attribute("coef")
                .ok_or_else(|| self.err(m, "<monomial> needs a coef attribute"))?;
            let coef: BigInt = coef
                .trim()
                .parse()
                .map_err(|_| self.err(m, format!("bad coefficient `{coef}`")))?;
            let mut exps = vec![0u32; arity];
            for e in self.children(m)? {
                self.expect_tag(e, "exp")?;
                self.exactly::<0>(e)?;
                let var = self.nat_attr(e, "var")?;
                let pow = self.nat_attr(e, "pow")?;
                if var == 0 || var > arity {
                    return Err(CertError::PolyArityMismatch(symbol.to_string()));
                }
                let total = exps[var - 1] as usize + pow;
                if total > MAX_EXPONENT as usize {
                    return Err(self.err(e, format!("exponent above {MAX_EXPONENT}")));
                }
                exps[var - 1] = total as u32;
            }
            terms.push((coef, Monomial::new(exps)));
        }
        Ok(Polynomial::from_terms(arity, terms).expect("exponent vectors have the arity's length"))
    }

    fn nat_attr(&self, node: Node<'_, '_>, name: &str) -> Result<usize, CertError> {
        let raw = node
            .attribute(name)
            .ok_or_else(|| self.err(node, format!("missing attribute `{name}`")))?;
        raw.trim()
            .parse()
            .map_err(|_| self.err(node, format!("bad natural number `{raw}` for `{name}`")))
    }
}

fn tag<'n>(node: Node<'n, '_>) -> &'n str {
    node.tag_name().name()
}

/// Parses a certificate against the (unmarked) signature of the problem it
/// is meant for. Marked symbols are written with `sharp="true"`.
pub fn parse_certificate(
    text: &str,
    sig: &Signature,
    names: &NameTable,
) -> Result<Proof, CertError> {
    let doc = Document::parse(text).map_err(|e| CertError::Xml(e.to_string()))?;
    let ctx = Ctx {
        doc: &doc,
        sig,
        marked: sig.with_marks(),
        names,
    };
    ctx.proof(doc.root_element())
}

/// Serializes a proof in the certificate format.
pub fn write_certificate(proof: &Proof) -> String {
    let mut out = String::new();
    write_proof(&mut out, proof, 0);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_proof(out: &mut String, proof: &Proof, depth: usize) {
    indent(out, depth);
    match proof {
        Proof::Trivial => out.push_str("<trivial/>\n"),
        Proof::DpTrans(sub) => {
            out.push_str("<dp>\n");
            write_proof(out, sub, depth + 1);
            indent(out, depth);
            out.push_str("</dp>\n");
        }
        Proof::Decomp { approx, components } => {
            let _ = writeln!(out, "<decomp><graph><{}/></graph>", approx.name());
            for c in components {
                indent(out, depth + 1);
                out.push_str("<component>\n");
                indent(out, depth + 2);
                out.push_str("<rules>\n");
                for r in &c.rules {
                    indent(out, depth + 3);
                    out.push_str("<rule><lhs>");
                    write_xterm(out, &r.lhs);
                    out.push_str("</lhs><rhs>");
                    write_xterm(out, &r.rhs);
                    out.push_str("</rhs></rule>\n");
                }
                indent(out, depth + 2);
                out.push_str("</rules>\n");
                if let Some(p) = &c.proof {
                    write_proof(out, p, depth + 2);
                }
                indent(out, depth + 1);
                out.push_str("</component>\n");
            }
            indent(out, depth);
            out.push_str("</decomp>\n");
        }
        Proof::PolyOrd {
            interpretation,
            sub,
        } => {
            out.push_str("<manna_ness>\n");
            indent(out, depth + 1);
            out.push_str("<poly_int>\n");
            for (f, p) in interpretation.iter() {
                indent(out, depth + 2);
                write_fun(out, f);
                let _ = writeln!(out, "<!-- {p} -->");
                indent(out, depth + 2);
                out.push_str("<polynomial>");
                // Merge duplicates so the output is stable.
                let merged: BTreeMap<&Monomial, BigInt> =
                    p.terms().iter().fold(BTreeMap::new(), |mut acc, (c, m)| {
                        *acc.entry(m).or_default() += c;
                        acc
                    });
                for (m, c) in merged {
                    let _ = write!(out, "<monomial coef=\"{c}\">");
                    for (i, &e) in m.exponents().iter().enumerate() {
                        if e > 0 {
                            let _ = write!(out, "<exp var=\"{}\" pow=\"{e}\"/>", i + 1);
                        }
                    }
                    out.push_str("</monomial>");
                }
                out.push_str("</polynomial>\n");
            }
            indent(out, depth + 1);
            out.push_str("</poly_int>\n");
            write_proof(out, sub, depth + 1);
            indent(out, depth);
            out.push_str("</manna_ness>\n");
        }
    }
}

fn write_fun(out: &mut String, f: &Symbol) {
    if f.is_marked() {
        let _ = write!(out, "<fun sharp=\"true\">{}</fun>", f.name());
    } else {
        let _ = write!(out, "<fun>{}</fun>", f.name());
    }
}

fn write_xterm(out: &mut String, t: &Term) {
    match t {
        Term::Var(x) => {
            let _ = write!(out, "<var>{x}</var>");
        }
        Term::App(a) => {
            out.push_str("<app>");
            write_fun(out, a.symbol());
            for u in a.args() {
                write_xterm(out, u);
            }
            out.push_str("</app>");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::trs::parse_trs;

    const QUOT: &str = "(VAR x y) (RULES minus(zero) -> zero minus(succ(x)) -> succ(minus(x)) \
        quot(zero,succ(y)) -> zero quot(succ(x),succ(y)) -> succ(quot(minus(x),succ(y))))";

    fn setup() -> (Signature, NameTable) {
        let (trs, names) = parse_trs(QUOT).unwrap();
        (trs.sig().clone(), names)
    }

    #[test]
    fn trivial_document() {
        let (sig, names) = setup();
        assert_eq!(
            parse_certificate("<trivial/>", &sig, &names),
            Ok(Proof::Trivial)
        );
    }

    #[test]
    fn polynomial_variables_checked_against_arity() {
        let (sig, names) = setup();
        let doc = "<manna_ness><poly_int><fun>succ</fun><polynomial>\
            <monomial coef=\"1\"><exp var=\"2\" pow=\"1\"/></monomial>\
            </polynomial></poly_int><trivial/></manna_ness>";
        assert_eq!(
            parse_certificate(doc, &sig, &names),
            Err(CertError::PolyArityMismatch("succ".into()))
        );
        let zero_var = doc.replace("var=\"2\"", "var=\"0\"");
        assert!(matches!(
            parse_certificate(&zero_var, &sig, &names),
            Err(CertError::PolyArityMismatch(_))
        ));
    }

    #[test]
    fn unknown_symbols_rejected() {
        let (sig, names) = setup();
        let doc =
            "<manna_ness><poly_int><fun>plus</fun><polynomial/></poly_int><trivial/></manna_ness>";
        assert_eq!(
            parse_certificate(doc, &sig, &names),
            Err(CertError::UnknownSymbol("plus".into()))
        );
    }

    #[test]
    fn grammar_violations() {
        let (sig, names) = setup();
        for doc in [
            "<dp/>",
            "<dp><trivial/><trivial/></dp>",
            "<decomp><graph><hde/></graph></decomp>",
            "<decomp><graph><rpo/></graph><component><rules/></component></decomp>",
            "<trivial>text</trivial>",
            "<proof/>",
            "<dp><trivial/>",
            "<decomp><graph><hde/></graph><component><rules><rule><lhs><var>x</var></lhs>\
             <rhs><var>0</var></rhs></rule></rules></component></decomp>",
            "<decomp><graph><hde/></graph><component><rules><rule><lhs><app><fun>succ</fun></app></lhs>\
             <rhs><var>0</var></rhs></rule></rules></component></decomp>",
        ] {
            assert!(parse_certificate(doc, &sig, &names).is_err(), "{doc}");
        }
    }

    #[test]
    fn sharp_symbols_and_comments() {
        let (sig, names) = setup();
        let doc = "<dp><decomp><graph><hde/></graph><component><rules><!-- minus(succ(x)) -> minus(x) -->\
            <rule><lhs><app><fun sharp=\"true\">minus</fun><app><fun>succ</fun><var>4</var></app></app></lhs>\
            <rhs><app><fun sharp=\"true\">minus</fun><var>4</var></app></rhs></rule></rules></component>\
            </decomp></dp>";
        let Proof::DpTrans(sub) = parse_certificate(doc, &sig, &names).unwrap() else {
            panic!()
        };
        let Proof::Decomp { approx, components } = *sub else {
            panic!()
        };
        assert_eq!(approx, Approx::Hde);
        assert_eq!(
            components[0].rules[0].to_string(),
            "minus#(succ(x0)) -> minus#(x0)"
        );
        assert!(components[0].proof.is_none());
    }

    #[test]
    fn write_then_parse() {
        let (sig, names) = setup();
        let doc = "<manna_ness><poly_int><fun>zero</fun><polynomial/>\
            <fun>succ</fun><polynomial><monomial coef=\"1\"><exp var=\"1\" pow=\"1\"/></monomial>\
            <monomial coef=\"2\"/></polynomial></poly_int><trivial/></manna_ness>";
        let proof = parse_certificate(doc, &sig, &names).unwrap();
        let printed = write_certificate(&proof);
        assert!(printed.contains("<!-- x_1 + 2 -->"));
        assert_eq!(parse_certificate(&printed, &sig, &names), Ok(proof));
    }
}
