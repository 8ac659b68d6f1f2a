//! Text format for nets and initial markings.
//!
//! ```text
//! net catalysis {
//!   bases: a, b, c;
//!   places: u, v, w, x, y;
//!   transitions: t1, t2;
//!   arc u -> t1 { c }
//!   arc v -> t1 { a }
//!   arc t1 -> x { a, c, a-c }
//!   arc x -> t2 { a }
//!   arc w -> t2 { b }
//!   arc t2 -> y { a, b, a-b }
//!   initial { u: { c }, v: { a }, w: { b } }
//! }
//! ```
//!
//! `!a` and `!a-b` negate an item. `#` starts a comment that runs to the end
//! of the line. Declarations may appear in any order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::model::{ArcLabel, BaseId, Bond, Marking, ModelError, Net, PlaceId, Tokens, TransId};
use crate::validate::{validate, Subject, ValidationReport, Violation};

/// 1-based source position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: SYNTAX: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: UNKNOWN-IDENT: `{name}` is not declared")]
    UnknownIdent { pos: Pos, name: String },
    #[error("{pos}: {error}")]
    Model { pos: Pos, error: ModelError },
    #[error("{pos}: {violation}")]
    Invalid {
        pos: Pos,
        violation: Violation,
        report: ValidationReport,
    },
}

impl ParseError {
    /// Short machine-readable code: `SYNTAX`, `UNKNOWN-IDENT`, or a validation rule.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } | ParseError::Model { .. } => "SYNTAX",
            ParseError::UnknownIdent { .. } => "UNKNOWN-IDENT",
            ParseError::Invalid { violation, .. } => violation.rule.code(),
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdent { pos, .. }
            | ParseError::Model { pos, .. }
            | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

/// A parsed document before validation.
#[derive(Clone, Debug)]
pub struct ParsedNet {
    pub net: Net,
    pub marking: Marking,
    /// First declaration of each place and transition.
    pub declared_at: BTreeMap<String, Pos>,
}

impl ParsedNet {
    pub fn validate(&self) -> ValidationReport {
        validate(&self.net, &self.marking)
    }

    /// Where `subject` is first declared; bases map to the start of the file.
    pub fn locate(&self, subject: &Subject) -> Pos {
        let key = match subject {
            Subject::Transition(t) => t.as_str(),
            Subject::Place(p) => p.as_str(),
            Subject::Base(_) => return Pos { line: 1, col: 1 },
        };
        self.declared_at.get(key).copied().unwrap_or(Pos { line: 1, col: 1 })
    }
}

/// Parses and validates; the first problem found is returned as an error.
pub fn parse_net(text: &str) -> Result<(Net, Marking), ParseError> {
    let parsed = parse_unchecked(text)?;
    let report = parsed.validate();
    if let Some(first) = report.violations.first() {
        return Err(ParseError::Invalid {
            pos: parsed.locate(&first.subject),
            violation: first.clone(),
            report: report.clone(),
        });
    }
    Ok((parsed.net, parsed.marking))
}

/// Parses and resolves identifiers without running structural validation.
pub fn parse_unchecked(text: &str) -> Result<ParsedNet, ParseError> {
    let tokens = lex(text)?;
    let doc = Parser { tokens, at: 0 }.document()?;
    resolve(doc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
    Arrow,
    Dash,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Dash => f.write_str("`-`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '{' | '}' | ':' | ';' | ',' | '!' => {
                bump(&mut chars);
                out.push((
                    match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        ':' => Tok::Colon,
                        ';' => Tok::Semi,
                        ',' => Tok::Comma,
                        _ => Tok::Bang,
                    },
                    pos,
                ));
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    out.push((Tok::Arrow, pos));
                } else {
                    out.push((Tok::Dash, pos));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), pos));
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Debug)]
struct Item {
    negated: bool,
    first: (String, Pos),
    second: Option<(String, Pos)>,
    pos: Pos,
}

/// An identifier with the position it appeared at.
type Named = (String, Pos);

#[derive(Debug, Default)]
struct Document {
    name: String,
    bases: Vec<Named>,
    places: Vec<Named>,
    transitions: Vec<Named>,
    arcs: Vec<(Named, Named, Vec<Item>)>,
    initial: Vec<(Named, Vec<Item>)>,
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Pos) {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        let (tok, pos) = self.peek();
        Err(ParseError::Syntax {
            pos: *pos,
            message: format!("expected {expected}, found {tok}"),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if self.peek().0 == tok {
            Ok(self.next().1)
        } else {
            self.error(&tok.to_string())
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            (Tok::Ident(s), pos) => {
                self.next();
                Ok((s, pos))
            }
            _ => self.error("identifier"),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            (Tok::Ident(s), _) if s == kw => {
                self.next();
                Ok(())
            }
            _ => self.error(&format!("`{kw}`")),
        }
    }

    fn document(mut self) -> Result<Document, ParseError> {
        let mut doc = Document::default();
        self.keyword("net")?;
        doc.name = self.ident()?.0;
        self.expect(Tok::LBrace)?;
        loop {
            let (tok, _) = self.peek().clone();
            match tok {
                Tok::RBrace => {
                    self.next();
                    break;
                }
                Tok::Ident(kw) => match kw.as_str() {
                    "bases" | "places" | "transitions" => {
                        self.next();
                        self.expect(Tok::Colon)?;
                        let list = self.idents()?;
                        self.expect(Tok::Semi)?;
                        match kw.as_str() {
                            "bases" => doc.bases.extend(list),
                            "places" => doc.places.extend(list),
                            _ => doc.transitions.extend(list),
                        }
                    }
                    "arc" => {
                        self.next();
                        let from = self.ident()?;
                        self.expect(Tok::Arrow)?;
                        let to = self.ident()?;
                        self.expect(Tok::LBrace)?;
                        let items = self.items()?;
                        self.expect(Tok::RBrace)?;
                        doc.arcs.push((from, to, items));
                    }
                    "initial" => {
                        self.next();
                        self.expect(Tok::LBrace)?;
                        loop {
                            let place = self.ident()?;
                            self.expect(Tok::Colon)?;
                            self.expect(Tok::LBrace)?;
                            let items = self.items()?;
                            self.expect(Tok::RBrace)?;
                            doc.initial.push((place, items));
                            if self.peek().0 == Tok::Comma {
                                self.next();
                            } else {
                                break;
                            }
                        }
                        self.expect(Tok::RBrace)?;
                    }
                    _ => return self.error("`bases`, `places`, `transitions`, `arc`, `initial` or `}`"),
                },
                _ => return self.error("a section or `}`"),
            }
        }
        if self.peek().0 != Tok::Eof {
            return self.error("end of input");
        }
        Ok(doc)
    }

    fn idents(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.peek().0 == Tok::Comma {
            self.next();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn items(&mut self) -> Result<Vec<Item>, ParseError> {
        let mut out = Vec::new();
        if self.peek().0 == Tok::RBrace {
            return Ok(out);
        }
        loop {
            let pos = self.peek().1;
            let negated = if self.peek().0 == Tok::Bang {
                self.next();
                true
            } else {
                false
            };
            let first = self.ident()?;
            let second = if self.peek().0 == Tok::Dash {
                self.next();
                Some(self.ident()?)
            } else {
                None
            };
            out.push(Item {
                negated,
                first,
                second,
                pos,
            });
            if self.peek().0 == Tok::Comma {
                self.next();
            } else {
                return Ok(out);
            }
        }
    }
}

fn resolve(doc: Document) -> Result<ParsedNet, ParseError> {
    let mut declared_at = BTreeMap::new();
    let mut seen_kind: BTreeMap<String, &str> = BTreeMap::new();
    let mut declare = |list: &[(String, Pos)], kind: &'static str| -> Result<BTreeSet<String>, ParseError> {
        let mut set = BTreeSet::new();
        for (name, pos) in list {
            if let Some(prev) = seen_kind.get(name) {
                // Bases live in their own namespace; places and transitions share one.
                let clash = *prev == kind || (kind != "base" && *prev != "base");
                if clash {
                    return Err(ParseError::Syntax {
                        pos: *pos,
                        message: format!("`{name}` is already declared as a {prev}"),
                    });
                }
            }
            if kind != "base" {
                seen_kind.insert(name.clone(), kind);
                declared_at.entry(name.clone()).or_insert(*pos);
            } else {
                seen_kind.entry(name.clone()).or_insert(kind);
            }
            set.insert(name.clone());
        }
        Ok(set)
    };
    let base_names = declare(&doc.bases, "base")?;
    let place_names = declare(&doc.places, "place")?;
    let trans_names = declare(&doc.transitions, "transition")?;

    let model = |pos: Pos| move |error: ModelError| ParseError::Model { pos, error };
    let unknown = |(name, pos): &(String, Pos)| ParseError::UnknownIdent {
        pos: *pos,
        name: name.clone(),
    };
    let base = |n: &(String, Pos)| -> Result<BaseId, ParseError> {
        if base_names.contains(&n.0) {
            BaseId::new(&n.0).map_err(model(n.1))
        } else {
            Err(unknown(n))
        }
    };
    let label = |items: &[Item], allow_neg: bool| -> Result<ArcLabel, ParseError> {
        let mut out = ArcLabel::default();
        for item in items {
            if item.negated && !allow_neg {
                return Err(ParseError::Syntax {
                    pos: item.pos,
                    message: "negated items are not allowed in the initial marking".into(),
                });
            }
            let target = if item.negated {
                &mut out.negative
            } else {
                &mut out.positive
            };
            let a = base(&item.first)?;
            match &item.second {
                None => {
                    target.bases.insert(a);
                }
                Some(second) => {
                    let b = base(second)?;
                    target.bonds.insert(Bond::new(a, b).map_err(model(item.pos))?);
                }
            }
        }
        Ok(out)
    };

    let mut arcs_in = BTreeMap::new();
    let mut arcs_out = BTreeMap::new();
    for (from, to, items) in &doc.arcs {
        let is_place = |n: &str| place_names.contains(n);
        let is_trans = |n: &str| trans_names.contains(n);
        for end in [from, to] {
            if !is_place(&end.0) && !is_trans(&end.0) {
                return Err(unknown(end));
            }
        }
        let l = label(items, true)?;
        let duplicate = |pos| ParseError::Syntax {
            pos,
            message: format!("duplicate arc {} -> {}", from.0, to.0),
        };
        if is_place(&from.0) && is_trans(&to.0) {
            let key = (
                PlaceId::new(&from.0).map_err(model(from.1))?,
                TransId::new(&to.0).map_err(model(to.1))?,
            );
            if arcs_in.insert(key, l).is_some() {
                return Err(duplicate(from.1));
            }
        } else if is_trans(&from.0) && is_place(&to.0) {
            let key = (
                TransId::new(&from.0).map_err(model(from.1))?,
                PlaceId::new(&to.0).map_err(model(to.1))?,
            );
            if arcs_out.insert(key, l).is_some() {
                return Err(duplicate(from.1));
            }
        } else {
            return Err(ParseError::Syntax {
                pos: from.1,
                message: "an arc must connect a place and a transition".into(),
            });
        }
    }

    let mut marking = Marking::new();
    for (place, items) in &doc.initial {
        if !place_names.contains(&place.0) {
            return Err(unknown(place));
        }
        let p = PlaceId::new(&place.0).map_err(model(place.1))?;
        let l = label(items, false)?;
        marking.add(&p, &l.positive);
    }

    let ids = |names: &BTreeSet<String>| names.iter().map(|n| n.to_string()).collect::<Vec<_>>();
    let bases = ids(&base_names)
        .iter()
        .map(|n| BaseId::new(n))
        .collect::<Result<_, _>>()
        .map_err(model(Pos::default()))?;
    let places = ids(&place_names)
        .iter()
        .map(|n| PlaceId::new(n))
        .collect::<Result<_, _>>()
        .map_err(model(Pos::default()))?;
    let transitions = ids(&trans_names)
        .iter()
        .map(|n| TransId::new(n))
        .collect::<Result<_, _>>()
        .map_err(model(Pos::default()))?;
    let net = Net::new(doc.name, bases, places, transitions, arcs_in, arcs_out).map_err(|error| ParseError::Model {
        pos: Pos { line: 1, col: 1 },
        error,
    })?;
    Ok(ParsedNet {
        net,
        marking,
        declared_at,
    })
}

fn write_label(out: &mut String, label: &ArcLabel) {
    let mut items: Vec<String> = Vec::new();
    items.extend(label.positive.bases.iter().map(|b| b.to_string()));
    items.extend(label.positive.bonds.iter().map(|b| b.to_string()));
    items.extend(label.negative.bases.iter().map(|b| format!("!{b}")));
    items.extend(label.negative.bonds.iter().map(|b| format!("!{b}")));
    if items.is_empty() {
        out.push_str("{}");
    } else {
        let _ = write!(out, "{{ {} }}", items.join(", "));
    }
}

fn write_tokens(out: &mut String, tokens: &Tokens) {
    write_label(
        out,
        &ArcLabel {
            positive: tokens.clone(),
            negative: Tokens::new(),
        },
    );
}

/// Canonical text for a net and its initial marking.
pub fn print_net(net: &Net, m0: &Marking) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "net {} {{", net.name());
    let list = |names: Vec<&str>| names.join(", ");
    if !net.bases().is_empty() {
        let _ = writeln!(
            out,
            "  bases: {};",
            list(net.bases().iter().map(|b| b.as_str()).collect())
        );
    }
    if !net.places().is_empty() {
        let _ = writeln!(
            out,
            "  places: {};",
            list(net.places().iter().map(|p| p.as_str()).collect())
        );
    }
    if !net.transitions().is_empty() {
        let _ = writeln!(
            out,
            "  transitions: {};",
            list(net.transitions().iter().map(|t| t.as_str()).collect())
        );
    }
    for (t, view) in net.views() {
        if view.inputs.is_empty() && view.outputs.is_empty() {
            continue;
        }
        out.push('\n');
        for (p, label) in &view.inputs {
            let _ = write!(out, "  arc {p} -> {t} ");
            write_label(&mut out, label);
            out.push('\n');
        }
        for (p, label) in &view.outputs {
            let _ = write!(out, "  arc {t} -> {p} ");
            write_label(&mut out, label);
            out.push('\n');
        }
    }
    let entries: Vec<_> = m0.iter().collect();
    if !entries.is_empty() {
        out.push_str("\n  initial {");
        for (i, (p, tokens)) in entries.into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, " {p}: ");
            write_tokens(&mut out, tokens);
        }
        out.push_str(" }\n");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::Rule;

    const CATALYSIS: &str = include_str!("../../nets/catalysis.rpn");

    #[test]
    fn catalysis_parses_and_validates() {
        let (net, m0) = parse_net(CATALYSIS).unwrap();
        assert_eq!(net.transitions().len(), 2);
        assert_eq!(net.places().len(), 5);
        assert_eq!(m0.iter().count(), 3);
    }

    #[test]
    fn undeclared_base_in_label() {
        let text = "net n { bases: a; places: x; transitions: t1;\n arc t1 -> x { a, c, a-c } }";
        let err = parse_net(text).unwrap_err();
        assert_eq!(err.code(), "UNKNOWN-IDENT");
        assert_eq!(err.pos(), Pos { line: 2, col: 19 });
    }

    #[test]
    fn negated_bond_on_in_arc_and_out_arc() {
        let base = "net n { bases: a, b; places: x, y; transitions: t2;
            arc x -> t2 { a, b, !a-b }
            arc t2 -> y { a, b }
            initial { x: { a, b } } }";
        let (net, _) = parse_net(base).unwrap();
        let t2 = net.transition("t2").unwrap();
        let x = net.place("x").unwrap();
        assert_eq!(net.arc_in(&x, &t2).unwrap().negative.bonds.len(), 1);

        let bad = "net n { bases: a, b; places: x, y; transitions: t2;
            arc x -> t2 { a, b }
            arc t2 -> y { a, b, !a-b }
            initial { x: { a, b } } }";
        let err = parse_net(bad).unwrap_err();
        assert_eq!(err.code(), "NEG-ON-OUT-ARC");
        assert_eq!(err.pos(), Pos { line: 1, col: 49 });
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_net("net n {\n  bases a;\n}").unwrap_err();
        assert_eq!(err.code(), "SYNTAX");
        assert_eq!(err.pos(), Pos { line: 2, col: 9 });
        let err = parse_net("net n { places: x; transitions: t; arc x -> x {} }").unwrap_err();
        assert_eq!(err.code(), "SYNTAX");
        let err = parse_net("net n { bases: a; places: x; initial { x: { !a } } }").unwrap_err();
        assert_eq!(err.code(), "SYNTAX");
        let err = parse_net("net n { places: x; transitions: x; }").unwrap_err();
        assert_eq!(err.code(), "SYNTAX");
        let err = parse_net("net n { bases: a; places: x; transitions: t; arc x -> t { a-a } }").unwrap_err();
        assert!(matches!(
            err,
            ParseError::Model {
                error: ModelError::SelfBond(_),
                ..
            }
        ));
        assert_eq!(parse_net("net n { } extra").unwrap_err().code(), "SYNTAX");
        assert_eq!(parse_net("net n { $ }").unwrap_err().code(), "SYNTAX");
    }

    #[test]
    fn bases_may_share_names_with_transitions() {
        let text = "net n { bases: c; places: p, q; transitions: c;
            arc p -> c { c } arc c -> q { c } initial { p: { c } } }";
        assert!(parse_net(text).is_ok());
    }

    #[test]
    fn comments_and_order_independence() {
        let text = "# header\nnet n { # trailing\n arc p -> t { a } initial { p: { a } }
            arc t -> q { a } places: p, q; bases: a; transitions: t; }";
        let (net, m0) = parse_net(text).unwrap();
        let again = parse_net(&print_net(&net, &m0)).unwrap();
        assert_eq!(again, (net, m0));
    }

    #[test]
    fn unchecked_parse_reports_all_violations() {
        let text = "net n { bases: a; places: x; transitions: t;
            arc x -> t { a } arc t -> x { a } initial { x: { a } } }";
        let parsed = parse_unchecked(text).unwrap();
        assert!(parsed.validate().has(Rule::Acyclic));
        assert_eq!(parse_net(text).unwrap_err().code(), "ACYCLIC");
    }

    #[test]
    fn printer_output_is_canonical() {
        let (net, m0) = parse_net(CATALYSIS).unwrap();
        let printed = print_net(&net, &m0);
        assert!(printed.contains("  arc t1 -> x { a, c, a-c }\n"));
        assert!(printed.contains("initial { u: { c }, v: { a }, w: { b } }"));
        let (net2, m02) = parse_net(&printed).unwrap();
        assert_eq!(print_net(&net2, &m02), printed);
    }
}
