#![allow(clippy::result_large_err)]

use crate::diagnostics::{Diagnostic, SourceSpan};
use crate::model::{
    build_schema, Card, Declaration, Modality, ModelError, RawAttr, RoleDecl, RoleRef, Schema, Subject,
    Temporality, Tense, TransitionConstraint, TransitionKind,
};

use super::lexer::{tokenize, Tok, Token};

const STATEMENT_KEYWORDS: &[&str] =
    &["class", "rel", "isa", "isar", "isau", "disjoint", "disjointr", "cover", "chronon"];

/// A declaration together with the source range of its statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub decl: Declaration,
    pub span: SourceSpan,
}

struct ParseError(Diagnostic);

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

/// Decoded transition keyword such as `PMQCHGR` or `dex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitionKeyword {
    pub persistent: bool,
    pub mandatory: bool,
    pub quantitative: bool,
    pub kind: TransitionKind,
    pub subject: Subject,
    pub past: bool,
}

/// Decodes `[P][M][Q](EXT|CHG|DEX|DEV)[R|A]` or `FRZ`, case-insensitively.
/// An all-lowercase base keyword denotes the past tense.
pub fn decode_keyword(word: &str) -> Option<TransitionKeyword> {
    let upper = word.to_ascii_uppercase();
    if upper == "FRZ" {
        return Some(TransitionKeyword {
            persistent: false,
            mandatory: false,
            quantitative: false,
            kind: TransitionKind::Frozen,
            subject: Subject::Attribute,
            past: false,
        });
    }
    let mut rest = upper.as_str();
    let mut offset = 0;
    let mut take = |rest: &mut &str, c: char| {
        if rest.starts_with(c) {
            *rest = &rest[1..];
            offset += 1;
            true
        } else {
            false
        }
    };
    let persistent = take(&mut rest, 'P');
    let mandatory = take(&mut rest, 'M');
    let quantitative = take(&mut rest, 'Q');
    if rest.len() < 3 {
        return None;
    }
    let kind = match &rest[..3] {
        "EXT" | "DEX" => TransitionKind::Extension,
        "CHG" | "DEV" => TransitionKind::Change,
        _ => return None,
    };
    let subject = match &rest[3..] {
        "" => Subject::Class,
        "R" => Subject::Relationship,
        "A" => Subject::Attribute,
        _ => return None,
    };
    let base = &word[offset..offset + 3];
    let past = base.chars().all(|c| c.is_ascii_lowercase());
    Some(TransitionKeyword { persistent, mandatory, quantitative, kind, subject, past })
}

fn model_rule(e: &ModelError) -> &'static str {
    match e {
        ModelError::DuplicateName { .. } => "duplicate-name",
        ModelError::DanglingReference(_) => "dangling-reference",
        ModelError::ArityMismatch(_) => "arity-mismatch",
        ModelError::IncompatibleSignature(..) => "incompatible-signature",
        ModelError::ConflictingTemporality(_) => "conflicting-temporality",
        ModelError::InvalidConstraint(_) => "invalid-constraint",
        ModelError::UnknownRole { .. } => "unknown-role",
        ModelError::UnknownRelationship(_) => "unknown-relationship",
    }
}

fn model_elements(e: &ModelError) -> Vec<String> {
    match e {
        ModelError::DuplicateName { name, .. }
        | ModelError::DanglingReference(name)
        | ModelError::ConflictingTemporality(name)
        | ModelError::UnknownRelationship(name) => vec![name.clone()],
        ModelError::IncompatibleSignature(a, b) => vec![a.clone(), b.clone()],
        ModelError::UnknownRole { relationship, role } => vec![format!("{relationship}.{role}")],
        ModelError::ArityMismatch(_) | ModelError::InvalidConstraint(_) => Vec::new(),
    }
}

/// Converts a schema construction error into a diagnostic.
pub fn model_diagnostic(e: &ModelError, span: Option<SourceSpan>) -> Diagnostic {
    let mut d = Diagnostic::error(model_rule(e), e.to_string()).with_elements(model_elements(e));
    d.span = span;
    d
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError(Diagnostic::error("syntax", msg).at(self.span())))
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        self.error(format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a name"),
        }
    }

    fn nat(&mut self) -> PResult<u32> {
        match *self.peek() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn temporality(&mut self) -> Vec<Temporality> {
        let mut v = Vec::new();
        loop {
            if self.eat_word("temporal") {
                v.push(Temporality::Temporary);
            } else if self.eat_word("snapshot") {
                v.push(Temporality::Snapshot);
            } else {
                return v;
            }
        }
    }

    fn card(&mut self) -> PResult<Option<Card>> {
        if !self.eat(&Tok::LBracket) {
            return Ok(None);
        }
        let min = self.nat()?;
        self.expect(Tok::Comma)?;
        let max = if self.eat(&Tok::Star) { None } else { Some(self.nat()?) };
        self.expect(Tok::RBracket)?;
        Ok(Some(Card { min, max }))
    }

    fn name_list(&mut self) -> PResult<Vec<String>> {
        self.expect(Tok::LBrace)?;
        let mut v = vec![self.name()?];
        while self.eat(&Tok::Comma) {
            v.push(self.name()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(v)
    }

    fn statement(&mut self) -> PResult<Declaration> {
        let word = match self.peek().clone() {
            Tok::Ident(w) => w,
            _ => return self.unexpected("a statement"),
        };
        let decl = match word.as_str() {
            "class" => {
                self.bump();
                self.class_decl()?
            }
            "rel" => {
                self.bump();
                self.rel_decl()?
            }
            "isa" | "isar" => {
                self.bump();
                let sub = self.name()?;
                let sup = self.name()?;
                if word == "isa" {
                    Declaration::IsaClass { sub, sup }
                } else {
                    Declaration::IsaRelationship { sub, sup }
                }
            }
            "isau" => {
                self.bump();
                let sub = self.role_ref()?;
                let sup = self.role_ref()?;
                Declaration::IsaRole { sub, sup }
            }
            "disjoint" | "disjointr" | "cover" => {
                self.bump();
                let members = self.name_list()?;
                let sup = self.name()?;
                match word.as_str() {
                    "disjoint" => Declaration::DisjointClasses { members, sup },
                    "disjointr" => Declaration::DisjointRelationships { members, sup },
                    _ => Declaration::Cover { members, sup },
                }
            }
            "chronon" => {
                self.bump();
                match self.peek().clone() {
                    Tok::Str(s) => {
                        self.bump();
                        Declaration::Chronon(s)
                    }
                    _ => return self.unexpected("a quoted chronon unit"),
                }
            }
            _ => match decode_keyword(&word) {
                Some(kw) => {
                    self.bump();
                    self.transition(kw)?
                }
                None => {
                    return self.error(format!("unknown statement keyword '{word}'"));
                }
            },
        };
        self.expect(Tok::Semi)?;
        Ok(decl)
    }

    fn role_ref(&mut self) -> PResult<RoleRef> {
        let rel = self.name()?;
        self.expect(Tok::Dot)?;
        let role = self.name()?;
        Ok(RoleRef::new(rel, role))
    }

    fn class_decl(&mut self) -> PResult<Declaration> {
        let name = self.name()?;
        let markings = self.temporality();
        let mut attributes = Vec::new();
        if self.eat(&Tok::LBrace) {
            while !self.eat(&Tok::RBrace) {
                attributes.push(self.attr_decl()?);
            }
        }
        Ok(Declaration::Class { name, markings, attributes })
    }

    fn attr_decl(&mut self) -> PResult<RawAttr> {
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let domain = self.name()?;
        let mut attr = RawAttr::new(name, domain);
        loop {
            let before = self.pos;
            attr.markings.extend(self.temporality());
            if self.eat_word("id") {
                if attr.identifier {
                    return self.error("repeated 'id' flag");
                }
                attr.identifier = true;
            }
            if self.eat_word("frozen") {
                if attr.frozen {
                    return self.error("repeated 'frozen' flag");
                }
                attr.frozen = true;
            }
            if matches!(self.peek(), Tok::LBracket) {
                if attr.card.is_some() {
                    return self.error("repeated cardinality");
                }
                attr.card = self.card()?;
            }
            if self.pos == before {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(attr)
    }

    fn rel_decl(&mut self) -> PResult<Declaration> {
        let name = self.name()?;
        let markings = self.temporality();
        self.expect(Tok::LParen)?;
        let mut roles = Vec::new();
        loop {
            let role = self.name()?;
            self.expect(Tok::Colon)?;
            let player = self.name()?;
            let card = self.card()?;
            roles.push(RoleDecl { name: role, player, card });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Declaration::Relationship { name, markings, roles })
    }

    fn subject(&mut self, subject: Subject) -> PResult<String> {
        let first = self.name()?;
        if subject == Subject::Attribute {
            self.expect(Tok::Dot)?;
            let attr = self.name()?;
            Ok(format!("{first}.{attr}"))
        } else {
            Ok(first)
        }
    }

    fn transition(&mut self, kw: TransitionKeyword) -> PResult<Declaration> {
        let keyword_span = self.prev_span();
        let past = self.eat(&Tok::Minus) || kw.past;
        if kw.kind == TransitionKind::Frozen {
            if past {
                return self.error("'FRZ' has no past-tense form");
            }
            let attr = self.subject(Subject::Attribute)?;
            return Ok(Declaration::Transition(TransitionConstraint::frozen(attr)));
        }
        let source = self.subject(kw.subject)?;
        self.expect(Tok::Arrow)?;
        let target = self.subject(kw.subject)?;
        let offset = if self.eat_word("after") { Some(self.nat()?) } else { None };
        match (kw.quantitative, offset) {
            (true, None) => {
                return Err(ParseError(
                    Diagnostic::error("syntax", "quantitative keyword requires 'after <n>'").at(keyword_span),
                ))
            }
            (false, Some(_)) => {
                return Err(ParseError(
                    Diagnostic::error("syntax", "'after <n>' requires a Q-prefixed keyword")
                        .at(self.prev_span()),
                ))
            }
            _ => {}
        }
        let mut modality = if kw.mandatory { Modality::Mandatory } else { Modality::Optional };
        if self.eat_word("mandatory") {
            modality = Modality::Mandatory;
        } else if self.is_word("optional") {
            if kw.mandatory {
                return self.error("'optional' contradicts the M prefix");
            }
            self.bump();
        }
        Ok(Declaration::Transition(TransitionConstraint {
            subject: kw.subject,
            kind: kw.kind,
            tense: if past { Tense::Past } else { Tense::Future },
            modality,
            offset,
            persistent: kw.persistent,
            source,
            target: Some(target),
        }))
    }

    fn at_statement_start(&self) -> bool {
        match self.peek() {
            Tok::Ident(w) => STATEMENT_KEYWORDS.contains(&w.as_str()) || decode_keyword(w).is_some(),
            Tok::Eof => true,
            _ => false,
        }
    }

    /// Skips past the next `;`, then keeps skipping whole statements until
    /// one that starts with a statement keyword.
    fn resync(&mut self) {
        loop {
            while !matches!(self.peek(), Tok::Semi | Tok::Eof) {
                self.bump();
            }
            self.eat(&Tok::Semi);
            while self.eat(&Tok::RBrace) {
                self.eat(&Tok::Semi);
            }
            if self.at_statement_start() {
                return;
            }
        }
    }
}

/// Parses statements without building a schema.
pub fn parse_declarations(src: &str) -> Result<Vec<Spanned>, Vec<Diagnostic>> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut out = Vec::new();
    let mut diags = Vec::new();
    while !matches!(p.peek(), Tok::Eof) {
        let start = p.span();
        match p.statement() {
            Ok(decl) => out.push(Spanned { decl, span: start.to(p.prev_span()) }),
            Err(ParseError(d)) => {
                diags.push(d);
                p.resync();
            }
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

/// Parses and validates a `.trend` document.
pub fn parse_schema(src: &str) -> Result<Schema, Vec<Diagnostic>> {
    let decls = parse_declarations(src)?;
    let raw: Vec<Declaration> = decls.iter().map(|s| s.decl.clone()).collect();
    build_schema(&raw).map_err(|errs| {
        errs.iter().map(|e| model_diagnostic(&e.error, decls.get(e.index).map(|s| s.span))).collect()
    })
}

/// Parses exactly one statement, e.g. a candidate constraint for implication.
pub fn parse_statement(src: &str) -> Result<Declaration, Vec<Diagnostic>> {
    let src = src.trim();
    let owned;
    let text = if src.ends_with(';') {
        src
    } else {
        owned = format!("{src};");
        &owned
    };
    let mut decls = parse_declarations(text)?;
    if decls.len() != 1 {
        return Err(vec![Diagnostic::error(
            "syntax",
            format!("expected exactly one statement, found {}", decls.len()),
        )]);
    }
    Ok(decls.pop().unwrap().decl)
}
