use std::collections::BTreeSet;

use thiserror::Error;

/// Attribute names the checker accepts.
const KNOWN_ATTRS: &[&str] =
    &["arrowhead", "arrowtail", "color", "dir", "fontname", "fontsize", "label", "rankdir", "shape", "style"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DotError {
    #[error("unterminated string at byte {0}")]
    UnterminatedString(usize),
    #[error("unexpected character {ch:?} at byte {at}")]
    BadChar { ch: char, at: usize },
    #[error("expected {expected}, found {found}")]
    Expected { expected: &'static str, found: String },
    #[error("node identifiers must be quoted: {0}")]
    UnquotedId(String),
    #[error("unknown attribute {0}")]
    UnknownAttribute(String),
    #[error("node {0} declared twice")]
    DuplicateNode(String),
    #[error("edge endpoint {0} is not a declared node")]
    UndeclaredNode(String),
}

/// Counts found by [`check_dot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DotStats {
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Punct(&'static str),
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Word(w)) => w.clone(),
        Some(Tok::Quoted(q)) => format!("\"{q}\""),
        Some(Tok::Punct(p)) => p.to_string(),
    }
}

fn lex(src: &str) -> Result<Vec<Tok>, DotError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c == '"' {
            it.next();
            let mut s = String::new();
            loop {
                match it.next() {
                    None => return Err(DotError::UnterminatedString(i)),
                    Some((_, '"')) => break,
                    Some((_, '\\')) => match it.next() {
                        Some((_, e)) => {
                            s.push('\\');
                            s.push(e);
                        }
                        None => return Err(DotError::UnterminatedString(i)),
                    },
                    Some((_, ch)) => s.push(ch),
                }
            }
            out.push(Tok::Quoted(s));
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, ch)) = it.peek() {
                if ch.is_ascii_alphanumeric() || ch == '_' || ch == '.' {
                    s.push(ch);
                    it.next();
                } else {
                    break;
                }
            }
            out.push(Tok::Word(s));
        } else {
            it.next();
            let p = match c {
                '{' => "{",
                '}' => "}",
                '[' => "[",
                ']' => "]",
                ';' => ";",
                ',' => ",",
                '=' => "=",
                '-' if it.peek().map(|p| p.1) == Some('>') => {
                    it.next();
                    "->"
                }
                ch => return Err(DotError::BadChar { ch, at: i }),
            };
            out.push(Tok::Punct(p));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    nodes: BTreeSet<String>,
    edges: Vec<(String, String)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, p: &'static str) -> bool {
        if self.peek() == Some(&Tok::Punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &'static str) -> Result<(), DotError> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(DotError::Expected { expected: p, found: describe(self.peek()) })
        }
    }

    fn value(&mut self) -> Result<(), DotError> {
        match self.toks.get(self.pos) {
            Some(Tok::Word(_) | Tok::Quoted(_)) => {
                self.pos += 1;
                Ok(())
            }
            other => Err(DotError::Expected { expected: "a value", found: describe(other) }),
        }
    }

    fn attr_list(&mut self) -> Result<(), DotError> {
        self.expect("[")?;
        while !self.eat("]") {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Word(k)) => {
                    if !KNOWN_ATTRS.contains(&k.as_str()) {
                        return Err(DotError::UnknownAttribute(k));
                    }
                    self.pos += 1;
                }
                other => {
                    return Err(DotError::Expected {
                        expected: "an attribute",
                        found: describe(other.as_ref()),
                    })
                }
            }
            self.expect("=")?;
            self.value()?;
            if !self.eat(",") {
                self.eat(";");
            }
        }
        Ok(())
    }

    fn node_id(&mut self) -> Result<String, DotError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Quoted(q)) => {
                self.pos += 1;
                Ok(q)
            }
            Some(Tok::Word(w)) => Err(DotError::UnquotedId(w)),
            other => {
                Err(DotError::Expected { expected: "a node identifier", found: describe(other.as_ref()) })
            }
        }
    }

    fn statement(&mut self) -> Result<(), DotError> {
        if let Some(Tok::Word(w)) = self.peek() {
            if matches!(w.as_str(), "graph" | "node" | "edge") {
                self.pos += 1;
                return self.attr_list();
            }
            let w = w.clone();
            if self.toks.get(self.pos + 1) == Some(&Tok::Punct("=")) {
                if !KNOWN_ATTRS.contains(&w.as_str()) {
                    return Err(DotError::UnknownAttribute(w));
                }
                self.pos += 2;
                return self.value();
            }
        }
        let first = self.node_id()?;
        let mut chain = vec![first];
        while self.eat("->") {
            chain.push(self.node_id()?);
        }
        if self.peek() == Some(&Tok::Punct("[")) {
            self.attr_list()?;
        }
        if chain.len() == 1 {
            let n = chain.pop().unwrap();
            if !self.nodes.insert(n.clone()) {
                return Err(DotError::DuplicateNode(n));
            }
        } else {
            for w in chain.windows(2) {
                self.edges.push((w[0].clone(), w[1].clone()));
            }
        }
        Ok(())
    }
}

/// Checks a digraph for well-formedness: balanced braces and brackets,
/// quoted node identifiers, known attribute names, edges between declared
/// nodes. Returns the number of node and edge statements.
pub fn check_dot(src: &str) -> Result<DotStats, DotError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, nodes: BTreeSet::new(), edges: Vec::new() };
    match p.toks.first() {
        Some(Tok::Word(w)) if w == "digraph" => p.pos += 1,
        other => return Err(DotError::Expected { expected: "digraph", found: describe(other) }),
    }
    if matches!(p.peek(), Some(Tok::Word(_) | Tok::Quoted(_))) {
        p.pos += 1;
    }
    p.expect("{")?;
    while !p.eat("}") {
        if p.peek().is_none() {
            return Err(DotError::Expected { expected: "}", found: "end of input".into() });
        }
        p.statement()?;
        p.eat(";");
    }
    if p.pos != p.toks.len() {
        return Err(DotError::Expected { expected: "end of input", found: describe(p.peek()) });
    }
    for (a, b) in &p.edges {
        for n in [a, b] {
            if !p.nodes.contains(n) {
                return Err(DotError::UndeclaredNode(n.clone()));
            }
        }
    }
    Ok(DotStats { nodes: p.nodes.len(), edges: p.edges.len() })
}
