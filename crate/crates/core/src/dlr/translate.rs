use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{
    Card, Modality, Schema, Subject, Temporality, Tense, TransitionConstraint, TransitionKind,
};
use crate::semantics::{FutureWindow, PastTrigger, SemanticsOptions};
use crate::text::{transition_keyword, KeywordStyle};

use super::expr::{name, Cmp, Dir, Expr, Sort, TOp};

/// Where an axiom came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub source: String,
    /// Set for axioms that only approximate the schema construct.
    pub approximate: bool,
}

/// An inclusion `lhs [= rhs` between expressions of one sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub lhs: Expr,
    pub rhs: Expr,
    pub provenance: Provenance,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [= {}", self.lhs, self.rhs)
    }
}

/// Symbols a knowledge base may mention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    /// Relation name to its role names, in position order.
    pub relations: BTreeMap<String, Vec<String>>,
    pub attributes: BTreeSet<String>,
    pub domains: BTreeSet<String>,
}

impl Signature {
    pub fn of(schema: &Schema) -> Self {
        Signature {
            concepts: schema.classes().keys().cloned().collect(),
            relations: schema
                .relationships()
                .values()
                .map(|r| (r.name.clone(), r.role_names().map(String::from).collect()))
                .collect(),
            attributes: schema.attributes().map(|(q, _, _)| q).collect(),
            domains: schema.domains(),
        }
    }
}

/// A defined transition set: its sort and defining right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub sort: Sort,
    pub body: Expr,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DlrKb {
    pub axioms: Vec<Axiom>,
    /// Transition-set names, evaluated by their definition.
    pub definitions: BTreeMap<String, Definition>,
    pub signature: Signature,
}

impl DlrKb {
    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }
}

impl fmt::Display for DlrKb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axioms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

struct Builder<'s> {
    schema: &'s Schema,
    opts: SemanticsOptions,
    kb: DlrKb,
}

impl Builder<'_> {
    fn push(&mut self, lhs: Expr, rhs: Expr, source: String) {
        self.kb.axioms.push(Axiom { lhs, rhs, provenance: Provenance { source, approximate: false } });
    }

    fn sort_of(&self, subject: Subject, element: &str) -> Sort {
        match subject {
            Subject::Class => Sort::Concept,
            Subject::Attribute => Sort::Attribute,
            Subject::Relationship => {
                Sort::Relation(self.schema.relationship(element).map_or(0, |r| r.arity()))
            }
        }
    }

    fn rel_count(&self, cmp: Cmp, k: u32, rel: &str, role: &str) -> Expr {
        let index = self.schema.relationship(rel).and_then(|r| r.role_index(role)).unwrap_or(0);
        Expr::RelCount { cmp, k, role: role.to_string(), index, rel: Box::new(name(rel)) }
    }

    fn card(&self, card: &Card, lo: impl Fn(Cmp, u32) -> Expr) -> Expr {
        let mut parts = vec![lo(Cmp::AtLeast, card.min)];
        if let Some(max) = card.max {
            parts.push(lo(Cmp::AtMost, max));
        }
        Expr::and(parts)
    }

    fn temporality(&mut self, element: &str, t: Temporality, what: &str) {
        match t {
            Temporality::Snapshot => {
                self.push(name(element), name(element).t(TOp::Always), format!("snapshot {what} {element}"))
            }
            Temporality::Temporary => self.push(
                name(element),
                name(element).not().t(TOp::Sometime),
                format!("temporal {what} {element}"),
            ),
            Temporality::Mixed => {}
        }
    }

    fn transitions(&mut self) {
        let schema = self.schema;
        for tc in schema.transitions() {
            let source = tc.to_string();
            if tc.kind == TransitionKind::Frozen {
                self.push(name(&tc.source), name(&tc.source).t(TOp::AlwaysFuture), source);
                continue;
            }
            let sort = self.sort_of(tc.subject, &tc.source);
            let (fname, fbody) = future_set(tc);
            self.define(&fname, sort, fbody.clone(), &source);
            if tc.tense == Tense::Past {
                let (pname, pbody) = past_set(tc);
                self.define(&pname, sort, pbody, &source);
            }
            if tc.modality == Modality::Mandatory {
                match tc.tense {
                    Tense::Future => {
                        let rhs = match self.opts.future_window {
                            FutureWindow::Reflexive => {
                                Expr::Or(vec![name(&fname), name(&fname).t(TOp::Future)])
                            }
                            FutureWindow::Strict => name(&fname).t(TOp::Future),
                        };
                        self.push(name(&tc.source), rhs, source.clone());
                    }
                    Tense::Past => {
                        let trigger = match self.opts.past_trigger {
                            PastTrigger::Target => tc.target_name(),
                            PastTrigger::Source => &tc.source,
                        };
                        self.push(name(trigger), name(&fname).t(TOp::Past), source.clone());
                    }
                }
            }
            if tc.persistent {
                self.push(name(&fname), name(tc.target_name()).t(TOp::AlwaysFuture), source.clone());
            }
        }
    }

    fn define(&mut self, set: &str, sort: Sort, body: Expr, source: &str) {
        if self.kb.definitions.contains_key(set) {
            return;
        }
        self.kb.definitions.insert(set.to_string(), Definition { sort, body: body.clone() });
        self.push(name(set), body, source.to_string());
    }
}

fn set_name(tc: &TransitionConstraint, past: bool) -> String {
    let base = TransitionConstraint { modality: Modality::Optional, persistent: false, ..tc.clone() };
    let mut k = transition_keyword(&base, KeywordStyle::ChgExt);
    if past {
        k.push('-');
    }
    if let Some(n) = tc.offset {
        k.push_str(&format!("^{n}"));
    }
    format!("{k}<{},{}>", tc.source, tc.target_name())
}

/// The future-form transition set and its definition.
pub fn future_set(tc: &TransitionConstraint) -> (String, Expr) {
    let (s, g) = (name(&tc.source), name(tc.target_name()));
    let n = tc.step();
    let later = match tc.kind {
        TransitionKind::Change => Expr::And(vec![s.clone().not(), g.clone()]),
        _ => g.clone(),
    };
    let body = Expr::And(vec![s, g.not(), later.repeat(TOp::Next, n)]);
    (set_name(tc, false), body)
}

/// The past-form transition set and its definition.
pub fn past_set(tc: &TransitionConstraint) -> (String, Expr) {
    let (s, g) = (name(&tc.source), name(tc.target_name()));
    let n = tc.step();
    let body = match tc.kind {
        TransitionKind::Change => {
            Expr::And(vec![s.clone().not(), g.clone(), Expr::And(vec![s, g.not()]).repeat(TOp::Prev, n)])
        }
        _ => Expr::And(vec![s, g.clone(), g.not().repeat(TOp::Prev, n)]),
    };
    (set_name(tc, true), body)
}

/// Maps a schema to its DLR_US knowledge base under the default semantics.
pub fn translate(schema: &Schema) -> DlrKb {
    translate_with(schema, &SemanticsOptions::default())
}

pub fn translate_with(schema: &Schema, opts: &SemanticsOptions) -> DlrKb {
    let mut b =
        Builder { schema, opts: *opts, kb: DlrKb { signature: Signature::of(schema), ..Default::default() } };

    for (q, _, _) in schema.attributes() {
        b.push(
            name(&q),
            Expr::And(vec![
                Expr::AttrSelect { dir: Dir::From, concept: Box::new(Expr::Top(Sort::Concept)) },
                Expr::AttrSelect { dir: Dir::To, concept: Box::new(Expr::TopD) },
            ]),
            format!("attribute {q}"),
        );
    }
    for (c1, c2) in schema.isa_c() {
        b.push(name(c1), name(c2), format!("isa {c1} {c2}"));
    }
    for (r1, r2) in schema.isa_r() {
        b.push(name(r1), name(r2), format!("isar {r1} {r2}"));
    }
    for (u1, u2) in schema.isa_u() {
        let lhs = b.rel_count(Cmp::AtLeast, 1, &u1.relationship, &u1.role);
        let rhs = b.rel_count(Cmp::AtLeast, 1, &u2.relationship, &u2.role);
        b.push(lhs, rhs, format!("isau {u1} {u2}"));
    }
    for r in schema.relationships().values() {
        let n = r.arity();
        let sel = r
            .roles
            .iter()
            .enumerate()
            .map(|(i, u)| Expr::Select {
                role: u.name.clone(),
                index: i,
                arity: n,
                concept: Box::new(name(&u.player)),
            })
            .collect();
        b.push(name(&r.name), Expr::And(sel), format!("rel {}", r.name));
    }
    for c in schema.classes().values() {
        if c.attributes.is_empty() {
            continue;
        }
        let mut parts: Vec<Expr> = c
            .attributes
            .values()
            .map(|a| Expr::exists_attr(Dir::From, name(format!("{}.{}", c.name, a.name))))
            .collect();
        parts.extend(c.attributes.values().map(|a| {
            Expr::forall_attr(name(format!("{}.{}", c.name, a.name)), Expr::Domain(a.domain.clone()))
        }));
        b.push(name(&c.name), Expr::And(parts), format!("attributes of {}", c.name));
    }
    for r in schema.relationships().values() {
        for u in &r.roles {
            if let Some(card) = &u.card {
                let rhs = b.card(card, |cmp, k| b.rel_count(cmp, k, &r.name, &u.name));
                b.push(name(&u.player), rhs, format!("cardinality {card} of {}.{}", r.name, u.name));
            }
        }
    }
    for (q, c, a) in schema.attributes() {
        if let Some(card) = &a.card {
            let rhs =
                b.card(card, |cmp, k| Expr::AttrCount { cmp, k, dir: Dir::From, attr: Box::new(name(&q)) });
            b.push(name(&c.name), rhs, format!("cardinality {card} of {q}"));
        }
    }
    for (kw, set) in [("disjoint", schema.disj_c()), ("disjointr", schema.disj_r())] {
        for (members, sup) in set {
            let ms: Vec<&String> = members.iter().collect();
            for (i, m) in ms.iter().enumerate() {
                let mut parts = vec![name(sup)];
                parts.extend(ms[i + 1..].iter().map(|o| name(*o).not()));
                b.push(name(*m), Expr::and(parts), format!("{kw} {{{}}} {sup}", join(&ms)));
            }
        }
    }
    for (members, sup) in schema.cover() {
        let ms: Vec<&String> = members.iter().collect();
        let src = format!("cover {{{}}} {sup}", join(&ms));
        for m in &ms {
            b.push(name(*m), name(sup), src.clone());
        }
        b.push(name(sup), Expr::or(ms.iter().map(|m| name(*m)).collect()), src);
    }
    for (c, a) in schema.ids() {
        let q = format!("{c}.{}", a.name);
        let always = name(&q).t(TOp::Always);
        let exactly_one = Expr::And(vec![
            Expr::AttrCount { cmp: Cmp::AtLeast, k: 1, dir: Dir::From, attr: Box::new(always.clone()) },
            Expr::AttrCount { cmp: Cmp::AtMost, k: 1, dir: Dir::From, attr: Box::new(always) },
        ]);
        let unique = Expr::AttrCount {
            cmp: Cmp::AtMost,
            k: 1,
            dir: Dir::To,
            attr: Box::new(Expr::And(vec![
                name(&q),
                Expr::AttrSelect { dir: Dir::From, concept: Box::new(name(c)) },
            ])),
        };
        for (lhs, rhs) in [(name(c), exactly_one), (Expr::TopD, unique)] {
            b.kb.axioms.push(Axiom {
                lhs,
                rhs,
                provenance: Provenance { source: format!("id {q}"), approximate: true },
            });
        }
    }
    for c in schema.classes().values() {
        b.temporality(&c.name, c.temporality, "class");
    }
    for r in schema.relationships().values() {
        b.temporality(&r.name, r.temporality, "relationship");
    }
    for (q, c, a) in schema.attributes() {
        let inner = match a.temporality {
            Temporality::Snapshot => name(&q).t(TOp::Always),
            Temporality::Temporary => name(&q).not().t(TOp::Sometime),
            Temporality::Mixed => continue,
        };
        let rhs = Expr::exists_attr(Dir::From, Expr::And(vec![name(&q), inner.not()])).not();
        b.push(name(&c.name), rhs, format!("attribute temporality of {q} in {}", c.name));
    }
    for (q, _, a) in schema.attributes() {
        b.temporality(&q, a.temporality, "attribute");
    }
    b.transitions();
    b.kb
}

fn join(items: &[&String]) -> String {
    items.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
}
