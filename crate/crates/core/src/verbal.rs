//! Controlled-natural-language rendering of schemas, one sentence per
//! construct.

use std::collections::BTreeSet;

use crate::model::{
    split_attr, Card, Modality, Schema, Subject, Temporality, Tense, TransitionConstraint, TransitionKind,
};
use crate::text::KeywordStyle;

fn words(ident: &str) -> Vec<String> {
    let chars: Vec<char> = ident.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '-' || c == ' ' {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let prev = i.checked_sub(1).map(|j| chars[j]);
        let next = chars.get(i + 1);
        let boundary = c.is_uppercase()
            && match prev {
                Some(p) if p.is_lowercase() || p.is_ascii_digit() => true,
                Some(p) if p.is_uppercase() => next.is_some_and(|n| n.is_lowercase()),
                _ => false,
            };
        if boundary && !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out.into_iter()
        .map(|w| {
            let caps =
                w.chars().filter(|c| c.is_alphabetic()).count() > 1 && w.chars().all(|c| !c.is_lowercase());
            if caps {
                w
            } else {
                w.to_lowercase()
            }
        })
        .collect()
}

/// `PreviousCustomer` becomes `previous-customer`; runs of capitals are
/// kept (`VIPCustomer` becomes `VIP-customer`).
pub fn name_to_surface(ident: &str) -> String {
    words(ident).join("-")
}

/// Space-separated form used for attributes and relationships:
/// `arrivalTime` becomes `arrival time`.
pub fn name_to_phrase(ident: &str) -> String {
    words(ident).join(" ")
}

fn article(noun: &str) -> &'static str {
    match noun.chars().next() {
        Some(c) if "aeiouAEIOU".contains(c) => "an",
        _ => "a",
    }
}

fn a(noun: &str) -> String {
    format!("{} {noun}", article(noun))
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn class(c: &str) -> String {
    name_to_surface(c)
}

fn attr(q: &str) -> String {
    name_to_phrase(split_attr(q).map_or(q, |(_, a)| a))
}

struct Writer<'s> {
    schema: &'s Schema,
    unit: String,
}

impl Writer<'_> {
    fn offset(&self, tc: &TransitionConstraint) -> String {
        match tc.offset {
            Some(n) => {
                let unit =
                    if n == 1 { self.unit.strip_suffix('s').unwrap_or(&self.unit) } else { &self.unit };
                format!(" after exactly {n} {unit}")
            }
            None => String::new(),
        }
    }

    /// `traveller books a flight`, or without the article.
    fn rel_sentence(&self, r: &str, article: bool) -> String {
        let Some(decl) = self.schema.relationship(r) else { return name_to_phrase(r) };
        let players: Vec<String> = decl.roles.iter().map(|u| class(&u.player)).collect();
        let rest: Vec<String> = players[1..].iter().map(|p| if article { a(p) } else { p.clone() }).collect();
        let mut s = format!("{} {}", players.first().cloned().unwrap_or_default(), name_to_phrase(r));
        if !rest.is_empty() {
            s.push(' ');
            s.push_str(&rest.join(" and "));
        }
        s
    }

    fn class_transition(&self, tc: &TransitionConstraint) -> String {
        let (s, g) = (class(&tc.source), class(tc.target_name()));
        let n = self.offset(tc);
        let chg = tc.kind == TransitionKind::Change;
        let mut out = match (tc.tense, tc.modality, chg) {
            (Tense::Future, Modality::Optional, false) => {
                format!("{} may also become {}{n}", capitalize(&a(&s)), a(&g))
            }
            (Tense::Future, Modality::Optional, true) => {
                format!("{} may become {}{n} ceasing to be {}", capitalize(&a(&s)), a(&g), a(&s))
            }
            (Tense::Future, Modality::Mandatory, false) => format!("Each {s} must also become {}{n}", a(&g)),
            (Tense::Future, Modality::Mandatory, true) => {
                format!("Each {s} must evolve to {}{n} ceasing to be {}", a(&g), a(&s))
            }
            (Tense::Past, Modality::Mandatory, false) => format!("Each {g} was already {}{n}", a(&s)),
            (Tense::Past, Modality::Mandatory, true) => {
                format!("Each {g} was {} before{n}, ceasing to be {}", a(&s), a(&s))
            }
            (Tense::Past, Modality::Optional, false) => {
                format!("{} may have been {} before{n}", capitalize(&a(&g)), a(&s))
            }
            (Tense::Past, Modality::Optional, true) => {
                format!("{} may have been {} before{n}, ceasing to be {}", capitalize(&a(&g)), a(&s), a(&s))
            }
        };
        if tc.persistent {
            out.push_str(&format!(", and remains {} from then on", a(&g)));
        }
        out + "."
    }

    fn rel_transition(&self, tc: &TransitionConstraint) -> String {
        let (r1, r2) = (&tc.source, tc.target_name());
        let n = self.offset(tc);
        let ending = if tc.kind == TransitionKind::Change {
            format!(", terminating the {} relation", self.rel_sentence(r1, true))
        } else {
            String::new()
        };
        let mut out = match (tc.tense, tc.modality) {
            (Tense::Future, m) => format!(
                "Each {} {} be followed by {}{n}{ending}",
                self.rel_sentence(r1, true),
                if m == Modality::Mandatory { "will" } else { "may" },
                self.rel_sentence(r2, false)
            ),
            (Tense::Past, m) => {
                let ending = if tc.kind == TransitionKind::Change {
                    format!(", and terminating that {} relation", self.rel_sentence(r1, false))
                } else {
                    String::new()
                };
                format!(
                    "Each {} {} been preceded by {}{n}{ending}",
                    self.rel_sentence(r2, true),
                    if m == Modality::Mandatory { "must have" } else { "may have" },
                    self.rel_sentence(r1, false)
                )
            }
        };
        if tc.persistent {
            out.push_str(&format!(", after which {} holds from then on", self.rel_sentence(r2, false)));
        }
        out + "."
    }

    fn attr_transition(&self, tc: &TransitionConstraint) -> String {
        if tc.kind == TransitionKind::Frozen {
            return format!("Once the value for {} is set, it cannot change anymore.", attr(&tc.source));
        }
        let (a1, a2) = (attr(&tc.source), attr(tc.target_name()));
        let owner = class(split_attr(&tc.source).map_or("", |(c, _)| c));
        let n = self.offset(tc);
        let verb = if tc.kind == TransitionKind::Change { "change into" } else { "also become" };
        let mut out = match (tc.tense, tc.modality) {
            (Tense::Future, Modality::Mandatory) => {
                format!("Each {a1} of {} must {verb} {}{n}", a(&owner), a(&a2))
            }
            (Tense::Future, Modality::Optional) => {
                format!("{} of {} may {verb} {}{n}", capitalize(&a(&a1)), a(&owner), a(&a2))
            }
            (Tense::Past, Modality::Mandatory) => {
                format!("Each {a2} of {} was already {}{n}", a(&owner), a(&a1))
            }
            (Tense::Past, Modality::Optional) => {
                format!("{} of {} may have been {} before{n}", capitalize(&a(&a2)), a(&owner), a(&a1))
            }
        };
        if tc.persistent {
            out.push_str(&format!(", and remains {} from then on", a(&a2)));
        }
        out + "."
    }

    fn card(&self, card: &Card) -> String {
        match card.max {
            Some(m) if m == card.min => format!("exactly {m}"),
            Some(m) => format!("between {} and {m}", card.min),
            None => format!("at least {}", card.min),
        }
    }
}

/// Sentences for every construct of the schema: classes, isa links,
/// temporality, class transitions, relationships, relationship transitions
/// and attributes. The keyword style is accepted for symmetry with the
/// other renderers; no template mentions a transition keyword.
pub fn verbalize(schema: &Schema, _style: KeywordStyle) -> Vec<String> {
    let w = Writer { schema, unit: schema.chronon_unit().unwrap_or("time points").to_string() };
    let mut mentioned: BTreeSet<&str> = BTreeSet::new();
    for (a, b) in schema.isa_c() {
        mentioned.insert(a);
        mentioned.insert(b);
    }
    for tc in schema.transitions() {
        if tc.subject == Subject::Class {
            mentioned.extend(tc.endpoints());
        }
    }
    for (ms, sup) in schema.disj_c().iter().chain(schema.cover()) {
        mentioned.extend(ms.iter().map(String::as_str));
        mentioned.insert(sup);
    }
    for r in schema.relationships().values() {
        mentioned.extend(r.roles.iter().map(|u| u.player.as_str()));
    }

    let mut out = Vec::new();
    for c in schema.classes().values() {
        let surface = class(&c.name);
        match c.temporality {
            Temporality::Snapshot => out.push(format!(
                "{} is an entity type whose objects will always be {}.",
                capitalize(&surface),
                a(&surface)
            )),
            Temporality::Mixed
                if !mentioned.contains(c.name.as_str())
                    && c.attributes.values().all(|at| {
                        // Only a bare frozen attribute yields no sentence naming its class.
                        at.temporality == Temporality::Mixed
                            && !at.identifier
                            && at.card.is_none()
                            && schema.is_frozen(&format!("{}.{}", c.name, at.name))
                    }) =>
            {
                out.push(format!("{} is an entity type.", capitalize(&surface)))
            }
            _ => {}
        }
    }
    for (sub, sup) in schema.isa_c() {
        out.push(format!("{} is {}.", capitalize(&class(sub)), a(&class(sup))));
    }
    for (ms, sup) in schema.disj_c() {
        let parts: Vec<String> = ms.iter().map(|m| a(&class(m))).collect();
        out.push(format!("No {} is more than one of {}.", class(sup), parts.join(", ")));
    }
    for (ms, sup) in schema.cover() {
        let parts: Vec<String> = ms.iter().map(|m| a(&class(m))).collect();
        out.push(format!("Each {} is {}.", class(sup), parts.join(" or ")));
    }
    for c in schema.classes().values() {
        if c.temporality == Temporality::Temporary {
            let s = class(&c.name);
            out.push(format!("Each {s} is not {} for some time.", a(&s)));
        }
    }
    for tc in schema.transitions().iter().filter(|t| t.subject == Subject::Class) {
        out.push(w.class_transition(tc));
    }

    for r in schema.relationships().values() {
        out.push(format!("{}.", capitalize(&a(&w.rel_sentence(&r.name, true)))));
        match r.temporality {
            Temporality::Snapshot => {
                out.push(format!("Each {} holds at all times.", w.rel_sentence(&r.name, true)))
            }
            Temporality::Temporary => {
                out.push(format!("Each {} does not hold for some time.", w.rel_sentence(&r.name, true)))
            }
            Temporality::Mixed => {}
        }
        for u in &r.roles {
            if let Some(card) = &u.card {
                out.push(format!(
                    "Each {} plays {} in {} {} times.",
                    class(&u.player),
                    name_to_phrase(&u.name),
                    name_to_phrase(&r.name),
                    w.card(card)
                ));
            }
        }
    }
    for (r1, r2) in schema.isa_r() {
        out.push(format!("Each {} is also {}.", w.rel_sentence(r1, true), a(&w.rel_sentence(r2, true))));
    }
    for (u1, u2) in schema.isa_u() {
        out.push(format!(
            "Whatever plays {} in {} also plays {} in {}.",
            name_to_phrase(&u1.role),
            name_to_phrase(&u1.relationship),
            name_to_phrase(&u2.role),
            name_to_phrase(&u2.relationship)
        ));
    }
    for (ms, sup) in schema.disj_r() {
        let parts: Vec<String> = ms.iter().map(|m| name_to_phrase(m)).collect();
        out.push(format!("No {} relation is more than one of {}.", name_to_phrase(sup), parts.join(", ")));
    }
    for tc in schema.transitions().iter().filter(|t| t.subject == Subject::Relationship) {
        out.push(w.rel_transition(tc));
    }

    for c in schema.classes().values() {
        let cs = class(&c.name);
        for at in c.attributes.values() {
            let q = format!("{}.{}", c.name, at.name);
            let ph = attr(&q);
            let frozen = schema.is_frozen(&q);
            let before = out.len();
            match at.temporality {
                Temporality::Temporary => out.push(format!(
                    "Each object in entity type {cs} having attribute {ph} does not have {} at some time.",
                    a(&ph)
                )),
                Temporality::Snapshot => out.push(format!(
                    "Each object in entity type {cs} having attribute {ph} has {ph} at all times."
                )),
                Temporality::Mixed => {}
            }
            if at.identifier {
                out.push(format!("Each {cs} is identified by its {ph}."));
            }
            if let Some(card) = &at.card {
                out.push(format!("Each {cs} has {} {ph} values.", w.card(card)));
            }
            if out.len() == before && !frozen {
                out.push(format!("Each {cs} has {}.", a(&ph)));
            }
            if frozen {
                out.push(format!("Once the value for {ph} is set, it cannot change anymore."));
            }
        }
    }
    for tc in schema
        .transitions()
        .iter()
        .filter(|t| t.subject == Subject::Attribute && t.kind != TransitionKind::Frozen)
    {
        out.push(w.attr_transition(tc));
    }
    out
}

/// Comparison form of a sentence: lowercase, articles dropped, whitespace
/// collapsed, trailing period removed.
pub fn normalize_sentence(s: &str) -> String {
    s.trim()
        .trim_end_matches('.')
        .to_lowercase()
        .split_whitespace()
        .filter(|w| !matches!(*w, "a" | "an" | "the"))
        .collect::<Vec<_>>()
        .join(" ")
}
