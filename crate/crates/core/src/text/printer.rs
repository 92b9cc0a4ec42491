use std::fmt::Write as _;

use crate::model::{
    Card, Modality, Schema, Subject, Temporality, Tense, TransitionConstraint, TransitionKind,
};

/// Surface spelling of the transition kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KeywordStyle {
    /// `CHG` / `EXT`
    #[default]
    ChgExt,
    /// `DEV` / `DEX`
    DevDex,
}

impl std::str::FromStr for KeywordStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chg-ext" => Ok(KeywordStyle::ChgExt),
            "dev-dex" => Ok(KeywordStyle::DevDex),
            _ => Err(format!("unknown label style '{s}' (expected chg-ext or dev-dex)")),
        }
    }
}

/// Canonical text of a schema.
pub fn serialize_schema(schema: &Schema) -> String {
    serialize_with(schema, KeywordStyle::ChgExt)
}

fn marking(t: Temporality) -> &'static str {
    match t {
        Temporality::Snapshot => " snapshot",
        Temporality::Temporary => " temporal",
        Temporality::Mixed => "",
    }
}

fn card(c: &Option<Card>) -> String {
    c.map(|c| format!(" {c}")).unwrap_or_default()
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// Keyword for a transition, without the past-tense `-` suffix.
pub fn transition_keyword(t: &TransitionConstraint, style: KeywordStyle) -> String {
    if t.kind == TransitionKind::Frozen {
        return "FRZ".into();
    }
    let mut k = String::new();
    if t.persistent {
        k.push('P');
    }
    if t.modality == Modality::Mandatory {
        k.push('M');
    }
    if t.offset.is_some() {
        k.push('Q');
    }
    k.push_str(match (t.kind, style) {
        (TransitionKind::Extension, KeywordStyle::ChgExt) => "EXT",
        (TransitionKind::Change, KeywordStyle::ChgExt) => "CHG",
        (TransitionKind::Extension, KeywordStyle::DevDex) => "DEX",
        (TransitionKind::Change, KeywordStyle::DevDex) => "DEV",
        (TransitionKind::Frozen, _) => unreachable!(),
    });
    match t.subject {
        Subject::Relationship => k.push('R'),
        Subject::Attribute => k.push('A'),
        Subject::Class => {}
    }
    k
}

fn transition_line(t: &TransitionConstraint, style: KeywordStyle) -> String {
    let mut s = transition_keyword(t, style);
    if t.tense == Tense::Past {
        s.push('-');
    }
    let _ = write!(s, " {} -> {}", t.source, t.target_name());
    if let Some(n) = t.offset {
        let _ = write!(s, " after {n}");
    }
    s.push(';');
    s
}

/// Canonical text using the given transition keyword spelling.
///
/// Frozen constraints are printed as the `frozen` attribute flag.
pub fn serialize_with(schema: &Schema, style: KeywordStyle) -> String {
    let mut sections: Vec<String> = Vec::new();

    if let Some(u) = schema.chronon_unit() {
        sections.push(format!("chronon {};\n", quote(u)));
    }

    let mut classes = String::new();
    for c in schema.classes().values() {
        let _ = write!(classes, "class {}{}", c.name, marking(c.temporality));
        if c.attributes.is_empty() {
            classes.push_str(";\n");
            continue;
        }
        classes.push_str(" {\n");
        for a in c.attributes.values() {
            let q = format!("{}.{}", c.name, a.name);
            let _ = writeln!(
                classes,
                "  {}: {}{}{}{}{};",
                a.name,
                a.domain,
                marking(a.temporality),
                if a.identifier { " id" } else { "" },
                if schema.is_frozen(&q) { " frozen" } else { "" },
                card(&a.card)
            );
        }
        classes.push_str("};\n");
    }
    sections.push(classes);

    let mut rels = String::new();
    for r in schema.relationships().values() {
        let roles: Vec<String> =
            r.roles.iter().map(|u| format!("{}: {}{}", u.name, u.player, card(&u.card))).collect();
        let _ = writeln!(rels, "rel {}{} ({});", r.name, marking(r.temporality), roles.join(", "));
    }
    sections.push(rels);

    let mut hier = String::new();
    for (a, b) in schema.isa_c() {
        let _ = writeln!(hier, "isa {a} {b};");
    }
    for (a, b) in schema.isa_r() {
        let _ = writeln!(hier, "isar {a} {b};");
    }
    for (a, b) in schema.isa_u() {
        let _ = writeln!(hier, "isau {a} {b};");
    }
    for (kw, set) in
        [("disjoint", schema.disj_c()), ("disjointr", schema.disj_r()), ("cover", schema.cover())]
    {
        for (members, sup) in set {
            let m: Vec<&str> = members.iter().map(String::as_str).collect();
            let _ = writeln!(hier, "{kw} {{{}}} {sup};", m.join(", "));
        }
    }
    sections.push(hier);

    let mut lines: Vec<(Subject, &str, &str, String)> = schema
        .transitions()
        .iter()
        .filter(|t| t.kind != TransitionKind::Frozen)
        .map(|t| (t.subject, t.source.as_str(), t.target_name(), transition_line(t, style)))
        .collect();
    lines.sort();
    let mut trans = String::new();
    for (_, _, _, l) in lines {
        trans.push_str(&l);
        trans.push('\n');
    }
    sections.push(trans);

    sections.retain(|s| !s.is_empty());
    sections.join("\n")
}
