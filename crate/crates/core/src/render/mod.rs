//! Diagram output in Graphviz DOT, with the notation's icons as text
//! markers.

mod dot_check;

pub use dot_check::{check_dot, DotError, DotStats};

use std::fmt::Write;

use crate::model::{Modality, Schema, Subject, Temporality, Tense, TransitionConstraint, TransitionKind};
use crate::text::KeywordStyle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    pub labels: KeywordStyle,
    /// Use `(T)`, `(S)`, `(F)` instead of pictographs.
    pub ascii: bool,
}

struct Markers {
    temporal: &'static str,
    snapshot: &'static str,
    frozen: &'static str,
}

const UNICODE: Markers = Markers { temporal: "⏰", snapshot: "📷", frozen: "📌" };
const ASCII: Markers = Markers { temporal: "(T)", snapshot: "(S)", frozen: "(F)" };

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn marked(name: &str, t: Temporality, m: &Markers) -> String {
    match t {
        Temporality::Temporary => format!("{name} {}", m.temporal),
        Temporality::Snapshot => format!("{name} {}", m.snapshot),
        Temporality::Mixed => name.to_string(),
    }
}

/// Edge label of a transition: `EXT`, `CHG-`, `PCHG`, `EXTR3`, `CHGA-`...
pub fn edge_label(tc: &TransitionConstraint, style: KeywordStyle) -> String {
    let mut s = String::new();
    if tc.persistent {
        s.push('P');
    }
    s.push_str(match (tc.kind, style) {
        (TransitionKind::Extension, KeywordStyle::ChgExt) => "EXT",
        (TransitionKind::Change, KeywordStyle::ChgExt) => "CHG",
        (TransitionKind::Extension, KeywordStyle::DevDex) => "DEX",
        (TransitionKind::Change, KeywordStyle::DevDex) => "DEV",
        (TransitionKind::Frozen, _) => "FRZ",
    });
    match tc.subject {
        Subject::Relationship => s.push('R'),
        Subject::Attribute => s.push('A'),
        Subject::Class => {}
    }
    if tc.tense == Tense::Past {
        s.push('-');
    }
    if let Some(n) = tc.offset {
        let _ = write!(s, "{n}");
    }
    s
}

fn class_id(c: &str) -> String {
    quote(&format!("class:{c}"))
}

fn rel_id(r: &str) -> String {
    quote(&format!("rel:{r}"))
}

/// Nodes and edges a schema's diagram has: classes, relationships and one
/// node per disjointness or covering statement; role links, isa links,
/// links of constraint nodes and transitions other than frozen attributes.
pub fn element_counts(schema: &Schema) -> (usize, usize) {
    let groups = schema.disj_c().len() + schema.disj_r().len() + schema.cover().len();
    let nodes = schema.classes().len() + schema.relationships().len() + groups;
    let roles: usize = schema.relationships().values().map(|r| r.arity()).sum();
    let group_edges: usize =
        schema.disj_c().iter().chain(schema.disj_r()).chain(schema.cover()).map(|(ms, _)| ms.len() + 1).sum();
    let transitions = schema.transitions().iter().filter(|t| t.kind != TransitionKind::Frozen).count();
    let edges = roles
        + schema.isa_c().len()
        + schema.isa_r().len()
        + schema.isa_u().len()
        + group_edges
        + transitions;
    (nodes, edges)
}

pub fn to_dot(schema: &Schema, opts: &RenderOptions) -> String {
    let m = if opts.ascii { &ASCII } else { &UNICODE };
    let mut out = String::from("digraph trend {\n");
    out.push_str("  graph [rankdir=\"BT\"];\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\"];\n");

    for c in schema.classes().values() {
        let mut label = format!("{}\\n", marked(&c.name, c.temporality, m));
        for a in c.attributes.values() {
            let q = format!("{}.{}", c.name, a.name);
            let mut line = marked(&format!("{}: {}", a.name, a.domain), a.temporality, m);
            if schema.is_frozen(&q) {
                let _ = write!(line, " {}", m.frozen);
            }
            if a.identifier {
                line.push_str(" [id]");
            }
            if let Some(card) = &a.card {
                let _ = write!(line, " {card}");
            }
            let _ = write!(label, "{line}\\l");
        }
        let _ = writeln!(out, "  {} [shape=box, label=\"{}\"];", class_id(&c.name), escape_label(&label));
    }
    for r in schema.relationships().values() {
        let _ = writeln!(
            out,
            "  {} [shape=diamond, label={}];",
            rel_id(&r.name),
            quote(&marked(&r.name, r.temporality, m))
        );
    }
    let groups = [
        ("disjoint", "d", schema.disj_c(), false),
        ("disjointr", "d", schema.disj_r(), true),
        ("cover", "c", schema.cover(), false),
    ];
    for (kind, mark, set, rels) in groups {
        for (i, (members, sup)) in set.iter().enumerate() {
            let id = quote(&format!("{kind}:{i}"));
            let node = |n: &str| if rels { rel_id(n) } else { class_id(n) };
            let _ = writeln!(out, "  {id} [shape=circle, label={}];", quote(mark));
            for mem in members {
                let _ = writeln!(out, "  {} -> {id} [arrowhead=none];", node(mem));
            }
            let _ = writeln!(out, "  {id} -> {} [arrowhead=onormal];", node(sup));
        }
    }

    for r in schema.relationships().values() {
        for u in &r.roles {
            let label = match &u.card {
                Some(card) => format!("{} {card}", u.name),
                None => u.name.clone(),
            };
            let _ = writeln!(
                out,
                "  {} -> {} [arrowhead=none, label={}];",
                rel_id(&r.name),
                class_id(&u.player),
                quote(&label)
            );
        }
    }
    for (a, b) in schema.isa_c() {
        let _ = writeln!(out, "  {} -> {} [arrowhead=onormal];", class_id(a), class_id(b));
    }
    for (a, b) in schema.isa_r() {
        let _ = writeln!(out, "  {} -> {} [arrowhead=onormal];", rel_id(a), rel_id(b));
    }
    for (a, b) in schema.isa_u() {
        let _ = writeln!(
            out,
            "  {} -> {} [arrowhead=onormal, style=dotted, label={}];",
            rel_id(&a.relationship),
            rel_id(&b.relationship),
            quote(&format!("{} isa {}", a, b))
        );
    }
    for tc in schema.transitions() {
        if tc.kind == TransitionKind::Frozen {
            continue;
        }
        let style = if tc.modality == Modality::Mandatory { "solid" } else { "dashed" };
        let label = edge_label(tc, opts.labels);
        let (from, to, label) = match tc.subject {
            Subject::Class => (class_id(&tc.source), class_id(tc.target_name()), label),
            Subject::Relationship => (rel_id(&tc.source), rel_id(tc.target_name()), label),
            Subject::Attribute => {
                let owner = crate::model::split_attr(&tc.source).map_or("", |(c, _)| c);
                let target = crate::model::split_attr(tc.target_name()).map_or("", |(c, _)| c);
                let short =
                    |q: &str| crate::model::split_attr(q).map_or(q.to_string(), |(_, a)| a.to_string());
                (
                    class_id(owner),
                    class_id(target),
                    format!("{label} {} -> {}", short(&tc.source), short(tc.target_name())),
                )
            }
        };
        let _ = writeln!(out, "  {from} -> {to} [style={style}, label={}];", quote(&label));
    }
    out.push_str("}\n");
    out
}

/// Escapes quotes only: the label already carries DOT line escapes.
fn escape_label(s: &str) -> String {
    s.replace('"', "\\\"")
}
