//! Bounded model finding: element satisfiability, subsumption and
//! constraint implication over finite universes.

mod search;

pub use search::{solve, Search};

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::model::{build_schema, Declaration, Schema, Subject};
use crate::semantics::ground::{
    and, declaration_constraints, ground, ground_schema, not, Atom, Formula, Grounded, Inst, Origin, Universe,
};
use crate::semantics::{check_state_with, SemanticsOptions, TemporalState, Violation};

/// Size limits of the searched universes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_objects: usize,
    pub max_horizon: u32,
    pub max_values: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_objects: 2, max_horizon: 3, max_values: 2 }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plural = |n: usize, w: &str| format!("{n} {w}{}", if n == 1 { "" } else { "s" });
        write!(
            f,
            "{}, {}",
            plural(self.max_objects, "object"),
            plural(self.max_horizon as usize, "time point")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonError {
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("{sub} and {sup} are not elements of the same kind")]
    KindMismatch { sub: String, sup: String },
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("witness failed verification: {0}")]
    Unverified(String),
}

/// Answer of a bounded query.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// A legal state demonstrating the property (a satisfying state, or a
    /// counterexample to a subsumption or implication).
    Witness(TemporalState),
    /// No such state exists within the bounds.
    ExhaustedBounds { bounds: Bounds, universes: usize, decisions: u64 },
}

impl Verdict {
    pub fn witness(&self) -> Option<&TemporalState> {
        match self {
            Verdict::Witness(s) => Some(s),
            Verdict::ExhaustedBounds { .. } => None,
        }
    }
}

/// A query result, named for its query kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    /// `"satisfiable"`, `"unsatisfiable"`, `"holds"` or `"refuted"`.
    pub label: &'static str,
    /// Whether the queried property holds within the bounds.
    pub holds: bool,
    pub verdict: Verdict,
    /// For refuted implications: the violated condition in the witness.
    pub violations: Vec<Violation>,
}

impl Answer {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "verdict": self.label });
        match &self.verdict {
            Verdict::Witness(s) => {
                v["state"] = s.to_value();
                if !self.violations.is_empty() {
                    v["violations"] = serde_json::to_value(&self.violations).expect("violations serialize");
                }
            }
            Verdict::ExhaustedBounds { bounds, universes, decisions } => {
                v["bounds"] = serde_json::to_value(bounds).expect("bounds serialize");
                v["universes"] = json!(universes);
                v["decisions"] = json!(decisions);
            }
        }
        v
    }
}

fn kind_of(schema: &Schema, element: &str) -> Option<Subject> {
    if schema.class(element).is_some() {
        Some(Subject::Class)
    } else if schema.relationship(element).is_some() {
        Some(Subject::Relationship)
    } else if schema.attribute(element).is_some() {
        Some(Subject::Attribute)
    } else {
        None
    }
}

fn universe(schema: &Schema, objects: usize, horizon: u32, values: usize) -> Universe {
    let domains: BTreeMap<String, Vec<String>> =
        schema.domains().into_iter().map(|d| (d, (1..=values).map(|i| format!("v{i}")).collect())).collect();
    Universe::new(schema, horizon, (1..=objects).map(|i| format!("o{i}")).collect(), &domains)
}

/// The state described by a total assignment of the universe's atoms.
pub fn assignment_state(u: &Universe, val: &[bool]) -> TemporalState {
    let mut st = TemporalState::new(u.horizon);
    for o in &u.objects {
        st.add_object(o.clone());
    }
    for (d, v) in &u.values {
        st.add_value(d.clone(), v.clone());
    }
    for (id, &on) in val.iter().enumerate() {
        if !on {
            continue;
        }
        match u.atom(id) {
            Atom::Class { class, obj, t } => {
                st.put_class(&u.classes[*class], *t, &u.objects[*obj]);
            }
            Atom::Rel { rel, args, t } => {
                let (name, roles) = &u.rels[*rel];
                let tuple: Vec<(&str, &str)> =
                    roles.iter().zip(args).map(|(r, &o)| (r.as_str(), u.objects[o].as_str())).collect();
                st.put_rel(name, *t, &tuple);
            }
            Atom::Attr { attr, obj, val, t } => {
                st.put_attr(&u.attrs[*attr].0, *t, &u.objects[*obj], &u.values[*val].1);
            }
        }
    }
    st.normalize();
    st
}

/// A goal over one universe: extra formulas (the seeds of the search)
/// that the witness must satisfy, tried one alternative at a time.
type Goals = Vec<(Vec<Formula>, Option<Origin>)>;

struct Run<'a> {
    schema: &'a Schema,
    bounds: Bounds,
    opts: SemanticsOptions,
}

impl Run<'_> {
    /// Searches universes of growing size for a legal state meeting one of
    /// the goals produced by `goals`.
    fn find(&self, goals: impl Fn(&Universe) -> Goals) -> Result<(Verdict, Option<Origin>), ReasonError> {
        let mut universes = 0;
        let mut decisions = 0;
        let values = if self.schema.domains().is_empty() { 0 } else { self.bounds.max_values };
        for horizon in 1..=self.bounds.max_horizon {
            for objects in 1..=self.bounds.max_objects {
                universes += 1;
                let u = universe(self.schema, objects, horizon, values);
                let base: Vec<Formula> =
                    ground_schema(self.schema, &u, &self.opts).into_iter().map(|g| g.formula).collect();
                for (extra, origin) in goals(&u) {
                    let mut seeds = Vec::new();
                    for f in &extra {
                        f.atoms(&mut seeds);
                    }
                    let mut fs = base.clone();
                    fs.extend(extra);
                    match solve(u.atom_count(), &fs, &seeds) {
                        Search::Model(m) => {
                            let st = assignment_state(&u, &m);
                            let v = check_state_with(self.schema, &st, &self.opts)
                                .map_err(|e| ReasonError::Unverified(e.to_string()))?;
                            if let Some(first) = v.first() {
                                return Err(ReasonError::Unverified(first.to_string()));
                            }
                            return Ok((Verdict::Witness(st), origin));
                        }
                        Search::Exhausted { decisions: d } => decisions += d,
                    }
                }
            }
        }
        Ok((Verdict::ExhaustedBounds { bounds: self.bounds, universes, decisions }, None))
    }
}

/// Instances to try as seeds; objects are interchangeable, so a single
/// object stands for all of them.
fn seed_instances(u: &Universe, subject: Subject, names: &[&str]) -> Vec<Inst> {
    let all = u.instances(subject, names);
    match subject {
        Subject::Class => all.into_iter().take(1).collect(),
        Subject::Attribute => all.into_iter().filter(|i| matches!(i, Inst::Pair(0, _))).collect(),
        Subject::Relationship => all,
    }
}

/// Whether `element` can be populated in some legal state.
pub fn satisfiable(
    schema: &Schema,
    element: &str,
    bounds: Bounds,
    opts: &SemanticsOptions,
) -> Result<Answer, ReasonError> {
    let subject = kind_of(schema, element).ok_or_else(|| ReasonError::UnknownElement(element.into()))?;
    let run = Run { schema, bounds, opts: *opts };
    let (verdict, _) = run.find(|u| {
        let mut goals = Vec::new();
        for t in 0..i64::from(u.horizon) {
            for inst in seed_instances(u, subject, &[element]) {
                goals.push((vec![u.member(subject, element, &inst, t)], None));
            }
        }
        goals
    })?;
    let holds = verdict.witness().is_some();
    Ok(Answer {
        label: if holds { "satisfiable" } else { "unsatisfiable" },
        holds,
        verdict,
        violations: Vec::new(),
    })
}

/// Whether every instance of `sub` is an instance of `sup` in every legal
/// state; a witness is a counterexample.
pub fn subsumes(
    schema: &Schema,
    sub: &str,
    sup: &str,
    bounds: Bounds,
    opts: &SemanticsOptions,
) -> Result<Answer, ReasonError> {
    let ks = kind_of(schema, sub).ok_or_else(|| ReasonError::UnknownElement(sub.into()))?;
    let kp = kind_of(schema, sup).ok_or_else(|| ReasonError::UnknownElement(sup.into()))?;
    let mismatch = || ReasonError::KindMismatch { sub: sub.into(), sup: sup.into() };
    if ks != kp {
        return Err(mismatch());
    }
    match ks {
        Subject::Relationship => {
            let (a, b) = (schema.relationship(sub).unwrap(), schema.relationship(sup).unwrap());
            if !a.compatible_with(b) {
                return Err(mismatch());
            }
        }
        Subject::Attribute => {
            let (a, b) = (schema.attribute(sub).unwrap().1, schema.attribute(sup).unwrap().1);
            if a.domain != b.domain {
                return Err(mismatch());
            }
        }
        Subject::Class => {}
    }
    let run = Run { schema, bounds, opts: *opts };
    let (verdict, _) = run.find(|u| {
        let mut goals = Vec::new();
        for t in 0..i64::from(u.horizon) {
            for inst in seed_instances(u, ks, &[sub, sup]) {
                let f = and([u.member(ks, sub, &inst, t), not(u.member(ks, sup, &inst, t))]);
                goals.push((vec![f], None));
            }
        }
        goals
    })?;
    let holds = verdict.witness().is_none();
    Ok(Answer { label: if holds { "holds" } else { "refuted" }, holds, verdict, violations: Vec::new() })
}

/// Checks that a constraint only mentions declared elements and fits them.
pub fn validate_candidate(schema: &Schema, decl: &Declaration) -> Result<(), ReasonError> {
    match decl {
        Declaration::Class { name, .. } if schema.class(name).is_none() => {
            Err(ReasonError::UnknownElement(name.clone()))
        }
        Declaration::Relationship { name, roles, .. } => {
            let r = schema.relationship(name).ok_or_else(|| ReasonError::UnknownElement(name.clone()))?;
            for u in roles {
                if r.roles.iter().all(|x| x.name != u.name || x.player != u.player) {
                    return Err(ReasonError::InvalidConstraint(format!(
                        "{name} has no role {} played by {}",
                        u.name, u.player
                    )));
                }
            }
            Ok(())
        }
        Declaration::Class { name, attributes, .. } => {
            for a in attributes {
                let q = format!("{name}.{}", a.name);
                match schema.attribute(&q) {
                    Some((_, d)) if d.domain == a.domain => {}
                    _ => return Err(ReasonError::UnknownElement(q)),
                }
            }
            Ok(())
        }
        Declaration::Chronon(_) => {
            Err(ReasonError::InvalidConstraint("a chronon is not a constraint".into()))
        }
        other => {
            let mut all = schema.declarations();
            all.push(other.clone());
            build_schema(&all).map(|_| ()).map_err(|errs| {
                ReasonError::InvalidConstraint(
                    errs.iter().map(|e| e.error.to_string()).collect::<Vec<_>>().join("; "),
                )
            })
        }
    }
}

/// Whether every legal state satisfies `decl`; a witness is a legal state
/// violating it.
pub fn implies(
    schema: &Schema,
    decl: &Declaration,
    bounds: Bounds,
    opts: &SemanticsOptions,
) -> Result<Answer, ReasonError> {
    validate_candidate(schema, decl)?;
    let constraints = declaration_constraints(decl, schema);
    let run = Run { schema, bounds, opts: *opts };
    let (verdict, origin) = run.find(|u| {
        let mut grounded: Vec<Grounded> = Vec::new();
        for c in &constraints {
            ground(c, u, schema, opts, &mut grounded);
        }
        grounded
            .into_iter()
            .filter(|g| g.formula != Formula::Const(true))
            .map(|g| (vec![not(g.formula)], Some(g.origin)))
            .collect()
    })?;
    let holds = verdict.witness().is_none();
    Ok(Answer {
        label: if holds { "holds" } else { "refuted" },
        holds,
        verdict,
        violations: origin.map(Violation::from).into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_schema, parse_statement};

    fn opts() -> SemanticsOptions {
        SemanticsOptions::default()
    }

    #[test]
    fn disjoint_covered_subclass_is_unsatisfiable() {
        let s = parse_schema(
            "class C; class C1; class C2; isa C1 C; isa C2 C; isa C1 C2;\
             disjoint {C1, C2} C; cover {C1, C2} C;",
        )
        .unwrap();
        let a = satisfiable(&s, "C1", Bounds::default(), &opts()).unwrap();
        assert_eq!(a.label, "unsatisfiable");
        assert!(satisfiable(&s, "C2", Bounds::default(), &opts()).unwrap().holds);
    }

    #[test]
    fn witnesses_are_legal_and_populated() {
        let s = parse_schema("class A temporal; class B; MCHG A -> B;").unwrap();
        let a = satisfiable(&s, "A", Bounds::default(), &opts()).unwrap();
        let st = a.verdict.witness().unwrap();
        assert!(crate::semantics::check_state(&s, st).unwrap().is_empty());
        assert!(st.classes.contains_key("A"));
    }

    #[test]
    fn subsumption_and_implication() {
        let s = parse_schema("class A; class B; class C; isa A B; isa B C;").unwrap();
        assert!(subsumes(&s, "A", "C", Bounds::default(), &opts()).unwrap().holds);
        let r = subsumes(&s, "C", "A", Bounds::default(), &opts()).unwrap();
        assert_eq!(r.label, "refuted");
        let d = parse_statement("isa A C").unwrap();
        assert!(implies(&s, &d, Bounds::default(), &opts()).unwrap().holds);
        let d = parse_statement("isa C A").unwrap();
        let r = implies(&s, &d, Bounds::default(), &opts()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violations[0].rule, "isa_C");
    }

    #[test]
    fn unknown_names() {
        let s = parse_schema("class A;").unwrap();
        assert!(matches!(
            satisfiable(&s, "Z", Bounds::default(), &opts()),
            Err(ReasonError::UnknownElement(_))
        ));
        let d = parse_statement("isa A Z").unwrap();
        assert!(matches!(
            implies(&s, &d, Bounds::default(), &opts()),
            Err(ReasonError::InvalidConstraint(_))
        ));
    }

    #[test]
    fn bounds_message() {
        assert_eq!(Bounds::default().to_string(), "2 objects, 3 time points");
    }
}
