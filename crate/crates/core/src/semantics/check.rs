use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::model::{Modality, Schema, Subject, TransitionConstraint};

use super::ground::{
    ground_schema, mandatory_obligation, transition_condition, Atom, Inst, Instance, Origin,
    SemanticsOptions, Universe,
};
use super::state::{StateError, TemporalState};

/// One violated legality condition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub rule: String,
    pub elements: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    pub message: String,
}

impl From<Origin> for Violation {
    fn from(o: Origin) -> Self {
        Violation {
            rule: o.rule,
            elements: o.elements,
            time: o.time,
            instance: o.instance,
            message: o.detail,
        }
    }
}

impl Violation {
    pub fn to_diagnostic(&self) -> Diagnostic {
        let mut d =
            Diagnostic::error(self.rule.clone(), self.message.clone()).with_elements(self.elements.clone());
        d.time = self.time;
        d.instance = self.instance.as_ref().map(ToString::to_string);
        d
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)?;
        if let Some(t) = self.time {
            write!(f, " (t={t})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("instance {0} does not match the constraint's subject kind")]
    KindMismatch(String),
    #[error("constraint {0} is not mandatory")]
    NotMandatory(String),
    #[error("constraint {0} is not declared in the schema")]
    UnknownConstraint(String),
    #[error("unknown instance {0}")]
    UnknownInstance(String),
    #[error("time point {0} is outside the state's window")]
    TimeOutOfRange(u32),
}

/// The universe spanned by a state's objects and domain values.
pub fn state_universe(schema: &Schema, state: &TemporalState) -> Universe {
    let domains: BTreeMap<String, Vec<String>> =
        state.domains.iter().map(|(d, vs)| (d.clone(), vs.iter().cloned().collect())).collect();
    Universe::new(schema, state.horizon, state.objects.iter().cloned().collect(), &domains)
}

/// Truth assignment of the universe's atoms induced by the state.
pub fn state_assignment(u: &Universe, schema: &Schema, state: &TemporalState) -> Vec<bool> {
    let mut val = vec![false; u.atom_count()];
    for (c, tl) in &state.classes {
        let Some(class) = u.class_id(c) else { continue };
        for (&t, objs) in tl {
            for o in objs {
                if let Some(obj) = u.object_id(o) {
                    if let Some(id) = u.atom_id(&Atom::Class { class, obj, t }) {
                        val[id] = true;
                    }
                }
            }
        }
    }
    for (r, tl) in &state.relationships {
        let (Some(rel), Some(decl)) = (u.rel_id(r), schema.relationship(r)) else { continue };
        for (&t, tuples) in tl {
            for tuple in tuples {
                let args: Option<Vec<usize>> =
                    decl.roles.iter().map(|u2| tuple.get(&u2.name).and_then(|o| u.object_id(o))).collect();
                if let Some(args) = args {
                    if let Some(id) = u.atom_id(&Atom::Rel { rel, args, t }) {
                        val[id] = true;
                    }
                }
            }
        }
    }
    for (a, tl) in &state.attributes {
        let (Some(attr), Some((_, decl))) = (u.attr_id(a), schema.attribute(a)) else { continue };
        for (&t, pairs) in tl {
            for (o, v) in pairs {
                if let (Some(obj), Some(val_id)) = (u.object_id(o), u.value_id(&decl.domain, v)) {
                    if let Some(id) = u.atom_id(&Atom::Attr { attr, obj, val: val_id, t }) {
                        val[id] = true;
                    }
                }
            }
        }
    }
    val
}

/// Violations of every legality condition under the default semantics.
pub fn check_state(schema: &Schema, state: &TemporalState) -> Result<Vec<Violation>, StateError> {
    check_state_with(schema, state, &SemanticsOptions::default())
}

/// Violations of every legality condition; empty iff the state is legal.
pub fn check_state_with(
    schema: &Schema,
    state: &TemporalState,
    opts: &SemanticsOptions,
) -> Result<Vec<Violation>, StateError> {
    state.validate(schema)?;
    let u = state_universe(schema, state);
    let val = state_assignment(&u, schema, state);
    let mut out: Vec<Violation> = ground_schema(schema, &u, opts)
        .into_iter()
        .filter(|g| !g.formula.eval(&|a| val[a]))
        .map(|g| g.origin.into())
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn resolve(
    u: &Universe,
    schema: &Schema,
    tc: &TransitionConstraint,
    inst: &Instance,
) -> Result<Inst, SemanticsError> {
    let unknown = || SemanticsError::UnknownInstance(inst.to_string());
    match (tc.subject, inst) {
        (Subject::Class, Instance::Object(o)) => u.object_id(o).map(Inst::Obj).ok_or_else(unknown),
        (Subject::Relationship, Instance::Tuple(items)) => {
            let decl = schema.relationship(&tc.source).ok_or_else(unknown)?;
            let map: BTreeMap<&str, &str> = items.iter().map(|(r, o)| (r.as_str(), o.as_str())).collect();
            if map.len() != decl.arity() {
                return Err(SemanticsError::KindMismatch(inst.to_string()));
            }
            decl.roles
                .iter()
                .map(|r| {
                    map.get(r.name.as_str())
                        .ok_or_else(|| SemanticsError::KindMismatch(inst.to_string()))
                        .and_then(|o| u.object_id(o).ok_or_else(unknown))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Inst::Tuple)
        }
        (Subject::Attribute, Instance::Pair(o, v)) => {
            let obj = u.object_id(o).ok_or_else(unknown)?;
            let val = tc
                .endpoints()
                .into_iter()
                .filter_map(|a| schema.attribute(a))
                .find_map(|(_, d)| u.value_id(&d.domain, v))
                .ok_or_else(unknown)?;
            Ok(Inst::Pair(obj, val))
        }
        _ => Err(SemanticsError::KindMismatch(inst.to_string())),
    }
}

fn prepare(
    schema: &Schema,
    state: &TemporalState,
    tc: &TransitionConstraint,
    t: u32,
) -> Result<(Universe, Vec<bool>), SemanticsError> {
    if !schema.transitions().contains(tc) {
        return Err(SemanticsError::UnknownConstraint(tc.to_string()));
    }
    state.validate(schema)?;
    if t >= state.horizon {
        return Err(SemanticsError::TimeOutOfRange(t));
    }
    let u = state_universe(schema, state);
    let val = state_assignment(&u, schema, state);
    Ok((u, val))
}

/// Whether the condition named by `tc` holds for `instance` at `t`.
pub fn transition_holds(
    schema: &Schema,
    state: &TemporalState,
    tc: &TransitionConstraint,
    instance: &Instance,
    t: u32,
    opts: &SemanticsOptions,
) -> Result<bool, SemanticsError> {
    let (u, val) = prepare(schema, state, tc, t)?;
    let inst = resolve(&u, schema, tc, instance)?;
    Ok(transition_condition(&u, tc, &inst, i64::from(t), opts).eval(&|a| val[a]))
}

/// Whether the obligation of a mandatory constraint is met for `instance`
/// triggered at `t` (true when not triggered).
pub fn mandatory_obligation_met(
    schema: &Schema,
    state: &TemporalState,
    tc: &TransitionConstraint,
    instance: &Instance,
    t: u32,
    opts: &SemanticsOptions,
) -> Result<bool, SemanticsError> {
    if tc.modality != Modality::Mandatory {
        return Err(SemanticsError::NotMandatory(tc.to_string()));
    }
    let (u, val) = prepare(schema, state, tc, t)?;
    let inst = resolve(&u, schema, tc, instance)?;
    Ok(mandatory_obligation(&u, tc, &inst, i64::from(t), opts).eval(&|a| val[a]))
}
