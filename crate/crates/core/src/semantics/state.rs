use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Schema;

/// A tuple of a relationship, keyed by role name.
pub type Tuple = BTreeMap<String, String>;

/// Per-time-point extensions; absent time points mean the empty set.
pub type Timeline<T> = BTreeMap<u32, BTreeSet<T>>;

/// A finite temporal database state over time points `0..horizon`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalState {
    pub horizon: u32,
    #[serde(default)]
    pub objects: BTreeSet<String>,
    #[serde(default)]
    pub domains: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub classes: BTreeMap<String, Timeline<String>>,
    #[serde(default)]
    pub relationships: BTreeMap<String, Timeline<Tuple>>,
    #[serde(default)]
    pub attributes: BTreeMap<String, Timeline<(String, String)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("ill-formed state: {0}")]
    IllFormedState(String),
    #[error("invalid state document: {0}")]
    Json(String),
}

fn ill<T>(msg: String) -> Result<T, StateError> {
    Err(StateError::IllFormedState(msg))
}

impl TemporalState {
    pub fn new(horizon: u32) -> Self {
        TemporalState { horizon, ..Default::default() }
    }

    pub fn from_json(text: &str) -> Result<Self, StateError> {
        let mut s: TemporalState = serde_json::from_str(text).map_err(|e| StateError::Json(e.to_string()))?;
        s.normalize();
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serializes")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("state serializes")
    }

    /// Drops empty extensions so that equal states compare equal.
    pub fn normalize(&mut self) {
        fn prune<T: Ord>(m: &mut BTreeMap<String, Timeline<T>>) {
            for tl in m.values_mut() {
                tl.retain(|_, s| !s.is_empty());
            }
            m.retain(|_, tl| !tl.is_empty());
        }
        prune(&mut self.classes);
        prune(&mut self.relationships);
        prune(&mut self.attributes);
    }

    pub fn add_object(&mut self, o: impl Into<String>) -> &mut Self {
        self.objects.insert(o.into());
        self
    }

    pub fn add_value(&mut self, domain: impl Into<String>, v: impl Into<String>) -> &mut Self {
        self.domains.entry(domain.into()).or_default().insert(v.into());
        self
    }

    /// Puts `o` into class `c` at `t`, registering the object.
    pub fn put_class(&mut self, c: &str, t: u32, o: &str) -> &mut Self {
        self.objects.insert(o.to_string());
        self.classes.entry(c.to_string()).or_default().entry(t).or_default().insert(o.to_string());
        self
    }

    pub fn put_rel(&mut self, r: &str, t: u32, tuple: &[(&str, &str)]) -> &mut Self {
        let tuple: Tuple = tuple.iter().map(|(u, o)| (u.to_string(), o.to_string())).collect();
        for o in tuple.values() {
            self.objects.insert(o.clone());
        }
        self.relationships.entry(r.to_string()).or_default().entry(t).or_default().insert(tuple);
        self
    }

    pub fn put_attr(&mut self, a: &str, t: u32, o: &str, v: &str) -> &mut Self {
        self.objects.insert(o.to_string());
        self.attributes
            .entry(a.to_string())
            .or_default()
            .entry(t)
            .or_default()
            .insert((o.to_string(), v.to_string()));
        self
    }

    pub fn in_class(&self, c: &str, t: u32, o: &str) -> bool {
        self.classes.get(c).and_then(|tl| tl.get(&t)).is_some_and(|s| s.contains(o))
    }

    pub fn in_rel(&self, r: &str, t: u32, tuple: &Tuple) -> bool {
        self.relationships.get(r).and_then(|tl| tl.get(&t)).is_some_and(|s| s.contains(tuple))
    }

    pub fn has_attr(&self, a: &str, t: u32, o: &str, v: &str) -> bool {
        self.attributes
            .get(a)
            .and_then(|tl| tl.get(&t))
            .is_some_and(|s| s.contains(&(o.to_string(), v.to_string())))
    }

    pub fn class_at(&self, c: &str, t: u32) -> BTreeSet<String> {
        self.classes.get(c).and_then(|tl| tl.get(&t)).cloned().unwrap_or_default()
    }

    pub fn rel_at(&self, r: &str, t: u32) -> BTreeSet<Tuple> {
        self.relationships.get(r).and_then(|tl| tl.get(&t)).cloned().unwrap_or_default()
    }

    pub fn attr_at(&self, a: &str, t: u32) -> BTreeSet<(String, String)> {
        self.attributes.get(a).and_then(|tl| tl.get(&t)).cloned().unwrap_or_default()
    }

    /// Checks the state against the schema's signature: declared names,
    /// time points inside the window, exact role sets, known objects,
    /// values from the attribute's domain and disjoint object/value namespaces.
    pub fn validate(&self, schema: &Schema) -> Result<(), StateError> {
        if self.horizon == 0 {
            return ill("horizon must be at least 1".into());
        }
        let h = self.horizon;
        let check_time = |what: &str, t: u32| {
            if t >= h {
                ill(format!("time point {t} of '{what}' is outside 0..{}", h - 1))
            } else {
                Ok(())
            }
        };
        let check_obj = |what: &str, o: &str| {
            if self.objects.contains(o) {
                Ok(())
            } else {
                ill(format!("'{what}' mentions undeclared object '{o}'"))
            }
        };
        for (d, vals) in &self.domains {
            if let Some(v) = vals.iter().find(|v| self.objects.contains(*v)) {
                return ill(format!("'{v}' is both an object and a value of domain '{d}'"));
            }
        }
        for (c, tl) in &self.classes {
            if schema.class(c).is_none() {
                return ill(format!("unknown class '{c}'"));
            }
            for (t, objs) in tl {
                check_time(c, *t)?;
                for o in objs {
                    check_obj(c, o)?;
                }
            }
        }
        for (r, tl) in &self.relationships {
            let decl = match schema.relationship(r) {
                Some(d) => d,
                None => return ill(format!("unknown relationship '{r}'")),
            };
            let roles: BTreeSet<&str> = decl.role_names().collect();
            for (t, tuples) in tl {
                check_time(r, *t)?;
                for tuple in tuples {
                    let got: BTreeSet<&str> = tuple.keys().map(String::as_str).collect();
                    if got != roles {
                        return ill(format!(
                            "tuple of '{r}' at t={t} has roles {{{}}}, expected {{{}}}",
                            got.into_iter().collect::<Vec<_>>().join(", "),
                            roles.iter().copied().collect::<Vec<_>>().join(", ")
                        ));
                    }
                    for o in tuple.values() {
                        check_obj(r, o)?;
                    }
                }
            }
        }
        for (a, tl) in &self.attributes {
            let (_, decl) = match schema.attribute(a) {
                Some(x) => x,
                None => return ill(format!("unknown attribute '{a}'")),
            };
            let values = self.domains.get(&decl.domain);
            for (t, pairs) in tl {
                check_time(a, *t)?;
                for (o, v) in pairs {
                    check_obj(a, o)?;
                    if !values.is_some_and(|vs| vs.contains(v)) {
                        return ill(format!("value '{v}' of '{a}' is not in domain '{}'", decl.domain));
                    }
                }
            }
        }
        Ok(())
    }
}
