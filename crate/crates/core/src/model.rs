//! Abstract syntax of TREND conceptual data models.
//!
//! A [`Schema`] is only obtainable through [`build_schema`], which checks
//! name uniqueness, reference integrity and the shape restrictions on
//! relationships and transition constraints. Once built, a schema is
//! immutable and every collection in it is ordered, so structural equality
//! is insensitive to declaration order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Temporal marking of a class, relationship or attribute.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Temporality {
    /// Instances belong to the element at every time point.
    Snapshot,
    /// Unmarked; no temporal restriction.
    #[default]
    Mixed,
    /// Every instance is absent from the element at some other time point.
    Temporary,
}

/// A `[min, max]` cardinality; `max == None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Card {
    pub min: u32,
    pub max: Option<u32>,
}

impl Card {
    pub fn new(min: u32, max: Option<u32>) -> Self {
        Card { min, max }
    }

    pub fn admits(&self, count: usize) -> bool {
        let count = count as u64;
        count >= u64::from(self.min) && self.max.is_none_or(|m| count <= u64::from(m))
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(max) => write!(f, "[{},{}]", self.min, max),
            None => write!(f, "[{},*]", self.min),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrDecl {
    pub name: String,
    pub domain: String,
    pub temporality: Temporality,
    pub identifier: bool,
    pub card: Option<Card>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    pub name: String,
    pub temporality: Temporality,
    pub attributes: BTreeMap<String, AttrDecl>,
}

impl ClassDecl {
    pub fn identifier(&self) -> Option<&AttrDecl> {
        self.attributes.values().find(|a| a.identifier)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleDecl {
    pub name: String,
    pub player: String,
    pub card: Option<Card>,
}

/// A relationship; role order is significant (it fixes tuple positions).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelDecl {
    pub name: String,
    pub temporality: Temporality,
    pub roles: Vec<RoleDecl>,
}

impl RelDecl {
    pub fn arity(&self) -> usize {
        self.roles.len()
    }

    pub fn role_index(&self, role: &str) -> Option<usize> {
        self.roles.iter().position(|r| r.name == role)
    }

    pub fn role_names(&self) -> impl Iterator<Item = &str> {
        self.roles.iter().map(|r| r.name.as_str())
    }

    /// Two relationships are compatible when they have the same role names
    /// in the same order, so that their tuples live in one space.
    pub fn compatible_with(&self, other: &RelDecl) -> bool {
        self.roles.len() == other.roles.len()
            && self.roles.iter().zip(&other.roles).all(|(a, b)| a.name == b.name)
    }
}

/// A role of a named relationship, written `Rel.role` in the text syntax.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleRef {
    pub relationship: String,
    pub role: String,
}

impl RoleRef {
    pub fn new(relationship: impl Into<String>, role: impl Into<String>) -> Self {
        RoleRef { relationship: relationship.into(), role: role.into() }
    }
}

impl fmt::Display for RoleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.relationship, self.role)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    Class,
    Relationship,
    Attribute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    /// Dynamic extension: the instance also becomes a target instance.
    Extension,
    /// Dynamic evolution: the instance moves to the target, leaving the source.
    Change,
    /// Attribute values never disappear once set.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Future,
    Past,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Optional,
    Mandatory,
}

/// One element of the transition-constraint set.
///
/// Attribute endpoints are qualified `Class.attr` names. `target` is `None`
/// only for [`TransitionKind::Frozen`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionConstraint {
    pub subject: Subject,
    pub kind: TransitionKind,
    pub tense: Tense,
    pub modality: Modality,
    pub offset: Option<u32>,
    pub persistent: bool,
    pub source: String,
    pub target: Option<String>,
}

impl TransitionConstraint {
    pub fn new(
        subject: Subject,
        kind: TransitionKind,
        tense: Tense,
        modality: Modality,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        TransitionConstraint {
            subject,
            kind,
            tense,
            modality,
            offset: None,
            persistent: false,
            source: source.into(),
            target: Some(target.into()),
        }
    }

    pub fn frozen(attribute: impl Into<String>) -> Self {
        TransitionConstraint {
            subject: Subject::Attribute,
            kind: TransitionKind::Frozen,
            tense: Tense::Future,
            modality: Modality::Optional,
            offset: None,
            persistent: false,
            source: attribute.into(),
            target: None,
        }
    }

    pub fn with_offset(mut self, n: u32) -> Self {
        self.offset = Some(n);
        self
    }

    pub fn persistent(mut self) -> Self {
        self.persistent = true;
        self
    }

    /// Chronons between the two ends of the transition (1 when unquantified).
    pub fn step(&self) -> u32 {
        self.offset.unwrap_or(1)
    }

    pub fn target_name(&self) -> &str {
        self.target.as_deref().unwrap_or(&self.source)
    }

    /// Rule label in the constraint catalogue, e.g. `MCHG`, `mext`, `QEXTR`,
    /// `PCHG`, `FRZ`. Past-tense labels are lowercase.
    pub fn label(&self) -> String {
        if self.kind == TransitionKind::Frozen {
            return "FRZ".to_string();
        }
        let mut s = String::new();
        if self.persistent {
            s.push('P');
        }
        if self.modality == Modality::Mandatory {
            s.push('M');
        }
        if self.offset.is_some() {
            s.push('Q');
        }
        s.push_str(match self.kind {
            TransitionKind::Extension => "EXT",
            TransitionKind::Change => "CHG",
            TransitionKind::Frozen => unreachable!(),
        });
        match self.subject {
            Subject::Relationship => s.push('R'),
            Subject::Attribute => s.push('A'),
            Subject::Class => {}
        }
        if self.tense == Tense::Past {
            s = s.to_lowercase();
        }
        s
    }

    pub fn endpoints(&self) -> Vec<&str> {
        let mut v = vec![self.source.as_str()];
        if let Some(t) = &self.target {
            v.push(t);
        }
        v
    }
}

impl fmt::Display for TransitionConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.target {
            Some(t) => write!(f, "{} {} -> {}", self.label(), self.source, t)?,
            None => write!(f, "{} {}", self.label(), self.source)?,
        }
        if let Some(n) = self.offset {
            write!(f, " after {n}")?;
        }
        Ok(())
    }
}

/// Splits a qualified attribute name `Class.attr`.
pub fn split_attr(qualified: &str) -> Option<(&str, &str)> {
    let (c, a) = qualified.split_once('.')?;
    if c.is_empty() || a.is_empty() || a.contains('.') {
        return None;
    }
    Some((c, a))
}

pub fn qualify(class: &str, attr: &str) -> String {
    format!("{class}.{attr}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate {kind} name '{name}'")]
    DuplicateName { kind: &'static str, name: String },
    #[error("reference to undeclared element '{0}'")]
    DanglingReference(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("relationships '{0}' and '{1}' have incompatible signatures")]
    IncompatibleSignature(String, String),
    #[error("'{0}' is given more than one temporal marking")]
    ConflictingTemporality(String),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("relationship '{relationship}' has no role '{role}'")]
    UnknownRole { relationship: String, role: String },
    #[error("unknown relationship '{0}'")]
    UnknownRelationship(String),
}

/// An attribute as written inside a class declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAttr {
    pub name: String,
    pub domain: String,
    pub markings: Vec<Temporality>,
    pub identifier: bool,
    pub frozen: bool,
    pub card: Option<Card>,
}

impl RawAttr {
    pub fn new(name: impl Into<String>, domain: impl Into<String>) -> Self {
        RawAttr {
            name: name.into(),
            domain: domain.into(),
            markings: Vec::new(),
            identifier: false,
            frozen: false,
            card: None,
        }
    }
}

/// One unvalidated declaration, as produced by the parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Class { name: String, markings: Vec<Temporality>, attributes: Vec<RawAttr> },
    Relationship { name: String, markings: Vec<Temporality>, roles: Vec<RoleDecl> },
    IsaClass { sub: String, sup: String },
    IsaRelationship { sub: String, sup: String },
    IsaRole { sub: RoleRef, sup: RoleRef },
    DisjointClasses { members: Vec<String>, sup: String },
    DisjointRelationships { members: Vec<String>, sup: String },
    Cover { members: Vec<String>, sup: String },
    Transition(TransitionConstraint),
    Chronon(String),
}

impl Declaration {
    pub fn class(name: impl Into<String>, temporality: Temporality) -> Self {
        Declaration::Class { name: name.into(), markings: marking(temporality), attributes: Vec::new() }
    }

    pub fn relationship(name: impl Into<String>, temporality: Temporality, roles: &[(&str, &str)]) -> Self {
        Declaration::Relationship {
            name: name.into(),
            markings: marking(temporality),
            roles: roles
                .iter()
                .map(|(r, p)| RoleDecl { name: r.to_string(), player: p.to_string(), card: None })
                .collect(),
        }
    }

    pub fn isa(sub: impl Into<String>, sup: impl Into<String>) -> Self {
        Declaration::IsaClass { sub: sub.into(), sup: sup.into() }
    }
}

fn marking(t: Temporality) -> Vec<Temporality> {
    match t {
        Temporality::Mixed => Vec::new(),
        other => vec![other],
    }
}

/// A construction error attributed to the declaration at `index`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("declaration {index}: {error}")]
pub struct LocatedError {
    pub index: usize,
    pub error: ModelError,
}

/// A validated TREND schema.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    classes: BTreeMap<String, ClassDecl>,
    relationships: BTreeMap<String, RelDecl>,
    isa_c: BTreeSet<(String, String)>,
    isa_r: BTreeSet<(String, String)>,
    isa_u: BTreeSet<(RoleRef, RoleRef)>,
    disj_c: BTreeSet<(BTreeSet<String>, String)>,
    disj_r: BTreeSet<(BTreeSet<String>, String)>,
    cover: BTreeSet<(BTreeSet<String>, String)>,
    transitions: BTreeSet<TransitionConstraint>,
    chronon_unit: Option<String>,
}

impl Schema {
    pub fn empty() -> Self {
        Schema::default()
    }

    pub fn is_empty(&self) -> bool {
        *self == Schema::default()
    }

    pub fn classes(&self) -> &BTreeMap<String, ClassDecl> {
        &self.classes
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.get(name)
    }

    pub fn relationships(&self) -> &BTreeMap<String, RelDecl> {
        &self.relationships
    }

    pub fn relationship(&self, name: &str) -> Option<&RelDecl> {
        self.relationships.get(name)
    }

    pub fn isa_c(&self) -> &BTreeSet<(String, String)> {
        &self.isa_c
    }

    pub fn isa_r(&self) -> &BTreeSet<(String, String)> {
        &self.isa_r
    }

    pub fn isa_u(&self) -> &BTreeSet<(RoleRef, RoleRef)> {
        &self.isa_u
    }

    pub fn disj_c(&self) -> &BTreeSet<(BTreeSet<String>, String)> {
        &self.disj_c
    }

    pub fn disj_r(&self) -> &BTreeSet<(BTreeSet<String>, String)> {
        &self.disj_r
    }

    pub fn cover(&self) -> &BTreeSet<(BTreeSet<String>, String)> {
        &self.cover
    }

    pub fn transitions(&self) -> &BTreeSet<TransitionConstraint> {
        &self.transitions
    }

    pub fn chronon_unit(&self) -> Option<&str> {
        self.chronon_unit.as_deref()
    }

    /// Looks up a qualified attribute `Class.attr`.
    pub fn attribute(&self, qualified: &str) -> Option<(&ClassDecl, &AttrDecl)> {
        let (c, a) = split_attr(qualified)?;
        let class = self.classes.get(c)?;
        Some((class, class.attributes.get(a)?))
    }

    /// All attributes as `(qualified name, owner, declaration)`, ordered.
    pub fn attributes(&self) -> impl Iterator<Item = (String, &ClassDecl, &AttrDecl)> {
        self.classes
            .values()
            .flat_map(|c| c.attributes.values().map(move |a| (qualify(&c.name, &a.name), c, a)))
    }

    /// Domain symbols used by attribute declarations.
    pub fn domains(&self) -> BTreeSet<String> {
        self.attributes().map(|(_, _, a)| a.domain.clone()).collect()
    }

    pub fn ids(&self) -> BTreeMap<&str, &AttrDecl> {
        self.classes.values().filter_map(|c| c.identifier().map(|a| (c.name.as_str(), a))).collect()
    }

    pub fn is_frozen(&self, qualified: &str) -> bool {
        self.transitions.iter().any(|t| t.kind == TransitionKind::Frozen && t.source == qualified)
    }

    /// The class playing `role` in `rel`.
    pub fn player(&self, rel: &str, role: &str) -> Result<&str, ModelError> {
        self.relationships
            .get(rel)
            .and_then(|r| r.roles.iter().find(|u| u.name == role))
            .map(|u| u.player.as_str())
            .ok_or_else(|| ModelError::UnknownRole { relationship: rel.to_string(), role: role.to_string() })
    }

    /// Every role of `rel` played by `class`; more than one for ring relationships.
    pub fn roles_of(&self, rel: &str, class: &str) -> Result<BTreeSet<String>, ModelError> {
        let r =
            self.relationships.get(rel).ok_or_else(|| ModelError::UnknownRelationship(rel.to_string()))?;
        Ok(r.roles.iter().filter(|u| u.player == class).map(|u| u.name.clone()).collect())
    }

    /// Re-expresses the schema as declarations; `build_schema` of the result
    /// yields an equal schema.
    pub fn declarations(&self) -> Vec<Declaration> {
        let mut out = Vec::new();
        if let Some(u) = &self.chronon_unit {
            out.push(Declaration::Chronon(u.clone()));
        }
        for c in self.classes.values() {
            out.push(Declaration::Class {
                name: c.name.clone(),
                markings: marking(c.temporality),
                attributes: c
                    .attributes
                    .values()
                    .map(|a| RawAttr {
                        name: a.name.clone(),
                        domain: a.domain.clone(),
                        markings: marking(a.temporality),
                        identifier: a.identifier,
                        frozen: false,
                        card: a.card,
                    })
                    .collect(),
            });
        }
        for r in self.relationships.values() {
            out.push(Declaration::Relationship {
                name: r.name.clone(),
                markings: marking(r.temporality),
                roles: r.roles.clone(),
            });
        }
        for (sub, sup) in &self.isa_c {
            out.push(Declaration::IsaClass { sub: sub.clone(), sup: sup.clone() });
        }
        for (sub, sup) in &self.isa_r {
            out.push(Declaration::IsaRelationship { sub: sub.clone(), sup: sup.clone() });
        }
        for (sub, sup) in &self.isa_u {
            out.push(Declaration::IsaRole { sub: sub.clone(), sup: sup.clone() });
        }
        for (m, sup) in &self.disj_c {
            out.push(Declaration::DisjointClasses { members: m.iter().cloned().collect(), sup: sup.clone() });
        }
        for (m, sup) in &self.disj_r {
            out.push(Declaration::DisjointRelationships {
                members: m.iter().cloned().collect(),
                sup: sup.clone(),
            });
        }
        for (m, sup) in &self.cover {
            out.push(Declaration::Cover { members: m.iter().cloned().collect(), sup: sup.clone() });
        }
        for t in &self.transitions {
            out.push(Declaration::Transition(t.clone()));
        }
        out
    }
}

fn single_marking(name: &str, markings: &[Temporality]) -> Result<Temporality, ModelError> {
    let distinct: BTreeSet<_> = markings.iter().copied().collect();
    match distinct.len() {
        0 => Ok(Temporality::Mixed),
        1 => Ok(*distinct.iter().next().unwrap()),
        _ => Err(ModelError::ConflictingTemporality(name.to_string())),
    }
}

fn check_card(owner: &str, card: &Option<Card>) -> Result<(), ModelError> {
    match card {
        Some(Card { min, max: Some(max) }) if min > max => Err(ModelError::InvalidConstraint(format!(
            "cardinality of '{owner}' has min {min} greater than max {max}"
        ))),
        _ => Ok(()),
    }
}

/// Validates raw declarations and assembles a [`Schema`].
///
/// Element declarations are registered first, so constraints may refer to
/// elements declared later in the list. All errors are collected.
pub fn build_schema(decls: &[Declaration]) -> Result<Schema, Vec<LocatedError>> {
    let mut schema = Schema::default();
    let mut errors = Vec::new();
    let mut err = |index: usize, error: ModelError| errors.push(LocatedError { index, error });
    let mut frozen = Vec::new();

    for (i, d) in decls.iter().enumerate() {
        match d {
            Declaration::Class { name, markings, attributes } => {
                if schema.classes.contains_key(name) {
                    err(i, ModelError::DuplicateName { kind: "class", name: name.clone() });
                    continue;
                }
                let temporality = single_marking(name, markings).unwrap_or_else(|e| {
                    err(i, e);
                    Temporality::Mixed
                });
                let mut attrs = BTreeMap::new();
                for a in attributes {
                    let q = qualify(name, &a.name);
                    if attrs.contains_key(&a.name) {
                        err(i, ModelError::DuplicateName { kind: "attribute", name: q });
                        continue;
                    }
                    let t = single_marking(&q, &a.markings).unwrap_or_else(|e| {
                        err(i, e);
                        Temporality::Mixed
                    });
                    if let Err(e) = check_card(&q, &a.card) {
                        err(i, e);
                    }
                    if a.identifier && t != Temporality::Snapshot {
                        err(
                            i,
                            ModelError::InvalidConstraint(format!(
                                "identifier attribute '{q}' must be marked snapshot"
                            )),
                        );
                    }
                    if a.frozen {
                        frozen.push((i, q));
                    }
                    attrs.insert(
                        a.name.clone(),
                        AttrDecl {
                            name: a.name.clone(),
                            domain: a.domain.clone(),
                            temporality: t,
                            identifier: a.identifier,
                            card: a.card,
                        },
                    );
                }
                if attrs.values().filter(|a| a.identifier).count() > 1 {
                    err(
                        i,
                        ModelError::InvalidConstraint(format!(
                            "class '{name}' declares more than one identifier"
                        )),
                    );
                }
                schema
                    .classes
                    .insert(name.clone(), ClassDecl { name: name.clone(), temporality, attributes: attrs });
            }
            Declaration::Relationship { name, markings, roles } => {
                if schema.relationships.contains_key(name) {
                    err(i, ModelError::DuplicateName { kind: "relationship", name: name.clone() });
                    continue;
                }
                let temporality = single_marking(name, markings).unwrap_or_else(|e| {
                    err(i, e);
                    Temporality::Mixed
                });
                if roles.len() < 2 {
                    err(
                        i,
                        ModelError::ArityMismatch(format!(
                            "relationship '{name}' has {} role(s), at least 2 are required",
                            roles.len()
                        )),
                    );
                }
                let mut seen = BTreeSet::new();
                for r in roles {
                    if !seen.insert(r.name.as_str()) {
                        err(
                            i,
                            ModelError::DuplicateName { kind: "role", name: format!("{name}.{}", r.name) },
                        );
                    }
                    if let Err(e) = check_card(&format!("{name}.{}", r.name), &r.card) {
                        err(i, e);
                    }
                }
                schema
                    .relationships
                    .insert(name.clone(), RelDecl { name: name.clone(), temporality, roles: roles.clone() });
            }
            Declaration::Chronon(unit) => {
                if schema.chronon_unit.is_some() {
                    err(i, ModelError::DuplicateName { kind: "chronon", name: unit.clone() });
                } else {
                    schema.chronon_unit = Some(unit.clone());
                }
            }
            _ => {}
        }
    }

    // Class and relationship symbols share the DL signature.
    for name in schema.relationships.keys() {
        if schema.classes.contains_key(name) {
            let idx = decls
                .iter()
                .position(|d| matches!(d, Declaration::Relationship { name: n, .. } if n == name))
                .unwrap_or(0);
            err(idx, ModelError::DuplicateName { kind: "element", name: name.clone() });
        }
    }

    for (i, d) in decls.iter().enumerate() {
        if let Declaration::Relationship { roles, .. } = d {
            for r in roles {
                if !schema.classes.contains_key(&r.player) {
                    err(i, ModelError::DanglingReference(r.player.clone()));
                }
            }
        }
    }

    let class_exists = |s: &Schema, n: &str| s.classes.contains_key(n);
    let rel_exists = |s: &Schema, n: &str| s.relationships.contains_key(n);

    for (i, d) in decls.iter().enumerate() {
        let result: Result<(), ModelError> = (|| {
            match d {
                Declaration::IsaClass { sub, sup } => {
                    for n in [sub, sup] {
                        if !class_exists(&schema, n) {
                            return Err(ModelError::DanglingReference(n.clone()));
                        }
                    }
                    schema.isa_c.insert((sub.clone(), sup.clone()));
                }
                Declaration::IsaRelationship { sub, sup } => {
                    let (a, b) = rel_pair(&schema, sub, sup)?;
                    if a.arity() != b.arity() {
                        return Err(ModelError::ArityMismatch(format!(
                            "'{sub}' has arity {} but '{sup}' has arity {}",
                            a.arity(),
                            b.arity()
                        )));
                    }
                    if !a.compatible_with(b) {
                        return Err(ModelError::IncompatibleSignature(sub.clone(), sup.clone()));
                    }
                    schema.isa_r.insert((sub.clone(), sup.clone()));
                }
                Declaration::IsaRole { sub, sup } => {
                    for r in [sub, sup] {
                        schema.player(&r.relationship, &r.role).map_err(|_| {
                            if rel_exists(&schema, &r.relationship) {
                                ModelError::UnknownRole {
                                    relationship: r.relationship.clone(),
                                    role: r.role.clone(),
                                }
                            } else {
                                ModelError::DanglingReference(r.relationship.clone())
                            }
                        })?;
                    }
                    schema.isa_u.insert((sub.clone(), sup.clone()));
                }
                Declaration::DisjointClasses { members, sup } | Declaration::Cover { members, sup } => {
                    for n in members.iter().chain(std::iter::once(sup)) {
                        if !class_exists(&schema, n) {
                            return Err(ModelError::DanglingReference(n.clone()));
                        }
                    }
                    let set = member_set(members, sup)?;
                    if matches!(d, Declaration::Cover { .. }) {
                        schema.cover.insert((set, sup.clone()));
                    } else {
                        schema.disj_c.insert((set, sup.clone()));
                    }
                }
                Declaration::DisjointRelationships { members, sup } => {
                    for m in members {
                        let (a, b) = rel_pair(&schema, m, sup)?;
                        if !a.compatible_with(b) {
                            return Err(ModelError::IncompatibleSignature(m.clone(), sup.clone()));
                        }
                    }
                    let set = member_set(members, sup)?;
                    schema.disj_r.insert((set, sup.clone()));
                }
                Declaration::Transition(t) => {
                    check_transition(&schema, t)?;
                    schema.transitions.insert(t.clone());
                }
                _ => {}
            }
            Ok(())
        })();
        if let Err(e) = result {
            err(i, e);
        }
    }

    for (i, q) in frozen {
        schema.transitions.insert(TransitionConstraint::frozen(q));
        let _ = i;
    }

    if errors.is_empty() {
        Ok(schema)
    } else {
        Err(errors)
    }
}

fn rel_pair<'s>(s: &'s Schema, a: &str, b: &str) -> Result<(&'s RelDecl, &'s RelDecl), ModelError> {
    let ra = s.relationships.get(a).ok_or_else(|| ModelError::DanglingReference(a.to_string()))?;
    let rb = s.relationships.get(b).ok_or_else(|| ModelError::DanglingReference(b.to_string()))?;
    Ok((ra, rb))
}

fn member_set(members: &[String], sup: &str) -> Result<BTreeSet<String>, ModelError> {
    if members.is_empty() {
        return Err(ModelError::InvalidConstraint(format!("empty member list under '{sup}'")));
    }
    if members.iter().any(|m| m == sup) {
        return Err(ModelError::InvalidConstraint(format!("'{sup}' listed among its own subtypes")));
    }
    Ok(members.iter().cloned().collect())
}

fn check_transition(s: &Schema, t: &TransitionConstraint) -> Result<(), ModelError> {
    let exists = |n: &str| match t.subject {
        Subject::Class => s.classes.contains_key(n),
        Subject::Relationship => s.relationships.contains_key(n),
        Subject::Attribute => s.attribute(n).is_some(),
    };
    for n in t.endpoints() {
        if !exists(n) {
            return Err(ModelError::DanglingReference(n.to_string()));
        }
    }
    if t.offset == Some(0) {
        return Err(ModelError::InvalidConstraint(format!("{t}: offset must be at least 1")));
    }
    if t.kind == TransitionKind::Frozen {
        if t.subject != Subject::Attribute || t.target.is_some() {
            return Err(ModelError::InvalidConstraint("frozen applies to exactly one attribute".to_string()));
        }
        if t.persistent || t.offset.is_some() || t.tense != Tense::Future {
            return Err(ModelError::InvalidConstraint(format!(
                "frozen attribute '{}' takes no tense, offset or persistence",
                t.source
            )));
        }
        return Ok(());
    }
    let target =
        t.target.as_deref().ok_or_else(|| ModelError::InvalidConstraint(format!("{t}: missing target")))?;
    if target == t.source {
        return Err(ModelError::InvalidConstraint(format!("{}: source and target must differ", t.label())));
    }
    match t.subject {
        Subject::Relationship => {
            let (a, b) = rel_pair(s, &t.source, target)?;
            if a.arity() != b.arity() {
                return Err(ModelError::ArityMismatch(format!(
                    "{}: '{}' has arity {} but '{}' has arity {}",
                    t.label(),
                    t.source,
                    a.arity(),
                    target,
                    b.arity()
                )));
            }
            if !a.compatible_with(b) {
                return Err(ModelError::IncompatibleSignature(t.source.clone(), target.to_string()));
            }
        }
        Subject::Attribute => {
            if t.kind != TransitionKind::Change || t.tense != Tense::Future {
                return Err(ModelError::InvalidConstraint(format!(
                    "{}: attributes support only future change and frozen",
                    t.label()
                )));
            }
        }
        Subject::Class => {}
    }
    Ok(())
}
