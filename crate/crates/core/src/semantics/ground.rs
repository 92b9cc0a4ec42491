//! Propositional grounding of schema constraints over a finite universe.
//!
//! Every legality condition is compiled into a [`Formula`] over membership
//! atoms ("object o is in class C at t", "tuple τ is in R at t", "pair
//! (o, d) is in A at t"). The state checker evaluates these formulas against
//! a concrete state; the reasoner searches for assignments satisfying them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::model::{
    Card, Declaration, Modality, RoleRef, Schema, Subject, Temporality, Tense, TransitionConstraint,
    TransitionKind,
};

/// Flow of time outside the observed window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum TimeFlow {
    /// Time starts at 0: a previous-state reference at 0 is false.
    #[default]
    Naturals,
    /// Time extends before 0: a previous-state reference before the window
    /// is treated as satisfied.
    Integers,
}

/// Window in which a future-mandatory obligation may be met.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FutureWindow {
    /// The transition may start at the triggering time point itself.
    #[default]
    Reflexive,
    /// The transition must start strictly later.
    Strict,
}

/// Which end of a past-mandatory transition triggers the obligation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum PastTrigger {
    /// Membership in the target demands an earlier transition.
    #[default]
    Target,
    /// Membership in the source demands an earlier transition.
    Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SemanticsOptions {
    pub flow: TimeFlow,
    pub future_window: FutureWindow,
    pub past_trigger: PastTrigger,
}

/// Three-valued truth.
pub type Tri = Option<bool>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Class { class: usize, obj: usize, t: u32 },
    Rel { rel: usize, args: Vec<usize>, t: u32 },
    Attr { attr: usize, obj: usize, val: usize, t: u32 },
}

impl Atom {
    pub fn time(&self) -> u32 {
        match self {
            Atom::Class { t, .. } | Atom::Rel { t, .. } | Atom::Attr { t, .. } => *t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Lit(usize, bool),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    AtLeast(usize, Vec<Formula>),
    AtMost(usize, Vec<Formula>),
}

pub const TRUE: Formula = Formula::Const(true);
pub const FALSE: Formula = Formula::Const(false);

pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
    let mut out = Vec::new();
    for f in items {
        match f {
            Formula::Const(true) => {}
            Formula::Const(false) => return FALSE,
            Formula::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => TRUE,
        1 => out.pop().unwrap(),
        _ => Formula::And(out),
    }
}

pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
    let mut out = Vec::new();
    for f in items {
        match f {
            Formula::Const(false) => {}
            Formula::Const(true) => return TRUE,
            Formula::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => FALSE,
        1 => out.pop().unwrap(),
        _ => Formula::Or(out),
    }
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    or([not(a), b])
}

pub fn not(f: Formula) -> Formula {
    match f {
        Formula::Const(b) => Formula::Const(!b),
        Formula::Lit(a, p) => Formula::Lit(a, !p),
        Formula::And(xs) => or(xs.into_iter().map(not)),
        Formula::Or(xs) => and(xs.into_iter().map(not)),
        Formula::AtLeast(k, xs) => at_most(k - 1, xs),
        Formula::AtMost(k, xs) => at_least(k + 1, xs),
    }
}

fn split_consts(items: Vec<Formula>) -> (usize, Vec<Formula>) {
    let mut trues = 0;
    let mut rest = Vec::new();
    for f in items {
        match f {
            Formula::Const(true) => trues += 1,
            Formula::Const(false) => {}
            other => rest.push(other),
        }
    }
    (trues, rest)
}

/// At least `k` of `items` hold.
pub fn at_least(k: usize, items: Vec<Formula>) -> Formula {
    let (trues, rest) = split_consts(items);
    if trues >= k {
        return TRUE;
    }
    let k = k - trues;
    if rest.len() < k {
        FALSE
    } else if k == 1 {
        or(rest)
    } else if k == rest.len() {
        and(rest)
    } else {
        Formula::AtLeast(k, rest)
    }
}

/// At most `k` of `items` hold.
pub fn at_most(k: usize, items: Vec<Formula>) -> Formula {
    let (trues, rest) = split_consts(items);
    if trues > k {
        return FALSE;
    }
    let k = k - trues;
    if rest.len() <= k {
        TRUE
    } else if k == 0 {
        and(rest.into_iter().map(not))
    } else {
        Formula::AtMost(k, rest)
    }
}

impl Formula {
    pub fn eval3(&self, val: &dyn Fn(usize) -> Tri) -> Tri {
        match self {
            Formula::Const(b) => Some(*b),
            Formula::Lit(a, p) => val(*a).map(|v| v == *p),
            Formula::And(xs) => {
                let mut unknown = false;
                for x in xs {
                    match x.eval3(val) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Formula::Or(xs) => {
                let mut unknown = false;
                for x in xs {
                    match x.eval3(val) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Formula::AtLeast(k, xs) | Formula::AtMost(k, xs) => {
                let (mut t, mut u) = (0, 0);
                for x in xs {
                    match x.eval3(val) {
                        Some(true) => t += 1,
                        None => u += 1,
                        Some(false) => {}
                    }
                }
                if matches!(self, Formula::AtLeast(..)) {
                    if t >= *k {
                        Some(true)
                    } else if t + u < *k {
                        Some(false)
                    } else {
                        None
                    }
                } else if t > *k {
                    Some(false)
                } else if t + u <= *k {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }

    pub fn eval(&self, val: &dyn Fn(usize) -> bool) -> bool {
        self.eval3(&|a| Some(val(a))).expect("total assignment")
    }

    pub fn atoms(&self, out: &mut Vec<usize>) {
        match self {
            Formula::Const(_) => {}
            Formula::Lit(a, _) => out.push(*a),
            Formula::And(xs) | Formula::Or(xs) | Formula::AtLeast(_, xs) | Formula::AtMost(_, xs) => {
                for x in xs {
                    x.atoms(out);
                }
            }
        }
    }
}

/// The instance a grounded condition talks about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum Instance {
    Object(String),
    Tuple(Vec<(String, String)>),
    Pair(String, String),
    Value(String),
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Object(o) | Instance::Value(o) => write!(f, "{o}"),
            Instance::Pair(o, v) => write!(f, "({o}, {v})"),
            Instance::Tuple(items) => {
                let parts: Vec<String> = items.iter().map(|(u, o)| format!("{u}: {o}")).collect();
                write!(f, "<{}>", parts.join(", "))
            }
        }
    }
}

/// Where a grounded formula comes from; becomes a violation when false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Origin {
    pub rule: String,
    pub elements: Vec<String>,
    pub instance: Option<Instance>,
    pub time: Option<u32>,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Grounded {
    pub origin: Origin,
    pub formula: Formula,
}

/// An instance of a subject kind, in universe indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Inst {
    Obj(usize),
    Tuple(Vec<usize>),
    Pair(usize, usize),
}

/// Finite universe: objects, domain values and the horizon, together with
/// the interned atom table (time-major order).
#[derive(Debug, Clone)]
pub struct Universe {
    pub horizon: u32,
    pub objects: Vec<String>,
    /// `(domain, literal)` for every value id.
    pub values: Vec<(String, String)>,
    pub classes: Vec<String>,
    pub rels: Vec<(String, Vec<String>)>,
    pub attrs: Vec<(String, String)>,
    class_ix: HashMap<String, usize>,
    rel_ix: HashMap<String, usize>,
    attr_ix: HashMap<String, usize>,
    obj_ix: HashMap<String, usize>,
    val_ix: HashMap<(String, String), usize>,
    domain_vals: BTreeMap<String, Vec<usize>>,
    atoms: Vec<Atom>,
    atom_ix: HashMap<Atom, usize>,
}

/// All tuples of length `k` over `0..n`, lexicographically.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

impl Universe {
    pub fn new(
        schema: &Schema,
        horizon: u32,
        objects: Vec<String>,
        domains: &BTreeMap<String, Vec<String>>,
    ) -> Self {
        let classes: Vec<String> = schema.classes().keys().cloned().collect();
        let rels: Vec<(String, Vec<String>)> = schema
            .relationships()
            .values()
            .map(|r| (r.name.clone(), r.role_names().map(String::from).collect()))
            .collect();
        let attrs: Vec<(String, String)> =
            schema.attributes().map(|(q, _, a)| (q, a.domain.clone())).collect();
        let mut values = Vec::new();
        let mut val_ix = HashMap::new();
        let mut domain_vals: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (d, vs) in domains {
            for v in vs {
                let id = values.len();
                values.push((d.clone(), v.clone()));
                val_ix.insert((d.clone(), v.clone()), id);
                domain_vals.entry(d.clone()).or_default().push(id);
            }
        }
        let mut u = Universe {
            horizon,
            class_ix: classes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect(),
            rel_ix: rels.iter().enumerate().map(|(i, r)| (r.0.clone(), i)).collect(),
            attr_ix: attrs.iter().enumerate().map(|(i, a)| (a.0.clone(), i)).collect(),
            obj_ix: objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect(),
            objects,
            values,
            classes,
            rels,
            attrs,
            val_ix,
            domain_vals,
            atoms: Vec::new(),
            atom_ix: HashMap::new(),
        };
        let n = u.objects.len();
        for t in 0..horizon {
            for class in 0..u.classes.len() {
                for obj in 0..n {
                    u.intern(Atom::Class { class, obj, t });
                }
            }
            for rel in 0..u.rels.len() {
                for args in tuples(n, u.rels[rel].1.len()) {
                    u.intern(Atom::Rel { rel, args, t });
                }
            }
            for attr in 0..u.attrs.len() {
                let vals = u.domain_vals.get(&u.attrs[attr].1).cloned().unwrap_or_default();
                for obj in 0..n {
                    for &val in &vals {
                        u.intern(Atom::Attr { attr, obj, val, t });
                    }
                }
            }
        }
        u
    }

    fn intern(&mut self, a: Atom) {
        let id = self.atoms.len();
        self.atom_ix.insert(a.clone(), id);
        self.atoms.push(a);
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: usize) -> &Atom {
        &self.atoms[id]
    }

    pub fn atom_id(&self, a: &Atom) -> Option<usize> {
        self.atom_ix.get(a).copied()
    }

    pub fn object_id(&self, o: &str) -> Option<usize> {
        self.obj_ix.get(o).copied()
    }

    pub fn value_id(&self, domain: &str, v: &str) -> Option<usize> {
        self.val_ix.get(&(domain.to_string(), v.to_string())).copied()
    }

    pub fn class_id(&self, c: &str) -> Option<usize> {
        self.class_ix.get(c).copied()
    }

    pub fn rel_id(&self, r: &str) -> Option<usize> {
        self.rel_ix.get(r).copied()
    }

    pub fn attr_id(&self, a: &str) -> Option<usize> {
        self.attr_ix.get(a).copied()
    }

    pub fn domain_values(&self, domain: &str) -> &[usize] {
        self.domain_vals.get(domain).map_or(&[], Vec::as_slice)
    }

    pub fn attr_values(&self, attr: &str) -> &[usize] {
        match self.attr_id(attr) {
            Some(i) => self.domain_values(&self.attrs[i].1),
            None => &[],
        }
    }

    fn in_window(&self, t: i64) -> Option<u32> {
        if t >= 0 && t < i64::from(self.horizon) {
            Some(t as u32)
        } else {
            None
        }
    }

    fn lit(&self, a: Atom) -> Formula {
        match self.atom_ix.get(&a) {
            Some(&id) => Formula::Lit(id, true),
            None => FALSE,
        }
    }

    pub fn class_at(&self, c: &str, obj: usize, t: i64) -> Formula {
        match (self.class_id(c), self.in_window(t)) {
            (Some(class), Some(t)) => self.lit(Atom::Class { class, obj, t }),
            _ => FALSE,
        }
    }

    pub fn rel_at(&self, r: &str, args: &[usize], t: i64) -> Formula {
        match (self.rel_id(r), self.in_window(t)) {
            (Some(rel), Some(t)) => self.lit(Atom::Rel { rel, args: args.to_vec(), t }),
            _ => FALSE,
        }
    }

    pub fn attr_at(&self, a: &str, obj: usize, val: usize, t: i64) -> Formula {
        match (self.attr_id(a), self.in_window(t)) {
            (Some(attr), Some(t)) => self.lit(Atom::Attr { attr, obj, val, t }),
            _ => FALSE,
        }
    }

    /// Membership of `inst` in the element `name` of the given subject kind.
    pub fn member(&self, subject: Subject, name: &str, inst: &Inst, t: i64) -> Formula {
        match (subject, inst) {
            (Subject::Class, Inst::Obj(o)) => self.class_at(name, *o, t),
            (Subject::Relationship, Inst::Tuple(args)) => self.rel_at(name, args, t),
            (Subject::Attribute, Inst::Pair(o, v)) => self.attr_at(name, *o, *v, t),
            _ => FALSE,
        }
    }

    /// Every instance an element of this subject kind may contain.
    pub fn instances(&self, subject: Subject, names: &[&str]) -> Vec<Inst> {
        let n = self.objects.len();
        match subject {
            Subject::Class => (0..n).map(Inst::Obj).collect(),
            Subject::Relationship => {
                let k = names
                    .iter()
                    .filter_map(|r| self.rel_id(r))
                    .map(|i| self.rels[i].1.len())
                    .next()
                    .unwrap_or(0);
                tuples(n, k).into_iter().map(Inst::Tuple).collect()
            }
            Subject::Attribute => {
                let vals: BTreeSet<usize> =
                    names.iter().flat_map(|a| self.attr_values(a).iter().copied()).collect();
                (0..n).flat_map(|o| vals.iter().map(move |&v| Inst::Pair(o, v))).collect()
            }
        }
    }

    /// Named form of an instance; `roles` names the tuple positions.
    pub fn describe(&self, inst: &Inst, roles: &[String]) -> Instance {
        match inst {
            Inst::Obj(o) => Instance::Object(self.objects[*o].clone()),
            Inst::Pair(o, v) => Instance::Pair(self.objects[*o].clone(), self.values[*v].1.clone()),
            Inst::Tuple(args) => Instance::Tuple(
                roles.iter().cloned().zip(args.iter().map(|&o| self.objects[o].clone())).collect(),
            ),
        }
    }

    fn roles(&self, rel: &str) -> Vec<String> {
        self.rel_id(rel).map(|i| self.rels[i].1.clone()).unwrap_or_default()
    }

    fn times(&self) -> impl Iterator<Item = i64> {
        0..i64::from(self.horizon)
    }
}

/// One legality condition of a schema, prior to grounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    IsaC(String, String),
    IsaR(String, String),
    IsaU(RoleRef, RoleRef),
    RelTyping(String),
    AttExistence { class: String, attr: String },
    CardR { class: String, rel: String, role: String, card: Card },
    CardA { class: String, attr: String, card: Card },
    DisjC(BTreeSet<String>, String),
    DisjR(BTreeSet<String>, String),
    Cover(BTreeSet<String>, String),
    ClassTemporality(String, Temporality),
    RelTemporality(String, Temporality),
    AttrTemporality(String, Temporality),
    ClassAttrTemporality { class: String, attr: String, temporality: Temporality },
    Id { class: String, attr: String },
    Transition(TransitionConstraint),
}

/// All constraints of a schema, in translation order.
pub fn schema_constraints(schema: &Schema) -> Vec<Constraint> {
    let mut out = Vec::new();
    out.extend(schema.isa_c().iter().map(|(a, b)| Constraint::IsaC(a.clone(), b.clone())));
    out.extend(schema.isa_r().iter().map(|(a, b)| Constraint::IsaR(a.clone(), b.clone())));
    out.extend(schema.isa_u().iter().map(|(a, b)| Constraint::IsaU(a.clone(), b.clone())));
    out.extend(schema.relationships().keys().map(|r| Constraint::RelTyping(r.clone())));
    for (q, c, _) in schema.attributes() {
        out.push(Constraint::AttExistence { class: c.name.clone(), attr: q });
    }
    for r in schema.relationships().values() {
        for u in &r.roles {
            if let Some(card) = u.card {
                out.push(Constraint::CardR {
                    class: u.player.clone(),
                    rel: r.name.clone(),
                    role: u.name.clone(),
                    card,
                });
            }
        }
    }
    for (q, c, a) in schema.attributes() {
        if let Some(card) = a.card {
            out.push(Constraint::CardA { class: c.name.clone(), attr: q, card });
        }
    }
    out.extend(schema.disj_c().iter().map(|(m, s)| Constraint::DisjC(m.clone(), s.clone())));
    out.extend(schema.disj_r().iter().map(|(m, s)| Constraint::DisjR(m.clone(), s.clone())));
    out.extend(schema.cover().iter().map(|(m, s)| Constraint::Cover(m.clone(), s.clone())));
    for (c, a) in schema.ids() {
        out.push(Constraint::Id { class: c.to_string(), attr: format!("{c}.{}", a.name) });
    }
    for c in schema.classes().values() {
        if c.temporality != Temporality::Mixed {
            out.push(Constraint::ClassTemporality(c.name.clone(), c.temporality));
        }
    }
    for r in schema.relationships().values() {
        if r.temporality != Temporality::Mixed {
            out.push(Constraint::RelTemporality(r.name.clone(), r.temporality));
        }
    }
    for (q, c, a) in schema.attributes() {
        if a.temporality != Temporality::Mixed {
            out.push(Constraint::ClassAttrTemporality {
                class: c.name.clone(),
                attr: q.clone(),
                temporality: a.temporality,
            });
        }
    }
    for (q, _, a) in schema.attributes() {
        if a.temporality != Temporality::Mixed {
            out.push(Constraint::AttrTemporality(q, a.temporality));
        }
    }
    out.extend(schema.transitions().iter().cloned().map(Constraint::Transition));
    out
}

/// The constraints contributed by a single statement, interpreted over
/// `schema` (which must declare every referenced element).
pub fn declaration_constraints(decl: &Declaration, schema: &Schema) -> Vec<Constraint> {
    match decl {
        Declaration::IsaClass { sub, sup } => vec![Constraint::IsaC(sub.clone(), sup.clone())],
        Declaration::IsaRelationship { sub, sup } => vec![Constraint::IsaR(sub.clone(), sup.clone())],
        Declaration::IsaRole { sub, sup } => vec![Constraint::IsaU(sub.clone(), sup.clone())],
        Declaration::DisjointClasses { members, sup } => {
            vec![Constraint::DisjC(members.iter().cloned().collect(), sup.clone())]
        }
        Declaration::DisjointRelationships { members, sup } => {
            vec![Constraint::DisjR(members.iter().cloned().collect(), sup.clone())]
        }
        Declaration::Cover { members, sup } => {
            vec![Constraint::Cover(members.iter().cloned().collect(), sup.clone())]
        }
        Declaration::Transition(t) => vec![Constraint::Transition(t.clone())],
        Declaration::Class { name, markings, attributes } => {
            let mut out = Vec::new();
            if let Some(&t) = markings.first() {
                if t != Temporality::Mixed {
                    out.push(Constraint::ClassTemporality(name.clone(), t));
                }
            }
            for a in attributes {
                let q = format!("{name}.{}", a.name);
                if let Some(&t) = a.markings.first() {
                    out.push(Constraint::ClassAttrTemporality {
                        class: name.clone(),
                        attr: q.clone(),
                        temporality: t,
                    });
                    out.push(Constraint::AttrTemporality(q.clone(), t));
                }
                if a.frozen {
                    out.push(Constraint::Transition(TransitionConstraint::frozen(q.clone())));
                }
                if let Some(card) = a.card {
                    out.push(Constraint::CardA { class: name.clone(), attr: q.clone(), card });
                }
                if a.identifier && schema.attribute(&q).is_some() {
                    out.push(Constraint::Id { class: name.clone(), attr: q });
                }
            }
            out
        }
        Declaration::Relationship { name, markings, roles } => {
            let mut out = Vec::new();
            if let Some(&t) = markings.first() {
                if t != Temporality::Mixed {
                    out.push(Constraint::RelTemporality(name.clone(), t));
                }
            }
            for u in roles {
                if let Some(card) = u.card {
                    out.push(Constraint::CardR {
                        class: u.player.clone(),
                        rel: name.clone(),
                        role: u.name.clone(),
                        card,
                    });
                }
            }
            out
        }
        Declaration::Chronon(_) => Vec::new(),
    }
}

fn card_formula(card: &Card, items: Vec<Formula>) -> Formula {
    let lo = at_least(card.min as usize, items.clone());
    let hi = match card.max {
        Some(m) => at_most(m as usize, items),
        None => TRUE,
    };
    and([lo, hi])
}

fn origin(
    rule: &str,
    elements: Vec<String>,
    instance: Option<Instance>,
    time: i64,
    detail: String,
) -> Origin {
    Origin { rule: rule.to_string(), elements, instance, time: Some(time as u32), detail }
}

/// Future-form transition condition at `t`: source now, not yet target,
/// target `n` chronons later (and, for change, no longer source).
pub fn future_condition(u: &Universe, tc: &TransitionConstraint, inst: &Inst, t: i64) -> Formula {
    let n = i64::from(tc.step());
    let s = |t| u.member(tc.subject, &tc.source, inst, t);
    let g = |t| u.member(tc.subject, tc.target_name(), inst, t);
    let mut later = vec![g(t + n)];
    if tc.kind == TransitionKind::Change {
        later.push(not(s(t + n)));
    }
    let later = if t + n < i64::from(u.horizon) { and(later) } else { FALSE };
    and([s(t), not(g(t)), later])
}

/// Past-form transition condition at `t`: already in the target now, and
/// `n` chronons earlier not yet (for change: in the source, not the target).
pub fn past_condition(
    u: &Universe,
    tc: &TransitionConstraint,
    inst: &Inst,
    t: i64,
    flow: TimeFlow,
) -> Formula {
    let n = i64::from(tc.step());
    let s = |t| u.member(tc.subject, &tc.source, inst, t);
    let g = |t| u.member(tc.subject, tc.target_name(), inst, t);
    let (now, before) = match tc.kind {
        TransitionKind::Change => (and([not(s(t)), g(t)]), and([s(t - n), not(g(t - n))])),
        _ => (and([s(t), g(t)]), not(g(t - n))),
    };
    let before = if t - n >= 0 {
        before
    } else {
        match flow {
            TimeFlow::Naturals => FALSE,
            TimeFlow::Integers => TRUE,
        }
    };
    and([now, before])
}

/// The condition a transition constraint names, in its own tense.
pub fn transition_condition(
    u: &Universe,
    tc: &TransitionConstraint,
    inst: &Inst,
    t: i64,
    opts: &SemanticsOptions,
) -> Formula {
    match tc.tense {
        Tense::Future => future_condition(u, tc, inst, t),
        Tense::Past => past_condition(u, tc, inst, t, opts.flow),
    }
}

/// Obligation of a mandatory constraint for `inst` triggered at `t`.
pub fn mandatory_obligation(
    u: &Universe,
    tc: &TransitionConstraint,
    inst: &Inst,
    t: i64,
    opts: &SemanticsOptions,
) -> Formula {
    let h = i64::from(u.horizon);
    match tc.tense {
        Tense::Future => {
            let first = match opts.future_window {
                FutureWindow::Reflexive => t,
                FutureWindow::Strict => t + 1,
            };
            let trigger = u.member(tc.subject, &tc.source, inst, t);
            implies(trigger, or((first..h).map(|t2| future_condition(u, tc, inst, t2))))
        }
        Tense::Past => {
            let trigger_elem = match opts.past_trigger {
                PastTrigger::Target => tc.target_name(),
                PastTrigger::Source => &tc.source,
            };
            let trigger = u.member(tc.subject, trigger_elem, inst, t);
            implies(trigger, or((0..t).map(|t2| future_condition(u, tc, inst, t2))))
        }
    }
}

fn subject_roles(u: &Universe, tc: &TransitionConstraint) -> Vec<String> {
    if tc.subject == Subject::Relationship {
        u.roles(&tc.source)
    } else {
        Vec::new()
    }
}

fn ground_transition(
    u: &Universe,
    tc: &TransitionConstraint,
    opts: &SemanticsOptions,
    out: &mut Vec<Grounded>,
) {
    let label = tc.label();
    let elements: Vec<String> = tc.endpoints().into_iter().map(String::from).collect();
    let roles = subject_roles(u, tc);
    let h = i64::from(u.horizon);
    let names: Vec<&str> = tc.endpoints();
    for inst in u.instances(tc.subject, &names) {
        let named = u.describe(&inst, &roles);
        for t in u.times() {
            let mk = |detail: String, formula: Formula| Grounded {
                origin: origin(&label, elements.clone(), Some(named.clone()), t, detail),
                formula,
            };
            if tc.kind == TransitionKind::Frozen {
                let a = u.member(tc.subject, &tc.source, &inst, t);
                let later = and((t + 1..h).map(|t2| u.member(tc.subject, &tc.source, &inst, t2)));
                out.push(mk(
                    format!("value of frozen attribute {} disappears after t={t}", tc.source),
                    implies(a, later),
                ));
                continue;
            }
            if tc.modality == Modality::Mandatory {
                let detail = match tc.tense {
                    Tense::Future => format!(
                        "{named} in {} at t={t} never undergoes the mandatory {label} to {}",
                        tc.source,
                        tc.target_name()
                    ),
                    Tense::Past => format!(
                        "{named} at t={t} was not previously transitioned from {} to {} ({label})",
                        tc.source,
                        tc.target_name()
                    ),
                };
                out.push(mk(detail, mandatory_obligation(u, tc, &inst, t, opts)));
            }
            if tc.persistent {
                let cond = future_condition(u, tc, &inst, t);
                let stays = and((t + 1..h).map(|t2| u.member(tc.subject, tc.target_name(), &inst, t2)));
                out.push(mk(
                    format!("{named} leaves {} after the persistent {label} at t={t}", tc.target_name()),
                    implies(cond, stays),
                ));
            }
        }
    }
}

/// Grounds one constraint over the universe.
pub fn ground(
    c: &Constraint,
    u: &Universe,
    schema: &Schema,
    opts: &SemanticsOptions,
    out: &mut Vec<Grounded>,
) {
    let n = u.objects.len();
    let h = i64::from(u.horizon);
    let obj = |o: usize| Some(Instance::Object(u.objects[o].clone()));
    match c {
        Constraint::IsaC(a, b) => {
            for o in 0..n {
                for t in u.times() {
                    out.push(Grounded {
                        origin: origin(
                            "isa_C",
                            vec![a.clone(), b.clone()],
                            obj(o),
                            t,
                            format!("{} is in {a} but not in {b}", u.objects[o]),
                        ),
                        formula: implies(u.class_at(a, o, t), u.class_at(b, o, t)),
                    });
                }
            }
        }
        Constraint::IsaR(a, b) => {
            let roles = u.roles(a);
            for inst in u.instances(Subject::Relationship, &[a]) {
                let named = u.describe(&inst, &roles);
                for t in u.times() {
                    out.push(Grounded {
                        origin: origin(
                            "isa_R",
                            vec![a.clone(), b.clone()],
                            Some(named.clone()),
                            t,
                            format!("{named} is in {a} but not in {b}"),
                        ),
                        formula: implies(
                            u.member(Subject::Relationship, a, &inst, t),
                            u.member(Subject::Relationship, b, &inst, t),
                        ),
                    });
                }
            }
        }
        Constraint::IsaU(sub, sup) => {
            let plays = |r: &RoleRef, o: usize, t: i64| -> Formula {
                let (Some(ri), Some(pos)) = (
                    u.rel_id(&r.relationship),
                    schema.relationship(&r.relationship).and_then(|d| d.role_index(&r.role)),
                ) else {
                    return FALSE;
                };
                let k = u.rels[ri].1.len();
                or(tuples(n, k)
                    .into_iter()
                    .filter(|args| args[pos] == o)
                    .map(|args| u.rel_at(&r.relationship, &args, t)))
            };
            for o in 0..n {
                for t in u.times() {
                    out.push(Grounded {
                        origin: origin(
                            "isa_U",
                            vec![sub.to_string(), sup.to_string()],
                            obj(o),
                            t,
                            format!("{} plays {sub} but not {sup}", u.objects[o]),
                        ),
                        formula: implies(plays(sub, o, t), plays(sup, o, t)),
                    });
                }
            }
        }
        Constraint::RelTyping(r) => {
            let Some(decl) = schema.relationship(r) else { return };
            let roles = u.roles(r);
            for inst in u.instances(Subject::Relationship, &[r]) {
                let Inst::Tuple(args) = &inst else { continue };
                let named = u.describe(&inst, &roles);
                for t in u.times() {
                    let typed =
                        and(decl.roles.iter().zip(args).map(|(role, &o)| u.class_at(&role.player, o, t)));
                    out.push(Grounded {
                        origin: origin(
                            "rel-typing",
                            vec![r.clone()],
                            Some(named.clone()),
                            t,
                            format!("{named} in {r} has a participant outside its role's class"),
                        ),
                        formula: implies(u.rel_at(r, args, t), typed),
                    });
                }
            }
        }
        Constraint::AttExistence { class, attr } => {
            let vals = u.attr_values(attr).to_vec();
            for o in 0..n {
                for t in u.times() {
                    let some = or(vals.iter().map(|&v| u.attr_at(attr, o, v, t)));
                    out.push(Grounded {
                        origin: origin(
                            "att-typing",
                            vec![class.clone(), attr.clone()],
                            obj(o),
                            t,
                            format!("{} is in {class} without a value for {attr}", u.objects[o]),
                        ),
                        formula: implies(u.class_at(class, o, t), some),
                    });
                }
            }
        }
        Constraint::CardR { class, rel, role, card } => {
            let (Some(ri), Some(pos)) =
                (u.rel_id(rel), schema.relationship(rel).and_then(|d| d.role_index(role)))
            else {
                return;
            };
            let k = u.rels[ri].1.len();
            for o in 0..n {
                for t in u.times() {
                    let items: Vec<Formula> = tuples(n, k)
                        .into_iter()
                        .filter(|args| args[pos] == o)
                        .map(|args| u.rel_at(rel, &args, t))
                        .collect();
                    out.push(Grounded {
                        origin: origin(
                            "card_R",
                            vec![class.clone(), format!("{rel}.{role}")],
                            obj(o),
                            t,
                            format!(
                                "{} in {class} plays {rel}.{role} a number of times outside {card}",
                                u.objects[o]
                            ),
                        ),
                        formula: implies(u.class_at(class, o, t), card_formula(card, items)),
                    });
                }
            }
        }
        Constraint::CardA { class, attr, card } => {
            let vals = u.attr_values(attr).to_vec();
            for o in 0..n {
                for t in u.times() {
                    let items = vals.iter().map(|&v| u.attr_at(attr, o, v, t)).collect();
                    out.push(Grounded {
                        origin: origin(
                            "card_A",
                            vec![class.clone(), attr.clone()],
                            obj(o),
                            t,
                            format!(
                                "{} in {class} has a number of {attr} values outside {card}",
                                u.objects[o]
                            ),
                        ),
                        formula: implies(u.class_at(class, o, t), card_formula(card, items)),
                    });
                }
            }
        }
        Constraint::DisjC(members, sup) | Constraint::Cover(members, sup) => {
            let rule = if matches!(c, Constraint::DisjC(..)) { "disj_C" } else { "cover" };
            let mut elements: Vec<String> = members.iter().cloned().collect();
            elements.push(sup.clone());
            let ms: Vec<&String> = members.iter().collect();
            for o in 0..n {
                for t in u.times() {
                    let mk = |detail: String, formula| Grounded {
                        origin: origin(rule, elements.clone(), obj(o), t, detail),
                        formula,
                    };
                    for m in &ms {
                        out.push(mk(
                            format!("{} is in {m} but not in {sup}", u.objects[o]),
                            implies(u.class_at(m, o, t), u.class_at(sup, o, t)),
                        ));
                    }
                    if rule == "disj_C" {
                        for (i, a) in ms.iter().enumerate() {
                            for b in &ms[i + 1..] {
                                out.push(mk(
                                    format!("{} is in both {a} and {b}", u.objects[o]),
                                    not(and([u.class_at(a, o, t), u.class_at(b, o, t)])),
                                ));
                            }
                        }
                    } else {
                        out.push(mk(
                            format!("{} is in {sup} but in none of its covering classes", u.objects[o]),
                            implies(u.class_at(sup, o, t), or(ms.iter().map(|m| u.class_at(m, o, t)))),
                        ));
                    }
                }
            }
        }
        Constraint::DisjR(members, sup) => {
            let mut elements: Vec<String> = members.iter().cloned().collect();
            elements.push(sup.clone());
            let ms: Vec<&String> = members.iter().collect();
            let roles = u.roles(sup);
            for inst in u.instances(Subject::Relationship, &[sup]) {
                let named = u.describe(&inst, &roles);
                let m = |r: &str, t| u.member(Subject::Relationship, r, &inst, t);
                for t in u.times() {
                    let mk = |detail: String, formula| Grounded {
                        origin: origin("disj_R", elements.clone(), Some(named.clone()), t, detail),
                        formula,
                    };
                    for r in &ms {
                        out.push(mk(
                            format!("{named} is in {r} but not in {sup}"),
                            implies(m(r, t), m(sup, t)),
                        ));
                    }
                    for (i, a) in ms.iter().enumerate() {
                        for b in &ms[i + 1..] {
                            out.push(mk(
                                format!("{named} is in both {a} and {b}"),
                                not(and([m(a, t), m(b, t)])),
                            ));
                        }
                    }
                }
            }
        }
        Constraint::ClassTemporality(cl, temp) | Constraint::RelTemporality(cl, temp) => {
            let (subject, kind) = if matches!(c, Constraint::ClassTemporality(..)) {
                (Subject::Class, "class")
            } else {
                (Subject::Relationship, "rel")
            };
            let roles = u.roles(cl);
            for inst in u.instances(subject, &[cl]) {
                let named = u.describe(&inst, &roles);
                for t in u.times() {
                    out.push(temporality_grounding(u, subject, cl, &inst, named.clone(), t, *temp, kind, cl));
                }
            }
        }
        Constraint::AttrTemporality(a, temp) => {
            for inst in u.instances(Subject::Attribute, &[a]) {
                let named = u.describe(&inst, &[]);
                for t in u.times() {
                    out.push(temporality_grounding(
                        u,
                        Subject::Attribute,
                        a,
                        &inst,
                        named.clone(),
                        t,
                        *temp,
                        "attr",
                        a,
                    ));
                }
            }
        }
        Constraint::ClassAttrTemporality { class, attr, temporality } => {
            for inst in u.instances(Subject::Attribute, &[attr]) {
                let Inst::Pair(o, _) = inst else { continue };
                let named = u.describe(&inst, &[]);
                for t in u.times() {
                    let mut g = temporality_grounding(
                        u,
                        Subject::Attribute,
                        attr,
                        &inst,
                        named.clone(),
                        t,
                        *temporality,
                        "attr",
                        attr,
                    );
                    g.origin.rule = match temporality {
                        Temporality::Snapshot => "s-attr",
                        _ => "t-attr",
                    }
                    .to_string();
                    g.origin.elements = vec![class.clone(), attr.clone()];
                    g.formula = or([not(u.class_at(class, o, t)), g.formula]);
                    out.push(g);
                }
            }
        }
        Constraint::Id { class, attr } => {
            let vals = u.attr_values(attr).to_vec();
            for o in 0..n {
                for t in u.times() {
                    let always: Vec<Formula> =
                        vals.iter().map(|&v| and((0..h).map(|t2| u.attr_at(attr, o, v, t2)))).collect();
                    let exactly_one = and([at_least(1, always.clone()), at_most(1, always)]);
                    out.push(Grounded {
                        origin: origin(
                            "id",
                            vec![class.clone(), attr.clone()],
                            obj(o),
                            t,
                            format!("{} in {class} lacks exactly one permanent {attr} value", u.objects[o]),
                        ),
                        formula: implies(u.class_at(class, o, t), exactly_one),
                    });
                }
            }
            for &v in &vals {
                for t in u.times() {
                    let holders: Vec<Formula> =
                        (0..n).map(|o| and([u.class_at(class, o, t), u.attr_at(attr, o, v, t)])).collect();
                    out.push(Grounded {
                        origin: origin(
                            "id",
                            vec![class.clone(), attr.clone()],
                            Some(Instance::Value(u.values[v].1.clone())),
                            t,
                            format!("{attr} value {} identifies more than one {class}", u.values[v].1),
                        ),
                        formula: at_most(1, holders),
                    });
                }
            }
        }
        Constraint::Transition(tc) => ground_transition(u, tc, opts, out),
    }
}

#[allow(clippy::too_many_arguments)]
fn temporality_grounding(
    u: &Universe,
    subject: Subject,
    name: &str,
    inst: &Inst,
    named: Instance,
    t: i64,
    temp: Temporality,
    kind: &str,
    element: &str,
) -> Grounded {
    let h = i64::from(u.horizon);
    let m = |t2| u.member(subject, name, inst, t2);
    let (rule, formula, detail) = match temp {
        Temporality::Snapshot => (
            format!("snapshot-{kind}"),
            implies(m(t), and((0..h).map(m))),
            format!("{named} is in snapshot {element} at t={t} but not at every time point"),
        ),
        _ => (
            format!("temporal-{kind}"),
            implies(m(t), or((0..h).filter(|&t2| t2 != t).map(|t2| not(m(t2))))),
            format!("{named} is in temporal {element} at every time point"),
        ),
    };
    Grounded {
        origin: Origin {
            rule,
            elements: vec![element.to_string()],
            instance: Some(named),
            time: Some(t as u32),
            detail,
        },
        formula,
    }
}

/// Grounds every constraint of the schema.
pub fn ground_schema(schema: &Schema, u: &Universe, opts: &SemanticsOptions) -> Vec<Grounded> {
    let mut out = Vec::new();
    for c in schema_constraints(schema) {
        ground(&c, u, schema, opts, &mut out);
    }
    out
}
