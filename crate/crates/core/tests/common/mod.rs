//! Shared generators and an independent legality oracle for the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trend::model::{
    build_schema, Card, Declaration, Modality, RawAttr, RoleDecl, RoleRef, Schema, Subject, Temporality,
    Tense, TransitionConstraint, TransitionKind,
};
use trend::semantics::{
    check_state_with, mandatory_obligation_met, transition_holds, FutureWindow, Instance, PastTrigger,
    SemanticsOptions, TemporalState, TimeFlow, Tuple,
};

pub fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn fixture_schema(name: &str) -> Schema {
    trend::text::parse_schema(&fixture(name)).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn all_options() -> Vec<SemanticsOptions> {
    let mut out = Vec::new();
    for flow in [TimeFlow::Naturals, TimeFlow::Integers] {
        for future_window in [FutureWindow::Reflexive, FutureWindow::Strict] {
            for past_trigger in [PastTrigger::Target, PastTrigger::Source] {
                out.push(SemanticsOptions { flow, future_window, past_trigger });
            }
        }
    }
    out
}

const CLASS_NAMES: &[&str] =
    &["Person", "Student", "Course", "Room", "Flight", "Client", "Agent", "VIPCustomer"];
const ATTR_NAMES: &[&str] = &["age", "name", "code", "rank", "arrivalTime"];
const DOMAINS: &[&str] = &["Integer", "String", "Money"];
const REL_NAMES: &[&str] = &["books", "paysFor", "teaches", "worksFor"];
const ROLE_NAMES: &[&str] = &["customer", "flight", "agent", "item"];

fn temporality(r: &mut impl Rng) -> Temporality {
    *[Temporality::Mixed, Temporality::Mixed, Temporality::Snapshot, Temporality::Temporary]
        .choose(r)
        .unwrap()
}

fn markings(t: Temporality) -> Vec<Temporality> {
    if t == Temporality::Mixed {
        Vec::new()
    } else {
        vec![t]
    }
}

fn card(r: &mut impl Rng) -> Option<Card> {
    if r.gen_bool(0.7) {
        return None;
    }
    let min = r.gen_range(0..=1);
    let max = if r.gen_bool(0.3) { None } else { Some(min.max(1) + r.gen_range(0..=1)) };
    Some(Card::new(min, max))
}

fn pick<'a>(r: &mut impl Rng, xs: &'a [String]) -> &'a String {
    xs.choose(r).unwrap()
}

fn subset(r: &mut impl Rng, xs: &[String], exclude: &str, max: usize) -> Vec<String> {
    let mut pool: Vec<String> = xs.iter().filter(|x| *x != exclude).cloned().collect();
    pool.shuffle(r);
    let k = r.gen_range(1..=max.max(1)).min(pool.len());
    pool.truncate(k);
    pool
}

fn transition(
    r: &mut impl Rng,
    subject: Subject,
    source: &str,
    target: &str,
    any_tense: bool,
) -> TransitionConstraint {
    let kind = if subject == Subject::Attribute || r.gen_bool(0.5) {
        TransitionKind::Change
    } else {
        TransitionKind::Extension
    };
    let tense = if any_tense && r.gen_bool(0.35) { Tense::Past } else { Tense::Future };
    let modality = if r.gen_bool(0.5) { Modality::Mandatory } else { Modality::Optional };
    let mut tc = TransitionConstraint::new(subject, kind, tense, modality, source, target);
    if r.gen_bool(0.3) {
        tc = tc.with_offset(r.gen_range(1..=3));
    }
    if r.gen_bool(0.2) {
        tc = tc.persistent();
    }
    tc
}

/// Declarations of a random schema with at most 4 classes, 2
/// relationships and 6 transition constraints. Some may be invalid;
/// [`random_schema`] filters them.
pub fn random_declarations(r: &mut impl Rng) -> Vec<Declaration> {
    let mut out = Vec::new();
    let mut names: Vec<&str> = CLASS_NAMES.to_vec();
    names.shuffle(r);
    let classes: Vec<String> = names[..r.gen_range(1..=4)].iter().map(|s| s.to_string()).collect();
    let mut attrs: Vec<String> = Vec::new();
    let mut frozen = false;

    for c in &classes {
        let mut raw = Vec::new();
        let mut an: Vec<&str> = ATTR_NAMES.to_vec();
        an.shuffle(r);
        let mut has_id = false;
        for a in &an[..r.gen_range(0..=2)] {
            let mut ra = RawAttr::new(*a, *DOMAINS.choose(r).unwrap());
            ra.markings = markings(temporality(r));
            if !has_id && r.gen_bool(0.15) {
                ra.markings = vec![Temporality::Snapshot];
                ra.identifier = true;
                has_id = true;
            }
            ra.frozen = !frozen && r.gen_bool(0.15);
            frozen |= ra.frozen;
            ra.card = card(r);
            attrs.push(format!("{c}.{a}"));
            raw.push(ra);
        }
        out.push(Declaration::Class { name: c.clone(), markings: markings(temporality(r)), attributes: raw });
    }

    let mut rels: Vec<(String, Vec<String>)> = Vec::new();
    let mut rn: Vec<&str> = REL_NAMES.to_vec();
    rn.shuffle(r);
    for name in &rn[..r.gen_range(0..=2)] {
        let roles: Vec<String> = match rels.first() {
            Some((_, rs)) if r.gen_bool(0.5) => rs.clone(),
            _ => {
                let mut pool: Vec<&str> = ROLE_NAMES.to_vec();
                pool.shuffle(r);
                let k = if r.gen_bool(0.8) { 2 } else { 3 };
                pool[..k].iter().map(|s| s.to_string()).collect()
            }
        };
        let decls = roles
            .iter()
            .map(|u| RoleDecl { name: u.clone(), player: pick(r, &classes).clone(), card: card(r) })
            .collect();
        out.push(Declaration::Relationship {
            name: name.to_string(),
            markings: markings(temporality(r)),
            roles: decls,
        });
        rels.push((name.to_string(), roles));
    }

    for _ in 0..r.gen_range(0..=3) {
        if classes.len() > 1 {
            let a = pick(r, &classes).clone();
            let b = pick(r, &classes).clone();
            if a != b {
                out.push(Declaration::IsaClass { sub: a, sup: b });
            }
        }
    }
    if classes.len() > 2 && r.gen_bool(0.3) {
        let sup = pick(r, &classes).clone();
        let members = subset(r, &classes, &sup, 3);
        out.push(if r.gen_bool(0.5) {
            Declaration::DisjointClasses { members, sup }
        } else {
            Declaration::Cover { members, sup }
        });
    }
    let compatible: Vec<(String, String)> = rels
        .iter()
        .flat_map(|(a, ra)| {
            rels.iter().filter(move |(b, rb)| a != b && ra == rb).map(move |(b, _)| (a.clone(), b.clone()))
        })
        .collect();
    if let Some((a, b)) = compatible.choose(r) {
        if r.gen_bool(0.5) {
            out.push(Declaration::IsaRelationship { sub: a.clone(), sup: b.clone() });
        } else if r.gen_bool(0.5) {
            out.push(Declaration::DisjointRelationships { members: vec![a.clone()], sup: b.clone() });
        }
    }
    if rels.len() > 1 && r.gen_bool(0.3) {
        let (ra, rsa) = rels.choose(r).unwrap();
        let (rb, rsb) = rels.choose(r).unwrap();
        if ra != rb {
            out.push(Declaration::IsaRole {
                sub: RoleRef::new(ra.clone(), pick(r, rsa).clone()),
                sup: RoleRef::new(rb.clone(), pick(r, rsb).clone()),
            });
        }
    }

    for _ in 0..r.gen_range(0..=3) {
        if classes.len() > 1 {
            let a = pick(r, &classes).clone();
            let b = pick(r, &classes).clone();
            if a != b {
                out.push(Declaration::Transition(transition(r, Subject::Class, &a, &b, true)));
            }
        }
    }
    if let Some((a, b)) = compatible.choose(r) {
        if r.gen_bool(0.5) {
            out.push(Declaration::Transition(transition(r, Subject::Relationship, a, b, true)));
        }
    }
    if attrs.len() > 1 && r.gen_bool(0.4) {
        let a = pick(r, &attrs).clone();
        let b = pick(r, &attrs).clone();
        if a != b {
            out.push(Declaration::Transition(transition(r, Subject::Attribute, &a, &b, false)));
        }
    }
    if r.gen_bool(0.3) {
        out.push(Declaration::Chronon(["days", "years", "hours"].choose(r).unwrap().to_string()));
    }
    out
}

/// A random valid schema: invalid declarations are dropped until the rest
/// builds.
pub fn random_schema(r: &mut impl Rng) -> Schema {
    let mut decls = random_declarations(r);
    loop {
        match build_schema(&decls) {
            Ok(s) => return s,
            Err(errs) => {
                let bad: BTreeSet<usize> = errs.iter().map(|e| e.index).collect();
                decls =
                    decls.into_iter().enumerate().filter(|(i, _)| !bad.contains(i)).map(|(_, d)| d).collect();
            }
        }
    }
}

pub fn random_schema_seeded(seed: u64) -> Schema {
    random_schema(&mut rng(seed))
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// A random, usually illegal, state over at most 3 objects and 4 time
/// points.
pub fn random_state(schema: &Schema, r: &mut impl Rng) -> TemporalState {
    let n = r.gen_range(1..=3);
    let h = r.gen_range(1..=4);
    let p = *[0.1, 0.3, 0.6].choose(r).unwrap();
    let objs: Vec<String> = (1..=n).map(|i| format!("o{i}")).collect();
    let mut s = TemporalState::new(h);
    for o in &objs {
        s.add_object(o.clone());
    }
    for d in schema.domains() {
        for i in 1..=r.gen_range(1..=2) {
            s.add_value(d.clone(), format!("v{i}"));
        }
    }
    for c in schema.classes().keys() {
        for t in 0..h {
            for o in &objs {
                if r.gen_bool(p) {
                    s.put_class(c, t, o);
                }
            }
        }
    }
    for rel in schema.relationships().values() {
        let roles: Vec<&str> = rel.role_names().collect();
        for t in 0..h {
            for args in tuples(n, roles.len()) {
                if r.gen_bool(p / 2.0) {
                    let tuple: Vec<(&str, &str)> =
                        roles.iter().zip(&args).map(|(u, &i)| (*u, objs[i].as_str())).collect();
                    s.put_rel(&rel.name, t, &tuple);
                }
            }
        }
    }
    for (q, _, a) in schema.attributes() {
        let vals: Vec<String> = s.domains[&a.domain].iter().cloned().collect();
        for t in 0..h {
            for o in &objs {
                for v in &vals {
                    if r.gen_bool(p) {
                        s.put_attr(&q, t, o, v);
                    }
                }
            }
        }
    }
    s.normalize();
    s
}

/// A copy of `state` with one membership fact flipped.
pub fn perturb(schema: &Schema, state: &TemporalState, r: &mut impl Rng) -> TemporalState {
    let mut s = state.clone();
    let objs: Vec<String> = s.objects.iter().cloned().collect();
    if objs.is_empty() {
        return s;
    }
    let t = r.gen_range(0..s.horizon);
    let o = pick(r, &objs).clone();
    let classes: Vec<String> = schema.classes().keys().cloned().collect();
    let c = pick(r, &classes).clone();
    let set = s.classes.entry(c).or_default().entry(t).or_default();
    if !set.remove(&o) {
        set.insert(o);
    }
    s.normalize();
    s
}

/// Violations as comparable keys: rule, elements and time point.
pub type Key = (String, Vec<String>, Option<u32>);

pub fn engine_keys(schema: &Schema, state: &TemporalState, opts: &SemanticsOptions) -> BTreeSet<Key> {
    check_state_with(schema, state, opts)
        .expect("state is well formed")
        .into_iter()
        .map(|v| (v.rule, v.elements, v.time))
        .collect()
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Obj(String),
    Tuple(Tuple),
    Pair(String, String, String),
}

/// Direct reading of the legality conditions over a state's sets, written
/// without the grounding engine.
pub struct Oracle<'a> {
    schema: &'a Schema,
    s: &'a TemporalState,
    opts: SemanticsOptions,
    h: i64,
    out: BTreeSet<Key>,
}

impl<'a> Oracle<'a> {
    pub fn violations(schema: &'a Schema, s: &'a TemporalState, opts: &SemanticsOptions) -> BTreeSet<Key> {
        let mut o = Oracle { schema, s, opts: *opts, h: i64::from(s.horizon), out: BTreeSet::new() };
        o.run();
        o.out
    }

    fn times(&self) -> std::ops::Range<i64> {
        0..self.h
    }

    fn objects(&self) -> Vec<String> {
        self.s.objects.iter().cloned().collect()
    }

    fn report(&mut self, rule: &str, elements: Vec<String>, t: i64) {
        self.out.insert((rule.to_string(), elements, Some(t as u32)));
    }

    fn ok(&self, t: i64) -> Option<u32> {
        (t >= 0 && t < self.h).then_some(t as u32)
    }

    fn in_class(&self, c: &str, o: &str, t: i64) -> bool {
        self.ok(t).is_some_and(|t| self.s.in_class(c, t, o))
    }

    fn in_rel(&self, r: &str, tuple: &Tuple, t: i64) -> bool {
        self.ok(t).is_some_and(|t| self.s.in_rel(r, t, tuple))
    }

    fn domain_of(&self, attr: &str) -> String {
        self.schema.attribute(attr).unwrap().1.domain.clone()
    }

    fn has(&self, attr: &str, o: &str, d: &str, v: &str, t: i64) -> bool {
        self.domain_of(attr) == d && self.ok(t).is_some_and(|t| self.s.has_attr(attr, t, o, v))
    }

    fn values(&self, attr: &str) -> Vec<String> {
        self.s.domains.get(&self.domain_of(attr)).map(|v| v.iter().cloned().collect()).unwrap_or_default()
    }

    fn rel_tuples(&self, r: &str) -> Vec<Tuple> {
        let roles: Vec<String> =
            self.schema.relationship(r).unwrap().role_names().map(String::from).collect();
        let objs = self.objects();
        tuples(objs.len(), roles.len())
            .into_iter()
            .map(|args| roles.iter().cloned().zip(args.into_iter().map(|i| objs[i].clone())).collect())
            .collect()
    }

    fn rel_at(&self, r: &str, t: i64) -> Vec<Tuple> {
        self.ok(t)
            .and_then(|t| self.s.relationships.get(r).and_then(|tl| tl.get(&t)))
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default()
    }

    fn plays(&self, rr: &RoleRef, o: &str, t: i64) -> bool {
        self.rel_at(&rr.relationship, t).iter().any(|tu| tu.get(&rr.role).map(String::as_str) == Some(o))
    }

    fn items(&self, subject: Subject, names: &[&str]) -> Vec<Item> {
        match subject {
            Subject::Class => self.objects().into_iter().map(Item::Obj).collect(),
            Subject::Relationship => self.rel_tuples(names[0]).into_iter().map(Item::Tuple).collect(),
            Subject::Attribute => {
                let mut vals = BTreeSet::new();
                for a in names {
                    let d = self.domain_of(a);
                    for v in self.values(a) {
                        vals.insert((d.clone(), v));
                    }
                }
                self.objects()
                    .into_iter()
                    .flat_map(|o| vals.iter().map(move |(d, v)| Item::Pair(o.clone(), d.clone(), v.clone())))
                    .collect()
            }
        }
    }

    fn member(&self, name: &str, item: &Item, t: i64) -> bool {
        match item {
            Item::Obj(o) => self.in_class(name, o, t),
            Item::Tuple(tu) => self.in_rel(name, tu, t),
            Item::Pair(o, d, v) => self.has(name, o, d, v, t),
        }
    }

    fn temporality(
        &mut self,
        subject: Subject,
        name: &str,
        temp: Temporality,
        kind: &str,
        guard: Option<&str>,
    ) {
        if temp == Temporality::Mixed {
            return;
        }
        let snap = temp == Temporality::Snapshot;
        let rule = match (guard, snap) {
            (Some(_), true) => "s-attr".to_string(),
            (Some(_), false) => "t-attr".to_string(),
            (None, true) => format!("snapshot-{kind}"),
            (None, false) => format!("temporal-{kind}"),
        };
        let elements = match guard {
            Some(c) => vec![c.to_string(), name.to_string()],
            None => vec![name.to_string()],
        };
        for item in self.items(subject, &[name]) {
            for t in self.times() {
                if let (Some(c), Item::Pair(o, ..)) = (guard, &item) {
                    if !self.in_class(c, o, t) {
                        continue;
                    }
                }
                if !self.member(name, &item, t) {
                    continue;
                }
                let bad = if snap {
                    self.times().any(|t2| !self.member(name, &item, t2))
                } else {
                    self.times().all(|t2| t2 == t || self.member(name, &item, t2))
                };
                if bad {
                    self.report(&rule, elements.clone(), t);
                }
            }
        }
    }

    fn fut(&self, tc: &TransitionConstraint, item: &Item, t: i64) -> bool {
        let n = i64::from(tc.offset.unwrap_or(1));
        let (s, g) = (tc.source.as_str(), tc.target.as_deref().unwrap());
        if !(self.member(s, item, t) && !self.member(g, item, t)) || t + n >= self.h {
            return false;
        }
        self.member(g, item, t + n) && (tc.kind != TransitionKind::Change || !self.member(s, item, t + n))
    }

    fn transition(&mut self, tc: &TransitionConstraint) {
        let names = tc.endpoints();
        let elements: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let label = tc.label();
        for item in self.items(tc.subject, &names) {
            for t in self.times() {
                if tc.kind == TransitionKind::Frozen {
                    if self.member(&tc.source, &item, t)
                        && (t + 1..self.h).any(|t2| !self.member(&tc.source, &item, t2))
                    {
                        self.report(&label, elements.clone(), t);
                    }
                    continue;
                }
                let target = tc.target.as_deref().unwrap();
                if tc.modality == Modality::Mandatory {
                    let met = match tc.tense {
                        Tense::Future => {
                            let first = match self.opts.future_window {
                                FutureWindow::Reflexive => t,
                                FutureWindow::Strict => t + 1,
                            };
                            !self.member(&tc.source, &item, t)
                                || (first..self.h).any(|t2| self.fut(tc, &item, t2))
                        }
                        Tense::Past => {
                            let trig = match self.opts.past_trigger {
                                PastTrigger::Target => target,
                                PastTrigger::Source => tc.source.as_str(),
                            };
                            !self.member(trig, &item, t) || (0..t).any(|t2| self.fut(tc, &item, t2))
                        }
                    };
                    if !met {
                        self.report(&label, elements.clone(), t);
                    }
                }
                if tc.persistent
                    && self.fut(tc, &item, t)
                    && (t + 1..self.h).any(|t2| !self.member(target, &item, t2))
                {
                    self.report(&label, elements.clone(), t);
                }
            }
        }
    }

    fn run(&mut self) {
        let schema = self.schema;
        let objs = self.objects();
        for (a, b) in schema.isa_c() {
            for t in self.times() {
                if objs.iter().any(|o| self.in_class(a, o, t) && !self.in_class(b, o, t)) {
                    self.report("isa_C", vec![a.clone(), b.clone()], t);
                }
            }
        }
        for (a, b) in schema.isa_r() {
            for t in self.times() {
                if self.rel_at(a, t).iter().any(|tu| !self.in_rel(b, tu, t)) {
                    self.report("isa_R", vec![a.clone(), b.clone()], t);
                }
            }
        }
        for (a, b) in schema.isa_u() {
            for t in self.times() {
                if objs.iter().any(|o| self.plays(a, o, t) && !self.plays(b, o, t)) {
                    self.report("isa_U", vec![a.to_string(), b.to_string()], t);
                }
            }
        }
        for r in schema.relationships().values() {
            for t in self.times() {
                let bad = self
                    .rel_at(&r.name, t)
                    .iter()
                    .any(|tu| r.roles.iter().any(|u| !self.in_class(&u.player, &tu[&u.name], t)));
                if bad {
                    self.report("rel-typing", vec![r.name.clone()], t);
                }
            }
            for u in &r.roles {
                let Some(card) = u.card else { continue };
                for t in self.times() {
                    let bad = objs.iter().any(|o| {
                        self.in_class(&u.player, o, t)
                            && !card
                                .admits(self.rel_at(&r.name, t).iter().filter(|tu| tu[&u.name] == *o).count())
                    });
                    if bad {
                        self.report("card_R", vec![u.player.clone(), format!("{}.{}", r.name, u.name)], t);
                    }
                }
            }
        }
        for (q, c, a) in schema.attributes() {
            let d = a.domain.clone();
            let vals = self.values(&q);
            let count = |me: &Self, o: &str, t: i64| vals.iter().filter(|v| me.has(&q, o, &d, v, t)).count();
            for t in self.times() {
                let members: Vec<&String> = objs.iter().filter(|o| self.in_class(&c.name, o, t)).collect();
                if members.iter().any(|o| count(self, o, t) == 0) {
                    self.report("att-typing", vec![c.name.clone(), q.clone()], t);
                }
                if let Some(card) = a.card {
                    if members.iter().any(|o| !card.admits(count(self, o, t))) {
                        self.report("card_A", vec![c.name.clone(), q.clone()], t);
                    }
                }
                if a.identifier {
                    let permanent = |o: &str| {
                        vals.iter().filter(|v| self.times().all(|t2| self.has(&q, o, &d, v, t2))).count()
                    };
                    let shared =
                        vals.iter().any(|v| members.iter().filter(|o| self.has(&q, o, &d, v, t)).count() > 1);
                    if shared || members.iter().any(|o| permanent(o) != 1) {
                        self.report("id", vec![c.name.clone(), q.clone()], t);
                    }
                }
            }
        }
        let groups = [
            ("disj_C", schema.disj_c(), false),
            ("cover", schema.cover(), false),
            ("disj_R", schema.disj_r(), true),
        ];
        for (rule, set, rels) in groups {
            for (members, sup) in set {
                let mut elements: Vec<String> = members.iter().cloned().collect();
                elements.push(sup.clone());
                let items = if rels {
                    self.items(Subject::Relationship, &[sup])
                } else {
                    self.items(Subject::Class, &[])
                };
                for t in self.times() {
                    let bad = items.iter().any(|it| {
                        let ins: Vec<bool> = members.iter().map(|m| self.member(m, it, t)).collect();
                        let inside = self.member(sup, it, t);
                        let k = ins.iter().filter(|b| **b).count();
                        (k > 0 && !inside)
                            || (rule != "cover" && k > 1)
                            || (rule == "cover" && inside && k == 0)
                    });
                    if bad {
                        self.report(rule, elements.clone(), t);
                    }
                }
            }
        }
        for c in schema.classes().values() {
            self.temporality(Subject::Class, &c.name, c.temporality, "class", None);
        }
        for r in schema.relationships().values() {
            self.temporality(Subject::Relationship, &r.name, r.temporality, "rel", None);
        }
        for (q, c, a) in schema.attributes() {
            self.temporality(Subject::Attribute, &q, a.temporality, "attr", Some(&c.name));
            self.temporality(Subject::Attribute, &q, a.temporality, "attr", None);
        }
        for tc in schema.transitions() {
            self.transition(tc);
        }
    }
}

pub fn oracle_keys(schema: &Schema, state: &TemporalState, opts: &SemanticsOptions) -> BTreeSet<Key> {
    Oracle::violations(schema, state, opts)
}

/// Legal states of a schema found by the reasoner, one per satisfiable
/// element.
pub fn witnesses(schema: &Schema, opts: &SemanticsOptions) -> Vec<TemporalState> {
    let bounds = trend::reason::Bounds { max_objects: 2, max_horizon: 3, max_values: 1 };
    let mut names: Vec<String> = schema.classes().keys().cloned().collect();
    names.extend(schema.relationships().keys().cloned());
    names
        .into_iter()
        .filter_map(|e| trend::reason::satisfiable(schema, &e, bounds, opts).ok())
        .filter_map(|a| a.verdict.witness().cloned())
        .collect()
}

/// The schema with every unquantified transition given an explicit offset
/// of 1; `None` when there is no such transition.
pub fn quantified_once(
    schema: &Schema,
) -> Option<(Schema, Vec<(TransitionConstraint, TransitionConstraint)>)> {
    let mut pairs = Vec::new();
    let decls: Vec<Declaration> = schema
        .declarations()
        .into_iter()
        .map(|d| match d {
            Declaration::Transition(tc) if tc.offset.is_none() && tc.kind != TransitionKind::Frozen => {
                let q = tc.clone().with_offset(1);
                pairs.push((tc, q.clone()));
                Declaration::Transition(q)
            }
            d => d,
        })
        .collect();
    if pairs.is_empty() {
        return None;
    }
    Some((build_schema(&decls).expect("offset 1 is valid"), pairs))
}

/// Every instance a transition's subject may hold in `state`.
pub fn transition_instances(
    schema: &Schema,
    state: &TemporalState,
    tc: &TransitionConstraint,
) -> Vec<Instance> {
    let objs: Vec<String> = state.objects.iter().cloned().collect();
    match tc.subject {
        Subject::Class => objs.into_iter().map(Instance::Object).collect(),
        Subject::Relationship => {
            let roles: Vec<String> =
                schema.relationship(&tc.source).unwrap().role_names().map(String::from).collect();
            tuples(objs.len(), roles.len())
                .into_iter()
                .map(|args| {
                    Instance::Tuple(
                        roles.iter().cloned().zip(args.into_iter().map(|i| objs[i].clone())).collect(),
                    )
                })
                .collect()
        }
        Subject::Attribute => {
            let mut vals = BTreeSet::new();
            for a in tc.endpoints() {
                let d = &schema.attribute(a).unwrap().1.domain;
                vals.extend(state.domains.get(d).into_iter().flatten().cloned());
            }
            objs.iter().flat_map(|o| vals.iter().map(move |v| Instance::Pair(o.clone(), v.clone()))).collect()
        }
    }
}

/// Whether the offset-1 variant of `schema` judges `state` exactly as the
/// unquantified schema does: same violations (up to the rule label) and
/// the same transition conditions and obligations everywhere.
pub fn quantified_once_agrees(
    schema: &Schema,
    q: &Schema,
    pairs: &[(TransitionConstraint, TransitionConstraint)],
    state: &TemporalState,
) -> bool {
    for opts in all_options() {
        let strip = |s: &Schema| -> BTreeSet<(Vec<String>, Option<u32>, Option<String>)> {
            check_state_with(s, state, &opts)
                .unwrap()
                .into_iter()
                .map(|v| (v.elements, v.time, v.instance.map(|i| i.to_string())))
                .collect()
        };
        if strip(schema) != strip(q) {
            return false;
        }
        for (a, b) in pairs {
            for inst in transition_instances(schema, state, a) {
                for t in 0..state.horizon {
                    let x = transition_holds(schema, state, a, &inst, t, &opts).unwrap();
                    let y = transition_holds(q, state, b, &inst, t, &opts).unwrap();
                    if x != y {
                        return false;
                    }
                    if a.modality == Modality::Mandatory {
                        let x = mandatory_obligation_met(schema, state, a, &inst, t, &opts).unwrap();
                        let y = mandatory_obligation_met(q, state, b, &inst, t, &opts).unwrap();
                        if x != y {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Whether printing with DEV/DEX keywords and re-parsing gives the schema
/// of the CHG/EXT round trip, with byte-identical state-check output.
pub fn labels_invariant(schema: &Schema, state: &TemporalState) -> bool {
    use trend::text::{parse_schema, serialize_with, KeywordStyle};
    let dev = parse_schema(&serialize_with(schema, KeywordStyle::DevDex)).unwrap();
    let chg = parse_schema(&serialize_with(schema, KeywordStyle::ChgExt)).unwrap();
    let render = |s: &Schema| {
        serde_json::to_string(&check_state_with(s, state, &SemanticsOptions::default()).unwrap()).unwrap()
    };
    dev == chg && render(&dev) == render(&chg)
}
