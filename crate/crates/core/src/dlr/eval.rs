use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::Schema;
use crate::semantics::{StateError, TemporalState, TimeFlow};

use super::expr::{Cmp, Dir, Expr, Sort, TOp};
use super::translate::{Axiom, DlrKb};

/// One element of an extension: `[o]` for objects, `[v]` for values, the
/// objects of a tuple in role order, or `[o, v]` for attribute pairs.
pub type Elem = Vec<String>;

/// An extension per time point.
pub type Ext = Vec<BTreeSet<Elem>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlrError {
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("arity mismatch in {0}")]
    ArityMismatch(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// What the elements of an expression are.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Objects,
    Values,
    Tuples(usize),
    Pairs,
}

/// Value elements carry their domain so that equal literals of different
/// domains stay apart.
fn value_elem(domain: &str, v: &str) -> String {
    format!("{domain}:{v}")
}

/// A finite temporal interpretation read off a database state.
#[derive(Debug, Clone)]
pub struct Interp {
    pub horizon: u32,
    pub flow: TimeFlow,
    objects: BTreeSet<Elem>,
    values: BTreeMap<String, BTreeSet<Elem>>,
    names: BTreeMap<String, (Kind, Ext)>,
}

impl Interp {
    pub fn from_state(schema: &Schema, state: &TemporalState) -> Result<Self, DlrError> {
        state.validate(schema)?;
        let h = state.horizon as usize;
        let empty = || vec![BTreeSet::new(); h];
        let mut names = BTreeMap::new();
        for c in schema.classes().keys() {
            let mut ext = empty();
            for (t, s) in ext.iter_mut().enumerate() {
                s.extend(state.class_at(c, t as u32).into_iter().map(|o| vec![o]));
            }
            names.insert(c.clone(), (Kind::Objects, ext));
        }
        for r in schema.relationships().values() {
            let mut ext = empty();
            for (t, s) in ext.iter_mut().enumerate() {
                for tuple in state.rel_at(&r.name, t as u32) {
                    let elem: Option<Elem> = r.roles.iter().map(|u| tuple.get(&u.name).cloned()).collect();
                    s.extend(elem);
                }
            }
            names.insert(r.name.clone(), (Kind::Tuples(r.arity()), ext));
        }
        for (q, _, a) in schema.attributes() {
            let mut ext = empty();
            for (t, s) in ext.iter_mut().enumerate() {
                s.extend(
                    state.attr_at(&q, t as u32).into_iter().map(|(o, v)| vec![o, value_elem(&a.domain, &v)]),
                );
            }
            names.insert(q, (Kind::Pairs, ext));
        }
        let values = state
            .domains
            .iter()
            .map(|(d, vs)| (d.clone(), vs.iter().map(|v| vec![value_elem(d, v)]).collect()))
            .collect();
        Ok(Interp {
            horizon: state.horizon,
            flow: TimeFlow::Naturals,
            objects: state.objects.iter().map(|o| vec![o.clone()]).collect(),
            values,
            names,
        })
    }

    fn all_values(&self) -> BTreeSet<Elem> {
        self.values.values().flatten().cloned().collect()
    }

    fn top(&self, kind: Kind) -> BTreeSet<Elem> {
        match kind {
            Kind::Objects => self.objects.clone(),
            Kind::Values => self.all_values(),
            Kind::Tuples(n) => {
                let objs: Vec<&String> = self.objects.iter().map(|o| &o[0]).collect();
                let mut out: Vec<Elem> = vec![Vec::new()];
                for _ in 0..n {
                    out = out
                        .into_iter()
                        .flat_map(|p| {
                            objs.iter().map(move |o| {
                                let mut v = p.clone();
                                v.push((*o).clone());
                                v
                            })
                        })
                        .collect();
                }
                out.into_iter().collect()
            }
            Kind::Pairs => {
                let vals = self.all_values();
                self.objects
                    .iter()
                    .flat_map(|o| vals.iter().map(move |v| vec![o[0].clone(), v[0].clone()]))
                    .collect()
            }
        }
    }

    fn constant(&self, s: BTreeSet<Elem>) -> Ext {
        vec![s; self.horizon as usize]
    }

    fn kind(&self, e: &Expr, kb: &DlrKb) -> Result<Kind, DlrError> {
        Ok(match e {
            Expr::Top(Sort::Concept) | Expr::Bottom(Sort::Concept) => Kind::Objects,
            Expr::Top(Sort::Relation(n)) | Expr::Bottom(Sort::Relation(n)) => Kind::Tuples(*n),
            Expr::Top(Sort::Attribute) | Expr::Bottom(Sort::Attribute) => Kind::Pairs,
            Expr::TopD | Expr::Domain(_) => Kind::Values,
            Expr::Name(n) => match (self.names.get(n), kb.definitions.get(n)) {
                (Some((k, _)), _) => *k,
                (None, Some(d)) => match d.sort {
                    Sort::Concept => Kind::Objects,
                    Sort::Relation(n) => Kind::Tuples(n),
                    Sort::Attribute => Kind::Pairs,
                },
                _ => return Err(DlrError::UnknownName(n.clone())),
            },
            Expr::RelCount { .. } => Kind::Objects,
            Expr::AttrCount { dir: Dir::From, .. } => Kind::Objects,
            Expr::AttrCount { dir: Dir::To, .. } => Kind::Values,
            Expr::Select { arity, .. } => Kind::Tuples(*arity),
            Expr::AttrSelect { .. } => Kind::Pairs,
            Expr::And(v) | Expr::Or(v) => match v.first() {
                Some(e) => self.kind(e, kb)?,
                None => Kind::Objects,
            },
            Expr::Not(e) | Expr::Temporal(_, e) | Expr::Until(e, _) | Expr::Since(e, _) => {
                self.kind(e, kb)?
            }
        })
    }

    /// Extension of `e` at every time point.
    pub fn eval(&self, e: &Expr, kb: &DlrKb) -> Result<Ext, DlrError> {
        let h = self.horizon as usize;
        Ok(match e {
            Expr::Top(_) => self.constant(self.top(self.kind(e, kb)?)),
            Expr::Bottom(_) => self.constant(BTreeSet::new()),
            Expr::TopD => self.constant(self.all_values()),
            Expr::Domain(d) => self.constant(self.values.get(d).cloned().unwrap_or_default()),
            Expr::Name(n) => match self.names.get(n) {
                Some((_, ext)) => ext.clone(),
                None => {
                    let def = kb.definitions.get(n).ok_or_else(|| DlrError::UnknownName(n.clone()))?;
                    self.eval(&def.body, kb)?
                }
            },
            Expr::Not(inner) => {
                let top = self.top(self.kind(inner, kb)?);
                self.eval(inner, kb)?.into_iter().map(|s| top.difference(&s).cloned().collect()).collect()
            }
            Expr::And(items) | Expr::Or(items) => {
                let is_and = matches!(e, Expr::And(_));
                if items.is_empty() {
                    return Ok(if is_and {
                        self.constant(self.top(Kind::Objects))
                    } else {
                        self.constant(BTreeSet::new())
                    });
                }
                let kind = self.kind(&items[0], kb)?;
                let mut acc = self.eval(&items[0], kb)?;
                for it in &items[1..] {
                    if self.kind(it, kb)? != kind {
                        return Err(DlrError::ArityMismatch(e.to_string()));
                    }
                    let x = self.eval(it, kb)?;
                    for (a, b) in acc.iter_mut().zip(x) {
                        *a = if is_and {
                            a.intersection(&b).cloned().collect()
                        } else {
                            a.union(&b).cloned().collect()
                        };
                    }
                }
                acc
            }
            Expr::RelCount { cmp, k, index, rel, .. } => {
                let Kind::Tuples(n) = self.kind(rel, kb)? else {
                    return Err(DlrError::ArityMismatch(e.to_string()));
                };
                if *index >= n {
                    return Err(DlrError::ArityMismatch(e.to_string()));
                }
                let ext = self.eval(rel, kb)?;
                ext.iter()
                    .map(|s| {
                        let mut count: BTreeMap<&String, u32> = BTreeMap::new();
                        for tup in s {
                            *count.entry(&tup[*index]).or_default() += 1;
                        }
                        self.objects
                            .iter()
                            .filter(|o| admits(*cmp, *k, count.get(&o[0]).copied().unwrap_or(0)))
                            .cloned()
                            .collect()
                    })
                    .collect()
            }
            Expr::AttrCount { cmp, k, dir, attr } => {
                if self.kind(attr, kb)? != Kind::Pairs {
                    return Err(DlrError::ArityMismatch(e.to_string()));
                }
                let ix = usize::from(*dir == Dir::To);
                let pool = if *dir == Dir::From { self.objects.clone() } else { self.all_values() };
                self.eval(attr, kb)?
                    .iter()
                    .map(|s| {
                        let mut count: BTreeMap<&String, u32> = BTreeMap::new();
                        for p in s {
                            *count.entry(&p[ix]).or_default() += 1;
                        }
                        pool.iter()
                            .filter(|x| admits(*cmp, *k, count.get(&x[0]).copied().unwrap_or(0)))
                            .cloned()
                            .collect()
                    })
                    .collect()
            }
            Expr::Select { index, arity, concept, .. } => {
                if index >= arity {
                    return Err(DlrError::ArityMismatch(e.to_string()));
                }
                let c = self.eval(concept, kb)?;
                let top = self.top(Kind::Tuples(*arity));
                c.iter()
                    .map(|s| {
                        top.iter().filter(|tup| s.contains(&vec![tup[*index].clone()])).cloned().collect()
                    })
                    .collect()
            }
            Expr::AttrSelect { dir, concept } => {
                let c = self.eval(concept, kb)?;
                let top = self.top(Kind::Pairs);
                let ix = usize::from(*dir == Dir::To);
                c.iter()
                    .map(|s| top.iter().filter(|p| s.contains(&vec![p[ix].clone()])).cloned().collect())
                    .collect()
            }
            Expr::Temporal(op, inner) => {
                let x = self.eval(inner, kb)?;
                let top = self.top(self.kind(inner, kb)?);
                let union = |r: std::ops::Range<usize>| -> BTreeSet<Elem> {
                    r.flat_map(|t| x[t].iter().cloned()).collect()
                };
                let inter = |r: std::ops::Range<usize>| -> BTreeSet<Elem> {
                    r.fold(top.clone(), |acc, t| acc.intersection(&x[t]).cloned().collect())
                };
                (0..h)
                    .map(|t| match op {
                        TOp::Next => x.get(t + 1).cloned().unwrap_or_default(),
                        TOp::Prev => match (t, self.flow) {
                            (0, TimeFlow::Naturals) => BTreeSet::new(),
                            (0, TimeFlow::Integers) => top.clone(),
                            _ => x[t - 1].clone(),
                        },
                        TOp::Future => union(t + 1..h),
                        TOp::Past => union(0..t),
                        TOp::AlwaysFuture => inter(t + 1..h),
                        TOp::AlwaysPast => inter(0..t),
                        TOp::Sometime => union(0..h),
                        TOp::Always => inter(0..h),
                    })
                    .collect()
            }
            Expr::Until(a, b) | Expr::Since(a, b) => {
                let (xa, xb) = (self.eval(a, kb)?, self.eval(b, kb)?);
                let until = matches!(e, Expr::Until(..));
                (0..h)
                    .map(|t| {
                        let mut out = BTreeSet::new();
                        let later: Vec<usize> =
                            if until { (t + 1..h).collect() } else { (0..t).rev().collect() };
                        let mut hold: Option<BTreeSet<Elem>> = None;
                        for t2 in later {
                            let guard = hold.clone();
                            out.extend(
                                xb[t2]
                                    .iter()
                                    .filter(|x| guard.as_ref().is_none_or(|g| g.contains(*x)))
                                    .cloned(),
                            );
                            hold = Some(match hold {
                                None => xa[t2].clone(),
                                Some(g) => g.intersection(&xa[t2]).cloned().collect(),
                            });
                        }
                        out
                    })
                    .collect()
            }
        })
    }
}

fn admits(cmp: Cmp, k: u32, n: u32) -> bool {
    match cmp {
        Cmp::AtLeast => n >= k,
        Cmp::AtMost => n <= k,
    }
}

/// An element of an axiom's left side missing from its right side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub axiom: String,
    pub source: String,
    pub time: u32,
    pub element: Vec<String>,
}

/// Whether `interp` satisfies a single axiom, with its counterexamples.
pub fn axiom_counterexamples(
    interp: &Interp,
    kb: &DlrKb,
    ax: &Axiom,
) -> Result<Vec<Counterexample>, DlrError> {
    if interp.kind(&ax.lhs, kb)? != interp.kind(&ax.rhs, kb)? {
        return Err(DlrError::ArityMismatch(ax.to_string()));
    }
    let (l, r) = (interp.eval(&ax.lhs, kb)?, interp.eval(&ax.rhs, kb)?);
    let mut out = Vec::new();
    for (t, (ls, rs)) in l.iter().zip(&r).enumerate() {
        for x in ls.difference(rs) {
            out.push(Counterexample {
                axiom: ax.to_string(),
                source: ax.provenance.source.clone(),
                time: t as u32,
                element: x.clone(),
            });
        }
    }
    Ok(out)
}

/// Counterexamples to every axiom of `kb` in the interpretation of `state`;
/// empty iff the state is a model of the knowledge base.
pub fn kb_satisfied(
    kb: &DlrKb,
    schema: &Schema,
    state: &TemporalState,
) -> Result<Vec<Counterexample>, DlrError> {
    kb_satisfied_with(kb, schema, state, TimeFlow::Naturals)
}

pub fn kb_satisfied_with(
    kb: &DlrKb,
    schema: &Schema,
    state: &TemporalState,
    flow: TimeFlow,
) -> Result<Vec<Counterexample>, DlrError> {
    let mut interp = Interp::from_state(schema, state)?;
    interp.flow = flow;
    let mut out = Vec::new();
    for ax in &kb.axioms {
        out.extend(axiom_counterexamples(&interp, kb, ax)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlr::expr::name;
    use crate::dlr::translate;
    use crate::text::parse_schema;

    #[test]
    fn isa_counterexample() {
        let s = parse_schema("class A; class B; isa A B;").unwrap();
        let kb = translate(&s);
        let mut st = TemporalState::new(2);
        st.put_class("A", 1, "o");
        let cx = kb_satisfied(&kb, &s, &st).unwrap();
        assert_eq!(cx.len(), 1);
        assert_eq!((cx[0].time, cx[0].element.clone()), (1, vec!["o".to_string()]));
        st.put_class("B", 1, "o");
        assert!(kb_satisfied(&kb, &s, &st).unwrap().is_empty());
    }

    #[test]
    fn temporal_operators() {
        let s = parse_schema("class A;").unwrap();
        let kb = DlrKb::default();
        let mut st = TemporalState::new(3);
        st.put_class("A", 1, "o");
        let i = Interp::from_state(&s, &st).unwrap();
        let o = || BTreeSet::from([vec!["o".to_string()]]);
        let e = |x: Expr| i.eval(&x, &kb).unwrap();
        assert_eq!(e(name("A").t(TOp::Next)), vec![o(), BTreeSet::new(), BTreeSet::new()]);
        assert_eq!(e(name("A").t(TOp::Prev)), vec![BTreeSet::new(), BTreeSet::new(), o()]);
        assert_eq!(e(name("A").t(TOp::Future)), vec![o(), BTreeSet::new(), BTreeSet::new()]);
        assert_eq!(e(name("A").t(TOp::AlwaysFuture)), vec![BTreeSet::new(), BTreeSet::new(), o()]);
        assert_eq!(e(name("A").t(TOp::Sometime)), vec![o(), o(), o()]);
        assert_eq!(e(name("A").not().t(TOp::Always)), vec![BTreeSet::new(); 3]);
        assert_eq!(e(Expr::Top(Sort::Concept).until(name("A"))), vec![o(), BTreeSet::new(), BTreeSet::new()]);
    }

    #[test]
    fn unknown_names_are_errors() {
        let s = parse_schema("class A;").unwrap();
        let i = Interp::from_state(&s, &TemporalState::new(1)).unwrap();
        assert!(matches!(i.eval(&name("Z"), &DlrKb::default()), Err(DlrError::UnknownName(_))));
    }
}
