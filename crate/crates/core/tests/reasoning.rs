mod common;

use common::*;
use proptest::prelude::*;
use trend::dlr::{kb_satisfied_with, translate_with};
use trend::model::Schema;
use trend::reason::{implies, satisfiable, subsumes, Bounds, ReasonError, Verdict};
use trend::semantics::{check_state_with, SemanticsOptions};
use trend::text::{parse_schema, parse_statement};

const B: Bounds = Bounds { max_objects: 2, max_horizon: 3, max_values: 2 };

fn schema(src: &str) -> Schema {
    parse_schema(src).unwrap()
}

fn opts() -> SemanticsOptions {
    SemanticsOptions::default()
}

fn implied(s: &Schema, stmt: &str) -> bool {
    implies(s, &parse_statement(stmt).unwrap(), B, &opts()).unwrap().holds
}

#[test]
fn forced_empty_class_is_unsatisfiable() {
    let s = schema("class C; class C1; class C2; disjoint {C1, C2} C; cover {C1, C2} C; isa C1 C2;");
    let a = satisfiable(&s, "C1", B, &opts()).unwrap();
    assert!(!a.holds);
    let Verdict::ExhaustedBounds { bounds, universes, .. } = a.verdict else { panic!() };
    assert_eq!((bounds, universes), (B, 6));
    assert!(satisfiable(&s, "C2", B, &opts()).unwrap().holds);
    assert!(!satisfiable(&fixture_schema("unsat.trend"), "C1", B, &opts()).unwrap().holds);
}

#[test]
fn temporal_class_smallest_witness() {
    let s = schema("class C temporal;");
    let b = Bounds { max_objects: 1, max_horizon: 2, max_values: 1 };
    let a = satisfiable(&s, "C", b, &opts()).unwrap();
    let w = a.verdict.witness().unwrap();
    assert_eq!(w.horizon, 2);
    assert_eq!(w.objects.len(), 1);
    let o = w.objects.iter().next().unwrap();
    assert!(w.in_class("C", 0, o) && !w.in_class("C", 1, o));
    assert!(matches!(satisfiable(&Schema::empty(), "C", b, &opts()), Err(ReasonError::UnknownElement(_))));
}

#[test]
fn subsumption() {
    let s = schema("class C1; class C2; isa C1 C2; class D;");
    assert!(subsumes(&s, "C1", "C2", B, &opts()).unwrap().holds);
    let a = subsumes(&s, "C1", "D", B, &opts()).unwrap();
    assert!(!a.holds);
    let w = a.verdict.witness().unwrap();
    assert!(check_state_with(&s, w, &opts()).unwrap().is_empty());
    let s = schema(
        "class C; class C1; class C2; class D; class E; cover {C1, C2} C; isa C2 D; disjoint {C2, D} E;",
    );
    assert!(subsumes(&s, "C", "C1", B, &opts()).unwrap().holds);
    let s = schema("class A; class B; rel r (x: A, y: B);");
    assert!(matches!(subsumes(&s, "A", "r", B, &opts()), Err(ReasonError::KindMismatch { .. })));
}

#[test]
fn implication() {
    let s = schema("class C1; class C2; class C3; isa C1 C2; isa C2 C3;");
    assert!(implied(&s, "isa C1 C2"));
    assert!(implied(&s, "isa C1 C3"));
    assert!(!implied(&s, "isa C3 C1"));
    let s = schema("class C snapshot;");
    let a = implies(&s, &parse_statement("class C temporal;").unwrap(), B, &opts()).unwrap();
    assert!(!a.holds);
    assert_eq!(a.violations[0].rule, "temporal-class");
    assert!(implied(&schema("class C temporal;"), "class C temporal;"));
    assert!(matches!(
        implies(&s, &parse_statement("isa C Nope").unwrap(), B, &opts()),
        Err(ReasonError::InvalidConstraint(_))
    ));
}

#[test]
fn finite_traces_need_room_for_delays() {
    let s = fixture_schema("tourism.trend");
    assert!(!satisfiable(&s, "books", B, &opts()).unwrap().holds);
    let wide = Bounds { max_horizon: 5, ..B };
    let a = satisfiable(&s, "books", wide, &opts()).unwrap();
    let w = a.verdict.witness().unwrap();
    assert!(w.horizon >= 4);
    assert!(check_state_with(&s, w, &opts()).unwrap().is_empty());
}

#[test]
fn witnesses_verify_under_every_option() {
    for seed in 0..60u64 {
        let s = random_schema_seeded(seed);
        for o in all_options() {
            let kb = translate_with(&s, &o);
            for w in witnesses(&s, &o) {
                assert!(check_state_with(&s, &w, &o).unwrap().is_empty(), "seed {seed}");
                assert!(kb_satisfied_with(&kb, &s, &w, o.flow).unwrap().is_empty(), "seed {seed}");
            }
        }
    }
}

#[test]
fn fixture_witnesses_verify() {
    for f in ["tourism.trend", "fig5.trend", "temporal.trend"] {
        let s = fixture_schema(f);
        let kb = translate_with(&s, &opts());
        for w in witnesses(&s, &opts()) {
            assert!(check_state_with(&s, &w, &opts()).unwrap().is_empty(), "{f}");
            assert!(kb_satisfied_with(&kb, &s, &w, opts().flow).unwrap().is_empty(), "{f}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn deterministic(seed in any::<u64>()) {
        let s = random_schema_seeded(seed);
        for c in s.classes().keys() {
            let a = satisfiable(&s, c, B, &opts()).unwrap();
            let b = satisfiable(&s, c, B, &opts()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn witnesses_survive_larger_bounds(seed in any::<u64>()) {
        let s = random_schema_seeded(seed);
        let small = Bounds { max_objects: 1, max_horizon: 2, max_values: 1 };
        for c in s.classes().keys() {
            if satisfiable(&s, c, small, &opts()).unwrap().holds {
                prop_assert!(satisfiable(&s, c, B, &opts()).unwrap().holds);
            }
        }
    }
}
