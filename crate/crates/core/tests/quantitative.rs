mod common;

use common::*;

#[test]
fn offset_one_collapses_to_unquantified() {
    let mut r = rng(21);
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 100 {
        seed += 1;
        let s = random_schema_seeded(seed);
        let Some((q, pairs)) = quantified_once(&s) else { continue };
        let st = random_state(&s, &mut r);
        assert!(quantified_once_agrees(&s, &q, &pairs, &st), "seed {seed}\n{}", st.to_json());
        checked += 1;
    }
}

#[test]
fn longer_offsets_differ() {
    let s = trend::text::parse_schema("class A; class B; MEXT A -> B;").unwrap();
    let q = trend::text::parse_schema("class A; class B; MQEXT A -> B after 2;").unwrap();
    let st = trend::semantics::TemporalState::from_json(
        r#"{"horizon": 2, "objects": ["o1"], "classes": {"A": {"0": ["o1"]}, "B": {"1": ["o1"]}}}"#,
    )
    .unwrap();
    assert!(trend::semantics::check_state(&s, &st).unwrap().is_empty());
    assert!(!trend::semantics::check_state(&q, &st).unwrap().is_empty());
}

#[test]
fn keyword_style_does_not_change_meaning() {
    let mut r = rng(8);
    for seed in 0..100u64 {
        let s = random_schema_seeded(seed);
        let st = random_state(&s, &mut r);
        assert!(labels_invariant(&s, &st), "seed {seed}");
    }
}
