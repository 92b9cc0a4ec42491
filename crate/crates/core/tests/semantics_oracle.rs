mod common;

use common::*;
use proptest::prelude::*;
use trend::semantics::check_state;

#[test]
fn engine_matches_oracle_on_random_states() {
    let mut r = rng(7);
    for seed in 0..300u64 {
        let schema = random_schema_seeded(seed);
        for opts in all_options() {
            let st = random_state(&schema, &mut r);
            assert_eq!(
                engine_keys(&schema, &st, &opts),
                oracle_keys(&schema, &st, &opts),
                "seed {seed}\n{}",
                st.to_json()
            );
        }
    }
}

#[test]
fn engine_matches_oracle_near_legal_states() {
    let mut r = rng(11);
    for seed in 0..120u64 {
        let schema = random_schema_seeded(1000 + seed);
        let opts = Default::default();
        for w in witnesses(&schema, &opts) {
            assert!(check_state(&schema, &w).unwrap().is_empty());
            assert!(oracle_keys(&schema, &w, &opts).is_empty());
            let p = perturb(&schema, &w, &mut r);
            assert_eq!(engine_keys(&schema, &p, &opts), oracle_keys(&schema, &p, &opts), "seed {seed}");
        }
    }
}

#[test]
fn fixture_state_verdicts() {
    let s = fixture_schema("temporal.trend");
    let st = trend::semantics::TemporalState::from_json(&fixture("temporal_violation.state.json")).unwrap();
    let v = check_state(&s, &st).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].rule, "temporal-class");
    assert_eq!(v[0].time, Some(0));
    let s = fixture_schema("tourism.trend");
    let st = trend::semantics::TemporalState::from_json(&fixture("legal.state.json")).unwrap();
    assert!(check_state(&s, &st).unwrap().is_empty());
}

#[test]
fn empty_state_is_legal() {
    for seed in 0..100u64 {
        let schema = random_schema_seeded(seed);
        for h in 1..4 {
            let st = trend::semantics::TemporalState::new(h);
            assert!(check_state(&schema, &st).unwrap().is_empty(), "seed {seed}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn violations_are_deterministic_and_sorted(seed in any::<u64>()) {
        let schema = random_schema_seeded(seed);
        let st = random_state(&schema, &mut rng(seed ^ 0x5eed));
        let a = check_state(&schema, &st).unwrap();
        let b = check_state(&schema, &st).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn state_json_round_trips(seed in any::<u64>()) {
        let schema = random_schema_seeded(seed);
        let st = random_state(&schema, &mut rng(seed));
        let back = trend::semantics::TemporalState::from_json(&st.to_json()).unwrap();
        prop_assert_eq!(back, st);
    }
}
