mod common;

use common::*;
use proptest::prelude::*;
use trend::render::{check_dot, element_counts, to_dot, RenderOptions};
use trend::text::KeywordStyle;

fn all_renderings(s: &trend::model::Schema) -> Vec<String> {
    let mut out = Vec::new();
    for labels in [KeywordStyle::ChgExt, KeywordStyle::DevDex] {
        for ascii in [false, true] {
            out.push(to_dot(s, &RenderOptions { labels, ascii }));
        }
    }
    out
}

#[test]
fn fixture_counts() {
    for (f, nodes, edges) in
        [("tourism.trend", 8, 18), ("fig5.trend", 3, 5), ("unsat.trend", 5, 9), ("temporal.trend", 1, 0)]
    {
        let s = fixture_schema(f);
        assert_eq!(element_counts(&s), (nodes, edges), "{f}");
        for d in all_renderings(&s) {
            let st = check_dot(&d).unwrap_or_else(|e| panic!("{f}: {e}\n{d}"));
            assert_eq!((st.nodes, st.edges), (nodes, edges), "{f}");
        }
    }
}

#[test]
fn tourism_markers_and_labels() {
    let s = fixture_schema("tourism.trend");
    let d = to_dot(&s, &RenderOptions::default());
    assert!(d.contains("Traveller ⏰"));
    assert!(d.contains("Flight 📷"));
    assert!(d.contains("arrivalTime: Time 📌"));
    assert!(d.contains("label=\"CHGR3\""), "{d}");
    assert!(d.contains("[style=solid, label=\"EXT-\"]"), "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn random_diagrams_are_well_formed(seed in any::<u64>()) {
        let s = random_schema_seeded(seed);
        let expect = element_counts(&s);
        for d in all_renderings(&s) {
            let st = check_dot(&d).map_err(|e| TestCaseError::fail(format!("{e}\n{d}")))?;
            prop_assert_eq!((st.nodes, st.edges), expect);
        }
    }
}
