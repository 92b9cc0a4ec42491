mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use trend::dlr::{kb_satisfied_with, translate_with};
use trend::model::Schema;
use trend::reason::{implies, satisfiable, subsumes, Bounds};
use trend::render::{check_dot, element_counts, to_dot, RenderOptions};
use trend::semantics::{check_state_with, SemanticsOptions, TemporalState};
use trend::text::{parse_schema, parse_statement, serialize_with, KeywordStyle};
use trend::verbal::{normalize_sentence, verbalize};

const TOURISM_STATEMENTS: &[&str] = &[
    "Flight is an entity type whose objects will always be a flight.",
    "Client is an entity type whose objects will always be a client.",
    "Traveller is a client.",
    "Previous-customer is a client.",
    "VIP-customer is a client.",
    "Each traveller is not a traveller for some time.",
    "Each previous-customer is not a previous-customer for some time.",
    "Each VIP-customer is not a VIP-customer for some time.",
    "A client may also become a traveller.",
    "A client may also become a VIP-customer.",
    "Each traveller must evolve to a previous-customer ceasing to be a traveller.",
    "A previous-customer may also become a traveller.",
    "A previous-customer may also become a VIP-customer.",
    "Each VIP-customer was already a previous-customer.",
    "Each VIP-customer was already a traveller.",
    "A traveller books a flight",
    "A traveller pays for a flight.",
    "A previous-customer took a flight.",
    "Each traveller books a flight will be followed by traveller pays for flight after exactly 3 days, terminating the traveller books a flight relation.",
    "Each previous-customer took a flight must have been preceded by traveller pays for flight, and terminating that traveller pays for flight relation.",
    "Each object in entity type client having attribute company does not have a company at some time.",
    "Each object in entity type flight having attribute delay has delay at all times.",
    "Once the value for arrival time is set, it cannot change anymore.",
];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Random (schema, state) pairs: random states, reasoner witnesses and
/// one-fact perturbations of witnesses.
fn corpus(min: usize) -> Vec<(Schema, TemporalState, SemanticsOptions)> {
    let mut r = rng(2024);
    let opts = all_options();
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < min {
        let s = random_schema_seeded(50_000 + seed);
        let o = opts[seed as usize % opts.len()];
        for _ in 0..2 {
            out.push((s.clone(), random_state(&s, &mut r), o));
        }
        for w in witnesses(&s, &o).into_iter().take(2) {
            out.push((s.clone(), perturb(&s, &w, &mut r), o));
            out.push((s.clone(), w, o));
        }
        seed += 1;
    }
    out
}

fn round_trip() -> Outcome {
    let mut bad = Vec::new();
    for f in ["fig5.trend", "tourism.trend"] {
        let s = fixture_schema(f);
        if parse_schema(&serialize_with(&s, KeywordStyle::ChgExt)).ok() != Some(s) {
            bad.push(f.to_string());
        }
    }
    let mut n = 0;
    for seed in 0..500u64 {
        let s = random_schema_seeded(seed);
        n += 1;
        if parse_schema(&serialize_with(&s, KeywordStyle::ChgExt)).ok() != Some(s) {
            bad.push(format!("random seed {seed}"));
        }
    }
    outcome(bad.is_empty(), format!("2 fixtures + {n} random schemas, {} mismatches {bad:?}", bad.len()))
}

fn verbal_golden() -> Outcome {
    let s = fixture_schema("tourism.trend");
    let mut got: Vec<String> =
        verbalize(&s, KeywordStyle::ChgExt).iter().map(|x| normalize_sentence(x)).collect();
    let mut want: Vec<String> = TOURISM_STATEMENTS.iter().map(|x| normalize_sentence(x)).collect();
    got.sort();
    want.sort();
    let hits = want.iter().filter(|w| got.contains(w)).count();
    let extra = got.iter().filter(|g| !want.contains(g)).count();
    outcome(
        hits == want.len() && extra == 0,
        format!("{hits}/{} statements reproduced, {extra} extra", want.len()),
    )
}

fn dlr_equivalence(c: &[(Schema, TemporalState, SemanticsOptions)]) -> Outcome {
    let (mut agree, mut legal) = (0, 0);
    for (s, st, o) in c {
        let kb = translate_with(s, o);
        let a = check_state_with(s, st, o).unwrap().is_empty();
        let b = kb_satisfied_with(&kb, s, st, o.flow).unwrap().is_empty();
        agree += usize::from(a == b);
        legal += usize::from(a);
    }
    outcome(agree == c.len(), format!("{agree}/{} pairs agree ({legal} legal)", c.len()))
}

fn oracle_equivalence(c: &[(Schema, TemporalState, SemanticsOptions)]) -> Outcome {
    let agree = c.iter().filter(|(s, st, o)| engine_keys(s, st, o) == oracle_keys(s, st, o)).count();
    outcome(agree == c.len(), format!("{agree}/{} pairs give identical violation sets", c.len()))
}

fn quantitative_collapse() -> Outcome {
    let mut r = rng(77);
    let (mut states, mut agree, mut seed) = (0, 0, 0u64);
    while states < 200 {
        seed += 1;
        let s = random_schema_seeded(90_000 + seed);
        let Some((q, pairs)) = quantified_once(&s) else { continue };
        let st = random_state(&s, &mut r);
        agree += usize::from(quantified_once_agrees(&s, &q, &pairs, &st));
        states += 1;
    }
    outcome(agree == states, format!("{agree}/{states} states agree"))
}

fn reasoning_fixtures() -> Outcome {
    let b = Bounds { max_objects: 2, max_horizon: 3, max_values: 2 };
    let o = SemanticsOptions::default();
    let unsat =
        parse_schema("class C; class C1; class C2; disjoint {C1, C2} C; cover {C1, C2} C; isa C1 C2;")
            .unwrap();
    let start = Instant::now();
    let a = !satisfiable(&unsat, "C1", b, &o).unwrap().holds && start.elapsed() < Duration::from_secs(10);
    let isa = parse_schema("class C1; class C2; class C3; isa C1 C2; isa C2 C3;").unwrap();
    let bb = subsumes(&isa, "C1", "C2", b, &o).unwrap().holds;
    let c = implies(&isa, &parse_statement("isa C1 C3").unwrap(), b, &o).unwrap().holds;
    let (mut verified, mut total) = (0, 0);
    let mut schemas: Vec<Schema> =
        ["tourism.trend", "fig5.trend", "temporal.trend"].iter().map(|f| fixture_schema(f)).collect();
    schemas.extend((0..100u64).map(|s| random_schema_seeded(70_000 + s)));
    for s in &schemas {
        for w in witnesses(s, &o) {
            total += 1;
            verified += usize::from(check_state_with(s, &w, &o).unwrap().is_empty());
        }
    }
    let d = verified == total;
    outcome(
        a && bb && c && d,
        format!(
            "(a) forced-empty class unsatisfiable: {a}; (b) declared isa holds: {bb}; (c) transitive isa holds: {c}; (d) {verified}/{total} witnesses legal"
        ),
    )
}

fn label_invariance() -> Outcome {
    let mut r = rng(99);
    let agree = (0..100u64)
        .filter(|seed| {
            let s = random_schema_seeded(30_000 + seed);
            let st = random_state(&s, &mut r);
            labels_invariant(&s, &st)
        })
        .count();
    outcome(agree == 100, format!("{agree}/100 schemas invariant"))
}

fn dot_validity() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for f in ["tourism.trend", "fig5.trend", "unsat.trend", "temporal.trend"] {
        let s = fixture_schema(f);
        for labels in [KeywordStyle::ChgExt, KeywordStyle::DevDex] {
            for ascii in [false, true] {
                n += 1;
                let d = to_dot(&s, &RenderOptions { labels, ascii });
                match check_dot(&d) {
                    Ok(st) if (st.nodes, st.edges) == element_counts(&s) => {}
                    Ok(st) => bad.push(format!(
                        "{f}: {} nodes {} edges, expected {:?}",
                        st.nodes,
                        st.edges,
                        element_counts(&s)
                    )),
                    Err(e) => bad.push(format!("{f}: {e}")),
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{}/{n} renderings valid with exact counts {bad:?}", n - bad.len()))
}

fn main() -> ExitCode {
    let t = Instant::now();
    let c = corpus(1000);
    println!("corpus: {} (schema, state) pairs built in {:.2?}", c.len(), t.elapsed());

    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let checks: Vec<(&str, &str, u64, Check)> = vec![
        ("round-trip", "exact", 10, Box::new(round_trip)),
        ("verbalization golden", "23/23 after normalization", 1, Box::new(verbal_golden)),
        ("state legality vs DLR satisfaction", "100%", 60, Box::new(|| dlr_equivalence(&c))),
        ("state legality vs naive expander", "100%", 60, Box::new(|| oracle_equivalence(&c))),
        ("offset 1 equals unquantified", "100%", 10, Box::new(quantitative_collapse)),
        ("reasoning fixtures", "all of (a)-(d)", 60, Box::new(reasoning_fixtures)),
        ("keyword-style invariance", "exact", 10, Box::new(label_invariance)),
        ("DOT validity", "exact counts", 10, Box::new(dot_validity)),
    ];
    let mut failed = 0;
    for (i, (name, tol, limit, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let ok = o.ok && took <= Duration::from_secs(*limit);
        failed += usize::from(!ok);
        println!(
            "{} {}. {name} [tolerance {tol}, limit {limit}s]: {} in {took:.2?}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if failed == 0 {
        println!("all {} criteria passed", checks.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", checks.len());
        ExitCode::FAILURE
    }
}
