use std::fs;

use qgsmooth::blowup::apply_blowups;
use qgsmooth::config::{export_dot, parse, snc_certificate, ParseError};
use qgsmooth::corpus::{self, builtin, verify_all, verify_dir, CorpusError, NAMES};
use qgsmooth::exec::Exec;
use qgsmooth::fibration::two_section_incidence_check;
use qgsmooth::smoothing::{extract_chains, normalized_chains};

#[test]
fn every_example_survives_a_json_round_trip() {
    for name in NAMES {
        let ex = builtin(name).unwrap();
        let again = parse(&ex.document.to_json()).unwrap();
        assert_eq!(again, ex.document, "{name}");
    }
}

#[test]
fn plans_match_the_chains_in_the_final_configuration() {
    for name in NAMES {
        let ex = builtin(name).unwrap();
        let doc = &ex.document;
        let last = doc.final_configuration().unwrap();
        let plan = doc.plan.as_ref().unwrap();
        let curves: Vec<&str> = plan.chains.iter().flatten().map(String::as_str).collect();
        let found = extract_chains(&last, &curves).unwrap();
        assert_eq!(
            normalized_chains(&found),
            normalized_chains(&plan.chains),
            "{name}"
        );
    }
}

#[test]
fn two_sections_meet_every_fiber_twice() {
    for name in NAMES {
        let ex = builtin(name).unwrap();
        assert_eq!(
            two_section_incidence_check(&ex.document.config),
            vec![],
            "{name}"
        );
    }
}

#[test]
fn shipped_examples_match_expectations() {
    let rows = verify_all(Exec::Sequential);
    assert_eq!(rows.len(), NAMES.len());
    for r in &rows {
        assert!(
            r.violations.is_empty() && r.mismatches.is_empty(),
            "{}",
            r.row()
        );
    }
    // the declared K^2 = 1 candidate set has rank 9 against the model
    for r in &rows[1..] {
        assert!(r.passed, "{}", r.row());
    }
    assert_eq!(
        rows[0].failures,
        vec!["independence: rank 9 of 10".to_string()]
    );
    assert!(!corpus::all_passed(&rows));
    let par = verify_all(Exec::default());
    let names: Vec<&str> = par.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, NAMES);
}

#[test]
fn corrupted_copy_fails_with_adjunction() {
    let dir = std::env::temp_dir().join(format!("qgsmooth-corpus-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let src = builtin("enriques-k1").unwrap().source;
    let mut doc: serde_json::Value = serde_json::from_str(src).unwrap();
    doc["curves"][0]["self"] = serde_json::json!(-3);
    fs::write(dir.join("enriques-k1.json"), doc.to_string()).unwrap();
    fs::write(
        dir.join("enriques-k2.json"),
        builtin("enriques-k2").unwrap().source,
    )
    .unwrap();
    fs::write(dir.join("readme.txt"), "not a document").unwrap();

    let rows = verify_dir(&dir, Exec::Sequential).unwrap();
    fs::remove_dir_all(&dir).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(!rows[0].passed);
    assert!(
        rows[0].violations.iter().any(|v| v.code == "adjunction"),
        "{}",
        rows[0].row()
    );
    assert!(rows[1].passed, "{}", rows[1].row());
    assert!(!corpus::all_passed(&rows));
}

#[test]
fn empty_directory_gives_empty_table() {
    let dir = std::env::temp_dir().join(format!("qgsmooth-empty-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let rows = verify_dir(&dir, Exec::Sequential).unwrap();
    fs::remove_dir_all(&dir).unwrap();
    assert!(rows.is_empty());
    assert!(corpus::all_passed(&rows));

    let missing = dir.join("nope");
    assert!(matches!(
        verify_dir(&missing, Exec::Sequential),
        Err(CorpusError::Io { .. })
    ));
}

#[test]
fn unknown_example_is_an_error() {
    let err = builtin("bogus").unwrap_err();
    assert_eq!(err, CorpusError::UnknownExample("bogus".into()));
    assert!(err.to_string().contains("enriques-k1"));
}

#[test]
fn expected_values_are_pinned() {
    assert_eq!(builtin("enriques-k1").unwrap().expected.k2, 1);
    let k2s: Vec<i64> = NAMES
        .iter()
        .map(|n| builtin(n).unwrap().expected.k2)
        .collect();
    assert_eq!(k2s, vec![1, 2, 3, 3, 4, 5]);
}

#[test]
fn k2_divisor_is_snc_after_first_blowup() {
    let doc = builtin("enriques-k2").unwrap().document;
    let stage1 = apply_blowups(&doc.config, &doc.blowups[..1]).unwrap();
    let h = doc.plan.as_ref().unwrap().hypotheses.as_ref().unwrap();
    let names: Vec<&str> = h.snc.iter().map(String::as_str).collect();
    assert_eq!(snc_certificate(&stage1, &names).unwrap(), vec![]);
}

#[test]
fn dot_export_shows_the_nine_cycle() {
    let doc = builtin("enriques-k1").unwrap().document;
    let dot = export_dot(&doc.config);
    assert!(dot.starts_with("graph configuration {\n"));
    assert!(dot.contains("\"G1\" [label=\"G1 (-2)\"];"));
    for i in 1..=9 {
        let j = i % 9 + 1;
        let (a, b) = if format!("G{i}") < format!("G{j}") {
            (i, j)
        } else {
            (j, i)
        };
        assert!(
            dot.contains(&format!("\"G{a}\" -- \"G{b}\";")),
            "G{a}-G{b} missing"
        );
    }
    let g_edges = dot
        .lines()
        .filter(|l| l.contains("--") && l.matches("\"G").count() == 2)
        .count();
    assert_eq!(g_edges, 9);
}

#[test]
fn schema_errors_are_not_validation_errors() {
    let err = parse("{").unwrap_err();
    assert!(matches!(err, ParseError::Schema(_)));
}
