//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use common::{random_model, random_rule, OracleModel, OracleRule, RuleKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use tdm::check::check;
use tdm::engine::{
    count_configurations, detect_dead_values, enumerate_configurations, EnumerateOptions,
};
use tdm::model::Assignment;
use tdm::parser::parse_model;
use tdm::printer::pretty_print;

const SET_TDM: &str = include_str!("../../../corpus/set.tdm");

fn corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/set.tdm")
}

fn tdm_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tdm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn certified(src: &str) -> tdm::check::ResolvedModel {
    let model = parse_model(src, "model.tdm").expect("parses");
    let (resolved, diags) = check(&model);
    assert!(resolved.certified, "uncertified: {diags:?}");
    resolved
}

fn engine_assignments(src: &str) -> Vec<Assignment> {
    enumerate_configurations(&certified(src), &EnumerateOptions::default())
        .unwrap()
        .assignments
}

fn oracle_assignments(oracle: &OracleModel) -> Vec<Assignment> {
    oracle
        .valid_rows()
        .iter()
        .map(|row| {
            let pairs = oracle.row_pairs(row);
            Assignment::from_pairs(pairs.iter().map(|(f, v)| (f.as_str(), v.as_str())))
        })
        .collect()
}

fn pass(n: u32, what: &str) {
    println!("PASS criterion {n}: {what}");
}

#[test]
fn criterion_1_set_case_study_reproduction() {
    let corpus = corpus_path();
    let corpus = corpus.to_str().unwrap();
    let started = Instant::now();
    let count = tdm_bin(&["configs", corpus, "--count"]);
    assert_eq!(count.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&count.stdout), "4\n");
    let list = tdm_bin(&["configs", corpus, "--list"]);
    assert_eq!(list.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&list.stdout),
        "Allocation=static, Discipline=stack\n\
         Allocation=static, Discipline=queue\n\
         Allocation=dynamic, Discipline=stack\n\
         Allocation=dynamic, Discipline=queue\n"
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, "Set corpus counts 4 and lists the four variants in under 1 s");
}

#[test]
fn criterion_2_release_derivation() {
    let corpus = corpus_path();
    let corpus = corpus.to_str().unwrap();
    let golden = include_str!("golden/static_stack.json");
    let mut outputs = Vec::new();
    for _ in 0..3 {
        let run = tdm_bin(&["generate", corpus, "StaticStack", "-"]);
        assert_eq!(run.status.code(), Some(0));
        outputs.push(String::from_utf8(run.stdout).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    assert_eq!(outputs[0], golden);
    assert!(outputs[0].contains("\"Set\": \"StaticStack\""));
    let members_order = ["capacity", "add", "remove"];
    let mut pos = 0;
    for m in members_order {
        let found = outputs[0][pos..].find(&format!("\"name\": \"{m}\"")).unwrap();
        pos += found;
    }
    pass(2, "StaticStack release binds Set->StaticStack with members [capacity, add, remove], byte-identical across 3 runs");
}

fn set_oracle(rules: Vec<OracleRule>) -> OracleModel {
    OracleModel {
        features: vec![
            (
                "Allocation".to_string(),
                vec!["static".to_string(), "dynamic".to_string()],
            ),
            (
                "Discipline".to_string(),
                vec!["stack".to_string(), "queue".to_string()],
            ),
        ],
        rules,
    }
}

fn set_with_control(rules: &str) -> String {
    SET_TDM.replace(
        "  configuration",
        &format!("  control {{\n{rules}  }}\n  configuration"),
    )
}

#[test]
fn criterion_3_constraint_effect() {
    // Discipline.stack excludes Allocation.dynamic: count drops to 3, nothing dead
    let src = set_with_control("    Discipline.stack excludes Allocation.dynamic\n");
    let resolved = certified(&src);
    let opts = EnumerateOptions::default();
    assert_eq!(count_configurations(&resolved, &opts), Ok(3));
    assert_eq!(detect_dead_values(&resolved, &opts), Ok(vec![]));
    // independent oracle agrees (note the oracle indexes Discipline=1, Allocation=0)
    let oracle = set_oracle(vec![OracleRule {
        lhs: (1, 0),
        kind: RuleKind::Excludes,
        rhs: (0, 1),
    }]);
    let valid = oracle.valid_rows();
    assert_eq!(valid.len(), 3);
    for fi in 0..2 {
        for vi in 0..2 {
            assert!(
                valid.iter().any(|row| row[fi] == vi),
                "oracle says ({fi},{vi}) is dead"
            );
        }
    }

    // both requires rules: (Allocation, dynamic) becomes dead
    let src = set_with_control(
        "    Discipline.stack requires Allocation.static\n    \
         Discipline.queue requires Allocation.static\n",
    );
    let resolved = certified(&src);
    assert_eq!(
        detect_dead_values(&resolved, &opts),
        Ok(vec![("Allocation".to_string(), "dynamic".to_string())])
    );
    let oracle = set_oracle(vec![
        OracleRule {
            lhs: (1, 0),
            kind: RuleKind::Requires,
            rhs: (0, 0),
        },
        OracleRule {
            lhs: (1, 1),
            kind: RuleKind::Requires,
            rhs: (0, 0),
        },
    ]);
    let valid = oracle.valid_rows();
    assert!(valid.iter().all(|row| row[0] != 1), "oracle finds dynamic alive");
    assert_eq!(valid.len(), 2);
    pass(3, "constraint effects match the independent brute-force oracle");
}

#[test]
fn criterion_4_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7d_1147);
    let mut checked = 0;
    while checked < 200 {
        let oracle = random_model(&mut rng, 0);
        let src = oracle.to_source();
        let got = engine_assignments(&src);
        let expected = oracle_assignments(&oracle);
        assert_eq!(got, expected, "mismatch on model:\n{src}");
        checked += 1;
    }
    pass(4, "enumeration equals the exhaustive truth-table oracle on 200 random models");
}

#[test]
fn criterion_5_round_trip() {
    let mut sources = vec![SET_TDM.to_string()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x7d_1147);
    for _ in 0..200 {
        sources.push(random_model(&mut rng, 0).to_source());
    }
    for src in &sources {
        let model = parse_model(src, "m.tdm").expect("parses");
        let printed = pretty_print(&model);
        let reparsed = parse_model(&printed, "m.tdm").expect("reparses");
        assert_eq!(
            model.without_spans(),
            reparsed.without_spans(),
            "round trip changed structure for:\n{src}"
        );
        assert_eq!(printed, pretty_print(&reparsed), "printing not idempotent");
    }
    pass(5, "parse/pretty-print round trip is structure-preserving and byte-idempotent");
}

#[test]
fn criterion_6_strong_typing_negative_corpus() {
    // each case: (source, expected code, token whose position the span must hit)
    let cases: [(&str, &str, &str); 10] = [
        (
            "features F { types { feature A = { x } } control { Ghost.x requires A.x } }",
            "E0201",
            "Ghost.x",
        ),
        (
            "features F { types { feature A = { x } feature B = { y } } control { A.x requires B.big } }",
            "E0202",
            "big",
        ),
        (
            "features F { types { feature A = { x } } configuration C { require Ghost.x } }",
            "E0201",
            "Ghost.x",
        ),
        (
            "features F { types { feature A = { x } } configuration C { require A.big } }",
            "E0202",
            "big",
        ),
        (
            "features F { types { feature A = { x, y } } configuration C { require A.x discard A.big } }",
            "E0202",
            "big",
        ),
        (
            "features F { types { feature A = { x } } } product P { interface I features (A) { attr a : t when Ghost.x } }",
            "E0201",
            "Ghost.x",
        ),
        (
            "features F { types { feature A = { x } feature B = { y } } } product P { interface I features (A) { attr a : t when B.y } }",
            "E0207",
            "B.y",
        ),
        (
            "features F { types { feature A = { x } } } product P { interface I features (A) { } implementation X realizes I when A.big { } }",
            "E0202",
            "big",
        ),
        (
            "features F { types { feature A = { x } } } product P { implementation X realizes Ghost when A.x { } }",
            "E0206",
            "implementation X",
        ),
        (
            "features F { types { feature A = { x } } } product P { interface I features (Ghost) { } }",
            "E0201",
            "interface I",
        ),
    ];
    for (i, (src, expected_code, token)) in cases.iter().enumerate() {
        let model = parse_model(src, "neg.tdm").expect("negative cases are syntactically valid");
        let (resolved, diags) = check(&model);
        assert!(!resolved.certified, "case {i} falsely accepted:\n{src}");
        let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        assert_eq!(errors.len(), 1, "case {i}: expected exactly one error, got {errors:?}");
        let d = errors[0];
        assert_eq!(d.code, *expected_code, "case {i}: wrong code: {d}");
        let expected_col = src.rfind(token).unwrap() as u32 + 1;
        assert_eq!(d.span.line_start, 1, "case {i}");
        assert_eq!(d.span.col_start, expected_col, "case {i}: wrong span: {d}");
    }
    pass(6, "10-case negative corpus yields the designated E02xx codes at the right spans");
}

#[test]
fn criterion_7_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e_7151);
    let opts = EnumerateOptions::default();
    for _ in 0..100 {
        let oracle = random_model(&mut rng, 2);
        let extra = random_rule(&mut rng, &oracle.features);
        let base = certified(&oracle.to_source());
        let extended = certified(&oracle.to_source_with_extra_rule(Some(&extra)));
        let base_count = count_configurations(&base, &opts).unwrap();
        let extended_count = count_configurations(&extended, &opts).unwrap();
        assert!(extended_count <= base_count);
        // equality iff the oracle confirms the rule excludes no valid row
        let excludes_nothing = oracle
            .valid_rows()
            .iter()
            .all(|row| oracle.rule_holds(&extra, row));
        assert_eq!(
            extended_count == base_count,
            excludes_nothing,
            "model:\n{}",
            oracle.to_source_with_extra_rule(Some(&extra))
        );
    }
    pass(7, "adding a rule never increases the count, with oracle-confirmed equality cases");
}

#[test]
fn criterion_8_exit_code_contract() {
    let corpus = corpus_path();
    let corpus = corpus.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tdm");
    std::fs::write(
        &bad,
        "features F { types { feature A = { x } } control { A.big requires A.x } }",
    )
    .unwrap();
    let bad = bad.to_str().unwrap();

    // 0: success
    assert_eq!(tdm_bin(&["check", corpus]).status.code(), Some(0));
    assert_eq!(tdm_bin(&["configs", corpus, "--count"]).status.code(), Some(0));
    assert_eq!(tdm_bin(&["generate", corpus, "StaticStack", "-"]).status.code(), Some(0));
    assert_eq!(tdm_bin(&["fmt", corpus, "--verify"]).status.code(), Some(0));
    // 1: model errors / failed generation
    assert_eq!(tdm_bin(&["check", bad]).status.code(), Some(1));
    assert_eq!(tdm_bin(&["configs", bad, "--count"]).status.code(), Some(1));
    assert_eq!(tdm_bin(&["generate", corpus, "Nope", "-"]).status.code(), Some(1));
    // 2: usage errors
    assert_eq!(tdm_bin(&["configs", corpus]).status.code(), Some(2));
    assert_eq!(tdm_bin(&["configs", corpus, "--list", "--limit", "0"]).status.code(), Some(2));
    assert_eq!(tdm_bin(&["fmt", corpus]).status.code(), Some(2));
    assert_eq!(tdm_bin(&["generate", corpus]).status.code(), Some(2));
    // 3: I/O failures
    assert_eq!(tdm_bin(&["check", "missing.tdm"]).status.code(), Some(3));
    assert_eq!(tdm_bin(&["configs", "missing.tdm", "--count"]).status.code(), Some(3));
    assert_eq!(
        tdm_bin(&["generate", corpus, "StaticStack", "/nonexistent-dir/m.json"]).status.code(),
        Some(3)
    );
    assert_eq!(tdm_bin(&["fmt", "missing.tdm", "--verify"]).status.code(), Some(3));
    pass(8, "exit codes 0, 1, 2, 3 observed across the subcommands");
}
