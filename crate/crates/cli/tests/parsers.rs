// SPDX-License-Identifier: Apache-2.0
//! Properties of the list and configuration parsers.

use proptest::prelude::*;
use serde_json::Value;
use superwave_cli::config::{parse_config_text, parse_flat};
use superwave_cli::lists::{parse_f64_list, parse_usize_list, MAX_LIST_LEN};
use superwave_cli::ExperimentConfig;

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn printed_reals_round_trip(v in prop::collection::vec(-1e6..1e6f64, 1..20), sep in prop_oneof![Just(","), Just(" "), Just(", ")]) {
        let text = v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(sep);
        prop_assert_eq!(parse_f64_list(&text).unwrap(), v.clone());
        prop_assert_eq!(parse_f64_list(&format!("[{text}]")).unwrap(), v);
    }

    #[test]
    fn linspace_has_the_requested_ends(lo in -100.0..100.0f64, w in 0.1..100.0f64, n in 2usize..500) {
        let v = parse_f64_list(&format!("{lo:?}:{:?}:{n}", lo + w)).unwrap();
        prop_assert_eq!(v.len(), n);
        prop_assert_eq!(v[0], lo);
        prop_assert!((v[n - 1] - (lo + w)).abs() <= 1e-12 * (1.0 + (lo + w).abs()));
        prop_assert!(v.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn integer_ranges_expand(a in 0usize..1000, len in 0usize..200) {
        let b = a + len;
        prop_assert_eq!(parse_usize_list(&format!("{a}..={b}")).unwrap(), (a..=b).collect::<Vec<_>>());
        if len > 0 {
            prop_assert_eq!(parse_usize_list(&format!("{a}..{b}")).unwrap(), (a..b).collect::<Vec<_>>());
        }
    }

    #[test]
    fn list_parsers_never_panic_and_stay_bounded(s in ".{0,64}") {
        if let Ok(v) = parse_f64_list(&s) {
            prop_assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
        }
        if let Ok(v) = parse_usize_list(&s) {
            prop_assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
        }
    }

    #[test]
    fn config_text_never_panics(s in "(?s).{0,200}") {
        fuzz_config_body(&s);
    }

    #[test]
    fn flat_and_json_forms_agree(v0 in 0.1..10.0f64, a in 0.1..10.0f64, eps in prop::collection::vec(0.001..1.0f64, 1..5)) {
        let list = eps.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>().join(", ");
        let flat = format!("potential.v0 = {v0:?}\npotential.a = {a:?}\neps = {list}\n");
        let json = format!(r#"{{"potential": {{"v0": {v0:?}, "a": {a:?}}}, "eps": [{list}]}}"#);
        prop_assert!(parse_flat(&flat).is_ok());
        let a = ExperimentConfig::load(Some(&flat), &[]);
        let b = ExperimentConfig::load(Some(&json), &[]);
        // validation may reject the ladder; both forms must then agree on that
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.potential.v0, v0);
            prop_assert_eq!(a.eps, eps);
        }
    }
}

/// The body of the `config_parser` fuzz target.
fn fuzz_config_body(text: &str) {
    let _ = parse_config_text(text);
    if let Ok(cfg) = ExperimentConfig::load(Some(text), &[]) {
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::load(Some(&json), &[]).unwrap(), cfg);
    }
}

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut v: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn fuzz_seeds_behave() {
    let configs = corpus("config_parser");
    assert!(!configs.is_empty());
    for (name, text) in &configs {
        fuzz_config_body(text);
        let loaded = ExperimentConfig::load(Some(text), &[]);
        let should_fail = name.starts_with("duplicate") || name.starts_with("unknown");
        assert_eq!(loaded.is_err(), should_fail, "{name}: {loaded:?}");
    }
    for (name, text) in corpus("list_parsers") {
        let ok = parse_f64_list(&text).is_ok() || parse_usize_list(&text).is_ok();
        assert_eq!(ok, !(name.starts_with("bad") || name.starts_with("huge")), "{name}");
    }
}

#[test]
fn flat_keys_may_not_repeat() {
    assert!(parse_flat("seed = 1\nseed = 2\n").is_err());
    assert_eq!(parse_flat("# only a comment\n").unwrap(), Value::Object(Default::default()));
}
