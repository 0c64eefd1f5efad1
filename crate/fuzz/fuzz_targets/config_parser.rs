// SPDX-License-Identifier: Apache-2.0
//! Flat and JSON config text: parsing, merging over the defaults and
//! validation must return errors, never panic.
#![no_main]

use libfuzzer_sys::fuzz_target;
use superwave_cli::config::{parse_config_text, parse_scalar};
use superwave_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_config_text(text);
    if let Ok(cfg) = ExperimentConfig::load(Some(text), &[]) {
        // a loaded config is valid and survives a JSON round trip
        let json = serde_json::to_string(&cfg).expect("serialisable");
        let again = ExperimentConfig::load(Some(&json), &[]).expect("round trip");
        assert_eq!(cfg, again);
    }
    if let Some((k, v)) = text.split_once('=') {
        let _ = ExperimentConfig::load(None, &[(k.trim().to_string(), parse_scalar(v))]);
    }
});
