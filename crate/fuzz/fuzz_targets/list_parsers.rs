// SPDX-License-Identifier: Apache-2.0
//! Command-line list syntax: reals, `lo:hi:n` ranges and integer ranges.
#![no_main]

use libfuzzer_sys::fuzz_target;
use superwave_cli::lists::{parse_f64_list, parse_usize_list, MAX_LIST_LEN};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_f64_list(text) {
        assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
    }
    if let Ok(v) = parse_usize_list(text) {
        assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
    }
});
