#![no_main]

use biasgraph::scores::{format_scores, parse_scores};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(sv) = parse_scores(text) {
        let again = parse_scores(&format_scores(&sv, &[])).expect("serialized scores reparse");
        assert_eq!(again.nodes(), sv.nodes());
        assert_eq!(again.values(), sv.values());
    }
});
