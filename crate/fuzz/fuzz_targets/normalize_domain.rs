#![no_main]

use biasgraph::normalize_domain;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|raw: &str| {
    if let Ok(id) = normalize_domain(raw) {
        // Normal forms are fixed points.
        assert_eq!(normalize_domain(id.as_str()).unwrap(), id);
    }
});
