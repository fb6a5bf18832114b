#![no_main]

use biasgraph::graph::{format_graph, parse_graph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(g) = parse_graph(text) {
        let again = parse_graph(&format_graph(&g, &[])).expect("serialized graph reparses");
        assert_eq!(again, g);
    }
});
