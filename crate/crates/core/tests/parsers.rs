//! Same properties as the fuzz targets, replayed on the checked-in corpus
//! and on proptest-generated text.

use std::fs;
use std::path::Path;

use biasgraph::graph::{format_graph, parse_graph};
use biasgraph::labels::parse_label_csv;
use biasgraph::scores::{format_scores, parse_scores};
use biasgraph::{normalize_domain, PoliticalFold, Task};
use proptest::prelude::*;

fn domain_roundtrip(raw: &str) {
    if let Ok(id) = normalize_domain(raw) {
        assert_eq!(normalize_domain(id.as_str()).unwrap(), id);
    }
}

fn graph_roundtrip(text: &str) {
    if let Ok(g) = parse_graph(text) {
        assert_eq!(parse_graph(&format_graph(&g, &[])).unwrap(), g);
    }
}

fn labels_total(data: &[u8]) {
    for task in [Task::Political, Task::Factual] {
        for fold in [PoliticalFold::default(), PoliticalFold::toward_center()] {
            let _ = parse_label_csv(data, task, &fold);
        }
    }
}

fn scores_roundtrip(text: &str) {
    if let Ok(sv) = parse_scores(text) {
        let again = parse_scores(&format_scores(&sv, &[])).unwrap();
        assert_eq!((again.nodes(), again.values()), (sv.nodes(), sv.values()));
    }
}

#[test]
fn fuzz_corpus_seeds() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for target in ["normalize_domain", "parse_graph", "parse_label_csv", "parse_scores"] {
        for entry in fs::read_dir(root.join(target)).unwrap() {
            let bytes = fs::read(entry.unwrap().path()).unwrap();
            let text = String::from_utf8_lossy(&bytes);
            match target {
                "normalize_domain" => domain_roundtrip(&text),
                "parse_graph" => graph_roundtrip(&text),
                "parse_label_csv" => labels_total(&bytes),
                _ => scores_roundtrip(&text),
            }
            seen += 1;
        }
    }
    assert!(seen >= 12);
}

fn tsv_like() -> impl proptest::strategy::Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec![
            "a.com", "b.org", "www.c.net", "x", "\t", "\n", "# normalized\n", "# normalized neighborhood\n", "1", "0",
            "0.5", "1e400", "-2", "NaN", " ", ",", "domain,score\n", "domain,label\n", "left", "very high",
        ]),
        0..40,
    )
    .prop_map(|parts| parts.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parsers_total_on_arbitrary_text(s in ".*") {
        domain_roundtrip(&s);
        graph_roundtrip(&s);
        labels_total(s.as_bytes());
        scores_roundtrip(&s);
    }

    #[test]
    fn parsers_total_on_structured_text(s in tsv_like()) {
        graph_roundtrip(&s);
        labels_total(s.as_bytes());
        scores_roundtrip(&s);
    }
}
