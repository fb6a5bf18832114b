#![no_main]

use biasgraph::labels::parse_label_csv;
use biasgraph::{PoliticalFold, Task};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for task in [Task::Political, Task::Factual] {
        for fold in [PoliticalFold::default(), PoliticalFold::toward_center()] {
            let _ = parse_label_csv(data, task, &fold);
        }
    }
});
