//! Profile news-media sources by political bias and factual reporting from
//! nothing but their hyperlink graph.
//!
//! Known labels become rewards (`+1` for Right/High, `-1` for Left/Low),
//! rewards are propagated over the weighted source graph by one of four
//! strategies, and the resulting scores are thresholded into labels.
//!
//! ```
//! use biasgraph::{build_graph, EdgeRecord, LabeledDataset, Label, Task, PoliticalLabel};
//! use biasgraph::{normalize_domain, rewards_from_labels, propagate, Strategy, PropagationConfig};
//!
//! let g = build_graph(&[
//!     EdgeRecord::count("left-a.com", "unknown.com", 3),
//!     EdgeRecord::count("left-b.com", "unknown.com", 1),
//! ]).unwrap();
//! let labels = LabeledDataset::from_labels(Task::Political, [
//!     (normalize_domain("left-a.com").unwrap(), Label::Political(PoliticalLabel::Left)),
//!     (normalize_domain("left-b.com").unwrap(), Label::Political(PoliticalLabel::Left)),
//! ]).unwrap();
//! let r = rewards_from_labels(&labels, None);
//! let rho = propagate(&g, &r, Strategy::P, &PropagationConfig::default()).unwrap();
//! assert!(rho.get(&normalize_domain("unknown.com").unwrap()).unwrap() < 0.0);
//! ```

pub mod classify;
pub mod cli;
pub mod domain;
pub mod dot;
pub mod error;
pub mod eval;
pub mod graph;
pub mod labels;
pub mod propagation;
pub mod provenance;
pub mod scores;

pub use classify::{classify_binary, classify_ternary, fit_epsilon, ClassifierConfig, Mode};
pub use domain::{normalize_domain, SourceId};
pub use error::{Error, Result};
pub use graph::{build_graph, load_graph, save_graph, subgraph_neighborhood, EdgeRecord, EdgeValue, MediaGraph};
pub use labels::{
    parse_labels, rewards_from_labels, FactualLabel, Label, LabeledDataset, PoliticalFold, PoliticalLabel,
    RewardVector, Split, Task,
};
pub use propagation::{
    f_propagate, fp_propagate, i_propagate, p_propagate, propagate, solve_linear_oracle, Direction,
    PropagationConfig, Strategy,
};
pub use scores::{ScoreVector, SolveInfo};
