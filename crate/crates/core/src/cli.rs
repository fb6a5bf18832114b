//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver failure
//! (non-convergence or divergence).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::classify::{ClassifierConfig, DEFAULT_EPSILON};
use crate::dot::export_dot;
use crate::error::{Error, Result};
use crate::eval::{grid_search, CrossValidation, GridRanges, Method, SplitOptions};
use crate::graph::{format_graph, load_graph, parse_graph, subgraph_neighborhood, MediaGraph};
use crate::labels::{load_labels, load_split, rewards_from_labels, LabeledDataset, PoliticalFold, Split, Task};
use crate::propagation::{propagate, PropagationConfig, Strategy};
use crate::provenance::Provenance;
use crate::scores::{format_score, format_scores, load_scores, ScoreVector};
use crate::domain::normalize_domain;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "BIASGRAPH_THREADS";

#[derive(Parser, Debug)]
#[command(name = "biasgraph", version, about = "Profile news sources from their hyperlink graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize a raw `src<TAB>dst<TAB>count` edge file into graph.tsv.
    BuildGraph {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Propagate training rewards and write scores.csv.
    Propagate {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        labels: LabelArgs,
        #[command(flatten)]
        prop: PropArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Turn scores.csv into predictions.csv.
    Classify {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[command(flatten)]
        classifier: ClassifierArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Propagate and classify in one step; optionally only for listed domains.
    Score {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        labels: LabelArgs,
        #[command(flatten)]
        prop: PropArgs,
        #[command(flatten)]
        classifier: ClassifierArgs,
        /// File with one domain per line.
        #[arg(long)]
        domains: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Stratified k-fold cross-validation (binary).
    EvalCv {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        labels: LabelArgs,
        #[command(flatten)]
        prop: PropArgs,
        #[command(flatten)]
        folds: FoldArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Train/dev/test evaluation (ternary, epsilon fitted on dev).
    EvalSplit {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        splits: SplitArgs,
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        prop: PropArgs,
        /// Add dev labels to the rewards after fitting epsilon.
        #[arg(long)]
        rewards_include_dev: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Grid search over gamma (or n) and epsilon on the dev split.
    GridSearch {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        splits: SplitArgs,
        #[command(flatten)]
        prop: PropArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Majority or random baseline under the cross-validation protocol.
    Baseline {
        #[arg(long = "labels")]
        labels_path: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long, value_enum, default_value = "political-side")]
        lean_fold: LeanFold,
        #[arg(long, value_enum, default_value = "majority")]
        kind: BaselineKind,
        #[command(flatten)]
        folds: FoldArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a Graphviz neighborhood of one source colored by score.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        seed_node: String,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long, value_enum, default_value = "political")]
        task: TaskArg,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TaskArg {
    Political,
    Factual,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Political => Task::Political,
            TaskArg::Factual => Task::Factual,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "FP", alias = "fp")]
    Fp,
    #[value(name = "I", alias = "i")]
    I,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::F => Strategy::F,
            StrategyArg::P => Strategy::P,
            StrategyArg::Fp => Strategy::FP,
            StrategyArg::I => Strategy::I,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Binary,
    Ternary,
}

/// Where raw left-center / right-center political labels go.
#[derive(Copy, Clone, Debug, ValueEnum)]
enum LeanFold {
    PoliticalSide,
    Center,
}

impl From<LeanFold> for PoliticalFold {
    fn from(f: LeanFold) -> PoliticalFold {
        match f {
            LeanFold::PoliticalSide => PoliticalFold::default(),
            LeanFold::Center => PoliticalFold::toward_center(),
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum BaselineKind {
    Majority,
    Random,
}

#[derive(Args, Debug)]
struct LabelArgs {
    /// Label CSV (`domain,political,factual` or `domain,label`).
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_enum, default_value = "political-side")]
    lean_fold: LeanFold,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    dev: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_enum, default_value = "political-side")]
    lean_fold: LeanFold,
}

#[derive(Args, Debug)]
struct PropArgs {
    #[arg(long, value_enum, default_value = "I")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0.15)]
    gamma: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long = "max-iters", default_value_t = 1000)]
    max_iters: usize,
}

impl PropArgs {
    fn config(&self) -> Result<PropagationConfig> {
        let cfg = PropagationConfig {
            gamma: self.gamma,
            n: self.n,
            tolerance: self.tolerance,
            max_iterations: self.max_iters,
            ..PropagationConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct ClassifierArgs {
    #[arg(long, value_enum, default_value = "binary")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

impl ClassifierArgs {
    fn config(&self, task: Task) -> Result<ClassifierConfig> {
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig("epsilon must be non-negative".into()));
        }
        Ok(match self.mode {
            ModeArg::Binary => ClassifierConfig::binary(task),
            ModeArg::Ternary => ClassifierConfig::ternary(task, self.epsilon),
        })
    }
}

#[derive(Args, Debug)]
struct FoldArgs {
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) => EXIT_USAGE,
        e if e.is_solver_failure() => EXIT_SOLVER,
        _ => EXIT_DATA,
    }
}

/// Run the CLI on `argv` (including the program name); returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let prov = Provenance::new(argv.get(1..).unwrap_or_default());

    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    let result = match threads.filter(|&n| n > 0) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, prov)),
            Err(e) => Err(Error::InvalidConfig(format!("thread pool: {e}"))),
        },
        None => dispatch(cli.command, prov),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("biasgraph: {e}");
            exit_code(&e)
        }
    }
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}

fn graph_input(path: &Path, prov: &mut Provenance) -> Result<MediaGraph> {
    prov.record_input(path)?;
    load_graph(path)
}

fn labels_input(path: &Path, task: Task, fold: LeanFold, prov: &mut Provenance) -> Result<LabeledDataset> {
    prov.record_input(path)?;
    load_labels(path, task, &fold.into())
}

fn split_input(path: &Path, split: Split, task: Task, fold: LeanFold, prov: &mut Provenance) -> Result<LabeledDataset> {
    prov.record_input(path)?;
    load_split(path, task, split, &fold.into())
}

fn report_files(out: &Path, report: &crate::eval::EvalReport, prov: &Provenance) -> Result<()> {
    let json = serde_json::to_string_pretty(&report.to_json(Some(prov.to_json())))?;
    write_out(out, "report.json", &(json + "\n"))?;
    let mut txt = String::new();
    for l in prov.lines() {
        let _ = writeln!(txt, "# {l}");
    }
    txt.push_str(&report.to_table());
    write_out(out, "report.txt", &txt)
}

fn predictions_csv(rows: &[(String, f64, String)], prov: &Provenance) -> String {
    let mut out = String::new();
    for l in prov.lines() {
        let _ = writeln!(out, "# {l}");
    }
    out.push_str("domain,score,label\n");
    for (d, s, l) in rows {
        let _ = writeln!(out, "{d},{},{l}", format_score(*s));
    }
    out
}

fn classify_all(scores: &ScoreVector, cfg: &ClassifierConfig) -> Vec<(String, f64, String)> {
    scores
        .iter()
        .map(|(id, s)| (id.to_string(), s, cfg.classify(s).to_string()))
        .collect()
}

fn dispatch(cmd: Command, mut prov: Provenance) -> Result<()> {
    match cmd {
        Command::BuildGraph { edges, out } => {
            prov.record_input(&edges)?;
            let text = std::fs::read_to_string(&edges).map_err(|e| Error::io(&edges, e))?;
            let g = parse_graph(&text).map_err(|e| e.with_path(&edges))?;
            write_out(&out, "graph.tsv", &format_graph(&g, &prov.lines()))?;
            log::info!("{} nodes, {} edges", g.len(), g.edge_count());
        }
        Command::Propagate { graph, labels, prop, out } => {
            let task = labels.task.into();
            let cfg = prop.config()?;
            let g = graph_input(&graph, &mut prov)?;
            let ds = labels_input(&labels.labels, task, labels.lean_fold, &mut prov)?;
            let scores = propagate(&g, &rewards_from_labels(&ds, None), prop.strategy.into(), &cfg)?
                .require_converged()?;
            write_out(&out, "scores.csv", &format_scores(&scores, &prov.lines()))?;
        }
        Command::Classify { scores, task, classifier, out } => {
            let cfg = classifier.config(task.into())?;
            prov.record_input(&scores)?;
            let sv = load_scores(&scores)?;
            write_out(&out, "predictions.csv", &predictions_csv(&classify_all(&sv, &cfg), &prov))?;
        }
        Command::Score { graph, labels, prop, classifier, domains, out } => {
            let task = labels.task.into();
            let cfg = prop.config()?;
            let ccfg = classifier.config(task)?;
            let g = graph_input(&graph, &mut prov)?;
            let ds = labels_input(&labels.labels, task, labels.lean_fold, &mut prov)?;
            let scores = propagate(&g, &rewards_from_labels(&ds, None), prop.strategy.into(), &cfg)?
                .require_converged()?;
            let rows = match domains {
                None => classify_all(&scores, &ccfg),
                Some(path) => {
                    prov.record_input(&path)?;
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    let mut rows = Vec::new();
                    for (i, line) in text.lines().enumerate() {
                        let line = line.trim();
                        if line.is_empty() || line.starts_with('#') {
                            continue;
                        }
                        let id = normalize_domain(line).map_err(|e| Error::Parse {
                            path: Some(path.clone()),
                            line: i + 1,
                            message: e.to_string(),
                        })?;
                        let s = scores.get_or_zero(&id);
                        rows.push((id.to_string(), s, ccfg.classify(s).to_string()));
                    }
                    rows
                }
            };
            write_out(&out, "predictions.csv", &predictions_csv(&rows, &prov))?;
        }
        Command::EvalCv { graph, labels, prop, folds, out } => {
            let task = labels.task.into();
            let cfg = prop.config()?;
            let g = graph_input(&graph, &mut prov)?;
            let ds = labels_input(&labels.labels, task, labels.lean_fold, &mut prov)?;
            let cv = CrossValidation {
                k: folds.k,
                seed: folds.seed,
                propagation: cfg,
            };
            let report = cv.run(Some(&g), &ds, Method::Propagation(prop.strategy.into()))?;
            report_files(&out, &report, &prov)?;
            // Report is written either way; a non-converged fold still fails the run.
            if let Some(f) = report.per_fold.iter().find(|f| !f.converged) {
                eprintln!("biasgraph: fold {} did not converge", f.fold);
                return Err(Error::NotConverged {
                    iterations: cv.propagation.max_iterations,
                    residual: f64::NAN,
                });
            }
        }
        Command::EvalSplit { graph, splits, test, prop, rewards_include_dev, out } => {
            let task = splits.task.into();
            let cfg = prop.config()?;
            let g = graph_input(&graph, &mut prov)?;
            let train = split_input(&splits.train, Split::Train, task, splits.lean_fold, &mut prov)?;
            let dev = split_input(&splits.dev, Split::Dev, task, splits.lean_fold, &mut prov)?;
            let test = split_input(&test, Split::Test, task, splits.lean_fold, &mut prov)?;
            let opts = SplitOptions {
                rewards_include_dev,
                ..SplitOptions::default()
            };
            let outcome = crate::eval::evaluate_split(&g, &train, &dev, &test, prop.strategy.into(), &cfg, &opts)?;
            report_files(&out, &outcome.report, &prov)?;
            let ccfg = ClassifierConfig::ternary(task, outcome.epsilon);
            let rows: Vec<_> = test
                .iter()
                .map(|(id, _)| {
                    let s = outcome.scores.get_or_zero(id);
                    (id.to_string(), s, ccfg.classify(s).to_string())
                })
                .collect();
            write_out(&out, "predictions.csv", &predictions_csv(&rows, &prov))?;
        }
        Command::GridSearch { graph, splits, prop, out } => {
            let task = splits.task.into();
            let cfg = prop.config()?;
            let g = graph_input(&graph, &mut prov)?;
            let train = split_input(&splits.train, Split::Train, task, splits.lean_fold, &mut prov)?;
            let dev = split_input(&splits.dev, Split::Dev, task, splits.lean_fold, &mut prov)?;
            let choice = grid_search(&g, &train, &dev, prop.strategy.into(), &cfg, &GridRanges::default())?;
            let doc = json!({
                "provenance": prov.to_json(),
                "strategy": Strategy::from(prop.strategy),
                "gamma": choice.propagation.gamma,
                "n": choice.propagation.n,
                "epsilon": choice.classifier.epsilon,
                "dev_macro_f1": choice.dev_macro_f1,
                "cells_evaluated": choice.cells_evaluated,
            });
            write_out(&out, "grid.json", &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        }
        Command::Baseline { labels_path, task, lean_fold, kind, folds, out } => {
            let ds = labels_input(&labels_path, task.into(), lean_fold, &mut prov)?;
            let method = match kind {
                BaselineKind::Majority => Method::Majority,
                BaselineKind::Random => Method::Random,
            };
            let cv = CrossValidation {
                k: folds.k,
                seed: folds.seed,
                ..CrossValidation::default()
            };
            report_files(&out, &cv.run(None, &ds, method)?, &prov)?;
        }
        Command::ExportDot { graph, scores, seed_node, radius, task, out } => {
            let g = graph_input(&graph, &mut prov)?;
            prov.record_input(&scores)?;
            let sv = load_scores(&scores)?;
            let seed = normalize_domain(&seed_node)?;
            let sub = subgraph_neighborhood(&g, &seed, radius)?;
            let dot = export_dot(&sub, &sv, task.into(), &prov.lines())?;
            write_out(&out, "neighborhood.dot", &dot)?;
        }
    }
    Ok(())
}
