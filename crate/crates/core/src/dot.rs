//! Graphviz rendering of a scored neighborhood.
//!
//! Nodes are red when `rho < 0`, blue when `rho > 0`, gray at zero. Node
//! width is `0.2 + 1.8 |rho| / max |rho|` over the subgraph; edge pen width
//! is proportional to the edge weight.

use std::fmt::Write as _;

use crate::classify::classify_binary;
use crate::error::{Error, Result};
use crate::graph::MediaGraph;
use crate::labels::Task;
use crate::scores::ScoreVector;

pub const MIN_WIDTH: f64 = 0.2;
pub const MAX_WIDTH: f64 = 2.0;
/// Pen width of an edge with weight 1.
pub const PEN_SCALE: f64 = 4.0;

pub fn node_width(score: f64, max_abs: f64) -> f64 {
    if max_abs > 0.0 {
        MIN_WIDTH + (MAX_WIDTH - MIN_WIDTH) * score.abs() / max_abs
    } else {
        MIN_WIDTH
    }
}

fn color(score: f64) -> &'static str {
    if score < 0.0 {
        "red"
    } else if score > 0.0 {
        "blue"
    } else {
        "gray"
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_dot(sub: &MediaGraph, scores: &ScoreVector, task: Task, header: &[String]) -> Result<String> {
    let values = sub
        .nodes()
        .iter()
        .map(|n| scores.get(n).ok_or_else(|| Error::MissingScore(n.to_string())))
        .collect::<Result<Vec<f64>>>()?;
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "// {h}");
    }
    out.push_str("digraph media {\n");
    out.push_str("  node [shape=circle, style=filled, fixedsize=true, fontsize=10];\n");
    for (node, &v) in sub.nodes().iter().zip(&values) {
        let _ = writeln!(
            out,
            "  {} [fillcolor={}, width={:.4}, tooltip={}];",
            quote(node.as_str()),
            color(v),
            node_width(v, max_abs),
            quote(&format!("{} rho={:.6e}", classify_binary(v, task), v)),
        );
    }
    for (s, d, w) in sub.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [penwidth={:.4}, weight={w:?}];",
            quote(s.as_str()),
            quote(d.as_str()),
            PEN_SCALE * w,
        );
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::subgraph_neighborhood;
    use crate::graph::tests::{g1, id};

    fn attr(dot: &str, node: &str, key: &str) -> String {
        let line = dot.lines().find(|l| l.trim_start().starts_with(&format!("\"{node}\" ["))).unwrap();
        let start = line.find(&format!("{key}=")).unwrap() + key.len() + 1;
        line[start..].split([',', ']']).next().unwrap().to_string()
    }

    #[test]
    fn colors_and_widths_on_g1() {
        let g = g1();
        let scores = ScoreVector::new([(id("a.com"), 0.0), (id("b.com"), 2.0), (id("c.com"), -1.0)]).unwrap();
        let dot = export_dot(&g, &scores, Task::Political, &[]).unwrap();
        assert_eq!(attr(&dot, "a.com", "fillcolor"), "gray");
        assert_eq!(attr(&dot, "b.com", "fillcolor"), "blue");
        assert_eq!(attr(&dot, "c.com", "fillcolor"), "red");
        let width = |n| attr(&dot, n, "width").parse::<f64>().unwrap();
        assert!((width("a.com") - 0.2).abs() < 1e-12);
        assert!((width("b.com") - 2.0).abs() < 1e-12);
        assert!((width("c.com") - 1.1).abs() < 1e-12);
        assert!(dot.contains("\"a.com\" -> \"b.com\" [penwidth=4.0000"));
    }

    #[test]
    fn empty_and_missing() {
        let g = g1();
        let sub = subgraph_neighborhood(&g, &id("a.com"), 1).unwrap();
        let partial = ScoreVector::new([(id("a.com"), 1.0)]).unwrap();
        assert!(matches!(export_dot(&sub, &partial, Task::Factual, &[]), Err(Error::MissingScore(n)) if n == "b.com"));
        let all_zero = ScoreVector::new([(id("a.com"), 0.0), (id("b.com"), 0.0)]).unwrap();
        let dot = export_dot(&sub, &all_zero, Task::Factual, &["hdr".into()]).unwrap();
        assert!(dot.starts_with("// hdr\ndigraph media {"));
        assert_eq!(attr(&dot, "b.com", "width"), "0.2000");

        let empty = export_dot(&MediaGraph::empty(), &all_zero, Task::Factual, &[]).unwrap();
        assert_eq!(empty.lines().count(), 3);
        assert!(!empty.contains("->"));
    }
}
