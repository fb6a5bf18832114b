//! The weighted directed source graph.
//!
//! An edge `s -> s'` carries the proportion of all hyperlinks found on `s`
//! that point to `s'`, so every non-empty out-row sums to one. Nodes are
//! stored in lexicographic order and both adjacency lists are sorted by
//! neighbor index, which fixes the summation order of every propagation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::domain::{normalize_domain, SourceId};
use crate::error::{Error, Result};

/// Row sums of a normalized graph must equal one within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Header marking a serialized graph whose values are already weights.
pub const NORMALIZED_HEADER: &str = "# normalized";
/// Header marking a serialized neighborhood (weights keep their global values).
pub const NEIGHBORHOOD_HEADER: &str = "# normalized neighborhood";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeValue {
    /// Raw hyperlink count.
    Count(u64),
    /// Pre-normalized weight in `[0, 1]`.
    Weight(f64),
}

/// One ingestion row: `src -> dst` with a hyperlink count or a weight.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeRecord {
    pub src_raw: String,
    pub dst_raw: String,
    pub value: EdgeValue,
}

impl EdgeRecord {
    pub fn count(src: impl Into<String>, dst: impl Into<String>, count: u64) -> Self {
        EdgeRecord {
            src_raw: src.into(),
            dst_raw: dst.into(),
            value: EdgeValue::Count(count),
        }
    }

    pub fn weight(src: impl Into<String>, dst: impl Into<String>, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidEdge(format!("weight {weight} outside [0, 1]")));
        }
        Ok(EdgeRecord {
            src_raw: src.into(),
            dst_raw: dst.into(),
            value: EdgeValue::Weight(weight),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// Every non-empty row sums to one.
    Full,
    /// Induced subgraph of a full graph; rows may sum to less than one.
    Neighborhood,
}

/// Immutable weighted directed graph `G = <S, E, w>` with `P(s, s') = w(s, s')`.
#[derive(Clone, Debug, PartialEq)]
pub struct MediaGraph {
    nodes: Vec<SourceId>,
    out_edges: Vec<Vec<(usize, f64)>>,
    in_edges: Vec<Vec<(usize, f64)>>,
    kind: GraphKind,
}

impl MediaGraph {
    fn from_rows(nodes: Vec<SourceId>, out_edges: Vec<Vec<(usize, f64)>>, kind: GraphKind) -> Self {
        let mut in_edges = vec![Vec::new(); nodes.len()];
        // Sources are visited in ascending order, so each in-list ends up sorted.
        for (src, row) in out_edges.iter().enumerate() {
            for &(dst, w) in row {
                in_edges[dst].push((src, w));
            }
        }
        MediaGraph {
            nodes,
            out_edges,
            in_edges,
            kind,
        }
    }

    /// Graph with no nodes, e.g. a placeholder neighborhood.
    pub fn empty() -> Self {
        MediaGraph::from_rows(Vec::new(), Vec::new(), GraphKind::Neighborhood)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    /// Nodes in lexicographic order; positions are the node indices.
    pub fn nodes(&self) -> &[SourceId] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &SourceId {
        &self.nodes[index]
    }

    pub fn index_of(&self, id: &SourceId) -> Option<usize> {
        self.nodes.binary_search(id).ok()
    }

    pub fn contains(&self, id: &SourceId) -> bool {
        self.index_of(id).is_some()
    }

    /// `(target index, weight)` pairs sorted by target.
    pub fn out_edges(&self, index: usize) -> &[(usize, f64)] {
        &self.out_edges[index]
    }

    /// `(source index, weight)` pairs sorted by source.
    pub fn in_edges(&self, index: usize) -> &[(usize, f64)] {
        &self.in_edges[index]
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub fn weight(&self, src: &SourceId, dst: &SourceId) -> Option<f64> {
        let (s, d) = (self.index_of(src)?, self.index_of(dst)?);
        let row = &self.out_edges[s];
        row.binary_search_by_key(&d, |&(t, _)| t).ok().map(|i| row[i].1)
    }

    /// All edges as `(src, dst, weight)` in (src, dst) order.
    pub fn edges(&self) -> impl Iterator<Item = (&SourceId, &SourceId, f64)> + '_ {
        self.out_edges.iter().enumerate().flat_map(move |(s, row)| {
            row.iter().map(move |&(d, w)| (&self.nodes[s], &self.nodes[d], w))
        })
    }

    pub fn row_sum(&self, index: usize) -> f64 {
        self.out_edges[index].iter().map(|&(_, w)| w).sum()
    }
}

/// Aggregate hyperlink records into a row-normalized graph.
///
/// Records are keyed by their normalized domains. Self-loops and zero-valued
/// edges are dropped before normalization; only endpoints of surviving edges
/// become nodes.
pub fn build_graph(records: &[EdgeRecord]) -> Result<MediaGraph> {
    #[derive(Default)]
    struct Agg {
        count: u64,
        weights: Vec<f64>,
    }

    let mut agg: BTreeMap<(SourceId, SourceId), Agg> = BTreeMap::new();
    for rec in records {
        let src = normalize_domain(&rec.src_raw)?;
        let dst = normalize_domain(&rec.dst_raw)?;
        if src == dst {
            continue;
        }
        let entry = agg.entry((src, dst)).or_default();
        match rec.value {
            EdgeValue::Count(c) => {
                entry.count = entry
                    .count
                    .checked_add(c)
                    .ok_or_else(|| Error::InvalidEdge("hyperlink count overflow".into()))?;
            }
            EdgeValue::Weight(w) => {
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidEdge(format!("weight {w} outside [0, 1]")));
                }
                entry.weights.push(w);
            }
        }
    }

    let mut totals: BTreeMap<(SourceId, SourceId), f64> = BTreeMap::new();
    for (key, mut a) in agg {
        // Sorting makes the float sum independent of record order.
        a.weights.sort_by(f64::total_cmp);
        let total = a.count as f64 + a.weights.iter().sum::<f64>();
        if total > 0.0 {
            totals.insert(key, total);
        }
    }
    if totals.is_empty() {
        return Err(Error::NoEdges);
    }

    let nodes: Vec<SourceId> = totals
        .keys()
        .flat_map(|(s, d)| [s.clone(), d.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |id: &SourceId| nodes.binary_search(id).expect("node collected above");

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nodes.len()];
    for ((s, d), total) in &totals {
        rows[index(s)].push((index(d), *total));
    }
    for row in &mut rows {
        let sum: f64 = row.iter().map(|&(_, v)| v).sum();
        for (_, v) in row.iter_mut() {
            *v /= sum;
        }
    }
    Ok(MediaGraph::from_rows(nodes, rows, GraphKind::Full))
}

/// Induced subgraph around `seed`: every node within `radius` hops, ignoring
/// edge direction. Weights keep their values from the full graph.
pub fn subgraph_neighborhood(g: &MediaGraph, seed: &SourceId, radius: usize) -> Result<MediaGraph> {
    let start = g
        .index_of(seed)
        .ok_or_else(|| Error::UnknownSource(seed.to_string()))?;
    if radius == 0 {
        return Err(Error::InvalidConfig("radius must be at least 1".into()));
    }

    let mut dist = vec![usize::MAX; g.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == radius {
            continue;
        }
        let neighbors = g.out_edges(u).iter().chain(g.in_edges(u)).map(|&(v, _)| v);
        for v in neighbors {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }

    let kept: Vec<usize> = (0..g.len()).filter(|&i| dist[i] != usize::MAX).collect();
    let mut remap = vec![usize::MAX; g.len()];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new;
    }
    let nodes = kept.iter().map(|&i| g.node(i).clone()).collect();
    let rows = kept
        .iter()
        .map(|&i| {
            g.out_edges(i)
                .iter()
                .filter(|&&(d, _)| remap[d] != usize::MAX)
                .map(|&(d, w)| (remap[d], w))
                .collect()
        })
        .collect();
    Ok(MediaGraph::from_rows(nodes, rows, GraphKind::Neighborhood))
}

/// Parse an edge file.
///
/// Without a `# normalized` header each line is `src<TAB>dst<TAB>count` and
/// the graph is built by [`build_graph`]. With the header the third column is
/// an already-normalized weight and the rows are taken verbatim.
pub fn parse_graph(text: &str) -> Result<MediaGraph> {
    let mut kind = None;
    let mut triples = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim_end_matches('\r');
        if let Some(comment) = line.strip_prefix('#') {
            match comment.trim() {
                "normalized" => kind = Some(GraphKind::Full),
                "normalized neighborhood" => kind = Some(GraphKind::Neighborhood),
                _ => {}
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 || fields.iter().any(|f| f.trim().is_empty()) {
            return Err(Error::parse(
                line_no,
                format!("expected src<TAB>dst<TAB>value, got {} field(s)", fields.len()),
            ));
        }
        let src = normalize_domain(fields[0]).map_err(|e| Error::parse(line_no, e.to_string()))?;
        let dst = normalize_domain(fields[1]).map_err(|e| Error::parse(line_no, e.to_string()))?;
        triples.push((line_no, src, dst, fields[2].trim()));
    }

    match kind {
        None => {
            let records = triples
                .into_iter()
                .map(|(line_no, s, d, v)| {
                    let count: u64 = v
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("invalid hyperlink count {v:?}")))?;
                    Ok(EdgeRecord::count(String::from(s), String::from(d), count))
                })
                .collect::<Result<Vec<_>>>()?;
            build_graph(&records)
        }
        Some(kind) => from_weighted(triples, kind),
    }
}

fn from_weighted(triples: Vec<(usize, SourceId, SourceId, &str)>, kind: GraphKind) -> Result<MediaGraph> {
    let mut edges: BTreeMap<(SourceId, SourceId), f64> = BTreeMap::new();
    for (line_no, s, d, v) in triples {
        let w: f64 = v
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid weight {v:?}")))?;
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::parse(line_no, format!("weight {v} outside (0, 1]")));
        }
        if s == d {
            return Err(Error::parse(line_no, "self-loop in normalized graph"));
        }
        if edges.insert((s, d), w).is_some() {
            return Err(Error::parse(line_no, "duplicate edge"));
        }
    }
    if edges.is_empty() {
        return Err(Error::NoEdges);
    }
    let nodes: Vec<SourceId> = edges
        .keys()
        .flat_map(|(s, d)| [s.clone(), d.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rows = vec![Vec::new(); nodes.len()];
    for ((s, d), w) in edges {
        let si = nodes.binary_search(&s).unwrap();
        let di = nodes.binary_search(&d).unwrap();
        rows[si].push((di, w));
    }
    let g = MediaGraph::from_rows(nodes, rows, kind);
    for i in 0..g.len() {
        let sum = g.row_sum(i);
        let bad = match kind {
            GraphKind::Full => (sum - 1.0).abs() >= ROW_SUM_TOLERANCE,
            GraphKind::Neighborhood => sum > 1.0 + ROW_SUM_TOLERANCE,
        };
        if !g.out_edges(i).is_empty() && bad {
            return Err(Error::InvalidEdge(format!(
                "out-weights of {} sum to {sum}",
                g.node(i)
            )));
        }
    }
    Ok(g)
}

/// Serialize with weights at full round-trip precision. `header` lines are
/// written as `#` comments after the format marker.
pub fn format_graph(g: &MediaGraph, header: &[String]) -> String {
    let mut out = String::new();
    out.push_str(match g.kind {
        GraphKind::Full => NORMALIZED_HEADER,
        GraphKind::Neighborhood => NEIGHBORHOOD_HEADER,
    });
    out.push('\n');
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    for (s, d, w) in g.edges() {
        let _ = writeln!(out, "{s}\t{d}\t{w:?}");
    }
    out
}

pub fn load_graph(path: &Path) -> Result<MediaGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text).map_err(|e| e.with_path(path))
}

pub fn save_graph(g: &MediaGraph, path: &Path) -> Result<()> {
    std::fs::write(path, format_graph(g, &[])).map_err(|e| Error::io(path, e))
}
