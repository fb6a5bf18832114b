//! Per-source score vectors and their CSV form (`domain,score`).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{normalize_domain, SourceId};
use crate::error::{Error, Result};
use crate::propagation::Strategy;

/// How a score vector was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub gamma: f64,
    pub n: usize,
    pub tolerance: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm fixed-point residual of the returned vector (F and P);
    /// the larger component residual for FP; zero for I.
    pub residual: f64,
}

/// Real-valued property estimate `rho(s)` for a set of sources.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    nodes: Vec<SourceId>,
    values: Vec<f64>,
    strategy: Option<Strategy>,
    info: Option<SolveInfo>,
}

impl ScoreVector {
    /// Entries must be finite; duplicates are rejected.
    pub fn new(entries: impl IntoIterator<Item = (SourceId, f64)>) -> Result<Self> {
        let mut pairs: Vec<(SourceId, f64)> = entries.into_iter().collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidConfig(format!("duplicate score for {}", w[0].0)));
        }
        if pairs.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let (nodes, values) = pairs.into_iter().unzip();
        Ok(ScoreVector {
            nodes,
            values,
            strategy: None,
            info: None,
        })
    }

    /// `nodes` must be sorted and unique (a graph's node list is).
    pub(crate) fn from_parts(
        nodes: Vec<SourceId>,
        values: Vec<f64>,
        strategy: Strategy,
        info: SolveInfo,
    ) -> Result<Self> {
        debug_assert_eq!(nodes.len(), values.len());
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ScoreVector {
            nodes,
            values,
            strategy: Some(strategy),
            info: Some(info),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn strategy(&self) -> Option<Strategy> {
        self.strategy
    }

    pub fn info(&self) -> Option<&SolveInfo> {
        self.info.as_ref()
    }

    pub fn converged(&self) -> bool {
        self.info.as_ref().is_none_or(|i| i.converged)
    }

    /// Turn a non-converged result into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        match &self.info {
            Some(info) if !info.converged => Err(Error::NotConverged {
                iterations: info.iterations,
                residual: info.residual,
            }),
            _ => Ok(self),
        }
    }

    pub fn get(&self, id: &SourceId) -> Option<f64> {
        self.nodes.binary_search(id).ok().map(|i| self.values[i])
    }

    /// Score of `id`, or 0 when the source is unknown.
    pub fn get_or_zero(&self, id: &SourceId) -> f64 {
        self.get(id).unwrap_or(0.0)
    }

    pub fn nodes(&self) -> &[SourceId] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SourceId, f64)> + '_ {
        self.nodes.iter().zip(self.values.iter().copied())
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_score(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_scores(scores: &ScoreVector, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    out.push_str("domain,score\n");
    for (id, v) in scores.iter() {
        let _ = writeln!(out, "{id},{}", format_score(v));
    }
    out
}

pub fn parse_scores(text: &str) -> Result<ScoreVector> {
    let mut entries = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(domain), Some(score)) = (fields.next(), fields.next()) else {
            return Err(Error::parse(line_no, "expected domain,score"));
        };
        if !seen_header {
            seen_header = true;
            if domain.trim().eq_ignore_ascii_case("domain") {
                continue;
            }
        }
        let id = normalize_domain(domain).map_err(|e| Error::parse(line_no, e.to_string()))?;
        let v: f64 = score
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid score {score:?}")))?;
        if !v.is_finite() {
            return Err(Error::parse(line_no, "non-finite score"));
        }
        entries.push((id, v));
    }
    ScoreVector::new(entries)
}

pub fn load_scores(path: &Path) -> Result<ScoreVector> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text).map_err(|e| e.with_path(path))
}
