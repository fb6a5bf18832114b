//! Task labels, raw-category aggregation, and the reward function `r(s)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{normalize_domain, SourceId};
use crate::error::{Error, Result};
use crate::graph::MediaGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Political,
    Factual,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "political" | "bias" => Ok(Task::Political),
            "factual" | "factuality" => Ok(Task::Factual),
            other => Err(Error::InvalidConfig(format!("unknown task {other:?}"))),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Political => "political",
            Task::Factual => "factual",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PoliticalLabel {
    Left,
    Center,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FactualLabel {
    Low,
    Mixed,
    High,
}

/// A label of either task. Ordering follows the ordinal code within a task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Political(PoliticalLabel),
    Factual(FactualLabel),
}

impl Label {
    pub fn task(self) -> Task {
        match self {
            Label::Political(_) => Task::Political,
            Label::Factual(_) => Task::Factual,
        }
    }

    /// Ordinal code: Left/Low = 0, Center/Mixed = 1, Right/High = 2.
    pub fn ordinal(self) -> u8 {
        match self {
            Label::Political(p) => p as u8,
            Label::Factual(f) => f as u8,
        }
    }

    pub fn from_ordinal(task: Task, code: u8) -> Option<Label> {
        use FactualLabel::*;
        use PoliticalLabel::*;
        Some(match (task, code) {
            (Task::Political, 0) => Label::Political(Left),
            (Task::Political, 1) => Label::Political(Center),
            (Task::Political, 2) => Label::Political(Right),
            (Task::Factual, 0) => Label::Factual(Low),
            (Task::Factual, 1) => Label::Factual(Mixed),
            (Task::Factual, 2) => Label::Factual(High),
            _ => return None,
        })
    }

    pub fn negative(task: Task) -> Label {
        Label::from_ordinal(task, 0).unwrap()
    }

    pub fn neutral(task: Task) -> Label {
        Label::from_ordinal(task, 1).unwrap()
    }

    pub fn positive(task: Task) -> Label {
        Label::from_ordinal(task, 2).unwrap()
    }

    /// Classes scored by binary evaluation, in ordinal order.
    pub fn binary_classes(task: Task) -> [Label; 2] {
        [Label::negative(task), Label::positive(task)]
    }

    pub fn ternary_classes(task: Task) -> [Label; 3] {
        [Label::negative(task), Label::neutral(task), Label::positive(task)]
    }

    /// Lowercase class name, used in metric field names (`f1_high`).
    pub fn name(self) -> &'static str {
        match self {
            Label::Political(PoliticalLabel::Left) => "left",
            Label::Political(PoliticalLabel::Center) => "center",
            Label::Political(PoliticalLabel::Right) => "right",
            Label::Factual(FactualLabel::Low) => "low",
            Label::Factual(FactualLabel::Mixed) => "mixed",
            Label::Factual(FactualLabel::High) => "high",
        }
    }

    /// Reward sign: +1 for Right/High, -1 for Left/Low, 0 otherwise.
    pub fn reward(self) -> i8 {
        self.ordinal() as i8 - 1
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How raw political categories map onto the three final classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoliticalFold {
    pub left_center: PoliticalLabel,
    pub right_center: PoliticalLabel,
}

impl Default for PoliticalFold {
    fn default() -> Self {
        PoliticalFold {
            left_center: PoliticalLabel::Left,
            right_center: PoliticalLabel::Right,
        }
    }
}

impl PoliticalFold {
    /// Leaning categories collapse into Center instead.
    pub fn toward_center() -> Self {
        PoliticalFold {
            left_center: PoliticalLabel::Center,
            right_center: PoliticalLabel::Center,
        }
    }
}

/// Map a raw category (case-insensitive) to a final label of `task`.
pub fn parse_raw_label(raw: &str, task: Task, fold: &PoliticalFold) -> Option<Label> {
    let key = raw.trim().to_lowercase().replace(['_', ' '], "-");
    match task {
        Task::Political => {
            let p = match key.as_str() {
                "left" => PoliticalLabel::Left,
                "left-center" => fold.left_center,
                "center" => PoliticalLabel::Center,
                "right-center" => fold.right_center,
                "right" => PoliticalLabel::Right,
                _ => return None,
            };
            Some(Label::Political(p))
        }
        Task::Factual => {
            let f = match key.as_str() {
                "very-low" | "low" => FactualLabel::Low,
                "mixed" => FactualLabel::Mixed,
                "high" | "very-high" => FactualLabel::High,
                _ => return None,
            };
            Some(Label::Factual(f))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

/// Gold labels of one task keyed by canonical domain.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    task: Task,
    labels: BTreeMap<SourceId, Label>,
    splits: Option<BTreeMap<SourceId, Split>>,
}

impl LabeledDataset {
    pub fn new(task: Task) -> Self {
        LabeledDataset {
            task,
            labels: BTreeMap::new(),
            splits: None,
        }
    }

    /// Build from already-canonical entries. Labels of the wrong task are rejected.
    pub fn from_labels(task: Task, entries: impl IntoIterator<Item = (SourceId, Label)>) -> Result<Self> {
        let mut ds = LabeledDataset::new(task);
        for (id, label) in entries {
            ds.insert(id, label)?;
        }
        Ok(ds)
    }

    fn insert(&mut self, id: SourceId, label: Label) -> Result<()> {
        if label.task() != self.task {
            return Err(Error::InvalidConfig(format!(
                "{label} is not a {} label",
                self.task
            )));
        }
        match self.labels.get(&id) {
            Some(&prev) if prev != label => Err(Error::DuplicateDomain {
                domain: id.to_string(),
                first: prev.to_string(),
                second: label.to_string(),
            }),
            _ => {
                self.labels.insert(id, label);
                Ok(())
            }
        }
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, id: &SourceId) -> Option<Label> {
        self.labels.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SourceId, Label)> + '_ {
        self.labels.iter().map(|(k, &v)| (k, v))
    }

    pub fn split_of(&self, id: &SourceId) -> Option<Split> {
        self.splits.as_ref()?.get(id).copied()
    }

    /// Tag every source with `split`.
    pub fn with_split(mut self, split: Split) -> Self {
        self.splits = Some(self.labels.keys().map(|k| (k.clone(), split)).collect());
        self
    }

    /// Number of sources per class, in ordinal order.
    pub fn class_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts: BTreeMap<Label, usize> =
            Label::ternary_classes(self.task).into_iter().map(|l| (l, 0)).collect();
        for (_, l) in self.iter() {
            *counts.entry(l).or_default() += 1;
        }
        counts
    }

    /// Keep only sources whose label is in `classes`.
    pub fn restrict_to(&self, classes: &[Label]) -> LabeledDataset {
        LabeledDataset {
            task: self.task,
            labels: self
                .labels
                .iter()
                .filter(|(_, l)| classes.contains(l))
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
            splits: self.splits.as_ref().map(|s| {
                s.iter()
                    .filter(|(k, _)| self.labels.get(*k).is_some_and(|l| classes.contains(l)))
                    .map(|(k, &v)| (k.clone(), v))
                    .collect()
            }),
        }
    }

    /// Union of disjoint-or-agreeing datasets of the same task.
    pub fn merge(&self, other: &LabeledDataset) -> Result<LabeledDataset> {
        if other.task != self.task {
            return Err(Error::InvalidConfig("cannot merge datasets of different tasks".into()));
        }
        let mut out = self.clone();
        for (id, l) in other.iter() {
            out.insert(id.clone(), l)?;
        }
        match (&mut out.splits, &other.splits) {
            (Some(mine), Some(theirs)) => mine.extend(theirs.iter().map(|(k, &v)| (k.clone(), v))),
            (slot @ None, Some(theirs)) if self.is_empty() => *slot = Some(theirs.clone()),
            _ => out.splits = None,
        }
        Ok(out)
    }
}

/// Parse `(domain, raw label)` rows; row numbers in errors are 1-based.
pub fn parse_labels<'a>(
    rows: impl IntoIterator<Item = (&'a str, &'a str)>,
    task: Task,
    fold: &PoliticalFold,
) -> Result<LabeledDataset> {
    let mut ds = LabeledDataset::new(task);
    for (i, (domain_raw, label_raw)) in rows.into_iter().enumerate() {
        let label = parse_raw_label(label_raw, task, fold).ok_or_else(|| Error::UnknownLabel {
            row: i + 1,
            domain: domain_raw.trim().to_string(),
            label: label_raw.to_string(),
        })?;
        ds.insert(normalize_domain(domain_raw)?, label)?;
    }
    Ok(ds)
}

/// Parse a label CSV for `task`.
///
/// Accepts the combined layout (`domain,political,factual`, empty cell means
/// no label for that task) and the split layout (`domain,label`). Lines
/// starting with `#` are comments.
pub fn parse_label_csv<R: Read>(reader: R, task: Task, fold: &PoliticalFold) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let domain_col = col("domain").ok_or_else(|| Error::parse(1, "missing `domain` column"))?;
    let label_col = col(&task.to_string())
        .or_else(|| col("label"))
        .ok_or_else(|| Error::parse(1, format!("missing `{task}` or `label` column")))?;

    let mut ds = LabeledDataset::new(task);
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let domain = rec.get(domain_col).unwrap_or("");
        let raw = rec.get(label_col).unwrap_or("");
        if raw.is_empty() {
            continue;
        }
        let label = parse_raw_label(raw, task, fold).ok_or_else(|| Error::UnknownLabel {
            row: line,
            domain: domain.to_string(),
            label: raw.to_string(),
        })?;
        let id = normalize_domain(domain).map_err(|e| Error::parse(line, e.to_string()))?;
        ds.insert(id, label)?;
    }
    Ok(ds)
}

pub fn load_labels(path: &Path, task: Task, fold: &PoliticalFold) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_label_csv(std::io::BufReader::new(file), task, fold).map_err(|e| e.with_path(path))
}

pub fn load_split(path: &Path, task: Task, split: Split, fold: &PoliticalFold) -> Result<LabeledDataset> {
    Ok(load_labels(path, task, fold)?.with_split(split))
}

/// Per-source reward in {-1, 0, +1}; absent sources have reward 0.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardVector {
    task: Task,
    values: BTreeMap<SourceId, i8>,
}

impl RewardVector {
    pub fn empty(task: Task) -> Self {
        RewardVector {
            task,
            values: BTreeMap::new(),
        }
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn get(&self, id: &SourceId) -> i8 {
        self.values.get(id).copied().unwrap_or(0)
    }

    /// Sources with a nonzero reward.
    pub fn nonzero(&self) -> impl Iterator<Item = (&SourceId, i8)> + '_ {
        self.values.iter().map(|(k, &v)| (k, v))
    }

    pub fn count(&self, value: i8) -> usize {
        self.values.values().filter(|&&v| v == value).count()
    }

    /// Rewards aligned with the node order of `g`.
    pub fn dense(&self, g: &MediaGraph) -> Vec<f64> {
        g.nodes().iter().map(|n| f64::from(self.get(n))).collect()
    }
}

/// `r(s) = 1` for High/Right, `-1` for Low/Left, `0` otherwise. When
/// `include` is given, labeled sources outside it get 0.
pub fn rewards_from_labels(ds: &LabeledDataset, include: Option<&BTreeSet<SourceId>>) -> RewardVector {
    let values = ds
        .iter()
        .filter(|(id, _)| include.is_none_or(|inc| inc.contains(*id)))
        .map(|(id, l)| (id.clone(), l.reward()))
        .filter(|&(_, r)| r != 0)
        .collect();
    RewardVector {
        task: ds.task(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id(s: &str) -> SourceId {
        normalize_domain(s).unwrap()
    }

    #[test]
    fn aggregates_raw_categories() {
        let fold = PoliticalFold::default();
        let ds = parse_labels(
            [("x.com", "very high"), ("y.com", "mixed"), ("w.com", "Very Low")],
            Task::Factual,
            &fold,
        )
        .unwrap();
        assert_eq!(ds.get(&id("x.com")), Some(Label::Factual(FactualLabel::High)));
        assert_eq!(ds.get(&id("y.com")), Some(Label::Factual(FactualLabel::Mixed)));
        assert_eq!(ds.get(&id("w.com")), Some(Label::Factual(FactualLabel::Low)));
    }

    #[test]
    fn political_fold_is_configurable() {
        let rows = [("a.com", "left-center"), ("b.com", "Right-Center")];
        let ds = parse_labels(rows, Task::Political, &PoliticalFold::default()).unwrap();
        assert_eq!(ds.get(&id("a.com")), Some(Label::Political(PoliticalLabel::Left)));
        assert_eq!(ds.get(&id("b.com")), Some(Label::Political(PoliticalLabel::Right)));
        let ds = parse_labels(rows, Task::Political, &PoliticalFold::toward_center()).unwrap();
        assert_eq!(ds.get(&id("a.com")), Some(Label::Political(PoliticalLabel::Center)));
    }

    #[test]
    fn rejects_unknown_and_conflicting() {
        let fold = PoliticalFold::default();
        let err = parse_labels([("z.com", "centre")], Task::Political, &fold).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel { row: 1, .. }));
        let err = parse_labels([("a.com", "high"), ("www.a.com", "low")], Task::Factual, &fold).unwrap_err();
        assert!(matches!(err, Error::DuplicateDomain { .. }));
        // Same label twice is fine.
        let ds = parse_labels([("a.com", "high"), ("www.a.com", "very high")], Task::Factual, &fold).unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn reward_rule() {
        let ds = parse_labels(
            [("a.com", "high"), ("b.com", "low"), ("c.com", "mixed")],
            Task::Factual,
            &PoliticalFold::default(),
        )
        .unwrap();
        let r = rewards_from_labels(&ds, None);
        assert_eq!((r.get(&id("a.com")), r.get(&id("b.com")), r.get(&id("c.com"))), (1, -1, 0));

        let ds = parse_labels([("a.com", "right"), ("b.com", "left")], Task::Political, &PoliticalFold::default())
            .unwrap();
        let include = BTreeSet::from([id("a.com")]);
        let r = rewards_from_labels(&ds, Some(&include));
        assert_eq!((r.get(&id("a.com")), r.get(&id("b.com"))), (1, 0));

        let r = rewards_from_labels(&LabeledDataset::new(Task::Political), None);
        assert_eq!(r.nonzero().count(), 0);
    }

    #[test]
    fn csv_layouts() {
        let text = "domain,political,factual\n# comment\na.com,left,high\nb.com,,low\nc.com,right-center,\n";
        let pol = parse_label_csv(text.as_bytes(), Task::Political, &PoliticalFold::default()).unwrap();
        assert_eq!(pol.len(), 2);
        let fac = parse_label_csv(text.as_bytes(), Task::Factual, &PoliticalFold::default()).unwrap();
        assert_eq!(fac.len(), 2);

        let split = "domain,label\nx.org,center\ny.org,left\n";
        let ds = parse_label_csv(split.as_bytes(), Task::Political, &PoliticalFold::default())
            .unwrap()
            .with_split(Split::Dev);
        assert_eq!(ds.split_of(&id("x.org")), Some(Split::Dev));

        let bad = "domain,label\nx.org,centre\n";
        assert!(matches!(
            parse_label_csv(bad.as_bytes(), Task::Political, &PoliticalFold::default()),
            Err(Error::UnknownLabel { row: 2, .. })
        ));
    }

    fn arb_dataset() -> impl Strategy<Value = (Vec<u8>, Vec<bool>)> {
        (1usize..30).prop_flat_map(|n| (prop::collection::vec(0u8..3, n), prop::collection::vec(any::<bool>(), n)))
    }

    proptest! {
        #[test]
        fn reward_counts_match_included_labels((codes, mask) in arb_dataset(), political in any::<bool>()) {
            let task = if political { Task::Political } else { Task::Factual };
            let ds = LabeledDataset::from_labels(
                task,
                codes.iter().enumerate().map(|(i, &c)| (id(&format!("s{i}.net")), Label::from_ordinal(task, c).unwrap())),
            ).unwrap();
            let include: BTreeSet<SourceId> = mask.iter().enumerate()
                .filter(|(_, &m)| m).map(|(i, _)| id(&format!("s{i}.net"))).collect();
            let r = rewards_from_labels(&ds, Some(&include));
            let expect = |code: u8| codes.iter().zip(&mask).filter(|&(&c, &m)| m && c == code).count();
            prop_assert_eq!(r.count(1), expect(2));
            prop_assert_eq!(r.count(-1), expect(0));
            for (s, _) in r.nonzero() {
                prop_assert!(include.contains(s));
            }
        }
    }
}
