//! Citation multigraph and the two paper rankings.
//!
//! Each citation instance is one directed edge `source → target` weighted by
//! its polarity score (positive 1, neutral 1/2, negative −1/2). A paper's raw
//! reliability is the sum of its incoming scores, normalized to 2 when above
//! 1, to −1 when below 0, and to 1 otherwise (which covers papers nobody
//! cites). An edge's instance score is its polarity score times the
//! normalized reliability of its *source*; a paper's M-index is the sum of
//! instance scores over its incoming edges. Reliabilities come from the raw
//! graph in a single pass, there is no iteration to a fixpoint.
//!
//! Only cited papers appear in ranked lists. Equal scores are ordered by
//! ascending paper id.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{CitationInstance, Polarity};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn polarity_score<T: Scalar>(polarity: Polarity) -> T {
    match polarity {
        Polarity::Positive => T::one(),
        Polarity::Neutral => T::half(),
        Polarity::Negative => -T::half(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub polarity: Polarity,
}

impl Edge {
    pub fn score<T: Scalar>(&self) -> T {
        polarity_score(self.polarity)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CitationGraph {
    nodes: BTreeSet<String>,
    edges: Vec<Edge>,
}

impl CitationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, source: &str, target: &str, polarity: Polarity) {
        self.nodes.insert(source.to_string());
        self.nodes.insert(target.to_string());
        self.edges.push(Edge {
            source: source.to_string(),
            target: target.to_string(),
            polarity,
        });
    }

    /// Uses each instance's gold polarity.
    pub fn from_gold(instances: &[CitationInstance]) -> Result<Self> {
        let labels = crate::corpus::gold_labels(instances)?;
        Ok(build_graph(instances.iter().zip(labels)))
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains(id)
    }

    pub fn in_degree(&self, id: &str) -> usize {
        self.edges.iter().filter(|e| e.target == id).count()
    }

    pub fn self_loops(&self) -> usize {
        self.edges.iter().filter(|e| e.source == e.target).count()
    }

    /// Papers with at least one incoming edge.
    pub fn cited(&self) -> BTreeSet<&str> {
        self.edges.iter().map(|e| e.target.as_str()).collect()
    }
}

/// One edge per instance, labeled with the polarity paired with it.
pub fn build_graph<'a>(items: impl IntoIterator<Item = (&'a CitationInstance, Polarity)>) -> CitationGraph {
    let mut graph = CitationGraph::new();
    for (instance, polarity) in items {
        graph.add_edge(&instance.source_id, &instance.target_id, polarity);
    }
    graph
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityScore<T> {
    pub raw: T,
    /// One of 2, 1, −1.
    pub normalized: i8,
}

impl<T: Scalar> ReliabilityScore<T> {
    pub fn from_raw(raw: T) -> Self {
        let normalized = if raw > T::one() {
            2
        } else if raw < T::zero() {
            -1
        } else {
            1
        };
        ReliabilityScore { raw, normalized }
    }

    pub fn weight(&self) -> T {
        match self.normalized {
            2 => T::two(),
            -1 => -T::one(),
            _ => T::one(),
        }
    }
}

fn incoming_sums<T: Scalar>(graph: &CitationGraph) -> HashMap<&str, T> {
    let mut sums: HashMap<&str, T> = HashMap::new();
    for e in &graph.edges {
        let s = sums.entry(e.target.as_str()).or_insert_with(T::zero);
        *s = *s + e.score::<T>();
    }
    sums
}

pub fn reliability<T: Scalar>(graph: &CitationGraph, id: &str) -> Result<ReliabilityScore<T>> {
    if !graph.contains(id) {
        return Err(Error::UnknownPaper(id.to_string()));
    }
    let raw = graph
        .edges
        .iter()
        .filter(|e| e.target == id)
        .fold(T::zero(), |acc, e| acc + e.score::<T>());
    Ok(ReliabilityScore::from_raw(raw))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankingMethod {
    Naive,
    MIndex,
}

impl fmt::Display for RankingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankingMethod::Naive => "naive",
            RankingMethod::MIndex => "m-index",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry<T> {
    pub paper_id: String,
    pub score: T,
    /// 1-based.
    pub rank: usize,
    /// 1-based; `None` until [`bucketize`] runs.
    pub bucket: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedList<T> {
    pub method: RankingMethod,
    pub entries: Vec<RankedEntry<T>>,
}

impl<T: Scalar> RankedList<T> {
    /// Sorts by score descending, then paper id ascending, and assigns ranks.
    pub fn from_scores(method: RankingMethod, scores: impl IntoIterator<Item = (String, T)>) -> Self {
        let mut scored: Vec<(String, T)> = scores.into_iter().collect();
        scored.sort_by(|(ia, sa), (ib, sb)| {
            sb.partial_cmp(sa).unwrap_or(Ordering::Equal).then_with(|| ia.cmp(ib))
        });
        let entries = scored
            .into_iter()
            .enumerate()
            .map(|(i, (paper_id, score))| RankedEntry {
                paper_id,
                score,
                rank: i + 1,
                bucket: None,
            })
            .collect();
        RankedList { method, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.paper_id.as_str()).collect()
    }

    pub fn score_of(&self, id: &str) -> Option<T> {
        self.entries.iter().find(|e| e.paper_id == id).map(|e| e.score)
    }
}

/// Score is the in-degree.
pub fn naive_rank<T: Scalar>(graph: &CitationGraph) -> RankedList<T> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &graph.edges {
        *counts.entry(e.target.as_str()).or_default() += 1;
    }
    RankedList::from_scores(
        RankingMethod::Naive,
        counts.into_iter().map(|(id, c)| (id.to_string(), T::from_count(c))),
    )
}

/// M-index of every cited paper.
pub fn m_index_scores<T: Scalar>(graph: &CitationGraph) -> BTreeMap<String, T> {
    let sums = incoming_sums::<T>(graph);
    let weight = |id: &str| ReliabilityScore::from_raw(sums.get(id).copied().unwrap_or_else(T::zero)).weight();
    let mut scores: BTreeMap<String, T> = BTreeMap::new();
    for e in &graph.edges {
        let instance = e.score::<T>() * weight(&e.source);
        let s = scores.entry(e.target.clone()).or_insert_with(T::zero);
        *s = *s + instance;
    }
    scores
}

pub fn m_index<T: Scalar>(graph: &CitationGraph) -> RankedList<T> {
    RankedList::from_scores(RankingMethod::MIndex, m_index_scores(graph))
}

/// Sizes of `k` consecutive blocks over `n` entries; the first `n % k`
/// blocks take one extra entry.
pub fn bucket_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

pub fn bucketize<T: Scalar>(list: &RankedList<T>, k: usize) -> Result<RankedList<T>> {
    if k == 0 {
        return Err(Error::InvalidBucketCount);
    }
    if list.is_empty() {
        return Err(Error::Empty("ranked list"));
    }
    let mut out = list.clone();
    let mut entries = out.entries.iter_mut();
    for (b, size) in bucket_sizes(list.len(), k).into_iter().enumerate() {
        for entry in entries.by_ref().take(size) {
            entry.bucket = Some(b + 1);
        }
    }
    Ok(out)
}

/// Kendall's tau between two strict orderings of the same items, given as
/// parallel rank vectors. A single item gives 1.
pub fn kendall_tau(ranks_a: &[usize], ranks_b: &[usize]) -> f64 {
    let n = ranks_a.len();
    if n < 2 {
        return 1.0;
    }
    let mut balance: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let a = (ranks_a[i] as i64 - ranks_a[j] as i64).signum();
            let b = (ranks_b[i] as i64 - ranks_b[j] as i64).signum();
            balance += a * b;
        }
    }
    balance as f64 / (n * (n - 1) / 2) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDiffRow {
    pub paper_id: String,
    pub rank_a: usize,
    pub rank_b: usize,
    pub bucket_a: Option<usize>,
    pub bucket_b: Option<usize>,
    pub changed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankDiffSummary {
    pub rank_changes: usize,
    pub bucket_changes: usize,
    pub kendall_tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankDiffReport {
    /// In order of `a`.
    pub rows: Vec<RankDiffRow>,
    pub summary: RankDiffSummary,
}

pub fn compare_rankings<T, U>(a: &RankedList<T>, b: &RankedList<U>) -> Result<RankDiffReport> {
    let in_b: HashMap<&str, &RankedEntry<U>> = b.entries.iter().map(|e| (e.paper_id.as_str(), e)).collect();
    if a.entries.len() != b.entries.len() || in_b.len() != b.entries.len() {
        return Err(Error::PaperSetMismatch);
    }
    let mut rows = Vec::with_capacity(a.entries.len());
    for ea in &a.entries {
        let eb = in_b.get(ea.paper_id.as_str()).ok_or(Error::PaperSetMismatch)?;
        rows.push(RankDiffRow {
            paper_id: ea.paper_id.clone(),
            rank_a: ea.rank,
            rank_b: eb.rank,
            bucket_a: ea.bucket,
            bucket_b: eb.bucket,
            changed: ea.rank != eb.rank,
        });
    }
    let ranks_a: Vec<usize> = rows.iter().map(|r| r.rank_a).collect();
    let ranks_b: Vec<usize> = rows.iter().map(|r| r.rank_b).collect();
    let summary = RankDiffSummary {
        rank_changes: rows.iter().filter(|r| r.changed).count(),
        bucket_changes: rows.iter().filter(|r| r.bucket_a != r.bucket_b).count(),
        kendall_tau: kendall_tau(&ranks_a, &ranks_b),
    };
    Ok(RankDiffReport { rows, summary })
}

fn bucket_field(bucket: Option<usize>) -> String {
    bucket.map(|b| b.to_string()).unwrap_or_default()
}

/// `rank,paper_id,score,bucket`.
pub fn write_ranking_csv<T: Scalar, W: Write>(out: W, list: &RankedList<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "paper_id", "score", "bucket"])?;
    for e in &list.entries {
        w.write_record([e.rank.to_string(), e.paper_id.clone(), e.score.to_string(), bucket_field(e.bucket)])?;
    }
    w.flush().map_err(|e| Error::io("<ranking csv>", e))?;
    Ok(())
}

pub fn read_ranking_csv<T: Scalar + FromStr, R: Read>(input: R, method: RankingMethod) -> Result<RankedList<T>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let field = |k: usize| record.get(k).ok_or_else(|| Error::Malformed { line, message: "missing column".into() });
        let bad = |what: &str| Error::Malformed { line, message: format!("bad {what}") };
        let bucket = field(3)?;
        entries.push(RankedEntry {
            rank: field(0)?.parse().map_err(|_| bad("rank"))?,
            paper_id: field(1)?.to_string(),
            score: field(2)?.parse().map_err(|_| bad("score"))?,
            bucket: if bucket.is_empty() { None } else { Some(bucket.parse().map_err(|_| bad("bucket"))?) },
        });
    }
    Ok(RankedList { method, entries })
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    rank: usize,
    paper_id: &'a str,
    score: f64,
    bucket: Option<usize>,
}

pub fn write_ranking_json<T: Scalar, W: Write>(out: W, list: &RankedList<T>) -> Result<()> {
    let entries: Vec<JsonEntry> = list
        .entries
        .iter()
        .map(|e| JsonEntry {
            rank: e.rank,
            paper_id: &e.paper_id,
            score: e.score.to_f64_lossy(),
            bucket: e.bucket,
        })
        .collect();
    serde_json::to_writer_pretty(out, &entries)?;
    Ok(())
}

/// `paper_id,naive_rank,m_rank,naive_bucket,m_bucket,changed`.
pub fn write_rank_diff_csv<W: Write>(out: W, report: &RankDiffReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["paper_id", "naive_rank", "m_rank", "naive_bucket", "m_bucket", "changed"])?;
    for r in &report.rows {
        w.write_record([
            r.paper_id.clone(),
            r.rank_a.to_string(),
            r.rank_b.to_string(),
            bucket_field(r.bucket_a),
            bucket_field(r.bucket_b),
            r.changed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<rank diff csv>", e))?;
    Ok(())
}

/// Per-paper scores and their share of the list total, for pie or bar
/// charts. Negative scores count as zero share.
pub fn write_plot_data<T: Scalar, W: Write>(out: W, naive: &RankedList<T>, m: &RankedList<T>) -> Result<()> {
    let positive_total = |list: &RankedList<T>| -> f64 {
        list.entries.iter().map(|e| e.score.to_f64_lossy().max(0.0)).sum()
    };
    let (naive_total, m_total) = (positive_total(naive), positive_total(m));
    let share = |score: f64, total: f64| if total > 0.0 { score.max(0.0) / total } else { 0.0 };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["paper_id", "naive_score", "naive_share", "m_score", "m_share"])?;
    for e in &naive.entries {
        let m_score = m.score_of(&e.paper_id).ok_or(Error::PaperSetMismatch)?;
        w.write_record([
            e.paper_id.clone(),
            e.score.to_string(),
            format!("{:.6}", share(e.score.to_f64_lossy(), naive_total)),
            m_score.to_string(),
            format!("{:.6}", share(m_score.to_f64_lossy(), m_total)),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<plot data>", e))?;
    Ok(())
}
