//! Corpus-level scoring: per-record rows, per-label statistics, Welch
//! comparisons and the delta histogram.
//!
//! Comparisons are oriented `ai - human`: a positive t means the AI group
//! has the larger mean.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::analyzer::{analyze_with, Normalization};
use crate::lexicon::Lexicon;
use crate::metrics::{semantic_delta, shannon_entropy, MetricsError};
use crate::record::{DialogueRecord, Label};
use crate::stats::{summarize, welch_t_test_with, Alternative, SampleStats, StatsError, WelchResult};
use crate::tokenizer::tokenize;

pub const DEFAULT_HISTOGRAM_BINS: usize = 30;

/// How per-source means combine into a label's headline mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Aggregation {
    /// Every record weighs the same.
    #[default]
    Pooled,
    /// Every source weighs the same: mean of the per-source means.
    MeanOfSources,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Pooled => "pooled",
            Aggregation::MeanOfSources => "mean-of-sources",
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled" => Ok(Aggregation::Pooled),
            "mean-of-sources" => Ok(Aggregation::MeanOfSources),
            other => Err(alloc::format!("unknown aggregation {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub normalization: Normalization,
    pub alternative: Alternative,
    pub aggregation: Aggregation,
    pub histogram_bins: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            normalization: Normalization::ByMatched,
            alternative: Alternative::TwoSided,
            aggregation: Aggregation::Pooled,
            histogram_bins: DEFAULT_HISTOGRAM_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("corpus has no records")]
    EmptyCorpus,
    #[error("all {count} records were skipped (no lexicon matches)")]
    AllSkipped { count: usize },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    NoMatches,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::NoMatches => "no-matches",
        }
    }
}

impl From<MetricsError> for SkipReason {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::NoMatches => SkipReason::NoMatches,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skipped {
    pub id: String,
    pub label: Label,
    pub source: String,
    pub reason: SkipReason,
}

/// Scores for one record.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub id: String,
    pub label: Label,
    pub source: String,
    pub top1: String,
    pub iv1: f64,
    pub top2: Option<String>,
    pub iv2: f64,
    pub delta: f64,
    pub entropy_bits: f64,
    pub support_size: usize,
    pub matched_occurrences: u64,
    pub total_tokens: u64,
}

/// Tokenize, analyze and score one record. The label is carried through
/// untouched; it never influences the scores.
pub fn score_record(
    record: &DialogueRecord,
    lexicon: &Lexicon,
    normalization: Normalization,
) -> Result<RecordRow, Skipped> {
    let skipped = |reason: SkipReason| Skipped {
        id: record.id.clone(),
        label: record.label,
        source: record.source.clone(),
        reason,
    };
    let profile = analyze_with(&tokenize(&record.text), lexicon, normalization);
    let delta = semantic_delta(&profile).map_err(|e| skipped(e.into()))?;
    let entropy = shannon_entropy(&profile).map_err(|e| skipped(e.into()))?;
    Ok(RecordRow {
        id: record.id.clone(),
        label: record.label,
        source: record.source.clone(),
        top1: delta.top1_category,
        iv1: delta.top1_intensity,
        top2: delta.top2_category,
        iv2: delta.top2_intensity,
        delta: delta.delta,
        entropy_bits: entropy.bits,
        support_size: entropy.support_size,
        matched_occurrences: profile.matched_occurrences,
        total_tokens: profile.total_tokens,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSummary {
    pub delta: SampleStats,
    pub entropy: SampleStats,
}

/// Statistics for one label.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub delta: SampleStats,
    pub entropy: SampleStats,
    pub per_source: BTreeMap<String, SourceSummary>,
    /// Headline means under the report's [`Aggregation`].
    pub aggregate_delta_mean: f64,
    pub aggregate_entropy_mean: f64,
}

/// Outcome of a Welch comparison that may not be computable.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    Tested(WelchResult),
    NotApplicable(String),
}

impl Comparison {
    pub fn result(&self) -> Option<&WelchResult> {
        match self {
            Comparison::Tested(r) => Some(r),
            Comparison::NotApplicable(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub lexicon_name: String,
    pub options: AnalysisOptions,
    /// Free-form descriptions of the inputs (paths, adapter settings).
    pub inputs: Vec<BTreeMap<String, String>>,
    /// Sorted by id.
    pub records: Vec<RecordRow>,
    pub groups: BTreeMap<Label, GroupSummary>,
    pub welch_delta: Comparison,
    pub welch_entropy: Comparison,
    /// Sorted by id.
    pub skipped: Vec<Skipped>,
    /// Upper edge of the shared histogram range `[0, upper]`.
    pub histogram_upper: f64,
    pub histogram: BTreeMap<Label, Vec<HistogramBin>>,
}

impl AnalysisReport {
    pub fn delta_column(&self, label: Label) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.delta)
            .collect()
    }

    pub fn entropy_column(&self, label: Label) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.entropy_bits)
            .collect()
    }
}

/// Score every record sequentially and assemble the report.
pub fn run_analysis(
    records: &[DialogueRecord],
    lexicon: &Lexicon,
    options: &AnalysisOptions,
) -> Result<AnalysisReport, PipelineError> {
    let mut rows = Vec::with_capacity(records.len());
    let mut skipped = Vec::new();
    for rec in records {
        match score_record(rec, lexicon, options.normalization) {
            Ok(row) => rows.push(row),
            Err(s) => skipped.push(s),
        }
    }
    assemble_report(lexicon.name(), options, rows, skipped)
}

/// Build the report from already scored rows. Input order does not matter:
/// rows and skipped entries are sorted by id before anything is computed.
pub fn assemble_report(
    lexicon_name: &str,
    options: &AnalysisOptions,
    mut rows: Vec<RecordRow>,
    mut skipped: Vec<Skipped>,
) -> Result<AnalysisReport, PipelineError> {
    if rows.is_empty() && skipped.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    let mut seen = BTreeSet::new();
    for id in rows.iter().map(|r| &r.id).chain(skipped.iter().map(|s| &s.id)) {
        if !seen.insert(id.as_str()) {
            return Err(PipelineError::DuplicateId(id.clone()));
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::AllSkipped { count: skipped.len() });
    }
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    skipped.sort_by(|a, b| a.id.cmp(&b.id));

    let mut groups = BTreeMap::new();
    for label in Label::ALL {
        if let Some(g) = group_summary(&rows, label, options.aggregation) {
            groups.insert(label, g);
        }
    }

    let welch_delta = compare(&groups, options.alternative, |g| &g.delta);
    let welch_entropy = compare(&groups, options.alternative, |g| &g.entropy);

    let bins = options.histogram_bins.max(1);
    let max_delta = rows.iter().map(|r| r.delta).fold(0.0_f64, f64::max);
    // an all-zero sample still needs a non-empty range
    let upper = if max_delta > 0.0 { max_delta } else { 1.0 };
    let histogram = groups
        .keys()
        .map(|&label| {
            let values = rows.iter().filter(|r| r.label == label).map(|r| r.delta);
            (label, histogram(values, upper, bins))
        })
        .collect();

    Ok(AnalysisReport {
        lexicon_name: lexicon_name.to_string(),
        options: *options,
        inputs: Vec::new(),
        records: rows,
        groups,
        welch_delta,
        welch_entropy,
        skipped,
        histogram_upper: upper,
        histogram,
    })
}

fn group_summary(rows: &[RecordRow], label: Label, aggregation: Aggregation) -> Option<GroupSummary> {
    let mine: Vec<&RecordRow> = rows.iter().filter(|r| r.label == label).collect();
    if mine.is_empty() {
        return None;
    }
    let deltas: Vec<f64> = mine.iter().map(|r| r.delta).collect();
    let entropies: Vec<f64> = mine.iter().map(|r| r.entropy_bits).collect();
    let delta = summarize(&deltas).ok()?;
    let entropy = summarize(&entropies).ok()?;

    let mut per_source: BTreeMap<String, SourceSummary> = BTreeMap::new();
    for r in &mine {
        let e = per_source.entry(r.source.clone()).or_insert(SourceSummary {
            delta: SampleStats::default(),
            entropy: SampleStats::default(),
        });
        e.delta.push(r.delta);
        e.entropy.push(r.entropy_bits);
    }

    let (aggregate_delta_mean, aggregate_entropy_mean) = match aggregation {
        Aggregation::Pooled => (delta.mean, entropy.mean),
        Aggregation::MeanOfSources => {
            let k = per_source.len() as f64;
            (
                per_source.values().map(|s| s.delta.mean).sum::<f64>() / k,
                per_source.values().map(|s| s.entropy.mean).sum::<f64>() / k,
            )
        }
    };

    Some(GroupSummary {
        delta,
        entropy,
        per_source,
        aggregate_delta_mean,
        aggregate_entropy_mean,
    })
}

fn compare(
    groups: &BTreeMap<Label, GroupSummary>,
    alternative: Alternative,
    pick: impl Fn(&GroupSummary) -> &SampleStats,
) -> Comparison {
    let (Some(ai), Some(human)) = (groups.get(&Label::Ai), groups.get(&Label::Human)) else {
        return Comparison::NotApplicable("single label".into());
    };
    match welch_t_test_with(pick(ai), pick(human), alternative) {
        Ok(r) => Comparison::Tested(r),
        Err(StatsError::InsufficientSample { .. }) => {
            Comparison::NotApplicable("fewer than 2 records in a group".into())
        }
        Err(StatsError::DegenerateVariance) => Comparison::NotApplicable("zero variance in both groups".into()),
        Err(StatsError::EmptySample) => Comparison::NotApplicable("empty group".into()),
    }
}

fn histogram(values: impl Iterator<Item = f64>, upper: f64, bins: usize) -> Vec<HistogramBin> {
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|k| HistogramBin {
            lower: upper * k as f64 / bins as f64,
            upper: if k + 1 == bins {
                upper
            } else {
                upper * (k + 1) as f64 / bins as f64
            },
            count: 0,
        })
        .collect();
    let mut counts = vec![0u64; bins];
    for v in values {
        let idx = ((v / upper) * bins as f64) as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    for (bin, c) in out.iter_mut().zip(counts) {
        bin.count = c;
    }
    out
}
