//! Scoring core for semantic-delta analysis of dialogue text.
//!
//! Texts are tokenized, matched against a category lexicon, and reduced to
//! a per-category intensity profile. From the profile come two features:
//! the *semantic delta* (gap between the two strongest categories) and the
//! Shannon entropy of the topic distribution. Group-level comparison uses
//! Welch's t-test.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analyzer;
pub mod lexicon;
pub mod metrics;
pub mod record;
pub mod report;
pub mod stats;
pub mod tokenizer;

pub use analyzer::{analyze, analyze_with, CategoryProfile, CategoryScore, Normalization};
pub use lexicon::{builtin_test_lexicon, load_lexicon, Category, Lexicon, LexiconError, LexiconFormat};
pub use metrics::{semantic_delta, shannon_entropy, DeltaResult, EntropyResult, MetricsError};
pub use record::{record_id, DialogueRecord, Label, RecordError};
pub use report::{
    assemble_report, run_analysis, score_record, Aggregation, AnalysisOptions, AnalysisReport, Comparison,
    GroupSummary, HistogramBin, PipelineError, RecordRow, SkipReason, Skipped, DEFAULT_HISTOGRAM_BINS,
};
pub use stats::{summarize, welch_t_test, welch_t_test_with, Alternative, SampleStats, StatsError, WelchResult};
pub use tokenizer::{tokenize, TokenSequence};
