//! Parallel scoring and corpus loading.
//!
//! Records are scored independently on a rayon pool; the report is then
//! assembled from the id-sorted rows, so the thread count never shows up in
//! the output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use semdelta_core::{
    assemble_report, score_record, AnalysisOptions, AnalysisReport, DialogueRecord, Lexicon, PipelineError,
};

use crate::corpus::{ingest, AdapterConfig, CorpusError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Corpus {
        path: PathBuf,
        #[source]
        source: CorpusError,
    },
}

/// One ingested file together with the adapter settings that produced it.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub path: PathBuf,
    pub config: AdapterConfig,
    pub records: Vec<DialogueRecord>,
}

impl LoadedInput {
    /// Report header entry: adapter settings plus the file name and count.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut m = self.config.describe();
        let name = self
            .path
            .file_name()
            .map_or_else(|| self.path.display().to_string(), |n| n.to_string_lossy().into_owned());
        m.insert("file".into(), name);
        m.insert("records".into(), self.records.len().to_string());
        m
    }
}

pub fn load_input(path: &Path, config: AdapterConfig) -> Result<LoadedInput, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let records = ingest(&bytes, &config).map_err(|source| LoadError::Corpus {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(LoadedInput {
        path: path.to_path_buf(),
        config,
        records,
    })
}

/// Score `records` on `jobs` threads (0 = rayon default) and build the
/// report.
pub fn analyze_parallel(
    records: &[DialogueRecord],
    lexicon: &Lexicon,
    options: &AnalysisOptions,
    jobs: usize,
) -> Result<AnalysisReport, PipelineError> {
    let score = || {
        records
            .par_iter()
            .map(|r| score_record(r, lexicon, options.normalization))
            .collect::<Vec<_>>()
    };
    let scored = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(score),
        Err(e) => {
            log::warn!("could not build a {jobs}-thread pool ({e}); using the global pool");
            score()
        }
    };
    let mut rows = Vec::with_capacity(scored.len());
    let mut skipped = Vec::new();
    for s in scored {
        match s {
            Ok(row) => rows.push(row),
            Err(skip) => skipped.push(skip),
        }
    }
    assemble_report(lexicon.name(), options, rows, skipped)
}

/// Score the union of several inputs and record their descriptions in the
/// report header.
pub fn analyze_inputs(
    inputs: &[LoadedInput],
    lexicon: &Lexicon,
    options: &AnalysisOptions,
    jobs: usize,
) -> Result<AnalysisReport, PipelineError> {
    let records: Vec<DialogueRecord> = inputs.iter().flat_map(|i| i.records.iter().cloned()).collect();
    let mut report = analyze_parallel(&records, lexicon, options, jobs)?;
    report.inputs = inputs.iter().map(LoadedInput::describe).collect();
    Ok(report)
}
