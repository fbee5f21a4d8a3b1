//! Semantic delta and topic entropy of a [`CategoryProfile`].

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::analyzer::{CategoryProfile, CategoryScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no token matched any lexicon category")]
    NoMatches,
}

/// The two most intense categories and the gap between them.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaResult {
    pub top1_category: String,
    pub top1_intensity: f64,
    pub top2_category: Option<String>,
    /// 0 when there is no second category with positive intensity.
    pub top2_intensity: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    /// Shannon entropy in bits.
    pub bits: f64,
    /// Number of categories with positive intensity.
    pub support_size: usize,
}

// intensity descending, then name ascending
fn rank(a: &&CategoryScore, b: &&CategoryScore) -> Ordering {
    b.intensity
        .partial_cmp(&a.intensity)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.name.cmp(&b.name))
}

fn support(profile: &CategoryProfile) -> Result<Vec<&CategoryScore>, MetricsError> {
    if profile.matched_occurrences == 0 {
        return Err(MetricsError::NoMatches);
    }
    let nonzero: Vec<&CategoryScore> = profile.scores.iter().filter(|s| s.intensity > 0.0).collect();
    if nonzero.is_empty() {
        return Err(MetricsError::NoMatches);
    }
    Ok(nonzero)
}

/// `IV1 - IV2` for the two highest intensities. Equal intensities are
/// ordered by category name so the labels are deterministic.
pub fn semantic_delta(profile: &CategoryProfile) -> Result<DeltaResult, MetricsError> {
    let mut ranked = support(profile)?;
    ranked.sort_by(rank);

    let top1 = ranked[0];
    let (top2_category, top2_intensity) = match ranked.get(1) {
        Some(s) => (Some(s.name.clone()), s.intensity),
        None => (None, 0.0),
    };
    Ok(DeltaResult {
        top1_category: top1.name.clone(),
        top1_intensity: top1.intensity,
        top2_category,
        top2_intensity,
        delta: top1.intensity - top2_intensity,
    })
}

/// Shannon entropy (base 2) of the intensities renormalized to sum to 1
/// over the nonzero categories.
pub fn shannon_entropy(profile: &CategoryProfile) -> Result<EntropyResult, MetricsError> {
    let nonzero = support(profile)?;
    let support_size = nonzero.len();
    if support_size == 1 {
        return Ok(EntropyResult {
            bits: 0.0,
            support_size,
        });
    }

    let total: f64 = nonzero.iter().map(|s| s.intensity).sum();
    let bits: f64 = nonzero
        .iter()
        .map(|s| {
            let p = s.intensity / total;
            -p * libm::log2(p)
        })
        .sum();
    // rounding can push an equal split a hair past log2(n)
    let max_bits = libm::log2(support_size as f64);
    Ok(EntropyResult {
        bits: bits.clamp(0.0, max_bits),
        support_size,
    })
}
