//! Labeled dialogue records.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

/// Provenance of a dialogue. `Ai` sorts first so label-keyed maps iterate
/// alphabetically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Ai,
    Human,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Ai, Label::Human];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ai => "ai",
            Label::Human => "human",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label {0:?} (expected human or ai)")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "human" => Ok(Label::Human),
            "ai" => Ok(Label::Ai),
            _ => Err(UnknownLabel(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("record id is empty")]
    EmptyId,
    #[error("record {0:?} has no text")]
    EmptyText(String),
}

/// One scored unit of conversation (a scene, thread, window or generated
/// dialogue).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogueRecord {
    pub id: String,
    pub label: Label,
    /// Dataset tag, e.g. `friends` or `gen-gpt-4o-mini`.
    pub source: String,
    pub text: String,
    pub meta: BTreeMap<String, String>,
}

impl DialogueRecord {
    pub fn new(id: impl Into<String>, label: Label, source: impl Into<String>, text: impl Into<String>) -> Self {
        DialogueRecord {
            id: id.into(),
            label,
            source: source.into(),
            text: text.into(),
            meta: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if self.id.is_empty() {
            return Err(RecordError::EmptyId);
        }
        if self.text.trim().is_empty() {
            return Err(RecordError::EmptyText(self.id.clone()));
        }
        Ok(())
    }
}

/// `"{source}-{index:06}"`, the id given to records that carry none.
pub fn record_id(source: &str, index: usize) -> String {
    alloc::format!("{source}-{index:06}")
}
