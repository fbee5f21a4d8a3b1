//! Std companion to `semdelta-core`: corpus adapters, lexicon files, the
//! dialogue generation client, report rendering and the CLI.

pub mod cli;
pub mod corpus;
pub mod fixtures;
pub mod genclient;
pub mod lexicon_io;
pub mod pipeline;
pub mod render;

pub use semdelta_core as core;
