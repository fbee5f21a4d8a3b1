//! Command-line driver.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
//! stderr; data goes to `--output` or stdout.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use semdelta_core::{Aggregation, Alternative, AnalysisOptions, Label, Normalization, DEFAULT_HISTOGRAM_BINS};

use crate::corpus::{AdapterConfig, Format};
use crate::genclient::{
    expand_cells, generate_dialogues, parse_prompts_tsv, GenerationConfig, HttpTransport, StubTransport,
};
use crate::lexicon_io::load_lexicon_file;
use crate::pipeline::{analyze_inputs, load_input, LoadedInput};
use crate::render::{render_report, ReportFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "semdelta",
    version,
    about = "Semantic-delta scoring of human and AI dialogue corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one corpus and write a report.
    Analyze(AnalyzeArgs),
    /// Compare a human corpus with an AI corpus.
    Compare(CompareArgs),
    /// Generate AI dialogues and write them as JSONL.
    Generate(GenerateArgs),
    /// Load a lexicon and print its size.
    LexiconValidate(LexiconArgs),
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    /// Lexicon file (.tsv or .json), or builtin:test.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Adapter settings (TOML) applied to every input.
    #[arg(long)]
    pub adapter: Option<PathBuf>,
    /// Intensity denominator: by-matched or by-total-tokens.
    #[arg(long, default_value_t = Normalization::ByMatched)]
    pub normalization: Normalization,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    /// Report destination (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Test whether AI values exceed human values instead of a two-sided test.
    #[arg(long)]
    pub one_sided: bool,
    /// How multi-source groups are summarized.
    #[arg(long, default_value_t = Aggregation::Pooled)]
    pub aggregation: Aggregation,
    /// Histogram bins over [0, max delta].
    #[arg(long, default_value_t = DEFAULT_HISTOGRAM_BINS, value_parser = positive)]
    pub bins: usize,
    /// Scoring threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

impl ScoringArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            normalization: self.normalization,
            alternative: if self.one_sided {
                Alternative::Greater
            } else {
                Alternative::TwoSided
            },
            aggregation: self.aggregation,
            histogram_bins: self.bins,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Corpus files; repeat for several.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Label for every record; JSONL lines may carry their own otherwise.
    #[arg(long)]
    pub label: Option<Label>,
    #[command(flatten)]
    pub scoring: ScoringArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("corpora").required(true).multiple(true).args(["human", "ai", "input"])))]
pub struct CompareArgs {
    /// Human corpus files.
    #[arg(long, requires = "ai")]
    pub human: Vec<PathBuf>,
    /// AI corpus files.
    #[arg(long, requires = "human")]
    pub ai: Vec<PathBuf>,
    /// Already labeled corpus files.
    #[arg(long, conflicts_with_all = ["human", "ai"])]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub scoring: ScoringArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generation settings (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Prompt matrix (TSV: cell_id, system_prompt, user_prompt_template).
    /// Without it the config's own prompts form a single row.
    #[arg(long)]
    pub prompts: Option<PathBuf>,
    /// Dialogues per prompt cell.
    #[arg(long, default_value_t = 1, value_parser = positive)]
    pub count: usize,
    /// Use canned local replies; no network access.
    #[arg(long)]
    pub stub: bool,
    /// JSONL destination (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
}

/// A failure after argument parsing: usage problems exit 1, bad data 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            if let Failure::Usage(_) = f {
                let _ = writeln!(stderr, "For more information, try '--help'.");
            }
            f.code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Analyze(a) => {
            let adapter = read_adapter(a.scoring.adapter.as_deref())?;
            let inputs = a
                .input
                .iter()
                .map(|p| load(p, adapter.as_ref(), a.label))
                .collect::<Result<Vec<_>, _>>()?;
            score(&inputs, &a.scoring, stdout, stderr)
        }
        Command::Compare(c) => {
            let adapter = read_adapter(c.scoring.adapter.as_deref())?;
            let mut inputs = Vec::new();
            for p in &c.human {
                inputs.push(load(p, adapter.as_ref(), Some(Label::Human))?);
            }
            for p in &c.ai {
                inputs.push(load(p, adapter.as_ref(), Some(Label::Ai))?);
            }
            for p in &c.input {
                inputs.push(load(p, adapter.as_ref(), None)?);
            }
            score(&inputs, &c.scoring, stdout, stderr)
        }
        Command::Generate(g) => generate(&g, stdout, stderr),
        Command::LexiconValidate(l) => {
            let lex = load_lexicon_file(&l.lexicon).map_err(data)?;
            writeln!(stdout, "{}: {}", lex.name(), lex.summary()).map_err(data)
        }
    }
}

fn read_adapter(path: Option<&Path>) -> Result<Option<AdapterConfig>, Failure> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    AdapterConfig::from_toml(&text)
        .map(Some)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// Build the adapter for one file: explicit settings if given, otherwise
/// guessed from the extension with the file stem as source tag. A label
/// implied by the command line always wins.
fn load(path: &Path, adapter: Option<&AdapterConfig>, label: Option<Label>) -> Result<LoadedInput, Failure> {
    let mut config = match adapter {
        Some(a) => a.clone(),
        None => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
            AdapterConfig::new(Format::from_path(path), None, stem)
        }
    };
    if label.is_some() {
        config.label = label;
    }
    if config.format == Format::Csv && config.text_column.is_none() {
        return Err(Failure::Usage(format!(
            "{}: CSV input needs --adapter with a text_column",
            path.display()
        )));
    }
    if config.format != Format::Jsonl && config.label.is_none() {
        return Err(Failure::Usage(format!(
            "{}: {} input needs a label (--label, --human/--ai, or the adapter file)",
            path.display(),
            config.format.as_str()
        )));
    }
    load_input(path, config).map_err(data)
}

fn score(
    inputs: &[LoadedInput],
    args: &ScoringArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let lexicon = load_lexicon_file(&args.lexicon).map_err(data)?;
    let report = analyze_inputs(inputs, &lexicon, &args.options(), args.jobs).map_err(data)?;
    if !report.skipped.is_empty() {
        let _ = writeln!(
            stderr,
            "note: {} record(s) matched no lexicon term and were skipped",
            report.skipped.len()
        );
    }
    emit(&render_report(&report, args.format), args.output.as_deref(), stdout)
}

fn emit(bytes: &[u8], output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => stdout.write_all(bytes).map_err(data),
    }
}

fn generate(args: &GenerateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let path_err = |p: &Path, e: &dyn std::fmt::Display| Failure::Data(format!("{}: {e}", p.display()));
    let text = std::fs::read_to_string(&args.config).map_err(|e| path_err(&args.config, &e))?;
    let config = GenerationConfig::from_toml(&text).map_err(|e| path_err(&args.config, &e))?;
    let rows = match &args.prompts {
        Some(p) => {
            let t = std::fs::read_to_string(p).map_err(|e| path_err(p, &e))?;
            parse_prompts_tsv(&t).map_err(|e| path_err(p, &e))?
        }
        None => vec![config.default_row()],
    };
    let cells = expand_cells(&rows, &config.topics).map_err(|e| path_err(&args.config, &e))?;
    let outcome = if args.stub {
        generate_dialogues(&config, &cells, args.count, &StubTransport::canned())
    } else {
        let transport = HttpTransport::from_config(&config).map_err(data)?;
        generate_dialogues(&config, &cells, args.count, &transport)
    }
    .map_err(data)?;
    for f in &outcome.failures {
        let _ = writeln!(
            stderr,
            "warning: {} ({} replica {}): {}",
            f.record_id, f.cell_id, f.replica, f.error
        );
    }
    if outcome.records.is_empty() {
        return Err(Failure::Data(format!(
            "all {} dialogues failed",
            outcome.failures.len()
        )));
    }
    let _ = writeln!(
        stderr,
        "generated {} dialogue(s), {} failure(s)",
        outcome.records.len(),
        outcome.failures.len()
    );
    emit(
        crate::corpus::to_jsonl(&outcome.records).as_bytes(),
        args.output.as_deref(),
        stdout,
    )
}
