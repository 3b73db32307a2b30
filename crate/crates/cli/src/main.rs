//! `stable-transversals`: search, compose, spectrum, trade, verify, tables.

mod commands;
mod envelope;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use envelope::{Envelope, Format, Outcome, Stats, Status};

#[derive(Debug, Parser)]
#[command(name = "stable-transversals", version, about = "Stably intersecting transversals of B_n and circulant latin trades")]
struct Cli {
    /// Leave elapsed time out of the output (byte-identical reruns).
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Backtracking search for mu transversals meeting stably in t cells.
    Search(SearchArgs),
    /// Build a family by subsquare composition from witness data.
    Compose(ComposeArgs),
    /// Report which stable sizes t are known for (n, mu).
    Spectrum(SpectrumArgs),
    /// Turn a family into a circulant mu-way latin trade.
    Trade(TradeArgs),
    /// Check a family or trade file.
    Verify(VerifyArgs),
    /// Verify every claim backed by the witness dataset.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TextFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Theorem,
    Search,
    All,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub mu: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: Mode,
    /// Node budget (default: unlimited for exhaustive, 1e8 for random).
    #[arg(long)]
    pub max_nodes: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TextFormat,
    /// Also write the bare family JSON here when one is found.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ComposeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub mu: usize,
    #[arg(long)]
    pub t: usize,
    /// Base subsquare size: an odd integer or `auto`.
    #[arg(long, default_value = "auto")]
    pub b: String,
    /// Extra reduced-form witness files, added to the dataset.
    #[arg(long = "witness")]
    pub witnesses: Vec<PathBuf>,
    /// Try the identical, shifted and factorization families first.
    #[arg(long)]
    pub closed_forms: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TextFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub mu: usize,
    #[arg(long, value_enum, default_value = "theorem")]
    pub source: Source,
    /// Per-t node budget for `--source search`.
    #[arg(long)]
    pub max_nodes: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TableFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct TradeArgs {
    /// Family JSON file (a bare family or a command envelope).
    #[arg(long, conflicts_with_all = ["n", "mu", "t"])]
    pub family: Option<PathBuf>,
    /// Build the family inline instead (closed forms, then composition).
    #[arg(long, requires_all = ["mu", "t"])]
    pub n: Option<usize>,
    #[arg(long)]
    pub mu: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value = "auto")]
    pub b: String,
    /// Include the expanded partial latin squares.
    #[arg(long)]
    pub grids: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TextFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Family or trade JSON file.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TextFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct TablesArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: TextFormat,
}

impl From<TextFormat> for Format {
    fn from(f: TextFormat) -> Self {
        match f {
            TextFormat::Json => Format::Json,
            TextFormat::Text => Format::Text,
        }
    }
}

impl From<TableFormat> for Format {
    fn from(f: TableFormat) -> Self {
        match f {
            TableFormat::Json => Format::Json,
            TableFormat::Csv => Format::Csv,
            TableFormat::Text => Format::Text,
        }
    }
}

fn parameters<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn emit(envelope: &Envelope, format: Format, text: &str, csv: Option<&str>) {
    print!("{}", envelope.render(format, text, csv));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let envelope = Envelope {
                command: "usage".into(),
                parameters: json!({ "args": std::env::args().skip(1).collect::<Vec<_>>() }),
                status: Status::Error,
                payload: json!({ "error": e.kind().to_string() }),
                stats: Stats {
                    nodes: None,
                    elapsed_ms: None,
                },
            };
            emit(&envelope, Format::Json, "", None);
            return ExitCode::from(1);
        }
    };

    let start = Instant::now();
    let (name, params, format, result) = match &cli.command {
        Command::Search(a) => ("search", parameters(a), a.format.into(), commands::search::run(a)),
        Command::Compose(a) => ("compose", parameters(a), a.format.into(), commands::compose::run(a)),
        Command::Spectrum(a) => ("spectrum", parameters(a), a.format.into(), commands::spectrum::run(a)),
        Command::Trade(a) => ("trade", parameters(a), a.format.into(), commands::trade::run(a)),
        Command::Verify(a) => ("verify", parameters(a), a.format.into(), commands::verify::run(a)),
        Command::Tables(a) => ("tables", parameters(a), a.format.into(), commands::tables::run(a)),
    };
    let outcome = result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        let msg = format!("{e:#}");
        Outcome::new(Status::Error, json!({ "error": msg }), format!("error: {msg}"))
    });
    let elapsed_ms = (!cli.no_timing).then(|| start.elapsed().as_secs_f64() * 1e3);
    let envelope = Envelope {
        command: name.into(),
        parameters: params,
        status: outcome.status,
        payload: outcome.payload,
        stats: Stats {
            nodes: outcome.nodes,
            elapsed_ms,
        },
    };
    emit(&envelope, format, &outcome.text, outcome.csv.as_deref());
    ExitCode::from(envelope.status.exit_code() as u8)
}
