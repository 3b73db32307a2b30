//! The single JSON (or text/CSV) record every invocation prints.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Infeasible,
    Unknown,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Infeasible => 0,
            Status::Error => 1,
            Status::Unknown => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Infeasible => "infeasible",
            Status::Unknown => "unknown",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Csv,
}

/// What a command hands back before rendering.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub payload: Value,
    pub nodes: Option<u64>,
    /// Human-readable body for `--format text`.
    pub text: String,
    /// Body for `--format csv`, where supported.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn new(status: Status, payload: Value, text: String) -> Self {
        Outcome {
            status,
            payload,
            nodes: None,
            text,
            csv: None,
        }
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.nodes = Some(nodes);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stats {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub command: String,
    pub parameters: Value,
    pub status: Status,
    pub payload: Value,
    pub stats: Stats,
}

impl Envelope {
    pub fn render(&self, format: Format, outcome_text: &str, csv: Option<&str>) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string(self).expect("envelope serializes");
                s.push('\n');
                s
            }
            Format::Csv if csv.is_some() => csv.unwrap_or_default().to_string(),
            Format::Text | Format::Csv => {
                let mut s = format!("{}: {}\n", self.command, self.status.as_str());
                s.push_str(outcome_text);
                if !outcome_text.is_empty() && !outcome_text.ends_with('\n') {
                    s.push('\n');
                }
                if let Some(nodes) = self.stats.nodes {
                    s.push_str(&format!("nodes: {nodes}\n"));
                }
                if let Some(ms) = self.stats.elapsed_ms {
                    s.push_str(&format!("elapsed: {ms:.3} ms\n"));
                }
                s
            }
        }
    }
}
