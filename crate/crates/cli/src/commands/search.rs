use anyhow::Result;
use serde_json::json;
use stable_transversals::{search_stable_family, SearchBudget, SearchConfig, SearchOutcome};

use crate::envelope::{Outcome, Status};
use crate::input::{family_text, family_transcript, write_family};
use crate::{Mode, SearchArgs};

pub fn run(a: &SearchArgs) -> Result<Outcome> {
    let budget = match (a.mode, a.max_nodes) {
        (Mode::Exhaustive, None) => SearchBudget::exhaustive(),
        (Mode::Exhaustive, Some(m)) => SearchBudget::exhaustive_limited(m),
        (Mode::Random, m) => SearchBudget::randomized(a.seed, m.unwrap_or(SearchBudget::DEFAULT_RANDOM_NODES)),
    };
    let config = SearchConfig {
        threads: a.threads.max(1),
        ..SearchConfig::default()
    };
    let report = search_stable_family(a.n, a.mu, a.t, &budget, &config)?;
    let outcome = match &report.outcome {
        SearchOutcome::Found(family) => {
            if let Some(path) = &a.output {
                write_family(path, family)?;
            }
            let payload = json!({
                "outcome": "found",
                "family": family,
                "verification": family_transcript(family)?,
            });
            Outcome::new(Status::Ok, payload, family_text(family))
        }
        SearchOutcome::ExhaustedNone => Outcome::new(
            Status::Infeasible,
            json!({ "outcome": "exhausted_none" }),
            format!("no family: the search space for t = {} is exhausted", a.t),
        ),
        SearchOutcome::ProvenInfeasible(reason) => Outcome::new(
            Status::Infeasible,
            json!({ "outcome": "proven_infeasible", "reason": reason, "explanation": reason.to_string() }),
            format!("no family: {reason}"),
        ),
        SearchOutcome::BudgetExceeded => Outcome::new(
            Status::Unknown,
            json!({ "outcome": "budget_exceeded" }),
            format!("undecided: node budget of {} exhausted", report.nodes),
        ),
    };
    Ok(outcome.with_nodes(report.nodes))
}
