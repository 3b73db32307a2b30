use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::json;
use stable_transversals::search::SpectrumEntry;
use stable_transversals::setalg::{lemma_spectrum, nonexistence_range, LemmaId};
use stable_transversals::tables::{closed_form, listed_row};
use stable_transversals::trades::trade_spectrum;
use stable_transversals::{compute_spectrum_small, theorem_spectrum, SearchBudget, SearchConfig, StableFamily};

use crate::envelope::{Outcome, Status};
use crate::{Source, SpectrumArgs};

#[derive(Debug, Clone, Serialize)]
struct Row {
    t: usize,
    status: &'static str,
    provenance: Vec<String>,
}

impl Row {
    fn label(&self) -> String {
        self.provenance.join("; ")
    }
}

fn csv_body(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "status", "provenance"])?;
    for r in rows {
        w.write_record([r.t.to_string(), r.status.to_string(), r.label()])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn text_body(rows: &[Row]) -> String {
    rows.iter()
        .map(|r| format!("{:>3}  {:<10} {}\n", r.t, r.status, r.label()))
        .collect()
}

fn finish(status: Status, mut payload: serde_json::Value, rows: Vec<Row>) -> Result<Outcome> {
    payload["rows"] = serde_json::to_value(&rows)?;
    let mut out = Outcome::new(status, payload, text_body(&rows));
    out.csv = Some(csv_body(&rows)?);
    Ok(out)
}

fn from_theorem(a: &SpectrumArgs) -> Result<Outcome> {
    let report = theorem_spectrum(a.n, a.mu)?;
    let trades = trade_spectrum(a.n, a.mu)?;
    let rows = (0..=a.n)
        .map(|t| {
            let x = t as i64;
            let (status, label) = if report.proven.contains(x) {
                ("ok", "theorem")
            } else if report.exceptions.contains(x) {
                ("exception", "theorem exception")
            } else if report.infeasible.contains(x) {
                ("none", "nonexistence range")
            } else {
                ("unknown", "")
            };
            Row {
                t,
                status,
                provenance: if label.is_empty() { vec![] } else { vec![label.to_string()] },
            }
        })
        .collect();
    finish(Status::Ok, json!({ "report": report, "trade_k": trades }), rows)
}

fn from_search(a: &SpectrumArgs) -> Result<Outcome> {
    let budget = match a.max_nodes {
        Some(m) => SearchBudget::exhaustive_limited(m),
        None => SearchBudget::exhaustive(),
    };
    let config = SearchConfig {
        threads: a.threads.max(1),
        ..SearchConfig::default()
    };
    let row = compute_spectrum_small(a.n, a.mu, &budget, &config)?;
    let mut families: BTreeMap<usize, &StableFamily> = BTreeMap::new();
    let rows: Vec<Row> = row
        .entries
        .iter()
        .map(|(t, e)| {
            let (status, label) = match e {
                SpectrumEntry::Found { family } => {
                    families.insert(*t, family);
                    ("ok", "search")
                }
                SpectrumEntry::None { reason } => match reason {
                    stable_transversals::search::NoneReason::Exhausted => ("none", "search (exhausted)"),
                    stable_transversals::search::NoneReason::Infeasible => ("none", "nonexistence range"),
                },
                SpectrumEntry::Unknown => ("unknown", "search (budget exceeded)"),
            };
            Row {
                t: *t,
                status,
                provenance: vec![label.to_string()],
            }
        })
        .collect();
    let status = if row.is_complete() { Status::Ok } else { Status::Unknown };
    let payload = json!({ "found": row.found(), "families": families });
    Ok(finish(status, payload, rows)?.with_nodes(row.nodes))
}

fn from_all(a: &SpectrumArgs) -> Result<Outcome> {
    let (n, mu) = (a.n, a.mu);
    stable_transversals::model::check_order(n)?;
    if mu < 2 {
        bail!("mu = {mu} must be at least 2");
    }
    let none = nonexistence_range(n, mu);
    let theorem = if n >= 33 && (mu == 3 || mu == 4) { Some(theorem_spectrum(n, mu)?) } else { None };
    let lemmas: Vec<_> = LemmaId::ALL
        .into_iter()
        .filter(|l| l.mu() == mu && n >= l.min_order())
        .map(|l| Ok((l, lemma_spectrum(l, n)?)))
        .collect::<Result<_>>()?;
    let listed = listed_row(n, mu);
    let mut rows = Vec::with_capacity(n + 1);
    for t in 0..=n {
        let x = t as i64;
        let mut prov = Vec::new();
        if let Some(c) = closed_form(n, mu, t)? {
            prov.push(c.provenance.to_string());
        }
        if theorem.as_ref().is_some_and(|r| r.proven.contains(x)) {
            prov.push("theorem".to_string());
        }
        for (l, set) in &lemmas {
            if set.contains(x) {
                prov.push(format!("construction {}", l.name()));
            }
        }
        if let Some(row) = &listed {
            if row.values.contains(&t) {
                prov.push(format!("search table ({})", if row.complete { "complete" } else { "partial" }));
            }
        }
        let impossible = none.contains(x);
        let excepted = theorem.as_ref().is_some_and(|r| r.exceptions.contains(x));
        let status = match (impossible, prov.is_empty()) {
            (true, false) => "conflict",
            (true, true) => "none",
            (false, false) => "ok",
            (false, true) if excepted => "exception",
            (false, true) => "unknown",
        };
        if impossible {
            prov.push("nonexistence range".to_string());
        } else if excepted && prov.is_empty() {
            prov.push("theorem exception".to_string());
        }
        rows.push(Row { t, status, provenance: prov });
    }
    let known: Vec<usize> = rows.iter().filter(|r| r.status == "ok").map(|r| r.t).collect();
    finish(Status::Ok, json!({ "known": known }), rows)
}

pub fn run(a: &SpectrumArgs) -> Result<Outcome> {
    match a.source {
        Source::Theorem => from_theorem(a),
        Source::Search => from_search(a),
        Source::All => from_all(a),
    }
}
