use anyhow::Result;
use serde_json::json;
use stable_transversals::verify_appendix;

use crate::envelope::{Outcome, Status};
use crate::input::load_dataset;
use crate::TablesArgs;

pub fn run(_a: &TablesArgs) -> Result<Outcome> {
    let dataset = load_dataset(&[])?;
    let report = verify_appendix(&dataset);
    let claims: Vec<_> = report
        .claims
        .iter()
        .map(|c| json!({ "claim": c.statement(), "group": c.group, "verified": c.verified, "detail": c.detail }))
        .collect();
    let failures: Vec<String> = report.failures().map(|c| c.statement()).collect();
    let mut text = format!(
        "{} blocks, {} claims, {} failed\n",
        report.blocks,
        report.claims.len(),
        failures.len()
    );
    for f in &failures {
        eprintln!("claim not verified: {f}");
        text.push_str(&format!("FAIL {f}\n"));
    }
    let status = if report.is_ok() { Status::Ok } else { Status::Error };
    Ok(Outcome::new(
        status,
        json!({ "blocks": report.blocks, "claims": claims, "failures": failures }),
        text,
    ))
}
