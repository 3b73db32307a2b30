use anyhow::Result;
use serde_json::json;
use stable_transversals::{compose_from_dataset, construct_family, Error};

use crate::envelope::{Outcome, Status};
use crate::input::{family_text, family_transcript, load_dataset, parse_base, write_family};
use crate::ComposeArgs;

pub fn run(a: &ComposeArgs) -> Result<Outcome> {
    let choice = parse_base(&a.b)?;
    let dataset = load_dataset(&a.witnesses)?;
    let built = if a.closed_forms {
        construct_family(&dataset, a.n, a.mu, a.t, choice)
    } else {
        compose_from_dataset(&dataset, a.n, a.mu, a.t, choice)
    };
    match built {
        Ok(c) => {
            if let Some(path) = &a.output {
                write_family(path, &c.family)?;
            }
            let payload = json!({
                "family": c.family,
                "provenance": c.provenance,
                "provenance_label": c.provenance.to_string(),
                "verification": family_transcript(&c.family)?,
            });
            let text = format!("{}provenance: {}\n", family_text(&c.family), c.provenance);
            Ok(Outcome::new(Status::Ok, payload, text))
        }
        Err(Error::NoConstruction(why)) => Ok(Outcome::new(
            Status::Infeasible,
            json!({ "explanation": why }),
            format!("no construction: {why}"),
        )),
        Err(e) => Err(e.into()),
    }
}
