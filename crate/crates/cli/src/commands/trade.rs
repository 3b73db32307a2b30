use anyhow::{bail, Context, Result};
use serde_json::json;
use stable_transversals::trades::expand;
use stable_transversals::{construct_family, family_to_trade, verify_trade, StableFamily};

use crate::envelope::{Outcome, Status};
use crate::input::{load_dataset, parse_base, read_family};
use crate::TradeArgs;

fn family(a: &TradeArgs) -> Result<StableFamily> {
    if let Some(path) = &a.family {
        return read_family(path);
    }
    let (Some(n), Some(mu), Some(t)) = (a.n, a.mu, a.t) else {
        bail!("give either --family FILE or all of --n, --mu, --t");
    };
    let dataset = load_dataset(&[])?;
    let built = construct_family(&dataset, n, mu, t, parse_base(&a.b)?)
        .with_context(|| format!("building a family for n = {n}, mu = {mu}, t = {t}"))?;
    Ok(built.family)
}

pub fn run(a: &TradeArgs) -> Result<Outcome> {
    let family = family(a)?;
    let trade = family_to_trade(&family)?;
    let report = verify_trade(&trade);
    let status = if report.is_ok() { Status::Ok } else { Status::Error };
    let mut text = format!(
        "n={} mu={} k={}\n{}\n{}\n",
        trade.n(),
        trade.mu(),
        trade.k(),
        trade.to_b_notation(),
        trade.render_base_rows()
    );
    for v in &report.violations {
        eprintln!("trade check failed: {:?}: {}", v.check, v.detail);
        text.push_str(&format!("violation: {}\n", v.detail));
    }
    let mut payload = json!({
        "family": family,
        "trade": trade,
        "b_notation": trade.to_b_notation(),
        "base_rows": trade.render_base_rows(),
        "verification": report,
    });
    if a.grids {
        let grids: Vec<String> = expand(&trade).squares.iter().map(|sq| sq.render()).collect();
        for (i, g) in grids.iter().enumerate() {
            text.push_str(&format!("square {i}:\n{g}"));
            if !g.ends_with('\n') {
                text.push('\n');
            }
        }
        payload["grids"] = json!(grids);
    }
    Ok(Outcome::new(status, payload, text))
}
