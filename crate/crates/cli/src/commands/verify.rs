use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use stable_transversals::trades::TradeCheck;
use stable_transversals::{check_stable, verify_trade, Cell, CirculantTrade, StableCheck, Transversal};

use crate::envelope::{Outcome, Status};
use crate::input::read_json;
use crate::VerifyArgs;

#[derive(Debug, Serialize)]
struct Check {
    check: String,
    passed: bool,
    detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        check: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn field<T: serde::de::DeserializeOwned>(v: &Value, key: &str) -> Result<Option<T>> {
    v.get(key)
        .map(|x| serde_json::from_value(x.clone()).with_context(|| format!("field `{key}` has the wrong shape")))
        .transpose()
}

fn verify_family(v: &Value) -> Result<Vec<Check>> {
    let n: usize = field(v, "n")?.context("family needs `n`")?;
    let cols: Vec<Vec<usize>> = field(v, "cols")?.context("family needs `cols`")?;
    let mut checks = Vec::new();
    if let Some(mu) = field::<usize>(v, "mu")? {
        checks.push(check("mu", mu == cols.len(), format!("declared mu = {mu}, {} transversals given", cols.len())));
    }
    let mut members = Vec::new();
    for (i, c) in cols.into_iter().enumerate() {
        match Transversal::new(n, c) {
            Ok(tr) => {
                checks.push(check(format!("transversal {i}"), true, "valid"));
                members.push(tr);
            }
            Err(e) => checks.push(check(format!("transversal {i}"), false, e.to_string())),
        }
    }
    if checks.iter().any(|c| !c.passed) {
        return Ok(checks);
    }
    match check_stable(&members)? {
        StableCheck::Stable { t, stable_set } => {
            checks.push(check("stable", true, format!("stable in t = {t} cells")));
            if let Some(declared) = field::<usize>(v, "t")? {
                checks.push(check("t", declared == t, format!("declared t = {declared}, computed t = {t}")));
            }
            if let Some(cells) = field::<Vec<Cell>>(v, "stable_cells")? {
                let mut cells = cells;
                cells.sort();
                checks.push(check("stable_cells", cells == stable_set, "declared stable cells vs computed"));
            }
        }
        StableCheck::NotStable { pair, cell } => checks.push(check(
            "stable",
            false,
            format!(
                "transversals {} and {} share cell {cell} (row {}), which is not common to all",
                pair.0, pair.1, cell.row
            ),
        )),
    }
    Ok(checks)
}

fn verify_trade_value(v: &Value) -> Result<Vec<Check>> {
    let trade: CirculantTrade = match serde_json::from_value(v.clone()) {
        Ok(t) => t,
        Err(e) => return Ok(vec![check("structure", false, e.to_string())]),
    };
    let report = verify_trade(&trade);
    Ok(TradeCheck::ALL
        .iter()
        .map(|&c| {
            let details: Vec<&str> = report.violations.iter().filter(|v| v.check == c).map(|v| v.detail.as_str()).collect();
            let name = serde_json::to_value(c).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default();
            check(name, details.is_empty(), if details.is_empty() { "ok".to_string() } else { details.join("; ") })
        })
        .collect())
}

pub fn run(a: &VerifyArgs) -> Result<Outcome> {
    let mut value = read_json(&a.file, "family")?;
    if value.get("base_row").is_none() && value.get("cols").is_none() {
        value = read_json(&a.file, "trade")?;
    }
    let (kind, checks) = if value.get("base_row").is_some() {
        ("trade", verify_trade_value(&value)?)
    } else if value.get("cols").is_some() {
        ("family", verify_family(&value)?)
    } else {
        anyhow::bail!("{} holds neither a family (`cols`) nor a trade (`base_row`)", a.file.display());
    };
    let ok = checks.iter().all(|c| c.passed);
    let mut text = format!("{kind}: {}\n", if ok { "all checks passed" } else { "FAILED" });
    for c in &checks {
        if !c.passed {
            eprintln!("check failed: {}: {}", c.check, c.detail);
        }
        text.push_str(&format!("{} {}: {}\n", if c.passed { "pass" } else { "FAIL" }, c.check, c.detail));
    }
    let status = if ok { Status::Ok } else { Status::Error };
    Ok(Outcome::new(status, json!({ "kind": kind, "ok": ok, "checks": checks }), text))
}
