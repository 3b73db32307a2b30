//! Dataset loading, family/trade files and the family verification transcript.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use stable_transversals::{check_stable, is_transversal, BaseChoice, Dataset, StableCheck, StableFamily};

pub const DATA_ENV: &str = "STABLE_TRANSVERSALS_DATA";

/// The shipped dataset, or the file named by `STABLE_TRANSVERSALS_DATA`,
/// plus any extra witness files.
pub fn load_dataset(extra: &[PathBuf]) -> Result<Dataset> {
    let mut ds = match std::env::var_os(DATA_ENV) {
        Some(path) if !path.is_empty() => {
            let path = PathBuf::from(path);
            Dataset::load(&path).with_context(|| format!("loading dataset {} (from {DATA_ENV})", path.display()))?
        }
        _ => Dataset::shipped().context("loading the bundled dataset")?,
    };
    for path in extra {
        let more = Dataset::load(path).with_context(|| format!("loading witness file {}", path.display()))?;
        ds.extend(more);
    }
    Ok(ds)
}

pub fn parse_base(s: &str) -> Result<BaseChoice> {
    s.parse::<BaseChoice>().with_context(|| format!("invalid --b {s:?}"))
}

/// Reads JSON; an envelope is unwrapped to its payload, and a payload
/// holding `family` or `trade` to that object.
pub fn read_json(path: &Path, key: &str) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {} as JSON", path.display()))?;
    if let Some(p) = value.get("payload").cloned() {
        value = p;
    }
    if let Some(inner) = value.get(key).cloned() {
        value = inner;
    }
    Ok(value)
}

pub fn read_family(path: &Path) -> Result<StableFamily> {
    let value = read_json(path, "family")?;
    serde_json::from_value(value).with_context(|| format!("{} is not a valid stable family", path.display()))
}

pub fn write_family(path: &Path, family: &StableFamily) -> Result<()> {
    let mut s = serde_json::to_string_pretty(family)?;
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

/// Independent re-check of a family: each member is a transversal and all
/// pairs meet exactly in the common cells.
pub fn family_transcript(family: &StableFamily) -> Result<Value> {
    let n = family.n();
    let members: Vec<Value> = family
        .transversals()
        .iter()
        .enumerate()
        .map(|(i, tr)| Ok(json!({ "index": i, "transversal": is_transversal(n, tr.cols())? })))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    let trs = family.transversals();
    for a in 0..trs.len() {
        for b in a + 1..trs.len() {
            let shared = (0..n).filter(|&r| trs[a].col(r) == trs[b].col(r)).count();
            pairs.push(json!({ "pair": [a, b], "shared": shared }));
        }
    }
    let (stable, t) = match check_stable(trs)? {
        StableCheck::Stable { t, .. } => (true, t),
        StableCheck::NotStable { .. } => (false, 0),
    };
    if !stable || t != family.t() {
        bail!("family failed re-verification");
    }
    Ok(json!({ "members": members, "pairs": pairs, "stable": stable, "t": t }))
}

pub fn family_text(family: &StableFamily) -> String {
    let mut s = format!("n={} mu={} t={}\n", family.n(), family.mu(), family.t());
    for (i, tr) in family.transversals().iter().enumerate() {
        let cols: Vec<String> = tr.cols().iter().map(|c| c.to_string()).collect();
        s.push_str(&format!("T{i}: {}\n", cols.join(" ")));
    }
    let cells: Vec<String> = family.stable_set().iter().map(|c| c.to_string()).collect();
    s.push_str(&format!("stable cells: {}\n", if cells.is_empty() { "none".into() } else { cells.join(" ") }));
    s
}
