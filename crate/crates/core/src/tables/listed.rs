//! Stable sizes reported by earlier computer searches for small orders.
//!
//! Each line of the bundled file reads `mu=<mu> n=<n> <complete|partial>: t ...`.
//! A complete row claims the listed values are exactly the nontrivial `t`
//! (those in `[1, n - 1]`); a partial row only claims existence.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

const SHIPPED: &str = include_str!("../../data/search_tables.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListedRow {
    pub mu: usize,
    pub n: usize,
    pub complete: bool,
    pub values: BTreeSet<usize>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field(line: usize, tok: Option<&str>, name: &str) -> Result<usize> {
    tok.and_then(|t| t.strip_prefix(name))
        .and_then(|t| t.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected `{name}=<int>`")))
}

pub fn parse_listed(text: &str) -> Result<Vec<ListedRow>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (head, tail) = raw
            .split_once(':')
            .ok_or_else(|| parse_err(line, "missing `:` after the row header"))?;
        let mut toks = head.split_whitespace();
        let mu = field(line, toks.next(), "mu")?;
        let n = field(line, toks.next(), "n")?;
        let complete = match toks.next() {
            Some("complete") => true,
            Some("partial") => false,
            _ => return Err(parse_err(line, "expected `complete` or `partial`")),
        };
        let values = tail
            .split_whitespace()
            .map(|v| v.parse::<usize>().map_err(|_| parse_err(line, format!("not a stable size: {v:?}"))))
            .collect::<Result<BTreeSet<_>>>()?;
        rows.push(ListedRow { mu, n, complete, values });
    }
    Ok(rows)
}

/// Bundled rows for `mu` in {3, 4} and odd `n` up to 31.
pub fn listed_rows() -> Vec<ListedRow> {
    parse_listed(SHIPPED).expect("bundled search table parses")
}

pub fn listed_row(n: usize, mu: usize) -> Option<ListedRow> {
    listed_rows().into_iter().find(|r| r.n == n && r.mu == mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_rows() {
        let rows = listed_rows();
        assert_eq!(rows.len(), 27);
        let r = listed_row(13, 3).unwrap();
        assert!(r.complete);
        assert_eq!(r.values, BTreeSet::from([1, 2, 3, 4, 5, 6, 7, 9]));
        assert!(!listed_row(29, 4).unwrap().complete);
        assert_eq!(listed_row(31, 4).unwrap().values, BTreeSet::from([13]));
        assert!(listed_row(33, 3).is_none());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_listed("mu=3 n=5 complete 1\n").is_err());
        assert!(parse_listed("mu=3 n=5 maybe: 1\n").is_err());
        assert!(parse_listed("mu=3 n=5 complete: x\n").is_err());
        assert!(parse_listed("n=5 mu=3 complete: 1\n").is_err());
    }
}
