//! Circulant `mu`-way latin trades built from stable transversal families.
//!
//! Each non-stable cell `(r, c)` of transversal `T_a` contributes the base-row
//! entry `(0, c, r + c)` to the `a`-th partial latin square; the full square is
//! the orbit of the base row under `(r, c, e) -> (r + 1, c + 1, e + 1)`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{check_order, Cell, StableFamily};
use crate::setalg::{theorem_spectrum, SpectrumReport};

const EMPTY: &str = "·";

/// One filled column of the base row: the symbol of each partial square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeEntry {
    pub col: usize,
    pub symbols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TradeRepr", into = "TradeRepr")]
pub struct CirculantTrade {
    n: usize,
    mu: usize,
    base_row: Vec<TradeEntry>,
}

#[derive(Serialize, Deserialize)]
struct TradeRepr {
    n: usize,
    mu: usize,
    k: usize,
    base_row: Vec<TradeEntry>,
}

impl TryFrom<TradeRepr> for CirculantTrade {
    type Error = Error;

    fn try_from(r: TradeRepr) -> Result<Self> {
        if r.k != r.base_row.len() {
            return Err(invalid(format!("k = {} but the base row has {} entries", r.k, r.base_row.len())));
        }
        CirculantTrade::new(r.n, r.mu, r.base_row)
    }
}

impl From<CirculantTrade> for TradeRepr {
    fn from(t: CirculantTrade) -> Self {
        TradeRepr {
            n: t.n,
            mu: t.mu,
            k: t.base_row.len(),
            base_row: t.base_row,
        }
    }
}

impl CirculantTrade {
    /// Checks the structural invariants only; see [`verify_trade`] for the trade axioms.
    pub fn new(n: usize, mu: usize, mut base_row: Vec<TradeEntry>) -> Result<Self> {
        check_order(n)?;
        if mu < 2 {
            return Err(invalid(format!("mu = {mu} must be at least 2")));
        }
        base_row.sort_by_key(|e| e.col);
        for w in base_row.windows(2) {
            if w[0].col == w[1].col {
                return Err(invalid(format!("column {} appears twice in the base row", w[0].col)));
            }
        }
        for e in &base_row {
            if e.col >= n {
                return Err(invalid(format!("column {} out of range for n = {n}", e.col)));
            }
            if e.symbols.len() != mu {
                return Err(invalid(format!("column {}: {} symbols, expected {mu}", e.col, e.symbols.len())));
            }
            if let Some(&s) = e.symbols.iter().find(|&&s| s >= n) {
                return Err(invalid(format!("column {}: symbol {s} out of range", e.col)));
            }
            for (i, a) in e.symbols.iter().enumerate() {
                if e.symbols[i + 1..].contains(a) {
                    return Err(invalid(format!("column {}: symbol {a} repeated within the cell", e.col)));
                }
            }
        }
        Ok(CirculantTrade { n, mu, base_row })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Filled cells per row.
    pub fn k(&self) -> usize {
        self.base_row.len()
    }

    pub fn volume(&self) -> usize {
        self.n * self.k()
    }

    pub fn base_row(&self) -> &[TradeEntry] {
        &self.base_row
    }

    /// Row 0 of square `a`, one slot per column.
    pub fn first_row(&self, a: usize) -> Vec<Option<usize>> {
        let mut row = vec![None; self.n];
        for e in &self.base_row {
            row[e.col] = Some(e.symbols[a]);
        }
        row
    }

    /// `{(e_1, ..., e_mu)_c, ...}` over the filled columns.
    pub fn to_b_notation(&self) -> String {
        let items: Vec<String> = self
            .base_row
            .iter()
            .map(|e| {
                let syms: Vec<String> = e.symbols.iter().map(|s| s.to_string()).collect();
                format!("({})_{}", syms.join(","), e.col)
            })
            .collect();
        format!("{{{}}}", items.join(", "))
    }

    /// First rows of all squares, e.g. `(·,4,3,2,1)/(·,2,4,1,3)`.
    pub fn render_base_rows(&self) -> String {
        (0..self.mu)
            .map(|a| format!("({})", render_row(&self.first_row(a), ",")))
            .collect::<Vec<_>>()
            .join("/")
    }
}

impl fmt::Display for CirculantTrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_base_rows())
    }
}

fn render_row(row: &[Option<usize>], sep: &str) -> String {
    row.iter()
        .map(|s| s.map_or_else(|| EMPTY.to_string(), |s| s.to_string()))
        .collect::<Vec<_>>()
        .join(sep)
}

/// Theorem-style conversion: non-stable cells of each transversal become the base row.
pub fn family_to_trade(family: &StableFamily) -> Result<CirculantTrade> {
    let n = family.n();
    if family.t() == n {
        return Err(Error::EmptyTrade(n));
    }
    let mut by_col: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for tr in family.transversals() {
        for (r, &c) in tr.cols().iter().enumerate() {
            if !family.is_stable_cell(Cell::new(r, c)) {
                by_col.entry(c).or_default().push((r + c) % n);
            }
        }
    }
    let base_row = by_col.into_iter().map(|(col, symbols)| TradeEntry { col, symbols }).collect();
    CirculantTrade::new(n, family.mu(), base_row)
}

/// An `n x n` array of optional symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialLatinSquare {
    pub n: usize,
    pub rows: Vec<Vec<Option<usize>>>,
}

impl PartialLatinSquare {
    pub fn empty(n: usize) -> Self {
        PartialLatinSquare {
            n,
            rows: vec![vec![None; n]; n],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        self.rows[r][c]
    }

    pub fn filled(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().filter_map(move |(c, s)| s.map(|s| (r, c, s))))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let _ = writeln!(out, "{}", render_row(row, " "));
        }
        out
    }
}

/// The `mu` partial latin squares of a trade, cell by cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedTrade {
    pub n: usize,
    pub squares: Vec<PartialLatinSquare>,
}

impl ExpandedTrade {
    pub fn from_squares(squares: Vec<PartialLatinSquare>) -> Result<Self> {
        let Some(first) = squares.first() else {
            return Err(invalid("a trade needs at least one square"));
        };
        let n = first.n;
        for (a, sq) in squares.iter().enumerate() {
            if sq.n != n || sq.rows.len() != n || sq.rows.iter().any(|r| r.len() != n) {
                return Err(invalid(format!("square {a} is not {n} x {n}")));
            }
            if sq.filled().any(|(_, _, s)| s >= n) {
                return Err(invalid(format!("square {a} has a symbol outside [0, {n})")));
            }
        }
        Ok(ExpandedTrade { n, squares })
    }

    /// Row 0 of each square as a base row, if every square agrees on the filled columns.
    pub fn base_row(&self) -> Vec<TradeEntry> {
        (0..self.n)
            .filter(|&c| self.squares.iter().all(|sq| sq.get(0, c).is_some()))
            .map(|c| TradeEntry {
                col: c,
                symbols: self.squares.iter().map(|sq| sq.get(0, c).unwrap()).collect(),
            })
            .collect()
    }
}

/// Orbit of the base row under simultaneous cycling of rows, columns and symbols.
pub fn expand(trade: &CirculantTrade) -> ExpandedTrade {
    let n = trade.n;
    let squares = (0..trade.mu)
        .map(|a| {
            let mut sq = PartialLatinSquare::empty(n);
            for e in &trade.base_row {
                for i in 0..n {
                    sq.rows[i][(e.col + i) % n] = Some((e.symbols[a] + i) % n);
                }
            }
            sq
        })
        .collect();
    ExpandedTrade { n, squares }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TradeCheck {
    SameFilledCells,
    PartialLatin,
    DistinctEntries,
    RowSymbols,
    ColumnSymbols,
    Homogeneous,
}

impl TradeCheck {
    pub const ALL: [TradeCheck; 6] = [
        TradeCheck::SameFilledCells,
        TradeCheck::PartialLatin,
        TradeCheck::DistinctEntries,
        TradeCheck::RowSymbols,
        TradeCheck::ColumnSymbols,
        TradeCheck::Homogeneous,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: TradeCheck,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub mu: usize,
    /// Filled cells per square.
    pub volume: usize,
    pub k: Option<usize>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passed(&self, check: TradeCheck) -> bool {
        self.violations.iter().all(|v| v.check != check)
    }
}

/// Expands the trade and checks every axiom on the expanded squares.
pub fn verify_trade(trade: &CirculantTrade) -> VerificationReport {
    let mut report = verify_expanded(&expand(trade));
    if report.k.is_some_and(|k| k != trade.k()) {
        report.violations.push(Violation {
            check: TradeCheck::Homogeneous,
            detail: format!("expanded rows hold {:?} cells, base row has {}", report.k, trade.k()),
        });
    }
    report
}

/// Trade axioms plus `k`-homogeneity on explicitly given squares.
pub fn verify_expanded(trade: &ExpandedTrade) -> VerificationReport {
    let n = trade.n;
    let sq = &trade.squares;
    let mut v = Vec::new();
    let mut push = |check, detail: String| v.push(Violation { check, detail });

    let filled: Vec<Vec<(usize, usize)>> = sq.iter().map(|s| s.filled().map(|(r, c, _)| (r, c)).collect()).collect();
    for (a, f) in filled.iter().enumerate().skip(1) {
        if *f != filled[0] {
            push(TradeCheck::SameFilledCells, format!("square {a} fills different cells than square 0"));
        }
    }

    for (a, s) in sq.iter().enumerate() {
        for r in 0..n {
            let mut seen = vec![false; n];
            for c in 0..n {
                if let Some(e) = s.get(r, c) {
                    if std::mem::replace(&mut seen[e], true) {
                        push(TradeCheck::PartialLatin, format!("square {a}: symbol {e} twice in row {r}"));
                    }
                }
            }
        }
        for c in 0..n {
            let mut seen = vec![false; n];
            for r in 0..n {
                if let Some(e) = s.get(r, c) {
                    if std::mem::replace(&mut seen[e], true) {
                        push(TradeCheck::PartialLatin, format!("square {a}: symbol {e} twice in column {c}"));
                    }
                }
            }
        }
    }

    for r in 0..n {
        for c in 0..n {
            let entries: Vec<usize> = sq.iter().filter_map(|s| s.get(r, c)).collect();
            for (i, e) in entries.iter().enumerate() {
                if entries[i + 1..].contains(e) {
                    push(TradeCheck::DistinctEntries, format!("cell ({r},{c}) holds {e} in two squares"));
                }
            }
        }
    }

    let line_symbols = |s: &PartialLatinSquare, idx: usize, by_row: bool| -> Vec<usize> {
        let mut out: Vec<usize> = (0..n)
            .filter_map(|j| if by_row { s.get(idx, j) } else { s.get(j, idx) })
            .collect();
        out.sort_unstable();
        out
    };
    for idx in 0..n {
        for (by_row, check, what) in [(true, TradeCheck::RowSymbols, "row"), (false, TradeCheck::ColumnSymbols, "column")] {
            let reference = line_symbols(&sq[0], idx, by_row);
            for (a, s) in sq.iter().enumerate().skip(1) {
                if line_symbols(s, idx, by_row) != reference {
                    push(check, format!("{what} {idx}: square {a} differs from square 0"));
                }
            }
        }
    }

    let k = filled.first().map(|f| f.iter().filter(|&&(r, _)| r == 0).count());
    if let Some(k) = k {
        for (a, s) in sq.iter().enumerate() {
            let mut rows = vec![0; n];
            let mut cols = vec![0; n];
            let mut syms = vec![0; n];
            for (r, c, e) in s.filled() {
                rows[r] += 1;
                cols[c] += 1;
                syms[e] += 1;
            }
            for (what, counts) in [("row", &rows), ("column", &cols), ("symbol", &syms)] {
                if let Some(i) = counts.iter().position(|&x| x != k) {
                    push(
                        TradeCheck::Homogeneous,
                        format!("square {a}: {what} {i} has {} cells, expected {k}", counts[i]),
                    );
                }
            }
        }
    }

    VerificationReport {
        n,
        mu: sq.len(),
        volume: filled.first().map_or(0, |f| f.len()),
        k,
        violations: v,
    }
}

/// Existence statement for `mu`-way trades, indexed by `k = n - t`.
pub fn trade_spectrum(n: usize, mu: usize) -> Result<SpectrumReport> {
    let t = theorem_spectrum(n, mu)?;
    let about = n as i64;
    Ok(SpectrumReport {
        n,
        mu,
        proven: t.proven.reflect(about),
        exceptions: t.exceptions.reflect(about),
        infeasible: t.infeasible.reflect(about),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{identical_family, shifted_family};
    use crate::model::Transversal;
    use crate::setalg::IntervalSet;

    fn b5_example() -> StableFamily {
        StableFamily::new(vec![
            Transversal::new(5, vec![0, 2, 4, 1, 3]).unwrap(),
            Transversal::diagonal(5).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn b5_base_rows_and_grids() {
        let trade = family_to_trade(&b5_example()).unwrap();
        assert_eq!(trade.k(), 4);
        assert_eq!(trade.render_base_rows(), "(·,4,3,2,1)/(·,2,4,1,3)");
        assert_eq!(trade.to_b_notation(), "{(4,2)_1, (3,4)_2, (2,1)_3, (1,3)_4}");
        let ex = expand(&trade);
        assert_eq!(ex.squares[0].render(), "· 4 3 2 1\n2 · 0 4 3\n4 3 · 1 0\n1 0 4 · 2\n3 2 1 0 ·\n");
        assert_eq!(ex.squares[1].render(), "· 2 4 1 3\n4 · 3 0 2\n3 0 · 4 1\n2 4 1 · 0\n1 3 0 2 ·\n");
        let report = verify_trade(&trade);
        assert!(report.is_ok(), "{:?}", report.violations);
        assert_eq!(report.volume, 20);
    }

    #[test]
    fn swapped_symbols_are_caught() {
        let trade = family_to_trade(&b5_example()).unwrap();
        // Exchange the two squares' symbols in column 1.
        let mut row = trade.base_row().to_vec();
        row[0].symbols.swap(0, 1);
        let report = verify_trade(&CirculantTrade::new(5, 2, row).unwrap());
        assert!(!report.passed(TradeCheck::RowSymbols));
        assert!(!report.is_ok());
        // Exchange columns 1 and 4 within the second square: rows agree, columns do not.
        let mut row = trade.base_row().to_vec();
        let (x, y) = (row[0].symbols[1], row[3].symbols[1]);
        row[0].symbols[1] = y;
        row[3].symbols[1] = x;
        let report = verify_trade(&CirculantTrade::new(5, 2, row).unwrap());
        assert!(report.passed(TradeCheck::RowSymbols));
        assert!(!report.passed(TradeCheck::ColumnSymbols));
    }

    #[test]
    fn identical_family_has_no_trade() {
        assert!(matches!(family_to_trade(&identical_family(7, 3).unwrap()), Err(Error::EmptyTrade(7))));
    }

    #[test]
    fn shifted_family_fills_every_column() {
        let trade = family_to_trade(&shifted_family(5, 3).unwrap()).unwrap();
        assert_eq!(trade.k(), 5);
        assert!(trade.base_row().iter().all(|e| e.symbols.len() == 3));
        assert!(verify_trade(&trade).is_ok());
    }

    #[test]
    fn first_column_relation() {
        let fam = b5_example();
        let trade = family_to_trade(&fam).unwrap();
        let ex = expand(&trade);
        for (a, tr) in fam.transversals().iter().enumerate() {
            for (r, &c) in tr.cols().iter().enumerate() {
                if fam.is_stable_cell(Cell::new(r, c)) {
                    continue;
                }
                assert_eq!(ex.squares[a].get((5 - c) % 5, 0), Some(r));
            }
        }
        assert_eq!(ex.base_row(), trade.base_row());
    }

    #[test]
    fn structural_rejections() {
        let e = |col, symbols: Vec<usize>| TradeEntry { col, symbols };
        assert!(CirculantTrade::new(5, 2, vec![e(1, vec![1, 1])]).is_err());
        assert!(CirculantTrade::new(5, 2, vec![e(1, vec![1, 2]), e(1, vec![3, 4])]).is_err());
        assert!(CirculantTrade::new(5, 2, vec![e(5, vec![1, 2])]).is_err());
        assert!(CirculantTrade::new(5, 2, vec![e(1, vec![1, 2, 3])]).is_err());
        assert!(CirculantTrade::new(4, 2, vec![]).is_err());
    }

    #[test]
    fn json_round_trip_checks_k() {
        let trade = family_to_trade(&b5_example()).unwrap();
        let json = serde_json::to_string(&trade).unwrap();
        assert!(json.starts_with(r#"{"n":5,"mu":2,"k":4,"base_row":[{"col":1,"symbols":[4,2]}"#));
        let back: CirculantTrade = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trade);
        assert!(serde_json::from_str::<CirculantTrade>(&json.replace(r#""k":4"#, r#""k":3"#)).is_err());
    }

    #[test]
    fn trade_spectra() {
        let s = trade_spectrum(51, 3).unwrap();
        assert!(s.exceptions.contains(22));
        let s = trade_spectrum(33, 3).unwrap();
        assert_eq!(s.proven, IntervalSet::singleton(0).union(&IntervalSet::interval(6, 30)));
        assert!(trade_spectrum(34, 3).is_err());
    }
}
