//! The back circulant latin square `B_n`, its transversals, and stably
//! intersecting families of transversals.
//!
//! Cell `(r, c)` of `B_n` holds the symbol `(r + c) mod n`. Symbols are never
//! stored; every type here recomputes them from the row and column.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Validates that `n` can be the order of a square with transversals.
pub fn check_order(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 0 {
        Err(Error::InvalidOrder(n))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// Symbol of this cell in `B_n`, without validating the order.
    pub fn symbol(self, n: usize) -> usize {
        (self.row + self.col) % n
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell { row, col }
    }
}

impl From<Cell> for (usize, usize) {
    fn from(c: Cell) -> Self {
        (c.row, c.col)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

pub fn symbol_of(n: usize, cell: Cell) -> Result<usize> {
    check_order(n)?;
    if cell.row >= n || cell.col >= n {
        return Err(invalid(format!("cell {cell} lies outside B_{n}")));
    }
    Ok(cell.symbol(n))
}

/// Returns true iff `cols` (column chosen in each row) is a transversal of `B_n`.
pub fn is_transversal(n: usize, cols: &[usize]) -> Result<bool> {
    check_order(n)?;
    if cols.len() != n {
        return Err(invalid(format!(
            "expected {n} column indices, got {}",
            cols.len()
        )));
    }
    Ok(first_defect(n, cols).is_none())
}

/// Describes the first violated transversal condition, if any.
pub(crate) fn first_defect(n: usize, cols: &[usize]) -> Option<String> {
    let mut col_row = vec![usize::MAX; n];
    let mut sym_row = vec![usize::MAX; n];
    for (r, &c) in cols.iter().enumerate() {
        if c >= n {
            return Some(format!("row {r}: column {c} out of range"));
        }
        if col_row[c] != usize::MAX {
            return Some(format!("column {c} repeated in rows {} and {r}", col_row[c]));
        }
        col_row[c] = r;
        let e = (r + c) % n;
        if sym_row[e] != usize::MAX {
            return Some(format!("symbol {e} repeated in rows {} and {r}", sym_row[e]));
        }
        sym_row[e] = r;
    }
    None
}

/// A transversal of `B_n`, stored as the column selected in each row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transversal {
    cols: Vec<usize>,
}

impl Transversal {
    pub fn new(n: usize, cols: Vec<usize>) -> Result<Self> {
        check_order(n)?;
        if cols.len() != n {
            return Err(invalid(format!(
                "expected {n} column indices, got {}",
                cols.len()
            )));
        }
        if let Some(defect) = first_defect(n, &cols) {
            return Err(invalid(format!("not a transversal of B_{n}: {defect}")));
        }
        Ok(Transversal { cols })
    }

    /// The main diagonal `(i, i)`.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::shifted(n, 0)
    }

    /// The diagonal `(i, i + shift)`.
    pub fn shifted(n: usize, shift: usize) -> Result<Self> {
        check_order(n)?;
        Ok(Transversal {
            cols: (0..n).map(|i| (i + shift) % n).collect(),
        })
    }

    pub(crate) fn from_cols_unchecked(cols: Vec<usize>) -> Self {
        Transversal { cols }
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn col(&self, row: usize) -> usize {
        self.cols[row]
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cols.get(cell.row) == Some(&cell.col)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cols.iter().enumerate().map(|(r, &c)| Cell::new(r, c))
    }

    /// Image under `(r, c) -> (r + dr, c + dc)`; symbols shift by `dr + dc`.
    pub fn translate(&self, dr: usize, dc: usize) -> Transversal {
        let n = self.n();
        let mut cols = vec![0; n];
        for (r, &c) in self.cols.iter().enumerate() {
            cols[(r + dr) % n] = (c + dc) % n;
        }
        Transversal { cols }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StableCheck {
    Stable {
        t: usize,
        stable_set: Vec<Cell>,
    },
    /// Transversals `pair.0` and `pair.1` share `cell`, which is not common to all.
    NotStable { pair: (usize, usize), cell: Cell },
}

impl StableCheck {
    pub fn is_stable(&self) -> bool {
        matches!(self, StableCheck::Stable { .. })
    }
}

pub fn check_stable(transversals: &[Transversal]) -> Result<StableCheck> {
    if transversals.len() < 2 {
        return Err(invalid("a family needs at least two transversals"));
    }
    let n = transversals[0].n();
    if transversals.iter().any(|t| t.n() != n) {
        return Err(invalid("transversals have different orders"));
    }
    let common: Vec<bool> = (0..n)
        .map(|r| {
            let c = transversals[0].col(r);
            transversals.iter().all(|t| t.col(r) == c)
        })
        .collect();
    for a in 0..transversals.len() {
        for b in a + 1..transversals.len() {
            for r in 0..n {
                if !common[r] && transversals[a].col(r) == transversals[b].col(r) {
                    return Ok(StableCheck::NotStable {
                        pair: (a, b),
                        cell: Cell::new(r, transversals[a].col(r)),
                    });
                }
            }
        }
    }
    let stable_set: Vec<Cell> = (0..n)
        .filter(|&r| common[r])
        .map(|r| Cell::new(r, transversals[0].col(r)))
        .collect();
    Ok(StableCheck::Stable {
        t: stable_set.len(),
        stable_set,
    })
}

/// `mu` transversals of `B_n` intersecting stably, kept in the order given.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct StableFamily {
    transversals: Vec<Transversal>,
    stable_set: Vec<Cell>,
}

impl StableFamily {
    pub fn new(transversals: Vec<Transversal>) -> Result<Self> {
        match check_stable(&transversals)? {
            StableCheck::Stable { stable_set, .. } => {
                Ok(StableFamily {
                    transversals,
                    stable_set,
                })
            }
            StableCheck::NotStable { pair, cell } => Err(invalid(format!(
                "transversals {} and {} share the non-stable cell {cell}",
                pair.0, pair.1
            ))),
        }
    }

    pub fn n(&self) -> usize {
        self.transversals[0].n()
    }

    pub fn mu(&self) -> usize {
        self.transversals.len()
    }

    pub fn t(&self) -> usize {
        self.stable_set.len()
    }

    pub fn transversals(&self) -> &[Transversal] {
        &self.transversals
    }

    pub fn stable_set(&self) -> &[Cell] {
        &self.stable_set
    }

    pub fn is_stable_cell(&self, cell: Cell) -> bool {
        self.stable_set.binary_search(&cell).is_ok()
    }

    /// Same family with the transversals in lexicographic order.
    pub fn canonical(&self) -> StableFamily {
        let mut transversals = self.transversals.clone();
        transversals.sort();
        StableFamily {
            transversals,
            stable_set: self.stable_set.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    n: usize,
    mu: usize,
    t: usize,
    cols: Vec<Vec<usize>>,
    stable_cells: Vec<Cell>,
}

impl TryFrom<FamilyRepr> for StableFamily {
    type Error = Error;

    fn try_from(repr: FamilyRepr) -> Result<Self> {
        if repr.cols.len() != repr.mu {
            return Err(invalid(format!(
                "mu = {} but {} transversals given",
                repr.mu,
                repr.cols.len()
            )));
        }
        let transversals = repr
            .cols
            .into_iter()
            .map(|cols| Transversal::new(repr.n, cols))
            .collect::<Result<Vec<_>>>()?;
        let family = StableFamily::new(transversals)?;
        if family.t() != repr.t || family.stable_set != repr.stable_cells {
            return Err(invalid(format!(
                "declared stable set (t = {}) does not match the computed one (t = {})",
                repr.t,
                family.t()
            )));
        }
        Ok(family)
    }
}

impl From<StableFamily> for FamilyRepr {
    fn from(f: StableFamily) -> Self {
        FamilyRepr {
            n: f.n(),
            mu: f.mu(),
            t: f.t(),
            stable_cells: f.stable_set.clone(),
            cols: f.transversals.into_iter().map(|t| t.cols).collect(),
        }
    }
}

/// The `size x size` subsquare of `B_n` on rows and columns
/// `origin, ..., origin + size - 1` (mod n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsquareSpec {
    pub n: usize,
    pub origin: usize,
    pub size: usize,
}

impl SubsquareSpec {
    pub fn new(n: usize, origin: usize, size: usize) -> Result<Self> {
        check_order(n)?;
        if size > n {
            return Err(invalid(format!("subsquare of size {size} exceeds B_{n}")));
        }
        Ok(SubsquareSpec { n, origin, size })
    }

    /// Row (and column) indices covered, reduced mod n.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.size).map(move |k| (self.origin + k) % self.n)
    }

    pub fn covers(&self, index: usize) -> bool {
        index < self.n && (index + self.n - self.origin % self.n) % self.n < self.size
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.covers(cell.row) && self.covers(cell.col)
    }
}

/// Checks that `cells` is a partial transversal of the subsquare whose
/// symbols all come from `alphabet` (each symbol once when the alphabet has
/// exactly `sub.size` symbols).
pub fn is_partial_transversal(
    sub: &SubsquareSpec,
    cells: &[Cell],
    alphabet: &BTreeSet<usize>,
) -> bool {
    if cells.len() != sub.size {
        return false;
    }
    let n = sub.n;
    let alphabet: BTreeSet<usize> = alphabet.iter().map(|&e| e % n).collect();
    let mut rows = BTreeSet::new();
    let mut cols = BTreeSet::new();
    let mut syms = BTreeSet::new();
    for &cell in cells {
        if !sub.contains(cell) {
            return false;
        }
        let e = cell.symbol(n);
        if !alphabet.contains(&e) {
            return false;
        }
        if !rows.insert(cell.row) || !cols.insert(cell.col) || !syms.insert(e) {
            return false;
        }
    }
    true
}
