//! Backtracking search for stably intersecting families.
//!
//! The search first fixes the stable set `S` row by row (each row either
//! hosts a stable cell shared by every transversal or is left free), then
//! completes the transversals one after another over the free rows. A cell
//! chosen by one transversal in a free row is masked out of that row for all
//! later transversals, so pairwise intersections never grow beyond `S`.
//!
//! Two boards share the engine: `B_n` itself (symbols mod n) and the corner
//! subsquare `B_{0,m}` with a restricted alphabet (symbols `r + c`).

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{check_order, StableFamily, Transversal};
use crate::partial::{OmegaInstance, PartialFamily};

/// Largest order the bitmask engine accepts.
pub const MAX_ORDER: usize = 63;

/// Default bound for [`enumerate_transversals`].
pub const ORACLE_LIMIT: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SearchMode {
    Exhaustive,
    Randomized { seed: u64 },
}

/// Node budget; one node is one attempted cell assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    #[serde(flatten)]
    pub mode: SearchMode,
    pub max_nodes: Option<u64>,
}

impl SearchBudget {
    /// Randomized runs without an explicit limit stop here.
    pub const DEFAULT_RANDOM_NODES: u64 = 100_000_000;

    pub fn exhaustive() -> Self {
        SearchBudget {
            mode: SearchMode::Exhaustive,
            max_nodes: None,
        }
    }

    pub fn exhaustive_limited(max_nodes: u64) -> Self {
        SearchBudget {
            mode: SearchMode::Exhaustive,
            max_nodes: Some(max_nodes),
        }
    }

    pub fn randomized(seed: u64, max_nodes: u64) -> Self {
        SearchBudget {
            mode: SearchMode::Randomized { seed },
            max_nodes: Some(max_nodes),
        }
    }

    fn limit(&self) -> u64 {
        match (self.mode, self.max_nodes) {
            (_, Some(m)) => m,
            (SearchMode::Exhaustive, None) => u64::MAX,
            (SearchMode::Randomized { .. }, None) => Self::DEFAULT_RANDOM_NODES,
        }
    }
}

/// Individually switchable pruning rules. None of them changes which
/// instances have solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pruning {
    /// Fix a stable cell at `(0, 0)` (or, when `t = 0`, the first
    /// transversal's row-0 cell) using the translations of `B_n`.
    pub translation: bool,
    /// Transversals appear in increasing lexicographic order.
    pub lex_order: bool,
    /// Each decided free row keeps at least `mu` usable cells.
    pub row_capacity: bool,
    /// Once `S` is complete, every free column and symbol keeps `mu` usable cells.
    pub leaf_capacity: bool,
    /// Every later free row of the current transversal keeps a candidate.
    pub forward_check: bool,
    /// After each completed transversal, the rest still fit in every free row.
    pub between_capacity: bool,
}

impl Default for Pruning {
    fn default() -> Self {
        Pruning {
            translation: true,
            lex_order: true,
            row_capacity: true,
            leaf_capacity: true,
            forward_check: true,
            between_capacity: true,
        }
    }
}

impl Pruning {
    pub fn none() -> Self {
        Pruning {
            translation: false,
            lex_order: false,
            row_capacity: false,
            leaf_capacity: false,
            forward_check: false,
            between_capacity: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    /// Worker threads for exhaustive runs; results do not depend on it.
    pub threads: usize,
    pub pruning: Pruning,
    /// Answer `t in [n - mu + 1, n - 1]` without searching.
    pub shortcut_infeasible: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            threads: 1,
            pruning: Pruning::default(),
            shortcut_infeasible: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InfeasibleReason {
    /// With `t` in `[size - mu + 1, size - 1]` fewer than `mu` free columns
    /// remain, so some free row would need `mu` distinct free cells.
    ForcedOverlap { lo: usize, hi: usize },
}

impl std::fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfeasibleReason::ForcedOverlap { lo, hi } => write!(
                f,
                "t in [{lo}, {hi}]: fewer free columns than transversals (nonexistence range)"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "value")]
pub enum SearchOutcome<F> {
    Found(F),
    ExhaustedNone,
    BudgetExceeded,
    ProvenInfeasible(InfeasibleReason),
}

impl<F> SearchOutcome<F> {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn found(&self) -> Option<&F> {
        match self {
            SearchOutcome::Found(f) => Some(f),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport<F> {
    pub outcome: SearchOutcome<F>,
    pub nodes: u64,
}

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

#[derive(Debug, Clone)]
struct Board {
    size: usize,
    /// `B_n` when true (symbols mod n), a corner subsquare otherwise.
    wrap: bool,
    full: u64,
    alphabet: u64,
}

impl Board {
    fn latin(n: usize) -> Self {
        let full = (1u64 << n) - 1;
        Board {
            size: n,
            wrap: true,
            full,
            alphabet: full,
        }
    }

    fn subsquare(inst: &OmegaInstance) -> Self {
        let size = inst.size();
        Board {
            size,
            wrap: false,
            full: (1u64 << size) - 1,
            alphabet: inst.alphabet_mask(),
        }
    }

    #[inline]
    fn sym(&self, r: usize, c: usize) -> usize {
        if self.wrap {
            (r + c) % self.size
        } else {
            r + c
        }
    }

    /// Columns `c` with `sym(r, c)` in `syms` (also rows, by symmetry).
    #[inline]
    fn cols_with_syms(&self, r: usize, syms: u64) -> u64 {
        if self.wrap {
            let n = self.size;
            ((syms >> r) | (syms << (n - r))) & self.full
        } else {
            (syms >> r) & self.full
        }
    }

    /// `{ -c : c in cols }` for the wrapped board; `{ size-1-c }` otherwise.
    fn reflect(&self, cols: u64) -> u64 {
        let n = self.size;
        let mut out = 0;
        for c in bits(cols) {
            out |= if self.wrap { 1 << ((n - c) % n) } else { 1 << (n - 1 - c) };
        }
        out
    }

    /// Rows `r` whose cell of symbol `e` lies in one of the columns encoded
    /// by `reflected = reflect(cols)`.
    #[inline]
    fn rows_with_symbol(&self, e: usize, reflected: u64) -> u64 {
        let n = self.size;
        if self.wrap {
            let e = e % n;
            ((reflected << e) | (reflected >> (n - e))) & self.full
        } else if e + 1 >= n {
            (reflected << (e + 1 - n)) & self.full
        } else {
            reflected >> (n - 1 - e)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

/// Decisions for the first rows of phase one; a unit of parallel work.
#[derive(Debug, Clone)]
struct Prefix {
    stable_col: Vec<usize>,
    free_rows: u64,
    s_cols: u64,
    s_syms: u64,
    s_count: usize,
}

const NONE: usize = usize::MAX;

struct Engine<'a> {
    board: &'a Board,
    mu: usize,
    t: usize,
    pruning: Pruning,
    // Stable set under construction.
    stable_col: Vec<usize>,
    free_rows: u64,
    s_cols: u64,
    s_syms: u64,
    s_count: usize,
    // Completion.
    free_list: Vec<usize>,
    cols: Vec<Vec<usize>>,
    free_cols: Vec<u64>,
    free_syms: Vec<u64>,
    taken: Vec<u64>,
    base_avail: Vec<u64>,
    nodes: u64,
    limit: u64,
    aborted: bool,
    rng: Option<ChaCha8Rng>,
    /// Stop splitting phase one at this row and record a prefix instead.
    split_at: Option<usize>,
    prefixes: Vec<Prefix>,
    cancel: Option<(&'a AtomicUsize, usize)>,
    solution: Option<Vec<Vec<usize>>>,
}

impl<'a> Engine<'a> {
    fn new(board: &'a Board, mu: usize, t: usize, pruning: Pruning, limit: u64) -> Self {
        let size = board.size;
        Engine {
            board,
            mu,
            t,
            pruning,
            stable_col: vec![NONE; size],
            free_rows: 0,
            s_cols: 0,
            s_syms: 0,
            s_count: 0,
            free_list: Vec::with_capacity(size),
            cols: vec![vec![NONE; size]; mu],
            free_cols: vec![0; mu],
            free_syms: vec![0; mu],
            taken: vec![0; size],
            base_avail: vec![0; size],
            nodes: 0,
            limit,
            aborted: false,
            rng: None,
            split_at: None,
            prefixes: Vec::new(),
            cancel: None,
            solution: None,
        }
    }

    fn load(&mut self, p: &Prefix) {
        self.stable_col.clone_from(&p.stable_col);
        self.free_rows = p.free_rows;
        self.s_cols = p.s_cols;
        self.s_syms = p.s_syms;
        self.s_count = p.s_count;
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return false;
        }
        if self.nodes & 0xFFF == 0 {
            if let Some((best, me)) = self.cancel {
                if best.load(Ordering::Relaxed) < me {
                    self.aborted = true;
                    return false;
                }
            }
        }
        true
    }

    /// Candidates of `mask` in search order.
    fn order(&mut self, mask: u64) -> ([u8; 64], usize) {
        let mut buf = [0u8; 64];
        let mut len = 0;
        for b in bits(mask) {
            buf[len] = b as u8;
            len += 1;
        }
        if let Some(rng) = self.rng.as_mut() {
            buf[..len].shuffle(rng);
        }
        (buf, len)
    }

    #[inline]
    fn row_capacity(&self, r: usize) -> u32 {
        let free_syms = self.board.alphabet & !self.s_syms;
        (self.board.cols_with_syms(r, free_syms) & !self.s_cols & self.board.full).count_ones()
    }

    fn free_rows_ok(&self) -> bool {
        bits(self.free_rows).all(|r| self.row_capacity(r) as usize >= self.mu)
    }

    fn phase1(&mut self, r: usize) -> Flow {
        let size = self.board.size;
        if r == size {
            return if self.s_count == self.t { self.leaf() } else { Flow::Continue };
        }
        if self.split_at == Some(r) {
            self.prefixes.push(Prefix {
                stable_col: self.stable_col.clone(),
                free_rows: self.free_rows,
                s_cols: self.s_cols,
                s_syms: self.s_syms,
                s_count: self.s_count,
            });
            return Flow::Continue;
        }
        let need = self.t - self.s_count;
        let remaining = size - r;
        if need > remaining {
            return Flow::Continue;
        }
        let pinned = self.pruning.translation && self.board.wrap && self.t >= 1 && r == 0;
        let stable_first = match self.rng.as_mut() {
            Some(rng) => rng.gen_range(0..remaining) < need,
            None => true,
        };
        for pass in 0..2 {
            let stable = (pass == 0) == stable_first;
            let flow = if stable { self.try_stable(r, pinned) } else { self.try_free(r, pinned, need, remaining) };
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn try_stable(&mut self, r: usize, pinned: bool) -> Flow {
        if self.s_count == self.t {
            return Flow::Continue;
        }
        let b = self.board;
        let mut cand = b.cols_with_syms(r, b.alphabet & !self.s_syms) & !self.s_cols & b.full;
        if pinned {
            cand &= 1;
        }
        let (order, len) = self.order(cand);
        for &c in &order[..len] {
            let c = c as usize;
            if !self.tick() {
                return Flow::Stop;
            }
            let e = b.sym(r, c);
            self.stable_col[r] = c;
            self.s_cols |= 1 << c;
            self.s_syms |= 1 << e;
            self.s_count += 1;
            let ok = !self.pruning.row_capacity || self.free_rows_ok();
            let flow = if ok { self.phase1(r + 1) } else { Flow::Continue };
            self.stable_col[r] = NONE;
            self.s_cols &= !(1 << c);
            self.s_syms &= !(1 << e);
            self.s_count -= 1;
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn try_free(&mut self, r: usize, pinned: bool, need: usize, remaining: usize) -> Flow {
        if pinned || remaining <= need {
            return Flow::Continue;
        }
        if self.pruning.row_capacity && (self.row_capacity(r) as usize) < self.mu {
            return Flow::Continue;
        }
        self.free_rows |= 1 << r;
        let flow = self.phase1(r + 1);
        self.free_rows &= !(1 << r);
        flow
    }

    /// Stable set complete: check capacities, then complete the transversals.
    fn leaf(&mut self) -> Flow {
        let b = self.board;
        let free_syms = b.alphabet & !self.s_syms;
        let free_cols = b.full & !self.s_cols;
        if self.pruning.leaf_capacity {
            let mu = self.mu as u32;
            if bits(self.free_rows).any(|r| (b.cols_with_syms(r, free_syms) & free_cols).count_ones() < mu) {
                return Flow::Continue;
            }
            if bits(free_cols).any(|c| (b.cols_with_syms(c, free_syms) & self.free_rows).count_ones() < mu) {
                return Flow::Continue;
            }
            let reflected = b.reflect(free_cols);
            if bits(free_syms).any(|e| (b.rows_with_symbol(e, reflected) & self.free_rows).count_ones() < mu) {
                return Flow::Continue;
            }
        }
        self.free_list.clear();
        self.free_list.extend(bits(self.free_rows));
        for a in 0..self.mu {
            self.free_cols[a] = free_cols;
            self.free_syms[a] = free_syms;
        }
        for r in bits(self.free_rows) {
            self.taken[r] = 0;
            self.base_avail[r] = b.cols_with_syms(r, free_syms) & free_cols;
        }
        self.complete(0, 0)
    }

    fn complete(&mut self, a: usize, k: usize) -> Flow {
        if k == self.free_list.len() {
            if a + 1 == self.mu {
                let mut sol = self.cols.clone();
                for row in sol.iter_mut() {
                    for (r, &c) in self.stable_col.iter().enumerate() {
                        if c != NONE {
                            row[r] = c;
                        }
                    }
                }
                self.solution = Some(sol);
                return Flow::Stop;
            }
            if self.pruning.between_capacity {
                let rest = (self.mu - a - 1) as u32;
                if self.free_list.iter().any(|&r| (self.base_avail[r] & !self.taken[r]).count_ones() < rest) {
                    return Flow::Continue;
                }
            }
            return self.complete(a + 1, 0);
        }
        let b = self.board;
        let r = self.free_list[k];
        let mut dom = self.free_cols[a] & !self.taken[r] & b.cols_with_syms(r, self.free_syms[a]);
        if k == 0 {
            if self.pruning.lex_order && a > 0 {
                dom &= !((2u64 << self.cols[a - 1][r]) - 1);
            }
            if self.pruning.translation && b.wrap && self.t == 0 && a == 0 {
                dom &= 1;
            }
        }
        let (order, len) = self.order(dom);
        for &c in &order[..len] {
            let c = c as usize;
            if !self.tick() {
                return Flow::Stop;
            }
            let e = b.sym(r, c);
            self.cols[a][r] = c;
            self.free_cols[a] &= !(1 << c);
            self.free_syms[a] &= !(1 << e);
            self.taken[r] |= 1 << c;
            let ok = !self.pruning.forward_check || self.forward_ok(a, k + 1);
            let flow = if ok { self.complete(a, k + 1) } else { Flow::Continue };
            self.cols[a][r] = NONE;
            self.free_cols[a] |= 1 << c;
            self.free_syms[a] |= 1 << e;
            self.taken[r] &= !(1 << c);
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn forward_ok(&self, a: usize, from: usize) -> bool {
        let b = self.board;
        let (fc, fs) = (self.free_cols[a], self.free_syms[a]);
        let mut union = 0;
        for &r in &self.free_list[from..] {
            let d = fc & !self.taken[r] & b.cols_with_syms(r, fs);
            if d == 0 {
                return false;
            }
            union |= d;
        }
        union == fc
    }
}

/// Outcome of one exhaustive pass, in canonical node units.
enum Raw {
    Found(Vec<Vec<usize>>, u64),
    Exhausted(u64),
    Budget,
}

fn split_depth(board: &Board, t: usize) -> usize {
    if t == 0 {
        0
    } else {
        board.size.min(3)
    }
}

fn run_exhaustive(board: &Board, mu: usize, t: usize, pruning: Pruning, limit: u64, threads: usize) -> Raw {
    let mut root = Engine::new(board, mu, t, pruning, limit);
    root.split_at = Some(split_depth(board, t));
    if root.phase1(0) == Flow::Stop {
        return match root.solution {
            Some(sol) => Raw::Found(sol, root.nodes),
            None => Raw::Budget,
        };
    }
    let prefix_nodes = root.nodes;
    let prefixes = std::mem::take(&mut root.prefixes);
    let remaining = limit.saturating_sub(prefix_nodes);

    let run_one = |i: usize, p: &Prefix, lim: u64, cancel: Option<&AtomicUsize>| {
        let mut e = Engine::new(board, mu, t, pruning, lim);
        e.cancel = cancel.map(|c| (c, i));
        e.load(p);
        e.phase1(split_depth(board, t));
        (e.solution, e.nodes, e.aborted)
    };

    let mut cum = prefix_nodes;
    if threads <= 1 {
        for (i, p) in prefixes.iter().enumerate() {
            let (sol, nodes, aborted) = run_one(i, p, limit.saturating_sub(cum), None);
            if let Some(sol) = sol {
                return Raw::Found(sol, cum + nodes);
            }
            if aborted {
                return Raw::Budget;
            }
            cum += nodes;
        }
        return Raw::Exhausted(cum);
    }

    use rayon::prelude::*;
    let best = AtomicUsize::new(usize::MAX);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let results: Vec<Option<(Option<Vec<Vec<usize>>>, u64, bool)>> = pool.install(|| {
        prefixes
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                if best.load(Ordering::Relaxed) < i {
                    return None;
                }
                let r = run_one(i, p, remaining, Some(&best));
                if r.0.is_some() {
                    best.fetch_min(i, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect()
    });
    for r in results {
        // Every task before the first solution ran to completion.
        let Some((sol, nodes, aborted)) = r else { return Raw::Budget };
        if let Some(sol) = sol {
            return if cum + nodes <= limit { Raw::Found(sol, cum + nodes) } else { Raw::Budget };
        }
        if aborted {
            return Raw::Budget;
        }
        cum += nodes;
        if cum > limit {
            return Raw::Budget;
        }
    }
    Raw::Exhausted(cum)
}

/// Restarts with a geometrically growing per-restart node allowance.
fn run_randomized(board: &Board, mu: usize, t: usize, pruning: Pruning, limit: u64, seed: u64) -> Raw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pruning = Pruning {
        translation: false,
        ..pruning
    };
    let mut used = 0u64;
    let mut allowance = 64 * board.size as u64;
    while used < limit {
        let lim = allowance.min(limit - used);
        let mut e = Engine::new(board, mu, t, pruning, lim);
        e.rng = Some(ChaCha8Rng::seed_from_u64(rng.gen()));
        e.phase1(0);
        if let Some(sol) = e.solution {
            return Raw::Found(sol, used + e.nodes);
        }
        used += e.nodes.min(lim);
        if !e.aborted {
            // The whole (randomly ordered) tree was explored.
            return Raw::Exhausted(used);
        }
        allowance = allowance.saturating_mul(3) / 2;
    }
    Raw::Budget
}

fn run(board: &Board, mu: usize, t: usize, budget: &SearchBudget, config: &SearchConfig) -> (Raw, u64) {
    let limit = budget.limit();
    let raw = match budget.mode {
        SearchMode::Exhaustive => run_exhaustive(board, mu, t, config.pruning, limit, config.threads),
        SearchMode::Randomized { seed } => run_randomized(board, mu, t, config.pruning, limit, seed),
    };
    (raw, limit)
}

fn infeasible(size: usize, mu: usize, t: usize) -> Option<InfeasibleReason> {
    let lo = (size + 1).saturating_sub(mu).max(1);
    let hi = size - 1;
    (t >= lo && t <= hi).then_some(InfeasibleReason::ForcedOverlap { lo, hi })
}

fn finish<F>(raw: Raw, limit: u64, build: impl FnOnce(Vec<Vec<usize>>) -> Result<F>, randomized: bool) -> Result<SearchReport<F>> {
    Ok(match raw {
        Raw::Found(sol, nodes) => SearchReport {
            outcome: SearchOutcome::Found(build(sol)?),
            nodes,
        },
        // A randomized pass explores the same tree, so exhausting it is a proof too.
        Raw::Exhausted(nodes) => {
            let _ = randomized;
            SearchReport {
                outcome: SearchOutcome::ExhaustedNone,
                nodes,
            }
        }
        Raw::Budget => SearchReport {
            outcome: SearchOutcome::BudgetExceeded,
            nodes: limit,
        },
    })
}

/// Searches for `mu` transversals of `B_n` intersecting stably in exactly `t` cells.
pub fn search_stable_family(
    n: usize,
    mu: usize,
    t: usize,
    budget: &SearchBudget,
    config: &SearchConfig,
) -> Result<SearchReport<StableFamily>> {
    check_order(n)?;
    if n > MAX_ORDER {
        return Err(Error::OutOfRange(format!("n = {n} exceeds the search limit {MAX_ORDER}")));
    }
    if mu < 2 {
        return Err(invalid(format!("mu = {mu} must be at least 2")));
    }
    if t > n {
        return Err(invalid(format!("t = {t} exceeds n = {n}")));
    }
    if config.shortcut_infeasible {
        if let Some(reason) = infeasible(n, mu, t) {
            return Ok(SearchReport {
                outcome: SearchOutcome::ProvenInfeasible(reason),
                nodes: 0,
            });
        }
    }
    let board = Board::latin(n);
    let (raw, limit) = run(&board, mu, t, budget, config);
    let randomized = matches!(budget.mode, SearchMode::Randomized { .. });
    finish(
        raw,
        limit,
        |sol| {
            let ts = sol
                .into_iter()
                .map(|cols| Transversal::new(n, cols))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Internal(format!("search produced an invalid transversal: {e}")))?;
            let fam = StableFamily::new(ts).map_err(|e| Error::Internal(format!("search produced an unstable family: {e}")))?;
            if fam.t() != t {
                return Err(Error::Internal(format!("search produced t = {}, asked for {t}", fam.t())));
            }
            Ok(fam)
        },
        randomized,
    )
}

/// Searches for a witness that `t` is in `Omega^b_mu(b + dbar)`.
pub fn search_omega_member(
    instance: &OmegaInstance,
    t: usize,
    budget: &SearchBudget,
    config: &SearchConfig,
) -> Result<SearchReport<PartialFamily>> {
    let inst = OmegaInstance::new(instance.b, instance.dbar, instance.mu)?;
    let size = inst.size();
    if t > size {
        return Err(invalid(format!("t = {t} exceeds the subsquare size {size}")));
    }
    if config.shortcut_infeasible {
        if let Some(reason) = infeasible(size, inst.mu, t) {
            return Ok(SearchReport {
                outcome: SearchOutcome::ProvenInfeasible(reason),
                nodes: 0,
            });
        }
    }
    let board = Board::subsquare(&inst);
    let (raw, limit) = run(&board, inst.mu, t, budget, config);
    let randomized = matches!(budget.mode, SearchMode::Randomized { .. });
    finish(
        raw,
        limit,
        |sol| {
            let fam = PartialFamily::new(inst, sol).map_err(|e| Error::Internal(format!("search produced an invalid witness: {e}")))?;
            if fam.t() != t {
                return Err(Error::Internal(format!("search produced t = {}, asked for {t}", fam.t())));
            }
            Ok(fam)
        },
        randomized,
    )
}

/// Every transversal of `B_n` in lexicographic order of the column vector.
pub fn enumerate_transversals(n: usize) -> Result<Transversals> {
    enumerate_transversals_with_limit(n, ORACLE_LIMIT)
}

pub fn enumerate_transversals_with_limit(n: usize, limit: usize) -> Result<Transversals> {
    check_order(n)?;
    if n > limit || n > MAX_ORDER {
        return Err(Error::OracleLimitExceeded { n, limit: limit.min(MAX_ORDER) });
    }
    Ok(Transversals::new(n))
}

/// Iterator over the transversals of `B_n`.
pub struct Transversals {
    board: Board,
    cols: Vec<usize>,
    /// Remaining candidates per row.
    pending: Vec<u64>,
    used_cols: u64,
    used_syms: u64,
    depth: usize,
    started: bool,
}

impl Transversals {
    fn new(n: usize) -> Self {
        let board = Board::latin(n);
        let mut it = Transversals {
            cols: vec![0; n],
            pending: vec![0; n],
            used_cols: 0,
            used_syms: 0,
            depth: 0,
            started: false,
            board,
        };
        it.pending[0] = it.board.full;
        it
    }

    fn candidates(&self, r: usize) -> u64 {
        let b = &self.board;
        b.full & !self.used_cols & b.cols_with_syms(r, b.full & !self.used_syms)
    }
}

impl Iterator for Transversals {
    type Item = Transversal;

    fn next(&mut self) -> Option<Transversal> {
        let n = self.board.size;
        if self.started {
            // Undo the last leaf.
            let r = n - 1;
            let c = self.cols[r];
            self.used_cols &= !(1 << c);
            self.used_syms &= !(1 << self.board.sym(r, c));
            self.depth = r;
        } else {
            self.started = true;
            self.pending[0] = self.candidates(0);
        }
        loop {
            let r = self.depth;
            if self.pending[r] == 0 {
                if r == 0 {
                    return None;
                }
                let pr = r - 1;
                let c = self.cols[pr];
                self.used_cols &= !(1 << c);
                self.used_syms &= !(1 << self.board.sym(pr, c));
                self.depth = pr;
                continue;
            }
            let c = self.pending[r].trailing_zeros() as usize;
            self.pending[r] &= self.pending[r] - 1;
            self.cols[r] = c;
            self.used_cols |= 1 << c;
            self.used_syms |= 1 << self.board.sym(r, c);
            if r + 1 == n {
                return Some(Transversal::from_cols_unchecked(self.cols.clone()));
            }
            self.depth = r + 1;
            self.pending[r + 1] = self.candidates(r + 1);
        }
    }
}

/// Per-`t` result of a small-order spectrum computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum SpectrumEntry {
    Found { family: StableFamily },
    None { reason: NoneReason },
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoneReason {
    Exhausted,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub mu: usize,
    pub entries: Vec<(usize, SpectrumEntry)>,
    pub nodes: u64,
}

impl SpectrumRow {
    pub fn found(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|(_, e)| matches!(e, SpectrumEntry::Found { .. }))
            .map(|&(t, _)| t)
            .collect()
    }

    pub fn unknown(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|(_, e)| matches!(e, SpectrumEntry::Unknown))
            .map(|&(t, _)| t)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.unknown().is_empty()
    }
}

/// Runs [`search_stable_family`] for every `t` in `[0, n]`.
pub fn compute_spectrum_small(n: usize, mu: usize, budget: &SearchBudget, config: &SearchConfig) -> Result<SpectrumRow> {
    check_order(n)?;
    let mut entries = Vec::with_capacity(n + 1);
    let mut nodes = 0;
    for t in 0..=n {
        let rep = search_stable_family(n, mu, t, budget, config)?;
        nodes += rep.nodes;
        let entry = match rep.outcome {
            SearchOutcome::Found(family) => SpectrumEntry::Found { family },
            SearchOutcome::ExhaustedNone => SpectrumEntry::None {
                reason: NoneReason::Exhausted,
            },
            SearchOutcome::ProvenInfeasible(_) => SpectrumEntry::None {
                reason: NoneReason::Infeasible,
            },
            SearchOutcome::BudgetExceeded => SpectrumEntry::Unknown,
        };
        entries.push((t, entry));
    }
    Ok(SpectrumRow { n, mu, entries, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_stable, is_transversal, StableCheck};

    fn exhaustive(n: usize, mu: usize, t: usize) -> SearchReport<StableFamily> {
        search_stable_family(n, mu, t, &SearchBudget::exhaustive(), &SearchConfig::default()).unwrap()
    }

    #[test]
    fn board_masks() {
        let b = Board::latin(7);
        for r in 0..7 {
            for syms in [0b1010101u64, 0b1111111, 0b0000110] {
                let cols = b.cols_with_syms(r, syms);
                for c in 0..7 {
                    assert_eq!(cols >> c & 1, syms >> ((r + c) % 7) & 1);
                }
            }
        }
        for cols in [0b1010011u64, 0b0111000] {
            let refl = b.reflect(cols);
            for e in 0..7 {
                let rows = b.rows_with_symbol(e, refl);
                for r in 0..7 {
                    let c = (e + 7 - r) % 7;
                    assert_eq!(rows >> r & 1, cols >> c & 1, "e={e} r={r}");
                }
            }
        }
        let inst = OmegaInstance::new(5, 1, 2).unwrap();
        let s = Board::subsquare(&inst);
        for r in 0..6 {
            let cols = s.cols_with_syms(r, s.alphabet);
            for c in 0..6 {
                assert_eq!(cols >> c & 1, s.alphabet >> (r + c) & 1);
            }
        }
        let cols = 0b101101u64;
        let refl = s.reflect(cols);
        for e in 0..11 {
            let rows = s.rows_with_symbol(e, refl);
            for r in 0..6 {
                let hit = e >= r && e - r < 6 && cols >> (e - r) & 1 == 1;
                assert_eq!(rows >> r & 1 == 1, hit, "e={e} r={r}");
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = [1, 3, 5, 7, 9].iter().map(|&n| enumerate_transversals(n).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 3, 15, 133, 2025]);
        assert!(matches!(enumerate_transversals(15), Err(Error::OracleLimitExceeded { .. })));
        assert!(enumerate_transversals(4).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic_and_valid() {
        let all: Vec<Transversal> = enumerate_transversals(7).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|t| is_transversal(7, t.cols()).unwrap()));
    }

    #[test]
    fn small_examples() {
        assert!(exhaustive(5, 3, 1).outcome.is_found());
        assert!(exhaustive(7, 4, 1).outcome.is_found());
        assert!(matches!(exhaustive(5, 3, 3).outcome, SearchOutcome::ProvenInfeasible(_)));
        assert_eq!(exhaustive(5, 3, 2).outcome, SearchOutcome::ExhaustedNone);
    }

    #[test]
    fn argument_errors() {
        let b = SearchBudget::exhaustive();
        let c = SearchConfig::default();
        assert!(matches!(search_stable_family(6, 3, 1, &b, &c), Err(Error::InvalidOrder(6))));
        assert!(matches!(search_stable_family(5, 3, 6, &b, &c), Err(Error::InvalidInput(_))));
        assert!(matches!(search_stable_family(5, 1, 0, &b, &c), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn found_families_verify() {
        for n in [3, 5, 7, 9] {
            for mu in 2..=4 {
                for t in 0..=n {
                    if let SearchOutcome::Found(f) = exhaustive(n, mu, t).outcome {
                        assert_eq!(f.mu(), mu);
                        assert!(matches!(check_stable(f.transversals()).unwrap(), StableCheck::Stable { t: tt, .. } if tt == t));
                    }
                }
            }
        }
    }

    #[test]
    fn budget_is_respected() {
        let rep = search_stable_family(9, 3, 5, &SearchBudget::exhaustive_limited(10), &SearchConfig::default()).unwrap();
        assert_eq!(rep.outcome, SearchOutcome::BudgetExceeded);
        assert_eq!(rep.nodes, 10);
    }

    #[test]
    fn node_counts_do_not_depend_on_threads() {
        for (n, mu, t) in [(9, 3, 5), (9, 4, 3), (11, 3, 8), (7, 3, 0)] {
            let one = exhaustive(n, mu, t);
            for threads in [2, 4] {
                let cfg = SearchConfig {
                    threads,
                    ..SearchConfig::default()
                };
                let many = search_stable_family(n, mu, t, &SearchBudget::exhaustive(), &cfg).unwrap();
                assert_eq!(one, many, "n={n} mu={mu} t={t} threads={threads}");
            }
        }
    }

    #[test]
    fn limited_budget_agrees_across_threads() {
        for limit in [50, 500, 5000] {
            let b = SearchBudget::exhaustive_limited(limit);
            let one = search_stable_family(11, 3, 8, &b, &SearchConfig::default()).unwrap();
            let cfg = SearchConfig {
                threads: 3,
                ..SearchConfig::default()
            };
            let many = search_stable_family(11, 3, 8, &b, &cfg).unwrap();
            assert_eq!(one, many, "limit={limit}");
        }
    }

    #[test]
    fn randomized_is_reproducible() {
        let b = SearchBudget::randomized(7, 1_000_000);
        let c = SearchConfig::default();
        let a1 = search_stable_family(15, 3, 4, &b, &c).unwrap();
        let a2 = search_stable_family(15, 3, 4, &b, &c).unwrap();
        assert!(a1.outcome.is_found());
        assert_eq!(a1, a2);
    }

    #[test]
    fn omega_examples() {
        let b = SearchBudget::exhaustive();
        let c = SearchConfig::default();
        let nine = OmegaInstance::new(9, 0, 4).unwrap();
        let w = search_omega_member(&nine, 1, &b, &c).unwrap();
        assert_eq!(w.outcome.found().unwrap().t(), 1);
        let w = search_omega_member(&nine, 9, &b, &c).unwrap();
        assert_eq!(w.outcome.found().unwrap().t(), 9);
        let eleven = OmegaInstance::new(11, 0, 3).unwrap();
        let w = search_omega_member(&eleven, 5, &b, &c).unwrap();
        assert_eq!(w.outcome.found().unwrap().t(), 5);
        assert!(matches!(
            search_omega_member(&nine, 7, &b, &c).unwrap().outcome,
            SearchOutcome::ProvenInfeasible(_)
        ));
        assert!(search_omega_member(&nine, 10, &b, &c).is_err());
    }
}
