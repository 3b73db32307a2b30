//! Closed-form families and the subsquare composition.
//!
//! The composition splits the rows and columns of `B_n`, `n = 2bI + b + 2d`,
//! into one large `(b+d)`-square at the origin, `2I` base `b`-squares and one
//! small `d`-square on the diagonal. Partial transversals of each block are
//! glued into full transversals; the symbol alphabets of the blocks are
//! pairwise disjoint and together cover `Z_n`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{check_order, StableFamily, SubsquareSpec, Transversal};
use crate::partial::{OmegaInstance, PartialFamily};
use crate::setalg::{nonexistence_range, IntervalSet};

/// `mu` copies of the main diagonal: stable in all `n` cells.
pub fn identical_family(n: usize, mu: usize) -> Result<StableFamily> {
    check_order(n)?;
    if mu < 2 {
        return Err(invalid(format!("mu = {mu} must be at least 2")));
    }
    let diag = Transversal::diagonal(n)?;
    StableFamily::new(vec![diag; mu])
}

/// The diagonals `(i, i + alpha)`, `alpha < mu`: pairwise disjoint.
pub fn shifted_family(n: usize, mu: usize) -> Result<StableFamily> {
    check_order(n)?;
    if mu < 2 || mu > n {
        return Err(invalid(format!("shifted family needs 2 <= mu <= n, got mu = {mu}, n = {n}")));
    }
    let ts = (0..mu).map(|a| Transversal::shifted(n, a)).collect::<Result<Vec<_>>>()?;
    StableFamily::new(ts)
}

/// For `n = m1 * m2`: `m2` transversals agreeing off the rows divisible by
/// `m1` and moving by multiples of `m1` on them; stable in `n - m2` cells.
pub fn factor_family(n: usize, m1: usize, m2: usize) -> Result<StableFamily> {
    check_order(n)?;
    if m1 < 2 || m2 < 2 || m1 * m2 != n {
        return Err(invalid(format!("need n = m1 * m2 with m1, m2 > 1; got {n} vs {m1} * {m2}")));
    }
    let ts = (1..=m2)
        .map(|alpha| {
            let cols = (0..n)
                .map(|r| if r % m1 == 0 { (r + m1 * alpha) % n } else { r })
                .collect();
            Transversal::new(n, cols)
        })
        .collect::<Result<Vec<_>>>()?;
    let fam = StableFamily::new(ts)?;
    if fam.t() != n - m2 {
        return Err(Error::Internal(format!("factor family has t = {}, expected {}", fam.t(), n - m2)));
    }
    Ok(fam)
}

/// Stable sizes no family of `mu` transversals can have: `[n - mu + 1, n - 1]`.
pub fn infeasible_range(n: usize, mu: usize) -> IntervalSet {
    nonexistence_range(n, mu)
}

/// `n = 2bI + b + 2d` with `I >= 1` and `0 <= d < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub n: usize,
    pub b: usize,
    #[serde(rename = "I")]
    pub big_i: usize,
    pub d: usize,
}

pub fn decompose(n: usize, b: usize) -> Result<Decomposition> {
    check_order(n)?;
    if b < 3 || b % 2 == 0 {
        return Err(invalid(format!("base size b = {b} must be odd and at least 3")));
    }
    if 3 * b > n {
        return Err(Error::OutOfRange(format!("b = {b} exceeds n/3 for n = {n}")));
    }
    let rest = n - b;
    let big_i = rest / (2 * b);
    let d = (rest % (2 * b)) / 2;
    debug_assert!(big_i >= 1 && d < b && 2 * b * big_i + b + 2 * d == n);
    Ok(Decomposition { n, b, big_i, d })
}

/// Which block of the layout a subsquare is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Large,
    /// Base block `i` in `1..=2I`.
    Base(usize),
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub square: SubsquareSpec,
    /// Added to rows and columns of the witness (symbols move by twice this).
    pub offset: usize,
}

impl Decomposition {
    /// Base block `i` (1-based) sits at `bi + d` for `i <= I` and at
    /// `bi + 2d` above that; the small block sits at `b(I+1) + d`.
    pub fn base_offset(&self, i: usize) -> usize {
        if i <= self.big_i {
            self.b * i + self.d
        } else {
            self.b * i + 2 * self.d
        }
    }

    pub fn small_offset(&self) -> usize {
        self.b * (self.big_i + 1) + self.d
    }

    /// The blocks in row order.
    pub fn blocks(&self) -> Vec<Block> {
        let sq = |origin, size| SubsquareSpec { n: self.n, origin, size };
        let mut out = vec![Block {
            kind: BlockKind::Large,
            square: sq(0, self.b + self.d),
            offset: 0,
        }];
        for i in 1..=2 * self.big_i {
            if i == self.big_i + 1 {
                out.push(Block {
                    kind: BlockKind::Small,
                    square: sq(self.small_offset(), self.d),
                    offset: self.small_offset(),
                });
            }
            out.push(Block {
                kind: BlockKind::Base(i),
                square: sq(self.base_offset(i), self.b),
                offset: self.base_offset(i),
            });
        }
        out
    }
}

/// Glues partial-transversal witnesses into `mu` transversals of `B_n`
/// intersecting stably in `d + large.t + sum(bases[i].t)` cells.
pub fn compose(
    decomp: &Decomposition,
    mu: usize,
    large: &PartialFamily,
    bases: &[PartialFamily],
) -> Result<StableFamily> {
    let Decomposition { n, b, big_i, d } = *decomp;
    if decompose(n, b)? != *decomp {
        return Err(invalid(format!("{decomp:?} is not the decomposition of n = {n} with b = {b}")));
    }
    if large.instance() != OmegaInstance::new(b, d, mu)? {
        return Err(invalid(format!(
            "large witness is for {}, expected Omega^{b}_{mu}({})",
            large.instance(),
            b + d
        )));
    }
    if bases.len() != 2 * big_i {
        return Err(invalid(format!("need {} base witnesses, got {}", 2 * big_i, bases.len())));
    }
    let base_inst = OmegaInstance::new(b, 0, mu)?;
    if let Some(bad) = bases.iter().find(|w| w.instance() != base_inst) {
        return Err(invalid(format!("base witness is for {}, expected {base_inst}", bad.instance())));
    }

    let mut cols = vec![vec![usize::MAX; n]; mu];
    let mut place = |offset: usize, witness: &PartialFamily| {
        for (beta, partial) in witness.partials().iter().enumerate() {
            for (r, &c) in partial.iter().enumerate() {
                cols[beta][r + offset] = c + offset;
            }
        }
    };
    place(0, large);
    for (k, w) in bases.iter().enumerate() {
        place(decomp.base_offset(k + 1), w);
    }
    for cols in cols.iter_mut() {
        for k in 0..d {
            let r = decomp.small_offset() + k;
            cols[r] = r;
        }
    }

    let expected = d + large.t() + bases.iter().map(PartialFamily::t).sum::<usize>();
    let transversals = cols
        .into_iter()
        .map(|c| Transversal::new(n, c))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Internal(format!("composition produced a non-transversal: {e}")))?;
    let family = StableFamily::new(transversals)
        .map_err(|e| Error::Internal(format!("composition is not stable: {e}")))?;
    if family.t() != expected {
        return Err(Error::Internal(format!(
            "composition is stable in {} cells, expected {expected}",
            family.t()
        )));
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_stable, StableCheck};
    use std::collections::BTreeSet;

    #[test]
    fn trivial_families() {
        assert_eq!(identical_family(5, 3).unwrap().t(), 5);
        assert_eq!(identical_family(7, 4).unwrap().t(), 7);
        let f = identical_family(9, 2).unwrap();
        for t in f.transversals() {
            assert_eq!(t.cols(), (0..9).collect::<Vec<_>>());
        }
        assert_eq!(identical_family(4, 2), Err(Error::InvalidOrder(4)));

        assert_eq!(shifted_family(5, 3).unwrap().t(), 0);
        assert_eq!(shifted_family(7, 7).unwrap().t(), 0);
        assert!(matches!(shifted_family(9, 10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn factor_examples() {
        let f = factor_family(9, 3, 3).unwrap();
        assert_eq!((f.mu(), f.t()), (3, 6));
        let f = factor_family(15, 3, 5).unwrap();
        assert_eq!((f.mu(), f.t()), (5, 10));
        let f = factor_family(15, 5, 3).unwrap();
        assert_eq!((f.mu(), f.t()), (3, 12));
        assert!(factor_family(15, 3, 3).is_err());
    }

    #[test]
    fn factor_sizes_for_all_small_odd_orders() {
        for n in (3..=45).step_by(2) {
            for m1 in 2..n {
                if n % m1 == 0 && n / m1 > 1 {
                    let m2 = n / m1;
                    let f = factor_family(n, m1, m2).unwrap();
                    assert_eq!(f.t(), n - m2, "n={n} m1={m1}");
                }
            }
        }
    }

    #[test]
    fn infeasible_examples() {
        assert_eq!(infeasible_range(5, 3), IntervalSet::interval(3, 4));
        assert_eq!(infeasible_range(7, 2), IntervalSet::interval(6, 6));
        assert_eq!(infeasible_range(9, 9), IntervalSet::interval(1, 8));
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(17, 5).unwrap();
        assert_eq!((d.big_i, d.d), (1, 1));
        let d = decompose(33, 11).unwrap();
        assert_eq!((d.big_i, d.d), (1, 0));
        let d = decompose(51, 9).unwrap();
        assert_eq!((d.big_i, d.d), (2, 3));
        assert!(matches!(decompose(25, 9), Err(Error::OutOfRange(_))));
        assert!(decompose(33, 4).is_err());
    }

    #[test]
    fn layout_partitions_rows_and_symbols() {
        for n in (9..=121).step_by(2) {
            for b in (3..=n / 3).step_by(2) {
                let dec = decompose(n, b).unwrap();
                if b + dec.d > crate::partial::MAX_SUBSQUARE {
                    continue;
                }
                let blocks = dec.blocks();
                let mut rows = vec![0usize; n];
                let mut next = 0;
                for blk in &blocks {
                    // Blocks are contiguous and appear in row order.
                    assert_eq!(blk.square.origin, next, "n={n} b={b} {:?}", blk.kind);
                    next += blk.square.size;
                    for r in blk.square.indices() {
                        rows[r] += 1;
                    }
                }
                assert!(rows.iter().all(|&c| c == 1), "n={n} b={b}");
                // Symbol alphabets of all blocks partition Z_n.
                let mut syms = vec![0usize; n];
                for blk in &blocks {
                    let alphabet: Vec<usize> = match blk.kind {
                        BlockKind::Large => OmegaInstance::new(b, dec.d, 2).unwrap().alphabet(),
                        BlockKind::Base(_) => OmegaInstance::new(b, 0, 2)
                            .unwrap()
                            .alphabet()
                            .into_iter()
                            .map(|e| e + 2 * blk.offset)
                            .collect(),
                        BlockKind::Small => (0..dec.d).map(|k| 2 * (blk.offset + k)).collect(),
                    };
                    for e in alphabet {
                        syms[e % n] += 1;
                    }
                }
                assert!(syms.iter().all(|&c| c == 1), "n={n} b={b}: {syms:?}");
            }
        }
    }

    /// The printed 17 x 17 composition: columns of the two transversals.
    const EXAMPLE_UNDERLINED: [usize; 17] = [4, 2, 0, 5, 3, 1, 10, 8, 6, 9, 7, 11, 16, 14, 12, 15, 13];
    const EXAMPLE_STARRED: [usize; 17] = [3, 5, 0, 1, 4, 2, 9, 10, 6, 7, 8, 11, 15, 13, 16, 14, 12];

    fn example_witnesses() -> (PartialFamily, Vec<PartialFamily>) {
        let large = PartialFamily::new(
            OmegaInstance::new(5, 1, 2).unwrap(),
            vec![vec![4, 2, 0, 5, 3, 1], vec![3, 5, 0, 1, 4, 2]],
        )
        .unwrap();
        let base = OmegaInstance::new(5, 0, 2).unwrap();
        let b1 = PartialFamily::new(base, vec![vec![4, 2, 0, 3, 1], vec![3, 4, 0, 1, 2]]).unwrap();
        let b2 = PartialFamily::new(base, vec![vec![4, 2, 0, 3, 1], vec![3, 1, 4, 2, 0]]).unwrap();
        (large, vec![b1, b2])
    }

    #[test]
    fn worked_example_composition() {
        let (large, bases) = example_witnesses();
        assert_eq!((large.t(), bases[0].t(), bases[1].t()), (1, 1, 0));
        let dec = decompose(17, 5).unwrap();
        let fam = compose(&dec, 2, &large, &bases).unwrap();
        assert_eq!(fam.t(), 3);
        let got: BTreeSet<Vec<usize>> = fam.transversals().iter().map(|t| t.cols().to_vec()).collect();
        let want: BTreeSet<Vec<usize>> = [EXAMPLE_UNDERLINED.to_vec(), EXAMPLE_STARRED.to_vec()].into();
        assert_eq!(got, want);
        let stable: Vec<(usize, usize)> = fam.stable_set().iter().map(|c| (c.row, c.col)).collect();
        assert_eq!(stable, vec![(2, 0), (8, 6), (11, 11)]);
        // Row 8, column 6 holds 14 in the printed array.
        assert_eq!(crate::model::symbol_of(17, crate::model::Cell::new(8, 6)).unwrap(), 14);
    }

    #[test]
    fn compose_rejects_mismatched_witnesses() {
        let (large, bases) = example_witnesses();
        let dec = decompose(17, 5).unwrap();
        assert!(compose(&dec, 2, &large, &bases[..1]).is_err());
        assert!(compose(&dec, 2, &bases[0], &bases).is_err());
        let mut wrong = dec;
        wrong.d = 2;
        assert!(compose(&wrong, 2, &large, &bases).is_err());
    }

    #[test]
    fn compose_zero_extension() {
        // d = 0: no small block.
        let dec = decompose(15, 5).unwrap();
        assert_eq!((dec.big_i, dec.d), (1, 0));
        assert!(dec.blocks().iter().all(|b| b.kind != BlockKind::Small || b.square.size == 0));
        let base = OmegaInstance::new(5, 0, 2).unwrap();
        let w = PartialFamily::new(base, vec![vec![4, 2, 0, 3, 1], vec![3, 1, 4, 2, 0]]).unwrap();
        let fam = compose(&dec, 2, &w, &[w.clone(), w.clone()]).unwrap();
        assert_eq!(fam.t(), 0);
        assert!(matches!(check_stable(fam.transversals()).unwrap(), StableCheck::Stable { t: 0, .. }));
    }
}
