use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::partial::{OmegaInstance, PartialFamily};

use super::format::{decode_block, parse_reduced_form, ReducedFormBlock};

const SHIPPED: &str = include_str!("../../data/appendix.txt");

/// Where a witness came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessSource {
    /// The block itself, or its first `mu` partials.
    Block { index: usize, line: usize },
    /// One partial of the block repeated `mu` times.
    RepeatedRow { index: usize, line: usize },
}

impl std::fmt::Display for WitnessSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WitnessSource::Block { line, .. } => write!(f, "block at line {line}"),
            WitnessSource::RepeatedRow { line, .. } => write!(f, "first row of the block at line {line}, repeated"),
        }
    }
}

/// Parsed and verified reduced-form blocks.
#[derive(Debug, Clone)]
pub struct Dataset {
    blocks: Vec<ReducedFormBlock>,
    families: Vec<PartialFamily>,
}

impl Dataset {
    /// The bundled base-block data.
    pub fn shipped() -> Result<Self> {
        Self::from_text(SHIPPED)
    }

    pub fn shipped_text() -> &'static str {
        SHIPPED
    }

    /// Every block must decode; the first failure is returned.
    pub fn from_text(text: &str) -> Result<Self> {
        let blocks = parse_reduced_form(text)?;
        let families = blocks.iter().map(decode_block).collect::<Result<Vec<_>>>()?;
        Ok(Dataset { blocks, families })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn blocks(&self) -> &[ReducedFormBlock] {
        &self.blocks
    }

    pub fn families(&self) -> &[PartialFamily] {
        &self.families
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Appends the blocks of `other`; lookups prefer earlier blocks.
    pub fn extend(&mut self, other: Dataset) {
        self.blocks.extend(other.blocks);
        self.families.extend(other.families);
    }

    /// A verified witness for `t in Omega^b_mu(b + d)`.
    ///
    /// `t = b + d` is served by any single partial at that size (a block
    /// listed with that `t` first); smaller `t` need a block with that exact
    /// `t` and at least `mu` partials.
    pub fn witness(&self, b: usize, d: usize, mu: usize, t: usize) -> Option<(PartialFamily, WitnessSource)> {
        let instance = OmegaInstance::new(b, d, mu).ok()?;
        let same_size = |i: &usize| self.blocks[*i].b == b && self.blocks[*i].d == d;
        let mut indices = (0..self.blocks.len()).filter(same_size);
        if t == b + d {
            let i = (0..self.blocks.len())
                .filter(same_size)
                .find(|&i| self.blocks[i].t == t)
                .or_else(|| indices.next())?;
            let row = self.families[i].partials()[0].clone();
            let fam = PartialFamily::repeated(instance, row).ok()?;
            return Some((fam, WitnessSource::RepeatedRow { index: i, line: self.blocks[i].line }));
        }
        indices.find(|&i| self.blocks[i].t == t && self.blocks[i].mu >= mu).and_then(|i| {
            let fam = &self.families[i];
            let fam = if fam.mu() == mu { fam.clone() } else { fam.restrict(mu).ok()? };
            Some((fam, WitnessSource::Block { index: i, line: self.blocks[i].line }))
        })
    }

    /// All `t` for which [`Dataset::witness`] succeeds.
    pub fn available_t(&self, b: usize, d: usize, mu: usize) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = self
            .blocks
            .iter()
            .filter(|blk| blk.b == b && blk.d == d && (blk.mu >= mu || blk.t == b + d))
            .map(|blk| blk.t)
            .collect();
        if self.blocks.iter().any(|blk| blk.b == b && blk.d == d) && mu >= 2 {
            out.insert(b + d);
        }
        out
    }

    /// Base sizes present in the data.
    pub fn base_sizes(&self) -> BTreeSet<usize> {
        self.blocks.iter().map(|blk| blk.b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_blocks_decode() {
        let ds = Dataset::shipped().unwrap();
        assert_eq!(ds.len(), 48);
        for (blk, fam) in ds.blocks().iter().zip(ds.families()) {
            assert_eq!(fam.t(), blk.t, "line {}", blk.line);
            let inst = OmegaInstance::new(blk.b, blk.d, blk.mu).unwrap();
            assert_eq!(fam.symbols(), inst.alphabet(), "line {}", blk.line);
        }
    }

    #[test]
    fn coverage() {
        let ds = Dataset::shipped().unwrap();
        let has = |b, d, mu, t| ds.blocks().iter().any(|x| (x.b, x.d, x.mu, x.t) == (b, d, mu, t));
        assert!(has(9, 0, 4, 0) && has(9, 0, 4, 1));
        assert!((1..=8).all(|d| has(9, d, 4, 0)));
        assert!(has(9, 0, 3, 2) && has(9, 0, 3, 3));
        assert!((0..=3).all(|t| has(11, 0, 4, t)));
        assert!((1..=10).all(|d| has(11, d, 4, 3)));
        assert!(has(11, 0, 3, 4) && has(11, 0, 3, 5));
        assert!((1..=5).all(|t| has(15, 0, 4, t)));
        assert!((0..=14).all(|d| has(15, d, 4, 15 + d)));
    }

    #[test]
    fn witness_lookup() {
        let ds = Dataset::shipped().unwrap();
        let (w, src) = ds.witness(9, 0, 3, 1).unwrap();
        assert_eq!((w.mu(), w.t()), (3, 1));
        assert!(matches!(src, WitnessSource::Block { line: 7, .. }));
        let (w, src) = ds.witness(11, 4, 4, 15).unwrap();
        assert_eq!(w.t(), 15);
        assert!(matches!(src, WitnessSource::RepeatedRow { .. }));
        assert!(ds.witness(9, 0, 4, 2).is_none());
        assert!(ds.witness(9, 0, 3, 2).is_some());
        assert_eq!(ds.available_t(9, 0, 4), BTreeSet::from([0, 1, 9]));
        assert_eq!(ds.available_t(9, 0, 3), BTreeSet::from([0, 1, 2, 3, 9]));
        assert_eq!(ds.available_t(11, 0, 3), BTreeSet::from([0, 1, 2, 3, 4, 5, 11]));
        assert_eq!(ds.available_t(15, 0, 4), BTreeSet::from([1, 2, 3, 4, 5, 15]));
        assert_eq!(ds.available_t(15, 3, 4), BTreeSet::from([18]));
    }
}
