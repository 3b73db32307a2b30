//! Partial transversals of the corner subsquare `B_{0, b + dbar}` over a
//! restricted symbol alphabet.

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::model::Cell;

/// Largest subsquare the bitmask engine handles (symbols up to `2 * size - 2`).
pub const MAX_SUBSQUARE: usize = 32;

/// Membership question `t in Omega^b_mu(b + dbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OmegaInstance {
    pub b: usize,
    pub dbar: usize,
    pub mu: usize,
}

impl OmegaInstance {
    pub fn new(b: usize, dbar: usize, mu: usize) -> Result<Self> {
        if b < 3 || b % 2 == 0 {
            return Err(invalid(format!("base size b = {b} must be odd and at least 3")));
        }
        if mu < 2 {
            return Err(invalid(format!("mu = {mu} must be at least 2")));
        }
        if b + dbar > MAX_SUBSQUARE {
            return Err(invalid(format!(
                "subsquare size {} exceeds {MAX_SUBSQUARE}",
                b + dbar
            )));
        }
        Ok(OmegaInstance { b, dbar, mu })
    }

    pub fn size(&self) -> usize {
        self.b + self.dbar
    }

    /// `{(b-1)/2, ..., 3(b-1)/2 + 2 dbar} \ {b + 2j : j < dbar}`, ascending.
    pub fn alphabet(&self) -> Vec<usize> {
        let lo = (self.b - 1) / 2;
        let hi = 3 * (self.b - 1) / 2 + 2 * self.dbar;
        (lo..=hi)
            .filter(|&e| !(e >= self.b && e < self.b + 2 * self.dbar && (e - self.b) % 2 == 0))
            .collect()
    }

    pub fn alphabet_mask(&self) -> u64 {
        self.alphabet().iter().fold(0, |m, &e| m | (1u64 << e))
    }
}

impl fmt::Display for OmegaInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Omega^{}_{}({})", self.b, self.mu, self.size())
    }
}

/// `mu` partial transversals of `B_{0, size}` (column per row), each using
/// every alphabet symbol once, intersecting stably.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PartialFamily {
    instance: OmegaInstance,
    partials: Vec<Vec<usize>>,
    stable_cells: Vec<Cell>,
}

impl PartialFamily {
    pub fn new(instance: OmegaInstance, partials: Vec<Vec<usize>>) -> Result<Self> {
        if partials.len() != instance.mu {
            return Err(invalid(format!(
                "{instance} needs {} partial transversals, got {}",
                instance.mu,
                partials.len()
            )));
        }
        let size = instance.size();
        let alphabet = instance.alphabet_mask();
        for (k, p) in partials.iter().enumerate() {
            if p.len() != size {
                return Err(invalid(format!(
                    "partial {k} has {} cells, expected {size}",
                    p.len()
                )));
            }
            let (mut cols, mut syms) = (0u64, 0u64);
            for (r, &c) in p.iter().enumerate() {
                if c >= size {
                    return Err(invalid(format!("partial {k}, row {r}: column {c} outside the subsquare")));
                }
                if cols & (1 << c) != 0 {
                    return Err(invalid(format!("partial {k}: column {c} used twice")));
                }
                let e = r + c;
                if alphabet & (1 << e) == 0 {
                    return Err(invalid(format!(
                        "partial {k}, row {r}: symbol {e} is outside the alphabet of {instance}"
                    )));
                }
                if syms & (1 << e) != 0 {
                    return Err(invalid(format!("partial {k}: symbol {e} used twice")));
                }
                cols |= 1 << c;
                syms |= 1 << e;
            }
        }
        let common: Vec<bool> = (0..size)
            .map(|r| partials.iter().all(|p| p[r] == partials[0][r]))
            .collect();
        for a in 0..partials.len() {
            for b in a + 1..partials.len() {
                if let Some(r) = (0..size).find(|&r| !common[r] && partials[a][r] == partials[b][r]) {
                    return Err(invalid(format!(
                        "partials {a} and {b} share the non-stable cell ({r},{})",
                        partials[a][r]
                    )));
                }
            }
        }
        let stable_cells = (0..size)
            .filter(|&r| common[r])
            .map(|r| Cell::new(r, partials[0][r]))
            .collect();
        Ok(PartialFamily {
            instance,
            partials,
            stable_cells,
        })
    }

    pub fn instance(&self) -> OmegaInstance {
        self.instance
    }

    pub fn mu(&self) -> usize {
        self.partials.len()
    }

    pub fn t(&self) -> usize {
        self.stable_cells.len()
    }

    pub fn partials(&self) -> &[Vec<usize>] {
        &self.partials
    }

    pub fn stable_cells(&self) -> &[Cell] {
        &self.stable_cells
    }

    /// Symbols used by each partial (the same set for all of them).
    pub fn symbols(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.partials[0].iter().enumerate().map(|(r, &c)| r + c).collect();
        s.sort_unstable();
        s
    }

    /// Keeps the first `mu` partials; the stable set survives since every
    /// pairwise intersection already equals it.
    pub fn restrict(&self, mu: usize) -> Result<Self> {
        if mu < 2 || mu > self.mu() {
            return Err(invalid(format!("cannot restrict {} partials to {mu}", self.mu())));
        }
        let instance = OmegaInstance { mu, ..self.instance };
        let restricted = PartialFamily::new(instance, self.partials[..mu].to_vec())?;
        debug_assert_eq!(restricted.t(), self.t());
        Ok(restricted)
    }

    /// One partial repeated `mu` times: stable in every cell.
    pub fn repeated(instance: OmegaInstance, partial: Vec<usize>) -> Result<Self> {
        PartialFamily::new(instance, vec![partial; instance.mu])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabets() {
        let nine = OmegaInstance::new(9, 0, 4).unwrap();
        assert_eq!(nine.alphabet(), (4..=12).collect::<Vec<_>>());
        let five = OmegaInstance::new(5, 1, 2).unwrap();
        assert_eq!(five.alphabet(), vec![2, 3, 4, 6, 7, 8]);
        for b in [3, 5, 9, 11, 15] {
            for dbar in 0..b.min(MAX_SUBSQUARE - b + 1) {
                let inst = OmegaInstance::new(b, dbar, 3).unwrap();
                assert_eq!(inst.alphabet().len(), inst.size(), "b={b} dbar={dbar}");
            }
        }
        assert!(OmegaInstance::new(8, 0, 3).is_err());
        assert!(OmegaInstance::new(9, 0, 1).is_err());
    }

    #[test]
    fn large_example_witness() {
        // The (b, d) = (5, 1) pair of partial transversals meeting in one cell.
        let inst = OmegaInstance::new(5, 1, 2).unwrap();
        let fam = PartialFamily::new(inst, vec![vec![4, 2, 0, 5, 3, 1], vec![3, 5, 0, 1, 4, 2]]).unwrap();
        assert_eq!(fam.t(), 1);
        assert_eq!(fam.stable_cells(), &[Cell::new(2, 0)]);
        assert_eq!(fam.symbols(), vec![2, 3, 4, 6, 7, 8]);
    }

    #[test]
    fn rejects_violations() {
        let inst = OmegaInstance::new(5, 0, 2).unwrap();
        assert!(PartialFamily::new(inst, vec![vec![4, 2, 0, 3, 1]]).is_err());
        // Symbol 1 = 0 + 1 is outside {2..6}.
        assert!(PartialFamily::new(inst, vec![vec![1, 2, 0, 3, 4], vec![4, 2, 0, 3, 1]]).is_err());
        // Shares (1,2) but not (0,4).
        assert!(PartialFamily::new(inst, vec![vec![4, 2, 0, 3, 1], vec![3, 2, 4, 1, 0]]).is_err());
        let ok = PartialFamily::new(inst, vec![vec![4, 2, 0, 3, 1], vec![3, 1, 4, 2, 0]]).unwrap();
        assert_eq!(ok.t(), 0);
        assert!(ok.restrict(3).is_err());
    }
}
