//! Membership claims the composition relies on, each checked against a
//! decoded and re-verified witness from a dataset.

use serde::Serialize;

use crate::partial::OmegaInstance;

use super::dataset::Dataset;

/// Which family of claims an item belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimGroup {
    /// Values of `Omega^b_mu(b)` for the base squares.
    BaseValues,
    /// Small stable sizes in the large square `b + d`.
    LargeLow,
    /// Full stable size `b + d` in the large square.
    LargeFull,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub group: ClaimGroup,
    pub b: usize,
    pub d: usize,
    pub mu: usize,
    pub t: usize,
    pub verified: bool,
    /// Witness location or the reason the claim failed.
    pub detail: String,
}

impl Claim {
    pub fn statement(&self) -> String {
        let inst = OmegaInstance { b: self.b, dbar: self.d, mu: self.mu };
        format!("{} in {inst}", self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub blocks: usize,
    pub claims: Vec<Claim>,
}

impl ClaimReport {
    pub fn is_ok(&self) -> bool {
        self.claims.iter().all(|c| c.verified)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.verified)
    }
}

/// `(mu, b, values)` for the base squares.
pub const BASE_CLAIMS: [(usize, usize, &[usize]); 5] = [
    (4, 9, &[0, 1, 9]),
    (4, 11, &[0, 1, 2, 3, 11]),
    (4, 15, &[1, 2, 3, 4, 5, 15]),
    (3, 9, &[0, 1, 2, 3, 9]),
    (3, 11, &[0, 1, 2, 3, 4, 5, 11]),
];

/// Every claim as `(group, b, d, mu, t)`.
pub fn claim_list() -> Vec<(ClaimGroup, usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for (mu, b, values) in BASE_CLAIMS {
        for &t in values {
            out.push((ClaimGroup::BaseValues, b, 0, mu, t));
        }
    }
    out.extend((0..9).map(|d| (ClaimGroup::LargeLow, 9, d, 4, 0)));
    out.extend((0..11).map(|d| (ClaimGroup::LargeLow, 11, d, 4, 3)));
    out.extend((0..11).map(|d| (ClaimGroup::LargeFull, 11, d, 4, 11 + d)));
    out.extend((0..15).map(|d| (ClaimGroup::LargeFull, 15, d, 4, 15 + d)));
    out
}

/// Looks up and re-verifies a witness for every claim.
pub fn verify_appendix(dataset: &Dataset) -> ClaimReport {
    let claims = claim_list()
        .into_iter()
        .map(|(group, b, d, mu, t)| {
            let (verified, detail) = match dataset.witness(b, d, mu, t) {
                Some((fam, src)) if fam.t() == t && fam.mu() == mu && fam.instance() == (OmegaInstance { b, dbar: d, mu }) => {
                    (true, src.to_string())
                }
                Some((fam, src)) => (false, format!("{src} gives {} with t = {}", fam.instance(), fam.t())),
                None => (false, "no block provides a witness".to_string()),
            };
            Claim { group, b, d, mu, t, verified, detail }
        })
        .collect();
    ClaimReport {
        blocks: dataset.len(),
        claims,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_data_verifies_every_claim() {
        let report = verify_appendix(&Dataset::shipped().unwrap());
        let failed: Vec<String> = report.failures().map(|c| c.statement()).collect();
        assert!(report.is_ok(), "{failed:?}");
        assert_eq!(report.claims.len(), 26 + 9 + 11 + 11 + 15);
    }

    #[test]
    fn missing_block_is_reported() {
        let text = Dataset::shipped_text();
        let cut = text.find("b=11 d=10 mu=4 t=3").unwrap();
        let end = text[cut..].find("\n\n").map_or(text.len(), |e| cut + e + 2);
        let ds = Dataset::from_text(&format!("{}{}", &text[..cut], &text[end..])).unwrap();
        let report = verify_appendix(&ds);
        let failed: Vec<String> = report.failures().map(|c| c.statement()).collect();
        // The d = 10 block also supplies the only size-21 row for the full claim.
        assert_eq!(failed, vec!["3 in Omega^11_4(21)", "21 in Omega^11_4(21)"]);
    }
}
