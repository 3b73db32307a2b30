//! Chooses a construction for a target `(n, mu, t)`: a closed-form family
//! when one applies, otherwise a composition whose block witnesses come
//! from a dataset.

use std::fmt;

use serde::Serialize;

use crate::construct::{compose, decompose, factor_family, identical_family, shifted_family, Decomposition};
use crate::error::{invalid, Error, Result};
use crate::model::{check_order, StableFamily};
use crate::partial::MAX_SUBSQUARE;

use super::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for BaseChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(BaseChoice::Auto);
        }
        let b: usize = s.parse().map_err(|_| invalid(format!("base size must be an odd integer or `auto`, got {s:?}")))?;
        if b < 3 || b % 2 == 0 {
            return Err(invalid(format!("base size b = {b} must be odd and at least 3")));
        }
        Ok(BaseChoice::Fixed(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Identical,
    Shifted,
    Factorization {
        m1: usize,
        m2: usize,
    },
    Composition {
        b: usize,
        #[serde(rename = "I")]
        big_i: usize,
        d: usize,
        large_t: usize,
        base_t: Vec<usize>,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Identical => f.write_str("identical"),
            Provenance::Shifted => f.write_str("shifted"),
            Provenance::Factorization { m1, m2 } => write!(f, "factorization (m1={m1}, m2={m2})"),
            Provenance::Composition { b, big_i, d, large_t, base_t } => {
                let bases: Vec<String> = base_t.iter().map(|t| t.to_string()).collect();
                write!(f, "composition (b={b}, I={big_i}, d={d}, large t={large_t}, bases {})", bases.join("+"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub family: StableFamily,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionPlan {
    pub decomposition: Decomposition,
    pub large_t: usize,
    /// Non-increasing; one value per base square.
    pub base_t: Vec<usize>,
}

/// Sums reachable with exactly `k` values, for `k = 0..=count`.
fn reachable(values: &[usize], count: usize) -> Vec<Vec<bool>> {
    let max = values.iter().copied().max().unwrap_or(0);
    let width = count * max + 1;
    let mut reach = vec![vec![false; width]; count + 1];
    reach[0][0] = true;
    for k in 1..=count {
        for s in 0..width {
            reach[k][s] = values.iter().any(|&v| v <= s && reach[k - 1][s - v]);
        }
    }
    reach
}

/// Splits `target` into `count` values from `values`, largest first.
fn split_sum(values: &[usize], count: usize, target: usize) -> Option<Vec<usize>> {
    let reach = reachable(values, count);
    if target >= reach[count].len() || !reach[count][target] {
        return None;
    }
    let mut desc = values.to_vec();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    let mut rest = target;
    let mut out = Vec::with_capacity(count);
    for left in (0..count).rev() {
        let v = *desc.iter().find(|&&v| v <= rest && reach[left][rest - v])?;
        out.push(v);
        rest -= v;
    }
    Some(out)
}

fn candidate_bases(dataset: &Dataset, n: usize, choice: BaseChoice) -> Vec<usize> {
    match choice {
        BaseChoice::Fixed(b) => vec![b],
        BaseChoice::Auto => dataset.base_sizes().into_iter().filter(|&b| 3 * b <= n).collect(),
    }
}

/// First plan over the candidate bases (ascending) and large values (ascending).
pub fn plan_composition(dataset: &Dataset, n: usize, mu: usize, t: usize, choice: BaseChoice) -> Option<CompositionPlan> {
    for b in candidate_bases(dataset, n, choice) {
        let Ok(dec) = decompose(n, b) else { continue };
        if b + dec.d > MAX_SUBSQUARE {
            continue;
        }
        let base_values: Vec<usize> = dataset.available_t(b, 0, mu).into_iter().collect();
        if base_values.is_empty() {
            continue;
        }
        for large_t in dataset.available_t(b, dec.d, mu) {
            let Some(rest) = t.checked_sub(dec.d + large_t) else { continue };
            if let Some(base_t) = split_sum(&base_values, 2 * dec.big_i, rest) {
                return Some(CompositionPlan {
                    decomposition: dec,
                    large_t,
                    base_t,
                });
            }
        }
    }
    None
}

/// Realizes a plan from dataset witnesses; the result is verified by `compose`.
pub fn build_plan(dataset: &Dataset, mu: usize, plan: &CompositionPlan) -> Result<Construction> {
    let Decomposition { b, big_i, d, .. } = plan.decomposition;
    let missing = |size, t| Error::NoConstruction(format!("no witness for {t} at size {size} (b = {b}, mu = {mu})"));
    let (large, _) = dataset.witness(b, d, mu, plan.large_t).ok_or_else(|| missing(b + d, plan.large_t))?;
    let bases = plan
        .base_t
        .iter()
        .map(|&t| dataset.witness(b, 0, mu, t).map(|(w, _)| w).ok_or_else(|| missing(b, t)))
        .collect::<Result<Vec<_>>>()?;
    let family = compose(&plan.decomposition, mu, &large, &bases)?;
    Ok(Construction {
        family,
        provenance: Provenance::Composition {
            b,
            big_i,
            d,
            large_t: plan.large_t,
            base_t: plan.base_t.clone(),
        },
    })
}

/// The identical, shifted or factorization family for `(n, mu, t)`, if one applies.
pub fn closed_form(n: usize, mu: usize, t: usize) -> Result<Option<Construction>> {
    if t == n {
        return Ok(Some(Construction {
            family: identical_family(n, mu)?,
            provenance: Provenance::Identical,
        }));
    }
    if t == 0 && mu <= n {
        return Ok(Some(Construction {
            family: shifted_family(n, mu)?,
            provenance: Provenance::Shifted,
        }));
    }
    // n = m1 * m2 with at least mu members; keep the first mu.
    if t < n && n % (n - t) == 0 {
        let m2 = n - t;
        let m1 = n / m2;
        if m1 > 1 && m2 >= mu {
            let full = factor_family(n, m1, m2)?;
            let family = StableFamily::new(full.transversals()[..mu].to_vec())?;
            return Ok(Some(Construction {
                family,
                provenance: Provenance::Factorization { m1, m2 },
            }));
        }
    }
    Ok(None)
}

fn check_target(n: usize, mu: usize, t: usize) -> Result<()> {
    check_order(n)?;
    if mu < 2 {
        return Err(invalid(format!("mu = {mu} must be at least 2")));
    }
    if t > n {
        return Err(invalid(format!("t = {t} exceeds n = {n}")));
    }
    Ok(())
}

/// Composition only: a verified family built from dataset witnesses, or
/// `NoConstruction` explaining why no combination reaches `t`.
pub fn compose_from_dataset(dataset: &Dataset, n: usize, mu: usize, t: usize, choice: BaseChoice) -> Result<Construction> {
    check_target(n, mu, t)?;
    if t + mu > n && t < n {
        return Err(Error::NoConstruction(format!(
            "t = {t} lies in [n - mu + 1, n - 1] = [{}, {}], where no family exists",
            n + 1 - mu,
            n - 1
        )));
    }
    match plan_composition(dataset, n, mu, t, choice) {
        Some(plan) => build_plan(dataset, mu, &plan),
        None => {
            let bases: Vec<String> = candidate_bases(dataset, n, choice).iter().map(|b| b.to_string()).collect();
            Err(Error::NoConstruction(format!(
                "no combination of available witnesses reaches t = {t} for n = {n}, mu = {mu} (bases tried: {})",
                if bases.is_empty() { "none".to_string() } else { bases.join(", ") }
            )))
        }
    }
}

/// Closed-form families first (identical, shifted, factorization), then composition.
pub fn construct_family(dataset: &Dataset, n: usize, mu: usize, t: usize, choice: BaseChoice) -> Result<Construction> {
    check_target(n, mu, t)?;
    if let Some(c) = closed_form(n, mu, t)? {
        return Ok(c);
    }
    compose_from_dataset(dataset, n, mu, t, choice)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_prefers_large_values() {
        assert_eq!(split_sum(&[0, 1, 9], 4, 19), Some(vec![9, 9, 1, 0]));
        assert_eq!(split_sum(&[0, 1, 9], 2, 3), None);
        assert_eq!(split_sum(&[0, 1, 9], 0, 0), Some(vec![]));
    }

    #[test]
    fn examples() {
        let ds = Dataset::shipped().unwrap();
        let c = construct_family(&ds, 33, 3, 3, BaseChoice::Auto).unwrap();
        assert_eq!(c.family.t(), 3);
        assert!(matches!(c.provenance, Provenance::Composition { .. }));
        assert!(matches!(
            compose_from_dataset(&ds, 33, 3, 30, BaseChoice::Auto),
            Err(Error::NoConstruction(_))
        ));
        // 33 = 11 * 3, so three transversals meeting in 30 cells do exist.
        let c = construct_family(&ds, 33, 3, 30, BaseChoice::Auto).unwrap();
        assert_eq!(c.provenance, Provenance::Factorization { m1: 11, m2: 3 });
        let c = construct_family(&ds, 45, 4, 30, BaseChoice::Auto).unwrap();
        assert_eq!(c.provenance, Provenance::Factorization { m1: 3, m2: 15 });
        assert_eq!((c.family.mu(), c.family.t()), (4, 30));
        assert!(matches!(
            construct_family(&ds, 9, 4, 6, BaseChoice::Auto),
            Err(Error::NoConstruction(_))
        ));
        let c = compose_from_dataset(&ds, 51, 4, 40, BaseChoice::Fixed(15)).unwrap();
        assert_eq!(c.family.t(), 40);
        assert!(matches!(c.provenance, Provenance::Composition { b: 15, .. }));
    }

    #[test]
    fn base_choice_parsing() {
        assert_eq!("auto".parse::<BaseChoice>().unwrap(), BaseChoice::Auto);
        assert_eq!("11".parse::<BaseChoice>().unwrap(), BaseChoice::Fixed(11));
        assert!("10".parse::<BaseChoice>().is_err());
        assert!("x".parse::<BaseChoice>().is_err());
    }
}
