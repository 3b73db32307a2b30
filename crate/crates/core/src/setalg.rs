//! Finite integer sets as unions of closed intervals, sumsets, and the
//! closed forms of the achievable-intersection spectra for three and four
//! transversals.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construct::decompose;
use crate::error::{invalid, Error, Result};
use crate::model::check_order;

/// Sorted, disjoint, non-adjacent closed intervals `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct IntervalSet {
    intervals: Vec<(i64, i64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// `[lo, hi]`; empty when `lo > hi`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        Self::from_intervals([(lo, hi)])
    }

    pub fn singleton(x: i64) -> Self {
        Self::interval(x, x)
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut v: Vec<(i64, i64)> = intervals.into_iter().filter(|&(lo, hi)| lo <= hi).collect();
        v.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn from_values(values: impl IntoIterator<Item = i64>) -> Self {
        Self::from_intervals(values.into_iter().map(|x| (x, x)))
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> u64 {
        self.intervals.iter().map(|&(lo, hi)| (hi - lo + 1) as u64).sum()
    }

    pub fn min(&self) -> Option<i64> {
        self.intervals.first().map(|iv| iv.0)
    }

    pub fn max(&self) -> Option<i64> {
        self.intervals.last().map(|iv| iv.1)
    }

    pub fn contains(&self, x: i64) -> bool {
        let idx = self.intervals.partition_point(|&(_, hi)| hi < x);
        self.intervals.get(idx).is_some_and(|&(lo, _)| lo <= x)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.intervals.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    pub fn to_set(&self) -> BTreeSet<i64> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = (self.intervals[i], other.intervals[j]);
            let lo = a.0.max(b.0);
            let hi = a.1.min(b.1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a.1 < b.1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for &(lo, hi) in &self.intervals {
            let mut cur = lo;
            for &(olo, ohi) in &other.intervals {
                if ohi < cur || olo > hi {
                    continue;
                }
                if olo > cur {
                    out.push((cur, olo - 1));
                }
                cur = cur.max(ohi.saturating_add(1));
                if cur > hi {
                    break;
                }
            }
            if cur <= hi {
                out.push((cur, hi));
            }
        }
        Self::from_intervals(out)
    }

    pub fn shift(&self, by: i64) -> Self {
        IntervalSet {
            intervals: self.intervals.iter().map(|&(lo, hi)| (lo + by, hi + by)).collect(),
        }
    }

    /// `{ f(x) : x in self }` for the reflection `x -> about - x`.
    pub fn reflect(&self, about: i64) -> Self {
        Self::from_intervals(self.intervals.iter().map(|&(lo, hi)| (about - hi, about - lo)))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }
}

impl From<Vec<(i64, i64)>> for IntervalSet {
    fn from(v: Vec<(i64, i64)>) -> Self {
        Self::from_intervals(v)
    }
}

impl From<IntervalSet> for Vec<(i64, i64)> {
    fn from(s: IntervalSet) -> Self {
        s.intervals
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, &(lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            if lo == hi {
                write!(f, "{{{lo}}}")?;
            } else {
                write!(f, "[{lo},{hi}]")?;
            }
        }
        Ok(())
    }
}

/// Minkowski sum `A + B`.
pub fn sumset(a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
    IntervalSet::from_intervals(
        a.intervals
            .iter()
            .flat_map(|&(alo, ahi)| b.intervals.iter().map(move |&(blo, bhi)| (alo + blo, ahi + bhi))),
    )
}

/// `kA`, the set of sums of `k` (not necessarily distinct) elements of `A`.
pub fn k_fold(k: usize, a: &IntervalSet) -> Result<IntervalSet> {
    if k < 1 {
        return Err(invalid("k-fold sumset needs k >= 1"));
    }
    // Binary powering: kA = 2(k/2)A (+ A).
    let mut result: Option<IntervalSet> = None;
    let mut power = a.clone();
    let mut k = k;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(r) => sumset(&r, &power),
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        power = sumset(&power, &power);
    }
    Ok(result.expect("k >= 1"))
}

/// Closed form of `j([0, a] ∪ {b})`: `[0, jb]` with the gaps between the
/// consecutive runs `[(j-i)b, (j-i)b + ia]` removed.
pub fn interval_gap_form(j: i64, a: i64, b: i64) -> Result<IntervalSet> {
    if j < 1 || a < 1 || a >= b {
        return Err(invalid(format!(
            "gap form needs j >= 1 and 1 <= a < b, got j={j} a={a} b={b}"
        )));
    }
    let gaps = (1..=(b - 2) / a).map(|i| (j * b - i * b + i * a + 1, j * b - i * b + b - 1));
    let gaps = IntervalSet::from_intervals(gaps).intersection(&IntervalSet::interval(0, j * b));
    Ok(IntervalSet::interval(0, j * b).difference(&gaps))
}

/// Achievable stable sizes for `mu` partial transversals of a base subsquare
/// of size `b` (the shipped witnesses at `d = 0`).
pub fn omega_base(mu: usize, b: usize) -> Result<IntervalSet> {
    let vals: &[i64] = match (mu, b) {
        (4, 9) => &[0, 1, 9],
        (4, 11) => &[0, 1, 2, 3, 11],
        (4, 15) => &[1, 2, 3, 4, 5, 15],
        (3, 9) => &[0, 1, 2, 3, 9],
        (3, 11) => &[0, 1, 2, 3, 4, 5, 11],
        _ => return Err(Error::Unsupported(format!("no base set for mu={mu}, b={b}"))),
    };
    Ok(IntervalSet::from_values(vals.iter().copied()))
}

/// `2I` copies of the base set summed, via the gap form (with the shift by
/// one for `b = 15`, whose base set is `{1} + ([0,4] ∪ {14})`).
pub fn omega_power(mu: usize, b: usize, big_i: usize) -> Result<IntervalSet> {
    if big_i < 1 {
        return Err(invalid("I must be at least 1"));
    }
    let j = 2 * big_i as i64;
    match (mu, b) {
        (4, 9) => interval_gap_form(j, 1, 9),
        (4, 11) => interval_gap_form(j, 3, 11),
        (4, 15) => Ok(interval_gap_form(j, 4, 14)?.shift(j)),
        (3, 9) => interval_gap_form(j, 3, 9),
        (3, 11) => interval_gap_form(j, 5, 11),
        _ => Err(Error::Unsupported(format!("no base set for mu={mu}, b={b}"))),
    }
}

/// Parameters of the decompositions `n = 18I + 9 + 2d`, `n = 22I' + 11 + 2d'`
/// and (when `n >= 45`) `n = 30I'' + 15 + 2d''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumParams {
    pub n: usize,
    pub i9: usize,
    pub d9: usize,
    pub i11: usize,
    pub d11: usize,
    pub b15: Option<(usize, usize)>,
}

impl SpectrumParams {
    pub fn new(n: usize) -> Result<Self> {
        check_order(n)?;
        if n < 33 {
            return Err(Error::OutOfRange(format!("n = {n} < 33")));
        }
        let nine = decompose(n, 9)?;
        let eleven = decompose(n, 11)?;
        let b15 = decompose(n, 15).ok().map(|d| (d.big_i, d.d));
        Ok(SpectrumParams {
            n,
            i9: nine.big_i,
            d9: nine.d,
            i11: eleven.big_i,
            d11: eleven.d,
            b15,
        })
    }

    /// `min(3 + d', d)`, the lower end of the theorem ranges.
    pub fn low_start(&self) -> i64 {
        (3 + self.d11 as i64).min(self.d9 as i64)
    }
}

/// The achievable sets obtained from one base size and one choice of
/// large-subsquare witness, plus the two combined statements per `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    /// mu = 3, b = 11, full large subsquare: `[11+2d', n] \ [n-5, n-1]`.
    Mu3HighB11,
    /// mu = 3, b = 9, large stable size 0.
    Mu3LowB9,
    /// mu = 3, b = 11, large stable size 3.
    Mu3LowB11,
    /// mu = 3, the low range `[min(3+d', d), 11+2d']` less its exceptions.
    Mu3Low,
    /// mu = 4, b = 11, full large subsquare.
    Mu4HighB11,
    /// mu = 4, b = 15, full large subsquare (n >= 45).
    Mu4HighB15,
    /// mu = 4, union of the two high constructions.
    Mu4High,
    /// mu = 4, b = 11, large stable size 3.
    Mu4LowB11,
    /// mu = 4, b = 9, large stable size 0.
    Mu4LowB9,
    /// mu = 4, the low range less its exceptions.
    Mu4Low,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::Mu3HighB11,
        LemmaId::Mu3LowB9,
        LemmaId::Mu3LowB11,
        LemmaId::Mu3Low,
        LemmaId::Mu4HighB11,
        LemmaId::Mu4HighB15,
        LemmaId::Mu4High,
        LemmaId::Mu4LowB11,
        LemmaId::Mu4LowB9,
        LemmaId::Mu4Low,
    ];

    pub fn mu(self) -> usize {
        match self {
            LemmaId::Mu3HighB11 | LemmaId::Mu3LowB9 | LemmaId::Mu3LowB11 | LemmaId::Mu3Low => 3,
            _ => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Mu3HighB11 => "mu3-high-b11",
            LemmaId::Mu3LowB9 => "mu3-low-b9",
            LemmaId::Mu3LowB11 => "mu3-low-b11",
            LemmaId::Mu3Low => "mu3-low",
            LemmaId::Mu4HighB11 => "mu4-high-b11",
            LemmaId::Mu4HighB15 => "mu4-high-b15",
            LemmaId::Mu4High => "mu4-high",
            LemmaId::Mu4LowB11 => "mu4-low-b11",
            LemmaId::Mu4LowB9 => "mu4-low-b9",
            LemmaId::Mu4Low => "mu4-low",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == name)
    }

    /// Smallest order the statement applies to.
    pub fn min_order(self) -> usize {
        match self {
            LemmaId::Mu3LowB9 | LemmaId::Mu4LowB9 => 27,
            LemmaId::Mu4HighB15 => 45,
            _ => 33,
        }
    }
}

fn iv(lo: i64, hi: i64) -> IntervalSet {
    IntervalSet::interval(lo, hi)
}

/// Values listed as possibly missing from the low range.
fn low_exceptions(mu: usize, p: &SpectrumParams) -> IntervalSet {
    let (n, d, dp) = (p.n as i64, p.d9 as i64, p.d11 as i64);
    match mu {
        3 => match n {
            51 => IntervalSet::singleton(29),
            53 => IntervalSet::singleton(30),
            _ => IntervalSet::empty(),
        },
        _ => {
            if (33..=43).contains(&n) {
                iv(10 + dp, 11 + dp)
            } else if (45..=53).contains(&n) {
                iv(-1 + dp, 2 + dp).union(&iv(10 + dp, 11 + dp)).union(&iv(18 + dp, 20 + dp))
            } else if (63..=75).contains(&n) {
                iv(7 + d, 8 + d)
            } else {
                IntervalSet::empty()
            }
        }
    }
}

/// The set of stable sizes established by one construction (or one
/// combination of constructions) for order `n`.
pub fn lemma_spectrum(lemma: LemmaId, n: usize) -> Result<IntervalSet> {
    check_order(n)?;
    if n < lemma.min_order() {
        return Err(Error::OutOfRange(format!(
            "{} needs n >= {}, got {n}",
            lemma.name(),
            lemma.min_order()
        )));
    }
    let b9 = decompose(n, 9)?;
    let (i9, d9) = (b9.big_i, b9.d as i64);
    // t = d + t0 + (sum of 2I base values), per base size.
    let via = |mu: usize, b: usize, t0: i64| -> Result<IntervalSet> {
        let dec = decompose(n, b)?;
        Ok(omega_power(mu, b, dec.big_i)?.shift(dec.d as i64 + t0))
    };
    match lemma {
        LemmaId::Mu3LowB9 => Ok(omega_power(3, 9, i9)?.shift(d9)),
        LemmaId::Mu4LowB9 => Ok(omega_power(4, 9, i9)?.shift(d9)),
        LemmaId::Mu3HighB11 | LemmaId::Mu4HighB11 => {
            let d11 = decompose(n, 11)?.d as i64;
            via(lemma.mu(), 11, 11 + d11)
        }
        LemmaId::Mu3LowB11 | LemmaId::Mu4LowB11 => via(lemma.mu(), 11, 3),
        LemmaId::Mu4HighB15 => {
            let d15 = decompose(n, 15)?.d as i64;
            via(4, 15, 15 + d15)
        }
        LemmaId::Mu4High => {
            // The union reaches below 11 + 2d' when the b = 15 family starts
            // lower; only the common window is reported.
            let high11 = lemma_spectrum(LemmaId::Mu4HighB11, n)?;
            let window = iv(11 + 2 * decompose(n, 11)?.d as i64, n as i64);
            if n >= 45 {
                Ok(high11.union(&lemma_spectrum(LemmaId::Mu4HighB15, n)?).intersection(&window))
            } else {
                Ok(high11)
            }
        }
        LemmaId::Mu3Low | LemmaId::Mu4Low => {
            let p = SpectrumParams::new(n)?;
            let range = iv(p.low_start(), 11 + 2 * p.d11 as i64);
            Ok(range.difference(&low_exceptions(lemma.mu(), &p)))
        }
    }
}

/// What is known about the stable sizes `t in [0, n]` for one `(n, mu)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub mu: usize,
    pub proven: IntervalSet,
    /// Values inside the claimed range that may be missing.
    pub exceptions: IntervalSet,
    /// Values that can never occur.
    pub infeasible: IntervalSet,
}

impl SpectrumReport {
    /// Values in `[0, n]` not covered by any of the three sets.
    pub fn unknown(&self) -> IntervalSet {
        iv(0, self.n as i64)
            .difference(&self.proven)
            .difference(&self.exceptions)
            .difference(&self.infeasible)
    }
}

/// `[n - mu + 1, n - 1]`: too few free columns remain for `mu` pairwise
/// disjoint completions.
pub fn nonexistence_range(n: usize, mu: usize) -> IntervalSet {
    iv(n as i64 - mu as i64 + 1, n as i64 - 1).intersection(&iv(0, n as i64))
}

/// The main existence statement for `mu = 3` or `mu = 4` and odd `n >= 33`.
pub fn theorem_spectrum(n: usize, mu: usize) -> Result<SpectrumReport> {
    check_order(n).map_err(|_| Error::OutOfRange(format!("n = {n} is not odd")))?;
    if mu != 3 && mu != 4 {
        return Err(Error::Unsupported(format!("mu = {mu}; only 3 and 4 are covered")));
    }
    let p = SpectrumParams::new(n)?;
    let n_i = n as i64;
    let excluded = if mu == 3 {
        iv(n_i - 5, n_i - 1)
    } else {
        IntervalSet::singleton(n_i - 15).union(&iv(n_i - 7, n_i - 1))
    };
    let range = iv(p.low_start(), n_i).difference(&excluded);
    let mut listed = low_exceptions(mu, &p);
    if mu == 4 && (33..=43).contains(&n) {
        listed = listed.union(&iv(n_i - 14, n_i - 12));
    }
    let exceptions = listed.intersection(&range);
    Ok(SpectrumReport {
        n,
        mu,
        proven: range.difference(&exceptions),
        exceptions,
        infeasible: nonexistence_range(n, mu),
    })
}
