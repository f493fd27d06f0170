use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::orderfind::{CaseKey, OrderResult};

/// Counts of the quotient `q` for one case; `total` is the sum over all `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    case: CaseKey,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new(case: CaseKey) -> Self {
        Self {
            case,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn from_counts(case: CaseKey, counts: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut h = Self::new(case);
        for (q, c) in counts {
            h.add_count(q, c);
        }
        h
    }

    pub fn case(&self) -> CaseKey {
        self.case
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, q: u64) -> u64 {
        self.counts.get(&q).copied().unwrap_or(0)
    }

    /// Nonzero `(q, count)` entries in ascending `q`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&q, &c)| (q, c))
    }

    pub fn add(&mut self, q: u64) {
        self.add_count(q, 1);
    }

    pub fn add_count(&mut self, q: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(q).or_insert(0) += count;
        self.total += count;
    }

    pub fn merge_from(&mut self, other: &Histogram) -> Result<()> {
        if self.case != other.case {
            return Err(Error::InvalidArgument(format!(
                "cannot merge histogram for {} into {}",
                other.case, self.case
            )));
        }
        for (q, c) in other.iter() {
            self.add_count(q, c);
        }
        Ok(())
    }
}

pub fn merge(a: &Histogram, b: &Histogram) -> Result<Histogram> {
    let mut out = a.clone();
    out.merge_from(b)?;
    Ok(out)
}

/// One histogram per case, indexed by [`CaseKey::slot`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseHistograms([Histogram; 4]);

impl Default for CaseHistograms {
    fn default() -> Self {
        Self(CaseKey::ALL.map(Histogram::new))
    }
}

impl CaseHistograms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_array(hists: [Histogram; 4]) -> Result<Self> {
        for (h, case) in hists.iter().zip(CaseKey::ALL) {
            if h.case() != case {
                return Err(Error::InvalidArgument(format!(
                    "histogram for {} in slot of {case}",
                    h.case()
                )));
            }
        }
        Ok(Self(hists))
    }

    pub fn get(&self, case: CaseKey) -> &Histogram {
        &self.0[case.slot()]
    }

    pub fn get_mut(&mut self, case: CaseKey) -> &mut Histogram {
        &mut self.0[case.slot()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Histogram> {
        self.0.iter()
    }

    #[inline]
    pub fn record(&mut self, r: &OrderResult) {
        self.0[r.case.slot()].add(r.q as u64);
    }

    /// Sum of all four totals, i.e. the number of pairs recorded.
    pub fn pairs(&self) -> u64 {
        self.0.iter().map(Histogram::total).sum()
    }

    pub fn merge_from(&mut self, other: &CaseHistograms) {
        for (mine, theirs) in self.0.iter_mut().zip(other.0.iter()) {
            // Slots always agree in case.
            mine.merge_from(theirs).expect("slot case mismatch");
        }
    }

    pub fn merged(mut self, other: CaseHistograms) -> CaseHistograms {
        self.merge_from(&other);
        self
    }
}
