//! Percentage tables, the expectation statistic, the `q = 4` check for
//! case 4 and drift diagnostics across ranges.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::orderfind::CaseKey;
use crate::sweep::{CaseHistograms, Histogram};

pub const DEFAULT_TOP_K: u64 = 20;
pub const DEFAULT_CONVERGENCE_CUTOFF: u64 = 50;

/// `100 * count / total` rounded to three significant figures
/// (round-half-to-even), stored as `scaled / 10^decimals`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Percent {
    scaled: u64,
    decimals: u32,
}

impl Percent {
    pub fn from_ratio(count: u64, total: u64) -> Self {
        assert!(total > 0 && count <= total);
        if count == 0 {
            return Percent {
                scaled: 0,
                decimals: 3,
            };
        }
        let num = 100 * count as u128;
        let den = total as u128;
        // Largest e <= 2 with num/den >= 10^e.
        let at_least = |e: i32| {
            if e >= 0 {
                num >= den * 10u128.pow(e as u32)
            } else {
                num * 10u128.pow(e.unsigned_abs()) >= den
            }
        };
        let mut e: i32 = 2;
        while !at_least(e) {
            e -= 1;
        }
        let decimals = (2 - e) as u32;
        let mut scaled = round_half_even(num * 10u128.pow(decimals), den);
        let mut decimals = decimals;
        if scaled == 1000 && decimals > 0 {
            scaled = 100;
            decimals -= 1;
        }
        Percent {
            scaled: scaled as u64,
            decimals,
        }
    }

    pub fn value(&self) -> f64 {
        self.scaled as f64 / 10f64.powi(self.decimals as i32)
    }
}

fn round_half_even(num: u128, den: u128) -> u128 {
    let (q, r) = (num / den, num % den);
    match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q & 1),
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.decimals == 0 {
            self.scaled.to_string()
        } else {
            let pow = 10u64.pow(self.decimals);
            format!(
                "{}.{:0width$}",
                self.scaled / pow,
                self.scaled % pow,
                width = self.decimals as usize
            )
        };
        f.pad(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyRow {
    pub q: u64,
    pub percent: Percent,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    pub case: CaseKey,
    pub rows: Vec<FrequencyRow>,
    pub total: u64,
}

impl FrequencyTable {
    pub fn row(&self, q: u64) -> Option<&FrequencyRow> {
        self.rows.iter().find(|r| r.q == q)
    }
}

/// Rows for `q = 1..=top_k`, zero counts included.
pub fn frequency_table(h: &Histogram, top_k: u64) -> Result<FrequencyTable> {
    if h.is_empty() {
        return Err(Error::EmptyHistogram(h.case().j()));
    }
    let rows = (1..=top_k)
        .map(|q| {
            let count = h.count(q);
            FrequencyRow {
                q,
                percent: Percent::from_ratio(count, h.total()),
                count,
            }
        })
        .collect();
    Ok(FrequencyTable {
        case: h.case(),
        rows,
        total: h.total(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationReport {
    pub m: u64,
    pub expectation: f64,
    /// `ln(m) * ln(ln(m))`.
    pub normalizer: f64,
    pub ratio: f64,
}

/// Mean quotient of a histogram, normalized by `ln(m) ln(ln(m))`.
pub fn expectation(h: &Histogram, m: u64) -> Result<ExpectationReport> {
    if m < 16 {
        return Err(Error::InvalidArgument(format!(
            "range m={m} too small for ln(m) ln(ln(m)); need m >= 16"
        )));
    }
    if h.is_empty() {
        return Err(Error::EmptyHistogram(h.case().j()));
    }
    let weighted: u128 = h.iter().map(|(q, c)| q as u128 * c as u128).sum();
    let e = weighted as f64 / h.total() as f64;
    let ln_m = (m as f64).ln();
    let normalizer = ln_m * ln_m.ln();
    Ok(ExpectationReport {
        m,
        expectation: e,
        normalizer,
        ratio: e / normalizer,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub case: CaseKey,
    pub count_at_four: u64,
    /// Nonzero counts at `q = 0 (mod 4)`, `q != 4`. Only `q = 4` is proven absent.
    pub anomalies: Vec<(u64, u64)>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.count_at_four == 0
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{} [{}]: q=4 count={} -> {verdict}",
            self.case,
            self.case.label(),
            self.count_at_four
        )?;
        if self.anomalies.is_empty() {
            writeln!(f, "multiples of 4: all zero")
        } else {
            for (q, c) in &self.anomalies {
                writeln!(f, "EMPIRICAL-ANOMALY q={q} count={c}")?;
            }
            Ok(())
        }
    }
}

pub fn theorem_check(h4: &Histogram) -> TheoremReport {
    TheoremReport {
        case: h4.case(),
        count_at_four: h4.count(4),
        anomalies: h4.iter().filter(|&(q, _)| q % 4 == 0 && q != 4).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub q: u64,
    /// Relative frequency in percent at each range.
    pub percents: Vec<f64>,
    /// Largest absolute change between consecutive ranges, in percentage points.
    pub max_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub case: CaseKey,
    pub ranges: Vec<u64>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn row(&self, q: u64) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.q == q)
    }
}

/// Frequencies for `q = 1..=cutoff` of one case at increasing ranges.
pub fn convergence_report(series: &[(u64, &Histogram)], cutoff: u64) -> Result<ConvergenceReport> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "convergence needs at least two ranges, got {}",
            series.len()
        )));
    }
    let case = series[0].1.case();
    if let Some((_, h)) = series.iter().find(|(_, h)| h.case() != case) {
        return Err(Error::InvalidArgument(format!(
            "mixed cases {case} and {} in one convergence series",
            h.case()
        )));
    }
    if let Some((_, h)) = series.iter().find(|(_, h)| h.is_empty()) {
        return Err(Error::EmptyHistogram(h.case().j()));
    }
    let mut sorted: Vec<(u64, &Histogram)> = series.to_vec();
    sorted.sort_by_key(|&(m, _)| m);

    let rows = (1..=cutoff)
        .map(|q| {
            let percents: Vec<f64> = sorted
                .iter()
                .map(|(_, h)| 100.0 * h.count(q) as f64 / h.total() as f64)
                .collect();
            let max_drift = percents
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0, f64::max);
            ConvergenceRow {
                q,
                percents,
                max_drift,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        case,
        ranges: sorted.iter().map(|&(m, _)| m).collect(),
        rows,
    })
}

/// Convergence for every case that is nonempty at all ranges.
pub fn convergence_all(
    series: &[(u64, &CaseHistograms)],
    cutoff: u64,
) -> Result<Vec<ConvergenceReport>> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "convergence needs at least two ranges, got {}",
            series.len()
        )));
    }
    let mut out = Vec::new();
    for case in CaseKey::ALL {
        let per_case: Vec<(u64, &Histogram)> =
            series.iter().map(|&(m, h)| (m, h.get(case))).collect();
        if per_case.iter().all(|(_, h)| !h.is_empty()) {
            out.push(convergence_report(&per_case, cutoff)?);
        }
    }
    Ok(out)
}

/// Side-by-side percentage tables for one case at several ranges, in the
/// layout of the published tables.
pub fn render_frequency_text(columns: &[(u64, FrequencyTable)]) -> String {
    let mut out = String::new();
    let Some((_, first)) = columns.first() else {
        return out;
    };
    writeln!(out, "{}", first.case.label()).unwrap();
    let width = 12;
    write!(out, "{:>8}", "q \\ m").unwrap();
    for (m, _) in columns {
        write!(out, " {m:>width$}").unwrap();
    }
    out.push('\n');

    let mut by_q: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    for (_, t) in columns {
        for r in &t.rows {
            by_q.entry(r.q).or_default().push(r.percent.to_string());
        }
    }
    for (q, cells) in by_q {
        write!(out, "{q:>8}").unwrap();
        for c in cells {
            write!(out, " {c:>width$}").unwrap();
        }
        out.push('\n');
    }
    write!(out, "{:>8}", "Values").unwrap();
    for (_, t) in columns {
        write!(out, " {:>width$}", t.total).unwrap();
    }
    out.push('\n');
    out
}

pub const FREQUENCY_CSV_HEADER: &str = "case,m,q,percent,count,total";

pub fn render_frequency_csv(columns: &[(u64, FrequencyTable)]) -> String {
    let mut out = String::new();
    for (m, t) in columns {
        for r in &t.rows {
            writeln!(
                out,
                "{},{m},{},{},{},{}",
                t.case.j(),
                r.q,
                r.percent,
                r.count,
                t.total
            )
            .unwrap();
        }
    }
    out
}

pub fn render_expectation_text(reports: &[ExpectationReport]) -> String {
    let mut out = String::new();
    let line = |out: &mut String, label: &str, cells: Vec<String>| {
        write!(out, "{label:<24}").unwrap();
        for c in cells {
            write!(out, " {c:>10}").unwrap();
        }
        out.push('\n');
    };
    line(
        &mut out,
        "Range m",
        reports.iter().map(|r| r.m.to_string()).collect(),
    );
    line(
        &mut out,
        "Expectation E",
        reports
            .iter()
            .map(|r| format!("{:.3}", r.expectation))
            .collect(),
    );
    line(
        &mut out,
        "ln(m) ln(ln m)",
        reports
            .iter()
            .map(|r| format!("{:.3}", r.normalizer))
            .collect(),
    );
    line(
        &mut out,
        "E / (ln(m) ln(ln m))",
        reports.iter().map(|r| format!("{:.3}", r.ratio)).collect(),
    );
    out
}

pub const EXPECTATION_CSV_HEADER: &str = "m,expectation,normalizer,ratio";

pub fn render_expectation_csv(reports: &[ExpectationReport]) -> String {
    reports
        .iter()
        .map(|r| {
            format!(
                "{},{:.6},{:.6},{:.6}\n",
                r.m, r.expectation, r.normalizer, r.ratio
            )
        })
        .collect()
}

pub const CONVERGENCE_CSV_HEADER: &str = "case,q,m,percent";

/// One row per `(case, q, m)`.
pub fn render_convergence_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    for rep in reports {
        for row in &rep.rows {
            for (m, pct) in rep.ranges.iter().zip(&row.percents) {
                writeln!(out, "{},{},{m},{pct:.6}", rep.case.j(), row.q).unwrap();
            }
        }
    }
    out
}

pub fn render_convergence_text(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    for rep in reports {
        writeln!(out, "{}", rep.case.label()).unwrap();
        write!(out, "{:>6}", "q").unwrap();
        for m in &rep.ranges {
            write!(out, " {m:>10}").unwrap();
        }
        writeln!(out, " {:>10}", "max drift").unwrap();
        for row in &rep.rows {
            write!(out, "{:>6}", row.q).unwrap();
            for p in &row.percents {
                write!(out, " {p:>10.3}").unwrap();
            }
            writeln!(out, " {:>10.3}", row.max_drift).unwrap();
        }
        out.push('\n');
    }
    out
}
