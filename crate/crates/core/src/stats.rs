//! Ecosystem-level summaries over many score reports: category frequencies,
//! distribution statistics, dependents ranking and inter-rater agreement.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::check::CheckName;
use crate::error::{Error, Result};
use crate::intel::RepoId;
use crate::scoring::ScoreReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Inconclusive,
    Zero,
    Positive,
}

pub fn categorize(score: i32) -> Result<Category> {
    match score {
        -1 => Ok(Category::Inconclusive),
        0 => Ok(Category::Zero),
        1..=10 => Ok(Category::Positive),
        _ => Err(Error::Input(format!("score {score} outside -1..=10"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackageRecord {
    pub package: String,
    pub ecosystem: String,
    pub repo: RepoId,
    pub dependents: u64,
    pub report: ScoreReport,
}

impl PackageRecord {
    pub fn score(&self, check: CheckName) -> Option<i32> {
        self.report.check(check).map(|c| c.score.value())
    }
}

/// Line numbers (1-based) and messages for lines that could not be used.
pub type SkippedLines = Vec<(usize, String)>;

/// Parses JSON-lines input. Blank lines are ignored; malformed lines and
/// repeated (package, ecosystem) pairs are skipped and reported.
pub fn read_records(text: &str) -> (Vec<PackageRecord>, SkippedLines) {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<PackageRecord>(line) {
            Ok(r) => {
                if seen.insert((r.package.clone(), r.ecosystem.clone())) {
                    records.push(r);
                } else {
                    skipped.push((
                        i + 1,
                        format!("duplicate package {} ({})", r.package, r.ecosystem),
                    ));
                }
            }
            Err(e) => skipped.push((i + 1, e.to_string())),
        }
    }
    (records, skipped)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrequencyOptions {
    /// Count -1 as a magnitude in mean/median/std.
    pub include_inconclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub check: CheckName,
    pub ecosystem: String,
    pub n: usize,
    pub pct_inconclusive: f64,
    pub pct_zero: f64,
    pub pct_positive: f64,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub std: Option<f64>,
}

/// Per-score histogram; index is score + 1.
type Histogram = [usize; 12];

/// Partial tallies. Merging accumulators built from any partition of the
/// records gives the same table as a single pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyAccumulator {
    cells: BTreeMap<(CheckName, String), Histogram>,
}

impl FrequencyAccumulator {
    pub fn add(&mut self, record: &PackageRecord) {
        for c in &record.report.checks {
            let h = self
                .cells
                .entry((c.name, record.ecosystem.clone()))
                .or_insert([0; 12]);
            h[(c.score.value() + 1) as usize] += 1;
        }
    }

    pub fn merge(&mut self, other: FrequencyAccumulator) {
        for (key, h) in other.cells {
            let mine = self.cells.entry(key).or_insert([0; 12]);
            for (a, b) in mine.iter_mut().zip(h) {
                *a += b;
            }
        }
    }

    pub fn rows(&self, options: FrequencyOptions) -> Vec<FrequencyRow> {
        self.cells
            .iter()
            .map(|((check, eco), h)| row(*check, eco, h, options))
            .collect()
    }
}

fn pct(count: usize, n: usize) -> f64 {
    // Integer half-away-from-zero rounding to tenths.
    ((2000 * count + n) / (2 * n)) as f64 / 10.0
}

fn row(
    check: CheckName,
    ecosystem: &str,
    h: &Histogram,
    options: FrequencyOptions,
) -> FrequencyRow {
    let n: usize = h.iter().sum();
    let positive: usize = h[2..].iter().sum();
    let first = if options.include_inconclusive { 0 } else { 1 };
    let values: Vec<(f64, usize)> = (first..12)
        .filter(|i| h[*i] > 0)
        .map(|i| (i as f64 - 1.0, h[i]))
        .collect();
    let m: usize = values.iter().map(|(_, c)| c).sum();
    let (mean, median, std) = if m == 0 {
        (None, None, None)
    } else {
        let mean = values.iter().map(|(v, c)| v * *c as f64).sum::<f64>() / m as f64;
        let var = values
            .iter()
            .map(|(v, c)| (v - mean).powi(2) * *c as f64)
            .sum::<f64>()
            / m as f64;
        let nth = |k: usize| {
            let mut seen = 0;
            for (v, c) in &values {
                seen += c;
                if k < seen {
                    return *v;
                }
            }
            unreachable!("k < m")
        };
        let median = if m % 2 == 1 {
            nth(m / 2)
        } else {
            (nth(m / 2 - 1) + nth(m / 2)) / 2.0
        };
        (Some(mean), Some(median), Some(var.sqrt()))
    };
    FrequencyRow {
        check,
        ecosystem: ecosystem.to_string(),
        n,
        pct_inconclusive: pct(h[0], n),
        pct_zero: pct(h[1], n),
        pct_positive: pct(positive, n),
        mean,
        median,
        std,
    }
}

/// One row per (check, ecosystem), checks in registry order then ecosystems
/// sorted by name.
pub fn frequency_table(records: &[PackageRecord], options: FrequencyOptions) -> Vec<FrequencyRow> {
    let mut acc = FrequencyAccumulator::default();
    for r in records {
        acc.add(r);
    }
    acc.rows(options)
}

fn opt2(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.2}"))
}

pub fn to_csv(rows: &[FrequencyRow]) -> String {
    let mut out =
        String::from("check,ecosystem,n,pct_inconclusive,pct_zero,pct_positive,mean,median,std\n");
    for r in rows {
        let eco = if r.ecosystem.contains([',', '"', '\n']) {
            format!("\"{}\"", r.ecosystem.replace('"', "\"\""))
        } else {
            r.ecosystem.clone()
        };
        let _ = writeln!(
            out,
            "{},{},{},{:.1},{:.1},{:.1},{},{},{}",
            r.check,
            eco,
            r.n,
            r.pct_inconclusive,
            r.pct_zero,
            r.pct_positive,
            opt2(r.mean),
            opt2(r.median),
            opt2(r.std)
        );
    }
    out
}

/// Checks as rows, one column group per ecosystem.
pub fn to_markdown(rows: &[FrequencyRow], options: FrequencyOptions) -> String {
    let ecosystems: BTreeSet<&str> = rows.iter().map(|r| r.ecosystem.as_str()).collect();
    let mut checks: Vec<CheckName> = rows.iter().map(|r| r.check).collect();
    checks.dedup();
    let cell: HashMap<(CheckName, &str), &FrequencyRow> = rows
        .iter()
        .map(|r| ((r.check, r.ecosystem.as_str()), r))
        .collect();

    let mut out = String::from("| Check |");
    for e in &ecosystems {
        let _ = write!(
            out,
            " {e} -1 | {e} 0 | {e} 1-10 | {e} mean | {e} median | {e} std |"
        );
    }
    out.push_str("\n|---|");
    for _ in &ecosystems {
        out.push_str("---:|---:|---:|---:|---:|---:|");
    }
    out.push('\n');
    for check in checks {
        let _ = write!(out, "| {check} |");
        for e in &ecosystems {
            match cell.get(&(check, *e)) {
                Some(r) => {
                    let _ = write!(
                        out,
                        " {:.1}% | {:.1}% | {:.1}% | {} | {} | {} |",
                        r.pct_inconclusive,
                        r.pct_zero,
                        r.pct_positive,
                        opt2(r.mean),
                        opt2(r.median),
                        opt2(r.std)
                    );
                }
                None => out.push_str("  |  |  |  |  |  |"),
            }
        }
        out.push('\n');
    }
    let basis = if options.include_inconclusive {
        "include -1 scores"
    } else {
        "exclude -1 scores"
    };
    let _ = writeln!(
        out,
        "\nMean, median and std {basis}; std is the population standard deviation."
    );
    out
}

/// Records whose `check` score falls in one of `categories`, most dependents
/// first (ties by package name), at most `k`.
pub fn rank_by_dependents<'a>(
    records: &'a [PackageRecord],
    check: CheckName,
    categories: &[Category],
    k: usize,
) -> Vec<&'a PackageRecord> {
    let mut hits: Vec<&PackageRecord> = records
        .iter()
        .filter(|r| {
            r.score(check)
                .and_then(|s| categorize(s).ok())
                .is_some_and(|c| categories.contains(&c))
        })
        .collect();
    hits.sort_by(|a, b| {
        b.dependents
            .cmp(&a.dependents)
            .then_with(|| a.package.cmp(&b.package))
    });
    hits.truncate(k);
    hits
}

/// Cohen's kappa for two raters labelling the same items.
pub fn cohen_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "label lists differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Input("label lists are empty".into()));
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let mut marg_a: HashMap<&T, usize> = HashMap::new();
    let mut marg_b: HashMap<&T, usize> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *marg_a.entry(x).or_default() += 1;
        *marg_b.entry(y).or_default() += 1;
    }
    let p_o = agree / n;
    let p_e: f64 = marg_a
        .iter()
        .map(|(label, ca)| *ca as f64 * *marg_b.get(label).unwrap_or(&0) as f64)
        .sum::<f64>()
        / (n * n);
    if (1.0 - p_e).abs() < f64::EPSILON {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}
