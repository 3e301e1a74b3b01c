//! Tabular outputs: inequality tables, metric series and verdicts, with
//! their CSV encodings.
//!
//! Numbers are written with Rust's shortest round-trip formatting so that
//! reading a CSV back reproduces the values bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fields::write_atomic;

/// One corpus member's measurement of an inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityRow {
    pub seed: u64,
    pub exponent: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityTable {
    pub name: String,
    pub rows: Vec<InequalityRow>,
}

impl InequalityTable {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            rows: Vec::new(),
        }
    }

    /// Largest ratio; `NaN` if any ratio is not finite.
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| if r.ratio.is_finite() { m.max(r.ratio) } else { f64::NAN })
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.ratio.is_finite() && r.lhs.is_finite() && r.rhs.is_finite())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,exponent,lhs,rhs,ratio\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.seed, r.exponent, r.lhs, r.rhs, r.ratio);
        }
        s
    }

    pub fn from_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut t = Self::new(name);
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(csv_error(i, "expected 5 columns"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| csv_error(i, "bad number"));
            t.rows.push(InequalityRow {
                seed: f[0].parse().map_err(|_| csv_error(i, "bad seed"))?,
                exponent: num(f[1])?,
                lhs: num(f[2])?,
                rhs: num(f[3])?,
                ratio: num(f[4])?,
            });
        }
        Ok(t)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        write_atomic(&path, self.to_csv().as_bytes())?;
        Ok(path)
    }
}

fn csv_error(line: usize, what: &str) -> Error {
    Error::MalformedSnapshot(format!("csv line {}: {what}", line + 1))
}

/// Named numeric series; the metrics of an experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    series: BTreeMap<String, Vec<f64>>,
}

impl Metrics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.series.insert(name.into(), values);
    }

    pub fn push(&mut self, name: &str, value: f64) {
        self.series.entry(name.to_string()).or_default().push(value);
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series.get(name).map(|v| v.as_slice())
    }

    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.get(name)
            .ok_or_else(|| Error::MalformedSnapshot(format!("metric `{name}` missing from report")))
    }

    pub fn scalar(&self, name: &str) -> Result<f64> {
        self.require(name)?
            .first()
            .copied()
            .ok_or_else(|| Error::MalformedSnapshot(format!("metric `{name}` is empty")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(|s| s.as_str())
    }

    /// Long format: `series,index,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("series,index,value\n");
        for (name, values) in &self.series {
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(s, "{name},{i},{v}");
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut m = Self::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(csv_error(i, "expected 3 columns"));
            }
            let idx: usize = f[1].parse().map_err(|_| csv_error(i, "bad index"))?;
            let v: f64 = f[2].parse().map_err(|_| csv_error(i, "bad number"))?;
            let entry = m.series.entry(f[0].to_string()).or_default();
            if entry.len() != idx {
                return Err(csv_error(i, "series indices out of order"));
            }
            entry.push(v);
        }
        Ok(m)
    }
}

/// How a criterion compares its value with the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Below,
    AtMost,
    AtLeast,
    Above,
}

impl Comparison {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::Below => value < threshold,
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::Above => value > threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Comparison::Below => "<",
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Above => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub name: String,
    pub comparison: Comparison,
    pub threshold: f64,
    pub value: f64,
    pub pass: bool,
}

impl Criterion {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, threshold: f64) -> Self {
        Self {
            name: name.into(),
            comparison,
            threshold,
            value,
            pass: value.is_finite() && comparison.holds(value, threshold),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} threshold {} {} value {} {}",
            self.name,
            self.comparison.symbol(),
            self.threshold,
            self.value,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

pub fn verdict_text(criteria: &[Criterion]) -> String {
    criteria.iter().map(|c| c.line() + "\n").collect()
}

/// Parses `verdict.txt` back into `(name, pass)` pairs.
pub fn parse_verdict(text: &str) -> Vec<(String, bool)> {
    text.lines()
        .filter_map(|l| {
            let name = l.split_whitespace().next()?;
            Some((name.to_string(), l.trim_end().ends_with("pass")))
        })
        .collect()
}

/// Least-squares slope of `y` against `x`; `NaN` with fewer than two
/// distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::NAN
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn metrics_csv_round_trips(values in proptest::collection::vec(-1e12f64..1e12, 0..20), other in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..5)) {
            let mut m = Metrics::new();
            m.insert("energy", values.clone());
            m.insert("aux", other.clone());
            let back = Metrics::from_csv(&m.to_csv()).unwrap();
            prop_assert_eq!(back.get("aux").unwrap(), other.as_slice());
            prop_assert_eq!(back.get("energy").unwrap_or(&[]), values.as_slice());
        }
    }

    #[test]
    fn inequality_csv_round_trips() {
        let mut t = InequalityTable::new("demo");
        t.rows.push(InequalityRow {
            seed: 3,
            exponent: 1.25,
            lhs: 0.1,
            rhs: 0.3,
            ratio: 0.1 / 0.3,
        });
        let back = InequalityTable::from_csv("demo", &t.to_csv()).unwrap();
        assert_eq!(back, t);
        assert!(t.to_csv().starts_with("seed,exponent,lhs,rhs,ratio\n"));
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        assert!((fit_slope(&pts) - 3.0).abs() < 1e-14);
        assert!(fit_slope(&[(1.0, 2.0)]).is_nan());
    }

    #[test]
    fn criterion_lines() {
        let c = Criterion::new("residual", 1e-8, Comparison::Below, 1e-6);
        assert!(c.pass);
        let f = Criterion::new("slope", f64::NAN, Comparison::AtLeast, 0.0);
        assert!(!f.pass);
        let parsed = parse_verdict(&verdict_text(&[c, f]));
        assert_eq!(parsed, vec![("residual".into(), true), ("slope".into(), false)]);
    }
}
