use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{is_country_code, Panel, SeriesKey};
use crate::accounting::is_monetary_indicator;

/// Minimum number of points needed to fit a GM(1,1) model.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub key: SeriesKey,
    pub year: Option<i32>,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.year {
            Some(y) => write!(f, "{sev}: {} [{y}]: {}", self.key, self.message),
            None => write!(f, "{sev}: {}: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }
}

fn is_billions_tag(unit: &str) -> bool {
    let u = unit.to_ascii_lowercase();
    u == "usd_bn" || u.contains("billion")
}

/// Checks every panel invariant and reports all violations.
///
/// Errors: non-finite values, non-increasing years, malformed keys or unit
/// tags, unit tags that disagree across series of one indicator, and
/// monetary indicators not tagged in billions of US dollars. Warnings:
/// interior year gaps and series too short for a GM(1,1) fit.
pub fn validate(panel: &Panel) -> ValidationReport {
    let mut issues = Vec::new();
    let mut push = |severity, key: &SeriesKey, year, message: String| {
        issues.push(ValidationIssue {
            severity,
            key: key.clone(),
            year,
            message,
        })
    };

    let mut units: BTreeMap<&str, (&str, SeriesKey)> = BTreeMap::new();
    for series in panel.series() {
        let key = series.key();
        if !is_country_code(series.country()) {
            push(
                Severity::Error,
                &key,
                None,
                format!("country {:?} is not an alpha-3 code", series.country()),
            );
        }
        if series.unit().trim().is_empty() {
            push(Severity::Error, &key, None, "empty unit tag".into());
        } else if is_monetary_indicator(series.indicator()) && !is_billions_tag(series.unit()) {
            push(
                Severity::Error,
                &key,
                None,
                format!(
                    "monetary indicator {} must be in billions of US$, found unit {:?}",
                    series.indicator(),
                    series.unit()
                ),
            );
        }
        match units.get(series.indicator()) {
            Some((unit, first)) if *unit != series.unit() => push(
                Severity::Error,
                &key,
                None,
                format!(
                    "unit mismatch for indicator {}: {:?} here, {:?} in {}",
                    series.indicator(),
                    series.unit(),
                    unit,
                    first
                ),
            ),
            Some(_) => {}
            None => {
                units.insert(series.indicator(), (series.unit(), key.clone()));
            }
        }

        let obs = series.observations();
        if obs.is_empty() {
            push(Severity::Error, &key, None, "series has no observations".into());
            continue;
        }
        for o in obs.iter().filter(|o| !o.value.is_finite()) {
            push(Severity::Error, &key, Some(o.year), "non-finite value".into());
        }
        for pair in obs.windows(2) {
            let (prev, next) = (pair[0].year, pair[1].year);
            if next <= prev {
                push(
                    Severity::Error,
                    &key,
                    Some(next),
                    format!("years not strictly increasing ({prev} then {next})"),
                );
            } else {
                for gap in prev + 1..next {
                    push(
                        Severity::Warning,
                        &key,
                        Some(gap),
                        format!("interior gap at {gap}"),
                    );
                }
            }
        }
        if obs.len() < MIN_FIT_POINTS {
            push(
                Severity::Warning,
                &key,
                None,
                format!(
                    "only {} observations; GM(1,1) needs at least {MIN_FIT_POINTS}",
                    obs.len()
                ),
            );
        }
    }
    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{IndicatorSeries, Observation};

    fn obs(pairs: &[(i32, f64)]) -> Vec<Observation> {
        pairs
            .iter()
            .map(|&(year, value)| Observation { year, value })
            .collect()
    }

    fn full(country: &str, ind: &str, unit: &str) -> IndicatorSeries {
        IndicatorSeries::new(country, ind, unit, (1990..1995).map(|y| (y, y as f64))).unwrap()
    }

    #[test]
    fn clean_panel_has_empty_report() {
        let mut p = Panel::new("t");
        p.insert(full("USA", "GDP", "usd_bn")).unwrap();
        p.insert(full("CHN", "GDP", "usd_bn")).unwrap();
        p.insert(full("CHN", "CPI", "index")).unwrap();
        assert!(validate(&p).is_clean());
    }

    #[test]
    fn interior_gap_is_a_warning() {
        let mut p = Panel::new("t");
        p.insert(
            IndicatorSeries::new("USA", "CPI", "index", [(1990, 1.0), (1992, 2.0), (1993, 2.0), (1994, 2.0)])
                .unwrap(),
        )
        .unwrap();
        let report = validate(&p);
        assert!(!report.has_errors());
        let w: Vec<_> = report.warnings().collect();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].message, "interior gap at 1991");
        assert_eq!(w[0].year, Some(1991));
    }

    #[test]
    fn unit_mismatch_is_an_error() {
        let mut p = Panel::new("t");
        p.insert(full("USA", "GDP", "usd_bn")).unwrap();
        p.insert(full("CHN", "GDP", "usd")).unwrap();
        let report = validate(&p);
        assert!(report
            .errors()
            .any(|i| i.message.starts_with("unit mismatch for indicator GDP")));
    }

    #[test]
    fn short_series_warns() {
        let mut p = Panel::new("t");
        p.insert(IndicatorSeries::new("USA", "CPI", "index", [(1990, 1.0), (1991, 2.0)]).unwrap())
            .unwrap();
        let report = validate(&p);
        assert!(!report.has_errors());
        assert_eq!(report.warnings().count(), 1);
    }

    #[test]
    fn non_finite_and_unordered_years_are_errors() {
        let mut p = Panel::new("t");
        p.upsert(IndicatorSeries::from_parts_unchecked(
            "USA",
            "CPI",
            "index",
            obs(&[(1990, 1.0), (1991, f64::NAN), (1991, 2.0), (1992, 3.0)]),
        ));
        let report = validate(&p);
        let errors: Vec<_> = report.errors().map(|i| i.message.clone()).collect();
        assert!(errors.iter().any(|m| m == "non-finite value"));
        assert!(errors.iter().any(|m| m.contains("not strictly increasing")));
    }

    #[test]
    fn validate_does_not_mutate() {
        let mut p = Panel::new("t");
        p.insert(full("USA", "GDP", "usd")).unwrap();
        let before = p.clone();
        let _ = validate(&p);
        assert_eq!(p, before);
    }
}
