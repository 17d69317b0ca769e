//! Country/indicator time-series panels.
//!
//! An [`IndicatorSeries`] is one (country, indicator) series with a unit tag;
//! a [`Panel`] is a keyed collection of them. Panels are immutable once
//! built and are only handed to the numerical modules after [`validate`]
//! reports no errors.

mod csv_io;
pub mod fetch;
mod json;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use ndarray::{Array2, ArrayView2, Axis, Slice};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, read_csv, write_csv_long, CsvLayout};
pub use json::{load_panel, save_panel, PANEL_SCHEMA_VERSION};
pub use validate::{validate, Severity, ValidationIssue, ValidationReport};

/// One observed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub year: i32,
    pub value: f64,
}

/// Key of a series inside a panel.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SeriesKey {
    pub country: String,
    pub indicator: String,
}

impl SeriesKey {
    pub fn new(country: impl Into<String>, indicator: impl Into<String>) -> Self {
        Self {
            country: country.into(),
            indicator: indicator.into(),
        }
    }
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.country, self.indicator)
    }
}

/// Returns true for an ISO 3166 alpha-3 shaped code (three ASCII capitals).
pub fn is_country_code(code: &str) -> bool {
    code.len() == 3 && code.bytes().all(|b| b.is_ascii_uppercase())
}

/// A single (country, indicator) time series.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    country: String,
    indicator: String,
    unit: String,
    observations: Vec<Observation>,
}

impl IndicatorSeries {
    /// Builds a series, sorting observations by year.
    ///
    /// Rejects duplicate years, non-finite values, an empty unit tag and
    /// country codes that are not alpha-3 shaped.
    pub fn new(
        country: impl Into<String>,
        indicator: impl Into<String>,
        unit: impl Into<String>,
        observations: impl IntoIterator<Item = (i32, f64)>,
    ) -> Result<Self> {
        let mut obs: Vec<Observation> = observations
            .into_iter()
            .map(|(year, value)| Observation { year, value })
            .collect();
        obs.sort_by_key(|o| o.year);
        let series = Self {
            country: country.into(),
            indicator: indicator.into(),
            unit: unit.into(),
            observations: obs,
        };
        series.check()?;
        Ok(series)
    }

    /// Builds a series exactly as given, without checking any invariant.
    ///
    /// Intended for data that will go through [`validate`] before use.
    pub fn from_parts_unchecked(
        country: impl Into<String>,
        indicator: impl Into<String>,
        unit: impl Into<String>,
        observations: Vec<Observation>,
    ) -> Self {
        Self {
            country: country.into(),
            indicator: indicator.into(),
            unit: unit.into(),
            observations,
        }
    }

    fn check(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidSeries {
            key: self.key().to_string(),
            reason,
        };
        if !is_country_code(&self.country) {
            return Err(invalid(format!(
                "country {:?} is not an alpha-3 code",
                self.country
            )));
        }
        if self.indicator.trim().is_empty() {
            return Err(invalid("empty indicator".into()));
        }
        if self.unit.trim().is_empty() {
            return Err(invalid("empty unit tag".into()));
        }
        for pair in self.observations.windows(2) {
            if pair[1].year <= pair[0].year {
                return Err(invalid(format!("duplicate year {}", pair[1].year)));
            }
        }
        if let Some(o) = self.observations.iter().find(|o| !o.value.is_finite()) {
            return Err(invalid(format!("non-finite value in {}", o.year)));
        }
        Ok(())
    }

    pub fn country(&self) -> &str {
        &self.country
    }

    pub fn indicator(&self) -> &str {
        &self.indicator
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn key(&self) -> SeriesKey {
        SeriesKey::new(self.country.clone(), self.indicator.clone())
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn years(&self) -> Vec<i32> {
        self.observations.iter().map(|o| o.year).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    pub fn first_year(&self) -> Option<i32> {
        self.observations.first().map(|o| o.year)
    }

    pub fn last_year(&self) -> Option<i32> {
        self.observations.last().map(|o| o.year)
    }

    /// Value observed in `year`, if any.
    pub fn get(&self, year: i32) -> Option<f64> {
        self.observations
            .binary_search_by_key(&year, |o| o.year)
            .ok()
            .map(|i| self.observations[i].value)
    }

    /// Restricts the series to `years`.
    pub fn window(&self, years: &RangeInclusive<i32>) -> Self {
        Self {
            observations: self
                .observations
                .iter()
                .filter(|o| years.contains(&o.year))
                .copied()
                .collect(),
            ..self.clone()
        }
    }

    /// Returns an error naming the first missing year if the years are not
    /// consecutive.
    pub fn require_consecutive(&self) -> Result<()> {
        for pair in self.observations.windows(2) {
            if pair[1].year != pair[0].year + 1 {
                return Err(Error::YearGap {
                    key: self.key().to_string(),
                    year: pair[0].year + 1,
                });
            }
        }
        Ok(())
    }

    pub fn with_indicator(mut self, indicator: impl Into<String>) -> Self {
        self.indicator = indicator.into();
        self
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = unit.into();
        self
    }

    /// Applies `f` to every value. The caller keeps values finite.
    pub fn map_values(mut self, f: impl Fn(f64) -> f64) -> Self {
        for o in &mut self.observations {
            o.value = f(o.value);
        }
        self
    }
}

/// Gap policy for [`fill_gaps`] and [`Panel::align`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapPolicy {
    #[default]
    None,
    LinearInterior,
}

/// Fills interior missing years by linear interpolation.
///
/// Only years strictly between two observed years are filled; the series is
/// never extended beyond its first or last observation.
pub fn fill_gaps(series: &IndicatorSeries, policy: GapPolicy) -> IndicatorSeries {
    match policy {
        GapPolicy::None => series.clone(),
        GapPolicy::LinearInterior => {
            let mut filled = Vec::with_capacity(series.len());
            for pair in series.observations.windows(2) {
                let (lo, hi) = (pair[0], pair[1]);
                filled.push(lo);
                let span = (hi.year - lo.year) as f64;
                for year in lo.year + 1..hi.year {
                    let t = (year - lo.year) as f64 / span;
                    filled.push(Observation {
                        year,
                        value: lo.value + t * (hi.value - lo.value),
                    });
                }
            }
            if let Some(last) = series.observations.last() {
                filled.push(*last);
            }
            IndicatorSeries {
                observations: filled,
                ..series.clone()
            }
        }
    }
}

/// A rectangular year × series block extracted from a panel.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedMatrix {
    pub years: Vec<i32>,
    pub keys: Vec<SeriesKey>,
    /// One row per year, one column per key.
    pub values: Array2<f64>,
}

impl AlignedMatrix {
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.values.column(index).to_vec()
    }

    /// Columns `from..`, e.g. the children after a leading parent column.
    pub fn columns_from(&self, from: usize) -> ArrayView2<'_, f64> {
        self.values.slice_axis(Axis(1), Slice::from(from..))
    }
}

/// A validated collection of indicator series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    provenance: String,
    series: BTreeMap<SeriesKey, IndicatorSeries>,
}

impl Panel {
    pub fn new(provenance: impl Into<String>) -> Self {
        Self {
            provenance: provenance.into(),
            series: BTreeMap::new(),
        }
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Adds a series; a second series under the same key is an error.
    pub fn insert(&mut self, series: IndicatorSeries) -> Result<()> {
        let key = series.key();
        if self.series.contains_key(&key) {
            return Err(Error::DuplicateSeries(key.to_string()));
        }
        self.series.insert(key, series);
        Ok(())
    }

    /// Adds or replaces a series.
    pub fn upsert(&mut self, series: IndicatorSeries) {
        self.series.insert(series.key(), series);
    }

    pub fn get(&self, country: &str, indicator: &str) -> Option<&IndicatorSeries> {
        self.series
            .get(&SeriesKey::new(country.to_string(), indicator.to_string()))
    }

    pub fn require(&self, country: &str, indicator: &str) -> Result<&IndicatorSeries> {
        self.get(country, indicator)
            .ok_or_else(|| Error::MissingSeries {
                country: country.to_string(),
                indicator: indicator.to_string(),
            })
    }

    /// Series in key order.
    pub fn series(&self) -> impl Iterator<Item = &IndicatorSeries> {
        self.series.values()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Distinct countries in sorted order.
    pub fn countries(&self) -> Vec<String> {
        let mut out: Vec<String> = self.series.keys().map(|k| k.country.clone()).collect();
        out.dedup();
        out
    }

    pub fn has_country(&self, country: &str) -> bool {
        self.series.keys().any(|k| k.country == country)
    }

    /// Smallest and largest year over all series.
    pub fn year_span(&self) -> Option<(i32, i32)> {
        let firsts = self.series.values().filter_map(|s| s.first_year());
        let lasts = self.series.values().filter_map(|s| s.last_year());
        Some((firsts.min()?, lasts.max()?))
    }

    /// Errors unless [`validate`] reports no error-level issue.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        let errors: Vec<_> = report.errors().collect();
        match errors.first() {
            None => Ok(()),
            Some(first) => Err(Error::InvalidPanel {
                count: errors.len(),
                first: first.to_string(),
            }),
        }
    }

    /// Extracts a year × key matrix, columns in request order.
    pub fn align(
        &self,
        keys: &[SeriesKey],
        years: RangeInclusive<i32>,
        gaps: GapPolicy,
    ) -> Result<AlignedMatrix> {
        self.ensure_valid()?;
        if years.is_empty() {
            return Err(Error::InvalidOption("empty year range".into()));
        }
        let year_list: Vec<i32> = years.clone().collect();
        let mut values = Array2::zeros((year_list.len(), keys.len()));
        for (col, key) in keys.iter().enumerate() {
            let series = fill_gaps(self.require(&key.country, &key.indicator)?, gaps);
            for (row, &year) in year_list.iter().enumerate() {
                values[[row, col]] = series.get(year).ok_or_else(|| Error::MissingCell {
                    country: key.country.clone(),
                    indicator: key.indicator.clone(),
                    year,
                })?;
            }
        }
        Ok(AlignedMatrix {
            years: year_list,
            keys: keys.to_vec(),
            values,
        })
    }
}
