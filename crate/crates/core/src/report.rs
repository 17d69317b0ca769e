//! The run report written as `report.json`.
//!
//! The layout is described by `schema/report.schema.json` at the repository
//! root; bump [`REPORT_SCHEMA_VERSION`] on any incompatible change.

use serde::Serialize;
use serde_json::Value;

use crate::accounting::GgdpAccount;
use crate::error::Result;
use crate::gm11::{check_applicability, AccuracyClass, Diagnostic, ForecastResult};
use crate::grey_relational::{GraOptions, GreyRelationalResult, RankedChild};
use crate::numfmt::to_json_string;
use crate::panel::Observation;
use crate::stats::{ImpactScore, TrendCorrelation, TrendMode};
use crate::warning::{Module, Warning};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    /// RFC 3339 UTC time of the run; the only nondeterministic field.
    pub timestamp: String,
    pub tool_version: String,
    pub command: String,
    /// Effective configuration after flag overrides.
    pub config: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraEntry {
    pub country: String,
    pub parent: String,
    pub options: GraOptions,
    pub years: Vec<i32>,
    pub a: f64,
    pub b: f64,
    /// Children by descending grade.
    pub ranking: Vec<RankedChild>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<f64>>>,
}

impl GraEntry {
    pub fn new(country: &str, result: &GreyRelationalResult, full: bool) -> Self {
        Self {
            country: country.to_string(),
            parent: result.parent_label.clone(),
            options: result.options,
            years: result.years.clone(),
            a: result.a,
            b: result.b,
            ranking: result.ranking.clone(),
            coefficients: full.then(|| {
                result
                    .coefficients
                    .outer_iter()
                    .map(|r| r.to_vec())
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticEntry {
    pub kind: String,
    pub message: String,
}

impl From<&Diagnostic> for DiagnosticEntry {
    fn from(d: &Diagnostic) -> Self {
        let kind = match d {
            Diagnostic::Smoothness { .. } => "smoothness",
            Diagnostic::UnstableDevelopment { .. } => "unstable_development",
            Diagnostic::LongHorizonCaution { .. } => "long_horizon_caution",
        };
        Self {
            kind: kind.into(),
            message: d.message(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastEntry {
    pub country: String,
    pub indicator: String,
    pub a: f64,
    pub u: f64,
    pub shift: f64,
    pub q: f64,
    pub accuracy_class: AccuracyClass,
    pub fitted: Vec<Observation>,
    pub forecast: Vec<Observation>,
    pub diagnostics: Vec<DiagnosticEntry>,
}

impl ForecastEntry {
    /// `observed` is the sample the model was fitted on.
    pub fn new(country: &str, indicator: &str, observed: &[Observation], result: &ForecastResult) -> Self {
        let m = &result.model;
        let values: Vec<f64> = observed.iter().map(|o| o.value).collect();
        let fitted = observed
            .iter()
            .zip(&m.fitted)
            .map(|(o, &value)| Observation { year: o.year, value })
            .collect();
        let forecast = result
            .years
            .iter()
            .zip(&result.values)
            .map(|(&year, &value)| Observation { year, value })
            .collect();
        Self {
            country: country.to_string(),
            indicator: indicator.to_string(),
            a: m.a,
            u: m.u,
            shift: m.shift,
            q: m.residual_q,
            accuracy_class: m.accuracy_class,
            fitted,
            forecast,
            diagnostics: check_applicability(&values).iter().map(Into::into).collect(),
        }
    }

    pub fn warnings(&self) -> Vec<Warning> {
        self.diagnostics
            .iter()
            .map(|d| {
                Warning::new(Module::Gm11Forecast, &d.kind, &d.message)
                    .for_country(&self.country)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationEntry {
    pub country: String,
    pub x: String,
    pub y: String,
    pub mode: TrendMode,
    pub r: f64,
    pub n: usize,
}

impl CorrelationEntry {
    pub fn new(country: &str, x: &str, y: &str, c: &TrendCorrelation) -> Self {
        Self {
            country: country.to_string(),
            x: x.to_string(),
            y: y.to_string(),
            mode: c.mode,
            r: c.r,
            n: c.years.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub run: RunMeta,
    pub accounts: Vec<GgdpAccount>,
    pub gra: Vec<GraEntry>,
    pub forecasts: Vec<ForecastEntry>,
    pub impact: Vec<ImpactScore>,
    pub correlations: Vec<CorrelationEntry>,
    pub warnings: Vec<Warning>,
}

impl Report {
    pub fn new(run: RunMeta) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            run,
            accounts: Vec::new(),
            gra: Vec::new(),
            forecasts: Vec::new(),
            impact: Vec::new(),
            correlations: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Adds an account and lifts its warnings into the report list.
    pub fn add_account(&mut self, account: GgdpAccount) {
        self.warnings.extend(account.warnings.iter().cloned());
        self.accounts.push(account);
    }

    pub fn add_forecast(&mut self, entry: ForecastEntry) {
        self.warnings.extend(entry.warnings());
        self.forecasts.push(entry);
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}
