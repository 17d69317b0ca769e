//! GM(1,1) grey forecasting.
//!
//! The model treats the accumulated series `x1 = AGO(x0)` as the solution of
//! the whitening equation `dx1/dt + a·x1 = u`. Parameters come from the
//! least-squares fit of `x0(k) = -a·z(k) + u` for `k = 2..n`, where
//! `z(k) = (x1(k) + x1(k-1)) / 2` is the background value. The time
//! response
//!
//! ```text
//! x1^(k+1) = (x1(1) - u/a)·exp(-a·k) + u/a
//! ```
//!
//! is restored to the original scale with the inverse accumulation (IAGO).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::IndicatorSeries;

/// Minimum sample length accepted by [`fit_gm11`].
pub const MIN_POINTS: usize = 4;
/// Forecast horizon used when none is configured.
pub const DEFAULT_HORIZON: usize = 10;
/// Below this magnitude the development coefficient is treated as zero.
const DEGENERATE_A: f64 = 1e-12;

/// Accumulated generating operation: running sum.
pub fn ago(series: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    series
        .iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect()
}

/// Inverse accumulation: first value kept, then first differences.
pub fn iago(series: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(series.len());
    if let Some(&first) = series.first() {
        out.push(first);
    }
    out.extend(series.windows(2).map(|w| w[1] - w[0]));
    out
}

/// Background values `z(k) = (x1(k) + x1(k-1)) / 2` for `k = 2..n`.
pub fn background_values(accumulated: &[f64]) -> Vec<f64> {
    accumulated.windows(2).map(|w| (w[1] + w[0]) / 2.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyClass {
    Excellent,
    Good,
    Qualified,
    Weak,
    Unqualified,
}

impl AccuracyClass {
    /// Grade of a mean relative residual; class upper bounds are inclusive.
    pub fn from_q(q: f64) -> Self {
        if q <= 0.01 {
            Self::Excellent
        } else if q <= 0.05 {
            Self::Good
        } else if q <= 0.10 {
            Self::Qualified
        } else if q <= 0.20 {
            Self::Weak
        } else {
            Self::Unqualified
        }
    }
}

/// What to do with series containing non-positive values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftPolicy {
    #[default]
    Reject,
    /// Add a constant so the minimum becomes 1, fit, then subtract it again.
    /// Only applied when the series has a non-positive value.
    ShiftToOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gm11Model {
    /// Development coefficient.
    pub a: f64,
    /// Grey action quantity.
    pub u: f64,
    /// First original observation; every restoration starts here.
    pub x0_first: f64,
    pub n: usize,
    /// Restored in-sample values; `fitted[0] == x0_first`.
    pub fitted: Vec<f64>,
    /// Mean relative residual on the scale the model was fitted on.
    pub residual_q: f64,
    pub accuracy_class: AccuracyClass,
    /// Constant added before fitting (0 when none).
    pub shift: f64,
    /// Calendar year of the first sample point, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub model: Gm11Model,
    pub horizon: usize,
    pub values: Vec<f64>,
    /// Calendar years of `values`, or 1-based sample positions `n+1..`
    /// when the model has no start year.
    pub years: Vec<i32>,
}

/// Solves the 2×2 normal equations of `x0(k) = -a·z(k) + u` in closed form.
fn estimate(x0: &[f64]) -> Result<(f64, f64)> {
    let z = background_values(&ago(x0));
    let y = &x0[1..];
    let m = z.len() as f64;
    let z_mean = z.iter().sum::<f64>() / m;
    let y_mean = y.iter().sum::<f64>() / m;
    let mut szz = 0.0;
    let mut szy = 0.0;
    for (&zk, &yk) in z.iter().zip(y) {
        let dz = zk - z_mean;
        szz += dz * dz;
        szy += dz * (yk - y_mean);
    }
    if szz == 0.0 || !szz.is_finite() {
        return Err(Error::Singular("background values have no spread".into()));
    }
    let a = -szy / szz;
    let u = y_mean + a * z_mean;
    Ok((a, u))
}

/// Residuals `x0(k) - (-a·z(k) + u)` of the grey difference equation for
/// `k = 2..n`, on the scale the model was fitted on.
pub fn regression_residuals(model: &Gm11Model, series: &[f64]) -> Vec<f64> {
    let working: Vec<f64> = series.iter().map(|v| v + model.shift).collect();
    let z = background_values(&ago(&working));
    working[1..]
        .iter()
        .zip(z)
        .map(|(&x, zk)| x - (-model.a * zk + model.u))
        .collect()
}

/// Restored value at 0-based step `k >= 1` on the working scale.
///
/// Equal to the difference of consecutive accumulated responses
/// `(x1(1) - u/a)·e^{-ak} + u/a`, written as
/// `(a·x1(1) - u)·(e^{-a} - 1)/a·e^{-a(k-1)}` so that no two large
/// accumulated values are subtracted. For `|a| < 1e-12` the limit is `u`.
fn restored_at(x1_first: f64, a: f64, u: f64, k: usize) -> f64 {
    if a.abs() < DEGENERATE_A {
        return u;
    }
    (a * x1_first - u) * ((-a).exp_m1() / a) * (-a * (k - 1) as f64).exp()
}

/// Restored values for the first `len` periods on the original scale.
fn restore(model: &Gm11Model, len: usize) -> Vec<f64> {
    let x1_first = model.x0_first + model.shift;
    let mut out: Vec<f64> = (0..len)
        .map(|k| match k {
            0 => model.x0_first,
            _ => restored_at(x1_first, model.a, model.u, k) - model.shift,
        })
        .collect();
    if let Some(first) = out.first_mut() {
        *first = model.x0_first;
    }
    out
}

fn mean_relative_residual(original: &[f64], fitted: &[f64]) -> Result<f64> {
    if original.len() != fitted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} original values vs {} fitted",
            original.len(),
            fitted.len()
        )));
    }
    if original.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let mut total = 0.0;
    for (index, (&o, &f)) in original.iter().zip(fitted).enumerate() {
        if o == 0.0 {
            return Err(Error::ZeroValue { index });
        }
        total += ((o - f) / o).abs();
    }
    Ok(total / original.len() as f64)
}

/// Fits a GM(1,1) model to a strictly positive series of at least four points.
pub fn fit_gm11(series: &[f64]) -> Result<Gm11Model> {
    fit_gm11_with(series, ShiftPolicy::Reject)
}

pub fn fit_gm11_with(series: &[f64], policy: ShiftPolicy) -> Result<Gm11Model> {
    if series.len() < MIN_POINTS {
        return Err(Error::TooShort {
            needed: MIN_POINTS,
            got: series.len(),
        });
    }
    if let Some(index) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite value at index {index}")));
    }
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = match (policy, min > 0.0) {
        (_, true) => 0.0,
        (ShiftPolicy::ShiftToOne, false) => 1.0 - min,
        (ShiftPolicy::Reject, false) => {
            let index = series.iter().position(|&v| v <= 0.0).unwrap_or(0);
            return Err(Error::NonPositiveValue {
                index,
                value: series[index],
            });
        }
    };
    let working: Vec<f64> = series.iter().map(|v| v + shift).collect();
    let (a, u) = estimate(&working)?;

    let mut model = Gm11Model {
        a,
        u,
        x0_first: series[0],
        n: series.len(),
        fitted: Vec::new(),
        residual_q: 0.0,
        accuracy_class: AccuracyClass::Excellent,
        shift,
        start_year: None,
    };
    model.fitted = restore(&model, series.len());
    let fitted_working: Vec<f64> = model.fitted.iter().map(|v| v + shift).collect();
    let q = mean_relative_residual(&working, &fitted_working)?;
    model.residual_q = q;
    model.accuracy_class = AccuracyClass::from_q(q);
    Ok(model)
}

/// Fits a model to an indicator series with consecutive years.
pub fn fit_series(series: &IndicatorSeries, policy: ShiftPolicy) -> Result<Gm11Model> {
    series.require_consecutive()?;
    let mut model = fit_gm11_with(&series.values(), policy)?;
    model.start_year = series.first_year();
    Ok(model)
}

/// Extends a fitted model `horizon` steps past the sample.
pub fn predict(model: &Gm11Model, horizon: usize) -> ForecastResult {
    let all = restore(model, model.n + horizon);
    let values = all[model.n..].to_vec();
    let (n, h) = (model.n as i32, horizon as i32);
    let years = match model.start_year {
        Some(start) => (0..h).map(|i| start + n + i).collect(),
        None => (1..=h).map(|i| n + i).collect(),
    };
    ForecastResult {
        model: model.clone(),
        horizon,
        values,
        years,
    }
}

/// Relative residual test of `model.fitted` against `original`.
pub fn q_test(model: &Gm11Model, original: &[f64]) -> Result<(f64, AccuracyClass)> {
    let q = mean_relative_residual(original, &model.fitted)?;
    Ok((q, AccuracyClass::from_q(q)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// `x0(k) / x1(k-1)` exceeds 0.5 at 1-based index `index`.
    Smoothness { index: usize, ratio: f64 },
    /// `|a| >= 2`: the model is not usable for forecasting.
    UnstableDevelopment { a: f64 },
    /// `|a| >= 0.3`: long-horizon forecasts deserve caution.
    LongHorizonCaution { a: f64 },
}

impl Diagnostic {
    pub fn message(&self) -> String {
        match self {
            Self::Smoothness { index, ratio } => format!(
                "smoothness ratio {ratio:.4} at point {index} exceeds 0.5"
            ),
            Self::UnstableDevelopment { a } => {
                format!("development coefficient {a:.4} has |a| >= 2; forecast unreliable")
            }
            Self::LongHorizonCaution { a } => format!(
                "development coefficient {a:.4} has |a| >= 0.3; use short horizons only"
            ),
        }
    }
}

/// First 1-based index whose smoothness ratio is checked.
const SMOOTHNESS_FROM: usize = 4;

/// Non-blocking checks on whether GM(1,1) suits the series.
pub fn check_applicability(series: &[f64]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let acc = ago(series);
    for k in SMOOTHNESS_FROM..=series.len() {
        let prev = acc[k - 2];
        if prev == 0.0 {
            continue;
        }
        let ratio = series[k - 1] / prev;
        if ratio > 0.5 {
            out.push(Diagnostic::Smoothness { index: k, ratio });
        }
    }
    if let Ok(model) = fit_gm11(series) {
        if model.a.abs() >= 2.0 {
            out.push(Diagnostic::UnstableDevelopment { a: model.a });
        } else if model.a.abs() >= 0.3 {
            out.push(Diagnostic::LongHorizonCaution { a: model.a });
        }
    }
    out
}
