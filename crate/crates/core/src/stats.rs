//! Least-squares lines, Pearson correlation and the climate impact metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::{IndicatorSeries, Observation};

/// Goodness of fit of an estimated line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitQuality {
    pub r_squared: f64,
    pub n_points: usize,
}

/// `y = slope·x + intercept`.
///
/// `fit` is present when the line was estimated from data and absent for
/// fixed, published coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub slope: f64,
    pub intercept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitQuality>,
}

impl LinearModel {
    pub fn fixed(slope: f64, intercept: f64) -> Self {
        Self {
            slope,
            intercept,
            fit: None,
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn all_equal(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} values, y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    Ok(())
}

/// Closed-form ordinary least squares line through `(x, y)`.
///
/// `r_squared = 1 - SSE/SST`, defined as 1 when `y` is constant.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<LinearModel> {
    check_pair(x, y)?;
    if all_equal(x) {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    let n = x.len();
    if all_equal(y) {
        return Ok(LinearModel {
            slope: 0.0,
            intercept: y[0],
            fit: Some(FitQuality {
                r_squared: 1.0,
                n_points: n,
            }),
        });
    }
    let (xm, ym) = (mean(x), mean(y));
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - xm, yi - ym);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    let r_squared = (1.0 - sse / syy).clamp(0.0, 1.0);
    Ok(LinearModel {
        slope,
        intercept,
        fit: Some(FitQuality {
            r_squared,
            n_points: n,
        }),
    })
}

pub fn apply_linear(model: &LinearModel, x: f64) -> f64 {
    model.slope * x + model.intercept
}

/// Sample Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    if all_equal(x) || all_equal(y) {
        return Err(Error::Degenerate("zero-variance input".into()));
    }
    let (xm, ym) = (mean(x), mean(y));
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - xm, yi - ym);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero-variance input".into()));
    }
    // sqrt of the rounded product is exact when sxx == syy, so r(x, ±x) = ±1.
    let product = sxx * syy;
    let denom = if product.is_finite() && product > 0.0 {
        product.sqrt()
    } else {
        sxx.sqrt() * syy.sqrt()
    };
    Ok((sxy / denom).clamp(-1.0, 1.0))
}

/// How trend correlations are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendMode {
    /// Correlate the level series.
    #[default]
    Levels,
    /// Correlate year-over-year first differences.
    Differences,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendCorrelation {
    pub r: f64,
    pub mode: TrendMode,
    pub years: Vec<i32>,
}

/// Pearson correlation of two series over their common years.
///
/// In [`TrendMode::Differences`] the common years must be consecutive.
pub fn trend_correlation(
    x: &IndicatorSeries,
    y: &IndicatorSeries,
    mode: TrendMode,
) -> Result<TrendCorrelation> {
    let years: Vec<i32> = x.years().into_iter().filter(|&yr| y.get(yr).is_some()).collect();
    let xs: Vec<f64> = years.iter().filter_map(|&yr| x.get(yr)).collect();
    let ys: Vec<f64> = years.iter().filter_map(|&yr| y.get(yr)).collect();
    let r = match mode {
        TrendMode::Levels => pearson(&xs, &ys)?,
        TrendMode::Differences => {
            if let Some(w) = years.windows(2).find(|w| w[1] != w[0] + 1) {
                return Err(Error::YearGap {
                    key: format!("{} ∩ {}", x.key(), y.key()),
                    year: w[0] + 1,
                });
            }
            let dx: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
            let dy: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
            pearson(&dx, &dy)?
        }
    };
    Ok(TrendCorrelation { r, mode, years })
}

/// Percent changes `100·(v(k) - v(k-1)) / v(k-1)` of a bare sequence.
pub fn pct_change_values(values: &[f64]) -> Result<Vec<f64>> {
    values
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            if w[0] == 0.0 {
                Err(Error::ZeroValue { index: i })
            } else {
                Ok(100.0 * (w[1] - w[0]) / w[0])
            }
        })
        .collect()
}

/// Year-over-year percent changes, indexed by the later year.
pub fn pct_change(series: &IndicatorSeries) -> Result<IndicatorSeries> {
    series.require_consecutive()?;
    let changes = pct_change_values(&series.values())?;
    let years = series.years();
    let obs = years[1..]
        .iter()
        .zip(changes)
        .map(|(&year, value)| Observation { year, value })
        .collect();
    Ok(IndicatorSeries::from_parts_unchecked(
        series.country(),
        series.indicator(),
        "percent change",
        obs,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactScore {
    pub series_label: String,
    pub pct_changes: Vec<Observation>,
    /// Mean absolute percent change; closer to zero means a steadier series.
    pub mean_abs_pct_change: f64,
}

pub fn climate_impact_score(series: &IndicatorSeries) -> Result<ImpactScore> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    let changes = pct_change(series)?;
    let abs_sum: f64 = changes.observations().iter().map(|o| o.value.abs()).sum();
    Ok(ImpactScore {
        series_label: series.key().to_string(),
        mean_abs_pct_change: abs_sum / changes.len() as f64,
        pct_changes: changes.observations().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.5, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let m = ols_fit(&x, &y).unwrap();
        assert_abs_diff_eq!(m.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.intercept, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.fit.unwrap().r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_y_line() {
        let m = ols_fit(&[1.0, 2.0, 3.0], &[0.1, 0.1, 0.1]).unwrap();
        assert_eq!((m.slope, m.intercept), (0.0, 0.1));
        assert_eq!(m.fit.unwrap().r_squared, 1.0);
    }

    #[test]
    fn degenerate_x_rejected() {
        assert!(matches!(ols_fit(&[2.0, 2.0], &[1.0, 3.0]), Err(Error::Degenerate(_))));
        assert!(ols_fit(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn published_bridge_values() {
        let epcl = LinearModel::fixed(0.1009, 932.2);
        let epdl = LinearModel::fixed(0.07316, 1179.0);
        assert_eq!(apply_linear(&epcl, 0.0), 932.2);
        assert_abs_diff_eq!(apply_linear(&epdl, 1000.0), 1252.16, epsilon = 1e-9);
        assert_eq!(apply_linear(&LinearModel::fixed(1.0, 0.0), 42.5), 42.5);
    }

    #[test]
    fn pearson_identities() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(pearson(&x, &x).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&x, &neg).unwrap(), -1.0, epsilon = 1e-15);
        assert!(pearson(&x, &[1.0; 5]).is_err());
    }

    #[test]
    fn pct_change_examples() {
        assert_eq!(pct_change_values(&[100.0, 102.0]).unwrap(), vec![2.0]);
        assert_eq!(pct_change_values(&[5.0, 5.0, 5.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(
            pct_change_values(&[100.0, 50.0, 100.0]).unwrap(),
            vec![-50.0, 100.0]
        );
        assert!(matches!(
            pct_change_values(&[1.0, 0.0, 1.0]),
            Err(Error::ZeroValue { index: 1 })
        ));
    }

    fn series(vals: &[f64]) -> IndicatorSeries {
        IndicatorSeries::new(
            "DEU",
            "SURFACE_TEMP",
            "c",
            vals.iter().enumerate().map(|(i, &v)| (1990 + i as i32, v)),
        )
        .unwrap()
    }

    #[test]
    fn impact_scores() {
        assert_eq!(
            climate_impact_score(&series(&[3.0, 3.0, 3.0]))
                .unwrap()
                .mean_abs_pct_change,
            0.0
        );
        let s = climate_impact_score(&series(&[100.0, 102.0, 100.0])).unwrap();
        assert_abs_diff_eq!(s.mean_abs_pct_change, 1.9804, epsilon = 1e-4);
        assert_eq!(s.pct_changes[0].year, 1991);
        assert!(climate_impact_score(&series(&[1.0])).is_err());
    }

    #[test]
    fn pct_change_rejects_gaps() {
        let s = IndicatorSeries::new("DEU", "X", "c", [(1990, 1.0), (1992, 2.0)]).unwrap();
        assert!(matches!(pct_change(&s), Err(Error::YearGap { year: 1991, .. })));
    }

    #[test]
    fn trend_modes() {
        let a = series(&[1.0, 2.0, 4.0, 7.0]);
        let b = series(&[2.0, 4.0, 8.0, 14.0]);
        let lv = trend_correlation(&a, &b, TrendMode::Levels).unwrap();
        assert_abs_diff_eq!(lv.r, 1.0, epsilon = 1e-12);
        let d = trend_correlation(&a, &b, TrendMode::Differences).unwrap();
        assert_abs_diff_eq!(d.r, 1.0, epsilon = 1e-12);
        assert_eq!(d.years.len(), 4);
    }
}
