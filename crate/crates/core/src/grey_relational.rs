//! Deng-style grey relational analysis.
//!
//! Given a parent (reference) sequence `x0` and child sequences `x1..xm`
//! observed over the same `n` periods:
//!
//! 1. optionally divide every column by its mean to remove magnitude,
//! 2. take the global two-pole extremes `a = min |x0(k) - xi(k)|` and
//!    `b = max |x0(k) - xi(k)|` over all children and periods,
//! 3. compute the grey coefficient `(a + ρb) / (|x0(k) - xi(k)| + ρb)`,
//! 4. average each child's coefficients over time to get its grade.
//!
//! When `b = 0` every child coincides with the parent and all coefficients
//! are defined as 1.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::panel::IndicatorSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct GraOptions {
    /// Resolution coefficient, in (0, 1].
    pub rho: f64,
    /// Divide each column by its mean before comparing.
    pub normalize: bool,
}

impl Default for GraOptions {
    fn default() -> Self {
        Self {
            rho: 0.5,
            normalize: true,
        }
    }
}

impl GraOptions {
    pub fn validate(&self) -> Result<()> {
        if self.rho > 0.0 && self.rho <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidOption(format!(
                "resolution coefficient rho must be in (0, 1], got {}",
                self.rho
            )))
        }
    }
}

/// A child and its grade, as listed in a ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedChild {
    pub label: String,
    pub grade: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreyRelationalResult {
    pub parent_label: String,
    pub child_labels: Vec<String>,
    /// Calendar years of the rows, empty when built from a bare matrix.
    pub years: Vec<i32>,
    pub options: GraOptions,
    pub normalized_parent: Vec<f64>,
    #[serde(serialize_with = "rows")]
    pub normalized_children: Array2<f64>,
    /// Global two-pole minimum difference.
    pub a: f64,
    /// Global two-pole maximum difference.
    pub b: f64,
    #[serde(serialize_with = "rows")]
    pub coefficients: Array2<f64>,
    pub grades: Vec<f64>,
    /// Children by descending grade; ties keep input order.
    pub ranking: Vec<RankedChild>,
}

fn rows<S: Serializer>(m: &Array2<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.outer_iter().map(|r| r.to_vec()).collect();
    rows.serialize(s)
}

/// Divides each column by its arithmetic mean.
///
/// A column whose mean is zero (relative to its magnitude) cannot be
/// normalized; the error names its index.
pub fn normalize_columns(matrix: ArrayView2<f64>) -> Result<Array2<f64>> {
    let (n, _) = matrix.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch("matrix has no rows".into()));
    }
    let mut out = matrix.to_owned();
    for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
        let mean = col.sum() / n as f64;
        let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if mean == 0.0 || mean.abs() <= scale * f64::EPSILON * n as f64 || !mean.is_finite() {
            return Err(Error::ZeroMeanColumn {
                column: j.to_string(),
            });
        }
        col.mapv_inplace(|v| v / mean);
    }
    Ok(out)
}

fn check_dims(parent: ArrayView1<f64>, children: ArrayView2<f64>) -> Result<()> {
    let (n, m) = children.dim();
    if parent.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "parent has {} rows, children have {n}",
            parent.len()
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::DimensionMismatch(format!(
            "need at least one row and one child, got {n}x{m}"
        )));
    }
    Ok(())
}

/// Global minimum and maximum of `|parent(k) - child_i(k)|`.
pub fn two_pole_extremes(parent: ArrayView1<f64>, children: ArrayView2<f64>) -> Result<(f64, f64)> {
    check_dims(parent, children)?;
    let mut a = f64::INFINITY;
    let mut b = f64::NEG_INFINITY;
    for (row, &p) in children.outer_iter().zip(parent.iter()) {
        for &c in row.iter() {
            let d = (p - c).abs();
            a = a.min(d);
            b = b.max(d);
        }
    }
    Ok((a, b))
}

/// Grey coefficient matrix, one row per period and one column per child.
pub fn grey_coefficients(
    parent: ArrayView1<f64>,
    children: ArrayView2<f64>,
    rho: f64,
) -> Result<Array2<f64>> {
    GraOptions {
        rho,
        normalize: false,
    }
    .validate()?;
    let (a, b) = two_pole_extremes(parent, children)?;
    Ok(coefficients_from_extremes(parent, children, a, b, rho))
}

fn coefficients_from_extremes(
    parent: ArrayView1<f64>,
    children: ArrayView2<f64>,
    a: f64,
    b: f64,
    rho: f64,
) -> Array2<f64> {
    let mut out = Array2::ones(children.dim());
    if b == 0.0 {
        return out;
    }
    let numerator = a + rho * b;
    for ((k, i), cell) in out.indexed_iter_mut() {
        let delta = (parent[k] - children[[k, i]]).abs();
        *cell = numerator / (delta + rho * b);
    }
    out
}

/// Column means of the coefficient matrix.
pub fn grey_grades(coefficients: ArrayView2<f64>) -> Result<Vec<f64>> {
    let n = coefficients.nrows();
    if n == 0 {
        return Err(Error::DimensionMismatch("coefficient matrix has no rows".into()));
    }
    Ok(coefficients
        .axis_iter(Axis(1))
        .map(|col| col.sum() / n as f64)
        .collect())
}

/// Ranks children by descending grade with a stable tie order.
pub fn rank(labels: &[String], grades: &[f64]) -> Vec<RankedChild> {
    let mut order: Vec<usize> = (0..grades.len()).collect();
    order.sort_by(|&x, &y| grades[y].total_cmp(&grades[x]));
    order
        .into_iter()
        .map(|i| RankedChild {
            label: labels[i].clone(),
            grade: grades[i],
        })
        .collect()
}

/// Full analysis on a parent column and an `n × m` child matrix.
pub fn gra_matrix(
    parent_label: &str,
    parent: &[f64],
    child_labels: &[String],
    children: ArrayView2<f64>,
    options: GraOptions,
) -> Result<GreyRelationalResult> {
    options.validate()?;
    let parent = ArrayView1::from(parent);
    check_dims(parent, children)?;
    if child_labels.len() != children.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} children",
            child_labels.len(),
            children.ncols()
        )));
    }

    let (norm_parent, norm_children) = if options.normalize {
        let mut joint = Array2::zeros((parent.len(), children.ncols() + 1));
        joint.column_mut(0).assign(&parent);
        joint.slice_mut(ndarray::s![.., 1..]).assign(&children);
        let joint = normalize_columns(joint.view()).map_err(|e| match e {
            Error::ZeroMeanColumn { column } => {
                let idx: usize = column.parse().unwrap_or(0);
                let label = if idx == 0 {
                    parent_label.to_string()
                } else {
                    child_labels[idx - 1].clone()
                };
                Error::ZeroMeanColumn { column: label }
            }
            other => other,
        })?;
        (
            joint.column(0).to_vec(),
            joint.slice(ndarray::s![.., 1..]).to_owned(),
        )
    } else {
        (parent.to_vec(), children.to_owned())
    };

    let p = ArrayView1::from(&norm_parent[..]);
    let (a, b) = two_pole_extremes(p, norm_children.view())?;
    let coefficients = coefficients_from_extremes(p, norm_children.view(), a, b, options.rho);
    let grades = grey_grades(coefficients.view())?;
    let ranking = rank(child_labels, &grades);
    Ok(GreyRelationalResult {
        parent_label: parent_label.to_string(),
        child_labels: child_labels.to_vec(),
        years: Vec::new(),
        options,
        normalized_parent: norm_parent,
        normalized_children: norm_children,
        a,
        b,
        coefficients,
        grades,
        ranking,
    })
}

/// Runs the analysis on series that share an identical year set.
///
/// Series are labelled by their indicator, or by `country/indicator` when the
/// inputs span several countries.
pub fn gra(
    parent: &IndicatorSeries,
    children: &[IndicatorSeries],
    options: GraOptions,
) -> Result<GreyRelationalResult> {
    let years = parent.years();
    if years.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: years.len(),
        });
    }
    if children.is_empty() {
        return Err(Error::DimensionMismatch("no child series".into()));
    }
    for child in children {
        if child.years() != years {
            return Err(Error::YearMismatch(format!(
                "{} and {} cover different years",
                parent.key(),
                child.key()
            )));
        }
    }
    let multi_country = children.iter().any(|c| c.country() != parent.country());
    let label = |s: &IndicatorSeries| {
        if multi_country {
            s.key().to_string()
        } else {
            s.indicator().to_string()
        }
    };
    let mut matrix = Array2::zeros((years.len(), children.len()));
    for (i, child) in children.iter().enumerate() {
        for (k, v) in child.values().into_iter().enumerate() {
            matrix[[k, i]] = v;
        }
    }
    let labels: Vec<String> = children.iter().map(label).collect();
    let mut result = gra_matrix(&label(parent), &parent.values(), &labels, matrix.view(), options)?;
    result.years = years;
    Ok(result)
}
