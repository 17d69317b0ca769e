//! Green GDP accounting engine.
//!
//! Builds deduction-based green GDP accounts from country indicator panels,
//! ranks indicator influence with grey relational analysis, forecasts series
//! with the GM(1,1) grey model and computes the supporting fit statistics.
//!
//! Module map:
//!
//! - [`panel`]: indicator series, panels, CSV/JSON persistence, validation,
//!   alignment and the World Bank fetch client.
//! - [`grey_relational`]: Deng-style grey relational analysis.
//! - [`gm11`]: GM(1,1) fitting, forecasting and the relative residual test.
//! - [`stats`]: least-squares lines, Pearson correlation and the climate
//!   impact metric.
//! - [`accounting`]: the green GDP deduction identity and its estimators.
//! - [`plot`]: deterministic SVG charts.
//! - [`report`]: the serialized run report.

pub mod accounting;
pub mod error;
pub mod gm11;
pub mod grey_relational;
pub mod numfmt;
pub mod panel;
pub mod plot;
pub mod report;
pub mod stats;
mod warning;

pub use accounting::{
    build_account, compute_ggdp, epcl_bridge, epdl_bridge, rdm_from_gni, refit_bridges, rollup,
    AccountRow, AccountStrategy, BridgeModels, Deduction, GgdpAccount, Method, SecondaryBundle,
    SecondaryComponent, Source,
};
pub use error::{Error, ErrorKind, Result};
pub use gm11::{
    ago, check_applicability, fit_gm11, iago, predict, q_test, AccuracyClass, ForecastResult,
    Gm11Model, ShiftPolicy,
};
pub use grey_relational::{gra, GraOptions, GreyRelationalResult};
pub use panel::{
    fill_gaps, validate, AlignedMatrix, GapPolicy, IndicatorSeries, Observation, Panel, SeriesKey,
    Severity, ValidationIssue, ValidationReport,
};
pub use stats::{
    apply_linear, climate_impact_score, ols_fit, pct_change, pearson, ImpactScore, LinearModel,
    TrendMode,
};
pub use warning::{Module, Warning};
