//! Fixture values frozen from `oracles/stats_oracle.py` (exact rationals).

#![allow(clippy::excessive_precision)]

use approx::{assert_abs_diff_eq, assert_relative_eq};
use ggdp_core::{climate_impact_score, ols_fit, pearson, IndicatorSeries};

#[test]
fn ols_matches_exact_solution() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let y = [3.1, 4.9, 7.2, 8.8, 11.1, 12.9];
    let m = ols_fit(&x, &y).unwrap();
    assert_relative_eq!(m.slope, 1.9771428571428571429, max_relative = 1e-12);
    assert_relative_eq!(m.intercept, 1.08, max_relative = 1e-12);
    let fit = m.fit.unwrap();
    assert_relative_eq!(fit.r_squared, 0.99838211992327579018, max_relative = 1e-12);
    assert_eq!(fit.n_points, 6);
}

#[test]
fn pearson_matches_exact_solution() {
    let r = pearson(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 5.0, 4.0, 5.0]).unwrap();
    assert_relative_eq!(r, 0.77459666924148337704, max_relative = 1e-12);
}

#[test]
fn impact_score_hand_case() {
    let s = IndicatorSeries::new("ESP", "SURFACE_TEMP", "celsius", [(2000, 100.0), (2001, 102.0), (2002, 100.0)])
        .unwrap();
    let score = climate_impact_score(&s).unwrap();
    // (2 + 200/102) / 2
    assert_abs_diff_eq!(score.mean_abs_pct_change, 1.0 + 100.0 / 102.0, epsilon = 1e-12);
    assert_abs_diff_eq!(score.mean_abs_pct_change, 1.9804, epsilon = 1e-4);
}
