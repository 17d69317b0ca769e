//! Fixture values frozen from `oracles/gm11_oracle.py` (60-digit arithmetic,
//! explicit normal-equation inverse).

#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use ggdp_core::gm11::{ago, fit_gm11, iago, predict, regression_residuals, ShiftPolicy};
use ggdp_core::{fit_gm11 as fit, AccuracyClass};

const SAMPLE: [f64; 10] = [36.3, 36.8, 33.9, 34.6, 34.4, 34.8, 37.3, 37.4, 38.6, 39.5];

const A: f64 = -0.015662619107694121119;
const U: f64 = 33.293051695882891998;
const Q: f64 = 0.024389864718273909741;

const FITTED: [f64; 10] = [
    36.3,
    34.12817539139669935,
    34.666920066125147813,
    35.214169321635299279,
    35.770057410566047986,
    36.33472070485781669,
    36.908297729207682804,
    37.490929195052624511,
    38.082758035089223707,
    38.683929438338294247,
];

const FORECAST: [f64; 10] = [
    39.294590885763037627,
    39.914892186449464065,
    40.544985514357954829,
    41.185025445654981831,
    41.835168996634142786,
    42.495575662235814828,
    43.166407455174876333,
    43.847828945686095853,
    44.540007301896938626,
    45.243112330837694995,
];

const TOL: f64 = 1e-9;

#[test]
fn parameters_match_oracle() {
    let m = fit_gm11(&SAMPLE).unwrap();
    assert_relative_eq!(m.a, A, max_relative = TOL);
    assert_relative_eq!(m.u, U, max_relative = TOL);
    assert_relative_eq!(m.residual_q, Q, max_relative = TOL);
    assert_eq!(m.accuracy_class, AccuracyClass::Good);
    assert_eq!(m.shift, 0.0);
}

#[test]
fn fitted_and_forecast_match_oracle() {
    let m = fit(&SAMPLE).unwrap();
    assert_eq!(m.fitted[0], SAMPLE[0]);
    for (got, want) in m.fitted.iter().zip(FITTED) {
        assert_relative_eq!(*got, want, max_relative = TOL);
    }
    let f = predict(&m, 10);
    assert_eq!(f.years, (11..=20).collect::<Vec<_>>());
    for (got, want) in f.values.iter().zip(FORECAST) {
        assert_relative_eq!(*got, want, max_relative = TOL);
    }
}

#[test]
fn geometric_series_recovers_exact_parameters() {
    let x: Vec<f64> = (0..12).map(|k| 5.0 * 1.1f64.powi(k)).collect();
    let m = fit_gm11(&x).unwrap();
    assert_relative_eq!(m.a, -2.0 / 21.0, max_relative = 1e-9);
    assert_relative_eq!(m.u, 10.0 / 2.1, max_relative = 1e-9);
    for r in regression_residuals(&m, &x) {
        assert!(r.abs() < 1e-9, "residual {r}");
    }
}

#[test]
fn ago_round_trip_on_sample() {
    let back = iago(&ago(&SAMPLE));
    for (b, s) in back.iter().zip(SAMPLE) {
        assert_relative_eq!(*b, s, max_relative = 1e-14);
    }
}

#[test]
fn shifted_fit_restores_original_scale() {
    let x: Vec<f64> = SAMPLE.iter().map(|v| v - 40.0).collect();
    assert!(fit_gm11(&x).is_err());
    let m = ggdp_core::gm11::fit_gm11_with(&x, ShiftPolicy::ShiftToOne).unwrap();
    assert_eq!(m.fitted[0], x[0]);
    assert!(m.shift > 0.0);
}
