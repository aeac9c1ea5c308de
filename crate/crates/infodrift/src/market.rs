//! The price model `S_t = s0 · exp(W_t + b t)`, the uninformed agent's log
//! utility, and discrete wealth simulation for a given investment fraction.
//!
//! Strategies are parametrized as wealth *fractions* invested in the risky
//! asset, so the log-optimal solution is a fraction and positivity of wealth
//! becomes a per-step domain check. The discrete update uses the exact
//! multiplicative form `log X_{i+1} = log X_i + log(1 + π_i (S_{i+1}/S_i - 1))`,
//! which detects positivity violations exactly.

use serde::{Deserialize, Serialize};

use crate::drift::{DriftEvaluator, PathSignal, StepState};
use crate::error::{Error, Result};
use crate::sampling::SamplePath;

/// Geometric price model on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketModel {
    /// Initial price, > 0.
    pub s0: f64,
    /// Log-price drift.
    pub b: f64,
    /// Trading horizon, > 0.
    pub horizon: f64,
}

impl MarketModel {
    pub fn new(s0: f64, b: f64, horizon: f64) -> Result<Self> {
        if !(s0 > 0.0) || !s0.is_finite() {
            return Err(Error::parameter(format!("initial price must be > 0, got {s0}")));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::parameter(format!("horizon must be > 0, got {horizon}")));
        }
        if !b.is_finite() {
            return Err(Error::parameter("drift must be finite"));
        }
        Ok(MarketModel { s0, b, horizon })
    }

    /// Market price of risk of the log price: the Itô correction of
    /// `exp(W_t + bt)` makes it `b + ½`. This is also the uninformed
    /// log-optimal constant fraction.
    pub fn risk_premium(&self) -> f64 {
        self.b + 0.5
    }
}

/// Maximal expected log utility of the uninformed agent:
/// `log x + ½ (b + ½)² T`.
pub fn uninformed_utility(model: &MarketModel, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::parameter(format!("initial wealth must be > 0, got {x}")));
    }
    let eta = model.risk_premium();
    Ok(x.ln() + 0.5 * eta * eta * model.horizon)
}

/// Terminal log wealth of a trader holding fraction `fraction(i, state)` of
/// wealth in the risky asset over grid step `i`.
///
/// Errors with [`Error::Admissibility`] when a step's wealth factor
/// `1 + π (S_{i+1}/S_i - 1)` drops to zero or below, and propagates drift
/// evaluation errors from the fraction callback.
pub fn simulate_log_wealth<F>(
    path: &SamplePath,
    model: &MarketModel,
    mut fraction: F,
    x: f64,
) -> Result<f64>
where
    F: FnMut(usize, &StepState) -> Result<f64>,
{
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::parameter(format!("initial wealth must be > 0, got {x}")));
    }
    let times = path.grid.times();
    let mut log_wealth = x.ln();
    for i in 0..times.len() - 1 {
        let state = StepState {
            t: times[i],
            w: path.w[i],
            running_max: path.running_max[i],
        };
        let pi = fraction(i, &state)?;
        let dlog = (path.w[i + 1] - path.w[i]) + model.b * (times[i + 1] - times[i]);
        // S_{i+1}/S_i - 1, exact to rounding
        let gross = dlog.exp_m1();
        let step = pi * gross;
        if !(step > -1.0) || !step.is_finite() {
            return Err(Error::Admissibility {
                step: i,
                factor: 1.0 + step,
            });
        }
        log_wealth += step.ln_1p();
    }
    Ok(log_wealth)
}

/// The insider's log-optimal fraction `π*(t, state) = (b + ½) + μ_t`: the
/// uninformed optimum plus the information drift of the log price. Beyond
/// `t_stop` (the last grid point where the drift is evaluated) the fraction
/// falls back to the uninformed optimum, so paired wealth differences
/// measure exactly the truncated drift energy.
pub fn insider_fraction<'a>(
    model: &MarketModel,
    drift: &'a DriftEvaluator,
    signal: &'a PathSignal,
    t_stop: f64,
) -> impl FnMut(usize, &StepState) -> Result<f64> + 'a {
    let eta = model.risk_premium();
    move |i, state| {
        if state.t < t_stop {
            Ok(eta + drift.evaluate(state, signal.at(i))?)
        } else {
            Ok(eta)
        }
    }
}

/// Pass/fail verdict with the z-score behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub z_score: f64,
}

/// Paired analytic and Monte Carlo values of the insider's utility
/// increment. Serializes to JSON with exactly these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    pub u_uninformed: f64,
    pub u_insider: f64,
    pub increment_analytic: f64,
    pub increment_mc: f64,
    pub stderr_mc: f64,
    pub n_paths: u64,
    pub verdict: Verdict,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::Signal;
    use crate::grid::make_grid;
    use crate::numerics::mean_and_stderr;
    use crate::sampling::{sample_brownian, SeedSpec};
    use rayon::prelude::*;
    use std::f64::consts::E;

    #[test]
    fn uninformed_utility_examples() {
        let m = MarketModel::new(1.0, -0.5, 1.0).unwrap();
        assert_eq!(uninformed_utility(&m, 1.0).unwrap(), 0.0);
        let m = MarketModel::new(1.0, 0.5, 1.0).unwrap();
        assert!((uninformed_utility(&m, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((uninformed_utility(&m, E).unwrap() - 1.5).abs() < 1e-15);
        assert!(uninformed_utility(&m, 0.0).is_err());
        assert!(uninformed_utility(&m, -1.0).is_err());
    }

    #[test]
    fn model_rejects_bad_parameters() {
        assert!(MarketModel::new(0.0, 0.0, 1.0).is_err());
        assert!(MarketModel::new(1.0, 0.0, 0.0).is_err());
        assert!(MarketModel::new(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn utility_is_additive_in_log_x() {
        let m = MarketModel::new(1.0, 0.3, 1.0).unwrap();
        let base = uninformed_utility(&m, 1.0).unwrap();
        for x in [0.1, 0.5, 2.0, 10.0, 123.0] {
            let u = uninformed_utility(&m, x).unwrap();
            assert!((u - x.ln() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_fraction_returns_log_x_exactly() {
        let grid = make_grid(1.0, 32, 0.0, 0).unwrap();
        let m = MarketModel::new(1.0, 0.5, 1.0).unwrap();
        let p = sample_brownian(&grid, SeedSpec::new(2, 0), None).unwrap();
        let lw = simulate_log_wealth(&p, &m, |_, _| Ok(0.0), 3.0).unwrap();
        assert_eq!(lw, 3.0f64.ln());
    }

    // E log X_T = (π(b+½) - π²/2) T for constant fractions.
    fn mean_log_wealth(pi: f64, b: f64, n: u64) -> (f64, f64) {
        let grid = make_grid(1.0, 128, 0.0, 0).unwrap();
        let m = MarketModel::new(1.0, b, 1.0).unwrap();
        let vals: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let p = sample_brownian(&grid, SeedSpec::new(17, i), None).unwrap();
                simulate_log_wealth(&p, &m, |_, _| Ok(pi), 1.0).unwrap()
            })
            .collect();
        mean_and_stderr(&vals)
    }

    #[test]
    fn constant_fraction_growth_rates() {
        let (mean, se) = mean_log_wealth(1.0, 0.5, 100_000);
        assert!(
            (mean - 0.5).abs() <= 3.0 * se + 2e-3,
            "pi=1: {mean} +- {se}"
        );
        let (mean, se) = mean_log_wealth(2.0, 0.5, 100_000);
        assert!((mean - 0.0).abs() <= 3.0 * se + 4e-3, "pi=2: {mean} +- {se}");
    }

    #[test]
    fn oversized_fraction_violates_admissibility() {
        // A deterministic crash path: one big down move.
        let grid = make_grid(1.0, 1, 0.0, 0).unwrap();
        let path = SamplePath {
            grid: &grid,
            w: vec![0.0, -1.0],
            running_max: vec![0.0, 0.0],
            aux: None,
        };
        let m = MarketModel::new(1.0, 0.0, 1.0).unwrap();
        let err = simulate_log_wealth(&path, &m, |_, _| Ok(3.0), 1.0).unwrap_err();
        assert!(matches!(err, Error::Admissibility { step: 0, .. }));
    }

    #[test]
    fn insider_fraction_reduces_to_uninformed_for_zero_drift() {
        // single-cell partition carries no information: μ ≡ 0
        let drift = DriftEvaluator::terminal_partition(vec![]).unwrap();
        let m = MarketModel::new(1.0, 0.25, 1.0).unwrap();
        let signal = PathSignal::Static(Signal::Bin(0));
        let mut f = insider_fraction(&m, &drift, &signal, 1.0);
        let state = StepState {
            t: 0.3,
            w: 0.1,
            running_max: 0.2,
        };
        assert_eq!(f(0, &state).unwrap(), 0.75);
    }

    #[test]
    fn insider_fraction_is_premium_plus_drift() {
        let drift = DriftEvaluator::noisy_terminal(1.0).unwrap();
        let m = MarketModel::new(1.0, -0.5, 1.0).unwrap();
        let signal = PathSignal::Static(Signal::Level(1.0));
        let mut f = insider_fraction(&m, &drift, &signal, 1.0);
        let state = StepState {
            t: 0.0,
            w: 0.0,
            running_max: 0.0,
        };
        // η = 0, μ = (1 - 0)/(1 - 0 + 1) = ½
        assert!((f(0, &state).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn report_serializes_with_documented_field_names() {
        let report = UtilityReport {
            u_uninformed: 0.0,
            u_insider: 0.5,
            increment_analytic: 0.5,
            increment_mc: 0.49,
            stderr_mc: 0.01,
            n_paths: 1000,
            verdict: Verdict {
                pass: true,
                z_score: -1.0,
            },
        };
        let text = serde_json::to_string(&report).unwrap();
        let expected = [
            "u_uninformed",
            "u_insider",
            "increment_analytic",
            "increment_mc",
            "stderr_mc",
            "n_paths",
            "verdict",
        ];
        // exactly the documented fields, serialized in declaration order
        let positions: Vec<usize> = expected
            .iter()
            .map(|k| text.find(&format!("\"{k}\":")).expect(k))
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value.as_object().unwrap().len(), expected.len());
    }
}
