//! Closed-form information drifts for four concrete enlargements of the
//! Brownian filtration, each evaluable along simulated paths.
//!
//! * [`DriftEvaluator::noisy_terminal`] — the insider observes
//!   `G = W_1 + Y` with independent Gaussian noise of variance `w`;
//!   `μ_t = (G - W_t)/(1 - t + w)`. With `w = 0` this is the classical
//!   bridge drift, singular at `t = 1`.
//! * [`DriftEvaluator::running_max_indicator`] — the insider knows whether
//!   the running maximum stays at or below a level `c`. The conditional
//!   probabilities are made explicit through the reflection principle:
//!   with `τ = 1 - t`, `u = (c - W_t)/√τ`, the not-yet-crossed probability
//!   of staying under the level is `2Φ(u) - 1`, so
//!   `μ = -(2/√τ) φ(u) / (2Φ(u) - 1)` on `{G = 1}` and
//!   `μ = +(2/√τ) φ(u) / (2(1 - Φ(u)))` on `{G = 0}` while the level is
//!   uncrossed (zero afterwards: the indicator is then resolved).
//! * [`DriftEvaluator::terminal_partition`] — the insider knows which bin
//!   of a fixed partition of the line contains `W_1`;
//!   `μ = k_t / P_t` with `P_t` the conditional bin probability and `k_t`
//!   its spatial derivative.
//! * [`DriftEvaluator::dynamic_noise`] — the insider observes
//!   `G_t = B_1 + B̃_{g(1-t)}` whose noise variance `g(1-t)` shrinks over
//!   time; `μ_t = (G_t - W_t)/(1 - t + g(1-t))`.
//!
//! All catalog drifts live on the fixed horizon `T = 1` and are stated for
//! the driving Brownian motion; the market layer adds the uninformed
//! premium `b + ½` on top.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{erf, normal_cdf, normal_pdf, normal_sf};

/// Noise clock families for the dynamic-noise enlargement, as named in run
/// configs. `value(y)` must be non-negative and non-decreasing in `y`, so
/// that the insider's noise variance `g(1-t)` is non-increasing in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum NoiseClock {
    Sqrt,
    Power { coeff: f64, exponent: f64 },
    Constant { level: f64 },
}

impl NoiseClock {
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            NoiseClock::Sqrt => y.max(0.0).sqrt(),
            // the linear clock sits in hot partition sums
            NoiseClock::Power { coeff, exponent } if exponent == 1.0 => coeff * y.max(0.0),
            NoiseClock::Power { coeff, exponent } => coeff * y.max(0.0).powf(exponent),
            NoiseClock::Constant { level } => level,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseClock::Sqrt => Ok(()),
            NoiseClock::Power { coeff, exponent } => {
                if !(coeff > 0.0) || !coeff.is_finite() {
                    return Err(Error::parameter(format!(
                        "power clock needs coeff > 0, got {coeff}"
                    )));
                }
                if !(exponent > 0.0) || !exponent.is_finite() {
                    return Err(Error::parameter(format!(
                        "power clock needs exponent > 0, got {exponent}"
                    )));
                }
                Ok(())
            }
            NoiseClock::Constant { level } => {
                if level < 0.0 || !level.is_finite() {
                    return Err(Error::parameter(format!(
                        "constant clock needs level >= 0, got {level}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Path state visible at one grid time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepState {
    pub t: f64,
    pub w: f64,
    pub running_max: f64,
}

/// The insider's signal, per variant. `Dynamic` carries the *current*
/// value `G_t` of a time-varying signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    /// Noisy terminal value `G = W_1 + Y`.
    Level(f64),
    /// Indicator `G = 1` iff the running maximum stays in `[0, c]`.
    Indicator(bool),
    /// Index of the partition bin containing `W_1`.
    Bin(usize),
    /// Current value of the dynamic signal `G_t`.
    Dynamic(f64),
}

/// Per-path signal: fixed for initial enlargements, one value per grid
/// index for the dynamic-noise model.
#[derive(Debug, Clone)]
pub enum PathSignal {
    Static(Signal),
    PerStep(Vec<f64>),
}

impl PathSignal {
    #[inline]
    pub fn at(&self, i: usize) -> Signal {
        match self {
            PathSignal::Static(s) => *s,
            PathSignal::PerStep(v) => Signal::Dynamic(v[i]),
        }
    }
}

/// A catalog information drift, immutable and safe to evaluate from many
/// workers at once.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DriftEvaluator {
    NoisyTerminal { w: f64 },
    RunningMaxIndicator { c: f64 },
    TerminalPartition { thresholds: Vec<f64> },
    DynamicNoise { g: NoiseClock },
}

impl DriftEvaluator {
    /// Insider sees `W_1 + Y`, `Y ~ N(0, w)` independent. `w = 0` is the
    /// bridge case, evaluable only for `t < 1`.
    pub fn noisy_terminal(w: f64) -> Result<Self> {
        if w < 0.0 || !w.is_finite() {
            return Err(Error::parameter(format!(
                "noise variance must be >= 0, got {w}"
            )));
        }
        Ok(DriftEvaluator::NoisyTerminal { w })
    }

    /// Insider knows `1_{[0,c]}(W_1^*)` for a level `c > 0`.
    pub fn running_max_indicator(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::parameter(format!("level must be > 0, got {c}")));
        }
        Ok(DriftEvaluator::RunningMaxIndicator { c })
    }

    /// Insider knows which bin of the partition induced by `thresholds`
    /// contains `W_1`. Thresholds must be finite and strictly increasing;
    /// an empty list is the trivial (one-bin) partition.
    pub fn terminal_partition(thresholds: Vec<f64>) -> Result<Self> {
        for w in thresholds.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::parameter(
                    "thresholds must be strictly increasing",
                ));
            }
        }
        if thresholds.iter().any(|x| !x.is_finite()) {
            return Err(Error::parameter("thresholds must be finite"));
        }
        Ok(DriftEvaluator::TerminalPartition { thresholds })
    }

    /// Insider observes `G_t = B_1 + B̃_{g(1-t)}`.
    pub fn dynamic_noise(g: NoiseClock) -> Result<Self> {
        g.validate()?;
        Ok(DriftEvaluator::DynamicNoise { g })
    }

    /// All catalog drifts are stated on the unit horizon.
    pub fn horizon(&self) -> f64 {
        1.0
    }

    /// Bin index of `x` for a `TerminalPartition`; bins are
    /// `(-∞, τ_1], (τ_1, τ_2], …, (τ_m, ∞)`.
    pub fn bin_of(thresholds: &[f64], x: f64) -> usize {
        thresholds.partition_point(|&tau| tau < x)
    }

    /// The information drift value `μ_t` at the given state and signal.
    pub fn evaluate(&self, state: &StepState, signal: Signal) -> Result<f64> {
        match self {
            DriftEvaluator::NoisyTerminal { w } => {
                let g = match signal {
                    Signal::Level(g) => g,
                    other => return Err(signal_mismatch("noisy terminal", other)),
                };
                let denom = 1.0 - state.t + w;
                if denom <= 0.0 {
                    return Err(Error::Singularity {
                        t: state.t,
                        detail: "bridge drift requires t < 1 when w = 0".into(),
                    });
                }
                Ok((g - state.w) / denom)
            }
            DriftEvaluator::RunningMaxIndicator { c } => {
                let below = match signal {
                    Signal::Indicator(b) => b,
                    other => return Err(signal_mismatch("running-max indicator", other)),
                };
                let tau = 1.0 - state.t;
                if tau <= 0.0 {
                    return Err(Error::Singularity {
                        t: state.t,
                        detail: "running-max drift requires t < 1".into(),
                    });
                }
                let sq = tau.sqrt();
                let u = (c - state.w) / sq;
                if below {
                    if state.running_max > *c {
                        return Err(Error::InconsistentState {
                            t: state.t,
                            detail: format!(
                                "signal says maximum <= {c} but running max is {}",
                                state.running_max
                            ),
                        });
                    }
                    // not-crossed probability 2Φ(u) - 1 = erf(u/√2)
                    let denom = erf(u * std::f64::consts::FRAC_1_SQRT_2);
                    if u <= 0.0 || denom <= 0.0 {
                        return Err(Error::Singularity {
                            t: state.t,
                            detail: format!("touching the barrier: u = {u}"),
                        });
                    }
                    Ok(-(2.0 / sq) * normal_pdf(u) / denom)
                } else if state.running_max > *c {
                    // level already crossed: the indicator is resolved
                    Ok(0.0)
                } else {
                    let denom = 2.0 * normal_sf(u);
                    if denom <= 0.0 {
                        return Err(Error::Singularity {
                            t: state.t,
                            detail: format!("vanishing crossing probability: u = {u}"),
                        });
                    }
                    Ok((2.0 / sq) * normal_pdf(u) / denom)
                }
            }
            DriftEvaluator::TerminalPartition { thresholds } => {
                let bin = match signal {
                    Signal::Bin(b) => b,
                    other => return Err(signal_mismatch("terminal partition", other)),
                };
                if bin > thresholds.len() {
                    return Err(Error::InconsistentState {
                        t: state.t,
                        detail: format!(
                            "bin {bin} outside the {}-bin partition",
                            thresholds.len() + 1
                        ),
                    });
                }
                if thresholds.is_empty() {
                    return Ok(0.0);
                }
                let tau = 1.0 - state.t;
                if tau <= 0.0 {
                    return Err(Error::Singularity {
                        t: state.t,
                        detail: "partition drift requires t < 1".into(),
                    });
                }
                let sq = tau.sqrt();
                // bin edges, with φ(±∞) = 0, Φ(∞) = 1, Φ(-∞) = 0
                let lo = (bin > 0).then(|| (thresholds[bin - 1] - state.w) / sq);
                let hi = (bin < thresholds.len()).then(|| (thresholds[bin] - state.w) / sq);
                let prob = match (lo, hi) {
                    (None, None) => 1.0,
                    (None, Some(h)) => normal_cdf(h),
                    (Some(l), None) => normal_sf(l),
                    // distant bins: difference survival functions in the
                    // upper tail instead of cancelling CDFs near 1
                    (Some(l), Some(h)) if l >= 0.0 => normal_sf(l) - normal_sf(h),
                    (Some(l), Some(h)) => normal_cdf(h) - normal_cdf(l),
                };
                let lo_pdf = lo.map_or(0.0, normal_pdf);
                let hi_pdf = hi.map_or(0.0, normal_pdf);
                let kernel = (lo_pdf - hi_pdf) / sq;
                let mu = kernel / prob;
                if prob <= 0.0 || !mu.is_finite() {
                    return Err(Error::Singularity {
                        t: state.t,
                        detail: format!("conditional bin probability underflow: P = {prob}"),
                    });
                }
                Ok(mu)
            }
            DriftEvaluator::DynamicNoise { g } => {
                let g_t = match signal {
                    Signal::Dynamic(v) => v,
                    other => return Err(signal_mismatch("dynamic noise", other)),
                };
                let denom = 1.0 - state.t + g.value(1.0 - state.t);
                if denom <= 0.0 {
                    return Err(Error::Singularity {
                        t: state.t,
                        detail: "dynamic-noise drift requires t < 1 or g(0) > 0".into(),
                    });
                }
                Ok((g_t - state.w) / denom)
            }
        }
    }
}

fn signal_mismatch(kind: &str, got: Signal) -> Error {
    Error::parameter(format!("{kind} drift evaluated with mismatched signal {got:?}"))
}
