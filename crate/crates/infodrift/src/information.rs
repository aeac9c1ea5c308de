//! Entropy and mutual-information computations: discrete entropy, Gaussian
//! differential entropy, the Gaussian channel bound `½ log det(C_X+C_Y)/det C_Y`
//! (exact when the signal is Gaussian), its eigenvalue form for isotropic
//! noise, maximum-entropy distributions under moment constraints, and the
//! first-passage probability of the geometric price model.
//!
//! All information quantities are in nats.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, det_psd, symmetric_eigenvalues};
use crate::market::MarketModel;
use crate::quadrature::quadrature;

/// Symmetric positive semi-definite matrix, validated at construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl CovarianceMatrix {
    /// Build from row-major entries. Requires symmetry and eigenvalues
    /// ≥ -1e-10 · trace.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::parameter(format!(
                "covariance needs dim*dim entries, got {} for dim {dim}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::parameter("covariance entries must be finite"));
        }
        let scale: f64 = data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (data[i * dim + j] - data[j * dim + i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::parameter(format!(
                        "covariance not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let trace: f64 = (0..dim).map(|i| data[i * dim + i]).sum();
        let eig = symmetric_eigenvalues(dim, &data);
        if let Some(min) = eig.last() {
            if *min < -1e-10 * trace.abs().max(1.0) {
                return Err(Error::parameter(format!(
                    "covariance not positive semi-definite: min eigenvalue {min}"
                )));
            }
        }
        Ok(CovarianceMatrix { dim, data })
    }

    /// d-dimensional scalar matrix `v · I`.
    pub fn scalar(dim: usize, v: f64) -> Result<Self> {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::parameter(format!("scalar covariance needs v >= 0, got {v}")));
        }
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = v;
        }
        CovarianceMatrix::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Eigenvalues in descending order (relative accuracy ~1e-15 for the
    /// small dense matrices used here).
    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(self.dim, &self.data)
    }

    /// Determinant via Cholesky; 0 for numerically singular input.
    pub fn det(&self) -> f64 {
        det_psd(self.dim, &self.data)
    }

    fn is_positive_definite(&self) -> bool {
        cholesky(self.dim, &self.data).is_some()
    }

    fn add(&self, other: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        if self.dim != other.dim {
            return Err(Error::parameter(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        CovarianceMatrix::new(self.dim, data)
    }
}

/// Whether an information value is exact or only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    UpperBound,
}

/// A non-negative amount of information in nats (`f64::INFINITY` marks an
/// infinite value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InformationValue {
    pub nats: f64,
    pub kind: Exactness,
}

impl InformationValue {
    fn new(nats: f64, kind: Exactness) -> Self {
        debug_assert!(nats >= -1e-12, "information must be non-negative, got {nats}");
        InformationValue {
            nats: nats.max(0.0),
            kind,
        }
    }
}

/// Entropy `-Σ p log p` of a finite distribution, with `0 log 0 := 0`.
pub fn discrete_entropy(probs: &[f64]) -> Result<f64> {
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::parameter("probabilities must be finite and >= 0"));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::parameter(format!(
            "probabilities must sum to 1 within 1e-12, got {sum}"
        )));
    }
    let h: f64 = probs
        .iter()
        .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
        .sum();
    Ok(h.max(0.0))
}

/// Differential entropy `½ log((2πe)^d det C)` of a Gaussian law.
/// Singular covariance yields `f64::NEG_INFINITY` (reported explicitly,
/// never silently clamped).
pub fn gaussian_differential_entropy(cov: &CovarianceMatrix) -> f64 {
    let det = cov.det();
    if det <= 0.0 {
        return f64::NEG_INFINITY;
    }
    0.5 * ((2.0 * PI * std::f64::consts::E).ln() * cov.dim() as f64 + det.ln())
}

/// Information carried by the perturbed observation `X + Y` about `X`
/// through Gaussian noise `Y`: `½ log det(C_X + C_Y)/det(C_Y)`.
///
/// Exact when the caller asserts `X` Gaussian, otherwise an upper bound
/// (the Gaussian maximizes differential entropy under a covariance
/// constraint).
pub fn gaussian_channel_information(
    cx: &CovarianceMatrix,
    cy: &CovarianceMatrix,
    x_gaussian: bool,
) -> Result<InformationValue> {
    if cx.dim() != cy.dim() {
        return Err(Error::parameter(format!(
            "dimension mismatch: {} vs {}",
            cx.dim(),
            cy.dim()
        )));
    }
    if !cy.is_positive_definite() {
        return Err(Error::parameter("noise covariance must be positive definite"));
    }
    let total = cx.add(cy)?;
    let nats = 0.5 * (total.det().ln() - cy.det().ln());
    Ok(InformationValue::new(
        nats,
        if x_gaussian {
            Exactness::Exact
        } else {
            Exactness::UpperBound
        },
    ))
}

/// Covariance of a Brownian motion observed at the given times: entries
/// `min(t_i, t_j)`, together with its eigenvalues.
#[derive(Debug, Clone, Serialize)]
pub struct BrownianCovariance {
    pub cov: CovarianceMatrix,
    pub eigenvalues: Vec<f64>,
}

pub fn brownian_covariance(times: &[f64]) -> Result<BrownianCovariance> {
    if times.is_empty() {
        return Err(Error::parameter("need at least one observation time"));
    }
    if !(times[0] > 0.0) {
        return Err(Error::parameter("observation times must be positive"));
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::parameter(format!(
                "observation times must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let d = times.len();
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            data[i * d + j] = times[i].min(times[j]);
        }
    }
    let cov = CovarianceMatrix::new(d, data)?;
    let eigenvalues = cov.eigenvalues();
    Ok(BrownianCovariance { cov, eigenvalues })
}

/// Eigenvalue form of the channel bound for isotropic Gaussian noise of
/// per-component variance `kappa`: `½ Σ log((λ_j + κ)/κ)`. Agrees with the
/// determinant route on matching inputs.
pub fn isotropic_gaussian_bound(eigenvalues: &[f64], kappa: f64) -> Result<InformationValue> {
    if !(kappa > 0.0) {
        return Err(Error::parameter(format!("kappa must be > 0, got {kappa}")));
    }
    if eigenvalues.iter().any(|&l| l < -1e-12 || !l.is_finite()) {
        return Err(Error::parameter("eigenvalues must be finite and >= 0"));
    }
    let nats: f64 = eigenvalues
        .iter()
        .map(|&l| 0.5 * ((l.max(0.0) + kappa) / kappa).ln())
        .sum();
    Ok(InformationValue::new(nats, Exactness::UpperBound))
}

/// Information bound for a signal observed through two-sided exponential
/// noise: `log((κ₁ + κ₂)/κ₂)`, with `κ₁ = E|X - EX|` and `κ₂ = E|Y|`.
pub fn laplace_perturbation_bound(kappa1: f64, kappa2: f64) -> Result<InformationValue> {
    if !(kappa2 > 0.0) {
        return Err(Error::parameter(format!("kappa2 must be > 0, got {kappa2}")));
    }
    if kappa1 < 0.0 || !kappa1.is_finite() {
        return Err(Error::parameter(format!("kappa1 must be >= 0, got {kappa1}")));
    }
    Ok(InformationValue::new(
        ((kappa1 + kappa2) / kappa2).ln(),
        Exactness::UpperBound,
    ))
}

/// Moment constraint for [`maxent_entropy`].
#[derive(Debug, Clone, Copy)]
pub enum MomentConstraint {
    /// `E X² = σ²` — maximized by the centered Gaussian.
    SecondMoment(f64),
    /// `E |X| = c` — maximized by the two-sided exponential.
    AbsoluteMoment(f64),
}

/// Descriptor of the entropy-maximizing law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxEntDistribution {
    Gaussian { variance: f64 },
    /// Density `(2c)^{-1} e^{-|x|/c}`.
    TwoSidedExponential { scale: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MaxEntropy {
    pub entropy: f64,
    pub distribution: MaxEntDistribution,
}

/// Maximum differential entropy among laws satisfying the constraint, with
/// the maximizing distribution: Gaussian `½ log(2πeσ²)` under a second
/// moment, two-sided exponential `1 + log 2c` under an absolute moment.
pub fn maxent_entropy(constraint: MomentConstraint) -> Result<MaxEntropy> {
    match constraint {
        MomentConstraint::SecondMoment(var) => {
            if !(var > 0.0) {
                return Err(Error::parameter(format!("need σ² > 0, got {var}")));
            }
            Ok(MaxEntropy {
                entropy: 0.5 * (2.0 * PI * std::f64::consts::E * var).ln(),
                distribution: MaxEntDistribution::Gaussian { variance: var },
            })
        }
        MomentConstraint::AbsoluteMoment(c) => {
            if !(c > 0.0) {
                return Err(Error::parameter(format!("need c > 0, got {c}")));
            }
            Ok(MaxEntropy {
                entropy: 1.0 + (2.0 * c).ln(),
                distribution: MaxEntDistribution::TwoSidedExponential { scale: c },
            })
        }
    }
}

/// `P(S_T^* > c)` for the geometric model `S_t = s0 exp(W_t + bt)` on
/// horizon 1, via the first-passage integral
/// `∫₀¹ exp(b log c - b²s/2) · (log c / √(2πs³)) · exp(-(log c)²/(2s)) ds`
/// (level measured relative to `s0`). Levels at or below the start return 1:
/// the running supremum exceeds them almost surely.
pub fn running_max_probability(model: &MarketModel, c: f64) -> Result<f64> {
    if (model.horizon - 1.0).abs() > 1e-12 {
        return Err(Error::parameter(
            "first-passage probability is implemented for horizon 1",
        ));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::parameter(format!("level must be > 0, got {c}")));
    }
    let level = c / model.s0;
    if level <= 1.0 {
        return Ok(1.0);
    }
    let a = level.ln();
    let b = model.b;
    let f = move |s: f64| {
        let gauss = (b * a - 0.5 * b * b * s).exp();
        let density = a / (2.0 * PI * s * s * s).sqrt() * (-a * a / (2.0 * s)).exp();
        gauss * density
    };
    let q = quadrature(f, 0.0, 1.0, 1e-9)?;
    Ok(q.value.clamp(0.0, 1.0))
}

/// Exact utility increment of an insider who knows whether the price
/// maximum exceeds `c`: the entropy of that indicator,
/// `H(G) = -p log p - (1-p) log(1-p)` with `p` from
/// [`running_max_probability`].
pub fn indicator_insider_information(model: &MarketModel, c: f64) -> Result<InformationValue> {
    let p = running_max_probability(model, c)?;
    let h = discrete_entropy(&[p, 1.0 - p])?;
    Ok(InformationValue::new(h, Exactness::Exact))
}
