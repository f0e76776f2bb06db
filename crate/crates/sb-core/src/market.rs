//! Synthetic market scenarios: per-period return estimates and covariance
//! matrices sampled from geometric Brownian motion, with optional drift,
//! cross-asset seasonality and a risk-free asset.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portfolio::MarketScenario;

fn default_increments() -> usize {
    1000
}

fn default_volatility() -> f64 {
    0.02
}

fn default_seasonal_period() -> usize {
    10
}

/// Generation knobs for [`generate_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub n_assets: usize,
    pub horizon: usize,
    /// GBM samples per estimate.
    #[serde(default = "default_increments")]
    pub n_increments: usize,
    /// Cross-asset average expected return per period (e.g. 0.005 for 0.5%).
    #[serde(default)]
    pub drift: f64,
    /// Per-increment GBM volatility.
    #[serde(default = "default_volatility")]
    pub volatility: f64,
    /// Amplitude of the per-asset phase-shifted sinusoidal return component.
    #[serde(default)]
    pub seasonal_amplitude: f64,
    /// Period (in time blocks) of the seasonal component.
    #[serde(default = "default_seasonal_period")]
    pub seasonal_period: usize,
    /// When set, asset 0 is replaced by a risk-free asset with this return.
    #[serde(default)]
    pub risk_free_return: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl MarketConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_assets == 0 || self.horizon == 0 {
            return Err(Error::InvalidInput(
                "n_assets and horizon must be positive".into(),
            ));
        }
        if self.n_increments < 2 {
            return Err(Error::InvalidInput(
                "n_increments must be at least 2 for a covariance estimate".into(),
            ));
        }
        if !(self.volatility > 0.0 && self.volatility.is_finite()) {
            return Err(Error::InvalidInput(
                "volatility must be positive and finite".into(),
            ));
        }
        if !(self.seasonal_amplitude >= 0.0 && self.seasonal_amplitude.is_finite()) {
            return Err(Error::InvalidInput(
                "seasonal_amplitude must be non-negative and finite".into(),
            ));
        }
        if self.seasonal_amplitude > 0.0 && self.seasonal_period == 0 {
            return Err(Error::InvalidInput(
                "seasonal_period must be positive when seasonality is enabled".into(),
            ));
        }
        if !self.drift.is_finite() {
            return Err(Error::InvalidInput("drift must be finite".into()));
        }
        Ok(())
    }
}

/// Samples one market scenario.
///
/// For every time block, each asset gets an independent stream of GBM
/// log-return increments (`-σ²/2 + σ·Z` per increment). The per-asset sample
/// means become the return estimates, shifted so the cross-asset mean equals
/// `drift` plus the seasonal term `A·sin(2π(t/period + i/N))`; the sample
/// covariance of the same increments becomes `Σ_t`, which is positive
/// semidefinite by construction. Deterministic for a fixed seed.
pub fn generate_scenario(config: &MarketConfig) -> Result<MarketScenario> {
    config.validate()?;
    let n = config.n_assets;
    let horizon = config.horizon;
    let m = config.n_increments;
    let vol = config.volatility;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut mu = Vec::with_capacity(horizon);
    let mut sigma = Vec::with_capacity(horizon);
    let mut samples = vec![0.0f64; n * m];

    for t in 0..horizon {
        for row in samples.chunks_mut(m) {
            for r in row.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *r = -0.5 * vol * vol + vol * z;
            }
        }

        let means: Vec<f64> = samples
            .chunks(m)
            .map(|row| row.iter().sum::<f64>() / m as f64)
            .collect();
        let grand_mean = means.iter().sum::<f64>() / n as f64;

        let mut mu_t = Vec::with_capacity(n);
        for (i, mean) in means.iter().enumerate() {
            let seasonal = if config.seasonal_amplitude > 0.0 {
                let phase = t as f64 / config.seasonal_period as f64 + i as f64 / n as f64;
                config.seasonal_amplitude * (2.0 * std::f64::consts::PI * phase).sin()
            } else {
                0.0
            };
            mu_t.push(mean - grand_mean + config.drift + seasonal);
        }

        // center the rows, then Σ_ij = <c_i, c_j> / (m - 1)
        for (row, mean) in samples.chunks_mut(m).zip(&means) {
            for r in row.iter_mut() {
                *r -= mean;
            }
        }
        let mut cov = vec![0.0f64; n * n];
        for i in 0..n {
            let ci = &samples[i * m..(i + 1) * m];
            for j in i..n {
                let cj = &samples[j * m..(j + 1) * m];
                let v = crate::ising::dot(ci, cj) / (m - 1) as f64;
                cov[i * n + j] = v;
                cov[j * n + i] = v;
            }
        }

        mu.push(mu_t);
        sigma.push(cov);
    }

    let scenario = MarketScenario::new(mu, sigma)?;
    match config.risk_free_return {
        Some(rate) => add_risk_free(&scenario, rate, 0),
        None => Ok(scenario),
    }
}

/// Replaces one asset by a risk-free asset: expected return `rate` in every
/// period, covariance row and column exactly zero.
pub fn add_risk_free(
    scenario: &MarketScenario,
    rate: f64,
    asset_index: usize,
) -> Result<MarketScenario> {
    scenario.with_risk_free(rate, asset_index)
}
