//! Experiment configuration: one experiment = one JSON config file plus
//! command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use sb_core::{generate_scenario, MarketConfig, MarketScenario, PortfolioSpec, SbParams};

fn default_restarts() -> usize {
    10
}

fn default_repetitions() -> usize {
    10
}

/// Which cross-check `sbopt verify` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    /// Compare against exhaustive enumeration of every trajectory.
    #[default]
    Exhaustive,
    /// Sweep the trading cost toward zero and compare the global solve with
    /// per-period local optimization.
    CostSweep,
}

/// One instance size in a benchmark run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchCase {
    pub n_assets: usize,
    pub unit_cap: u32,
    #[serde(default = "one")]
    pub horizon: usize,
}

fn one() -> usize {
    1
}

/// Top-level experiment description. Commands read the fields they need and
/// reject configs missing them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Synthetic market generator knobs. Mutually exclusive with
    /// `scenario_file`.
    #[serde(default)]
    pub market: Option<MarketConfig>,
    /// Path to a scenario JSON file (schema: `{"mu": [[..]], "sigma": [[[..]]]}`),
    /// resolved relative to the config file's directory.
    #[serde(default)]
    pub scenario_file: Option<PathBuf>,
    /// Risk aversion, unit cap and trading cost.
    #[serde(default)]
    pub portfolio: Option<PortfolioSpec>,
    /// Solver dynamics parameters.
    #[serde(default)]
    pub sb: SbParams,
    /// Independent solver restarts per solve.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Risk-aversion grid for `sweep-gamma`.
    #[serde(default)]
    pub gamma_grid: Vec<f64>,
    /// Trading-cost grid for `verify` in cost-sweep mode.
    #[serde(default)]
    pub cost_grid: Vec<f64>,
    /// Random portfolio samples to emit alongside a frontier sweep.
    #[serde(default)]
    pub random_portfolios: usize,
    #[serde(default)]
    pub verify_mode: VerifyMode,
    /// Export the full sorted value list in exhaustive verification
    /// (instances up to 2^20 configurations).
    #[serde(default)]
    pub export_sorted_values: bool,
    /// Instance sizes for `benchmark`.
    #[serde(default)]
    pub benchmark_cases: Vec<BenchCase>,
    /// Timed repetitions per benchmark case.
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        // scenario_file is relative to the config location
        if let (Some(file), Some(dir)) = (&config.scenario_file, path.parent()) {
            if file.is_relative() {
                config.scenario_file = Some(dir.join(file));
            }
        }
        Ok(config)
    }

    /// Applies `--seed` / `--restarts` overrides. The seed override replaces
    /// both the market and the solver seed.
    pub fn apply_overrides(&mut self, seed: Option<u64>, restarts: Option<usize>) {
        if let Some(seed) = seed {
            self.sb.seed = seed;
            if let Some(market) = &mut self.market {
                market.seed = seed;
            }
        }
        if let Some(restarts) = restarts {
            self.restarts = restarts;
        }
    }

    pub fn require_portfolio(&self) -> Result<&PortfolioSpec> {
        self.portfolio
            .as_ref()
            .context("config is missing the \"portfolio\" section")
    }

    /// Loads or generates the scenario this experiment runs on.
    pub fn load_scenario(&self) -> Result<MarketScenario> {
        match (&self.market, &self.scenario_file) {
            (Some(_), Some(_)) => {
                bail!("config sets both \"market\" and \"scenario_file\"; pick one")
            }
            (Some(market), None) => Ok(generate_scenario(market)?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading scenario {}", path.display()))?;
                Ok(serde_json::from_str(&text)
                    .with_context(|| format!("parsing scenario {}", path.display()))?)
            }
            (None, None) => bail!("config needs either \"market\" or \"scenario_file\""),
        }
    }
}
