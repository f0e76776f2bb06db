//! Binary-bit encoding of the constrained integer trading-trajectory problem
//! onto a fully connected Ising instance, and the decode path back to integer
//! weight trajectories with decomposed objective values.
//!
//! The objective being maximized over integer weights `w_it` is
//!
//! ```text
//! V(w) = Σ_t [ w_tᵀ μ_t - γ/2 w_tᵀ Σ_t w_t ] - Σ_{t,i,k} c_i(t) 2^k [bit k of w_it changed]
//! ```
//!
//! Every weight is expanded into `B` bits, `w_it = Σ_k 2^k b_ikt` with
//! `b = (s + 1)/2`, so a per-asset cap of `2^B - 1` is embedded as a hard
//! constraint by construction: no penalty terms, no ancillary spins. Spins
//! are laid out bit-significance-major within a time block, and adjacent
//! time blocks are linked by ferromagnetic couplings that price bit flips.
//!
//! The encoder normalizes couplings so that the recorded constant offset
//! satisfies `energy(s) + offset = -V(s)` exactly: Ising energies and
//! portfolio values are interchangeable up to sign.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{IsingProblem, SpinVector};

/// Per-time expected-return vectors and covariance matrices for `N` assets
/// over `T` periods. Covariances are symmetrized at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioData", into = "ScenarioData")]
pub struct MarketScenario {
    n_assets: usize,
    horizon: usize,
    /// `mu[t]` has length `n_assets`.
    mu: Vec<Vec<f64>>,
    /// `sigma[t]` is row-major `n_assets × n_assets`.
    sigma: Vec<Vec<f64>>,
}

/// Serialized form: covariances as nested rows for readability.
#[derive(Serialize, Deserialize)]
struct ScenarioData {
    mu: Vec<Vec<f64>>,
    sigma: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<ScenarioData> for MarketScenario {
    type Error = Error;

    fn try_from(data: ScenarioData) -> Result<Self> {
        let horizon = data.mu.len();
        if horizon == 0 {
            return Err(Error::InvalidInput("scenario needs at least one period".into()));
        }
        let n = data.mu[0].len();
        if data.sigma.len() != horizon {
            return Err(Error::DimensionMismatch {
                context: "covariance sequence",
                expected: horizon,
                got: data.sigma.len(),
            });
        }
        let mut sigma = Vec::with_capacity(horizon);
        for block in &data.sigma {
            if block.len() != n || block.iter().any(|row| row.len() != n) {
                return Err(Error::DimensionMismatch {
                    context: "covariance matrix",
                    expected: n,
                    got: block.len(),
                });
            }
            sigma.push(block.iter().flatten().copied().collect());
        }
        MarketScenario::new(data.mu, sigma)
    }
}

impl From<MarketScenario> for ScenarioData {
    fn from(s: MarketScenario) -> Self {
        let n = s.n_assets;
        ScenarioData {
            mu: s.mu,
            sigma: s
                .sigma
                .into_iter()
                .map(|flat| flat.chunks(n).map(|row| row.to_vec()).collect())
                .collect(),
        }
    }
}

impl MarketScenario {
    /// Builds a scenario from per-period return vectors and row-major
    /// covariance matrices. Covariances are symmetrized via `(Σ + Σᵀ)/2`;
    /// negative diagonal entries are rejected.
    pub fn new(mu: Vec<Vec<f64>>, sigma: Vec<Vec<f64>>) -> Result<Self> {
        let horizon = mu.len();
        if horizon == 0 {
            return Err(Error::InvalidInput("scenario needs at least one period".into()));
        }
        let n = mu[0].len();
        if n == 0 {
            return Err(Error::InvalidInput("scenario needs at least one asset".into()));
        }
        if mu.iter().any(|m| m.len() != n) {
            return Err(Error::InvalidInput(
                "all return vectors must have the same length".into(),
            ));
        }
        if sigma.len() != horizon {
            return Err(Error::DimensionMismatch {
                context: "covariance sequence",
                expected: horizon,
                got: sigma.len(),
            });
        }
        let mut sigma = sigma;
        for (t, block) in sigma.iter_mut().enumerate() {
            if block.len() != n * n {
                return Err(Error::DimensionMismatch {
                    context: "covariance matrix",
                    expected: n * n,
                    got: block.len(),
                });
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let avg = 0.5 * (block[i * n + j] + block[j * n + i]);
                    block[i * n + j] = avg;
                    block[j * n + i] = avg;
                }
                if block[i * n + i] < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "covariance diagonal entry ({i},{i}) at period {t} is negative"
                    )));
                }
            }
        }
        if mu.iter().flatten().chain(sigma.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("scenario values must be finite".into()));
        }
        Ok(Self {
            n_assets: n,
            horizon,
            mu,
            sigma,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Expected returns per unit at period `t`.
    pub fn mu_t(&self, t: usize) -> &[f64] {
        &self.mu[t]
    }

    /// Row-major covariance matrix at period `t`.
    pub fn sigma_t(&self, t: usize) -> &[f64] {
        &self.sigma[t]
    }

    pub fn covariance(&self, t: usize, i: usize, j: usize) -> f64 {
        self.sigma[t][i * self.n_assets + j]
    }

    /// A single-period scenario containing only period `t`.
    pub fn period(&self, t: usize) -> MarketScenario {
        MarketScenario {
            n_assets: self.n_assets,
            horizon: 1,
            mu: vec![self.mu[t].clone()],
            sigma: vec![self.sigma[t].clone()],
        }
    }

    /// Replaces asset `index` by a risk-free asset: its expected return is
    /// `rate` in every period and its covariance row and column are exactly
    /// zero.
    pub fn with_risk_free(&self, rate: f64, index: usize) -> Result<MarketScenario> {
        if index >= self.n_assets {
            return Err(Error::AssetIndexOutOfRange {
                index,
                n_assets: self.n_assets,
            });
        }
        if !rate.is_finite() {
            return Err(Error::InvalidInput("risk-free rate must be finite".into()));
        }
        let n = self.n_assets;
        let mut out = self.clone();
        for t in 0..self.horizon {
            out.mu[t][index] = rate;
            for j in 0..n {
                out.sigma[t][index * n + j] = 0.0;
                out.sigma[t][j * n + index] = 0.0;
            }
        }
        Ok(out)
    }
}

/// Trading cost per bit-aligned unit change between adjacent periods:
/// a single constant, or one value per asset and transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TradeCost {
    Uniform(f64),
    /// `costs[t][i]` applies to asset `i` between periods `t` and `t+1`.
    PerAssetTransition(Vec<Vec<f64>>),
}

impl Default for TradeCost {
    fn default() -> Self {
        TradeCost::Uniform(0.0)
    }
}

impl TradeCost {
    /// Cost for asset `i` between periods `t` and `t+1`.
    pub fn cost(&self, asset: usize, transition: usize) -> f64 {
        match self {
            TradeCost::Uniform(c) => *c,
            TradeCost::PerAssetTransition(v) => v[transition][asset],
        }
    }

    fn validate(&self) -> Result<()> {
        let all_ok = match self {
            TradeCost::Uniform(c) => c.is_finite() && *c >= 0.0,
            TradeCost::PerAssetTransition(v) => v
                .iter()
                .flatten()
                .all(|c| c.is_finite() && *c >= 0.0),
        };
        if all_ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "trade costs must be non-negative and finite".into(),
            ))
        }
    }

    fn validate_shape(&self, n_assets: usize, horizon: usize) -> Result<()> {
        if let TradeCost::PerAssetTransition(v) = self {
            if v.len() != horizon.saturating_sub(1) {
                return Err(Error::DimensionMismatch {
                    context: "trade cost transitions",
                    expected: horizon.saturating_sub(1),
                    got: v.len(),
                });
            }
            if let Some(row) = v.iter().find(|row| row.len() != n_assets) {
                return Err(Error::DimensionMismatch {
                    context: "trade cost assets",
                    expected: n_assets,
                    got: row.len(),
                });
            }
        }
        Ok(())
    }
}

/// Serialized form of [`PortfolioSpec`].
#[derive(Serialize, Deserialize)]
struct SpecData {
    gamma: f64,
    unit_cap: u32,
    #[serde(default)]
    trade_cost: TradeCost,
}

/// Risk aversion, hard per-asset unit cap and trading cost defining the
/// encoding. The cap must be of the form `2^B - 1` so that `B` bits represent
/// exactly the range `0..=cap` — the quantity constraints are then embedded
/// in the spin count itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecData", into = "SpecData")]
pub struct PortfolioSpec {
    pub gamma: f64,
    pub unit_cap: u32,
    pub trade_cost: TradeCost,
}

impl TryFrom<SpecData> for PortfolioSpec {
    type Error = Error;

    fn try_from(data: SpecData) -> Result<Self> {
        PortfolioSpec::new(data.gamma, data.unit_cap, data.trade_cost)
    }
}

impl From<PortfolioSpec> for SpecData {
    fn from(s: PortfolioSpec) -> Self {
        SpecData {
            gamma: s.gamma,
            unit_cap: s.unit_cap,
            trade_cost: s.trade_cost,
        }
    }
}

impl PortfolioSpec {
    pub fn new(gamma: f64, unit_cap: u32, trade_cost: TradeCost) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "gamma must be non-negative and finite, got {gamma}"
            )));
        }
        if unit_cap == 0 || !(unit_cap + 1).is_power_of_two() {
            return Err(Error::InvalidUnitCap { cap: unit_cap });
        }
        trade_cost.validate()?;
        Ok(Self {
            gamma,
            unit_cap,
            trade_cost,
        })
    }

    /// Same spec with a different risk aversion.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.unit_cap, self.trade_cost.clone())
    }

    /// Same spec with a different uniform trading cost.
    pub fn with_trade_cost(&self, cost: TradeCost) -> Result<Self> {
        Self::new(self.gamma, self.unit_cap, cost)
    }

    /// Bits per asset: `B = log2(unit_cap + 1)`.
    pub fn bits_per_asset(&self) -> usize {
        (self.unit_cap + 1).trailing_zeros() as usize
    }

    /// Total available units `K̃ = N · unit_cap`.
    pub fn total_units(&self, n_assets: usize) -> u64 {
        n_assets as u64 * u64::from(self.unit_cap)
    }
}

/// Index map from `(asset, bit, period)` to flat spin indices.
///
/// Within a time block the layout is bit-significance-major:
/// `index(i, k, t) = t·(N·B) + k·N + i`, a bijection onto `[0, N·B·T)`.
/// This ordering is frozen; every encode/decode round trip relies on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinLayout {
    pub n_assets: usize,
    pub bits_per_asset: usize,
    pub horizon: usize,
}

impl SpinLayout {
    pub fn total_spins(&self) -> usize {
        self.n_assets * self.bits_per_asset * self.horizon
    }

    /// Flat spin index of bit `k` of asset `i` at period `t`.
    #[inline]
    pub fn index(&self, asset: usize, bit: usize, period: usize) -> usize {
        debug_assert!(asset < self.n_assets && bit < self.bits_per_asset && period < self.horizon);
        period * (self.n_assets * self.bits_per_asset) + bit * self.n_assets + asset
    }

    /// Largest representable weight, `2^B - 1`.
    pub fn unit_cap(&self) -> u32 {
        (1u32 << self.bits_per_asset) - 1
    }
}

/// Builds and freezes the spin layout for a scenario/spec pair, validating
/// that the spec fits the scenario.
pub fn build_layout(scenario: &MarketScenario, spec: &PortfolioSpec) -> Result<SpinLayout> {
    spec.trade_cost
        .validate_shape(scenario.n_assets(), scenario.horizon())?;
    Ok(SpinLayout {
        n_assets: scenario.n_assets(),
        bits_per_asset: spec.bits_per_asset(),
        horizon: scenario.horizon(),
    })
}

/// An integer weight matrix `w_it` over `N` assets and `T` periods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightTrajectory {
    n_assets: usize,
    horizon: usize,
    /// Time-major: `w[t * n_assets + i]`.
    w: Vec<i64>,
}

impl WeightTrajectory {
    pub fn new(n_assets: usize, horizon: usize, w: Vec<i64>) -> Result<Self> {
        if w.len() != n_assets * horizon {
            return Err(Error::DimensionMismatch {
                context: "weight matrix",
                expected: n_assets * horizon,
                got: w.len(),
            });
        }
        Ok(Self {
            n_assets,
            horizon,
            w,
        })
    }

    pub fn zeros(n_assets: usize, horizon: usize) -> Self {
        Self {
            n_assets,
            horizon,
            w: vec![0; n_assets * horizon],
        }
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, asset: usize, period: usize) -> i64 {
        self.w[period * self.n_assets + asset]
    }

    pub fn set(&mut self, asset: usize, period: usize, weight: i64) {
        self.w[period * self.n_assets + asset] = weight;
    }

    /// Weights of period `t`.
    pub fn period(&self, t: usize) -> &[i64] {
        &self.w[t * self.n_assets..(t + 1) * self.n_assets]
    }

    /// Total units changed between adjacent periods, `Σ_{t,i} |Δw_it|`.
    pub fn total_unit_changes(&self) -> i64 {
        let mut changes = 0;
        for t in 0..self.horizon.saturating_sub(1) {
            for i in 0..self.n_assets {
                changes += (self.get(i, t + 1) - self.get(i, t)).abs();
            }
        }
        changes
    }
}

/// An Ising instance produced by [`encode`], together with the spin layout
/// and the constant offset linking energies to objective values:
/// `energy(s) + offset = -V(s)`.
#[derive(Debug, Clone)]
pub struct EncodedPortfolio {
    pub problem: IsingProblem,
    pub layout: SpinLayout,
    pub offset: f64,
}

impl EncodedPortfolio {
    /// Objective value of a spin configuration, recovered exactly from the
    /// Ising energy: `-(energy(s) + offset)`.
    pub fn objective_of_spins(&self, spins: &SpinVector) -> Result<f64> {
        Ok(-(self.problem.energy(spins)? + self.offset))
    }

    /// Decodes spins into the integer weight trajectory.
    pub fn decode(&self, spins: &SpinVector) -> Result<WeightTrajectory> {
        decode(spins, &self.layout)
    }
}

/// Maps the scenario/spec pair onto a fully connected Ising problem over the
/// bit-expanded spin basis.
///
/// Within each time block, spins `(i,k)` and `(j,l)` couple with
/// `-γ/4 · 2^k 2^l · Σ_ijt`, and the field at `(i,k)` is
/// `γ/4 · 2^k Σ_jl 2^l Σ_ijt - 1/2 · 2^k μ_it`. Adjacent periods are linked
/// per asset and bit by a ferromagnetic coupling `c_i(t)/2 · 2^k`, so one bit
/// flip between neighbouring periods costs exactly `c_i(t) · 2^k` of
/// objective value. Constant terms (including would-be diagonal entries of
/// the bit-expanded covariance) are folded into the recorded offset.
pub fn encode(scenario: &MarketScenario, spec: &PortfolioSpec) -> Result<EncodedPortfolio> {
    let layout = build_layout(scenario, spec)?;
    let n = layout.n_assets;
    let bits = layout.bits_per_asset;
    let horizon = layout.horizon;
    let n_spins = layout.total_spins();
    let gamma = spec.gamma;

    let pow2: Vec<f64> = (0..bits).map(|k| (1u64 << k) as f64).collect();
    // Σ_k 2^k and Σ_k 4^k over k = 0..B-1
    let bit_sum = ((1u64 << bits) - 1) as f64;
    let bit_sq_sum = ((1u64 << (2 * bits)) - 1) as f64 / 3.0;

    let mut j = vec![0.0; n_spins * n_spins];
    let mut h = vec![0.0; n_spins];
    let mut offset = 0.0;

    for t in 0..horizon {
        let sigma = scenario.sigma_t(t);
        let mu = scenario.mu_t(t);

        for i in 0..n {
            let row_sum: f64 = sigma[i * n..(i + 1) * n].iter().sum();
            for k in 0..bits {
                let a = layout.index(i, k, t);
                for jj in 0..n {
                    let cov = sigma[i * n + jj];
                    for l in 0..bits {
                        let b = layout.index(jj, l, t);
                        if a != b {
                            j[a * n_spins + b] = -(gamma / 4.0) * pow2[k] * pow2[l] * cov;
                        }
                    }
                }
                h[a] = (gamma / 4.0) * pow2[k] * bit_sum * row_sum - 0.5 * pow2[k] * mu[i];
            }
        }

        let total_sum: f64 = sigma.iter().sum();
        let diag_sum: f64 = (0..n).map(|i| sigma[i * n + i]).sum();
        let mu_sum: f64 = mu.iter().sum();
        offset += (gamma / 8.0) * (bit_sum * bit_sum * total_sum + bit_sq_sum * diag_sum)
            - 0.5 * bit_sum * mu_sum;
    }

    // Ferromagnetic cross-time couplings: aligned bits lower the energy, a
    // flip opens a gap of c·2^k in objective value.
    for t in 0..horizon.saturating_sub(1) {
        for i in 0..n {
            let c = spec.trade_cost.cost(i, t);
            for k in 0..bits {
                let a = layout.index(i, k, t);
                let b = layout.index(i, k, t + 1);
                let v = 0.5 * c * pow2[k];
                j[a * n_spins + b] = v;
                j[b * n_spins + a] = v;
                offset += v;
            }
        }
    }

    let problem = IsingProblem::new(n_spins, j, h)?;
    Ok(EncodedPortfolio {
        problem,
        layout,
        offset,
    })
}

/// Decodes a spin configuration into integer weights,
/// `w_it = Σ_k 2^k (s_(i,k,t) + 1)/2`. Always within `[0, 2^B - 1]`.
pub fn decode(spins: &SpinVector, layout: &SpinLayout) -> Result<WeightTrajectory> {
    if spins.len() != layout.total_spins() {
        return Err(Error::DimensionMismatch {
            context: "spin vector",
            expected: layout.total_spins(),
            got: spins.len(),
        });
    }
    let mut weights = WeightTrajectory::zeros(layout.n_assets, layout.horizon);
    for t in 0..layout.horizon {
        for i in 0..layout.n_assets {
            let mut w = 0i64;
            for k in 0..layout.bits_per_asset {
                w += i64::from(spins.bit(layout.index(i, k, t))) << k;
            }
            weights.set(i, t, w);
        }
    }
    Ok(weights)
}

/// Inverse of [`decode`]: the unique spin configuration whose bits reproduce
/// `weights`. Fails if any weight falls outside the representable range.
pub fn spins_from_weights(weights: &WeightTrajectory, layout: &SpinLayout) -> Result<SpinVector> {
    if weights.n_assets() != layout.n_assets || weights.horizon() != layout.horizon {
        return Err(Error::DimensionMismatch {
            context: "weight matrix",
            expected: layout.n_assets * layout.horizon,
            got: weights.n_assets() * weights.horizon(),
        });
    }
    let cap = i64::from(layout.unit_cap());
    let mut spins = vec![-1i8; layout.total_spins()];
    for t in 0..layout.horizon {
        for i in 0..layout.n_assets {
            let w = weights.get(i, t);
            if !(0..=cap).contains(&w) {
                return Err(Error::CapViolation {
                    asset: i,
                    time: t,
                    weight: w,
                    cap: layout.unit_cap(),
                });
            }
            for k in 0..layout.bits_per_asset {
                if w >> k & 1 == 1 {
                    spins[layout.index(i, k, t)] = 1;
                }
            }
        }
    }
    SpinVector::new(spins)
}

/// A decoded trajectory with its objective decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySolution {
    pub weights: WeightTrajectory,
    /// `w_tᵀ μ_t` per period.
    pub return_term: Vec<f64>,
    /// `w_tᵀ Σ_t w_t` per period (without the γ/2 factor).
    pub risk_term: Vec<f64>,
    /// `Σ_{t,i} c_i(t) |Δw_it|` — cost per unit actually moved.
    pub unit_trade_cost: f64,
    /// `Σ_{t,i,k} c_i(t) 2^k [bit k changed]` — the cost measure the Ising
    /// encoding realizes. Differs from `unit_trade_cost` on multi-bit
    /// carries (e.g. 7 → 8 flips four bits).
    pub bit_trade_cost: f64,
    /// `Σ_t [return_t - γ/2 risk_t] - bit_trade_cost`.
    pub total_value: f64,
}

/// Per-transition bit-level trading costs, `costs[t]` covering the move from
/// period `t` to `t+1`.
pub fn transition_bit_costs(weights: &WeightTrajectory, spec: &PortfolioSpec) -> Vec<f64> {
    let bits = spec.bits_per_asset();
    let mut costs = Vec::with_capacity(weights.horizon().saturating_sub(1));
    for t in 0..weights.horizon().saturating_sub(1) {
        let mut cost = 0.0;
        for i in 0..weights.n_assets() {
            let changed = (weights.get(i, t) ^ weights.get(i, t + 1)) as u64;
            let c = spec.trade_cost.cost(i, t);
            for k in 0..bits {
                if changed >> k & 1 == 1 {
                    cost += c * (1u64 << k) as f64;
                }
            }
        }
        costs.push(cost);
    }
    costs
}

/// Evaluates the full objective decomposition of an integer weight
/// trajectory. Weights must respect the per-asset cap.
pub fn objective(
    weights: &WeightTrajectory,
    scenario: &MarketScenario,
    spec: &PortfolioSpec,
) -> Result<TrajectorySolution> {
    if weights.n_assets() != scenario.n_assets() || weights.horizon() != scenario.horizon() {
        return Err(Error::DimensionMismatch {
            context: "weight matrix",
            expected: scenario.n_assets() * scenario.horizon(),
            got: weights.n_assets() * weights.horizon(),
        });
    }
    spec.trade_cost
        .validate_shape(scenario.n_assets(), scenario.horizon())?;
    let n = scenario.n_assets();
    let horizon = scenario.horizon();
    let cap = i64::from(spec.unit_cap);
    for t in 0..horizon {
        for i in 0..n {
            let w = weights.get(i, t);
            if !(0..=cap).contains(&w) {
                return Err(Error::CapViolation {
                    asset: i,
                    time: t,
                    weight: w,
                    cap: spec.unit_cap,
                });
            }
        }
    }

    let mut return_term = Vec::with_capacity(horizon);
    let mut risk_term = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let w = weights.period(t);
        let mu = scenario.mu_t(t);
        let sigma = scenario.sigma_t(t);
        let ret: f64 = w.iter().zip(mu).map(|(&wi, &m)| wi as f64 * m).sum();
        let mut risk = 0.0;
        for i in 0..n {
            let wi = w[i] as f64;
            if wi != 0.0 {
                let row = &sigma[i * n..(i + 1) * n];
                let dot: f64 = row.iter().zip(w).map(|(&s, &wj)| s * wj as f64).sum();
                risk += wi * dot;
            }
        }
        return_term.push(ret);
        risk_term.push(risk);
    }

    let mut unit_trade_cost = 0.0;
    for t in 0..horizon.saturating_sub(1) {
        for i in 0..n {
            let delta = (weights.get(i, t + 1) - weights.get(i, t)).abs();
            unit_trade_cost += spec.trade_cost.cost(i, t) * delta as f64;
        }
    }
    let bit_trade_cost: f64 = transition_bit_costs(weights, spec).iter().sum();

    let total_value = (0..horizon)
        .map(|t| return_term[t] - 0.5 * spec.gamma * risk_term[t])
        .sum::<f64>()
        - bit_trade_cost;

    Ok(TrajectorySolution {
        weights: weights.clone(),
        return_term,
        risk_term,
        unit_trade_cost,
        bit_trade_cost,
        total_value,
    })
}

/// Objective value recovered through the Ising encoding,
/// `-(energy(s) + offset)`. Agrees with `objective(decode(s))` to within
/// rounding; the encode/decode paths are exercised end-to-end.
pub fn objective_of_spins(
    spins: &SpinVector,
    scenario: &MarketScenario,
    spec: &PortfolioSpec,
) -> Result<f64> {
    encode(scenario, spec)?.objective_of_spins(spins)
}
