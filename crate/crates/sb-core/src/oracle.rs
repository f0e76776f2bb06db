//! Independent ground-truth solvers and samplers: exhaustive trajectory
//! enumeration over the spin basis, random-portfolio clouds and the
//! separable per-period optimizer used for the vanishing-trading-cost limit.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ising::{SpinVector, ENUMERATION_LIMIT};
use crate::portfolio::{
    decode, encode, objective, EncodedPortfolio, MarketScenario, PortfolioSpec, TradeCost,
    TrajectorySolution, WeightTrajectory,
};
use crate::solver::{solve_best_of, SbParams};

/// Full sorted-value export is capped at `2^20` entries to bound memory.
pub const VALUE_EXPORT_BITS: usize = 20;

/// Outcome of [`enumerate_best_trajectory`].
#[derive(Debug, Clone)]
pub struct EnumerationResult {
    /// The maximizer, evaluated from scratch through the decode path.
    pub best: TrajectorySolution,
    pub best_spins: SpinVector,
    /// Ascending objective values of every configuration, when requested.
    pub sorted_values: Option<Vec<f64>>,
}

/// Evaluates the objective (with bit-level trading costs) over all
/// `2^(N·B·T)` spin configurations via Gray-code incremental energy updates
/// on the encoded Ising instance, so the oracle exercises the identical
/// encode/decode path it certifies.
///
/// Returns the maximizer (ties broken toward the lexicographically lowest
/// spin vector) and optionally the full sorted value list. Enumeration is
/// split across threads in fixed blocks with a deterministic merge.
pub fn enumerate_best_trajectory(
    scenario: &MarketScenario,
    spec: &PortfolioSpec,
    collect_values: bool,
) -> Result<EnumerationResult> {
    let enc = encode(scenario, spec)?;
    let bits = enc.layout.total_spins();
    if bits > ENUMERATION_LIMIT {
        return Err(Error::EnumerationBound {
            bits,
            max: ENUMERATION_LIMIT,
        });
    }

    let (best_spins, _) = enc.problem.brute_force_ground_state()?;
    let best = objective(&decode(&best_spins, &enc.layout)?, scenario, spec)?;

    let sorted_values = if collect_values {
        Some(collect_sorted_values(&enc)?)
    } else {
        None
    };

    Ok(EnumerationResult {
        best,
        best_spins,
        sorted_values,
    })
}

fn collect_sorted_values(enc: &EncodedPortfolio) -> Result<Vec<f64>> {
    let bits = enc.layout.total_spins();
    if bits > VALUE_EXPORT_BITS {
        return Err(Error::ValueExportBound {
            bits,
            max_bits: VALUE_EXPORT_BITS,
        });
    }
    let total = 1u64 << bits;
    let block = crate::ising::REFRESH_BLOCK as usize;
    let mut values = vec![0.0f64; total as usize];
    let offset = enc.offset;
    values
        .par_chunks_mut(block)
        .enumerate()
        .for_each(|(b, chunk)| {
            let start = (b * block) as u64;
            enc.problem
                .scan_range(start, start + chunk.len() as u64, |idx, energy| {
                    chunk[(idx - start) as usize] = -(energy + offset);
                });
        });
    values.sort_unstable_by(f64::total_cmp);
    Ok(values)
}

/// Number of configurations whose objective value exceeds `value` by more
/// than `tol` (the rank of `value` in the enumerated landscape; 0 means
/// optimal). The tolerance absorbs rounding noise between the incremental
/// enumeration energies and from-scratch evaluation.
pub fn count_better_configurations(enc: &EncodedPortfolio, value: f64, tol: f64) -> Result<u64> {
    let bits = enc.layout.total_spins();
    if bits > ENUMERATION_LIMIT {
        return Err(Error::EnumerationBound {
            bits,
            max: ENUMERATION_LIMIT,
        });
    }
    // v > value + tol  ⟺  energy < -(value + tol) - offset
    let energy_threshold = -(value + tol) - enc.offset;
    let total = 1u64 << bits;
    let block = crate::ising::REFRESH_BLOCK;
    let n_blocks = total.div_ceil(block);
    let count = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * block;
            let end = total.min(start + block);
            let mut c = 0u64;
            enc.problem.scan_range(start, end, |_, energy| {
                if energy < energy_threshold {
                    c += 1;
                }
            });
            c
        })
        .sum();
    Ok(count)
}

/// Uniform random integer portfolios plus the important edge cases
/// (all-zero, all-cap, and full cap concentrated in each single asset),
/// each evaluated through the objective decomposition.
pub fn random_portfolios(
    scenario: &MarketScenario,
    spec: &PortfolioSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<TrajectorySolution>> {
    if count == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let n = scenario.n_assets();
    let horizon = scenario.horizon();
    let cap = spec.unit_cap as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut out = Vec::with_capacity(count + n + 2);
    for _ in 0..count {
        let w: Vec<i64> = (0..n * horizon)
            .map(|_| rng.random_range(0..=cap))
            .collect();
        let weights = WeightTrajectory::new(n, horizon, w)?;
        out.push(objective(&weights, scenario, spec)?);
    }

    // edge cases
    out.push(objective(&WeightTrajectory::zeros(n, horizon), scenario, spec)?);
    let all_cap = WeightTrajectory::new(n, horizon, vec![cap; n * horizon])?;
    out.push(objective(&all_cap, scenario, spec)?);
    for i in 0..n {
        let mut w = WeightTrajectory::zeros(n, horizon);
        for t in 0..horizon {
            w.set(i, t, cap);
        }
        out.push(objective(&w, scenario, spec)?);
    }
    Ok(out)
}

/// How [`per_time_local_optimal`] solves instances whose per-period spin
/// count exceeds the enumeration bound.
#[derive(Debug, Clone)]
pub enum LocalFallback {
    /// Refuse: exhaustive per-period optimization only.
    ExactOnly,
    /// Best-of-`restarts` simulated bifurcation per period, flagged heuristic.
    Sb { params: SbParams, restarts: usize },
}

/// Result of the per-period local optimization.
#[derive(Debug, Clone)]
pub struct LocalOptimum {
    /// Concatenated per-period optima, with `total_value` evaluated under
    /// the originally requested trading cost.
    pub solution: TrajectorySolution,
    /// Set when any period was solved heuristically instead of exhaustively.
    pub heuristic: bool,
}

/// Optimizes every period separately at zero trading cost and concatenates
/// the results; the returned total value applies the requested cost post
/// hoc, so the vanishing-cost limit of the global optimum can be compared
/// against it directly.
pub fn per_time_local_optimal(
    scenario: &MarketScenario,
    spec: &PortfolioSpec,
    fallback: &LocalFallback,
) -> Result<LocalOptimum> {
    let n = scenario.n_assets();
    let horizon = scenario.horizon();
    let spec_c0 = spec.with_trade_cost(TradeCost::Uniform(0.0))?;
    let per_period_bits = n * spec.bits_per_asset();

    let mut weights = WeightTrajectory::zeros(n, horizon);
    let mut heuristic = false;
    for t in 0..horizon {
        let period = scenario.period(t);
        let period_weights = if per_period_bits <= ENUMERATION_LIMIT {
            enumerate_best_trajectory(&period, &spec_c0, false)?.best.weights
        } else {
            match fallback {
                LocalFallback::ExactOnly => {
                    return Err(Error::EnumerationBound {
                        bits: per_period_bits,
                        max: ENUMERATION_LIMIT,
                    })
                }
                LocalFallback::Sb { params, restarts } => {
                    heuristic = true;
                    let enc = encode(&period, &spec_c0)?;
                    let best = solve_best_of(&enc.problem, params, *restarts)?;
                    decode(&best.result.spins, &enc.layout)?
                }
            }
        };
        for i in 0..n {
            weights.set(i, t, period_weights.get(i, 0));
        }
    }

    Ok(LocalOptimum {
        solution: objective(&weights, scenario, spec)?,
        heuristic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{gray_code, spins_from_gray};
    use crate::market::{generate_scenario, MarketConfig};

    fn small_config(n: usize, horizon: usize, seed: u64) -> MarketConfig {
        MarketConfig {
            n_assets: n,
            horizon,
            n_increments: 200,
            drift: 0.005,
            volatility: 0.02,
            seasonal_amplitude: 0.0,
            seasonal_period: 10,
            risk_free_return: None,
            seed,
        }
    }

    fn spec(gamma: f64, cap: u32, cost: f64) -> PortfolioSpec {
        PortfolioSpec::new(gamma, cap, TradeCost::Uniform(cost)).unwrap()
    }

    #[test]
    fn enumeration_covers_all_trajectories() {
        // N=3, B=2, T=3: 2^18 trajectories.
        let scenario = generate_scenario(&small_config(3, 3, 1)).unwrap();
        let result = enumerate_best_trajectory(&scenario, &spec(0.5, 3, 0.01), true).unwrap();
        let values = result.sorted_values.unwrap();
        assert_eq!(values.len(), 1 << 18);
        // the maximizer tops the sorted list
        let top = *values.last().unwrap();
        assert!((top - result.best.total_value).abs() <= 1e-9);
    }

    #[test]
    fn return_only_maximizer_matches_closed_form() {
        let scenario = generate_scenario(&small_config(3, 2, 3)).unwrap();
        let result = enumerate_best_trajectory(&scenario, &spec(0.0, 3, 0.0), false).unwrap();
        for t in 0..2 {
            for i in 0..3 {
                let expected = if scenario.mu_t(t)[i] > 0.0 { 3 } else { 0 };
                assert_eq!(result.best.weights.get(i, t), expected);
            }
        }
    }

    #[test]
    fn single_spin_instance_picks_the_better_of_two() {
        let scenario = generate_scenario(&small_config(1, 1, 5)).unwrap();
        let s = spec(0.2, 1, 0.0);
        let result = enumerate_best_trajectory(&scenario, &s, true).unwrap();
        let values = result.sorted_values.unwrap();
        assert_eq!(values.len(), 2);
        assert_eq!(result.best.total_value, values[1].max(values[0]));
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let scenario = generate_scenario(&small_config(7, 2, 7)).unwrap();
        // 7 assets × 2 bits × 2 periods = 28 spins
        assert!(matches!(
            enumerate_best_trajectory(&scenario, &spec(0.1, 3, 0.0), false),
            Err(Error::EnumerationBound { .. })
        ));
        // 22 spins is enumerable but too large for value export
        let scenario = generate_scenario(&small_config(11, 1, 7)).unwrap();
        assert!(matches!(
            enumerate_best_trajectory(&scenario, &spec(0.1, 3, 0.0), true),
            Err(Error::ValueExportBound { .. })
        ));
    }

    #[test]
    fn incremental_enumeration_agrees_with_from_scratch_objective() {
        let scenario = generate_scenario(&small_config(2, 2, 9)).unwrap();
        let s = spec(0.8, 3, 0.015);
        let enc = encode(&scenario, &s).unwrap();
        let bits = enc.layout.total_spins();
        let total = 1u64 << bits;

        // values indexed by enumeration position
        let mut values = vec![0.0f64; total as usize];
        enc.problem.scan_range(0, total, |idx, energy| {
            values[idx as usize] = -(energy + enc.offset);
        });

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let idx = rng.random_range(0..total);
            let spins = spins_from_gray(bits, gray_code(idx));
            let direct = objective(&decode(&spins, &enc.layout).unwrap(), &scenario, &s)
                .unwrap()
                .total_value;
            assert!(
                (values[idx as usize] - direct).abs() <= 1e-9,
                "config {idx}: incremental {} vs direct {direct}",
                values[idx as usize]
            );
        }
    }

    #[test]
    fn enumerator_beats_every_other_configuration() {
        let scenario = generate_scenario(&small_config(2, 2, 13)).unwrap();
        let s = spec(0.5, 3, 0.02);
        let result = enumerate_best_trajectory(&scenario, &s, false).unwrap();
        let local = per_time_local_optimal(&scenario, &s, &LocalFallback::ExactOnly).unwrap();
        assert!(result.best.total_value >= local.solution.total_value - 1e-12);
        for sample in random_portfolios(&scenario, &s, 200, 17).unwrap() {
            assert!(result.best.total_value >= sample.total_value - 1e-12);
        }
    }

    #[test]
    fn rank_of_the_optimum_is_zero() {
        let scenario = generate_scenario(&small_config(2, 2, 15)).unwrap();
        let s = spec(0.5, 3, 0.01);
        let enc = encode(&scenario, &s).unwrap();
        let result = enumerate_best_trajectory(&scenario, &s, false).unwrap();
        let rank = count_better_configurations(&enc, result.best.total_value, 1e-9).unwrap();
        assert_eq!(rank, 0);
        // something clearly suboptimal has positive rank
        let rank =
            count_better_configurations(&enc, result.best.total_value - 0.5, 1e-9).unwrap();
        assert!(rank > 0);
    }

    #[test]
    fn exact_optimizer_risk_is_non_increasing_in_gamma() {
        let scenario = generate_scenario(&small_config(3, 1, 19)).unwrap();
        let mut prev_risk = f64::INFINITY;
        for gamma in [0.0, 0.05, 0.2, 1.0, 5.0, 50.0] {
            let result =
                enumerate_best_trajectory(&scenario, &spec(gamma, 3, 0.0), false).unwrap();
            let risk: f64 = result.best.risk_term.iter().sum();
            assert!(
                risk <= prev_risk + 1e-12,
                "risk {risk} rose at gamma {gamma} (prev {prev_risk})"
            );
            prev_risk = risk;
        }
    }

    #[test]
    fn random_portfolios_are_deterministic_and_include_edge_cases() {
        let scenario = generate_scenario(&small_config(4, 1, 21)).unwrap();
        let s = spec(0.3, 3, 0.0);
        let a = random_portfolios(&scenario, &s, 50, 23).unwrap();
        let b = random_portfolios(&scenario, &s, 50, 23).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.weights, y.weights);
        }
        // 50 samples + zero + all-cap + 4 single-asset portfolios
        assert_eq!(a.len(), 56);
        let zero = &a[50];
        assert!(zero.weights.period(0).iter().all(|&w| w == 0));
        let all_cap = &a[51];
        assert!(all_cap.weights.period(0).iter().all(|&w| w == 3));
        for i in 0..4 {
            let single = &a[52 + i];
            assert_eq!(single.weights.get(i, 0), 3);
        }
        assert!(matches!(
            random_portfolios(&scenario, &s, 0, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn risk_free_edge_case_hits_the_zero_risk_point() {
        let mut config = small_config(5, 1, 25);
        config.drift = 0.0;
        config.risk_free_return = Some(0.01);
        let scenario = generate_scenario(&config).unwrap();
        let s = spec(0.5, 15, 0.0);
        let samples = random_portfolios(&scenario, &s, 10, 27).unwrap();
        // the single-asset edge case for asset 0 is the (risk, return) =
        // (0, 0.15) portfolio
        let rf = &samples[12];
        assert_eq!(rf.weights.get(0, 0), 15);
        assert_eq!(rf.risk_term[0], 0.0);
        assert!((rf.return_term[0] - 0.15).abs() < 1e-12);
    }

    #[test]
    fn zero_cost_local_optimization_equals_global() {
        let scenario = generate_scenario(&small_config(3, 3, 29)).unwrap();
        let s = spec(0.4, 3, 0.0);
        let global = enumerate_best_trajectory(&scenario, &s, false).unwrap();
        let local = per_time_local_optimal(&scenario, &s, &LocalFallback::ExactOnly).unwrap();
        assert!(!local.heuristic);
        assert!((global.best.total_value - local.solution.total_value).abs() <= 1e-9);
    }

    #[test]
    fn single_period_local_equals_exhaustive() {
        let scenario = generate_scenario(&small_config(3, 1, 31)).unwrap();
        let s = spec(0.6, 3, 0.05);
        let global = enumerate_best_trajectory(&scenario, &s, false).unwrap();
        let local = per_time_local_optimal(&scenario, &s, &LocalFallback::ExactOnly).unwrap();
        assert_eq!(global.best.weights, local.solution.weights);
    }

    #[test]
    fn large_gamma_with_risk_free_asset_goes_all_in_risk_free() {
        let mut config = small_config(3, 2, 33);
        config.risk_free_return = Some(0.01);
        let scenario = generate_scenario(&config).unwrap();
        let s = spec(1e6, 3, 0.0);
        let local = per_time_local_optimal(&scenario, &s, &LocalFallback::ExactOnly).unwrap();
        for t in 0..2 {
            assert_eq!(local.solution.weights.get(0, t), 3);
            assert_eq!(local.solution.weights.get(1, t), 0);
            assert_eq!(local.solution.weights.get(2, t), 0);
            assert_eq!(local.solution.risk_term[t], 0.0);
        }
    }

    #[test]
    fn exact_only_fallback_refuses_large_periods() {
        let scenario = generate_scenario(&small_config(14, 1, 35)).unwrap();
        // 14 assets × 2 bits = 28 spins per period
        assert!(matches!(
            per_time_local_optimal(&scenario, &spec(0.1, 3, 0.0), &LocalFallback::ExactOnly),
            Err(Error::EnumerationBound { .. })
        ));
    }

    #[test]
    fn sb_fallback_solves_periods_above_the_bound() {
        let scenario = generate_scenario(&small_config(14, 1, 37)).unwrap();
        let s = spec(0.0, 3, 0.0);
        // weak fields (γ=0 leaves only the return term) need a quiet start
        let fallback = LocalFallback::Sb {
            params: SbParams {
                pump_step: 0.1,
                init_scale: 0.001,
                seed: 39,
                ..SbParams::default()
            },
            restarts: 3,
        };
        let local = per_time_local_optimal(&scenario, &s, &fallback).unwrap();
        assert!(local.heuristic);
        // γ = 0, c = 0 has a closed-form optimum even above the bound
        for i in 0..14 {
            let expected = if scenario.mu_t(0)[i] > 0.0 { 3 } else { 0 };
            assert_eq!(local.solution.weights.get(i, 0), expected);
        }
    }
}
