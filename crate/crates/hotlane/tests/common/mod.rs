//! Shared scenario builders for the integration suites: the two reference
//! constant-demand experiments (two lanes at 30 veh/min, demands 10 and 60,
//! gains 0.1/0.1/0.2/0.2, initial queues 1 and 2, initial law 0.25*w + 0.1,
//! 0.1-second steps over 20 minutes) plus their stochastic variants.

use hotlane::choice::{ChoiceSpec, DistributionSpec};
use hotlane::domain::{
    Capacities, ControllerState, Gains, InitialState, LaneState, RunSettings, ScenarioConfig,
};
use hotlane::engine::DemandSpec;

pub fn logit_constant() -> ScenarioConfig {
    ScenarioConfig {
        capacities: Capacities { c1: 30.0, c2: 30.0 },
        gains: Gains { k1: 0.1, k2: 0.1, k3: 0.2, k4: 0.2 },
        initial: InitialState {
            lanes: LaneState { lambda1: 1.0, lambda2: 2.0 },
            controller: ControllerState { a: 0.25, b: 0.1 },
        },
        run: RunSettings { dt: 0.1 / 60.0, horizon: 20.0, seed: 1, price_floor: true },
        demand: DemandSpec::Constant { q1: 10.0, q2: 60.0 },
        choice: ChoiceSpec::Logit { pi_star: 0.5, alpha_star: 1.0 },
    }
}

pub fn ue_constant() -> ScenarioConfig {
    let mut cfg = logit_constant();
    cfg.choice = ChoiceSpec::Ue { distribution: DistributionSpec::Exponential { rate: 2.0 } };
    cfg
}

pub fn logit_poisson(seed: u64) -> ScenarioConfig {
    let mut cfg = logit_constant();
    cfg.demand = DemandSpec::Poisson { mean1: 10.0, mean2: 60.0, resample_every: 1.0 };
    cfg.run.seed = seed;
    cfg
}

pub fn ue_poisson(seed: u64) -> ScenarioConfig {
    let mut cfg = ue_constant();
    cfg.demand = DemandSpec::Poisson { mean1: 10.0, mean2: 60.0, resample_every: 1.0 };
    cfg.run.seed = seed;
    cfg
}

/// Least-squares fit `y = slope*x + intercept`.
pub fn regress(points: &[(f64, f64)]) -> (f64, f64) {
    assert!(points.len() >= 2);
    let n = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
    let slope = num / den;
    (slope, ybar - slope * xbar)
}

/// Slope of `u_applied` against time over the tail `t >= t_from`.
pub fn price_slope(trace: &hotlane::engine::SimTrace, t_from: f64) -> f64 {
    let pts: Vec<(f64, f64)> = trace
        .records
        .iter()
        .filter(|r| r.t >= t_from)
        .map(|r| (r.t, r.u_applied))
        .collect();
    regress(&pts).0
}
