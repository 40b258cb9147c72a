//! Core value types, units, and the scenario configuration shared by all modules.
//!
//! Everything here is an immutable value type; stepping functions take the old
//! state and return a new one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choice::ChoiceSpec;
use crate::engine::DemandSpec;

/// Bottleneck capacities of the two lane groups, in veh/min.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Capacities {
    /// HOT-lane bottleneck capacity.
    pub c1: f64,
    /// GP-lane bottleneck capacity.
    pub c2: f64,
}

/// Arrival rates at one instant, in veh/min.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandSample {
    /// HOV arrivals (use the HOT lanes for free).
    pub q1: f64,
    /// SOV arrivals (choose between paying for HOT or queueing on GP).
    pub q2: f64,
}

/// Queue lengths on the two lane groups, in vehicles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaneState {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Adaptive coefficients of the affine pricing law `u = a*w + b`.
///
/// `a` is in $/min, `b` in $. Neither is sign-constrained; the integrators may
/// drift negative transiently.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub a: f64,
    pub b: f64,
}

/// Integral-controller gains. All must be strictly positive.
///
/// Units: k1 $/veh/min^2, k2 $/veh/min, k3 $/veh/min, k4 $/veh.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

/// Initial queue lengths and controller coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    #[serde(flatten)]
    pub lanes: LaneState,
    #[serde(flatten)]
    pub controller: ControllerState,
}

/// Time stepping, seeding, and the price floor switch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    /// Step size in minutes. The horizon must be a whole number of steps.
    pub dt: f64,
    /// Simulated duration in minutes.
    pub horizon: f64,
    /// Seed for the portable RNG (only consumed by stochastic demand).
    #[serde(default)]
    pub seed: u64,
    /// When true (the default), the emitted price is `max(0, a*w + b)`.
    /// The integrators always see the true system outputs regardless.
    #[serde(default = "default_price_floor")]
    pub price_floor: bool,
}

fn default_price_floor() -> bool {
    true
}

/// Full description of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub capacities: Capacities,
    pub gains: Gains,
    pub initial: InitialState,
    pub run: RunSettings,
    pub demand: DemandSpec,
    pub choice: ChoiceSpec,
}

/// One time step's full observable vector.
///
/// `lambda1`, `lambda2`, `a`, `b` are the state at the start of the step, i.e.
/// the values the price and choice computations of this step actually used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    /// Step start time, min.
    pub t: f64,
    /// HOV arrival rate, veh/min.
    pub q1: f64,
    /// SOV arrival rate, veh/min.
    pub q2: f64,
    /// Paying-SOV flow `p * q2`, veh/min.
    pub q3: f64,
    /// Queueing-time difference `lambda2/c2 - lambda1/c1`, min.
    pub w: f64,
    /// Price before the floor, $.
    pub u_raw: f64,
    /// Emitted price, $.
    pub u_applied: f64,
    /// Fraction of SOVs choosing the HOT lanes.
    pub p: f64,
    /// HOT residual capacity `c1 - q1 - q3`, veh/min.
    pub zeta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub a: f64,
    pub b: f64,
    /// True when the price floor replaced a negative raw price.
    pub clamped: bool,
    /// True when the step was evaluated in the `w <= 0` regime of a model that
    /// defines choice by rationality (UE, general affine). Not part of the
    /// trace CSV schema; surfaced through run summaries.
    pub degenerate_w: bool,
}

/// Validation outcome: the step count implied by `horizon/dt` plus any
/// standing-assumption warnings. Warnings do not make a scenario illegal.
#[derive(Clone, Debug)]
pub struct ValidatedScenario {
    pub steps: usize,
    pub warnings: Vec<String>,
}

/// Hard validation failures, one diagnostic per offending field.
#[derive(Clone, Debug, Error)]
#[error("invalid scenario: {}", errors.join("; "))]
pub struct ValidationErrors {
    pub errors: Vec<String>,
}

fn check(errors: &mut Vec<String>, ok: bool, msg: &str) {
    if !ok {
        errors.push(msg.to_string());
    }
}

/// Checks every type invariant and flags violated standing assumptions.
///
/// Invariant violations are hard errors; assumption violations (HOV demand at
/// or above HOT capacity, system not congested) are warnings because the
/// simulation itself stays well defined.
pub fn validate_scenario(cfg: &ScenarioConfig) -> Result<ValidatedScenario, ValidationErrors> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let c = &cfg.capacities;
    check(&mut errors, c.c1.is_finite() && c.c1 > 0.0, "capacities.c1: must be finite and > 0");
    check(&mut errors, c.c2.is_finite() && c.c2 > 0.0, "capacities.c2: must be finite and > 0");

    let g = &cfg.gains;
    for (name, k) in [("k1", g.k1), ("k2", g.k2), ("k3", g.k3), ("k4", g.k4)] {
        check(&mut errors, k.is_finite() && k > 0.0, &format!("gains.{name}: must be finite and > 0"));
    }

    let init = &cfg.initial;
    check(
        &mut errors,
        init.lanes.lambda1.is_finite() && init.lanes.lambda1 >= 0.0,
        "initial.lambda1: must be finite and >= 0",
    );
    check(
        &mut errors,
        init.lanes.lambda2.is_finite() && init.lanes.lambda2 >= 0.0,
        "initial.lambda2: must be finite and >= 0",
    );
    check(&mut errors, init.controller.a.is_finite(), "initial.a: must be finite");
    check(&mut errors, init.controller.b.is_finite(), "initial.b: must be finite");

    let run = &cfg.run;
    check(&mut errors, run.dt.is_finite() && run.dt > 0.0, "run.dt: must be finite and > 0");
    check(
        &mut errors,
        run.horizon.is_finite() && run.horizon > 0.0,
        "run.horizon: must be finite and > 0",
    );

    let mut steps = 0usize;
    if run.dt > 0.0 && run.horizon > 0.0 {
        let ratio = run.horizon / run.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            errors.push(format!(
                "run.horizon: {} is not a whole number of steps of dt={} (ratio {ratio})",
                run.horizon, run.dt
            ));
        } else {
            steps = ratio.round() as usize;
            check(&mut errors, steps >= 1, "run.horizon: must cover at least one step");
        }
    }

    match &cfg.demand {
        DemandSpec::Constant { q1, q2 } => {
            check(&mut errors, q1.is_finite() && *q1 >= 0.0, "demand.q1: must be finite and >= 0");
            check(&mut errors, q2.is_finite() && *q2 >= 0.0, "demand.q2: must be finite and >= 0");
            if errors.is_empty() {
                if *q1 >= c.c1 {
                    warnings.push(format!(
                        "HOV demand exceeds HOT capacity (q1={q1} >= c1={})",
                        c.c1
                    ));
                }
                if *q1 + *q2 <= c.c1 + c.c2 {
                    warnings.push(format!(
                        "system is not congested (q1+q2={} <= c1+c2={})",
                        q1 + q2,
                        c.c1 + c.c2
                    ));
                }
            }
        }
        DemandSpec::Poisson { mean1, mean2, resample_every } => {
            check(&mut errors, mean1.is_finite() && *mean1 > 0.0, "demand.mean1: must be finite and > 0");
            check(&mut errors, mean2.is_finite() && *mean2 > 0.0, "demand.mean2: must be finite and > 0");
            check(
                &mut errors,
                resample_every.is_finite() && *resample_every >= run.dt,
                "demand.resample_every: must be finite and >= dt",
            );
            if run.dt > 0.0 && resample_every.is_finite() && *resample_every >= run.dt {
                let blocks = resample_every / run.dt;
                if (blocks - blocks.round()).abs() > 1e-9 * blocks {
                    warnings.push(format!(
                        "demand.resample_every={resample_every} is not a whole number of steps; \
                         rounding to {} steps per block",
                        blocks.round()
                    ));
                }
            }
        }
    }

    if let Err(e) = cfg.choice.validate() {
        errors.push(format!("choice: {e}"));
    }

    if errors.is_empty() {
        Ok(ValidatedScenario { steps, warnings })
    } else {
        Err(ValidationErrors { errors })
    }
}
