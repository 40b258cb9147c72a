//! The closed-loop discrete-time driver.
//!
//! Per step, in this exact order: (1) sample demands; (2) measure the
//! queueing-time difference; (3) evaluate the pricing law; (4) evaluate the
//! lane-choice model into `(q3, zeta)`; (5) record; (6) advance the queues;
//! (7) advance the controller with the pre-update queue length and this step's
//! residual. The ordering is part of the reproducibility contract: identical
//! config and seed give a bit-identical trace.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choice::{flow_and_residual, ChoiceError};
use crate::controller::{compute_price, controller_step};
use crate::domain::{
    validate_scenario, DemandSample, ScenarioConfig, StepRecord, ValidationErrors,
};
use crate::queue::{queue_step, queueing_time_diff};

/// Demand profile over the run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DemandSpec {
    Constant {
        q1: f64,
        q2: f64,
    },
    /// At each block boundary draw counts `Ni ~ Poisson(mean_i * resample_every)`
    /// and hold the rates `Ni / resample_every` until the next boundary.
    /// Per-step redraws at sub-second steps would make the rate signal almost
    /// always 0 or enormous, so blocks default to one minute in the bundled
    /// scenarios.
    Poisson {
        mean1: f64,
        mean2: f64,
        resample_every: f64,
    },
}

/// Stateful demand source; one per run, consuming the run's RNG.
pub struct DemandGenerator {
    spec: DemandSpec,
    steps_per_block: usize,
    current: DemandSample,
}

impl DemandGenerator {
    pub fn new(spec: &DemandSpec, dt: f64) -> Self {
        let steps_per_block = match spec {
            DemandSpec::Constant { .. } => 1,
            DemandSpec::Poisson { resample_every, .. } => {
                ((resample_every / dt).round() as usize).max(1)
            }
        };
        DemandGenerator { spec: *spec, steps_per_block, current: DemandSample { q1: 0.0, q2: 0.0 } }
    }

    /// Demand for the given step index. Poisson blocks are redrawn exactly at
    /// block boundaries, so the call sequence must be step 0, 1, 2, ...
    pub fn sample<R: Rng>(&mut self, step: usize, rng: &mut R) -> DemandSample {
        match self.spec {
            DemandSpec::Constant { q1, q2 } => DemandSample { q1, q2 },
            DemandSpec::Poisson { mean1, mean2, resample_every } => {
                if step % self.steps_per_block == 0 {
                    let n1: f64 = Poisson::new(mean1 * resample_every).unwrap().sample(rng);
                    let n2: f64 = Poisson::new(mean2 * resample_every).unwrap().sample(rng);
                    self.current = DemandSample {
                        q1: n1 / resample_every,
                        q2: n2 / resample_every,
                    };
                }
                self.current
            }
        }
    }
}

/// Complete result of one closed-loop run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    /// Echo of the configuration that produced the trace.
    pub config: ScenarioConfig,
    /// Seed actually used (echoed for reproducibility).
    pub seed: u64,
    pub records: Vec<StepRecord>,
}

#[derive(Clone, Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Validation(#[from] ValidationErrors),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    /// A state or observable stopped being finite; destabilized configurations
    /// fail loudly with the offending step instead of emitting garbage.
    #[error("non-finite {field} at step {step} (t = {t} min)")]
    NonFinite { field: &'static str, step: usize, t: f64 },
}

fn non_finite_field(r: &StepRecord) -> Option<&'static str> {
    let checks: [(&'static str, f64); 11] = [
        ("w", r.w),
        ("u_raw", r.u_raw),
        ("u_applied", r.u_applied),
        ("p", r.p),
        ("q3", r.q3),
        ("zeta", r.zeta),
        ("lambda1", r.lambda1),
        ("lambda2", r.lambda2),
        ("a", r.a),
        ("b", r.b),
        ("t", r.t),
    ];
    checks.iter().find(|(_, v)| !v.is_finite()).map(|(name, _)| *name)
}

/// Runs the closed loop for the configured horizon.
pub fn run(cfg: &ScenarioConfig) -> Result<SimTrace, SimError> {
    let validated = validate_scenario(cfg)?;
    let model = cfg.choice.build()?;

    let caps = cfg.capacities;
    let gains = cfg.gains;
    let dt = cfg.run.dt;
    let mut lanes = cfg.initial.lanes;
    let mut ctrl = cfg.initial.controller;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let mut demand_gen = DemandGenerator::new(&cfg.demand, dt);
    let mut records = Vec::with_capacity(validated.steps);

    for step in 0..validated.steps {
        let t = step as f64 * dt;
        let demand = demand_gen.sample(step, &mut rng);
        let w = queueing_time_diff(&lanes, &caps);
        let (u_raw, u_applied) = compute_price(&ctrl, w, cfg.run.price_floor);
        let split = flow_and_residual(model.as_ref(), u_applied, w, &demand, &caps);

        let record = StepRecord {
            t,
            q1: demand.q1,
            q2: demand.q2,
            q3: split.q3,
            w,
            u_raw,
            u_applied,
            p: split.fraction,
            zeta: split.zeta,
            lambda1: lanes.lambda1,
            lambda2: lanes.lambda2,
            a: ctrl.a,
            b: ctrl.b,
            clamped: u_applied != u_raw,
            degenerate_w: split.degenerate_w,
        };
        if let Some(field) = non_finite_field(&record) {
            return Err(SimError::NonFinite { field, step, t });
        }
        records.push(record);

        let lambda1_now = lanes.lambda1;
        lanes = queue_step(&lanes, &demand, split.zeta, &caps, dt);
        ctrl = controller_step(&ctrl, lambda1_now, split.zeta, &gains, dt);
    }

    Ok(SimTrace { config: cfg.clone(), seed: cfg.run.seed, records })
}

/// Earliest time from which the trace stays inside the band
/// `lambda1 <= eps_lambda` and `|zeta| <= eps_zeta` until the end.
///
/// Returns `None` when the band is violated at the final record, i.e. the run
/// never settles.
pub fn detect_convergence(trace: &SimTrace, eps_lambda: f64, eps_zeta: f64) -> Option<f64> {
    let in_band =
        |r: &StepRecord| r.lambda1 <= eps_lambda && r.zeta.abs() <= eps_zeta;
    let last_violation = trace.records.iter().rposition(|r| !in_band(r));
    match last_violation {
        None => trace.records.first().map(|r| r.t),
        Some(i) if i + 1 == trace.records.len() => None,
        Some(i) => Some(trace.records[i + 1].t),
    }
}
