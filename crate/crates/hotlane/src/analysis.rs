//! Post-hoc and analytic verification: cost accounting, the fixed-flow cost
//! sweep, equilibrium characterization, and the linearized stability check of
//! the switching closed loop.

use thiserror::Error;

use crate::choice::{ChoiceError, LaneChoiceModel};
use crate::domain::{Capacities, DemandSample, Gains, ScenarioConfig};
use crate::engine::{DemandSpec, SimTrace};
use crate::queue::{queue_step, queueing_time_diff};

#[derive(Clone, Debug, Error)]
pub enum AnalysisError {
    #[error("demands do not congest the system (q1+q2 <= c1+c2)")]
    Uncongested,
    #[error("effective gain denominator c = {c} is not positive; the supplied model violates the monotonicity assumptions")]
    AssumptionViolated { c: f64 },
    #[error("fixed paying flow {q3} is outside the feasible range [0, {max}]")]
    InfeasibleFlow { q3: f64, max: f64 },
    #[error("the sweep requires constant demands")]
    NonConstantDemand,
    #[error("the model provides no mean value of time for cost accounting")]
    NoVotSemantics,
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

/// Cost split over a run: `phi2` is the queueing cost of SOVs that stayed on
/// the GP lanes, `phi3` the total tolls paid, `phi` their sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostBreakdown {
    pub phi2: f64,
    pub phi3: f64,
    pub phi: f64,
}

impl CostBreakdown {
    fn new(phi2: f64, phi3: f64) -> Self {
        CostBreakdown { phi2, phi3, phi: phi2 + phi3 }
    }
}

/// Riemann-sum cost accounting over a finished trace.
///
/// The GP-stayer mean VOT comes from the model: the shared value under logit,
/// the conditional mean below each step's switching threshold under UE.
pub fn total_cost(
    trace: &SimTrace,
    model: &dyn LaneChoiceModel,
) -> Result<CostBreakdown, AnalysisError> {
    let dt = trace.config.run.dt;
    let c2 = trace.config.capacities.c2;
    let mut phi2 = 0.0;
    let mut phi3 = 0.0;
    for r in &trace.records {
        phi3 += r.q3 * r.u_applied * dt;
        let mean_vot = model.gp_mean_vot(r.u_applied, r.w).ok_or(AnalysisError::NoVotSemantics)?;
        let w2 = r.lambda2 / c2;
        phi2 += (r.q2 - r.q3) * w2 * mean_vot * dt;
    }
    Ok(CostBreakdown::new(phi2, phi3))
}

/// Growth rate of the queueing-time difference in the settled regime,
/// `w0 = (q1 + q2 - c1 - c2) / c2` per minute.
pub fn equilibrium_growth_rate(
    demand: &DemandSample,
    caps: &Capacities,
) -> Result<f64, AnalysisError> {
    let w0 = (demand.q1 + demand.q2 - caps.c1 - caps.c2) / caps.c2;
    if w0 > 0.0 {
        Ok(w0)
    } else {
        Err(AnalysisError::Uncongested)
    }
}

/// Cost of holding the paying flow fixed at `q3` with the controller bypassed.
///
/// Queues still evolve; the price each step is the one that would sustain the
/// fixed flow. A flow of exactly zero needs an unbounded price, but then no
/// transaction happens, so the toll total is zero by convention.
pub fn open_loop_cost(
    cfg: &ScenarioConfig,
    model: &dyn LaneChoiceModel,
    q3: f64,
    steps: usize,
) -> Result<CostBreakdown, AnalysisError> {
    let DemandSpec::Constant { q1, q2 } = cfg.demand else {
        return Err(AnalysisError::NonConstantDemand);
    };
    let demand = DemandSample { q1, q2 };
    let caps = cfg.capacities;
    let max_flow = caps.c1 - demand.q1;
    if !(0.0..=max_flow).contains(&q3) {
        return Err(AnalysisError::InfeasibleFlow { q3, max: max_flow });
    }

    let zeta = caps.c1 - demand.q1 - q3;
    let dt = cfg.run.dt;
    let mut lanes = cfg.initial.lanes;
    let mut phi2 = 0.0;
    let mut phi3 = 0.0;
    for _ in 0..steps {
        let w = queueing_time_diff(&lanes, &caps);
        let u = if q3 > 0.0 {
            model.inverse_price(zeta, w, &demand, &caps)?
        } else {
            f64::INFINITY
        };
        if q3 > 0.0 {
            phi3 += q3 * u * dt;
        }
        let mean_vot = model.gp_mean_vot(u, w).ok_or(AnalysisError::NoVotSemantics)?;
        phi2 += (demand.q2 - q3) * (lanes.lambda2 / caps.c2) * mean_vot * dt;
        lanes = queue_step(&lanes, &demand, zeta, &caps, dt);
    }
    Ok(CostBreakdown::new(phi2, phi3))
}

/// Total cost at each fixed paying-flow level of the grid.
///
/// Brute-force verification that throughput maximization is (approximately)
/// cost minimization: over a feasible grid the cost should fall as the flow
/// approaches `c1 - q1`, putting the argmin at the largest feasible level.
pub fn fixed_flow_cost_sweep(
    cfg: &ScenarioConfig,
    model: &dyn LaneChoiceModel,
    grid: &[f64],
) -> Result<Vec<(f64, CostBreakdown)>, AnalysisError> {
    let steps = crate::domain::validate_scenario(cfg)
        .map(|v| v.steps)
        .unwrap_or_else(|_| (cfg.run.horizon / cfg.run.dt).round() as usize);
    grid.iter()
        .map(|&q3| open_loop_cost(cfg, model, q3, steps).map(|c| (q3, c)))
        .collect()
}

/// Linearized behavior of the closed loop near the settled state.
#[derive(Clone, Copy, Debug)]
pub struct StabilityReport {
    /// Effective gain denominator `c = A'(0) + B'(0)/(w0 * t_eval)`.
    pub effective_gain: f64,
    /// Eigenvalue of the queue-free mode, `-k2/c`.
    pub queue_free_eigenvalue: f64,
    /// Eigenvalues of the queued mode as (re, im) pairs: the roots of
    /// `s^2 + (k2/c) s + k1/c`.
    pub queued_eigenvalues: [(f64, f64); 2],
    pub stable: bool,
    pub max_eigenvalue_magnitude: f64,
}

impl StabilityReport {
    /// The explicit-Euler step bound: a mode of magnitude `|s|` is resolved
    /// only while `|s| <= 2/dt`. Past that the discretization itself diverges,
    /// which is how too-coarse steps destabilize an analytically stable loop.
    pub fn is_stiff_for(&self, dt: f64) -> bool {
        self.max_eigenvalue_magnitude > 2.0 / dt
    }
}

/// Stability of the two linear modes given the price-law derivatives at zero.
pub fn stability_from_derivatives(
    slope_derivative: f64,
    intercept_derivative: f64,
    w0: f64,
    gains: &Gains,
    t_eval: f64,
) -> Result<StabilityReport, AnalysisError> {
    let c = slope_derivative + intercept_derivative / (w0 * t_eval);
    if !(c.is_finite() && c > 0.0) {
        return Err(AnalysisError::AssumptionViolated { c });
    }
    let queue_free = -gains.k2 / c;

    // Roots of s^2 + (k2/c) s + (k1/c).
    let p = gains.k2 / c;
    let q = gains.k1 / c;
    let disc = p * p - 4.0 * q;
    let queued: [(f64, f64); 2] = if disc >= 0.0 {
        let root = disc.sqrt();
        [((-p + root) / 2.0, 0.0), ((-p - root) / 2.0, 0.0)]
    } else {
        let imag = (-disc).sqrt() / 2.0;
        [(-p / 2.0, imag), (-p / 2.0, -imag)]
    };

    let stable = queue_free < 0.0 && queued.iter().all(|(re, _)| *re < 0.0);
    let max_mag = queued
        .iter()
        .map(|(re, im)| (re * re + im * im).sqrt())
        .fold(queue_free.abs(), f64::max);

    Ok(StabilityReport {
        effective_gain: c,
        queue_free_eigenvalue: queue_free,
        queued_eigenvalues: queued,
        stable,
        max_eigenvalue_magnitude: max_mag,
    })
}

/// Evaluates the model's price-law derivatives at zero residual and reports
/// the linearized stability at evaluation time `t_eval`.
pub fn linearized_stability(
    model: &dyn LaneChoiceModel,
    demand: &DemandSample,
    caps: &Capacities,
    gains: &Gains,
    t_eval: f64,
) -> Result<StabilityReport, AnalysisError> {
    let (da, db) = model.affine_derivatives_at_zero(demand, caps)?;
    let w0 = equilibrium_growth_rate(demand, caps)?;
    stability_from_derivatives(da, db, w0, gains, t_eval)
}
