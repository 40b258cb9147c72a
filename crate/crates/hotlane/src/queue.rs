//! Discrete-time point-queue updates for the two lane groups.
//!
//! The bottleneck discharges at capacity; excess demand accumulates vertically.
//! The max-with-zero form keeps queue lengths from going negative when a queue
//! dissipates within a step.

use crate::domain::{Capacities, DemandSample, LaneState};

/// Advances both queues by one step of length `dt`.
///
/// The HOT queue drains at the residual capacity `zeta`; the GP queue absorbs
/// whatever the system-wide demand surplus leaves after the HOT lanes take
/// their share.
pub fn queue_step(
    state: &LaneState,
    demand: &DemandSample,
    zeta: f64,
    caps: &Capacities,
    dt: f64,
) -> LaneState {
    let lambda1 = (state.lambda1 - zeta * dt).max(0.0);
    let lambda2 = (state.lambda2 + (demand.q1 + demand.q2 - caps.c1 - caps.c2 + zeta) * dt).max(0.0);
    LaneState { lambda1, lambda2 }
}

/// Queueing-time difference `w = lambda2/c2 - lambda1/c1`, in minutes.
///
/// May be negative when the HOT queue is the slower one; callers decide how to
/// handle that regime.
pub fn queueing_time_diff(state: &LaneState, caps: &Capacities) -> f64 {
    state.lambda2 / caps.c2 - state.lambda1 / caps.c1
}
