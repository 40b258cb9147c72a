//! The model-free pricing law `u = a*w + b` and the two integral controllers
//! that adapt its coefficients.
//!
//! This module deliberately depends on nothing but the domain types. The
//! controller sees only the measured triple (w, lambda1, zeta); no lane-choice
//! or traffic-flow quantity enters the update laws.

use crate::domain::{ControllerState, Gains};

/// Evaluates the pricing law. Returns `(u_raw, u_applied)`.
///
/// With the floor enabled the emitted price is clamped at zero; the raw value
/// is reported alongside so clamping stays auditable.
pub fn compute_price(ctrl: &ControllerState, w: f64, floor: bool) -> (f64, f64) {
    let u_raw = ctrl.a * w + ctrl.b;
    let u_applied = if floor { u_raw.max(0.0) } else { u_raw };
    (u_raw, u_applied)
}

/// One explicit-Euler step of the two integrators.
///
/// A queue on the HOT lanes pushes both coefficients up (price rises); positive
/// residual capacity pulls them down (price falls). The integrators always
/// consume the true `(lambda1, zeta)`, even while the emitted price is clamped.
pub fn controller_step(
    ctrl: &ControllerState,
    lambda1: f64,
    zeta: f64,
    gains: &Gains,
    dt: f64,
) -> ControllerState {
    ControllerState {
        a: ctrl.a + (gains.k1 * lambda1 - gains.k2 * zeta) * dt,
        b: ctrl.b + (gains.k3 * lambda1 - gains.k4 * zeta) * dt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GAINS: Gains = Gains { k1: 0.1, k2: 0.1, k3: 0.2, k4: 0.2 };

    #[test]
    fn reference_initial_price() {
        let ctrl = ControllerState { a: 0.25, b: 0.1 };
        let (raw, applied) = compute_price(&ctrl, 1.0 / 30.0, true);
        assert!((raw - 0.10833333333333334).abs() < 1e-15);
        assert_eq!(raw, applied);
    }

    #[test]
    fn zero_controller_prices_at_zero() {
        let ctrl = ControllerState { a: 0.0, b: 0.0 };
        assert_eq!(compute_price(&ctrl, 123.4, true), (0.0, 0.0));
    }

    #[test]
    fn floor_clamps_negative_prices() {
        let ctrl = ControllerState { a: 0.5, b: -0.2 };
        let (raw, applied) = compute_price(&ctrl, 0.1, true);
        assert!((raw + 0.15).abs() < 1e-15);
        assert_eq!(applied, 0.0);
        let (raw_unfloored, applied_unfloored) = compute_price(&ctrl, 0.1, false);
        assert_eq!(raw_unfloored, applied_unfloored);
    }

    #[test]
    fn first_step_of_the_reference_run() {
        let ctrl = ControllerState { a: 0.25, b: 0.1 };
        let next = controller_step(&ctrl, 1.0, -8.63, &GAINS, 1.0 / 600.0);
        // a + (k1*1 + k2*8.63)/600 = 0.25 + 0.963/600
        assert!((next.a - 0.251605).abs() < 1e-12);
        assert!((next.b - (0.1 + (0.2 + 0.2 * 8.63) / 600.0)).abs() < 1e-15);
    }

    #[test]
    fn ideal_state_is_a_fixed_point() {
        let ctrl = ControllerState { a: 0.37, b: -0.05 };
        let next = controller_step(&ctrl, 0.0, 0.0, &GAINS, 1.0 / 600.0);
        assert_eq!(next, ctrl);
    }

    #[test]
    fn hot_queue_raises_the_offset() {
        let ctrl = ControllerState { a: 0.0, b: 0.0 };
        let next = controller_step(&ctrl, 2.0, 0.0, &GAINS, 1.0);
        assert!((next.b - 0.4).abs() < 1e-15);
        assert!(next.a > 0.0);
    }

    proptest! {
        #[test]
        fn fixed_point_holds_for_any_positive_gains(
            k1 in 1e-3..10.0f64, k2 in 1e-3..10.0f64,
            k3 in 1e-3..10.0f64, k4 in 1e-3..10.0f64,
            a in -5.0..5.0f64, b in -5.0..5.0f64,
        ) {
            let gains = Gains { k1, k2, k3, k4 };
            let ctrl = ControllerState { a, b };
            prop_assert_eq!(controller_step(&ctrl, 0.0, 0.0, &gains, 0.01), ctrl);
        }

        #[test]
        fn updates_are_monotone_in_queue_and_residual(
            k1 in 1e-3..10.0f64, k2 in 1e-3..10.0f64,
            k3 in 1e-3..10.0f64, k4 in 1e-3..10.0f64,
            lambda1 in 0.0..10.0f64, zeta in -20.0..20.0f64,
        ) {
            let gains = Gains { k1, k2, k3, k4 };
            let ctrl = ControllerState { a: 0.0, b: 0.0 };
            let base = controller_step(&ctrl, lambda1, zeta, &gains, 0.01);
            let more_queue = controller_step(&ctrl, lambda1 + 1.0, zeta, &gains, 0.01);
            let more_residual = controller_step(&ctrl, lambda1, zeta + 1.0, &gains, 0.01);
            prop_assert!(more_queue.a > base.a && more_queue.b > base.b);
            prop_assert!(more_residual.a < base.a && more_residual.b < base.b);
        }
    }
}
