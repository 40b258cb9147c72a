//! Online recovery of lane-choice parameters from observed `(u, w, q2, q3)`
//! streams.
//!
//! Estimation is strictly observational: nothing here feeds back into control.
//! The logit estimator is algebraic inversion of the choice formula, so in a
//! noise-free loop it recovers the true VOT at every valid step. For UE models
//! each step contributes one point of the empirical VOT distribution.

use thiserror::Error;

use crate::engine::SimTrace;

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum EstimationError {
    #[error("need at least two distinct abscissae to differentiate")]
    InsufficientData,
}

/// One empirical CDF sample: `F_hat(x) = 1 - q3/q2` observed at `x = u/w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalCdfPoint {
    pub x: f64,
    pub f_hat: f64,
}

/// Point estimate of the logit VOT from one observation:
/// `pi_hat = (u - ln((q2-q3)/q3)/alpha) / w`.
///
/// Returns `None` (skip signal) when the step carries no information:
/// `w <= 0` or a paying fraction at 0 or 1.
pub fn estimate_logit_vot(u: f64, w: f64, q2: f64, q3: f64, alpha: f64) -> Option<f64> {
    if w <= 0.0 || q3 <= 0.0 || q3 >= q2 {
        return None;
    }
    Some((u - ((q2 - q3) / q3).ln() / alpha) / w)
}

/// Turns one observation into an empirical CDF sample, or skips it.
///
/// Saturated steps are uninformative except for the exact `u = 0, q3 = q2`
/// case, which pins the support floor at `F(0) = 0`.
pub fn accumulate_cdf_point(u: f64, w: f64, q2: f64, q3: f64) -> Option<EmpiricalCdfPoint> {
    if w <= 0.0 || u < 0.0 || q2 <= 0.0 {
        return None;
    }
    if q3 > 0.0 && q3 < q2 {
        return Some(EmpiricalCdfPoint { x: u / w, f_hat: 1.0 - q3 / q2 });
    }
    if q3 >= q2 && u == 0.0 {
        return Some(EmpiricalCdfPoint { x: 0.0, f_hat: 0.0 });
    }
    None
}

/// Empirical CDF assembled from raw samples: sorted by `x`, near-duplicate
/// abscissae merged, and isotonic pooling applied if sorting alone left
/// decreasing stretches beyond tolerance.
#[derive(Clone, Debug)]
pub struct EmpiricalCdf {
    pub points: Vec<EmpiricalCdfPoint>,
    /// True when pool-adjacent-violators had to repair a monotonicity breach.
    pub pooled: bool,
}

const X_DEDUP_TOL: f64 = 1e-9;
const MONOTONE_TOL: f64 = 1e-9;

pub fn build_empirical_cdf(raw: &[EmpiricalCdfPoint]) -> EmpiricalCdf {
    let mut pts: Vec<EmpiricalCdfPoint> = raw.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());

    // Merge x-groups within tolerance, keeping mean x and mean F_hat.
    let mut merged: Vec<(f64, f64, f64)> = Vec::new(); // (x sum, f sum, count)
    for p in pts {
        match merged.last_mut() {
            Some(last) if (p.x - last.0 / last.2).abs() <= X_DEDUP_TOL => {
                last.0 += p.x;
                last.1 += p.f_hat;
                last.2 += 1.0;
            }
            _ => merged.push((p.x, p.f_hat, 1.0)),
        }
    }

    let mut xs: Vec<f64> = merged.iter().map(|m| m.0 / m.2).collect();
    let mut fs: Vec<f64> = merged.iter().map(|m| m.1 / m.2).collect();
    let mut weights: Vec<f64> = merged.iter().map(|m| m.2).collect();

    let violated = fs.windows(2).any(|p| p[1] < p[0] - MONOTONE_TOL);
    if violated {
        // Pool adjacent violators: weighted means over maximal decreasing runs.
        let mut i = 0usize;
        while i + 1 < fs.len() {
            if fs[i + 1] < fs[i] - MONOTONE_TOL {
                let pooled_f =
                    (fs[i] * weights[i] + fs[i + 1] * weights[i + 1]) / (weights[i] + weights[i + 1]);
                fs[i] = pooled_f;
                weights[i] += weights[i + 1];
                fs.remove(i + 1);
                weights.remove(i + 1);
                let pooled_x = xs[i + 1];
                xs[i] = pooled_x.min(xs[i]);
                xs.remove(i + 1);
                while i > 0 && fs[i] < fs[i - 1] - MONOTONE_TOL {
                    let pooled_f = (fs[i - 1] * weights[i - 1] + fs[i] * weights[i])
                        / (weights[i - 1] + weights[i]);
                    fs[i - 1] = pooled_f;
                    weights[i - 1] += weights[i];
                    xs[i - 1] = xs[i - 1].min(xs[i]);
                    fs.remove(i);
                    weights.remove(i);
                    xs.remove(i);
                    i -= 1;
                }
            } else {
                i += 1;
            }
        }
    }

    EmpiricalCdf {
        points: xs
            .into_iter()
            .zip(fs)
            .map(|(x, f_hat)| EmpiricalCdfPoint { x, f_hat })
            .collect(),
        pooled: violated,
    }
}

/// Differentiates the empirical CDF into density samples.
///
/// Centered finite differences at interior points after sorting and
/// deduplication; with exactly two distinct abscissae the single two-point
/// slope is reported at their midpoint. Slopes are clipped below at zero.
pub fn empirical_pdf(raw: &[EmpiricalCdfPoint]) -> Result<Vec<(f64, f64)>, EstimationError> {
    let cdf = build_empirical_cdf(raw);
    let pts = &cdf.points;
    if pts.len() < 2 {
        return Err(EstimationError::InsufficientData);
    }
    if pts.len() == 2 {
        let slope = (pts[1].f_hat - pts[0].f_hat) / (pts[1].x - pts[0].x);
        return Ok(vec![(0.5 * (pts[0].x + pts[1].x), slope.max(0.0))]);
    }
    Ok((1..pts.len() - 1)
        .map(|i| {
            let slope = (pts[i + 1].f_hat - pts[i - 1].f_hat) / (pts[i + 1].x - pts[i - 1].x);
            (pts[i].x, slope.max(0.0))
        })
        .collect())
}

/// Logit VOT estimates along a trace, one `(t, pi_hat)` per valid step.
pub fn logit_vot_series(trace: &SimTrace, alpha: f64) -> Vec<(f64, f64)> {
    trace
        .records
        .iter()
        .filter_map(|r| {
            estimate_logit_vot(r.u_applied, r.w, r.q2, r.q3, alpha).map(|pi| (r.t, pi))
        })
        .collect()
}

/// Empirical CDF samples harvested from every informative step of a trace.
pub fn harvest_cdf_points(trace: &SimTrace) -> Vec<EmpiricalCdfPoint> {
    trace
        .records
        .iter()
        .filter_map(|r| accumulate_cdf_point(r.u_applied, r.w, r.q2, r.q3))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_the_logit_vot_at_the_reference_first_step() {
        // Close the loop algebraically: q3 comes from the logit formula itself.
        let u: f64 = 0.10833333333333334;
        let w: f64 = 1.0 / 30.0;
        let p = 1.0 / (1.0 + (u - 0.5 * w).exp());
        let q3 = 60.0 * p;
        let pi = estimate_logit_vot(u, w, 60.0, q3, 1.0).unwrap();
        assert!((pi - 0.5).abs() < 1e-12, "pi_hat = {pi}");
    }

    #[test]
    fn log_term_vanishes_at_the_even_split() {
        for alpha in [0.5, 1.0, 3.0] {
            let (pi, w) = (0.8, 0.4);
            let u = pi * w;
            let est = estimate_logit_vot(u, w, 60.0, 30.0, alpha).unwrap();
            assert!((est - pi).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_observations_are_skipped() {
        assert_eq!(estimate_logit_vot(0.1, 0.0, 60.0, 30.0, 1.0), None);
        assert_eq!(estimate_logit_vot(0.1, -0.5, 60.0, 30.0, 1.0), None);
        assert_eq!(estimate_logit_vot(0.1, 0.5, 60.0, 0.0, 1.0), None);
        assert_eq!(estimate_logit_vot(0.1, 0.5, 60.0, 60.0, 1.0), None);
    }

    #[test]
    fn cdf_point_matches_the_reference_run() {
        let u: f64 = 0.10833333333333334;
        let w: f64 = 1.0 / 30.0;
        let p = (-2.0 * u / w).exp();
        let q3 = 60.0 * p;
        let point = accumulate_cdf_point(u, w, 60.0, q3).unwrap();
        assert!((point.x - 3.25).abs() < 1e-12);
        assert!((point.f_hat - 0.99850).abs() < 1e-5);
        let truth = 1.0 - (-6.5f64).exp();
        assert!((point.f_hat - truth).abs() < 1e-12);
    }

    #[test]
    fn saturated_points_are_skipped_unless_they_pin_the_origin() {
        assert_eq!(accumulate_cdf_point(0.3, 0.5, 60.0, 60.0), None);
        assert_eq!(accumulate_cdf_point(0.3, 0.5, 60.0, 0.0), None);
        let origin = accumulate_cdf_point(0.0, 0.5, 60.0, 60.0).unwrap();
        assert_eq!(origin, EmpiricalCdfPoint { x: 0.0, f_hat: 0.0 });
    }

    #[test]
    fn pdf_recovers_an_exponential_density_on_an_exact_grid() {
        let pts: Vec<EmpiricalCdfPoint> = (1..=30)
            .map(|i| {
                let x = i as f64 * 0.1;
                EmpiricalCdfPoint { x, f_hat: 1.0 - (-2.0 * x).exp() }
            })
            .collect();
        let pdf = empirical_pdf(&pts).unwrap();
        assert_eq!(pdf.len(), 28);
        let max_err = pdf
            .iter()
            .map(|(x, f)| (f - 2.0 * (-2.0 * x).exp()).abs())
            .fold(0.0, f64::max);
        assert!(max_err <= 0.02, "max_err = {max_err}");
    }

    #[test]
    fn two_points_give_the_midpoint_slope() {
        let pts = [
            EmpiricalCdfPoint { x: 1.0, f_hat: 0.3 },
            EmpiricalCdfPoint { x: 2.0, f_hat: 0.5 },
        ];
        let pdf = empirical_pdf(&pts).unwrap();
        assert_eq!(pdf, vec![(1.5, 0.2)]);
    }

    #[test]
    fn coincident_abscissae_are_an_error() {
        let pts = [
            EmpiricalCdfPoint { x: 1.0, f_hat: 0.3 },
            EmpiricalCdfPoint { x: 1.0, f_hat: 0.4 },
            EmpiricalCdfPoint { x: 1.0 + 1e-12, f_hat: 0.5 },
        ];
        assert_eq!(empirical_pdf(&pts).unwrap_err(), EstimationError::InsufficientData);
    }

    #[test]
    fn isotonic_pooling_repairs_noise_and_flags_it() {
        let pts = [
            EmpiricalCdfPoint { x: 1.0, f_hat: 0.30 },
            EmpiricalCdfPoint { x: 2.0, f_hat: 0.50 },
            EmpiricalCdfPoint { x: 3.0, f_hat: 0.45 },
            EmpiricalCdfPoint { x: 4.0, f_hat: 0.60 },
        ];
        let cdf = build_empirical_cdf(&pts);
        assert!(cdf.pooled);
        for pair in cdf.points.windows(2) {
            assert!(pair[1].f_hat >= pair[0].f_hat - 1e-9);
        }
        let clean = build_empirical_cdf(&pts[..2]);
        assert!(!clean.pooled);
    }

    #[test]
    fn sorted_output_is_nondecreasing_even_with_shuffled_input() {
        let pts = [
            EmpiricalCdfPoint { x: 3.0, f_hat: 0.9 },
            EmpiricalCdfPoint { x: 1.0, f_hat: 0.2 },
            EmpiricalCdfPoint { x: 2.0, f_hat: 0.6 },
        ];
        let cdf = build_empirical_cdf(&pts);
        assert!(!cdf.pooled);
        let xs: Vec<f64> = cdf.points.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![1.0, 2.0, 3.0]);
    }
}
