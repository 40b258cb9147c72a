//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! with the measured values (run with `--nocapture` to see the lines for
//! passing criteria too).

mod common;

use common::{logit_constant, logit_poisson, price_slope, ue_constant, ue_poisson};
use hotlane::analysis::{fixed_flow_cost_sweep, stability_from_derivatives};
use hotlane::domain::{ControllerState, Gains, LaneState};
use hotlane::engine::{detect_convergence, run, SimError};
use hotlane::estimation::{build_empirical_cdf, empirical_pdf, harvest_cdf_points, logit_vot_series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gate(id: &str, pass: bool, detail: &str) {
    println!("acceptance {id}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance {id} FAILED — {detail}");
}

#[test]
fn criterion_01_logit_phase_start() {
    let trace = run(&logit_constant()).unwrap();
    let r = &trace.records[0];
    let pass = r.lambda1 == 1.0 && (r.zeta + 8.63).abs() <= 0.05;
    gate(
        "1 (logit phase start)",
        pass,
        &format!("first step (lambda1, zeta) = ({}, {:.4}), target (1, -8.63 +/- 0.05)", r.lambda1, r.zeta),
    );
}

#[test]
fn criterion_02_logit_transient() {
    let trace = run(&logit_constant()).unwrap();
    let max_l1 = trace.records.iter().map(|r| r.lambda1).fold(0.0, f64::max);
    let late_l1 = trace
        .records
        .iter()
        .filter(|r| r.t > 4.0)
        .map(|r| r.lambda1)
        .fold(0.0, f64::max);
    let pass = (2.6..=3.0).contains(&max_l1) && late_l1 < 0.01;
    gate(
        "2 (logit transient)",
        pass,
        &format!("max lambda1 = {max_l1:.3} (band [2.6, 3.0]), after 4 min <= {late_l1:.2e} (< 0.01)"),
    );
}

#[test]
fn criterion_03_logit_equilibrium_slope() {
    let trace = run(&logit_constant()).unwrap();
    let slope = price_slope(&trace, 15.0);
    let target = 0.5 / 3.0;
    let rel = (slope - target).abs() / target;
    gate(
        "3 (logit equilibrium slope)",
        rel <= 0.02,
        &format!("last-5-min price slope = {slope:.5} $/min vs {target:.5}, rel err {:.3}%", rel * 100.0),
    );
}

#[test]
fn criterion_04_logit_vot_recovery() {
    let trace = run(&logit_constant()).unwrap();
    let series = logit_vot_series(&trace, 1.0);
    let worst = series.iter().map(|(_, pi)| (pi - 0.5).abs()).fold(0.0, f64::max);
    let pass = series.len() == trace.records.len() && worst <= 1e-6;
    gate(
        "4 (logit VOT recovery)",
        pass,
        &format!("{} valid steps, max |pi_hat - 0.5| = {worst:.2e} (<= 1e-6)", series.len()),
    );
}

#[test]
fn criterion_05_ue_phase_start() {
    let trace = run(&ue_constant()).unwrap();
    let zeta = trace.records[0].zeta;
    gate(
        "5 (UE phase start)",
        (zeta - 19.91).abs() <= 0.05,
        &format!("first step zeta = {zeta:.4}, target 19.91 +/- 0.05"),
    );
}

#[test]
fn criterion_06_ue_distribution_recovery() {
    let trace = run(&ue_constant()).unwrap();
    let raw = harvest_cdf_points(&trace);
    let cdf = build_empirical_cdf(&raw);
    let truth = |x: f64| 1.0 - (-2.0 * x).exp();
    let sup = cdf
        .points
        .iter()
        .map(|p| (p.f_hat - truth(p.x)).abs())
        .fold(0.0, f64::max);
    let pdf = empirical_pdf(&raw).unwrap();
    let pdf_err = pdf
        .iter()
        .map(|(x, f)| (f - 2.0 * (-2.0 * x).exp()).abs())
        .fold(0.0, f64::max);
    let pass = sup <= 0.01 && pdf_err <= 0.05;
    gate(
        "6 (UE distribution recovery)",
        pass,
        &format!(
            "CDF sup err = {sup:.2e} (<= 0.01) over {} points, PDF max err = {pdf_err:.4} (<= 0.05) over {} interior points",
            cdf.points.len(),
            pdf.len()
        ),
    );
}

#[test]
fn criterion_07_cost_sweep_argmin_at_full_throughput() {
    let cfg = logit_constant();
    let model = cfg.choice.build().unwrap();
    let grid = [0.0, 5.0, 10.0, 15.0, 20.0];
    let sweep = fixed_flow_cost_sweep(&cfg, model.as_ref(), &grid).unwrap();
    let strictly_decreasing = sweep.windows(2).all(|w| w[1].1.phi < w[0].1.phi);
    let argmin = sweep
        .iter()
        .min_by(|a, b| a.1.phi.partial_cmp(&b.1.phi).unwrap())
        .unwrap()
        .0;
    let costs: Vec<String> = sweep.iter().map(|(q3, c)| format!("{q3}:{:.0}", c.phi)).collect();
    let pass = strictly_decreasing && argmin == 20.0;
    gate(
        "7 (cost sweep)",
        pass,
        &format!("phi over grid {{{}}}, argmin at q3 = {argmin}", costs.join(", ")),
    );
}

#[test]
fn criterion_08_stability_property_suite() {
    // 100 random admissible instances: positive gains, nonnegative price-law
    // derivatives with a positive sum, congested growth rate, positive time.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut all_stable = true;
    for _ in 0..100 {
        let gains = Gains {
            k1: rng.gen_range(0.01..2.0),
            k2: rng.gen_range(0.01..2.0),
            k3: rng.gen_range(0.01..2.0),
            k4: rng.gen_range(0.01..2.0),
        };
        let da = rng.gen_range(0.0..1.0);
        let db = rng.gen_range(1e-3..1.0);
        let w0 = rng.gen_range(0.05..2.0);
        let t_eval = rng.gen_range(0.1..300.0);
        let report = stability_from_derivatives(da, db, w0, &gains, t_eval).unwrap();
        if !report.stable || report.queued_eigenvalues.iter().any(|(re, _)| *re >= 0.0) {
            all_stable = false;
        }
    }

    // Lock-in: started on the settled profile, the state stays inside the
    // 1e-6 bands for the whole constant-demand horizon.
    let mut eq_logit = logit_constant();
    eq_logit.initial.lanes = LaneState { lambda1: 0.0, lambda2: 2.0 };
    eq_logit.initial.controller = ControllerState { a: 0.5, b: std::f64::consts::LN_2 };
    let mut eq_ue = ue_constant();
    eq_ue.initial.lanes = LaneState { lambda1: 0.0, lambda2: 2.0 };
    eq_ue.initial.controller = ControllerState { a: 0.5 * 3.0f64.ln(), b: 0.0 };
    let mut lock_in = true;
    let mut worst: f64 = 0.0;
    for cfg in [eq_logit, eq_ue] {
        let trace = run(&cfg).unwrap();
        let max_dev = trace
            .records
            .iter()
            .map(|r| r.zeta.abs().max(r.lambda1))
            .fold(0.0, f64::max);
        worst = worst.max(max_dev);
        lock_in &= detect_convergence(&trace, 1e-6, 1e-6) == Some(0.0) && max_dev <= 1e-6;
    }

    gate(
        "8 (stability property suite)",
        all_stable && lock_in,
        &format!("100/100 random admissible instances stable = {all_stable}, lock-in within 1e-6 bands (worst deviation {worst:.2e})"),
    );
}

#[test]
fn criterion_09_poisson_robustness() {
    let mut detail = String::new();
    let mut conv_ok = true;
    for (name, build) in [
        ("logit", logit_poisson as fn(u64) -> hotlane::domain::ScenarioConfig),
        ("ue", ue_poisson as fn(u64) -> hotlane::domain::ScenarioConfig),
    ] {
        let mut converged = 0;
        for seed in 1..=20u64 {
            let trace = run(&build(seed)).unwrap();
            if matches!(detect_convergence(&trace, 0.5, 1.0), Some(t) if t < 10.0) {
                converged += 1;
            }
        }
        conv_ok &= converged >= 18;
        detail.push_str(&format!("{name}: {converged}/20 converged before 10 min at eps=(0.5, 1.0); "));
    }

    let mut means = Vec::new();
    for seed in 1..=20u64 {
        let trace = run(&logit_poisson(seed)).unwrap();
        let tail: Vec<f64> = logit_vot_series(&trace, 1.0)
            .into_iter()
            .filter(|(t, _)| *t >= 15.0)
            .map(|(_, pi)| pi)
            .collect();
        means.push(tail.iter().sum::<f64>() / tail.len() as f64);
    }
    let grand_mean = means.iter().sum::<f64>() / means.len() as f64;
    let pi_ok = (grand_mean - 0.5).abs() <= 0.05;
    detail.push_str(&format!("mean pi_hat over last 5 min = {grand_mean:.6} (0.5 +/- 0.05)"));

    gate("9 (Poisson robustness)", conv_ok && pi_ok, &detail);
}

#[test]
fn criterion_10_coarse_step_instability() {
    // Coarse-step twin of the reference run over a 300-minute horizon. The
    // linearized magnitudes cross the explicit-Euler bound for dt = 1/60 a
    // little after t = 250, so that run must either abort on a non-finite
    // state or fail to be converged from any point up to t = 250; the
    // dt = 0.1/60 twin must converge well before then.
    let mut coarse = logit_constant();
    coarse.run.dt = 1.0 / 60.0;
    coarse.run.horizon = 300.0;
    let (coarse_fails, coarse_outcome) = match run(&coarse) {
        Err(SimError::NonFinite { field, step, t }) => {
            (true, format!("numeric abort ({field} at step {step}, t = {t:.1})"))
        }
        Err(e) => (true, format!("abort ({e})")),
        Ok(trace) => match detect_convergence(&trace, 0.05, 0.05) {
            None => (true, "no convergence (band broken through the end of the run)".to_string()),
            Some(t) if t > 250.0 => (true, format!("settled only at t = {t:.1} (> 250)")),
            Some(t) => (false, format!("converged at t = {t:.2}")),
        },
    };

    let mut fine = logit_constant();
    fine.run.horizon = 300.0;
    let fine_trace = run(&fine).unwrap();
    let fine_conv = detect_convergence(&fine_trace, 0.05, 0.05);
    let fine_ok = matches!(fine_conv, Some(t) if t <= 250.0);

    gate(
        "10 (coarse step instability)",
        coarse_fails && fine_ok,
        &format!("dt=1/60: {coarse_outcome}; dt=0.1/60: converged at {fine_conv:?} min"),
    );
}

#[test]
fn desk_scale_runtime() {
    // Each bundled 12,000-step scenario must complete in well under a second.
    let t0 = std::time::Instant::now();
    let _ = run(&logit_constant()).unwrap();
    let _ = run(&ue_constant()).unwrap();
    let elapsed = t0.elapsed();
    gate(
        "desk scale",
        elapsed.as_secs_f64() < 1.0,
        &format!("two 12,000-step runs in {elapsed:?}"),
    );
}
