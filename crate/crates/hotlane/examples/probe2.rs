// Scratch calibration probe #2; not part of the deliverable.
use hotlane::analysis::linearized_stability;
use hotlane::choice::ChoiceSpec;
use hotlane::domain::*;
use hotlane::engine::{detect_convergence, run, DemandSpec};

fn logit_cfg() -> ScenarioConfig {
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

fn ue_cfg() -> ScenarioConfig {
    let mut cfg = logit_cfg();
    cfg.choice =
        ChoiceSpec::Ue { distribution: hotlane::choice::DistributionSpec::Exponential { rate: 2.0 } };
    cfg
}

// least squares of y on x
fn regress(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let xb = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let yb = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - xb) * (p.1 - yb)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - xb) * (p.0 - xb)).sum();
    let slope = num / den;
    (slope, yb - slope * xb)
}

fn main() {
    // Price-line regression u on w over the last 25%.
    for (name, cfg, a0, b0) in [
        ("logit20", logit_cfg(), 0.5, std::f64::consts::LN_2),
        ("ue20", ue_cfg(), 0.5 * 3.0f64.ln(), 0.0),
    ] {
        let trace = run(&cfg).unwrap();
        let cut = 0.75 * cfg.run.horizon;
        let pts: Vec<(f64, f64)> =
            trace.records.iter().filter(|r| r.t >= cut).map(|r| (r.w, r.u_applied)).collect();
        let (slope, intercept) = regress(&pts);
        println!(
            "{name}: u-on-w slope={slope:.6} (A0={a0:.6}, err {:.3}%), intercept={intercept:.6} (B0={b0:.6})",
            (slope - a0) / a0 * 100.0
        );
    }

    // Long-horizon controller-state convergence.
    for (name, mut cfg, a0) in
        [("logit", logit_cfg(), 0.5), ("ue", ue_cfg(), 0.5 * 3.0f64.ln())]
    {
        for horizon in [40.0, 80.0, 160.0, 240.0, 300.0] {
            cfg.run.horizon = horizon;
            let tr = run(&cfg).unwrap();
            let last = tr.records.last().unwrap();
            println!(
                "{name} T={horizon}: a={:.5} ({:+.2}%), b={:.5}",
                last.a,
                (last.a - a0) / a0 * 100.0,
                last.b
            );
        }
    }

    // Equilibrium start: lock-in at 1e-6.
    let mut eq = logit_cfg();
    eq.initial.lanes = LaneState { lambda1: 0.0, lambda2: 0.0 };
    eq.initial.controller = ControllerState { a: 0.5, b: std::f64::consts::LN_2 };
    let tr = run(&eq).unwrap();
    let max_z = tr.records.iter().map(|r| r.zeta.abs()).fold(0.0, f64::max);
    let max_l = tr.records.iter().map(|r| r.lambda1).fold(0.0, f64::max);
    println!("eq-start logit: max|zeta|={max_z:e} max l1={max_l:e} conv={:?}", detect_convergence(&tr, 1e-6, 1e-6));
    let mut eq_ue = ue_cfg();
    eq_ue.initial.lanes = LaneState { lambda1: 0.0, lambda2: 0.0 };
    eq_ue.initial.controller = ControllerState { a: 0.5 * 3.0f64.ln(), b: 0.0 };
    let tr = run(&eq_ue).unwrap();
    let max_z = tr.records.iter().map(|r| r.zeta.abs()).fold(0.0, f64::max);
    println!("eq-start ue: max|zeta|={max_z:e} conv={:?}", detect_convergence(&tr, 1e-6, 1e-6));

    // First-entry vs detect at a realistic band on the transient run.
    let tr = run(&logit_cfg()).unwrap();
    for eps in [0.05, 0.01] {
        let first = tr.records.iter().find(|r| r.lambda1 <= eps && r.zeta.abs() <= eps).map(|r| r.t);
        let det = detect_convergence(&tr, eps, eps);
        println!("logit eps={eps}: first-entry={first:?} detect={det:?}");
    }

    // Decay-rate scan for the queue-free phase.
    let dt = 0.1 / 60.0;
    let zeta_at = |tr: &hotlane::engine::SimTrace, t: f64| tr.records[(t / dt).round() as usize].zeta;
    let t_q = tr.records.iter().find(|r| r.t > 1.0 && r.lambda1 < 1e-12).map(|r| r.t).unwrap();
    println!("logit t_q={t_q} zeta(t_q)={}", zeta_at(&tr, t_q));
    let model = logit_cfg().choice.build().unwrap();
    let demand = DemandSample { q1: 10.0, q2: 60.0 };
    let caps = Capacities { c1: 30.0, c2: 30.0 };
    for t in [3.3, 3.5, 3.8, 4.0, 4.3, 4.6, 5.0, 5.5, 6.0, 7.0] {
        let h = 0.1;
        let rate = ((zeta_at(&tr, t + h).abs().max(1e-300)).ln()
            - (zeta_at(&tr, t - h).abs().max(1e-300)).ln())
            / (2.0 * h);
        let eig = linearized_stability(model.as_ref(), &demand, &caps, &logit_cfg().gains, t)
            .unwrap()
            .queue_free_eigenvalue;
        println!("  t={t}: zeta={:.5} rate={rate:.3} eig={eig:.3} ratio={:.3}", zeta_at(&tr, t), rate / eig);
    }

    // Same scan for UE.
    let tr_ue = run(&ue_cfg()).unwrap();
    let t_q = tr_ue.records.iter().find(|r| r.lambda1 < 1e-12).map(|r| r.t).unwrap();
    println!("ue t_q={t_q}");
    let model = ue_cfg().choice.build().unwrap();
    for t in [4.0, 5.0, 6.0, 8.0, 10.0] {
        let h = 0.1;
        let rate = ((zeta_at(&tr_ue, t + h).abs().max(1e-300)).ln()
            - (zeta_at(&tr_ue, t - h).abs().max(1e-300)).ln())
            / (2.0 * h);
        let eig = linearized_stability(model.as_ref(), &demand, &caps, &ue_cfg().gains, t)
            .unwrap()
            .queue_free_eigenvalue;
        println!("  t={t}: zeta={:.5} rate={rate:.3} eig={eig:.3} ratio={:.3}", zeta_at(&tr_ue, t), rate / eig);
    }

    // Does the UE queue stay empty after t_q? (switching back check)
    let reentry = tr_ue.records.iter().filter(|r| r.t > 4.0 && r.lambda1 > 0.0).count();
    println!("ue steps with lambda1>0 after t=4: {reentry}");
    let reentry = tr.records.iter().filter(|r| r.t > 3.2 && r.lambda1 > 0.0).count();
    println!("logit steps with lambda1>0 after t=3.2: {reentry}");
}
