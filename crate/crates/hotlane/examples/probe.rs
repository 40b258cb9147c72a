// Scratch calibration probe; not part of the deliverable.
use hotlane::analysis::{fixed_flow_cost_sweep, linearized_stability};
use hotlane::choice::ChoiceSpec;
use hotlane::domain::*;
use hotlane::engine::{detect_convergence, run, DemandSpec};
use hotlane::estimation::{build_empirical_cdf, empirical_pdf, harvest_cdf_points, logit_vot_series};

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

fn slope(records: &[StepRecord], t_from: f64) -> f64 {
    let pts: Vec<(f64, f64)> = records.iter().filter(|r| r.t >= t_from).map(|r| (r.t, r.u_applied)).collect();
    let n = pts.len() as f64;
    let tbar = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ubar = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - tbar) * (p.1 - ubar)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - tbar) * (p.0 - tbar)).sum();
    num / den
}

fn main() {
    // ---- logit constant ----
    let trace = run(&logit_cfg()).unwrap();
    let r0 = &trace.records[0];
    println!("LOGIT first: lambda1={} zeta={} u={} p={} w={}", r0.lambda1, r0.zeta, r0.u_applied, r0.p, r0.w);
    let max_l1 = trace.records.iter().map(|r| r.lambda1).fold(0.0, f64::max);
    let max_zeta = trace.records.iter().map(|r| r.zeta).fold(f64::MIN, f64::max);
    println!("LOGIT max lambda1={max_l1} max zeta={max_zeta}");
    let after4 = trace.records.iter().filter(|r| r.t > 4.0).map(|r| r.lambda1).fold(0.0, f64::max);
    println!("LOGIT max lambda1 after t=4: {after4:e}");
    println!("LOGIT conv(0.05,0.05) = {:?}", detect_convergence(&trace, 0.05, 0.05));
    println!("LOGIT conv(1e-6,1e-6) = {:?}", detect_convergence(&trace, 1e-6, 1e-6));
    let last = trace.records.last().unwrap();
    println!("LOGIT a(20)={} b(20)={} (targets 0.5, {})", last.a, last.b, std::f64::consts::LN_2);
    println!("LOGIT slope last5 = {} (target {})", slope(&trace.records, 15.0), 1.0 / 6.0);
    let pis = logit_vot_series(&trace, 1.0);
    let pi_err = pis.iter().map(|(_, p)| (p - 0.5).abs()).fold(0.0, f64::max);
    println!("LOGIT pi_hat: n={} max|err|={:e}", pis.len(), pi_err);
    let clamped = trace.records.iter().filter(|r| r.clamped).count();
    println!("LOGIT clamped steps = {clamped}");

    // mode-1 decay rate cross-validation
    let t_q = trace.records.iter().find(|r| r.t > 1.0 && r.lambda1 < 1e-9).map(|r| r.t).unwrap();
    let t_c = detect_convergence(&trace, 1e-6, 1e-6).unwrap_or(20.0);
    let t_mid = 0.5 * (t_q + t_c);
    let dt = 0.1 / 60.0;
    let win = 0.25;
    let zeta_at = |t: f64| trace.records[(t / dt).round() as usize].zeta.abs().max(1e-300);
    let measured = (zeta_at(t_mid + win).ln() - zeta_at(t_mid - win).ln()) / (2.0 * win);
    let model = logit_cfg().choice.build().unwrap();
    let rep = linearized_stability(model.as_ref(), &DemandSample { q1: 10.0, q2: 60.0 }, &Capacities { c1: 30.0, c2: 30.0 }, &logit_cfg().gains, t_mid).unwrap();
    println!("LOGIT decay: t_q={t_q} t_c={t_c} t_mid={t_mid} measured={measured} eig={}", rep.queue_free_eigenvalue);

    // ---- UE constant ----
    let mut ue = logit_cfg();
    ue.choice = ChoiceSpec::Ue { distribution: hotlane::choice::DistributionSpec::Exponential { rate: 2.0 } };
    let trace_ue = run(&ue).unwrap();
    let r0 = &trace_ue.records[0];
    println!("UE first: lambda1={} zeta={} p={:e}", r0.lambda1, r0.zeta, r0.p);
    let last = trace_ue.records.last().unwrap();
    println!("UE a(20)={} b(20)={} (targets {}, 0)", last.a, last.b, 0.5 * 3.0f64.ln());
    println!("UE slope last5 = {} (target {})", slope(&trace_ue.records, 15.0), 3.0f64.ln() / 6.0);
    println!("UE conv(0.05,0.05) = {:?}", detect_convergence(&trace_ue, 0.05, 0.05));
    let clamped = trace_ue.records.iter().filter(|r| r.clamped).count();
    let degen = trace_ue.records.iter().filter(|r| r.degenerate_w).count();
    println!("UE clamped={clamped} degenerate={degen} min_u={}", trace_ue.records.iter().map(|r| r.u_applied).fold(f64::MAX, f64::min));
    let pts = harvest_cdf_points(&trace_ue);
    let cdf = build_empirical_cdf(&pts);
    let sup = cdf.points.iter().map(|p| (p.f_hat - (1.0 - (-2.0 * p.x).exp())).abs()).fold(0.0, f64::max);
    println!("UE cdf points={} pooled={} sup_err={:e}", cdf.points.len(), cdf.pooled, sup);
    let pdf = empirical_pdf(&pts).unwrap();
    let pdf_err = pdf.iter().map(|(x, f)| (f - 2.0 * (-2.0 * x).exp()).abs()).fold(0.0, f64::max);
    let x_min = pdf.iter().map(|p| p.0).fold(f64::MAX, f64::min);
    let x_max = pdf.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    println!("UE pdf points={} max_err={} x range [{x_min}, {x_max}]", pdf.len(), pdf_err);

    // ---- coarse step ----
    for (dt_c, horizon) in [(1.0 / 60.0, 250.0), (1.0 / 60.0, 300.0), (0.1 / 60.0, 300.0)] {
        let mut cfg = logit_cfg();
        cfg.run.dt = dt_c;
        cfg.run.horizon = horizon;
        match run(&cfg) {
            Ok(tr) => {
                let tail_max_zeta = tr.records.iter().filter(|r| r.t > horizon - 20.0).map(|r| r.zeta.abs()).fold(0.0, f64::max);
                let tail_max_l1 = tr.records.iter().filter(|r| r.t > horizon - 20.0).map(|r| r.lambda1).fold(0.0, f64::max);
                println!(
                    "dt={dt_c:.6} T={horizon}: conv(0.05)={:?} conv(0.01)={:?} tail|zeta|max={tail_max_zeta:e} tail l1 max={tail_max_l1:e}",
                    detect_convergence(&tr, 0.05, 0.05),
                    detect_convergence(&tr, 0.01, 0.01),
                );
            }
            Err(e) => println!("dt={dt_c:.6} T={horizon}: ABORT {e}"),
        }
    }

    // ---- Poisson 20 seeds ----
    for variant in ["logit", "ue"] {
        let mut conv_count = 0;
        let mut worst: f64 = 0.0;
        let mut pi_means = Vec::new();
        for seed in 1..=20u64 {
            let mut cfg = logit_cfg();
            if variant == "ue" {
                cfg.choice = ChoiceSpec::Ue { distribution: hotlane::choice::DistributionSpec::Exponential { rate: 2.0 } };
            }
            cfg.demand = DemandSpec::Poisson { mean1: 10.0, mean2: 60.0, resample_every: 1.0 };
            cfg.run.seed = seed;
            let tr = run(&cfg).unwrap();
            let conv = detect_convergence(&tr, 0.5, 1.0);
            if let Some(t) = conv {
                if t < 10.0 { conv_count += 1; }
            }
            // what eps_zeta would hold from t=10 on?
            let tail_zeta = tr.records.iter().filter(|r| r.t >= 10.0).map(|r| r.zeta.abs()).fold(0.0, f64::max);
            let tail_l1 = tr.records.iter().filter(|r| r.t >= 10.0).map(|r| r.lambda1).fold(0.0, f64::max);
            worst = worst.max(tail_zeta);
            if variant == "logit" {
                let pis = logit_vot_series(&tr, 1.0);
                let tail: Vec<f64> = pis.iter().filter(|(t, _)| *t >= 15.0).map(|(_, p)| *p).collect();
                pi_means.push(tail.iter().sum::<f64>() / tail.len() as f64);
            }
            if seed <= 3 {
                println!("{variant} seed {seed}: conv={conv:?} tail|zeta|max={tail_zeta:.2} tail l1 max={tail_l1:.3}");
            }
        }
        println!("{variant} poisson: {conv_count}/20 converged <10min at (0.5,1.0); worst tail zeta {worst:.2}");
        if !pi_means.is_empty() {
            println!("logit poisson pi_hat means: min={:?} max={:?}", pi_means.iter().cloned().fold(f64::MAX, f64::min), pi_means.iter().cloned().fold(f64::MIN, f64::max));
        }
    }

    // ---- cost sweep ----
    let cfg = logit_cfg();
    let model = cfg.choice.build().unwrap();
    let sweep = fixed_flow_cost_sweep(&cfg, model.as_ref(), &[0.0, 5.0, 10.0, 15.0, 20.0]).unwrap();
    for (q3, c) in &sweep {
        println!("sweep q3={q3}: phi2={:.1} phi3={:.1} phi={:.1}", c.phi2, c.phi3, c.phi);
    }

    // timing
    let t0 = std::time::Instant::now();
    let _ = run(&logit_cfg()).unwrap();
    println!("12000-step run: {:?}", t0.elapsed());
}
