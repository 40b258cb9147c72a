// Scratch calibration probe #3.
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

fn main() {
    let mut ue = logit_cfg();
    ue.choice = ChoiceSpec::Ue { distribution: hotlane::choice::DistributionSpec::Exponential { rate: 2.0 } };
    let tr = run(&ue).unwrap();
    let dt = 0.1 / 60.0;
    for t in [0.0f64, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 15.0, 19.9] {
        let r = &tr.records[(t / dt).round() as usize];
        println!("UE t={t}: l1={:.6} zeta={:+.4} u={:.4} w={:.5} u/w={:.4}", r.lambda1, r.zeta, r.u_applied, r.w, r.u_applied / r.w);
    }
    let min_l1 = tr.records.iter().map(|r| r.lambda1).fold(f64::MAX, f64::min);
    let zero_steps = tr.records.iter().filter(|r| r.lambda1 == 0.0).count();
    println!("UE min l1 = {min_l1:e}, steps at exactly 0: {zero_steps}");
    // first time lambda1 <= 1e-6
    let t_small = tr.records.iter().find(|r| r.lambda1 <= 1e-6).map(|r| r.t);
    println!("UE first l1<=1e-6: {t_small:?}");

    // eq start with lambda2=2
    let mut eq = ue.clone();
    eq.initial.lanes = LaneState { lambda1: 0.0, lambda2: 2.0 };
    eq.initial.controller = ControllerState { a: 0.5 * 3.0f64.ln(), b: 0.0 };
    let tre = run(&eq).unwrap();
    let max_z = tre.records.iter().map(|r| r.zeta.abs()).fold(0.0, f64::max);
    let max_l = tre.records.iter().map(|r| r.lambda1).fold(0.0, f64::max);
    println!("eq-start ue(l2=2): max|zeta|={max_z:e} max l1={max_l:e} conv={:?}", detect_convergence(&tre, 1e-6, 1e-6));

    let mut eql = logit_cfg();
    eql.initial.lanes = LaneState { lambda1: 0.0, lambda2: 2.0 };
    eql.initial.controller = ControllerState { a: 0.5, b: std::f64::consts::LN_2 };
    let trl = run(&eql).unwrap();
    let max_z = trl.records.iter().map(|r| r.zeta.abs()).fold(0.0, f64::max);
    println!("eq-start logit(l2=2): max|zeta|={max_z:e} conv={:?}", detect_convergence(&trl, 1e-6, 1e-6));

    // Frozen decay recipe on logit:
    let tr = run(&logit_cfg()).unwrap();
    let t_q = tr.records.iter().find(|r| r.t > 1.0 && r.lambda1 == 0.0).map(|r| r.t).unwrap();
    let zeta_at = |t: f64| tr.records[(t / dt).round() as usize].zeta;
    let z_q = zeta_at(t_q);
    // decay phase ends when zeta reaches 40% of its value at queue-vanish
    let t_e = tr.records.iter().find(|r| r.t > t_q && r.zeta <= 0.4 * z_q).map(|r| r.t).unwrap();
    let t0 = t_q + 0.05;
    let rate = (zeta_at(t_e).ln() - zeta_at(t0).ln()) / (t_e - t0);
    let t_mid = 0.5 * (t0 + t_e);
    let model = logit_cfg().choice.build().unwrap();
    let eig = linearized_stability(model.as_ref(), &DemandSample { q1: 10.0, q2: 60.0 }, &Capacities { c1: 30.0, c2: 30.0 }, &logit_cfg().gains, t_mid).unwrap().queue_free_eigenvalue;
    println!("logit decay recipe: t_q={t_q:.3} z_q={z_q:.4} t_e={t_e:.3} rate={rate:.4} eig(t_mid={t_mid:.3})={eig:.4} rel_err={:.1}%", (rate - eig).abs() / eig.abs() * 100.0);

    // logit lambda1 after t_q
    let reentry = tr.records.iter().filter(|r| r.t > t_q && r.lambda1 > 0.0).count();
    println!("logit steps with lambda1>0 after t_q: {reentry}");
}
