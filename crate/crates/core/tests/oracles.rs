use aerosim_core::config::preset;
use aerosim_core::engagement::{
    aggregate, binomial_se, plan_engagement, predict_trajectory, simulate_engagement,
    simulate_vehicle_run, RunOutcome, Scenario, VehicleMotion,
};
use aerosim_core::interceptor::{
    launch_decision, spec_for, InterceptorSite, InterceptorType, LaunchPlan, PredictedPoint,
    Reachability,
};
use aerosim_core::{monte_carlo_batch, run_stream};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Zone bounds re-typed from the reference layout: (d_lo, d_hi, h_lo, h_hi).
const ZONES: [(f64, f64, f64, f64); 3] = [
    (200.0, 10_000.0, 15.0, 3000.0),
    (10_000.0, 30_000.0, 3000.0, 10_000.0),
    (30_000.0, 70_000.0, 10_000.0, 24_000.0),
];

fn in_any_zone(d: f64, h: f64) -> bool {
    ZONES
        .iter()
        .any(|&(d0, d1, h0, h1)| d > d0 && d < d1 && h > h0 && h < h1)
}

/// Every feasible sample, then the one with the smallest time.
fn brute_force(
    prediction: &[PredictedPoint],
    site: &InterceptorSite,
    reach: &Reachability,
    earliest: f64,
) -> Option<(f64, f64)> {
    let mut feasible = Vec::new();
    for p in prediction {
        let d = ((p.x - site.x).powi(2) + (p.z - site.z).powi(2)).sqrt();
        if !in_any_zone(d, p.y) {
            continue;
        }
        if let Some(fly) = reach.time_to(d, p.y) {
            if p.t - fly >= earliest {
                feasible.push((p.t, p.t - fly));
            }
        }
    }
    feasible.into_iter().min_by(|a, b| a.0.total_cmp(&b.0))
}

fn straight_target(rng: &mut ChaCha8Rng) -> (Scenario, InterceptorSite) {
    let mut s = Scenario::default();
    s.vehicle.motion = VehicleMotion::ConstantVelocity;
    let gamma: f64 = rng.random_range(0.15..0.9);
    let y0: f64 = rng.random_range(8_000.0..40_000.0);
    s.vehicle.entry.x = 0.0;
    s.vehicle.entry.y = y0;
    s.vehicle.entry.v = rng.random_range(600.0..2200.0);
    s.vehicle.entry.theta = -gamma;
    let impact = y0 / gamma.tan();
    s.guidance.target.x = impact;
    let kind = if rng.random_bool(0.5) {
        InterceptorType::Type1
    } else {
        InterceptorType::Type2
    };
    let site = InterceptorSite {
        x: impact + rng.random_range(-40_000.0..40_000.0),
        z: 0.0,
        kind,
    };
    (s, site)
}

#[test]
fn launch_decision_matches_brute_force_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let env = Scenario::default().atmosphere.model();
    let g = Scenario::default().atmosphere.g;
    let reach: Vec<Reachability> = [InterceptorType::Type1, InterceptorType::Type2]
        .iter()
        .map(|&k| Reachability::build(&spec_for(k), &env, g, 300.0, 60.0).unwrap())
        .collect();
    let mut planned = 0;
    for _ in 0..100 {
        let (scenario, site) = straight_target(&mut rng);
        let prediction = predict_trajectory(&scenario).unwrap();
        let earliest = rng.random_range(0.0..20.0);
        let r = &reach[(site.kind == InterceptorType::Type2) as usize];
        let got: Option<LaunchPlan> = launch_decision(&prediction, &site, r, earliest).unwrap();
        let want = brute_force(&prediction, &site, r, earliest);
        match (got, want) {
            (None, None) => {}
            (Some(p), Some((t, launch))) => {
                planned += 1;
                assert_eq!(p.intercept_time, t);
                assert_eq!(p.launch_time, launch);
            }
            (a, b) => panic!("launch_decision {a:?} vs scan {b:?}"),
        }
    }
    assert!(planned > 10, "only {planned} feasible scenarios");
}

#[test]
fn empty_prediction_is_an_error() {
    let env = Scenario::default().atmosphere.model();
    let r = Reachability::build(
        &spec_for(InterceptorType::Type1),
        &env,
        9.80665,
        300.0,
        60.0,
    )
    .unwrap();
    let site = InterceptorSite {
        x: 0.0,
        z: 0.0,
        kind: InterceptorType::Type1,
    };
    assert!(launch_decision(&[], &site, &r, 0.0).is_err());
}

#[test]
fn interception_rate_matches_counting() {
    let mut s = preset("evasion").unwrap();
    s.batch.runs = 20;
    s.batch.seed = 5;
    let plan = plan_engagement(&s).unwrap();
    let mut hits = 0;
    for i in 0..20 {
        let mut rng = run_stream(s.batch.seed, i);
        let r = simulate_engagement(&s, &plan, &mut rng, i, false).unwrap();
        if r.result.miss_distance < s.interceptors.kill_radius {
            hits += 1;
        }
    }
    let b = monte_carlo_batch(&s).unwrap();
    assert_eq!(b.stats.intercepts, hits);
    assert_eq!(b.stats.p_hat, hits as f64 / 20.0);
    let p = hits as f64 / 20.0;
    assert_eq!(b.stats.p_se, (p * (1.0 - p) / 20.0).sqrt());
}

#[test]
fn single_noise_free_run_equals_its_statistics() {
    let mut s = preset("x800").unwrap().noise_free();
    s.batch.runs = 1;
    let b = monte_carlo_batch(&s).unwrap();
    let single = simulate_vehicle_run(&s, &mut run_stream(s.batch.seed, 0), 0).unwrap();
    let e = single.result.landing_error;
    assert_eq!(b.stats.mean_error, e);
    assert_eq!(b.stats.max_error, e);
    assert_eq!(b.stats.cep, e);
    assert_eq!(b.stats.mean_nav_time, single.result.nav_time);
}

#[test]
fn noise_free_batch_has_no_spread() {
    let mut s = preset("calibration").unwrap().noise_free();
    s.batch.runs = 8;
    let b = monte_carlo_batch(&s).unwrap();
    let errors: Vec<f64> = b
        .outcomes
        .iter()
        .map(|o| match o {
            RunOutcome::Completed(r) => r.landing_error,
            RunOutcome::Failed { reason, .. } => panic!("{reason}"),
        })
        .collect();
    assert!(errors.iter().all(|&e| e == errors[0]));
}

#[test]
fn statistics_from_hand_built_outcomes() {
    let base = monte_carlo_batch(&{
        let mut s = preset("x615").unwrap();
        s.batch.runs = 1;
        s
    })
    .unwrap();
    let RunOutcome::Completed(template) = base.outcomes[0].clone() else {
        panic!("run failed");
    };
    let errors = [4.0, 1.0, 3.0, 2.0];
    let mut outcomes: Vec<RunOutcome> = errors
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let mut r = template.clone();
            r.run_index = i as u64;
            r.landing_error = e;
            r.intercepted = i % 2 == 0;
            RunOutcome::Completed(r)
        })
        .collect();
    outcomes.push(RunOutcome::Failed {
        run_index: 4,
        reason: "test".into(),
    });
    let st = aggregate(&outcomes, 10.0).unwrap();
    assert_eq!(st.completed, 4);
    assert_eq!(st.failed, 1);
    assert_eq!(st.max_error, 4.0);
    assert_eq!(st.mean_error, 2.5);
    assert_eq!(st.cep, 2.5);
    assert_eq!(st.intercepts, 2);
    assert_eq!(st.p_hat, 0.5);
    assert_eq!(st.p_se, binomial_se(0.5, 4));
    assert_eq!(st.p_se, 0.25);
}

#[test]
fn interceptor_arrives_no_later_than_vehicle() {
    let mut s = preset("evasion").unwrap();
    s.batch.runs = 40;
    let b = monte_carlo_batch(&s).unwrap();
    for o in &b.outcomes {
        if let RunOutcome::Completed(r) = o {
            if r.intercepted {
                let t = r.timing.expect("timing recorded for every launch");
                assert!(t.t_i <= t.t_v, "{t:?}");
            }
        }
    }
}
