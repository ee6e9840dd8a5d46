//! Scenario assembly, coupled vehicle/interceptor runs, Monte Carlo batches
//! and the parameter sweeps built on them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aero::{vehicle_drag_model, DragModel};
use crate::atmosphere::{AtmosphereModel, SoundSpeedSegment};
use crate::dynamics::{
    integrate_until, rk4_step, vehicle_derivatives, IntegratorConfig, InterceptorState, OdeState,
    Sample, Termination, VehicleSpec, VehicleState, STANDARD_GRAVITY,
};
use crate::error::{Result, SimError};
use crate::guidance::{
    clamp_command, EvasionConfig, FlightController, GuidanceConfig, GuidancePhase, PhaseEvent,
    SeekerModel, TargetPoint,
};
use crate::interceptor::{
    geometry, kill_probability, launch_decision, pn_command, step_interceptor, type1_spec,
    type2_spec, InterceptorSite, InterceptorSpec, InterceptorType, KillTable, LaunchPlan,
    PredictedPoint, Reachability, ZoneId,
};
use crate::rng::{gaussian_sample, run_stream, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtmosphereSection {
    pub rho0: f64,
    pub k_decay: f64,
    pub g: f64,
    pub sound_speed: Vec<SoundSpeedSegment>,
}

impl Default for AtmosphereSection {
    fn default() -> Self {
        let m = AtmosphereModel::default();
        Self {
            rho0: m.rho0,
            k_decay: m.k_decay,
            g: STANDARD_GRAVITY,
            sound_speed: m.vs_segments,
        }
    }
}

impl AtmosphereSection {
    pub fn model(&self) -> AtmosphereModel {
        AtmosphereModel {
            rho0: self.rho0,
            k_decay: self.k_decay,
            vs_segments: self.sound_speed.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleMotion {
    /// Full point-mass dynamics under the phase autopilot.
    Guided,
    /// Straight line at the entry speed and flight-path angle.
    ConstantVelocity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleSection {
    pub motion: VehicleMotion,
    pub mass: f64,
    pub wing_area: f64,
    pub lift_to_drag: f64,
    pub lag_time: f64,
    pub lateral_fraction: f64,
    pub drag: DragModel,
    pub entry: VehicleState,
}

impl Default for VehicleSection {
    fn default() -> Self {
        let s = VehicleSpec::default();
        Self {
            motion: VehicleMotion::Guided,
            mass: s.mass,
            wing_area: s.wing_area,
            lift_to_drag: s.lift_to_drag,
            lag_time: s.lag_time,
            lateral_fraction: s.lateral_fraction,
            drag: vehicle_drag_model(),
            entry: VehicleState::reference_entry(),
        }
    }
}

impl VehicleSection {
    pub fn spec(&self) -> VehicleSpec {
        VehicleSpec {
            mass: self.mass,
            wing_area: self.wing_area,
            drag: self.drag.clone(),
            lift_to_drag: self.lift_to_drag,
            lag_time: self.lag_time,
            lateral_fraction: self.lateral_fraction,
        }
    }
}

/// Landing point of the shipped 615 km run.
pub const DEFAULT_TARGET_X: f64 = 615_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GuidanceSection {
    pub pullup_altitude: f64,
    pub pullup_radius: f64,
    pub hold_altitude: f64,
    pub hold_gain: f64,
    pub capture_band: f64,
    pub terminal_gain: f64,
    pub command_limit: f64,
    pub ballistic_cos_command: bool,
    pub seeker: SeekerModel,
    pub evasion: EvasionConfig,
    pub target: TargetPoint,
}

impl Default for GuidanceSection {
    fn default() -> Self {
        let g = GuidanceConfig::default();
        Self {
            pullup_altitude: g.pullup_altitude,
            pullup_radius: g.pullup_radius,
            hold_altitude: g.hold_altitude,
            hold_gain: g.hold_gain,
            capture_band: g.capture_band,
            terminal_gain: 100.0,
            command_limit: g.command_limit,
            ballistic_cos_command: g.ballistic_cos_command,
            seeker: SeekerModel {
                activation_altitude: 50_000.0,
                min_look_down: 0.1,
                ..SeekerModel::default()
            },
            evasion: EvasionConfig::default(),
            target: TargetPoint::new(DEFAULT_TARGET_X, 0.0, 0.0),
        }
    }
}

impl GuidanceSection {
    pub fn law(&self) -> GuidanceConfig {
        GuidanceConfig {
            pullup_altitude: self.pullup_altitude,
            pullup_radius: self.pullup_radius,
            hold_altitude: self.hold_altitude,
            hold_gain: self.hold_gain,
            capture_band: self.capture_band,
            terminal_gain: self.terminal_gain,
            command_limit: self.command_limit,
            ballistic_cos_command: self.ballistic_cos_command,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterceptorsSection {
    pub sites: Vec<InterceptorSite>,
    /// Closest approach below this counts as an intercept, m.
    pub kill_radius: f64,
    /// Earliest time a launch can be ordered, s.
    pub detection_time: f64,
    /// Reachability flights stop once coasting below this speed, m/s.
    pub reach_min_speed: f64,
    pub reach_max_time: f64,
    pub type1: InterceptorSpec,
    pub type2: InterceptorSpec,
}

impl Default for InterceptorsSection {
    fn default() -> Self {
        Self {
            sites: Vec::new(),
            kill_radius: 10.0,
            detection_time: 0.0,
            reach_min_speed: 300.0,
            reach_max_time: 60.0,
            type1: type1_spec(),
            type2: type2_spec(),
        }
    }
}

impl InterceptorsSection {
    pub fn spec(&self, kind: InterceptorType) -> &InterceptorSpec {
        match kind {
            InterceptorType::Type1 => &self.type1,
            InterceptorType::Type2 => &self.type2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    /// Seeker line-of-sight angle noise, rad.
    pub seeker_angle_sigma: f64,
    /// Relative spread of the per-run density multiplier.
    pub atmosphere_density_sigma: f64,
    /// Additive load-factor disturbance per step.
    pub turbulence_sigma: f64,
    /// Interceptor line-of-sight rate measurement noise, rad/s.
    pub interceptor_los_rate_sigma: f64,
    /// Correlation time of the line-of-sight rate noise, s; 0 draws it
    /// independently every step.
    pub interceptor_los_rate_tau: f64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        for (v, k) in [
            (self.seeker_angle_sigma, "noise.seeker_angle_sigma"),
            (
                self.atmosphere_density_sigma,
                "noise.atmosphere_density_sigma",
            ),
            (self.turbulence_sigma, "noise.turbulence_sigma"),
            (
                self.interceptor_los_rate_sigma,
                "noise.interceptor_los_rate_sigma",
            ),
            (
                self.interceptor_los_rate_tau,
                "noise.interceptor_los_rate_tau",
            ),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::config(k, "must be >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatchConfig {
    pub seed: u64,
    pub runs: usize,
    pub dt: f64,
    pub t_max: f64,
    /// Output cadence of the vehicle trajectory, s.
    pub sample_interval: f64,
    /// Output cadence of interceptor trajectories, s.
    pub interceptor_sample_interval: f64,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            runs: 300,
            dt: 0.02,
            t_max: 600.0,
            sample_interval: 10.0,
            interceptor_sample_interval: 2.0,
        }
    }
}

/// Fully resolved scenario. Each field is one section of the scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub atmosphere: AtmosphereSection,
    pub vehicle: VehicleSection,
    pub guidance: GuidanceSection,
    pub interceptors: InterceptorsSection,
    pub noise: NoiseConfig,
    pub batch: BatchConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.atmosphere.g > 0.0 && self.atmosphere.g.is_finite()) {
            return Err(SimError::config("atmosphere.g", "must be > 0"));
        }
        self.atmosphere.model().validate()?;
        self.vehicle.spec().validate()?;
        self.vehicle.entry.validate()?;
        if !(self.vehicle.entry.v > crate::dynamics::MIN_SPEED) {
            return Err(SimError::config("vehicle.entry.v", "must exceed 1 m/s"));
        }
        self.guidance.law().validate()?;
        self.guidance.seeker.validate()?;
        self.guidance.evasion.validate()?;
        let t = &self.guidance.target;
        if !(t.x.is_finite() && t.y.is_finite() && t.z.is_finite()) {
            return Err(SimError::config("guidance.target", "must be finite"));
        }
        let ic = &self.interceptors;
        if !(ic.kill_radius > 0.0) {
            return Err(SimError::config("interceptors.kill_radius", "must be > 0"));
        }
        if !(ic.detection_time.is_finite()) {
            return Err(SimError::config(
                "interceptors.detection_time",
                "must be finite",
            ));
        }
        if !(ic.reach_min_speed >= 0.0) {
            return Err(SimError::config(
                "interceptors.reach_min_speed",
                "must be >= 0",
            ));
        }
        if !(ic.reach_max_time > 0.0) {
            return Err(SimError::config(
                "interceptors.reach_max_time",
                "must be > 0",
            ));
        }
        ic.type1.validate("interceptors.type1")?;
        ic.type2.validate("interceptors.type2")?;
        if ic.type1.kind != InterceptorType::Type1 || ic.type2.kind != InterceptorType::Type2 {
            return Err(SimError::config(
                "interceptors.type1.kind",
                "type1/type2 tables must carry their own kind",
            ));
        }
        if ic
            .sites
            .iter()
            .any(|s| !(s.x.is_finite() && s.z.is_finite()))
        {
            return Err(SimError::config(
                "interceptors.sites",
                "positions must be finite",
            ));
        }
        self.noise.validate()?;
        let b = &self.batch;
        if b.runs < 1 {
            return Err(SimError::config("batch.runs", "must be >= 1"));
        }
        self.integrator().validate().map_err(|e| match e {
            SimError::Config { key, reason } => SimError::Config {
                key: format!("batch.{key}"),
                reason,
            },
            other => other,
        })?;
        if !(b.interceptor_sample_interval > 0.0) {
            return Err(SimError::config(
                "batch.interceptor_sample_interval",
                "must be > 0",
            ));
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.batch.dt,
            t_max: self.batch.t_max,
            g: self.atmosphere.g,
            sample_interval: self.batch.sample_interval,
        }
    }

    fn controller(&self, evasion: bool) -> FlightController {
        let mut seeker = self.guidance.seeker;
        seeker.angle_noise_sigma = self.noise.seeker_angle_sigma;
        let mut ev = self.guidance.evasion;
        ev.enabled &= evasion;
        FlightController::new(
            self.guidance.law(),
            seeker,
            ev,
            self.guidance.target,
            self.atmosphere.g,
        )
    }

    /// Same scenario with every noise source off.
    pub fn noise_free(&self) -> Self {
        Self {
            noise: NoiseConfig::default(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaunchRecord {
    pub site: usize,
    pub kind: InterceptorType,
    pub launch_time: f64,
    pub zone: ZoneId,
    /// Vehicle was in the Terminal phase when the interceptor boosted.
    pub in_terminal: bool,
}

/// Arrival timing at the closest approach of the best interceptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Vehicle time from detection to the intercept point, s.
    pub t_v: f64,
    /// Interceptor time from launch to the intercept point, s.
    pub t_i: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run_index: u64,
    pub touchdown_x: f64,
    pub touchdown_z: f64,
    pub landing_error: f64,
    pub flight_time: f64,
    /// Duration of the Terminal phase up to touchdown, s.
    pub nav_time: f64,
    pub intercepted: bool,
    /// Closest interceptor approach, m; infinite when nothing launched.
    pub miss_distance: f64,
    pub launches: Vec<LaunchRecord>,
    pub timing: Option<Timing>,
    /// Kill-table probability at the closest-approach geometry.
    pub table_probability: Option<f64>,
    pub evasion_activations: usize,
    pub events: Vec<PhaseEvent>,
}

impl RunResult {
    pub fn launched_in_terminal(&self) -> bool {
        self.launches.iter().any(|l| l.in_terminal)
    }
}

/// Vehicle-only run with its decimated trajectory.
#[derive(Debug, Clone)]
pub struct VehicleRun {
    pub result: RunResult,
    pub samples: Vec<Sample<VehicleState>>,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterceptorSample {
    /// Time since launch, s.
    pub t: f64,
    pub state: InterceptorState,
    pub command: f64,
}

#[derive(Debug, Clone)]
pub struct InterceptorTrace {
    pub site: InterceptorSite,
    /// Lateral offsets present, so the Z column is meaningful.
    pub three_d: bool,
    pub samples: Vec<InterceptorSample>,
}

#[derive(Debug, Clone)]
pub struct EngagementRun {
    pub result: RunResult,
    pub vehicle: Vec<Sample<VehicleState>>,
    pub interceptors: Vec<InterceptorTrace>,
}

fn draw_density_factor(rng: &mut SimRng, sigma: f64) -> f64 {
    gaussian_sample(rng, 1.0, sigma).max(0.1)
}

fn finish_result(
    run_index: u64,
    scenario: &Scenario,
    controller: &FlightController,
    termination: Termination,
    t0: f64,
) -> Result<RunResult> {
    let (t, x, z) = match termination {
        Termination::GroundImpact { t, x, z } => (t, x, z),
        other => {
            return Err(SimError::IntegrationAbort {
                t: other.time(),
                reason: "vehicle did not reach the ground before t_max".into(),
            })
        }
    };
    let target = scenario.guidance.target;
    let nav_time = controller
        .terminal_entry()
        .map_or(0.0, |e| (t - e.t).max(0.0));
    Ok(RunResult {
        run_index,
        touchdown_x: x,
        touchdown_z: z,
        landing_error: (x - target.x).hypot(z - target.z),
        flight_time: t - t0,
        nav_time,
        intercepted: false,
        miss_distance: f64::INFINITY,
        launches: Vec::new(),
        timing: None,
        table_probability: None,
        evasion_activations: controller.evasion_activations(),
        events: controller.events().to_vec(),
    })
}

/// Vehicle alone, with noise drawn from `rng`.
pub fn simulate_vehicle_run(
    scenario: &Scenario,
    rng: &mut SimRng,
    run_index: u64,
) -> Result<VehicleRun> {
    let env = scenario
        .atmosphere
        .model()
        .with_density_factor(draw_density_factor(
            rng,
            scenario.noise.atmosphere_density_sigma,
        ));
    let spec = scenario.vehicle.spec();
    let cfg = scenario.integrator();
    let entry = scenario.vehicle.entry;
    let g = cfg.g;
    if scenario.vehicle.motion == VehicleMotion::ConstantVelocity {
        return Ok(constant_velocity_run(scenario, run_index));
    }
    let mut controller = scenario.controller(false);
    let turb = scenario.noise.turbulence_sigma;
    let limit = scenario.guidance.command_limit;
    let traj = integrate_until(
        |s, u| vehicle_derivatives(s, u, &spec, &env, g),
        |s| {
            let u = controller.command(s, false, rng)?;
            Ok(clamp_command(u + gaussian_sample(rng, 0.0, turb), limit))
        },
        entry,
        &cfg,
        &[],
    )?;
    let result = finish_result(run_index, scenario, &controller, traj.termination, entry.t)?;
    Ok(VehicleRun {
        result,
        samples: traj.samples,
        termination: traj.termination,
    })
}

fn constant_velocity_state(entry: &VehicleState, t: f64) -> VehicleState {
    let dt = t - entry.t;
    let (s, c) = entry.theta.sin_cos();
    VehicleState {
        t,
        x: entry.x + entry.v * c * entry.w.cos() * dt,
        y: entry.y + entry.v * s * dt,
        z: entry.z - entry.v * c * entry.w.sin() * dt,
        ..*entry
    }
}

fn constant_velocity_run(scenario: &Scenario, run_index: u64) -> VehicleRun {
    let entry = scenario.vehicle.entry;
    let cfg = scenario.integrator();
    let descent = -entry.v * entry.theta.sin();
    let t_ground = if descent > 0.0 {
        entry.t + entry.y / descent
    } else {
        f64::INFINITY
    };
    let t_end = t_ground.min(cfg.t_max);
    let mut samples = Vec::new();
    let mut k = 0usize;
    loop {
        let t = entry.t + k as f64 * cfg.sample_interval;
        if t >= t_end {
            break;
        }
        samples.push(Sample {
            state: constant_velocity_state(&entry, t),
            command: 0.0,
        });
        k += 1;
    }
    let last = constant_velocity_state(&entry, t_end);
    samples.push(Sample {
        state: last,
        command: 0.0,
    });
    let termination = if t_ground <= cfg.t_max {
        Termination::GroundImpact {
            t: t_ground,
            x: last.x,
            z: last.z,
        }
    } else {
        Termination::Timeout { t: t_end }
    };
    let target = scenario.guidance.target;
    VehicleRun {
        result: RunResult {
            run_index,
            touchdown_x: last.x,
            touchdown_z: last.z,
            landing_error: (last.x - target.x).hypot(last.z - target.z),
            flight_time: t_end - entry.t,
            nav_time: 0.0,
            intercepted: false,
            miss_distance: f64::INFINITY,
            launches: Vec::new(),
            timing: None,
            table_probability: None,
            evasion_activations: 0,
            events: Vec::new(),
        },
        samples,
        termination,
    }
}

/// Scenario-level data shared by every run of a batch: the nominal
/// trajectory prediction and one launch plan per site.
#[derive(Debug, Clone)]
pub struct EngagementPlan {
    pub prediction: Vec<PredictedPoint>,
    pub plans: Vec<Option<LaunchPlan>>,
}

/// Spacing of the predicted trajectory handed to the launch planner, s.
pub const PREDICTION_INTERVAL: f64 = 0.1;

pub fn predict_trajectory(scenario: &Scenario) -> Result<Vec<PredictedPoint>> {
    let mut nominal = scenario.noise_free();
    nominal.batch.sample_interval = PREDICTION_INTERVAL.max(nominal.batch.dt);
    let mut rng = run_stream(0, 0);
    let run = simulate_vehicle_run(&nominal, &mut rng, 0)?;
    Ok(run
        .samples
        .iter()
        .map(|s| PredictedPoint::from(&s.state))
        .collect())
}

pub fn plan_engagement(scenario: &Scenario) -> Result<EngagementPlan> {
    let sites = &scenario.interceptors.sites;
    if sites.is_empty() {
        return Ok(EngagementPlan {
            prediction: Vec::new(),
            plans: Vec::new(),
        });
    }
    let prediction = predict_trajectory(scenario)?;
    let env = scenario.atmosphere.model();
    let ic = &scenario.interceptors;
    let g = scenario.atmosphere.g;
    let mut reach: [Option<Reachability>; 2] = [None, None];
    let mut plans = Vec::with_capacity(sites.len());
    for site in sites {
        let slot = match site.kind {
            InterceptorType::Type1 => 0,
            InterceptorType::Type2 => 1,
        };
        if reach[slot].is_none() {
            reach[slot] = Some(Reachability::build(
                ic.spec(site.kind),
                &env,
                g,
                ic.reach_min_speed,
                ic.reach_max_time,
            )?);
        }
        let table = reach[slot].as_ref().expect("built above");
        plans.push(launch_decision(
            &prediction,
            site,
            table,
            ic.detection_time,
        )?);
    }
    Ok(EngagementPlan { prediction, plans })
}

struct Flight {
    site_index: usize,
    site: InterceptorSite,
    plan: LaunchPlan,
    launch_step: usize,
    state: Option<InterceptorState>,
    launch_t: f64,
    done: bool,
    miss: f64,
    ca_time: f64,
    ca_vehicle: Option<VehicleState>,
    ca_since: f64,
    los_noise: f64,
    trace: Vec<InterceptorSample>,
}

/// Minimum distance between two points moving linearly over one step, and
/// the step fraction at which it occurs.
pub fn closest_in_step(r0: [f64; 3], r1: [f64; 3]) -> (f64, f64) {
    let d = [r1[0] - r0[0], r1[1] - r0[1], r1[2] - r0[2]];
    let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let s = if dd > 0.0 {
        (-(r0[0] * d[0] + r0[1] * d[1] + r0[2] * d[2]) / dd).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let p = [r0[0] + s * d[0], r0[1] + s * d[1], r0[2] + s * d[2]];
    ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt(), s)
}

fn rel(v: &VehicleState, m: &InterceptorState) -> [f64; 3] {
    [v.x - m.x, v.y - m.y, v.z - m.z]
}

/// Interceptor flights stop this long after their closest approach, s.
const POST_APPROACH_WINDOW: f64 = 2.0;

/// Vehicle and interceptors co-integrated on the shared step grid.
pub fn simulate_engagement(
    scenario: &Scenario,
    plan: &EngagementPlan,
    rng: &mut SimRng,
    run_index: u64,
    record: bool,
) -> Result<EngagementRun> {
    let env = scenario
        .atmosphere
        .model()
        .with_density_factor(draw_density_factor(
            rng,
            scenario.noise.atmosphere_density_sigma,
        ));
    let vspec = scenario.vehicle.spec();
    let cfg = scenario.integrator();
    let g = cfg.g;
    let dt = cfg.dt;
    let ic = &scenario.interceptors;
    let entry = scenario.vehicle.entry;
    let t0 = entry.t;
    let guided = scenario.vehicle.motion == VehicleMotion::Guided;
    let mut controller = scenario.controller(true);
    let turb = scenario.noise.turbulence_sigma;
    let los_sigma = scenario.noise.interceptor_los_rate_sigma;
    let los_tau = scenario.noise.interceptor_los_rate_tau;
    let los_phi = if los_tau > 0.0 {
        (-dt / los_tau).exp()
    } else {
        0.0
    };
    let los_drive = los_sigma * (1.0 - los_phi * los_phi).sqrt();
    let limit = scenario.guidance.command_limit;
    let stride = cfg.sample_stride();
    let i_stride = ((scenario.batch.interceptor_sample_interval / dt).round() as usize).max(1);

    let mut flights: Vec<Flight> = plan
        .plans
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|p| (i, p)))
        .map(|(i, p)| Flight {
            site_index: i,
            site: ic.sites[i],
            plan: p,
            launch_step: ((p.launch_time - t0) / dt - 1e-9).ceil().max(0.0) as usize,
            state: None,
            launch_t: f64::NAN,
            done: false,
            miss: f64::INFINITY,
            ca_time: f64::NAN,
            ca_vehicle: None,
            ca_since: 0.0,
            los_noise: 0.0,
            trace: Vec::new(),
        })
        .collect();
    let mut launches = Vec::new();
    let mut vehicle_samples = Vec::new();

    let max_steps = ((cfg.t_max - t0) / dt).ceil().max(0.0) as usize;
    let mut vs = entry;
    let mut termination = Termination::Timeout { t: cfg.t_max };
    if vs.y <= 0.0 {
        termination = Termination::GroundImpact {
            t: vs.t,
            x: vs.x,
            z: vs.z,
        };
    }
    let ground_start = vs.y <= 0.0;
    for step in 0..max_steps {
        if ground_start {
            break;
        }
        let t = t0 + step as f64 * dt;
        let mut boost = false;
        for f in flights.iter_mut() {
            if f.state.is_none() && !f.done && step == f.launch_step {
                let spec = ic.spec(f.site.kind);
                let mut s = spec.launch_state(t, f.site.x, f.site.z, f.plan.aim_theta);
                s.t = t;
                f.state = Some(s);
                f.launch_t = t;
                f.los_noise = gaussian_sample(rng, 0.0, los_sigma);
                boost = true;
                launches.push(LaunchRecord {
                    site: f.site_index,
                    kind: f.site.kind,
                    launch_time: t,
                    zone: f.plan.zone,
                    in_terminal: guided && controller.phase() == GuidancePhase::Terminal,
                });
            }
        }

        let u_v = if guided {
            let u = controller.command(&vs, boost, rng)?;
            clamp_command(u + gaussian_sample(rng, 0.0, turb), limit)
        } else {
            0.0
        };
        if record && step % stride == 0 {
            vehicle_samples.push(Sample {
                state: vs,
                command: u_v,
            });
        }

        let mut commands = Vec::with_capacity(flights.len());
        for f in flights.iter_mut() {
            let u = match (&f.state, f.done) {
                (Some(m), false) => {
                    let spec = ic.spec(f.site.kind);
                    if t - f.launch_t < spec.guidance_delay {
                        m.theta.cos()
                    } else {
                        match geometry(m, &vs) {
                            Ok(geo) => {
                                f.los_noise =
                                    los_phi * f.los_noise + gaussian_sample(rng, 0.0, los_drive);
                                let rate = geo.los_rate + f.los_noise;
                                pn_command(m, &geo, rate, spec.nav_gain, spec.structural_limit, g)
                            }
                            Err(_) => m.theta.cos(),
                        }
                    }
                }
                _ => 0.0,
            };
            commands.push(u);
        }

        let next_v = if guided {
            let mut n = rk4_step(|st| vehicle_derivatives(st, u_v, &vspec, &env, g), &vs, dt)?;
            n.t = t0 + (step + 1) as f64 * dt;
            n
        } else {
            constant_velocity_state(&entry, t0 + (step + 1) as f64 * dt)
        };

        for (f, &u) in flights.iter_mut().zip(&commands) {
            let Some(m) = f.state else { continue };
            if f.done {
                continue;
            }
            let spec = ic.spec(f.site.kind);
            if record && (((t - f.launch_t) / dt).round() as usize).is_multiple_of(i_stride) {
                f.trace.push(InterceptorSample {
                    t: t - f.launch_t,
                    state: m,
                    command: u,
                });
            }
            let next_m = match step_interceptor(&m, u, f.launch_t, spec, &env, g, dt) {
                Ok(mut n) => {
                    n.t = t0 + (step + 1) as f64 * dt;
                    n
                }
                Err(_) => {
                    f.done = true;
                    continue;
                }
            };
            let (d, s) = closest_in_step(rel(&vs, &m), rel(&next_v, &next_m));
            if d < f.miss {
                f.miss = d;
                f.ca_time = t + s * dt;
                f.ca_vehicle = Some(vs.lerp(&next_v, s));
                f.ca_since = 0.0;
            } else {
                f.ca_since += dt;
            }
            f.state = Some(next_m);
            let elapsed = next_m.t - f.launch_t;
            if f.ca_since > POST_APPROACH_WINDOW
                || next_m.y < 0.0
                || (elapsed > spec.burn_time() && next_m.v < 50.0)
                || elapsed > ic.reach_max_time + 30.0
            {
                f.done = true;
            }
        }

        if next_v.y <= 0.0 {
            let frac = vs.y / (vs.y - next_v.y);
            let touch = vs.lerp(&next_v, frac);
            termination = Termination::GroundImpact {
                t: touch.t,
                x: touch.x,
                z: touch.z,
            };
            if record {
                vehicle_samples.push(Sample {
                    state: touch,
                    command: u_v,
                });
            }
            break;
        }
        vs = next_v;
    }
    if ground_start && record {
        vehicle_samples.push(Sample {
            state: vs,
            command: 0.0,
        });
    }

    let mut result = if guided {
        finish_result(run_index, scenario, &controller, termination, t0)?
    } else {
        let mut r = constant_velocity_run(scenario, run_index).result;
        if let Termination::GroundImpact { t, .. } = termination {
            r.flight_time = t - t0;
        }
        r
    };
    result.launches = launches;
    if let Some(best) = flights
        .iter()
        .filter(|f| f.miss.is_finite())
        .min_by(|a, b| a.miss.total_cmp(&b.miss))
    {
        result.miss_distance = best.miss;
        result.intercepted = best.miss < ic.kill_radius;
        let t_v = best.ca_time - ic.detection_time;
        let t_i = best.ca_time - best.launch_t;
        result.timing = Some(Timing {
            t_v,
            t_i,
            margin: t_v - t_i,
        });
        if let Some(v) = best.ca_vehicle {
            let table = KillTable::for_type(best.site.kind);
            let d = (v.x - best.site.x).hypot(v.z - best.site.z);
            result.table_probability = kill_probability(&table, v.y.max(0.0), d, v.v).ok();
        }
    }
    let traces = flights
        .into_iter()
        .filter(|f| !f.trace.is_empty())
        .map(|f| InterceptorTrace {
            three_d: f.site.z != 0.0 || ic.spec(f.site.kind).lateral_fraction != 0.0,
            site: f.site,
            samples: f.trace,
        })
        .collect();
    Ok(EngagementRun {
        result,
        vehicle: vehicle_samples,
        interceptors: traces,
    })
}

/// Outcome of one run inside a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RunOutcome {
    Completed(RunResult),
    Failed { run_index: u64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchStatistics {
    pub n: usize,
    pub completed: usize,
    pub failed: usize,
    pub mean_error: f64,
    pub max_error: f64,
    /// Median radial landing error.
    pub cep: f64,
    pub mean_nav_time: f64,
    pub launches: usize,
    pub intercepts: usize,
    pub p_hat: f64,
    pub p_se: f64,
    /// Runs whose launch happened during the vehicle's Terminal phase.
    pub terminal_launches: usize,
    pub p_terminal: Option<f64>,
    pub p_terminal_se: Option<f64>,
    pub kill_radius: f64,
    /// `(T_nav, landing error)` per completed run.
    pub error_vs_nav: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub seed: u64,
    pub outcomes: Vec<RunOutcome>,
    pub stats: BatchStatistics,
}

pub fn binomial_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Median of a non-empty slice (mean of the middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn aggregate(outcomes: &[RunOutcome], kill_radius: f64) -> Result<BatchStatistics> {
    let runs: Vec<&RunResult> = outcomes
        .iter()
        .filter_map(|o| match o {
            RunOutcome::Completed(r) => Some(r),
            RunOutcome::Failed { .. } => None,
        })
        .collect();
    if runs.is_empty() {
        return Err(SimError::BatchFailed {
            runs: outcomes.len(),
        });
    }
    let m = runs.len();
    let errors: Vec<f64> = runs.iter().map(|r| r.landing_error).collect();
    let mean_error = errors.iter().sum::<f64>() / m as f64;
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let intercepts = runs.iter().filter(|r| r.intercepted).count();
    let launches = runs.iter().filter(|r| !r.launches.is_empty()).count();
    let p_hat = intercepts as f64 / m as f64;
    let terminal: Vec<&&RunResult> = runs.iter().filter(|r| r.launched_in_terminal()).collect();
    let p_terminal = (!terminal.is_empty())
        .then(|| terminal.iter().filter(|r| r.intercepted).count() as f64 / terminal.len() as f64);
    Ok(BatchStatistics {
        n: outcomes.len(),
        completed: m,
        failed: outcomes.len() - m,
        mean_error,
        max_error,
        cep: median(&errors),
        mean_nav_time: runs.iter().map(|r| r.nav_time).sum::<f64>() / m as f64,
        launches,
        intercepts,
        p_hat,
        p_se: binomial_se(p_hat, m),
        terminal_launches: terminal.len(),
        p_terminal,
        p_terminal_se: p_terminal.map(|p| binomial_se(p, terminal.len())),
        kill_radius,
        error_vs_nav: runs.iter().map(|r| (r.nav_time, r.landing_error)).collect(),
    })
}

fn run_one(scenario: &Scenario, plan: &EngagementPlan, seed: u64, index: u64) -> RunOutcome {
    let mut rng = run_stream(seed, index);
    let res = if scenario.interceptors.sites.is_empty() {
        simulate_vehicle_run(scenario, &mut rng, index).map(|r| r.result)
    } else {
        simulate_engagement(scenario, plan, &mut rng, index, false).map(|r| r.result)
    };
    match res {
        Ok(r) => RunOutcome::Completed(r),
        Err(e) => RunOutcome::Failed {
            run_index: index,
            reason: e.to_string(),
        },
    }
}

/// `scenario.batch.runs` independent runs on the sub-streams of
/// `scenario.batch.seed`, executed in parallel and folded in index order.
pub fn monte_carlo_batch(scenario: &Scenario) -> Result<BatchResult> {
    scenario.validate()?;
    let plan = plan_engagement(scenario)?;
    let seed = scenario.batch.seed;
    let outcomes: Vec<RunOutcome> = (0..scenario.batch.runs as u64)
        .into_par_iter()
        .map(|i| run_one(scenario, &plan, seed, i))
        .collect();
    let stats = aggregate(&outcomes, scenario.interceptors.kill_radius)?;
    Ok(BatchResult {
        seed,
        outcomes,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NavigationRow {
    pub x: f64,
    pub mean_nav_time: f64,
    pub max_error: f64,
    pub mean_error: f64,
    pub cep: f64,
    pub completed: usize,
    pub failed: usize,
    /// Set when the whole batch failed for this range.
    pub error: Option<String>,
}

/// Landing-error batch per target range, vehicle only. Rows sorted by X.
pub fn error_vs_navigation_sweep(base: &Scenario, ranges: &[f64]) -> Result<Vec<NavigationRow>> {
    if ranges.is_empty() {
        return Err(SimError::config("sweep.ranges", "must not be empty"));
    }
    let mut sorted = ranges.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(sorted.len());
    for x in sorted {
        let mut sc = base.clone();
        sc.guidance.target.x = x;
        sc.interceptors.sites.clear();
        let row = match monte_carlo_batch(&sc) {
            Ok(b) => NavigationRow {
                x,
                mean_nav_time: b.stats.mean_nav_time,
                max_error: b.stats.max_error,
                mean_error: b.stats.mean_error,
                cep: b.stats.cep,
                completed: b.stats.completed,
                failed: b.stats.failed,
                error: None,
            },
            Err(e) => NavigationRow {
                x,
                mean_nav_time: f64::NAN,
                max_error: f64::NAN,
                mean_error: f64::NAN,
                cep: f64::NAN,
                completed: 0,
                failed: sc.batch.runs,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedRow {
    pub v: f64,
    pub p1: f64,
    pub p1_se: f64,
    pub p2: f64,
    pub p2_se: f64,
}

/// Speed envelope accepted by [`probability_vs_speed_sweep`], m/s.
pub const SPEED_SWEEP_RANGE: (f64, f64) = (1000.0, 2200.0);

/// Interception probability per interceptor type against a target flying
/// the base scenario at each entry speed. Only the base scenario's sites of
/// a given type take part in that type's column.
pub fn probability_vs_speed_sweep(base: &Scenario, speeds: &[f64]) -> Result<Vec<SpeedRow>> {
    if speeds.is_empty() {
        return Err(SimError::config("sweep.speeds", "must not be empty"));
    }
    if let Some(v) = speeds
        .iter()
        .find(|&&v| !(SPEED_SWEEP_RANGE.0..=SPEED_SWEEP_RANGE.1).contains(&v))
    {
        return Err(SimError::config(
            "sweep.speeds",
            format!("speed {v} outside [1000, 2200] m/s"),
        ));
    }
    let estimate = |v: f64, kind: InterceptorType| -> Result<(f64, f64)> {
        let mut sc = base.clone();
        sc.vehicle.entry.v = v;
        sc.interceptors.sites.retain(|s| s.kind == kind);
        if sc.interceptors.sites.is_empty() {
            return Ok((0.0, 0.0));
        }
        let b = monte_carlo_batch(&sc)?;
        Ok((b.stats.p_hat, b.stats.p_se))
    };
    speeds
        .iter()
        .map(|&v| {
            let (p1, p1_se) = estimate(v, InterceptorType::Type1)?;
            let (p2, p2_se) = estimate(v, InterceptorType::Type2)?;
            Ok(SpeedRow {
                v,
                p1,
                p1_se,
                p2,
                p2_se,
            })
        })
        .collect()
}
