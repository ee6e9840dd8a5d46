//! Interceptor types, engagement zones, empirical kill tables, launch
//! planning and proportional-navigation guidance.

use serde::{Deserialize, Serialize};

use crate::aero::{interceptor_drag_model, DragModel};
use crate::atmosphere::AtmosphereModel;
use crate::dynamics::{interceptor_derivatives, rk4_step, InterceptorState, VehicleState};
use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterceptorType {
    Type1,
    Type2,
}

impl InterceptorType {
    pub fn name(self) -> &'static str {
        match self {
            InterceptorType::Type1 => "type1",
            InterceptorType::Type2 => "type2",
        }
    }
}

impl std::str::FromStr for InterceptorType {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "type1" | "1" => Ok(InterceptorType::Type1),
            "type2" | "2" => Ok(InterceptorType::Type2),
            other => Err(SimError::config(
                "interceptor type",
                format!("unknown type `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThrustStage {
    pub duration: f64,
    pub thrust: f64,
    pub mass_flow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterceptorSpec {
    pub kind: InterceptorType,
    pub initial_mass: f64,
    pub burnout_mass: f64,
    /// Consecutive from launch.
    pub stages: Vec<ThrustStage>,
    pub wing_area: f64,
    pub drag: DragModel,
    pub lag_time: f64,
    pub v_max_nominal: f64,
    /// Load-factor authority, g.
    pub structural_limit: f64,
    pub nav_gain: f64,
    /// Speed leaving the launcher, m/s.
    pub launch_speed: f64,
    /// Time after launch before proportional navigation engages, s.
    pub guidance_delay: f64,
    #[serde(default)]
    pub lateral_fraction: f64,
}

/// Flight-path angle held in the type-1 reference climb, rad.
pub const TYPE1_REFERENCE_THETA: f64 = 2.321;
/// Initial flight-path angle of the type-2 reference run, rad.
pub const TYPE2_REFERENCE_THETA: f64 = 3.0181;

pub const TYPE1_PEAK_SPEED: f64 = 1626.0;
pub const TYPE2_PEAK_SPEED: f64 = 721.0;

/// Fitted by [`calibrate_thrust`] against the peak speeds above.
const TYPE1_THRUST: f64 = 120_991.0;
const TYPE2_BOOST_THRUST: f64 = 162_823.8;

const TYPE1_FLOW: f64 = 50.0;
const TYPE1_INITIAL: f64 = 959.0;
const TYPE1_BURNOUT: f64 = 302.8;

const TYPE2_INITIAL: f64 = 984.7;
const TYPE2_BURNOUT: f64 = 365.4;
/// Flows of the type-2 boost, transition and sustain stages, kg/s.
const TYPE2_FLOWS: [f64; 3] = [92.05, 36.35, (543.8 - 365.4) / 24.0];
const TYPE2_DURATIONS: [f64; 3] = [4.0, 2.0, 24.0];

pub fn type1_spec() -> InterceptorSpec {
    InterceptorSpec {
        kind: InterceptorType::Type1,
        initial_mass: TYPE1_INITIAL,
        burnout_mass: TYPE1_BURNOUT,
        stages: vec![ThrustStage {
            duration: (TYPE1_INITIAL - TYPE1_BURNOUT) / TYPE1_FLOW,
            thrust: TYPE1_THRUST,
            mass_flow: TYPE1_FLOW,
        }],
        wing_area: 1.4,
        drag: interceptor_drag_model(),
        lag_time: 0.3,
        v_max_nominal: 1600.0,
        structural_limit: 25.0,
        nav_gain: 4.0,
        launch_speed: 20.0,
        guidance_delay: 1.0,
        lateral_fraction: 0.0,
    }
}

pub fn type2_spec() -> InterceptorSpec {
    // Thrust of the later stages is proportional to their flow.
    let per_flow = TYPE2_BOOST_THRUST / TYPE2_FLOWS[0];
    InterceptorSpec {
        kind: InterceptorType::Type2,
        initial_mass: TYPE2_INITIAL,
        burnout_mass: TYPE2_BURNOUT,
        stages: TYPE2_DURATIONS
            .iter()
            .zip(TYPE2_FLOWS)
            .map(|(&duration, mass_flow)| ThrustStage {
                duration,
                thrust: per_flow * mass_flow,
                mass_flow,
            })
            .collect(),
        wing_area: 1.2,
        drag: interceptor_drag_model(),
        lag_time: 0.3,
        v_max_nominal: 700.0,
        structural_limit: 25.0,
        nav_gain: 4.0,
        launch_speed: 20.0,
        guidance_delay: 1.0,
        lateral_fraction: 0.0,
    }
}

pub fn spec_for(kind: InterceptorType) -> InterceptorSpec {
    match kind {
        InterceptorType::Type1 => type1_spec(),
        InterceptorType::Type2 => type2_spec(),
    }
}

impl InterceptorSpec {
    pub fn validate(&self, key: &str) -> Result<()> {
        if self.stages.is_empty() {
            return Err(SimError::config(format!("{key}.stages"), "empty"));
        }
        if self
            .stages
            .iter()
            .any(|s| !(s.duration > 0.0) || s.mass_flow < 0.0 || s.thrust < 0.0)
        {
            return Err(SimError::config(
                format!("{key}.stages"),
                "durations must be > 0, thrust and flow >= 0",
            ));
        }
        if !(self.initial_mass > self.burnout_mass && self.burnout_mass > 0.0) {
            return Err(SimError::config(
                format!("{key}.burnout_mass"),
                "must satisfy 0 < burnout_mass < initial_mass",
            ));
        }
        let burned = self.propellant_burned();
        if (burned - (self.initial_mass - self.burnout_mass)).abs() > 1e-6 {
            return Err(SimError::config(
                format!("{key}.stages"),
                format!(
                    "stage flows burn {burned:.4} kg but initial - burnout is {:.4} kg",
                    self.initial_mass - self.burnout_mass
                ),
            ));
        }
        for (v, name) in [
            (self.wing_area, "wing_area"),
            (self.lag_time, "lag_time"),
            (self.structural_limit, "structural_limit"),
            (self.nav_gain, "nav_gain"),
        ] {
            if !(v > 0.0) {
                return Err(SimError::config(format!("{key}.{name}"), "must be > 0"));
            }
        }
        if !(self.launch_speed > crate::dynamics::MIN_SPEED) {
            return Err(SimError::config(
                format!("{key}.launch_speed"),
                "must exceed 1 m/s",
            ));
        }
        if !(self.guidance_delay >= 0.0) {
            return Err(SimError::config(
                format!("{key}.guidance_delay"),
                "must be >= 0",
            ));
        }
        self.drag.validate(&format!("{key}.drag"))
    }

    pub fn burn_time(&self) -> f64 {
        self.stages.iter().map(|s| s.duration).sum()
    }

    pub fn propellant_burned(&self) -> f64 {
        self.stages.iter().map(|s| s.duration * s.mass_flow).sum()
    }

    /// Piecewise-constant `(thrust, mass_flow)` at time since launch.
    pub fn thrust_and_flow(&self, t: f64) -> (f64, f64) {
        if t < 0.0 {
            return (0.0, 0.0);
        }
        let mut start = 0.0;
        for s in &self.stages {
            if t < start + s.duration {
                return (s.thrust, s.mass_flow);
            }
            start += s.duration;
        }
        (0.0, 0.0)
    }

    /// Closed-form mass at time since launch.
    pub fn mass_at(&self, t: f64) -> f64 {
        if t >= self.burn_time() {
            return self.burnout_mass;
        }
        let mut m = self.initial_mass;
        let mut start = 0.0;
        for s in &self.stages {
            let end = start + s.duration;
            if t >= end {
                m -= s.duration * s.mass_flow;
            } else if t > start {
                m -= (t - start) * s.mass_flow;
                return m.max(self.burnout_mass);
            }
            start = end;
        }
        m.max(self.burnout_mass)
    }

    /// Same schedule with all thrust levels multiplied by `factor`.
    pub fn with_thrust_scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.stages {
            s.thrust *= factor;
        }
        out
    }

    pub fn reference_theta(&self) -> f64 {
        match self.kind {
            InterceptorType::Type1 => TYPE1_REFERENCE_THETA,
            InterceptorType::Type2 => TYPE2_REFERENCE_THETA,
        }
    }

    pub fn reference_peak_speed(&self) -> f64 {
        match self.kind {
            InterceptorType::Type1 => TYPE1_PEAK_SPEED,
            InterceptorType::Type2 => TYPE2_PEAK_SPEED,
        }
    }

    pub fn launch_state(&self, t: f64, x: f64, z: f64, theta: f64) -> InterceptorState {
        InterceptorState {
            t,
            x,
            y: 0.0,
            z,
            v: self.launch_speed,
            theta,
            w: 0.0,
            n: theta.cos(),
            mass: self.initial_mass,
        }
    }
}

/// One RK4 step of an interceptor launched at `launch_time`; mass is reset
/// to the closed-form schedule value after the step.
pub fn step_interceptor(
    s: &InterceptorState,
    u: f64,
    launch_time: f64,
    spec: &InterceptorSpec,
    env: &AtmosphereModel,
    g: f64,
    dt: f64,
) -> Result<InterceptorState> {
    let mut next = rk4_step(
        |st| interceptor_derivatives(st, u, st.t - launch_time, spec, env, g),
        s,
        dt,
    )?;
    next.mass = spec.mass_at(next.t - launch_time);
    Ok(next)
}

/// Sampled straight-line flight with the flight-path angle held fixed.
#[derive(Debug, Clone)]
pub struct FixedAngleFlight {
    pub samples: Vec<InterceptorState>,
}

impl FixedAngleFlight {
    pub fn peak(&self) -> (f64, f64) {
        self.samples.iter().fold(
            (0.0, 0.0),
            |(t, v), s| if s.v > v { (s.t, s.v) } else { (t, v) },
        )
    }

    /// Speed at `t`, linearly interpolated between steps.
    pub fn speed_at(&self, t: f64) -> Option<f64> {
        self.samples.windows(2).find_map(|w| {
            (w[0].t <= t && t <= w[1].t)
                .then(|| w[0].v + (t - w[0].t) / (w[1].t - w[0].t) * (w[1].v - w[0].v))
        })
    }
}

pub fn fly_fixed_angle(
    spec: &InterceptorSpec,
    env: &AtmosphereModel,
    theta: f64,
    duration: f64,
    dt: f64,
    g: f64,
) -> Result<FixedAngleFlight> {
    let mut s = spec.launch_state(0.0, 0.0, 0.0, theta);
    let hold = theta.cos();
    let steps = (duration / dt).round() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(s);
    for _ in 0..steps {
        if s.v <= crate::dynamics::MIN_SPEED * 2.0 || s.y < 0.0 {
            break;
        }
        s = step_interceptor(&s, hold, 0.0, spec, env, g, dt)?;
        s.theta = theta;
        s.n = hold;
        samples.push(s);
    }
    Ok(FixedAngleFlight { samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub scale: f64,
    pub peak_speed: f64,
    pub peak_time: f64,
    pub iterations: usize,
}

/// Secant search on a common thrust multiplier so that the fixed-angle
/// reference flight peaks at `target_peak`. The secant is kept inside a
/// sign-changing bracket (Illinois variant), since the sampled peak is only
/// piecewise smooth in the multiplier.
pub fn calibrate_thrust(
    spec: &InterceptorSpec,
    env: &AtmosphereModel,
    target_peak: f64,
    g: f64,
) -> Result<(InterceptorSpec, Calibration)> {
    if !(target_peak > spec.launch_speed) {
        return Err(SimError::domain(
            "calibrate_thrust",
            "target peak must exceed the launch speed",
        ));
    }
    let theta = spec.reference_theta();
    let dt = 0.02;
    let horizon = spec.burn_time() + 5.0;
    let peak = |scale: f64| -> Result<(f64, f64)> {
        let f = fly_fixed_angle(&spec.with_thrust_scale(scale), env, theta, horizon, dt, g)?;
        Ok(f.peak())
    };
    let resid = |scale: f64| -> Result<f64> { Ok(peak(scale)?.1 - target_peak) };

    let (mut a, mut b) = (1.0, 1.0);
    let mut fa = resid(a)?;
    let mut fb = fa;
    let mut evals = 1;
    while fa.signum() == fb.signum() {
        if fa > 0.0 {
            a *= 0.8;
            fa = resid(a)?;
        } else {
            b *= 1.25;
            fb = resid(b)?;
        }
        evals += 1;
        if evals > 60 {
            return Err(SimError::domain(
                "calibrate_thrust",
                "could not bracket the target",
            ));
        }
    }
    let mut side = 0i8;
    for _ in 0..100 {
        let c = b - fb * (b - a) / (fb - fa);
        let fc = resid(c)?;
        evals += 1;
        if fc.abs() < 1e-6 * target_peak || (b - a).abs() < 1e-12 {
            let (pt, pv) = peak(c)?;
            return Ok((
                spec.with_thrust_scale(c),
                Calibration {
                    scale: c,
                    peak_speed: pv,
                    peak_time: pt,
                    iterations: evals,
                },
            ));
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(SimError::domain(
        "calibrate_thrust",
        "secant search did not converge",
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZoneId {
    Zone1,
    Zone2,
    Zone3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementZone {
    pub id: ZoneId,
    pub d_range: (f64, f64),
    pub h_range: (f64, f64),
}

pub const ENGAGEMENT_ZONES: [EngagementZone; 3] = [
    EngagementZone {
        id: ZoneId::Zone1,
        d_range: (200.0, 10_000.0),
        h_range: (15.0, 3000.0),
    },
    EngagementZone {
        id: ZoneId::Zone2,
        d_range: (10_000.0, 30_000.0),
        h_range: (3000.0, 10_000.0),
    },
    EngagementZone {
        id: ZoneId::Zone3,
        d_range: (30_000.0, 70_000.0),
        h_range: (10_000.0, 24_000.0),
    },
];

impl EngagementZone {
    pub fn contains(&self, d: f64, h: f64) -> bool {
        d > self.d_range.0 && d < self.d_range.1 && h > self.h_range.0 && h < self.h_range.1
    }
}

pub fn zone_classify(d: f64, h: f64) -> Option<ZoneId> {
    ENGAGEMENT_ZONES
        .iter()
        .find(|z| z.contains(d, h))
        .map(|z| z.id)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KillRow {
    pub p: f64,
    pub h: f64,
    pub d: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KillTable {
    pub kind: InterceptorType,
    /// Sorted by altitude.
    pub rows: Vec<KillRow>,
    /// `(target speed, P)` attenuation curve, sorted by speed.
    pub speed_curve: Vec<(f64, f64)>,
    /// Allowed overshoot of the H and D envelope, m.
    pub envelope_margin: f64,
}

/// Target speed above which the speed attenuation applies, m/s.
pub const ATTENUATION_ONSET: f64 = 1500.0;

const fn kr(p: f64, h: f64, d: f64, v: f64) -> KillRow {
    KillRow { p, h, d, v }
}

const TYPE1_ROWS: [KillRow; 10] = [
    kr(0.5, 1000.0, 1000.0, 500.0),
    kr(0.6, 3000.0, 2000.0, 1000.0),
    kr(0.8, 5000.0, 3000.0, 1500.0),
    kr(0.9, 7000.0, 4000.0, 1650.0),
    kr(0.85, 9000.0, 6000.0, 1600.0),
    kr(0.8, 11000.0, 7000.0, 1400.0),
    kr(0.7, 13000.0, 8000.0, 1200.0),
    kr(0.7, 15000.0, 10000.0, 1000.0),
    kr(0.6, 18000.0, 12000.0, 900.0),
    kr(0.5, 20000.0, 14000.0, 800.0),
];

const TYPE2_ROWS: [KillRow; 9] = [
    kr(0.5, 1000.0, 1000.0, 400.0),
    kr(0.6, 3000.0, 2000.0, 700.0),
    kr(0.8, 5000.0, 3000.0, 750.0),
    kr(0.8, 7000.0, 4000.0, 750.0),
    kr(0.8, 9000.0, 6000.0, 700.0),
    kr(0.7, 11000.0, 6000.0, 600.0),
    kr(0.6, 13000.0, 8000.0, 500.0),
    kr(0.5, 15000.0, 10000.0, 450.0),
    kr(0.4, 18000.0, 12000.0, 400.0),
];

// Speed table (1200..1700 m/s) continued by the distance table (1800..2000 m/s).
const SPEED_CURVE: [(f64, f64, f64); 9] = [
    (1200.0, 0.7, 0.55),
    (1300.0, 0.65, 0.5),
    (1400.0, 0.6, 0.45),
    (1500.0, 0.55, 0.4),
    (1600.0, 0.5, 0.35),
    (1700.0, 0.4, 0.3),
    (1800.0, 0.3, 0.2),
    (1900.0, 0.25, 0.15),
    (2000.0, 0.2, 0.1),
];

impl KillTable {
    pub fn for_type(kind: InterceptorType) -> Self {
        let (rows, type2) = match kind {
            InterceptorType::Type1 => (TYPE1_ROWS.to_vec(), false),
            InterceptorType::Type2 => (TYPE2_ROWS.to_vec(), true),
        };
        Self {
            kind,
            rows,
            speed_curve: SPEED_CURVE
                .iter()
                .map(|r| (r.0, if type2 { r.2 } else { r.1 }))
                .collect(),
            envelope_margin: 2000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(SimError::config("kill_table.rows", "empty table"));
        }
        if self.rows.iter().any(|r| !(0.0..=1.0).contains(&r.p)) {
            return Err(SimError::config("kill_table.rows", "P must lie in [0, 1]"));
        }
        if self.rows.windows(2).any(|w| w[1].h < w[0].h) {
            return Err(SimError::config(
                "kill_table.rows",
                "rows must be sorted by H",
            ));
        }
        if self.speed_curve.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SimError::config(
                "kill_table.speed_curve",
                "speeds must be strictly increasing",
            ));
        }
        Ok(())
    }

    /// `(P, V)` of the row set interpolated linearly in altitude, clamping
    /// to the nearest row outside the H span.
    fn row_at(&self, h: f64) -> (f64, f64) {
        let rows = &self.rows;
        let first = rows[0];
        let last = rows[rows.len() - 1];
        if h <= first.h {
            return (first.p, first.v);
        }
        if h >= last.h {
            return (last.p, last.v);
        }
        let i = rows.partition_point(|r| r.h <= h) - 1;
        let (a, b) = (rows[i], rows[i + 1]);
        if h == a.h {
            return (a.p, a.v);
        }
        let f = (h - a.h) / (b.h - a.h);
        (a.p + f * (b.p - a.p), a.v + f * (b.v - a.v))
    }

    fn speed_factor_curve(&self, v: f64) -> f64 {
        let c = &self.speed_curve;
        if c.is_empty() {
            return 1.0;
        }
        if v <= c[0].0 {
            return c[0].1;
        }
        if v >= c[c.len() - 1].0 {
            return c[c.len() - 1].1;
        }
        let i = c.partition_point(|p| p.0 <= v) - 1;
        let f = (v - c[i].0) / (c[i + 1].0 - c[i].0);
        c[i].1 + f * (c[i + 1].1 - c[i].1)
    }

    /// Attenuation of a row recorded at target speed `v_ref` when the actual
    /// target flies at `v`.
    pub fn speed_attenuation(&self, v: f64, v_ref: f64) -> f64 {
        let reference = v_ref.max(ATTENUATION_ONSET);
        if v <= reference {
            return 1.0;
        }
        let base = self.speed_factor_curve(reference);
        if base <= 0.0 {
            return 0.0;
        }
        (self.speed_factor_curve(v) / base).min(1.0)
    }

    pub fn h_envelope(&self) -> (f64, f64) {
        let lo = self.rows.iter().map(|r| r.h).fold(f64::INFINITY, f64::min);
        let hi = self
            .rows
            .iter()
            .map(|r| r.h)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo - self.envelope_margin, hi + self.envelope_margin)
    }

    pub fn d_envelope(&self) -> (f64, f64) {
        let hi = self
            .rows
            .iter()
            .map(|r| r.d)
            .fold(f64::NEG_INFINITY, f64::max);
        (0.0, hi + self.envelope_margin)
    }
}

pub fn kill_probability(table: &KillTable, h: f64, d: f64, v_target: f64) -> Result<f64> {
    if table.rows.is_empty() {
        return Err(SimError::config("kill_table.rows", "empty table"));
    }
    if h < 0.0 || d < 0.0 || v_target < 0.0 {
        return Err(SimError::domain(
            "kill_probability",
            "inputs must be non-negative",
        ));
    }
    let (h_lo, h_hi) = table.h_envelope();
    let (d_lo, d_hi) = table.d_envelope();
    if h < h_lo || h > h_hi || d < d_lo || d > d_hi {
        return Ok(0.0);
    }
    let (p, v_ref) = table.row_at(h);
    Ok((p * table.speed_attenuation(v_target, v_ref)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveZone {
    pub d_range: (f64, f64),
    pub h_range: (f64, f64),
    pub p_ceiling: f64,
    /// Applies only while the target is slower than this, m/s.
    pub max_target_speed: f64,
}

impl EffectiveZone {
    pub fn contains(&self, d: f64, h: f64) -> bool {
        d > self.d_range.0 && d < self.d_range.1 && h > self.h_range.0 && h < self.h_range.1
    }
}

pub fn effective_zone(kind: InterceptorType) -> EffectiveZone {
    match kind {
        InterceptorType::Type1 => EffectiveZone {
            d_range: (2500.0, 10_000.0),
            h_range: (4000.0, 14_000.0),
            p_ceiling: 0.6,
            max_target_speed: 1500.0,
        },
        InterceptorType::Type2 => EffectiveZone {
            d_range: (2000.0, 6000.0),
            h_range: (3500.0, 11_000.0),
            p_ceiling: 0.5,
            max_target_speed: 1500.0,
        },
    }
}

/// Time for a fixed-angle climb to cover a given slant range, tabulated over
/// launch elevation.
#[derive(Debug, Clone)]
pub struct Reachability {
    /// Elevation angles above the horizontal, rad, ascending in (0, π/2].
    elevations: Vec<f64>,
    /// Per elevation: `(time, slant distance)` samples, distance increasing.
    profiles: Vec<Vec<(f64, f64)>>,
}

impl Reachability {
    /// Flights end when the coasting speed falls below `min_speed` or after
    /// `max_time`.
    pub fn build(
        spec: &InterceptorSpec,
        env: &AtmosphereModel,
        g: f64,
        min_speed: f64,
        max_time: f64,
    ) -> Result<Self> {
        let elevations: Vec<f64> = (1..=18).map(|i| i as f64 * 5.0f64.to_radians()).collect();
        let mut profiles = Vec::with_capacity(elevations.len());
        let dt = 0.1;
        for &el in &elevations {
            let flight = fly_fixed_angle(spec, env, el, max_time, dt, g)?;
            let mut prof = Vec::new();
            let burn = spec.burn_time();
            for s in &flight.samples {
                if s.t > burn && s.v < min_speed {
                    break;
                }
                prof.push((s.t, s.x.hypot(s.y)));
            }
            profiles.push(prof);
        }
        Ok(Self {
            elevations,
            profiles,
        })
    }

    fn time_on_profile(prof: &[(f64, f64)], r: f64) -> Option<f64> {
        let i = prof.partition_point(|p| p.1 < r);
        if i == 0 {
            return Some(0.0);
        }
        if i >= prof.len() {
            return None;
        }
        let (a, b) = (prof[i - 1], prof[i]);
        Some(a.0 + (r - a.1) / (b.1 - a.1) * (b.0 - a.0))
    }

    /// Fly-out time to a point at ground distance `d` and altitude `h`;
    /// `None` when out of reach.
    pub fn time_to(&self, d: f64, h: f64) -> Option<f64> {
        let r = d.hypot(h);
        let el = h
            .atan2(d)
            .clamp(self.elevations[0], *self.elevations.last().unwrap());
        let j = self
            .elevations
            .partition_point(|&e| e <= el)
            .clamp(1, self.elevations.len() - 1);
        let (e0, e1) = (self.elevations[j - 1], self.elevations[j]);
        let t0 = Self::time_on_profile(&self.profiles[j - 1], r)?;
        let t1 = Self::time_on_profile(&self.profiles[j], r)?;
        let f = ((el - e0) / (e1 - e0)).clamp(0.0, 1.0);
        Some(t0 + f * (t1 - t0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterceptorSite {
    pub x: f64,
    #[serde(default)]
    pub z: f64,
    pub kind: InterceptorType,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
}

impl From<&VehicleState> for PredictedPoint {
    fn from(s: &VehicleState) -> Self {
        Self {
            t: s.t,
            x: s.x,
            y: s.y,
            z: s.z,
            v: s.v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchPlan {
    pub launch_time: f64,
    /// Predicted time the vehicle reaches the aim point.
    pub intercept_time: f64,
    pub fly_out_time: f64,
    pub aim_point: PredictedPoint,
    /// Initial flight-path angle toward the aim point, rad.
    pub aim_theta: f64,
    pub zone: ZoneId,
}

pub fn ground_distance(site: &InterceptorSite, p: &PredictedPoint) -> f64 {
    (p.x - site.x).hypot(p.z - site.z)
}

/// Feasibility of intercepting the vehicle at predicted point `p`.
pub fn plan_for_point(
    p: &PredictedPoint,
    site: &InterceptorSite,
    reach: &Reachability,
    earliest_launch: f64,
) -> Option<LaunchPlan> {
    let d = ground_distance(site, p);
    let zone = zone_classify(d, p.y)?;
    let fly_out = reach.time_to(d, p.y)?;
    let launch_time = p.t - fly_out;
    if launch_time < earliest_launch {
        return None;
    }
    Some(LaunchPlan {
        launch_time,
        intercept_time: p.t,
        fly_out_time: fly_out,
        aim_point: *p,
        aim_theta: p.y.atan2(p.x - site.x),
        zone,
    })
}

/// Earliest predicted point that lies in an engagement zone and can be
/// reached with a launch no earlier than `earliest_launch`.
pub fn launch_decision(
    prediction: &[PredictedPoint],
    site: &InterceptorSite,
    reach: &Reachability,
    earliest_launch: f64,
) -> Result<Option<LaunchPlan>> {
    if prediction.is_empty() {
        return Err(SimError::domain("launch_decision", "empty prediction"));
    }
    Ok(prediction
        .iter()
        .find_map(|p| plan_for_point(p, site, reach, earliest_launch)))
}

/// Planar relative geometry between interceptor and target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub range: f64,
    pub los: f64,
    pub los_rate: f64,
    pub closing_speed: f64,
}

pub fn geometry(m: &InterceptorState, t: &VehicleState) -> Result<Geometry> {
    let rx = t.x - m.x;
    let ry = t.y - m.y;
    let r2 = rx * rx + ry * ry;
    if r2 == 0.0 {
        return Err(SimError::domain("interceptor_guidance", "zero range"));
    }
    let vx = t.v * t.theta.cos() - m.v * m.theta.cos();
    let vy = t.v * t.theta.sin() - m.v * m.theta.sin();
    let range = r2.sqrt();
    Ok(Geometry {
        range,
        los: ry.atan2(rx),
        los_rate: (rx * vy - ry * vx) / r2,
        closing_speed: -(rx * vx + ry * vy) / range,
    })
}

/// Proportional navigation with gravity compensation,
/// `u = N' (Vc / g) dλ/dt + cos θ`, clamped to `limit`.
pub fn interceptor_guidance(
    m: &InterceptorState,
    target: &VehicleState,
    nav_gain: f64,
    limit: f64,
    g: f64,
) -> Result<f64> {
    let geo = geometry(m, target)?;
    Ok(pn_command(m, &geo, geo.los_rate, nav_gain, limit, g))
}

/// PN command from an externally measured LOS rate.
pub fn pn_command(
    m: &InterceptorState,
    geo: &Geometry,
    los_rate: f64,
    nav_gain: f64,
    limit: f64,
    g: f64,
) -> f64 {
    let raw = nav_gain * geo.closing_speed / g * los_rate + m.theta.cos();
    raw.clamp(-limit, limit)
}
