//! Point-mass equations of motion for the vehicle and the interceptors,
//! a classical fixed-step RK4 integrator and an event-terminated driver.
//!
//! Frame: flat Earth, `x` downrange, `y` altitude, `z` crossrange.
//! `theta` is the flight-path angle above the horizontal and `w` the heading.
//! The commanded load factor `u` reaches the state through the first-order
//! lag `dn/dt = (u - n) / lag_time`.

use serde::{Deserialize, Serialize};

use crate::aero::{vehicle_drag_model, DragModel};
use crate::atmosphere::AtmosphereModel;
use crate::error::{Result, SimError};
use crate::interceptor::InterceptorSpec;

pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Below this speed the `1/v` terms are treated as singular.
pub const MIN_SPEED: f64 = 1.0;

const MIN_COS_THETA: f64 = 1e-6;

/// State vector usable by [`rk4_step`]. The derivative has the same shape
/// as the state, with `dt/dt = 1` in the time slot.
pub trait OdeState: Copy + std::fmt::Debug {
    fn add_scaled(&self, d: &Self, h: f64) -> Self;
    fn lerp(&self, other: &Self, f: f64) -> Self;
    fn is_finite(&self) -> bool;
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
}

/// Position and speed accessors used by stop events and output.
pub trait Kinematic: OdeState {
    fn x(&self) -> f64;
    fn altitude(&self) -> f64;
    fn z(&self) -> f64;
    fn speed(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleState {
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub z: f64,
    pub v: f64,
    pub theta: f64,
    #[serde(default)]
    pub w: f64,
    #[serde(default)]
    pub n: f64,
}

impl VehicleState {
    /// First row of the 615 km reference run.
    pub fn reference_entry() -> Self {
        Self {
            t: 0.0,
            x: 0.0,
            y: 84_109.0,
            z: 0.0,
            v: 7873.0,
            theta: -0.0442,
            w: 0.0,
            n: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.t, self.x, self.y, self.z, self.v, self.theta, self.w, self.n,
        ];
        if fields.iter().any(|f| !f.is_finite()) {
            return Err(SimError::config(
                "vehicle.entry",
                "all fields must be finite",
            ));
        }
        if self.v <= MIN_SPEED {
            return Err(SimError::config("vehicle.entry.v", "must exceed 1 m/s"));
        }
        if !(self.theta > -std::f64::consts::PI && self.theta <= std::f64::consts::PI) {
            return Err(SimError::config(
                "vehicle.entry.theta",
                "must lie in (-pi, pi]",
            ));
        }
        Ok(())
    }
}

impl OdeState for VehicleState {
    fn add_scaled(&self, d: &Self, h: f64) -> Self {
        Self {
            t: self.t + h * d.t,
            x: self.x + h * d.x,
            y: self.y + h * d.y,
            z: self.z + h * d.z,
            v: self.v + h * d.v,
            theta: self.theta + h * d.theta,
            w: self.w + h * d.w,
            n: self.n + h * d.n,
        }
    }

    fn lerp(&self, o: &Self, f: f64) -> Self {
        let l = |a: f64, b: f64| a + f * (b - a);
        Self {
            t: l(self.t, o.t),
            x: l(self.x, o.x),
            y: l(self.y, o.y),
            z: l(self.z, o.z),
            v: l(self.v, o.v),
            theta: l(self.theta, o.theta),
            w: l(self.w, o.w),
            n: l(self.n, o.n),
        }
    }

    fn is_finite(&self) -> bool {
        [
            self.t, self.x, self.y, self.z, self.v, self.theta, self.w, self.n,
        ]
        .iter()
        .all(|f| f.is_finite())
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
}

impl Kinematic for VehicleState {
    fn x(&self) -> f64 {
        self.x
    }
    fn altitude(&self) -> f64 {
        self.y
    }
    fn z(&self) -> f64 {
        self.z
    }
    fn speed(&self) -> f64 {
        self.v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterceptorState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
    pub theta: f64,
    pub w: f64,
    pub n: f64,
    pub mass: f64,
}

impl OdeState for InterceptorState {
    fn add_scaled(&self, d: &Self, h: f64) -> Self {
        Self {
            t: self.t + h * d.t,
            x: self.x + h * d.x,
            y: self.y + h * d.y,
            z: self.z + h * d.z,
            v: self.v + h * d.v,
            theta: self.theta + h * d.theta,
            w: self.w + h * d.w,
            n: self.n + h * d.n,
            mass: self.mass + h * d.mass,
        }
    }

    fn lerp(&self, o: &Self, f: f64) -> Self {
        let l = |a: f64, b: f64| a + f * (b - a);
        Self {
            t: l(self.t, o.t),
            x: l(self.x, o.x),
            y: l(self.y, o.y),
            z: l(self.z, o.z),
            v: l(self.v, o.v),
            theta: l(self.theta, o.theta),
            w: l(self.w, o.w),
            n: l(self.n, o.n),
            mass: l(self.mass, o.mass),
        }
    }

    fn is_finite(&self) -> bool {
        [
            self.t, self.x, self.y, self.z, self.v, self.theta, self.w, self.n, self.mass,
        ]
        .iter()
        .all(|f| f.is_finite())
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
}

impl Kinematic for InterceptorState {
    fn x(&self) -> f64 {
        self.x
    }
    fn altitude(&self) -> f64 {
        self.y
    }
    fn z(&self) -> f64 {
        self.z
    }
    fn speed(&self) -> f64 {
        self.v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSpec {
    pub mass: f64,
    pub wing_area: f64,
    pub drag: DragModel,
    /// Recorded only; lift enters through the load-factor channel.
    pub lift_to_drag: f64,
    pub lag_time: f64,
    /// Share of the commanded load factor routed to the heading equation.
    /// Zero for planar flight.
    #[serde(default)]
    pub lateral_fraction: f64,
}

impl Default for VehicleSpec {
    fn default() -> Self {
        Self {
            mass: 1500.0,
            wing_area: 2.0,
            drag: vehicle_drag_model(),
            lift_to_drag: 2.0,
            lag_time: 1.0,
            lateral_fraction: 0.0,
        }
    }
}

impl VehicleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(SimError::config("vehicle.mass", "must be > 0"));
        }
        if !(self.wing_area > 0.0) {
            return Err(SimError::config("vehicle.wing_area", "must be > 0"));
        }
        if !(self.lag_time > 0.0) {
            return Err(SimError::config("vehicle.lag_time", "must be > 0"));
        }
        if !self.lateral_fraction.is_finite() || self.lateral_fraction.abs() > 1.0 {
            return Err(SimError::config(
                "vehicle.lateral_fraction",
                "must lie in [-1, 1]",
            ));
        }
        self.drag.validate("vehicle.drag")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    pub g: f64,
    /// Output decimation of the sampled trajectory, s.
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            t_max: 600.0,
            g: STANDARD_GRAVITY,
            sample_interval: 10.0,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::config("dt", "must be > 0"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(SimError::config("t_max", "must be > 0"));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(SimError::config("g", "must be > 0"));
        }
        if !(self.sample_interval > 0.0) {
            return Err(SimError::config("sample_interval", "must be > 0"));
        }
        Ok(())
    }

    /// Number of steps between output samples (at least one).
    pub fn sample_stride(&self) -> usize {
        ((self.sample_interval / self.dt).round() as usize).max(1)
    }
}

fn heading_rate(t: f64, g: f64, n_lateral: f64, v: f64, theta: f64) -> Result<f64> {
    if n_lateral == 0.0 {
        return Ok(0.0);
    }
    let c = theta.cos();
    if c.abs() < MIN_COS_THETA {
        return Err(SimError::IntegrationAbort {
            t,
            reason: "heading equation singular: cos(theta) ~ 0".into(),
        });
    }
    Ok(g * n_lateral / (v * c))
}

fn speed_guard(t: f64, v: f64) -> Result<()> {
    if !(v > MIN_SPEED) {
        return Err(SimError::IntegrationAbort {
            t,
            reason: format!("speed {v:.3} m/s below guard, 1/v term singular"),
        });
    }
    Ok(())
}

pub fn vehicle_derivatives(
    s: &VehicleState,
    u: f64,
    spec: &VehicleSpec,
    env: &AtmosphereModel,
    g: f64,
) -> Result<VehicleState> {
    speed_guard(s.t, s.v)?;
    let rho = env.density(s.y)?;
    let mach = env.mach(s.v, s.y)?;
    let cx = spec.drag.cx(mach)?;
    let (sin_t, cos_t) = s.theta.sin_cos();
    let drag_accel = cx * rho * s.v * s.v * spec.wing_area / (2.0 * spec.mass);
    let n_lat = spec.lateral_fraction * s.n;
    Ok(VehicleState {
        t: 1.0,
        x: s.v * cos_t * s.w.cos(),
        y: s.v * sin_t,
        z: -s.v * cos_t * s.w.sin(),
        v: -drag_accel - g * sin_t,
        theta: g / s.v * (s.n - cos_t),
        w: heading_rate(s.t, g, n_lat, s.v, s.theta)?,
        n: (u - s.n) / spec.lag_time,
    })
}

/// Interceptor right-hand side. Thrust and mass flow come from the spec's
/// stage schedule evaluated at `thrust_time` (time since launch); both drop
/// to zero once the mass reaches burnout.
pub fn interceptor_derivatives(
    s: &InterceptorState,
    u: f64,
    thrust_time: f64,
    spec: &InterceptorSpec,
    env: &AtmosphereModel,
    g: f64,
) -> Result<InterceptorState> {
    speed_guard(s.t, s.v)?;
    let (mut thrust, mut flow) = spec.thrust_and_flow(thrust_time);
    if s.mass <= spec.burnout_mass {
        thrust = 0.0;
        flow = 0.0;
    }
    let rho = env.density(s.y)?;
    let mach = env.mach(s.v, s.y)?;
    let cx = spec.drag.cx(mach)?;
    let (sin_t, cos_t) = s.theta.sin_cos();
    let drag = cx * rho * s.v * s.v * spec.wing_area / 2.0;
    let n_lat = spec.lateral_fraction * s.n;
    Ok(InterceptorState {
        t: 1.0,
        x: s.v * cos_t * s.w.cos(),
        y: s.v * sin_t,
        z: -s.v * cos_t * s.w.sin(),
        v: (thrust - drag) / s.mass - g * sin_t,
        theta: g / s.v * (s.n - cos_t),
        w: heading_rate(s.t, g, n_lat, s.v, s.theta)?,
        n: (u - s.n) / spec.lag_time,
        mass: -flow,
    })
}

/// One classical Runge–Kutta step. The control is closed over by `deriv`
/// and therefore held constant across the four stages.
pub fn rk4_step<S, F>(mut deriv: F, s: &S, dt: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    let h2 = 0.5 * dt;
    let check = |k: S, stage: usize| -> Result<S> {
        if k.is_finite() {
            Ok(k)
        } else {
            Err(SimError::IntegrationAbort {
                t: s.time(),
                reason: format!("non-finite derivative at stage {stage}, state {s:?}"),
            })
        }
    };
    let k1 = check(deriv(s)?, 1)?;
    let k2 = check(deriv(&s.add_scaled(&k1, h2))?, 2)?;
    let k3 = check(deriv(&s.add_scaled(&k2, h2))?, 3)?;
    let k4 = check(deriv(&s.add_scaled(&k3, dt))?, 4)?;
    let mut next = s
        .add_scaled(&k1, dt / 6.0)
        .add_scaled(&k2, dt / 3.0)
        .add_scaled(&k3, dt / 3.0)
        .add_scaled(&k4, dt / 6.0);
    next.set_time(s.time() + dt);
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopEvent {
    /// Altitude crosses zero; always active.
    GroundImpact,
    SpeedBelow(f64),
    TimeReached(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Touchdown refined by linear interpolation inside the final step.
    GroundImpact {
        t: f64,
        x: f64,
        z: f64,
    },
    SpeedBelow {
        t: f64,
    },
    TimeReached {
        t: f64,
    },
    Timeout {
        t: f64,
    },
}

impl Termination {
    pub fn time(&self) -> f64 {
        match *self {
            Termination::GroundImpact { t, .. }
            | Termination::SpeedBelow { t }
            | Termination::TimeReached { t }
            | Termination::Timeout { t } => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<S> {
    pub state: S,
    pub command: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    /// Decimated samples; the last entry is the terminal state.
    pub samples: Vec<Sample<S>>,
    pub final_state: S,
    pub termination: Termination,
    pub steps: usize,
}

/// Fixed-step loop until the first stop event or `config.t_max`.
///
/// `control` is evaluated once per step on the step's initial state.
pub fn integrate_until<S, D, C>(
    mut deriv: D,
    mut control: C,
    state0: S,
    config: &IntegratorConfig,
    stop_events: &[StopEvent],
) -> Result<Trajectory<S>>
where
    S: Kinematic,
    D: FnMut(&S, f64) -> Result<S>,
    C: FnMut(&S) -> Result<f64>,
{
    let stride = config.sample_stride();
    let t0 = state0.time();
    let mut samples = Vec::new();
    let mut s = state0;

    if s.altitude() <= 0.0 {
        samples.push(Sample {
            state: s,
            command: 0.0,
        });
        return Ok(Trajectory {
            samples,
            final_state: s,
            termination: Termination::GroundImpact {
                t: s.time(),
                x: s.x(),
                z: s.z(),
            },
            steps: 0,
        });
    }

    let max_steps = ((config.t_max - t0) / config.dt).ceil().max(0.0) as usize;
    for step in 0..max_steps {
        let u = control(&s)?;
        if step % stride == 0 {
            samples.push(Sample {
                state: s,
                command: u,
            });
        }
        let mut next = rk4_step(|st| deriv(st, u), &s, config.dt)?;
        next.set_time(t0 + (step + 1) as f64 * config.dt);

        if next.altitude() <= 0.0 {
            let f = s.altitude() / (s.altitude() - next.altitude());
            let touch = s.lerp(&next, f);
            samples.push(Sample {
                state: touch,
                command: u,
            });
            return Ok(Trajectory {
                samples,
                final_state: touch,
                termination: Termination::GroundImpact {
                    t: touch.time(),
                    x: touch.x(),
                    z: touch.z(),
                },
                steps: step + 1,
            });
        }
        for ev in stop_events {
            let hit = match *ev {
                StopEvent::GroundImpact => None,
                StopEvent::SpeedBelow(vmin) if next.speed() < vmin => {
                    Some(Termination::SpeedBelow { t: next.time() })
                }
                StopEvent::TimeReached(tr) if next.time() >= tr - 1e-9 => {
                    Some(Termination::TimeReached { t: next.time() })
                }
                _ => None,
            };
            if let Some(termination) = hit {
                samples.push(Sample {
                    state: next,
                    command: u,
                });
                return Ok(Trajectory {
                    samples,
                    final_state: next,
                    termination,
                    steps: step + 1,
                });
            }
        }
        s = next;
    }
    samples.push(Sample {
        state: s,
        command: samples.last().map_or(0.0, |x| x.command),
    });
    Ok(Trajectory {
        samples,
        final_state: s,
        termination: Termination::Timeout { t: s.time() },
        steps: max_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn vacuum() -> AtmosphereModel {
        AtmosphereModel {
            rho0: 0.0,
            ..AtmosphereModel::default()
        }
    }

    fn state(y: f64, v: f64, theta: f64, n: f64) -> VehicleState {
        VehicleState {
            t: 0.0,
            x: 0.0,
            y,
            z: 0.0,
            v,
            theta,
            w: 0.0,
            n,
        }
    }

    #[test]
    fn vacuum_level_flight_equilibrium() {
        let d = vehicle_derivatives(
            &state(30_000.0, 2000.0, 0.0, 1.0),
            1.0,
            &VehicleSpec::default(),
            &vacuum(),
            STANDARD_GRAVITY,
        )
        .unwrap();
        assert_eq!(d.v, 0.0);
        assert_eq!(d.theta, 0.0);
        assert_eq!(d.y, 0.0);
        assert_eq!(d.n, 0.0);
    }

    #[test]
    fn vacuum_dive() {
        let d = vehicle_derivatives(
            &state(30_000.0, 2000.0, -FRAC_PI_2, 0.0),
            0.0,
            &VehicleSpec::default(),
            &vacuum(),
            STANDARD_GRAVITY,
        )
        .unwrap();
        assert_relative_eq!(d.v, STANDARD_GRAVITY, epsilon = 1e-12);
        assert_relative_eq!(d.y, -2000.0, epsilon = 1e-9);
    }

    #[test]
    fn entry_downrange_rate() {
        let s = VehicleState::reference_entry();
        let d = vehicle_derivatives(
            &s,
            0.0,
            &VehicleSpec::default(),
            &AtmosphereModel::default(),
            STANDARD_GRAVITY,
        )
        .unwrap();
        assert!((d.x - 7865.3).abs() < 0.1, "dx/dt = {}", d.x);
        // Ten seconds at this rate against the tabulated 78617 m.
        assert!((d.x * 10.0 - 78_617.0).abs() / 78_617.0 < 0.001);
    }

    #[test]
    fn low_speed_aborts() {
        let r = vehicle_derivatives(
            &state(1000.0, 0.5, 0.0, 0.0),
            0.0,
            &VehicleSpec::default(),
            &AtmosphereModel::default(),
            STANDARD_GRAVITY,
        );
        assert!(matches!(r, Err(SimError::IntegrationAbort { .. })));
    }

    #[test]
    fn lateral_channel_singular_at_vertical() {
        let spec = VehicleSpec {
            lateral_fraction: 0.5,
            ..VehicleSpec::default()
        };
        let r = vehicle_derivatives(
            &state(1000.0, 500.0, -FRAC_PI_2, 1.0),
            0.0,
            &spec,
            &vacuum(),
            STANDARD_GRAVITY,
        );
        assert!(matches!(r, Err(SimError::IntegrationAbort { .. })));
    }

    #[test]
    fn drag_only_decelerates() {
        let spec = VehicleSpec::default();
        let env = AtmosphereModel::default();
        for &(y, v, th) in &[
            (5000.0, 300.0, 0.2),
            (30_000.0, 4000.0, -0.3),
            (70_000.0, 7800.0, -0.05),
        ] {
            let s = state(y, v, th, th.cos());
            let d = vehicle_derivatives(&s, th.cos(), &spec, &env, STANDARD_GRAVITY).unwrap();
            assert!(d.v < -STANDARD_GRAVITY * th.sin());
        }
    }

    #[derive(Debug, Clone, Copy)]
    struct Scalar {
        t: f64,
        y: f64,
    }

    impl OdeState for Scalar {
        fn add_scaled(&self, d: &Self, h: f64) -> Self {
            Scalar {
                t: self.t + h * d.t,
                y: self.y + h * d.y,
            }
        }
        fn lerp(&self, o: &Self, f: f64) -> Self {
            Scalar {
                t: self.t + f * (o.t - self.t),
                y: self.y + f * (o.y - self.y),
            }
        }
        fn is_finite(&self) -> bool {
            self.t.is_finite() && self.y.is_finite()
        }
        fn time(&self) -> f64 {
            self.t
        }
        fn set_time(&mut self, t: f64) {
            self.t = t;
        }
    }

    #[test]
    fn rk4_exact_for_constant_rate() {
        let s = Scalar { t: 0.0, y: 3.0 };
        let next = rk4_step(|_| Ok(Scalar { t: 1.0, y: 2.5 }), &s, 0.02).unwrap();
        assert_eq!(next.y, 3.0 + 2.5 * 0.02);
    }

    #[test]
    fn rk4_exponential_local_error() {
        // y' = y; one step of RK4 matches the 4th-order Taylor polynomial.
        let h = 0.1;
        let s = Scalar { t: 0.0, y: 1.0 };
        let next = rk4_step(|st| Ok(Scalar { t: 1.0, y: st.y }), &s, h).unwrap();
        let taylor = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert_relative_eq!(next.y, taylor, epsilon = 1e-15);
    }

    #[test]
    fn rk4_non_finite_aborts() {
        let s = Scalar { t: 0.0, y: 1.0 };
        let r = rk4_step(
            |_| {
                Ok(Scalar {
                    t: 1.0,
                    y: f64::NAN,
                })
            },
            &s,
            0.1,
        );
        assert!(matches!(r, Err(SimError::IntegrationAbort { .. })));
    }

    #[test]
    fn ground_start_gives_immediate_impact() {
        let s = state(0.0, 100.0, 0.0, 0.0);
        let traj = integrate_until(
            |st, u| {
                vehicle_derivatives(st, u, &VehicleSpec::default(), &vacuum(), STANDARD_GRAVITY)
            },
            |_| Ok(0.0),
            s,
            &IntegratorConfig::default(),
            &[StopEvent::GroundImpact],
        )
        .unwrap();
        assert_eq!(traj.steps, 0);
        assert!(matches!(traj.termination, Termination::GroundImpact { t, .. } if t == 0.0));
    }

    #[test]
    fn vacuum_drop_touchdown_interpolated() {
        // Level release at 1000 m; closed-form time sqrt(2h/g) to within the
        // linear-interpolation error of a single step.
        let s = state(1000.0, 100.0, 0.0, 0.0);
        let traj = integrate_until(
            |st, u| {
                vehicle_derivatives(st, u, &VehicleSpec::default(), &vacuum(), STANDARD_GRAVITY)
            },
            |_| Ok(0.0),
            s,
            &IntegratorConfig::default(),
            &[StopEvent::GroundImpact],
        )
        .unwrap();
        let t_exact = (2.0 * 1000.0 / STANDARD_GRAVITY).sqrt();
        let Termination::GroundImpact { t, x, .. } = traj.termination else {
            panic!("expected ground impact");
        };
        assert!((t - t_exact).abs() < 1e-3, "t = {t}, exact {t_exact}");
        assert!((x - 100.0 * t_exact).abs() < 0.1);
    }

    #[test]
    fn timeout_is_a_result() {
        let s = state(30_000.0, 2000.0, 0.0, 1.0);
        let cfg = IntegratorConfig {
            t_max: 5.0,
            ..IntegratorConfig::default()
        };
        let traj = integrate_until(
            |st, u| {
                vehicle_derivatives(st, u, &VehicleSpec::default(), &vacuum(), STANDARD_GRAVITY)
            },
            |_| Ok(1.0),
            s,
            &cfg,
            &[StopEvent::GroundImpact],
        )
        .unwrap();
        assert!(matches!(traj.termination, Termination::Timeout { .. }));
        assert!((traj.final_state.t - 5.0).abs() < 1e-9);
    }

    #[test]
    fn load_factor_lag_closed_form() {
        // v frozen by a zero speed derivative, n'(t) = (u0 - n)/T.
        let spec = VehicleSpec::default();
        let u0 = 3.0;
        let mut s = state(30_000.0, 2000.0, 0.0, 0.0);
        let dt = 0.02;
        for _ in 0..250 {
            s = rk4_step(
                |st| {
                    let mut d = vehicle_derivatives(st, u0, &spec, &vacuum(), STANDARD_GRAVITY)?;
                    d.v = 0.0;
                    Ok(d)
                },
                &s,
                dt,
            )
            .unwrap();
        }
        let exact = u0 * (1.0 - (-s.t / spec.lag_time).exp());
        assert!((s.n - exact).abs() < 1e-6);
    }
}
