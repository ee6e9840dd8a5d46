//! Four-phase autopilot of the descending vehicle, seeker acquisition and
//! evasion-turn geometry.
//!
//! All commands are load factors in units of g. The phase laws are
//!
//! | phase          | command                      |
//! |----------------|------------------------------|
//! | Gravitational  | `0` (or `cos θ` if enabled)  |
//! | PullUp         | `v² / (g R) + cos θ`         |
//! | AltitudeHold   | `k (H - y) + cos θ`          |
//! | Terminal       | `k_α α`                      |
//!
//! and every command is clamped to `±command_limit`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dynamics::VehicleState;
use crate::error::{Result, SimError};
use crate::rng::gaussian_sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GuidancePhase {
    Gravitational,
    PullUp,
    AltitudeHold,
    Terminal,
}

impl GuidancePhase {
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceConfig {
    /// Altitude at which the pull-up starts, m.
    pub pullup_altitude: f64,
    pub pullup_radius: f64,
    pub hold_altitude: f64,
    pub hold_gain: f64,
    /// PullUp hands over to AltitudeHold inside `hold_altitude + capture_band`.
    pub capture_band: f64,
    pub terminal_gain: f64,
    pub command_limit: f64,
    /// Fly `U = cos θ` instead of `U = 0` in the gravitational phase.
    #[serde(default)]
    pub ballistic_cos_command: bool,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self {
            pullup_altitude: 40_000.0,
            pullup_radius: 45_000.0,
            hold_altitude: 35_000.0,
            hold_gain: 0.005,
            capture_band: 500.0,
            terminal_gain: 10.0,
            command_limit: 15.0,
            ballistic_cos_command: false,
        }
    }
}

impl GuidanceConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, key: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::config(format!("guidance.{key}"), "must be > 0"))
            }
        };
        pos(self.pullup_radius, "pullup_radius")?;
        pos(self.hold_altitude, "hold_altitude")?;
        pos(self.hold_gain, "hold_gain")?;
        pos(self.terminal_gain, "terminal_gain")?;
        pos(self.command_limit, "command_limit")?;
        if !(self.capture_band >= 0.0) {
            return Err(SimError::config("guidance.capture_band", "must be >= 0"));
        }
        if !self.pullup_altitude.is_finite() {
            return Err(SimError::config(
                "guidance.pullup_altitude",
                "must be finite",
            ));
        }
        Ok(())
    }
}

/// Geometric seeker: locks on when the vehicle is below the activation
/// altitude, within acquisition range, and the target lies between
/// `min_look_down` and `field_of_regard` below the velocity vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeekerModel {
    pub activation_altitude: f64,
    pub acquisition_range: f64,
    pub field_of_regard: f64,
    pub min_look_down: f64,
    /// Set from the scenario's noise section.
    #[serde(skip)]
    pub angle_noise_sigma: f64,
}

impl Default for SeekerModel {
    fn default() -> Self {
        Self {
            activation_altitude: 45_000.0,
            acquisition_range: 200_000.0,
            field_of_regard: 0.8,
            min_look_down: 0.2,
            angle_noise_sigma: 0.0,
        }
    }
}

impl SeekerModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.activation_altitude > 0.0) {
            return Err(SimError::config(
                "seeker.activation_altitude",
                "must be > 0",
            ));
        }
        if !(self.acquisition_range > 0.0) {
            return Err(SimError::config("seeker.acquisition_range", "must be > 0"));
        }
        if !(self.field_of_regard > 0.0 && self.field_of_regard <= PI) {
            return Err(SimError::config(
                "seeker.field_of_regard",
                "must lie in (0, pi]",
            ));
        }
        if !(self.min_look_down >= 0.0 && self.min_look_down < self.field_of_regard) {
            return Err(SimError::config(
                "seeker.min_look_down",
                "must lie in [0, field_of_regard)",
            ));
        }
        if !(self.angle_noise_sigma >= 0.0) {
            return Err(SimError::config("seeker.angle_noise_sigma", "must be >= 0"));
        }
        Ok(())
    }

    pub fn acquires(&self, state: &VehicleState, target: &TargetPoint) -> bool {
        if state.y > self.activation_altitude || target.distance(state) > self.acquisition_range {
            return false;
        }
        match los_angle(state, target) {
            Ok(alpha) => {
                let look_down = -alpha;
                look_down >= self.min_look_down && look_down <= self.field_of_regard
            }
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvasionConfig {
    pub enabled: bool,
    /// Turn radius of the threatening interceptor, m.
    pub interceptor_turn_radius: f64,
    /// Interceptor speed used in the matched-turn balance, m/s.
    pub interceptor_speed: f64,
    /// How long one override lasts, s.
    pub dwell: f64,
}

impl Default for EvasionConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            interceptor_turn_radius: 3000.0,
            interceptor_speed: 1800.0,
            dwell: 3.0,
        }
    }
}

impl EvasionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.interceptor_turn_radius > 0.0) {
            return Err(SimError::config(
                "evasion.interceptor_turn_radius",
                "must be > 0",
            ));
        }
        if !(self.interceptor_speed > 0.0) {
            return Err(SimError::config("evasion.interceptor_speed", "must be > 0"));
        }
        if !(self.dwell >= 0.0) {
            return Err(SimError::config("evasion.dwell", "must be >= 0"));
        }
        Ok(())
    }
}

/// Landing point (or any aim point) in the simulation frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetPoint {
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

impl TargetPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, s: &VehicleState) -> f64 {
        ((self.x - s.x).powi(2) + (self.y - s.y).powi(2) + (self.z - s.z).powi(2)).sqrt()
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Signed angle from the velocity vector to the line of sight, measured in
/// the vertical plane along the current heading. Negative when the target
/// lies below the velocity vector.
pub fn los_angle(s: &VehicleState, target: &TargetPoint) -> Result<f64> {
    let dx = target.x - s.x;
    let dz = target.z - s.z;
    let dy = target.y - s.y;
    // Heading unit vector is (cos w, -sin w) in the (x, z) plane.
    let along = dx * s.w.cos() - dz * s.w.sin();
    if along == 0.0 && dy == 0.0 {
        return Err(SimError::domain("los_angle", "zero range to target"));
    }
    let lambda = dy.atan2(along);
    Ok(wrap_angle(lambda - s.theta))
}

pub fn phase_command(
    phase: GuidancePhase,
    cfg: &GuidanceConfig,
    s: &VehicleState,
    alpha: f64,
    g: f64,
) -> f64 {
    let raw = match phase {
        GuidancePhase::Gravitational => {
            if cfg.ballistic_cos_command {
                s.theta.cos()
            } else {
                0.0
            }
        }
        GuidancePhase::PullUp => s.v * s.v / (g * cfg.pullup_radius) + s.theta.cos(),
        GuidancePhase::AltitudeHold => cfg.hold_gain * (cfg.hold_altitude - s.y) + s.theta.cos(),
        GuidancePhase::Terminal => cfg.terminal_gain * alpha,
    };
    clamp_command(raw, cfg.command_limit)
}

pub fn clamp_command(u: f64, limit: f64) -> f64 {
    u.clamp(-limit, limit)
}

/// Advances the phase; never moves backwards. Several transitions may fire
/// in one call, and the seeker may cut straight to Terminal from any phase.
pub fn phase_transition(
    phase: GuidancePhase,
    s: &VehicleState,
    cfg: &GuidanceConfig,
    seeker: &SeekerModel,
    target: &TargetPoint,
) -> GuidancePhase {
    use GuidancePhase::*;
    if phase == Terminal {
        return Terminal;
    }
    if seeker.acquires(s, target) {
        return Terminal;
    }
    let mut p = phase;
    if p == Gravitational && s.y < cfg.pullup_altitude {
        p = PullUp;
    }
    if p == PullUp && (s.y < cfg.hold_altitude + cfg.capture_band || s.theta >= 0.0) {
        p = AltitudeHold;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvasionRadius {
    /// Matched-turn balance; `None` when the denominator is non-positive.
    pub exact: Option<f64>,
    pub approximate: f64,
}

/// Vehicle turn radius that matches an interceptor turning at `r_interceptor`.
pub fn evasion_radius(
    v_vehicle: f64,
    v_interceptor: f64,
    r_interceptor: f64,
    theta_v: f64,
    theta_i: f64,
    g: f64,
) -> Result<EvasionRadius> {
    if !(v_vehicle > 0.0 && v_interceptor > 0.0 && r_interceptor > 0.0 && g > 0.0) {
        return Err(SimError::domain(
            "evasion_radius",
            "speeds, radius and g must be positive",
        ));
    }
    let approximate = v_vehicle * v_vehicle * r_interceptor / (v_interceptor * v_interceptor);
    let denom = v_interceptor * v_interceptor / (g * r_interceptor) + theta_i.cos() + theta_v.cos();
    let exact = (denom > 0.0).then(|| v_vehicle * v_vehicle / (g * denom));
    Ok(EvasionRadius { exact, approximate })
}

/// Strict variant of [`evasion_radius`] that reports an infeasible exact
/// balance as an error.
pub fn evasion_radius_exact(
    v_vehicle: f64,
    v_interceptor: f64,
    r_interceptor: f64,
    theta_v: f64,
    theta_i: f64,
    g: f64,
) -> Result<f64> {
    evasion_radius(v_vehicle, v_interceptor, r_interceptor, theta_v, theta_i, g)?
        .exact
        .ok_or_else(|| SimError::domain("evasion_radius", "no feasible matched turn"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldGain {
    pub gain: f64,
    /// `atan(k (H - y))`, the angle of attack implied by the gain.
    pub implied_aoa: f64,
}

pub fn hold_gain_from_turn(v: f64, r_turn: f64, h_ref: f64, y: f64, g: f64) -> Result<HoldGain> {
    if h_ref == y {
        return Err(SimError::domain("hold_gain_from_turn", "h_ref equals y"));
    }
    if !(r_turn > 0.0) {
        return Err(SimError::domain(
            "hold_gain_from_turn",
            "r_turn must be > 0",
        ));
    }
    let gain = (v * v / (g * r_turn)) / (h_ref - y);
    Ok(HoldGain {
        gain,
        implied_aoa: (gain * (h_ref - y)).atan(),
    })
}

/// Raw evasion command for one activation, `sign` selecting the turn side.
pub fn evasion_command(
    s: &VehicleState,
    boost_detected: bool,
    cfg: &EvasionConfig,
    g: f64,
    sign: f64,
) -> Option<f64> {
    if !cfg.enabled || !boost_detected {
        return None;
    }
    let r_v = evasion_radius(
        s.v,
        cfg.interceptor_speed,
        cfg.interceptor_turn_radius,
        s.theta,
        0.0,
        g,
    )
    .ok()?
    .approximate;
    Some(sign * s.v * s.v / (g * r_v) + s.theta.cos())
}

/// Alternating-sign evasion overrides with a fixed dwell.
#[derive(Debug, Clone)]
pub struct EvasionController {
    cfg: EvasionConfig,
    active_until: f64,
    sign: f64,
    activations: usize,
}

impl EvasionController {
    pub fn new(cfg: EvasionConfig) -> Self {
        Self {
            cfg,
            active_until: f64::NEG_INFINITY,
            sign: -1.0,
            activations: 0,
        }
    }

    pub fn activations(&self) -> usize {
        self.activations
    }

    /// `boost_detected` is an edge: true at the step where a new boost is
    /// registered.
    pub fn update(&mut self, s: &VehicleState, boost_detected: bool, g: f64) -> Option<f64> {
        if !self.cfg.enabled {
            return None;
        }
        if boost_detected {
            self.sign = -self.sign;
            self.activations += 1;
            self.active_until = s.t + self.cfg.dwell;
        }
        if s.t < self.active_until {
            evasion_command(s, true, &self.cfg, g, self.sign)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEvent {
    pub phase: GuidancePhase,
    pub t: f64,
    pub y: f64,
    pub x: f64,
}

/// Vehicle autopilot: phase logic, seeker noise and evasion override.
#[derive(Debug, Clone)]
pub struct FlightController {
    pub guidance: GuidanceConfig,
    pub seeker: SeekerModel,
    pub target: TargetPoint,
    pub g: f64,
    phase: GuidancePhase,
    evasion: EvasionController,
    events: Vec<PhaseEvent>,
    seeker_enabled: bool,
}

impl FlightController {
    pub fn new(
        guidance: GuidanceConfig,
        seeker: SeekerModel,
        evasion: EvasionConfig,
        target: TargetPoint,
        g: f64,
    ) -> Self {
        Self {
            guidance,
            seeker,
            target,
            g,
            phase: GuidancePhase::Gravitational,
            evasion: EvasionController::new(evasion),
            events: Vec::new(),
            seeker_enabled: true,
        }
    }

    /// Disables acquisition; the vehicle never enters Terminal.
    pub fn without_seeker(mut self) -> Self {
        self.seeker_enabled = false;
        self
    }

    pub fn phase(&self) -> GuidancePhase {
        self.phase
    }

    pub fn events(&self) -> &[PhaseEvent] {
        &self.events
    }

    pub fn evasion_activations(&self) -> usize {
        self.evasion.activations()
    }

    /// Time of Terminal entry, if reached.
    pub fn terminal_entry(&self) -> Option<PhaseEvent> {
        self.events
            .iter()
            .copied()
            .find(|e| e.phase == GuidancePhase::Terminal)
    }

    fn advance(&mut self, s: &VehicleState) {
        let seeker = if self.seeker_enabled {
            self.seeker
        } else {
            SeekerModel {
                activation_altitude: f64::MIN_POSITIVE,
                acquisition_range: f64::MIN_POSITIVE,
                ..self.seeker
            }
        };
        let next = phase_transition(self.phase, s, &self.guidance, &seeker, &self.target);
        if next != self.phase {
            // Record every phase passed, including skipped ones.
            for idx in self.phase.index() + 1..=next.index() {
                let phase = [
                    GuidancePhase::Gravitational,
                    GuidancePhase::PullUp,
                    GuidancePhase::AltitudeHold,
                    GuidancePhase::Terminal,
                ][idx];
                self.events.push(PhaseEvent {
                    phase,
                    t: s.t,
                    y: s.y,
                    x: s.x,
                });
            }
            self.phase = next;
        }
    }

    /// Command for the step starting at `s`.
    pub fn command<R: Rng + ?Sized>(
        &mut self,
        s: &VehicleState,
        boost_detected: bool,
        rng: &mut R,
    ) -> Result<f64> {
        self.advance(s);
        let alpha = if self.phase == GuidancePhase::Terminal {
            los_angle(s, &self.target)? + gaussian_sample(rng, 0.0, self.seeker.angle_noise_sigma)
        } else {
            0.0
        };
        let mut u = phase_command(self.phase, &self.guidance, s, alpha, self.g);
        if matches!(
            self.phase,
            GuidancePhase::AltitudeHold | GuidancePhase::Terminal
        ) {
            if let Some(over) = self.evasion.update(s, boost_detected, self.g) {
                u = clamp_command(over, self.guidance.command_limit);
            }
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::STANDARD_GRAVITY as G;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn st(x: f64, y: f64, v: f64, theta: f64) -> VehicleState {
        VehicleState {
            t: 0.0,
            x,
            y,
            z: 0.0,
            v,
            theta,
            w: 0.0,
            n: 0.0,
        }
    }

    #[test]
    fn terminal_dead_ahead_is_zero() {
        let cfg = GuidanceConfig::default();
        assert_eq!(
            phase_command(
                GuidancePhase::Terminal,
                &cfg,
                &st(0.0, 1000.0, 2000.0, 0.0),
                0.0,
                G
            ),
            0.0
        );
    }

    #[test]
    fn altitude_hold_clamps() {
        let cfg = GuidanceConfig {
            hold_gain: 0.01,
            hold_altitude: 35_000.0,
            ..GuidanceConfig::default()
        };
        let s = st(0.0, 33_000.0, 2000.0, 0.0);
        // raw 0.01 * 2000 + 1 = 21
        assert_eq!(
            phase_command(GuidancePhase::AltitudeHold, &cfg, &s, 0.0, G),
            15.0
        );
    }

    #[test]
    fn pullup_value() {
        let cfg = GuidanceConfig {
            pullup_radius: 45_000.0,
            ..GuidanceConfig::default()
        };
        let s = st(0.0, 60_000.0, 2000.0, -0.1);
        let u = phase_command(GuidancePhase::PullUp, &cfg, &s, 0.0, G);
        assert_relative_eq!(u, 4e6 / (G * 45_000.0) + (-0.1f64).cos(), epsilon = 1e-12);
        assert!((u - 10.057).abs() < 5e-3);
    }

    #[test]
    fn ballistic_phase_command_switch() {
        let mut cfg = GuidanceConfig::default();
        let s = st(0.0, 84_000.0, 7800.0, -0.05);
        assert_eq!(
            phase_command(GuidancePhase::Gravitational, &cfg, &s, 0.0, G),
            0.0
        );
        cfg.ballistic_cos_command = true;
        assert_eq!(
            phase_command(GuidancePhase::Gravitational, &cfg, &s, 0.0, G),
            (-0.05f64).cos()
        );
    }

    #[test]
    fn los_angle_cases() {
        let t = TargetPoint::new(10_000.0, 0.0, 0.0);
        // Velocity aimed at the target.
        let aim = (-1000.0f64).atan2(10_000.0);
        assert!(los_angle(&st(0.0, 1000.0, 100.0, aim), &t).unwrap().abs() < 1e-15);
        // 45 degree depression by symmetry.
        let h = 5000.0;
        let t = TargetPoint::new(h, 0.0, 0.0);
        assert_relative_eq!(los_angle(&st(0.0, h, 100.0, 0.0), &t).unwrap(), -FRAC_PI_4);
        // Angle difference.
        let d = 10_000.0;
        let t = TargetPoint::new(d, 0.0, 0.0);
        let y = d * 0.5f64.tan();
        assert_relative_eq!(
            los_angle(&st(0.0, y, 100.0, -0.3), &t).unwrap(),
            -0.2,
            epsilon = 1e-12
        );
        // Zero range.
        let t = TargetPoint::new(5.0, 7.0, 0.0);
        assert!(los_angle(&st(5.0, 7.0, 100.0, 0.0), &t).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_relative_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0);
    }

    #[test]
    fn evasion_radius_values() {
        let r = evasion_radius(2000.0, 1800.0, 3000.0, 0.0, 0.0, G).unwrap();
        assert!((r.approximate - 3703.7).abs() < 0.1);
        let r = evasion_radius(1500.0, 1500.0, 4200.0, 0.0, 0.0, G).unwrap();
        assert_relative_eq!(r.approximate, 4200.0);
        let half = PI / 2.0;
        let r = evasion_radius(2000.0, 1800.0, 3000.0, half, half, G).unwrap();
        assert_relative_eq!(r.exact.unwrap(), r.approximate, max_relative = 1e-12);
    }

    #[test]
    fn evasion_radius_infeasible_and_invalid() {
        // Slow interceptor on a huge radius, both angles near pi: denominator < 0.
        let r = evasion_radius(2000.0, 100.0, 100_000.0, PI, PI, G).unwrap();
        assert!(r.exact.is_none());
        assert!(evasion_radius_exact(2000.0, 100.0, 100_000.0, PI, PI, G).is_err());
        assert!(evasion_radius(0.0, 1.0, 1.0, 0.0, 0.0, G).is_err());
    }

    #[test]
    fn hold_gain_values() {
        let k = hold_gain_from_turn(2000.0, 10_000.0, 33_000.0, 30_000.0, G).unwrap();
        assert!((k.gain - 0.01359).abs() < 1e-5);
        assert_relative_eq!(k.implied_aoa.tan(), k.gain * 3000.0, epsilon = 1e-12);
        let k2 = hold_gain_from_turn(2000.0, 10_000.0, 36_000.0, 30_000.0, G).unwrap();
        assert_relative_eq!(k2.gain, k.gain / 2.0, epsilon = 1e-15);
        let k3 = hold_gain_from_turn(1000.0, 10_000.0, 33_000.0, 30_000.0, G).unwrap();
        assert!((k3.gain - 0.0034).abs() < 1e-4);
        assert!(hold_gain_from_turn(2000.0, 10_000.0, 30_000.0, 30_000.0, G).is_err());
    }

    #[test]
    fn evasion_command_cases() {
        let s = st(0.0, 10_000.0, 2000.0, -0.3);
        let off = EvasionConfig::default();
        assert_eq!(evasion_command(&s, true, &off, G, 1.0), None);
        let on = EvasionConfig {
            enabled: true,
            ..off
        };
        assert_eq!(evasion_command(&s, false, &on, G, 1.0), None);
        let u = evasion_command(&s, true, &on, G, 1.0).unwrap();
        let r_v = 4e6 * 3000.0 / (1800.0f64 * 1800.0);
        assert_relative_eq!(u, 4e6 / (G * r_v) + (-0.3f64).cos(), epsilon = 1e-9);
        assert!((u - (-0.3f64).cos() - 110.1).abs() < 0.1);
        assert_eq!(clamp_command(u, 15.0), 15.0);
    }

    #[test]
    fn evasion_alternates_and_releases() {
        let cfg = EvasionConfig {
            enabled: true,
            ..EvasionConfig::default()
        };
        let mut ctl = EvasionController::new(cfg);
        let mut s = st(0.0, 10_000.0, 2000.0, 0.0);
        let first = ctl.update(&s, true, G).unwrap();
        s.t = 1.0;
        assert!(ctl.update(&s, false, G).unwrap() > 0.0);
        s.t = 3.5;
        assert_eq!(ctl.update(&s, false, G), None);
        let second = ctl.update(&s, true, G).unwrap();
        assert!(first > 0.0 && second < 0.0);
        assert_eq!(ctl.activations(), 2);
    }

    #[test]
    fn transitions_follow_altitude_and_seeker() {
        let cfg = GuidanceConfig::default();
        let seeker = SeekerModel::default();
        let far = TargetPoint::new(2_000_000.0, 0.0, 0.0);
        let p = phase_transition(
            GuidancePhase::Gravitational,
            &st(0.0, 85_000.0, 7800.0, -0.05),
            &cfg,
            &seeker,
            &far,
        );
        assert_eq!(p, GuidancePhase::Gravitational);
        let p = phase_transition(
            GuidancePhase::Gravitational,
            &st(0.0, 39_000.0, 7000.0, -0.1),
            &cfg,
            &seeker,
            &far,
        );
        assert_eq!(p, GuidancePhase::PullUp);
        let p = phase_transition(p, &st(0.0, 35_200.0, 6000.0, -0.02), &cfg, &seeker, &far);
        assert_eq!(p, GuidancePhase::AltitudeHold);
        // Target 100 km ahead from 35 km altitude: depression 0.34 rad.
        let near = TargetPoint::new(100_000.0, 0.0, 0.0);
        let p = phase_transition(p, &st(0.0, 35_000.0, 4000.0, 0.0), &cfg, &seeker, &near);
        assert_eq!(p, GuidancePhase::Terminal);
        let p = phase_transition(p, &st(0.0, 80_000.0, 4000.0, 0.0), &cfg, &seeker, &far);
        assert_eq!(p, GuidancePhase::Terminal);
    }
}
