//! Static environment: exponential density, piecewise-linear speed of sound
//! and Mach number.
//!
//! Altitudes are taken in metres. Inside the speed-of-sound branches the
//! altitude is expressed in kilometres, matching the form
//! `a + b * (H_km - H0_km)` of each branch. Negative altitudes are clamped
//! to sea level for every lookup.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// One branch of the speed-of-sound profile, valid on `[low_m, high_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoundSpeedSegment {
    pub low_m: f64,
    /// Upper edge; `None` for the open-ended top branch.
    #[serde(default)]
    pub high_m: Option<f64>,
    /// Speed at the reference altitude, m/s.
    pub a: f64,
    /// Slope in m/s per km.
    pub b: f64,
    /// Reference altitude of the branch formula, km.
    pub h0_km: f64,
}

impl SoundSpeedSegment {
    const fn new(low_m: f64, high_m: Option<f64>, a: f64, b: f64, h0_km: f64) -> Self {
        Self {
            low_m,
            high_m,
            a,
            b,
            h0_km,
        }
    }

    fn contains(&self, h: f64) -> bool {
        h >= self.low_m && self.high_m.is_none_or(|hi| h < hi)
    }

    pub fn eval(&self, h_m: f64) -> f64 {
        self.a + self.b * (h_m / 1000.0 - self.h0_km)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtmosphereModel {
    /// Sea-level density, kg/m³.
    pub rho0: f64,
    /// Inverse scale height, 1/m.
    pub k_decay: f64,
    /// Ordered bottom to top.
    pub vs_segments: Vec<SoundSpeedSegment>,
}

/// Speed-of-sound discontinuity at one interior breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEdge {
    pub altitude_m: f64,
    pub below: f64,
    pub above: f64,
}

impl BranchEdge {
    pub fn jump(&self) -> f64 {
        (self.above - self.below).abs()
    }
}

impl Default for AtmosphereModel {
    fn default() -> Self {
        Self {
            rho0: 1.225,
            k_decay: 1.0 / 7000.0,
            vs_segments: vec![
                SoundSpeedSegment::new(0.0, Some(11_000.0), 340.28, -4.1, 0.0),
                SoundSpeedSegment::new(11_000.0, Some(25_000.0), 295.1, 0.0, 0.0),
                SoundSpeedSegment::new(25_000.0, Some(45_500.0), 295.1, 1.8, 25.0),
                SoundSpeedSegment::new(45_500.0, Some(54_000.0), 330.8, 0.0, 0.0),
                SoundSpeedSegment::new(54_000.0, Some(80_000.0), 330.8, -2.0, 54.0),
                SoundSpeedSegment::new(80_000.0, None, 272.6, 0.0, 0.0),
            ],
        }
    }
}

fn check_altitude(op: &'static str, h: f64) -> Result<f64> {
    if !h.is_finite() {
        return Err(SimError::domain(op, format!("non-finite altitude {h}")));
    }
    Ok(h.max(0.0))
}

impl AtmosphereModel {
    /// Checks the type invariants; called after loading from config.
    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(SimError::config("atmosphere.rho0", "must be > 0"));
        }
        if !(self.k_decay > 0.0 && self.k_decay.is_finite()) {
            return Err(SimError::config("atmosphere.k_decay", "must be > 0"));
        }
        let segs = &self.vs_segments;
        if segs.is_empty() {
            return Err(SimError::config("atmosphere.vs_segments", "empty"));
        }
        if segs[0].low_m != 0.0 {
            return Err(SimError::config(
                "atmosphere.vs_segments",
                "first segment must start at 0 m",
            ));
        }
        for (i, seg) in segs.iter().enumerate() {
            let last = i + 1 == segs.len();
            match (seg.high_m, last) {
                (None, true) => {}
                (None, false) => {
                    return Err(SimError::config(
                        "atmosphere.vs_segments",
                        format!("segment {i} is open-ended but not the topmost"),
                    ))
                }
                (Some(_), true) => {
                    return Err(SimError::config(
                        "atmosphere.vs_segments",
                        "topmost segment must be open-ended",
                    ))
                }
                (Some(hi), false) => {
                    if !(hi > seg.low_m) || segs[i + 1].low_m != hi {
                        return Err(SimError::config(
                            "atmosphere.vs_segments",
                            format!("segment {i} leaves a gap or overlap at {hi} m"),
                        ));
                    }
                }
            }
            let top = seg.high_m.unwrap_or(seg.low_m.max(200_000.0));
            if seg.eval(seg.low_m) <= 0.0 || seg.eval(top) <= 0.0 {
                return Err(SimError::config(
                    "atmosphere.vs_segments",
                    format!("segment {i} yields a non-positive speed of sound"),
                ));
            }
        }
        Ok(())
    }

    pub fn density(&self, h: f64) -> Result<f64> {
        let h = check_altitude("density", h)?;
        Ok(self.rho0 * (-self.k_decay * h).exp())
    }

    pub fn speed_of_sound(&self, h: f64) -> Result<f64> {
        let h = check_altitude("speed_of_sound", h)?;
        Ok(self.segment_at(h).eval(h))
    }

    pub fn mach(&self, v: f64, h: f64) -> Result<f64> {
        if !v.is_finite() || v < 0.0 {
            return Err(SimError::domain("mach", format!("invalid speed {v}")));
        }
        Ok(v / self.speed_of_sound(h)?)
    }

    fn segment_at(&self, h: f64) -> &SoundSpeedSegment {
        // Half-open intervals: a breakpoint belongs to the higher branch.
        self.vs_segments
            .iter()
            .rev()
            .find(|s| s.contains(h))
            .unwrap_or(&self.vs_segments[0])
    }

    /// Discontinuities of the speed-of-sound profile, probed `probe_m` metres
    /// either side of every interior breakpoint.
    pub fn branch_edges(&self, probe_m: f64) -> Vec<BranchEdge> {
        self.vs_segments
            .iter()
            .skip(1)
            .map(|s| BranchEdge {
                altitude_m: s.low_m,
                below: self.segment_at(s.low_m - probe_m).eval(s.low_m - probe_m),
                above: self.segment_at(s.low_m + probe_m).eval(s.low_m + probe_m),
            })
            .collect()
    }

    /// Copy with density scaled by `factor` (per-run density dispersion).
    pub fn with_density_factor(&self, factor: f64) -> Self {
        Self {
            rho0: self.rho0 * factor,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_values() {
        let atm = AtmosphereModel::default();
        assert_eq!(atm.density(0.0).unwrap(), 1.225);
        assert_relative_eq!(
            atm.density(7000.0).unwrap(),
            1.225 / std::f64::consts::E,
            epsilon = 1e-12
        );
        assert_relative_eq!(atm.density(7000.0).unwrap(), 0.45064, epsilon = 2e-5);
        let high = atm.density(1e6).unwrap();
        assert!(high > 0.0 && high < 1e-50);
    }

    #[test]
    fn negative_altitude_clamps() {
        let atm = AtmosphereModel::default();
        assert_eq!(atm.density(-0.4).unwrap(), atm.density(0.0).unwrap());
        assert_eq!(atm.speed_of_sound(-2.0).unwrap(), 340.28);
    }

    #[test]
    fn non_finite_altitude_is_domain_error() {
        let atm = AtmosphereModel::default();
        assert!(matches!(
            atm.density(f64::NAN),
            Err(SimError::Domain { .. })
        ));
        assert!(matches!(
            atm.speed_of_sound(f64::INFINITY),
            Err(SimError::Domain { .. })
        ));
        assert!(atm.mach(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn speed_of_sound_branches() {
        let atm = AtmosphereModel::default();
        assert_eq!(atm.speed_of_sound(0.0).unwrap(), 340.28);
        assert_eq!(atm.speed_of_sound(20_000.0).unwrap(), 295.1);
        assert_relative_eq!(atm.speed_of_sound(60_000.0).unwrap(), 318.8, epsilon = 1e-9);
        assert_eq!(atm.speed_of_sound(90_000.0).unwrap(), 272.6);
        assert_relative_eq!(atm.speed_of_sound(30_000.0).unwrap(), 304.1, epsilon = 1e-9);
        assert_relative_eq!(atm.speed_of_sound(5_000.0).unwrap(), 319.78, epsilon = 1e-9);
    }

    #[test]
    fn breakpoint_ties_take_higher_branch() {
        let atm = AtmosphereModel::default();
        assert_eq!(atm.speed_of_sound(80_000.0).unwrap(), 272.6);
        assert_eq!(atm.speed_of_sound(45_500.0).unwrap(), 330.8);
        assert_eq!(atm.speed_of_sound(11_000.0).unwrap(), 295.1);
    }

    #[test]
    fn mach_values() {
        let atm = AtmosphereModel::default();
        assert_relative_eq!(atm.mach(340.28, 0.0).unwrap(), 1.0);
        assert_eq!(atm.mach(0.0, 12_345.0).unwrap(), 0.0);
        assert_relative_eq!(atm.mach(2951.0, 20_000.0).unwrap(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn branch_edge_audit_reproduces_discontinuities() {
        let atm = AtmosphereModel::default();
        let edges = atm.branch_edges(1.0);
        assert_eq!(edges.len(), 5);
        let at = |h: f64| edges.iter().find(|e| e.altitude_m == h).unwrap().jump();
        // 80 km: 330.8 - 2*26 = 278.8 below, 272.6 above.
        assert!((at(80_000.0) - 6.2).abs() < 0.01);
        // 45.5 km: 295.1 + 1.8*20.5 = 332.0 below, 330.8 above.
        assert!((at(45_500.0) - 1.2).abs() < 0.01);
        // 25 km and 54 km are continuous; 11 km jumps by 0.08 m/s.
        assert!(at(25_000.0) < 0.01);
        assert!(at(54_000.0) < 0.01);
        assert!((at(11_000.0) - 0.08).abs() < 0.01);
    }

    #[test]
    fn density_strictly_decreasing_and_sound_speed_bounded() {
        let atm = AtmosphereModel::default();
        let mut prev = f64::INFINITY;
        for km in 0..=200 {
            let h = km as f64 * 1000.0;
            let rho = atm.density(h).unwrap();
            assert!(rho < prev);
            prev = rho;
            let vs = atm.speed_of_sound(h).unwrap();
            assert!((250.0..=345.0).contains(&vs), "vs({h}) = {vs}");
        }
    }

    #[test]
    fn validation_rejects_gaps() {
        let mut atm = AtmosphereModel::default();
        atm.validate().unwrap();
        atm.vs_segments[2].low_m = 26_000.0;
        assert!(atm.validate().is_err());
        let atm = AtmosphereModel {
            rho0: 0.0,
            ..AtmosphereModel::default()
        };
        assert!(atm.validate().is_err());
    }
}
