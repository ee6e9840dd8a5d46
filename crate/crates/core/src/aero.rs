//! Drag coefficient as a piecewise quadratic in Mach number.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// `cx = c2 * M^2 + c1 * M + c0` on `[mach_low, next segment's mach_low)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragSegment {
    pub mach_low: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl DragSegment {
    pub fn eval(&self, m: f64) -> f64 {
        (self.c2 * m + self.c1) * m + self.c0
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.c2, self.c1, self.c0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragModel {
    /// Ordered by `mach_low`; the first starts at 0 and the last is open-ended.
    pub segments: Vec<DragSegment>,
    pub cx_floor: f64,
    /// Mach number above which the coefficient is frozen at its value at the
    /// cap (hypersonic Mach independence). `None` evaluates the polynomial at
    /// any Mach.
    #[serde(default)]
    pub mach_cap: Option<f64>,
}

/// Mach edges of the transonic segment shared by both built-in models.
pub const TRANSONIC_LOW: f64 = 0.8;
pub const TRANSONIC_HIGH: f64 = 1.2;

fn three_segments(c: [(f64, f64, f64); 3], cx_floor: f64, mach_cap: Option<f64>) -> DragModel {
    let lows = [0.0, TRANSONIC_LOW, TRANSONIC_HIGH];
    DragModel {
        segments: lows
            .iter()
            .zip(c)
            .map(|(&mach_low, (c2, c1, c0))| DragSegment {
                mach_low,
                c2,
                c1,
                c0,
            })
            .collect(),
        cx_floor,
        mach_cap,
    }
}

/// Drag set of the descending vehicle.
pub fn vehicle_drag_model() -> DragModel {
    three_segments(
        [
            (1.37, 0.2, 0.2),
            (-6.0, 12.0, -5.0),
            (0.01416, -0.16993, 0.51679),
        ],
        0.05,
        Some(10.0),
    )
}

/// Drag set of the interceptors.
pub fn interceptor_drag_model() -> DragModel {
    three_segments(
        [
            (2.85, -2.85, 1.31),
            (-4.31, 8.62, -3.31),
            (0.0143, -1.184, 2.07),
        ],
        0.05,
        None,
    )
}

impl DragModel {
    pub fn validate(&self, key: &str) -> Result<()> {
        if self.segments.is_empty() {
            return Err(SimError::config(format!("{key}.segments"), "empty"));
        }
        if self.segments[0].mach_low != 0.0 {
            return Err(SimError::config(
                format!("{key}.segments"),
                "first segment must start at Mach 0",
            ));
        }
        if self
            .segments
            .windows(2)
            .any(|w| !(w[1].mach_low > w[0].mach_low))
        {
            return Err(SimError::config(
                format!("{key}.segments"),
                "segment Mach edges must be strictly increasing",
            ));
        }
        if !(self.cx_floor > 0.0 && self.cx_floor.is_finite()) {
            return Err(SimError::config(format!("{key}.cx_floor"), "must be > 0"));
        }
        if let Some(cap) = self.mach_cap {
            if !(cap > 0.0 && cap.is_finite()) {
                return Err(SimError::config(format!("{key}.mach_cap"), "must be > 0"));
            }
        }
        Ok(())
    }

    /// Segment covering `m`; a breakpoint belongs to the higher-Mach side.
    pub fn segment_index(&self, m: f64) -> usize {
        self.segments
            .iter()
            .rposition(|s| m >= s.mach_low)
            .unwrap_or(0)
    }

    pub fn cx(&self, m: f64) -> Result<f64> {
        if !m.is_finite() || m < 0.0 {
            return Err(SimError::domain("cx", format!("invalid Mach {m}")));
        }
        let m = self.mach_cap.map_or(m, |cap| m.min(cap));
        let raw = self.segments[self.segment_index(m)].eval(m);
        Ok(raw.max(self.cx_floor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vehicle_coefficients() {
        let d = vehicle_drag_model();
        assert_eq!(d.segments[0].coefficients(), (1.37, 0.2, 0.2));
        assert_eq!(d.segments[1].coefficients(), (-6.0, 12.0, -5.0));
        assert_eq!(d.segments[2].coefficients(), (0.01416, -0.16993, 0.51679));
    }

    #[test]
    fn interceptor_coefficients() {
        let d = interceptor_drag_model();
        assert_eq!(d.segments[0].coefficients(), (2.85, -2.85, 1.31));
        assert_relative_eq!(d.segments[1].eval(1.0), 1.0, epsilon = 1e-12);
        assert_eq!(d.segments[2].coefficients(), (0.0143, -1.184, 2.07));
    }

    #[test]
    fn cx_spot_values() {
        let v = vehicle_drag_model();
        assert_eq!(v.cx(0.0).unwrap(), 0.2);
        assert_eq!(v.cx(1.0).unwrap(), 1.0);
        assert_relative_eq!(v.cx(10.0).unwrap(), 0.23349, epsilon = 1e-12);
        let i = interceptor_drag_model();
        assert_relative_eq!(i.segments[2].eval(2.0), -0.2408, epsilon = 1e-12);
        assert_eq!(i.cx(2.0).unwrap(), 0.05);
    }

    #[test]
    fn mach_cap_freezes_coefficient() {
        let v = vehicle_drag_model();
        assert_eq!(v.cx(25.0).unwrap(), v.cx(10.0).unwrap());
        let uncapped = DragModel {
            mach_cap: None,
            ..v.clone()
        };
        assert!(uncapped.cx(25.0).unwrap() > 4.0);
    }

    #[test]
    fn breakpoint_ties_take_higher_segment() {
        let v = vehicle_drag_model();
        assert_eq!(v.segment_index(0.8), 1);
        assert_eq!(v.segment_index(1.2), 2);
        assert_eq!(v.segment_index(0.7999), 0);
        // Segment jump at 0.8: 1.2368 below, 0.76 above.
        assert_relative_eq!(v.cx(0.8).unwrap(), -6.0 * 0.64 + 9.6 - 5.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_mach_is_domain_error() {
        let v = vehicle_drag_model();
        assert!(v.cx(-0.1).is_err());
        assert!(v.cx(f64::NAN).is_err());
    }

    #[test]
    fn cx_positive_on_sampled_range() {
        for model in [vehicle_drag_model(), interceptor_drag_model()] {
            for i in 0..=3000 {
                let m = i as f64 * 0.01;
                let c = model.cx(m).unwrap();
                assert!(c >= model.cx_floor && c > 0.0);
            }
        }
    }

    #[test]
    fn cx_matches_polynomial_inside_segments() {
        let i = interceptor_drag_model();
        for k in 0..=79 {
            let m = k as f64 * 0.01;
            let direct = 2.85 * m * m - 2.85 * m + 1.31;
            assert!((i.cx(m).unwrap() - direct.max(0.05)).abs() < 1e-12);
        }
    }
}
