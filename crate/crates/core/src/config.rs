//! Scenario files: TOML parsing with located errors, dumping, and the
//! shipped presets.

use std::path::Path;

use crate::engagement::Scenario;
use crate::error::{Result, SimError};

/// Shipped scenario files by name.
pub const PRESETS: [(&str, &str); 6] = [
    ("x615", include_str!("../scenarios/x615.toml")),
    ("x800", include_str!("../scenarios/x800.toml")),
    ("x950", include_str!("../scenarios/x950.toml")),
    ("calibration", include_str!("../scenarios/calibration.toml")),
    ("speed", include_str!("../scenarios/speed.toml")),
    ("evasion", include_str!("../scenarios/evasion.toml")),
];

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Parses and validates a scenario document; missing keys take defaults.
pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| {
        let msg = e.message().trim().to_string();
        match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                SimError::Parse(format!("line {line}, column {col}: {msg}"))
            }
            None => SimError::Parse(msg),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_str(&text)
}

/// Fully expanded scenario document; parsing it gives back `scenario`.
pub fn dump_scenario(scenario: &Scenario) -> Result<String> {
    toml::to_string_pretty(scenario).map_err(|e| SimError::Parse(e.to_string()))
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<Scenario> {
    let text = preset_text(name).ok_or_else(|| {
        let known: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
        SimError::config(
            "preset",
            format!("unknown preset {name:?}; known: {}", known.join(", ")),
        )
    })?;
    parse_scenario_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engagement::VehicleMotion;

    #[test]
    fn empty_file_is_default() {
        let s = parse_scenario_str("").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.guidance.target.x, 615_000.0);
        assert_eq!(s.vehicle.entry.v, 7873.0);
    }

    #[test]
    fn x615_preset_matches_defaults() {
        assert_eq!(preset("x615").unwrap(), Scenario::default());
    }

    #[test]
    fn all_presets_parse_and_round_trip() {
        for (name, _) in PRESETS {
            let s = preset(name).unwrap();
            let again = parse_scenario_str(&dump_scenario(&s).unwrap()).unwrap();
            assert_eq!(s, again, "{name}");
        }
        assert_eq!(
            preset("speed").unwrap().vehicle.motion,
            VehicleMotion::ConstantVelocity
        );
        assert!(preset("nope").is_err());
    }

    #[test]
    fn override_applies() {
        let s = parse_scenario_str("[guidance]\nhold_altitude = 33000\n").unwrap();
        assert_eq!(s.guidance.hold_altitude, 33_000.0);
        assert_eq!(s.guidance.hold_gain, Scenario::default().guidance.hold_gain);
    }

    #[test]
    fn negative_gravity_names_key() {
        match parse_scenario_str("[atmosphere]\ng = -1.0\n") {
            Err(SimError::Config { key, .. }) => assert_eq!(key, "atmosphere.g"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_location() {
        let err = parse_scenario_str("[batch]\nruns = 10\nbogus = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");

        let err = parse_scenario_str("[nosuch]\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn syntax_error_reports_location() {
        let err = parse_scenario_str("[batch]\nruns = = 3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
