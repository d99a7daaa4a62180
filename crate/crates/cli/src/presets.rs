//! Bundled scenarios: two 2R and six 3R.

use dqcluster::sim::Scenario;

use crate::config::parse_scenario;
use crate::CliError;

const PRESETS: &[(&str, &str)] = &[
    (
        "2r_hover_shrink",
        include_str!("../presets/2r_hover_shrink.toml"),
    ),
    ("2r_obstacle", include_str!("../presets/2r_obstacle.toml")),
    (
        "3r_hover_roll",
        include_str!("../presets/3r_hover_roll.toml"),
    ),
    (
        "3r_hover_pitch",
        include_str!("../presets/3r_hover_pitch.toml"),
    ),
    ("3r_hover_yaw", include_str!("../presets/3r_hover_yaw.toml")),
    (
        "3r_maneuver_roll",
        include_str!("../presets/3r_maneuver_roll.toml"),
    ),
    (
        "3r_maneuver_pitch",
        include_str!("../presets/3r_maneuver_pitch.toml"),
    ),
    (
        "3r_maneuver_yaw",
        include_str!("../presets/3r_maneuver_yaw.toml"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<Scenario, CliError> {
    let text = preset_text(name).ok_or_else(|| CliError::UnknownPreset(name.to_string()))?;
    parse_scenario(text)
}
