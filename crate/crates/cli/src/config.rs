//! Scenario files: TOML parsing with diagnostics, serialization and hashing.

use dqcluster::sim::Scenario;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Keys that must be present, as dotted paths. Keys under `formation` depend
/// on its `kind` and are checked by the deserializer.
const REQUIRED: &[&str] = &[
    "schema_version",
    "name",
    "duration",
    "controller",
    "noise",
    "noise.sigma",
    "noise.t_c",
    "fixed_gains",
    "fixed_gains.k_v_p",
    "fixed_gains.k_v_i",
    "fixed_gains.k_eta",
    "fixed_gains.k_xi",
    "formation",
    "formation.kind",
    "formation.reference",
];

fn missing_fields(doc: &toml::Table) -> Vec<&'static str> {
    // a missing table is reported once, not once per child key
    REQUIRED
        .iter()
        .copied()
        .filter(|path| {
            let parent_present = path
                .rsplit_once('.')
                .is_none_or(|(parent, _)| has_path(doc, parent));
            parent_present && !has_path(doc, path)
        })
        .collect()
}

fn has_path(doc: &toml::Table, path: &str) -> bool {
    let mut parts = path.split('.');
    let mut cur = doc.get(parts.next().expect("non-empty path"));
    for p in parts {
        cur = cur.and_then(|v| v.as_table()).and_then(|t| t.get(p));
    }
    cur.is_some()
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Schema(e.to_string()))?;
    let missing = missing_fields(&doc);
    if !missing.is_empty() {
        return Err(CliError::MissingFields(
            missing.iter().map(|s| s.to_string()).collect(),
        ));
    }
    let scenario: Scenario = toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn serialize_scenario(s: &Scenario) -> Result<String, CliError> {
    toml::to_string(s).map_err(|e| CliError::Schema(e.to_string()))
}

/// SHA-256 of the canonical serialization.
pub fn config_hash(s: &Scenario) -> Result<String, CliError> {
    let text = serialize_scenario(s)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn empty_document_lists_required_fields() {
        match parse_scenario("") {
            Err(CliError::MissingFields(f)) => {
                for key in [
                    "schema_version",
                    "name",
                    "duration",
                    "controller",
                    "noise",
                    "fixed_gains",
                    "formation",
                ] {
                    assert!(f.iter().any(|x| x == key), "{key} not listed in {f:?}");
                }
                assert!(!f.iter().any(|x| x == "noise.sigma"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nested_missing_field() {
        let text = presets::preset_text("2r_hover_shrink")
            .unwrap()
            .replace("t_c = 0.002\n", "");
        match parse_scenario(&text) {
            Err(CliError::MissingFields(f)) => assert_eq!(f, vec!["noise.t_c".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_location() {
        let text = presets::preset_text("2r_hover_shrink")
            .unwrap()
            .replace("sigma = 1.0", "sigma = 1.0\nsigmaa = 2.0");
        let e = parse_scenario(&text).unwrap_err().to_string();
        assert!(e.contains("sigmaa") && e.contains("line"), "{e}");
    }

    #[test]
    fn out_of_range_angle_rejected() {
        let text = presets::preset_text("3r_hover_roll").unwrap().replace(
            "alpha_min = 0.5235987755982988",
            &format!("alpha_min = {}", 200f64.to_radians()),
        );
        assert!(matches!(parse_scenario(&text), Err(CliError::Invalid(_))));
    }

    #[test]
    fn inverted_distance_bounds_rejected() {
        let text = presets::preset_text("2r_hover_shrink")
            .unwrap()
            .replace("d_min = 10.0", "d_min = 60.0");
        assert!(matches!(parse_scenario(&text), Err(CliError::Invalid(_))));
    }

    #[test]
    fn hash_tracks_every_field() {
        let s = presets::preset("2r_hover_shrink").unwrap();
        let h = config_hash(&s).unwrap();
        assert_eq!(h, config_hash(&s.clone()).unwrap());
        let mut t = s.clone();
        t.noise.t_c = 0.0021;
        assert_ne!(h, config_hash(&t).unwrap());
        let mut t = s;
        t.seed += 1;
        assert_ne!(h, config_hash(&t).unwrap());
    }
}
