//! Species registry files: a JSON document describing one atomic species.
//!
//! ```json
//! {
//!   "name": "toy-atom",
//!   "mass": 1.0,
//!   "levels": [0.0, 1.0],
//!   "transitions": [ { "upper": 1, "lower": 0, "dipole": 1.0 } ],
//!   "units": "natural"
//! }
//! ```
//!
//! Each transition carries exactly one of `dipole` or `gamma` (the decay
//! rate, from which the dipole is derived). Unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atom::{dipole_from_rate, MultilevelAtom, Transition, TwoLevelAtom};
use crate::constants::{PhysicalConstants, UnitSystem};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesFile {
    name: String,
    mass: f64,
    levels: Vec<f64>,
    transitions: Vec<TransitionEntry>,
    units: UnitSystem,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    upper: usize,
    lower: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dipole: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
}

/// A parsed and validated species: the atom plus its unit system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    pub units: UnitSystem,
    pub atom: MultilevelAtom,
}

impl Species {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpeciesFile =
            serde_json::from_str(text).map_err(|e| Error::Species(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Species(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    fn from_file(file: SpeciesFile) -> Result<Self> {
        let consts = PhysicalConstants::for_unit_system(file.units);
        let mut transitions = Vec::with_capacity(file.transitions.len());
        for (idx, entry) in file.transitions.iter().enumerate() {
            let dipole = match (entry.dipole, entry.gamma) {
                (Some(d), None) => d,
                (None, Some(rate)) => {
                    if entry.upper >= file.levels.len() || entry.lower >= file.levels.len() {
                        return Err(Error::Species(format!(
                            "transition {idx}: level index out of range"
                        )));
                    }
                    let omega = file.levels[entry.upper] - file.levels[entry.lower];
                    if !(omega > 0.0) {
                        return Err(Error::Species(format!(
                            "transition {idx}: omega_upper must exceed omega_lower"
                        )));
                    }
                    dipole_from_rate(rate, omega, &consts)
                        .map_err(|e| Error::Species(format!("transition {idx}: {e}")))?
                }
                (Some(_), Some(_)) => {
                    return Err(Error::Species(format!(
                        "transition {idx}: specify exactly one of dipole or gamma, got both"
                    )));
                }
                (None, None) => {
                    return Err(Error::Species(format!(
                        "transition {idx}: specify exactly one of dipole or gamma, got neither"
                    )));
                }
            };
            transitions.push(Transition {
                upper: entry.upper,
                lower: entry.lower,
                dipole,
            });
        }
        let atom = MultilevelAtom::new(file.mass, file.levels, transitions)
            .map_err(|e| Error::Species(e.to_string()))?;
        Ok(Species {
            name: file.name,
            units: file.units,
            atom,
        })
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::for_unit_system(self.units)
    }

    /// The two-level view, when the species has exactly two levels and one
    /// transition.
    pub fn as_two_level(&self) -> Option<TwoLevelAtom> {
        self.atom.as_two_level(&self.constants())
    }

    /// Lowest transition gap; the reference frequency for --beta-homega.
    pub fn reference_frequency(&self) -> Option<f64> {
        self.atom
            .transitions()
            .iter()
            .map(|t| self.atom.transition_gap(t))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TWO_LEVEL: &str = r#"{
        "name": "toy-atom",
        "mass": 1.0,
        "levels": [0.0, 1.0],
        "transitions": [ { "upper": 1, "lower": 0, "dipole": 1.0 } ],
        "units": "natural"
    }"#;

    #[test]
    fn parses_a_two_level_species() {
        let s = Species::from_json(TWO_LEVEL).unwrap();
        assert_eq!(s.name, "toy-atom");
        assert_eq!(s.units, UnitSystem::Natural);
        let two = s.as_two_level().unwrap();
        assert_eq!(two.transition_frequency(), 1.0);
        assert_relative_eq!(
            two.gamma_sp(),
            1.0 / (3.0 * std::f64::consts::PI),
            max_relative = 1e-15
        );
    }

    #[test]
    fn gamma_specified_transition_derives_dipole() {
        let json = r#"{
            "name": "rate-spec",
            "mass": 2.0,
            "levels": [0.0, 1.0],
            "transitions": [ { "upper": 1, "lower": 0, "gamma": 0.10610329539459689 } ],
            "units": "natural"
        }"#;
        let s = Species::from_json(json).unwrap();
        // 1/(3π) is the rate of a unit dipole at unit frequency.
        assert_relative_eq!(s.atom.transitions()[0].dipole, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let json = r#"{
            "name": "x", "mass": 1.0, "levels": [0.0, 1.0],
            "transitions": [], "units": "natural", "color": "blue"
        }"#;
        let err = Species::from_json(json).unwrap_err();
        assert!(err.to_string().contains("color"));
    }

    #[test]
    fn both_or_neither_dipole_gamma_rejected() {
        let both = r#"{
            "name": "x", "mass": 1.0, "levels": [0.0, 1.0],
            "transitions": [ { "upper": 1, "lower": 0, "dipole": 1.0, "gamma": 0.1 } ],
            "units": "natural"
        }"#;
        assert!(Species::from_json(both).is_err());
        let neither = r#"{
            "name": "x", "mass": 1.0, "levels": [0.0, 1.0],
            "transitions": [ { "upper": 1, "lower": 0 } ],
            "units": "natural"
        }"#;
        assert!(Species::from_json(neither).is_err());
    }

    #[test]
    fn structural_errors_propagate() {
        let dup = r#"{
            "name": "x", "mass": 1.0, "levels": [0.0, 1.0],
            "transitions": [
                { "upper": 1, "lower": 0, "dipole": 1.0 },
                { "upper": 1, "lower": 0, "dipole": 2.0 }
            ],
            "units": "natural"
        }"#;
        assert!(Species::from_json(dup).is_err());
    }

    #[test]
    fn reference_frequency_is_smallest_gap() {
        let json = r#"{
            "name": "x", "mass": 1.0, "levels": [0.0, 1.0, 2.5],
            "transitions": [
                { "upper": 1, "lower": 0, "dipole": 1.0 },
                { "upper": 2, "lower": 0, "dipole": 1.0 },
                { "upper": 2, "lower": 1, "dipole": 1.0 }
            ],
            "units": "natural"
        }"#;
        let s = Species::from_json(json).unwrap();
        assert_eq!(s.reference_frequency(), Some(1.0));
        assert!(s.as_two_level().is_none());
    }
}
