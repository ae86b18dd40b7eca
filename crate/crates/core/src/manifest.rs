//! Run manifests: the fully resolved inputs of a CLI run, written next to
//! its outputs so the run can be replayed bit-for-bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::UnitSystem;
use crate::error::Result;
use crate::fokker_planck::MomentumGrid;
use crate::langevin::SimConfig;
use crate::species::Species;

/// Everything a numerical subcommand needs to rerun, keyed by command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum JobSpec {
    Coeffs(CoeffsJob),
    Sweep(SweepJob),
    Simulate(SimulateJob),
    Fpsolve(FpsolveJob),
    Dragcurve(DragcurveJob),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffsJob {
    pub species: Species,
    pub temperature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepJob {
    pub species: Species,
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
    pub scale: SweepScale,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateJob {
    pub sim: SimConfig,
    pub unit_system: UnitSystem,
    /// Species the coefficients were derived from, when not given directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FpInitial {
    Gaussian { mean: f64, variance: f64 },
    Delta { p0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpsolveJob {
    pub gamma: f64,
    pub diffusion: f64,
    pub grid: MomentumGrid,
    pub initial: FpInitial,
    pub t_target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    pub unit_system: UnitSystem,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DragcurveJob {
    pub species: Species,
    pub temperature: f64,
    pub speeds: Vec<f64>,
}

/// Manifest written next to every run's outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub created_unix: u64,
    pub wall_time_secs: f64,
    #[serde(flatten)]
    pub job: JobSpec,
}

impl RunManifest {
    pub fn new(job: JobSpec, wall_time_secs: f64) -> Self {
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            wall_time_secs,
            job,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::UnitSystem;
    use crate::langevin::{InitialMomentum, SampleSchedule, Stepper};
    use crate::transport::{CoefficientSource, TransportCoefficients};

    fn simulate_job() -> JobSpec {
        JobSpec::Simulate(SimulateJob {
            sim: SimConfig {
                dt: 0.01,
                n_steps: 10,
                n_trajectories: 4,
                seed: 7,
                initial: InitialMomentum::Delta { p0: [0.0, 0.0, 1.0] },
                coefficients: TransportCoefficients::new(
                    1.0,
                    1.0,
                    UnitSystem::Natural,
                    CoefficientSource::External,
                )
                .unwrap(),
                mass: 1.0,
                drift_velocity: None,
                external_force: None,
                stepper: Stepper::EulerMaruyama,
                schedule: SampleSchedule::Linear { n_samples: 5 },
                histogram_bins: 10,
            },
            unit_system: UnitSystem::Natural,
            species_name: None,
            temperature: None,
        })
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        let manifest = RunManifest::new(simulate_job(), 1.25);
        manifest.write(&path).unwrap();
        let back = RunManifest::read(&path).unwrap();
        assert_eq!(back.job, manifest.job);
        assert_eq!(back.code_version, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn command_tag_is_kebab_case() {
        let manifest = RunManifest::new(simulate_job(), 0.0);
        let text = serde_json::to_string(&manifest).unwrap();
        assert!(text.contains("\"command\":\"simulate\""));
    }
}
