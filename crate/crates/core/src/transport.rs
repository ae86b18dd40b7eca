//! Closed-form damping and diffusion coefficients.
//!
//! For a two-level atom in the thermal background,
//!
//!   γ = (ħk₀²Γ/3M) · |dn/dω₀| / (2n(ω₀)+1)
//!   D = (ħ²k₀²Γ/3) · n(ω₀)(n(ω₀)+1) / (2n(ω₀)+1)    (per component)
//!
//! and since |dn/dω| = βħ·n(n+1), the two obey D = γ·M·k_B·T identically —
//! the fluctuation–dissipation check this module is tested against.
//! Multilevel coefficients are weighted pair sums over the same kernel, so
//! the single-transition case reduces to the two-level formulas bitwise.
//!
//! Sign convention: the damping factor uses the magnitude of dn/dω, making
//! ⟨F⟩ = −γMv a drag for γ > 0.

use serde::{Deserialize, Serialize};

use crate::atom::{spontaneous_rate, MultilevelAtom, TwoLevelAtom};
use crate::constants::{PhysicalConstants, UnitSystem};
use crate::error::{Error, Result};
use crate::thermal::{bose_occupation, ThermalEnvironment};

/// Which closed form produced a coefficient pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientSource {
    TwoLevel,
    Multilevel,
    /// Supplied directly (CLI --gamma/--diffusion), not derived from an atom.
    External,
}

/// Damping rate γ and isotropic per-component momentum diffusion D.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportCoefficients {
    pub gamma: f64,
    pub diffusion: f64,
    pub unit_system: UnitSystem,
    pub source: CoefficientSource,
}

impl TransportCoefficients {
    pub fn new(
        gamma: f64,
        diffusion: f64,
        unit_system: UnitSystem,
        source: CoefficientSource,
    ) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must be >= 0, got {gamma}")));
        }
        if !(diffusion >= 0.0) || !diffusion.is_finite() {
            return Err(Error::domain(format!(
                "diffusion must be >= 0, got {diffusion}"
            )));
        }
        Ok(TransportCoefficients {
            gamma,
            diffusion,
            unit_system,
            source,
        })
    }

    /// Relative residual of D − γMk_BT; 0 when both sides vanish (T = 0).
    pub fn einstein_residual(
        &self,
        mass: f64,
        env: &ThermalEnvironment,
        consts: &PhysicalConstants,
    ) -> f64 {
        let rhs = self.gamma * mass * consts.kb * env.temperature();
        if self.diffusion == 0.0 && rhs == 0.0 {
            return 0.0;
        }
        (self.diffusion - rhs).abs() / self.diffusion.abs().max(rhs.abs())
    }
}

/// ⟨σ_z⟩ = −1/(2n(ω₀)+1) for the internal state in thermal equilibrium.
/// Ranges over [−1, 0): −1 at T = 0, → 0⁻ as T → ∞.
pub fn sigma_z_expectation(omega0: f64, env: &ThermalEnvironment) -> Result<f64> {
    let n = bose_occupation(omega0, env)?;
    Ok(-1.0 / (2.0 * n + 1.0))
}

/// |dn/dω|/(2n+1) = βħ·n(n+1)/(2n+1), the frequency-weighted thermal factor
/// of the damping coefficient. 0 at T = 0.
fn damping_thermal_factor(omega: f64, env: &ThermalEnvironment) -> Result<f64> {
    if env.is_zero_temperature() {
        return Ok(0.0);
    }
    let n = bose_occupation(omega, env)?;
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(env.beta_hbar() * n * (n + 1.0) / (2.0 * n + 1.0))
}

/// n(n+1)/(2n+1), the thermal factor of the diffusion coefficient.
fn diffusion_thermal_factor(omega: f64, env: &ThermalEnvironment) -> Result<f64> {
    let n = bose_occupation(omega, env)?;
    Ok(n * (n + 1.0) / (2.0 * n + 1.0))
}

/// Per-pair damping contribution (ħk²Γ/3M)·|dn/dω|/(2n+1), shared by the
/// two-level and multilevel paths so the reduction between them is exact.
fn pair_damping(
    omega: f64,
    gamma_sp: f64,
    mass: f64,
    env: &ThermalEnvironment,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let k = omega / consts.c;
    Ok(consts.hbar * k * k * gamma_sp / (3.0 * mass) * damping_thermal_factor(omega, env)?)
}

/// Per-pair diffusion contribution (ħ²k²Γ/3)·n(n+1)/(2n+1).
fn pair_diffusion(
    omega: f64,
    gamma_sp: f64,
    env: &ThermalEnvironment,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let k = omega / consts.c;
    Ok(consts.hbar * consts.hbar * k * k * gamma_sp / 3.0
        * diffusion_thermal_factor(omega, env)?)
}

/// Damping rate γ of a two-level atom. Exactly 0 at T = 0.
pub fn damping_coefficient(
    atom: &TwoLevelAtom,
    env: &ThermalEnvironment,
    consts: &PhysicalConstants,
) -> Result<f64> {
    pair_damping(
        atom.transition_frequency(),
        atom.gamma_sp(),
        atom.mass(),
        env,
        consts,
    )
}

/// Per-component momentum diffusion D of a two-level atom.
pub fn diffusion_coefficient(
    atom: &TwoLevelAtom,
    env: &ThermalEnvironment,
    consts: &PhysicalConstants,
) -> Result<f64> {
    pair_diffusion(atom.transition_frequency(), atom.gamma_sp(), env, consts)
}

/// γ and D of a two-level atom as one record.
pub fn two_level_coefficients(
    atom: &TwoLevelAtom,
    env: &ThermalEnvironment,
    consts: &PhysicalConstants,
    unit_system: UnitSystem,
) -> Result<TransportCoefficients> {
    TransportCoefficients::new(
        damping_coefficient(atom, env, consts)?,
        diffusion_coefficient(atom, env, consts)?,
        unit_system,
        CoefficientSource::TwoLevel,
    )
}

/// Boltzmann occupation probabilities ρ_ii of the listed levels.
///
/// Max-shifted so SI-scale exponents neither overflow nor produce NaN;
/// at T = 0 all weight sits on the lowest level(s).
pub fn level_populations(atom: &MultilevelAtom, env: &ThermalEnvironment) -> Result<Vec<f64>> {
    let levels = atom.levels();
    if levels.is_empty() {
        return Err(Error::domain("level list must not be empty"));
    }
    Ok(normalized_weights(&boltzmann_weights(levels, env)))
}

/// e^{−βħ(ω_i − ω_min)} for each level; the T = 0 limit is the indicator of
/// the minimal level(s).
fn boltzmann_weights(levels: &[f64], env: &ThermalEnvironment) -> Vec<f64> {
    let omega_min = levels.iter().cloned().fold(f64::INFINITY, f64::min);
    if env.is_zero_temperature() {
        return levels
            .iter()
            .map(|&w| if w == omega_min { 1.0 } else { 0.0 })
            .collect();
    }
    levels
        .iter()
        .map(|&w| (-env.beta_hbar() * (w - omega_min)).exp())
        .collect()
}

fn normalized_weights(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

/// Per-transition contribution to the multilevel pair sum.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub upper: usize,
    pub lower: usize,
    pub omega: f64,
    pub gamma_sp: f64,
    pub occupation: f64,
    /// (ρ_ii + ρ_jj) of the pair.
    pub pair_weight: f64,
    pub gamma_contribution: f64,
    pub diffusion_contribution: f64,
}

/// The pair sum term by term, for reporting and for [`multilevel_coefficients`].
pub fn multilevel_breakdown(
    atom: &MultilevelAtom,
    env: &ThermalEnvironment,
    consts: &PhysicalConstants,
) -> Result<Vec<TransitionReport>> {
    let weights = boltzmann_weights(atom.levels(), env);
    let total: f64 = weights.iter().sum();
    let mut reports = Vec::with_capacity(atom.transitions().len());
    for t in atom.transitions() {
        let omega = atom.transition_gap(t);
        let gamma_sp = spontaneous_rate(t.dipole, omega, consts)?;
        let pair_weight = (weights[t.upper] + weights[t.lower]) / total;
        reports.push(TransitionReport {
            upper: t.upper,
            lower: t.lower,
            omega,
            gamma_sp,
            occupation: bose_occupation(omega, env)?,
            pair_weight,
            gamma_contribution: pair_damping(omega, gamma_sp, atom.mass(), env, consts)?
                * pair_weight,
            diffusion_contribution: pair_diffusion(omega, gamma_sp, env, consts)? * pair_weight,
        });
    }
    Ok(reports)
}

/// Weighted-pair-sum coefficients of a multilevel atom:
///
///   γ = Σ_(i,j) (ħk_ij²Γ_ij/3M)·|dn(ω_ij)/dω|/(2n(ω_ij)+1)·(ρ_ii + ρ_jj)
///   D = Σ_(i,j) (ħ²k_ij²Γ_ij/3)·n(ω_ij)(n(ω_ij)+1)/(2n(ω_ij)+1)·(ρ_ii + ρ_jj)
///
/// Each listed transition counts once, i = upper. The pair weight is
/// computed as (w_i + w_j)/Σw with the raw Boltzmann weights, so a
/// two-level species carries weight exactly 1.0 and the sum collapses to
/// [`damping_coefficient`]/[`diffusion_coefficient`] bitwise.
pub fn multilevel_coefficients(
    atom: &MultilevelAtom,
    env: &ThermalEnvironment,
    consts: &PhysicalConstants,
    unit_system: UnitSystem,
) -> Result<TransportCoefficients> {
    if atom.transitions().is_empty() {
        return Err(Error::domain(
            "multilevel coefficients need at least one transition",
        ));
    }
    let mut gamma = 0.0;
    let mut diffusion = 0.0;
    for report in multilevel_breakdown(atom, env, consts)? {
        gamma += report.gamma_contribution;
        diffusion += report.diffusion_contribution;
    }
    TransportCoefficients::new(gamma, diffusion, unit_system, CoefficientSource::Multilevel)
}
