//! Thermal state of the background field: Bose occupation numbers and
//! their frequency derivative.
//!
//! Everything is written in terms of x = βħω. `expm1` keeps the small-x
//! regime (x ≪ 1, the classical limit) free of cancellation, and large x
//! underflows gracefully to an occupation of exactly 0 instead of NaN.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Blackbody background at a fixed temperature.
///
/// `beta_hbar` = ħ/(k_B T) is precomputed so that βħω is a single multiply.
/// T = 0 is accepted as a limiting query: `beta_hbar` is +∞ and every
/// thermal factor evaluates to exactly 0.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalEnvironment {
    temperature: f64,
    beta_hbar: f64,
}

impl ThermalEnvironment {
    pub fn new(temperature: f64, consts: &PhysicalConstants) -> Result<Self> {
        if !temperature.is_finite() || temperature < 0.0 {
            return Err(Error::domain(format!(
                "temperature must be finite and >= 0, got {temperature}"
            )));
        }
        let beta_hbar = if temperature == 0.0 {
            f64::INFINITY
        } else {
            consts.hbar / (consts.kb * temperature)
        };
        Ok(ThermalEnvironment {
            temperature,
            beta_hbar,
        })
    }

    /// Environment specified by the dimensionless ratio x = βħω at a
    /// reference frequency, instead of a temperature.
    pub fn from_beta_hbar_omega(
        x: f64,
        omega_ref: f64,
        consts: &PhysicalConstants,
    ) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain(format!(
                "beta*hbar*omega must be finite and > 0, got {x}"
            )));
        }
        if !(omega_ref > 0.0) {
            return Err(Error::domain(format!(
                "reference frequency must be > 0, got {omega_ref}"
            )));
        }
        let temperature = consts.hbar * omega_ref / (consts.kb * x);
        Self::new(temperature, consts)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// ħ/(k_B T); +∞ at T = 0.
    pub fn beta_hbar(&self) -> f64 {
        self.beta_hbar
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.temperature == 0.0
    }
}

/// Mean thermal photon number n(ω) = 1/(e^{βħω} − 1).
///
/// Exactly 0 at T = 0; relative accuracy a few ulps across the whole range
/// thanks to `expm1`.
pub fn bose_occupation(omega: f64, env: &ThermalEnvironment) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "bose_occupation requires omega > 0, got {omega}"
        )));
    }
    if env.is_zero_temperature() {
        return Ok(0.0);
    }
    // 1/expm1(x): exact in the x → ∞ limit (expm1 overflows to +inf, n → 0).
    Ok(1.0 / f64::exp_m1(env.beta_hbar * omega))
}

/// dn/dω = −βħ · n(n+1). Always ≤ 0; 0 in the T → 0 limit.
pub fn bose_derivative(omega: f64, env: &ThermalEnvironment) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "bose_derivative requires omega > 0, got {omega}"
        )));
    }
    if env.is_zero_temperature() {
        return Ok(0.0);
    }
    let n = bose_occupation(omega, env)?;
    if n == 0.0 {
        // Underflowed occupation; the derivative has underflowed too.
        return Ok(0.0);
    }
    Ok(-env.beta_hbar * n * (n + 1.0))
}

/// Increment n(ω + δ) − n(ω) with the offset δ supplied directly.
///
/// Uses n(ω+δ) − n(ω) = (1 + n(ω+δ)) · n(ω) · expm1(−βħδ). Callers that
/// know δ analytically (Doppler-shift integrands) keep full relative
/// precision this way; forming ω_b − ω_a by subtraction loses ~|ω/δ| ulps
/// and poisons error estimates downstream.
pub fn bose_occupation_increment(
    omega: f64,
    delta: f64,
    env: &ThermalEnvironment,
) -> Result<f64> {
    let n = bose_occupation(omega, env)?;
    let n_shifted = bose_occupation(omega + delta, env)?;
    if env.is_zero_temperature() || n == 0.0 {
        // Both occupations have underflown (or T = 0): the increment is 0,
        // and the product form below could otherwise produce inf·0.
        return Ok(n_shifted - n);
    }
    Ok((1.0 + n_shifted) * n * f64::exp_m1(-env.beta_hbar * delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PhysicalConstants;
    use approx::assert_relative_eq;

    fn natural_env(x_at_unit_omega: f64) -> ThermalEnvironment {
        let consts = PhysicalConstants::natural();
        ThermalEnvironment::from_beta_hbar_omega(x_at_unit_omega, 1.0, &consts).unwrap()
    }

    #[test]
    fn zero_temperature_occupation_is_exactly_zero() {
        let consts = PhysicalConstants::si();
        let env = ThermalEnvironment::new(0.0, &consts).unwrap();
        assert_eq!(bose_occupation(1.0e15, &env).unwrap(), 0.0);
        assert_eq!(bose_derivative(1.0e15, &env).unwrap(), 0.0);
    }

    #[test]
    fn occupation_at_unit_exponent() {
        // 1/(e − 1), frozen from a high-precision evaluation.
        let env = natural_env(1.0);
        let n = bose_occupation(1.0, &env).unwrap();
        assert_relative_eq!(n, 0.581_976_706_869_326_4, max_relative = 1e-12);
    }

    #[test]
    fn occupation_small_argument_series() {
        // Series oracle: 1/x − 1/2 + x/12 + O(x^3).
        let x = 1e-8;
        let env = natural_env(x);
        let n = bose_occupation(1.0, &env).unwrap();
        let series = 1.0 / x - 0.5 + x / 12.0;
        assert_relative_eq!(n, series, max_relative = 1e-10);
    }

    #[test]
    fn derivative_at_unit_exponent() {
        // −n(n+1) with n = 1/(e−1) and βħ = 1.
        let env = natural_env(1.0);
        let d = bose_derivative(1.0, &env).unwrap();
        assert_relative_eq!(d, -0.920_673_594_2, max_relative = 1e-9);
        assert!(d < 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let consts = PhysicalConstants::natural();
        for &x in &[1e-6, 1e-3, 0.1, 1.0, 5.0, 30.0] {
            let env = ThermalEnvironment::from_beta_hbar_omega(x, 1.0, &consts).unwrap();
            let h = 1e-6;
            let fd = (bose_occupation(1.0 + h, &env).unwrap()
                - bose_occupation(1.0 - h, &env).unwrap())
                / (2.0 * h);
            let analytic = bose_derivative(1.0, &env).unwrap();
            assert_relative_eq!(analytic, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn occupation_increment_is_cancellation_free() {
        let env = natural_env(1.0);
        // Tiny offset: the increment equals n'·δ to first order, to full
        // relative precision where direct subtraction would lose 12 digits.
        let delta = 1e-12;
        let incr = bose_occupation_increment(1.0, delta, &env).unwrap();
        let expected = bose_derivative(1.0, &env).unwrap() * delta;
        assert_relative_eq!(incr, expected, max_relative = 1e-9);

        // Large offset: agrees with the direct difference.
        let incr_large = bose_occupation_increment(1.0, 0.5, &env).unwrap();
        let direct =
            bose_occupation(1.5, &env).unwrap() - bose_occupation(1.0, &env).unwrap();
        assert_relative_eq!(incr_large, direct, max_relative = 1e-12);
    }

    #[test]
    fn si_room_temperature_optical_underflows_to_zero_not_nan() {
        let consts = PhysicalConstants::si();
        let env = ThermalEnvironment::new(300.0, &consts).unwrap();
        // Deep ultraviolet: βħω ≈ 3.8e4, e^x overflows.
        let n = bose_occupation(1.5e19, &env).unwrap();
        assert_eq!(n, 0.0);
        assert_eq!(bose_derivative(1.5e19, &env).unwrap(), 0.0);
    }

    #[test]
    fn nonpositive_frequency_rejected() {
        let env = natural_env(1.0);
        assert!(bose_occupation(0.0, &env).is_err());
        assert!(bose_occupation(-1.0, &env).is_err());
        assert!(bose_derivative(f64::NAN, &env).is_err());
    }
}
