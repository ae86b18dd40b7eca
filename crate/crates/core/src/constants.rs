//! Physical constants in SI units (CODATA 2018) or natural units where
//! ħ = c = ε₀ = k_B = 1.

use serde::{Deserialize, Serialize};

/// Reduced Planck constant (J·s).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light (m/s).
pub const C_SI: f64 = 299_792_458.0;
/// Vacuum permittivity (F/m).
pub const EPSILON0_SI: f64 = 8.854_187_812_8e-12;
/// Boltzmann constant (J/K).
pub const KB_SI: f64 = 1.380_649e-23;

/// Which system the numerical values of a quantity are expressed in.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// SI: kilograms, metres, seconds, kelvin.
    Si,
    /// ħ = c = ε₀ = k_B = 1.
    Natural,
}

impl std::fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnitSystem::Si => write!(f, "SI"),
            UnitSystem::Natural => write!(f, "natural"),
        }
    }
}

/// The four constants every formula in this crate depends on.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub epsilon0: f64,
    pub kb: f64,
}

impl PhysicalConstants {
    pub const fn si() -> Self {
        PhysicalConstants {
            hbar: HBAR_SI,
            c: C_SI,
            epsilon0: EPSILON0_SI,
            kb: KB_SI,
        }
    }

    pub const fn natural() -> Self {
        PhysicalConstants {
            hbar: 1.0,
            c: 1.0,
            epsilon0: 1.0,
            kb: 1.0,
        }
    }

    pub const fn for_unit_system(units: UnitSystem) -> Self {
        match units {
            UnitSystem::Si => Self::si(),
            UnitSystem::Natural => Self::natural(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_units_are_exactly_one() {
        let c = PhysicalConstants::natural();
        assert_eq!(c.hbar, 1.0);
        assert_eq!(c.c, 1.0);
        assert_eq!(c.epsilon0, 1.0);
        assert_eq!(c.kb, 1.0);
    }

    #[test]
    fn si_constants_positive() {
        let c = PhysicalConstants::si();
        for v in [c.hbar, c.c, c.epsilon0, c.kb] {
            assert!(v > 0.0 && v.is_finite());
        }
    }
}
