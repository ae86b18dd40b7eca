//! Atomic species: two-level and multilevel descriptions.
//!
//! A two-level atom may be specified by its dipole matrix element or by its
//! spontaneous emission rate; the canonical form stores both, deriving the
//! missing one through the free-space rate formula.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Free-space spontaneous emission rate Γ = ω³d²/(3πε₀ħc³).
///
/// This is πωd²N(ω)/(3ħε₀) with the free-space photon density of states
/// N(ω) = ω²/(π²c³), both polarizations included.
pub fn spontaneous_rate(dipole: f64, omega: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(dipole > 0.0) || !(omega > 0.0) {
        return Err(Error::domain(format!(
            "spontaneous_rate requires dipole > 0 and omega > 0, got d = {dipole}, omega = {omega}"
        )));
    }
    let c3 = consts.c * consts.c * consts.c;
    Ok(omega * omega * omega * dipole * dipole
        / (3.0 * std::f64::consts::PI * consts.epsilon0 * consts.hbar * c3))
}

/// Inverse of [`spontaneous_rate`]: the dipole magnitude that reproduces a
/// given decay rate at frequency ω.
pub fn dipole_from_rate(rate: f64, omega: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(rate > 0.0) || !(omega > 0.0) {
        return Err(Error::domain(format!(
            "dipole_from_rate requires rate > 0 and omega > 0, got rate = {rate}, omega = {omega}"
        )));
    }
    let c3 = consts.c * consts.c * consts.c;
    Ok((3.0 * std::f64::consts::PI * consts.epsilon0 * consts.hbar * c3 * rate
        / (omega * omega * omega))
        .sqrt())
}

/// Two-level atom of mass M with one dipole transition at ω₀.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelAtom {
    mass: f64,
    transition_frequency: f64,
    dipole: f64,
    gamma_sp: f64,
}

impl TwoLevelAtom {
    pub fn from_dipole(
        mass: f64,
        transition_frequency: f64,
        dipole: f64,
        consts: &PhysicalConstants,
    ) -> Result<Self> {
        Self::check_common(mass, transition_frequency)?;
        let gamma_sp = spontaneous_rate(dipole, transition_frequency, consts)?;
        Ok(TwoLevelAtom {
            mass,
            transition_frequency,
            dipole,
            gamma_sp,
        })
    }

    pub fn from_rate(
        mass: f64,
        transition_frequency: f64,
        gamma_sp: f64,
        consts: &PhysicalConstants,
    ) -> Result<Self> {
        Self::check_common(mass, transition_frequency)?;
        let dipole = dipole_from_rate(gamma_sp, transition_frequency, consts)?;
        Ok(TwoLevelAtom {
            mass,
            transition_frequency,
            dipole,
            gamma_sp,
        })
    }

    fn check_common(mass: f64, omega0: f64) -> Result<()> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::domain(format!("mass must be > 0, got {mass}")));
        }
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::domain(format!(
                "transition frequency must be > 0, got {omega0}"
            )));
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn transition_frequency(&self) -> f64 {
        self.transition_frequency
    }

    pub fn dipole(&self) -> f64 {
        self.dipole
    }

    /// Spontaneous emission rate Γ.
    pub fn gamma_sp(&self) -> f64 {
        self.gamma_sp
    }

    /// Resonant wavenumber k₀ = ω₀/c.
    pub fn wavenumber(&self, consts: &PhysicalConstants) -> f64 {
        self.transition_frequency / consts.c
    }
}

/// One dipole-allowed transition of a multilevel atom.
///
/// `upper`/`lower` index into the level list; the stored dipole is the
/// magnitude of the matrix element between the pair.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub upper: usize,
    pub lower: usize,
    pub dipole: f64,
}

/// Multilevel atom: level energies ħω_i plus an explicit transition list.
///
/// No selection rules are applied; the caller lists exactly the pairs with
/// nonvanishing dipole elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultilevelAtom {
    mass: f64,
    levels: Vec<f64>,
    transitions: Vec<Transition>,
}

impl MultilevelAtom {
    pub fn new(mass: f64, levels: Vec<f64>, transitions: Vec<Transition>) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::domain(format!("mass must be > 0, got {mass}")));
        }
        if levels.is_empty() {
            return Err(Error::domain("level list must not be empty"));
        }
        if levels.iter().any(|w| !w.is_finite()) {
            return Err(Error::domain("level frequencies must be finite"));
        }
        let mut seen = std::collections::HashSet::new();
        for (idx, t) in transitions.iter().enumerate() {
            if t.upper >= levels.len() || t.lower >= levels.len() {
                return Err(Error::domain(format!(
                    "transition {idx}: level index out of range ({} levels)",
                    levels.len()
                )));
            }
            if t.upper == t.lower {
                return Err(Error::domain(format!(
                    "transition {idx}: upper and lower levels must differ"
                )));
            }
            if !(levels[t.upper] > levels[t.lower]) {
                return Err(Error::domain(format!(
                    "transition {idx}: omega_upper must exceed omega_lower \
                     ({} vs {})",
                    levels[t.upper], levels[t.lower]
                )));
            }
            if !(t.dipole > 0.0) || !t.dipole.is_finite() {
                return Err(Error::domain(format!(
                    "transition {idx}: dipole must be > 0, got {}",
                    t.dipole
                )));
            }
            if !seen.insert((t.upper, t.lower)) {
                return Err(Error::domain(format!(
                    "duplicate transition ({}, {})",
                    t.upper, t.lower
                )));
            }
        }
        Ok(MultilevelAtom {
            mass,
            levels,
            transitions,
        })
    }

    /// A two-level atom viewed as the degenerate multilevel case.
    pub fn from_two_level(atom: &TwoLevelAtom) -> Self {
        MultilevelAtom {
            mass: atom.mass(),
            levels: vec![0.0, atom.transition_frequency()],
            transitions: vec![Transition {
                upper: 1,
                lower: 0,
                dipole: atom.dipole(),
            }],
        }
    }

    /// The reverse view: succeeds only for exactly two levels and one
    /// transition.
    pub fn as_two_level(&self, consts: &PhysicalConstants) -> Option<TwoLevelAtom> {
        if self.levels.len() == 2 && self.transitions.len() == 1 {
            let t = &self.transitions[0];
            TwoLevelAtom::from_dipole(self.mass, self.transition_gap(t), t.dipole, consts).ok()
        } else {
            None
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// ω_ij = ω_upper − ω_lower for a stored transition.
    pub fn transition_gap(&self, t: &Transition) -> f64 {
        self.levels[t.upper] - self.levels[t.lower]
    }
}
