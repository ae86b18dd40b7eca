//! Galilean frame logic for a lab moving relative to the background
//! radiation.
//!
//! γ and D are frame-invariant; only the velocity offset changes. In a lab
//! moving with velocity u the atom feels ⟨F′⟩ = −γM(u + v′), so holding an
//! atom at rest in the lab takes an extra force +γMu — and measuring that
//! force determines u.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonrelativistic validity guard on the lab speed.
pub const MAX_BOOST_FRACTION_OF_C: f64 = 0.01;

/// Lab velocity u relative to the background frame.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub u: [f64; 3],
}

impl FrameSpec {
    /// Validates |u|/c against the nonrelativistic guard.
    pub fn new(u: [f64; 3], speed_of_light: f64) -> Result<Self> {
        let speed = norm(u);
        if !speed.is_finite() {
            return Err(Error::domain("lab velocity must be finite"));
        }
        if speed >= MAX_BOOST_FRACTION_OF_C * speed_of_light {
            return Err(Error::domain(format!(
                "lab speed |u| = {speed:.6e} exceeds the nonrelativistic guard \
                 {MAX_BOOST_FRACTION_OF_C} c"
            )));
        }
        Ok(FrameSpec { u })
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Mean force on an atom with lab-frame velocity v′: −γM(u + v′).
pub fn lab_frame_force(gamma: f64, mass: f64, u: [f64; 3], v_prime: [f64; 3]) -> [f64; 3] {
    [
        -gamma * mass * (u[0] + v_prime[0]),
        -gamma * mass * (u[1] + v_prime[1]),
        -gamma * mass * (u[2] + v_prime[2]),
    ]
}

/// The constant force +γMu that makes v′ = 0 a fixed point in the lab.
pub fn compensating_force(gamma: f64, mass: f64, u: [f64; 3]) -> [f64; 3] {
    [gamma * mass * u[0], gamma * mass * u[1], gamma * mass * u[2]]
}

/// Invert the compensating-force measurement: u = F_comp/(γM).
///
/// Needs γ > 0 — an undamped atom carries no information about u.
pub fn infer_lab_velocity(f_comp: [f64; 3], gamma: f64, mass: f64) -> Result<[f64; 3]> {
    if !(gamma > 0.0) {
        return Err(Error::domain(
            "lab velocity is unmeasurable at gamma = 0 (no drag to compensate)",
        ));
    }
    if !(mass > 0.0) {
        return Err(Error::domain(format!("mass must be > 0, got {mass}")));
    }
    Ok([
        f_comp[0] / (gamma * mass),
        f_comp[1] / (gamma * mass),
        f_comp[2] / (gamma * mass),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn atom_at_rest_in_background_feels_nothing() {
        let u = [0.4, -0.1, 0.2];
        let v_prime = [-0.4, 0.1, -0.2];
        assert_eq!(lab_frame_force(0.7, 2.0, u, v_prime), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn coinciding_frames_recover_background_law() {
        let f = lab_frame_force(0.5, 3.0, [0.0; 3], [1.0, 0.0, -2.0]);
        assert_eq!(f, [-1.5, 0.0, 3.0]);
    }

    #[test]
    fn hand_checked_example() {
        let f = lab_frame_force(0.1, 2.0, [1.0, 0.0, 0.0], [0.5, 0.0, 0.0]);
        assert_relative_eq!(f[0], -0.3, max_relative = 1e-15);
        assert_eq!(f[1], 0.0);
        assert_eq!(f[2], 0.0);
    }

    #[test]
    fn compensation_cancels_the_drag_on_a_lab_static_atom() {
        let (gamma, mass) = (0.37, 5.5);
        let u = [0.2, -0.6, 0.1];
        let drag = lab_frame_force(gamma, mass, u, [0.0; 3]);
        let comp = compensating_force(gamma, mass, u);
        for c in 0..3 {
            assert_eq!(drag[c] + comp[c], 0.0);
        }
        assert_eq!(compensating_force(gamma, mass, [0.0; 3]), [0.0; 3]);
    }

    #[test]
    fn inference_round_trips() {
        let (gamma, mass) = (0.81, 1.7);
        let u = [0.003, -0.001, 0.002];
        let f = compensating_force(gamma, mass, u);
        let back = infer_lab_velocity(f, gamma, mass).unwrap();
        for c in 0..3 {
            assert_relative_eq!(back[c], u[c], max_relative = 1e-14);
        }
        assert_eq!(
            infer_lab_velocity([0.0; 3], gamma, mass).unwrap(),
            [0.0; 3]
        );
    }

    #[test]
    fn inference_requires_damping() {
        assert!(infer_lab_velocity([1.0, 0.0, 0.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn antisymmetric_in_simultaneous_reflection() {
        let (gamma, mass) = (0.3, 2.0);
        let u = [0.1, 0.2, -0.3];
        let v = [0.5, -0.1, 0.0];
        let f = lab_frame_force(gamma, mass, u, v);
        let f_reflected = lab_frame_force(
            gamma,
            mass,
            [-u[0], -u[1], -u[2]],
            [-v[0], -v[1], -v[2]],
        );
        for c in 0..3 {
            assert_eq!(f[c], -f_reflected[c]);
        }
    }

    #[test]
    fn boost_guard_enforced() {
        let c = 299_792_458.0;
        assert!(FrameSpec::new([0.02 * c, 0.0, 0.0], c).is_err());
        assert!(FrameSpec::new([0.005 * c, 0.0, 0.0], c).is_ok());
    }
}
