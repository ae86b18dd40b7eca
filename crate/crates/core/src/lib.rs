//! Brownian motion of atoms in a thermal electromagnetic background.
//!
//! The center-of-mass momentum of an atom coupled to blackbody radiation
//! obeys a Langevin equation dp = −γp dt + √(2D) dW per Cartesian
//! component. This crate provides:
//!
//! - closed-form γ and D for two-level and multilevel atoms ([`transport`]),
//! - an exact Doppler-resolved drag-force integral that cross-checks the
//!   linearized γ ([`drag`]),
//! - seed-reproducible Langevin ensembles ([`langevin`]) and a conservative
//!   Fokker–Planck solver ([`fokker_planck`]) for the momentum distribution,
//! - Galilean frame logic for a lab moving relative to the background
//!   ([`frame`]),
//! - a species registry file format ([`species`]) and run manifests
//!   ([`manifest`]) behind the `bbdrag` CLI.
//!
//! Works in SI or natural (ħ = c = ε₀ = k_B = 1) units; all thermal
//! arithmetic is in log-safe form so SI magnitudes underflow to zero rather
//! than NaN.

pub mod atom;
pub mod constants;
pub mod drag;
pub mod error;
pub mod fokker_planck;
pub mod frame;
pub mod langevin;
pub mod manifest;
pub mod output;
pub mod quadrature;
pub mod species;
pub mod stats;
pub mod thermal;
pub mod transport;

pub use atom::{MultilevelAtom, Transition, TwoLevelAtom};
pub use constants::{PhysicalConstants, UnitSystem};
pub use error::{Error, Result};
pub use thermal::ThermalEnvironment;
pub use transport::{CoefficientSource, TransportCoefficients};
