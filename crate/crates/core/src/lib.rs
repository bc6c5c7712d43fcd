//! Modified Godunov scheme for quasi-one-dimensional isentropic nozzle flow
//! with space-dependent invariant regions.
//!
//! Modules, bottom up:
//! - [`gas`]: equation of state, Riemann invariants, wave curves
//! - [`riemann`]: exact Riemann solver (vacuum included) and its oracle
//! - [`nozzle`]: cross sections, the majorant `b`, admissibility check
//! - [`scheme`]: the in-cell construction, fractional step and time loop
//! - [`diagnostics`]: invariant-region, source-sign and entropy monitors

pub mod diagnostics;
pub mod error;
pub mod gas;
pub mod initial;
pub mod interp;
pub mod newton;
pub mod nozzle;
pub mod quadrature;
pub mod riemann;
pub mod scheme;

pub use error::{Error, Result};
pub use gas::{
    char_speeds, entropy_production, flux, from_invariants, mech_entropy, rh_residual,
    shock_speed_factor, to_invariants, wave_curve, EntropyPair, Family, GasConstants, GasState,
    Invariants, WaveKind,
};
pub use riemann::oracle::{oracle_middle_state, OracleMiddle};
pub use riemann::{classify, solve as solve_riemann, Middle, Region, WaveDesc, WaveFan};
pub use nozzle::{
    derive_b, f_of_k, mu_sigma, validate_condition_m, AdmissibilityConstants, ConditionReport,
    Geometry, Majorant, NozzleProfile,
};
