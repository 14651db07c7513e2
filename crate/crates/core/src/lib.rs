//! Analytic optimal squeezing of a particle's wave packet in an infinite
//! square well.
//!
//! The pipeline runs from the well eigenbasis ([`welltrap`]) and the
//! Gaussian-derivative target ([`targetgen`]) through closed-form control
//! synthesis ([`control`]) to propagation under several dynamical models
//! ([`dynamics`]) and verification of the resulting width history
//! ([`diagnostics`]). [`runner`] binds it to config files and the CLI.
//!
//! Everything is computed in units `ħ = m = L = 1` unless a [`WellSpec`]
//! says otherwise.

pub mod control;
pub mod diagnostics;
pub mod dynamics;
mod error;
pub mod quadrature;
pub mod runner;
pub mod state;
pub mod targetgen;
pub mod welltrap;

pub use control::{synthesize, ControlEntry, ControlSchedule};
pub use dynamics::{GridWavefunction, TrajectoryRecord};
pub use error::{Error, Result};
pub use state::{ModelTag, SpectralVector};
pub use targetgen::TargetSpec;
pub use welltrap::{CouplingMatrix, Profile, ResonanceTable, WellSpec};
