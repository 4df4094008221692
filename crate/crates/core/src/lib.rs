//! Finite-time quantum Carnot-analog engines with a harmonic-oscillator
//! working medium.
//!
//! The moment vector (⟨Ĥ⟩, ⟨L̂⟩, ⟨Ĉ⟩, ⟨Î⟩) is propagated through shortcut
//! (STA/STE) and constant-μ strokes, each cycle is iterated to its limit
//! cycle, and the result is reduced to work, heat, power and efficiency.
//! Units are atomic (ħ = k_B = m = 1) throughout.

pub mod config;
pub mod cycle;
pub mod dynamics;
pub mod error;
pub mod fock_oracle;
pub mod linalg;
pub mod ode;
pub mod protocol;
pub mod protocols;
pub mod state;
pub mod thermo;
pub mod units;

pub use error::{Error, Result};
pub use protocol::FrequencyProtocol;
pub use state::{BathSpec, GeneralizedGibbsState, ObservableVector};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
