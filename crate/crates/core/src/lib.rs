//! Multi-party clock synchronization with symmetric Dicke states.
//!
//! * [`state`]: dense statevector simulation, the brute-force reference.
//! * [`analytic`]: closed-form pair state, outcome probabilities and the
//!   excitation-count optimizer.
//! * [`protocol`]: the measure/broadcast/estimate protocol over a simulated
//!   classical channel.
//! * [`analysis`]: tables and Monte Carlo sweeps.
//! * [`verify`]: closed form vs. statevector equivalence suites.
//!
//! The math is generic over [`Real`] (`f32`/`f64`); the aliases below fix the
//! double-precision types the protocol and CLI use. Exact amplitudes are
//! available as [`num_rational::Ratio`] via [`analytic::amplitude_exact`].

pub mod analysis;
pub mod analytic;
pub mod density;
mod error;
pub mod protocol;
pub mod scalar;
pub mod state;
pub mod verify;

pub use density::{Basis, DensityMatrix};
pub use error::{Error, Result};
pub use scalar::Real;
pub use state::{dicke_state, DickeSpec, MeasurementOutcome, Outcome, Sign, StateVector};

pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type Amplitude64 = analytic::Amplitude<f64>;
