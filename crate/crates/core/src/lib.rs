//! Phase-weighted Bhattacharyya distance (QIBD) between discrete distributions.
//!
//! Two distributions `p`, `q` over `2^n` outcomes are amplitude encoded as
//! `|ψ_p⟩ = Σ √p(x)|x⟩` and compared through the transition amplitude
//! `A = ⟨ψ_p|e^{iαH}|ψ_q⟩` of a diagonal interaction `H`. The coefficient is
//! `|A|²` and the distance `−ln |A|²`; at `α = 0` this is the classical
//! Bhattacharyya distance `−ln BC²`.
//!
//! The amplitude is available two ways:
//!
//! - [`direct`] sums the closed form term by term;
//! - [`interferometer`] simulates the single-ancilla circuit on a dense
//!   [`statevec::StateVector`] and reads `Re A`, `Im A` from the ancilla.
//!
//! [`harness`] drives sweeps and validation on top of both.

pub mod direct;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod interaction;
pub mod interferometer;
pub mod statevec;

pub use direct::{fidelity, first_order_element, qibc_direct, qibd_distance, QibdResult};
pub use distributions::{
    bhattacharyya_coefficient, classical_distance, DiscreteDistribution, GaussianSpec,
    ThetaFamilySpec,
};
pub use error::{QibdError, Result};
pub use interaction::{Coupling, DiagonalHamiltonian, PhaseProfile};
pub use interferometer::{
    measure_qibd, CircuitSpec, InterferometerReading, MeasurementSetting, ReadoutMode,
};
pub use statevec::{Preparation, ShotCounts, StateVector};
