//! Closed-form interference coefficient and distance.
//!
//! For amplitude-encoded distributions and a diagonal interaction the
//! transition amplitude is `A = Σ_x √(p(x)q(x))·e^{iΦ(x)}`; the coefficient
//! is `|A|²` and the distance `−ln |A|²`. This path never builds a state
//! vector and serves as the reference for the circuit simulation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::{bhattacharyya_coefficient, DiscreteDistribution};
use crate::error::{QibdError, Result};
use crate::interaction::{DiagonalHamiltonian, PhaseProfile};

/// Coefficients below this are reported as infinite distance.
pub const UNDERFLOW_THRESHOLD: f64 = 1e-300;

/// Slack above 1 tolerated (and clamped) by [`qibd_distance`].
pub const COEFFICIENT_SLACK: f64 = 1e-12;

/// Transition amplitude with the derived coefficient and distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QibdResult {
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub qibc: f64,
    pub distance: f64,
}

impl QibdResult {
    /// Clamps `re² + im²` to `[0, 1]` before taking the log.
    pub fn from_amplitude(amplitude_re: f64, amplitude_im: f64) -> Self {
        let qibc = (amplitude_re * amplitude_re + amplitude_im * amplitude_im).clamp(0.0, 1.0);
        Self {
            amplitude_re,
            amplitude_im,
            qibc,
            distance: distance_from_clamped(qibc),
        }
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.amplitude_re, self.amplitude_im)
    }
}

fn distance_from_clamped(qibc: f64) -> f64 {
    if qibc < UNDERFLOW_THRESHOLD {
        f64::INFINITY
    } else {
        -qibc.ln()
    }
}

/// `−ln qibc`. Values a hair above 1 are clamped; anything else outside
/// `[0, 1]` is an upstream bug.
pub fn qibd_distance(qibc: f64) -> Result<f64> {
    if !(0.0..=1.0 + COEFFICIENT_SLACK).contains(&qibc) {
        return Err(QibdError::CoefficientOutOfRange(qibc));
    }
    Ok(distance_from_clamped(qibc.min(1.0)))
}

fn check_phases(p: &DiscreteDistribution, phases: &PhaseProfile) -> Result<()> {
    if phases.phases().len() != p.probs().len() {
        return Err(QibdError::DimensionMismatch {
            expected: p.probs().len(),
            found: phases.phases().len(),
        });
    }
    Ok(())
}

/// Transition amplitude `⟨ψ_p|e^{iΦ}|ψ_q⟩` summed term by term.
pub fn qibc_direct(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    phases: &PhaseProfile,
) -> Result<QibdResult> {
    p.ensure_same_size(q)?;
    check_phases(p, phases)?;
    let (re, im) = p.probs().iter().zip(q.probs()).zip(phases.phases()).fold(
        (0.0, 0.0),
        |(re, im), ((a, b), phi)| {
            let weight = (a * b).sqrt();
            (re + weight * phi.cos(), im + weight * phi.sin())
        },
    );
    Ok(QibdResult::from_amplitude(re, im))
}

/// `|⟨ψ_p|ψ_q⟩|² = BC²` for real amplitude encodings.
pub fn fidelity(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    let bc = bhattacharyya_coefficient(p, q)?;
    Ok(bc * bc)
}

/// `⟨ψ_p|H|ψ_q⟩ = Σ_x √(p(x)q(x))·h(x)`, the linear coefficient of the
/// small-α expansion `A(α) ≈ BC + iα·M`.
pub fn first_order_element(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    h: &DiagonalHamiltonian,
) -> Result<f64> {
    p.ensure_same_size(q)?;
    if h.diag().len() != p.probs().len() {
        return Err(QibdError::DimensionMismatch {
            expected: p.probs().len(),
            found: h.diag().len(),
        });
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .zip(h.diag())
        .map(|((a, b), d)| (a * b).sqrt() * d)
        .sum())
}
