//! Single-ancilla interferometer on `n + 1` qubits.
//!
//! Gate sequence (ancilla = qubit 0, data = qubits `1..=n`):
//!
//! ```text
//! H(a) · U_p · C-U_p† · C-U_q · C-e^{iΦ} · [phase(a, −π/2)] · H(a)
//! ```
//!
//! After the preparations the register holds `(|0⟩|ψ_p⟩ + |1⟩|ψ_q⟩)/√2`.
//! Reading the ancilla gives `P(0) = ½[1 + Re A]`, or `½[1 + Im A]` with the
//! extra ancilla phase, where `A = ⟨ψ_p|e^{iΦ}|ψ_q⟩`.

use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::direct::QibdResult;
use crate::distributions::DiscreteDistribution;
use crate::error::{QibdError, Result};
use crate::interaction::PhaseProfile;
use crate::statevec::{Preparation, ShotCounts, StateVector};

pub const ANCILLA: usize = 0;

/// Ancilla phase inserted before the final Hadamard for the imaginary part.
pub const IMAG_SETTING_PHASE: f64 = -FRAC_PI_2;

/// Exact-mode amplitude components at or below this magnitude are read as
/// zero. `2·P(0) − 1` cannot resolve anything smaller in double precision.
pub const EXACT_RESOLUTION: f64 = 1e-14;

const REAL_STREAM: u64 = 0x243f_6a88_85a3_08d3;
const IMAG_STREAM: u64 = 0x1319_8a2e_0370_7344;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementSetting {
    RealPart,
    ImagPart,
}

/// How ancilla probabilities are read out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutMode {
    /// Born probabilities straight from the state vector.
    #[default]
    Exact,
    /// `shots` samples per setting; the two settings draw from independent
    /// streams derived from `seed`.
    Shots { shots: u64, seed: u64 },
}

/// Preparations and phases for one interferometer instance.
#[derive(Clone, Debug)]
pub struct CircuitSpec {
    prep_p: Preparation,
    prep_q: Preparation,
    phases: PhaseProfile,
}

/// Ancilla statistics for both settings and the reconstructed coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerReading {
    pub p0_real_setting: f64,
    pub p0_imag_setting: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub qibc: f64,
    pub distance: f64,
    pub mode: ReadoutMode,
}

impl InterferometerReading {
    pub fn result(&self) -> QibdResult {
        QibdResult {
            amplitude_re: self.amplitude_re,
            amplitude_im: self.amplitude_im,
            qibc: self.qibc,
            distance: self.distance,
        }
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = (seed ^ stream).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl CircuitSpec {
    pub fn new(prep_p: Preparation, prep_q: Preparation, phases: PhaseProfile) -> Result<Self> {
        let n = prep_p.num_data_qubits();
        for found in [prep_q.num_data_qubits(), phases.num_qubits()] {
            if found != n {
                return Err(QibdError::DimensionMismatch { expected: n, found });
            }
        }
        if phases.phases().len() != 1 << n {
            return Err(QibdError::NotPowerOfTwo(phases.phases().len()));
        }
        Ok(Self {
            prep_p,
            prep_q,
            phases,
        })
    }

    /// Builds Householder preparations for the amplitude encodings of `p` and `q`.
    pub fn from_distributions(
        p: &DiscreteDistribution,
        q: &DiscreteDistribution,
        phases: PhaseProfile,
    ) -> Result<Self> {
        p.ensure_same_size(q)?;
        Self::new(
            Preparation::new(unit(p.amplitudes()))?,
            Preparation::new(unit(q.amplitudes()))?,
            phases,
        )
    }

    pub fn num_data_qubits(&self) -> usize {
        self.prep_p.num_data_qubits()
    }

    fn data(&self) -> Range<usize> {
        1..self.num_data_qubits() + 1
    }

    /// State after the three preparation steps, `(|0⟩|ψ_p⟩ + |1⟩|ψ_q⟩)/√2`.
    pub fn prepare_branches(&self) -> Result<StateVector> {
        let mut state = StateVector::zeros(self.num_data_qubits() + 1)?;
        state.apply_hadamard(ANCILLA)?;
        state.apply_preparation(&self.prep_p, self.data(), None)?;
        // The reflection is self-adjoint, so it also serves as U_p†.
        state.apply_preparation(&self.prep_p, self.data(), Some(ANCILLA))?;
        state.apply_preparation(&self.prep_q, self.data(), Some(ANCILLA))?;
        Ok(state)
    }

    /// Full circuit with an optional ancilla phase before the last Hadamard.
    pub fn final_state(&self, ancilla_phase: Option<f64>) -> Result<StateVector> {
        let mut state = self.prepare_branches()?;
        state.apply_diagonal(self.phases.phases(), self.data(), Some(ANCILLA))?;
        if let Some(angle) = ancilla_phase {
            state.apply_phase(ANCILLA, angle)?;
        }
        state.apply_hadamard(ANCILLA)?;
        Ok(state)
    }

    /// Ancilla `P(0)` with an arbitrary ancilla phase inserted.
    pub fn run_with_ancilla_phase(&self, angle: f64) -> Result<f64> {
        self.final_state(Some(angle))?.prob_zero(ANCILLA)
    }

    /// Exact ancilla `P(0)` for one measurement setting.
    pub fn run_setting(&self, setting: MeasurementSetting) -> Result<f64> {
        let phase = match setting {
            MeasurementSetting::RealPart => None,
            MeasurementSetting::ImagPart => Some(IMAG_SETTING_PHASE),
        };
        self.final_state(phase)?.prob_zero(ANCILLA)
    }

    /// Shot-sampled readout of one setting.
    pub fn sample_setting(
        &self,
        setting: MeasurementSetting,
        shots: u64,
        seed: u64,
    ) -> Result<ShotCounts> {
        if shots == 0 {
            return Err(QibdError::ZeroShots);
        }
        let stream = match setting {
            MeasurementSetting::RealPart => REAL_STREAM,
            MeasurementSetting::ImagPart => IMAG_STREAM,
        };
        Ok(ShotCounts::draw(
            self.run_setting(setting)?,
            shots,
            mix_seed(seed, stream),
        ))
    }

    /// Runs both settings and reconstructs `A`, the coefficient and the distance.
    pub fn measure(&self, mode: ReadoutMode) -> Result<InterferometerReading> {
        let (p0_real, p0_imag) = match mode {
            ReadoutMode::Exact => (
                self.run_setting(MeasurementSetting::RealPart)?,
                self.run_setting(MeasurementSetting::ImagPart)?,
            ),
            ReadoutMode::Shots { shots, seed } => (
                self.sample_setting(MeasurementSetting::RealPart, shots, seed)?
                    .frequency_zero(),
                self.sample_setting(MeasurementSetting::ImagPart, shots, seed)?
                    .frequency_zero(),
            ),
        };
        let component = |p0: f64| {
            let value = 2.0 * p0 - 1.0;
            if mode == ReadoutMode::Exact && value.abs() <= EXACT_RESOLUTION {
                0.0
            } else {
                value
            }
        };
        let result = QibdResult::from_amplitude(component(p0_real), component(p0_imag));
        Ok(InterferometerReading {
            p0_real_setting: p0_real,
            p0_imag_setting: p0_imag,
            amplitude_re: result.amplitude_re,
            amplitude_im: result.amplitude_im,
            qibc: result.qibc,
            distance: result.distance,
            mode,
        })
    }
}

/// Removes the last-ulp drift of `Σ √p(x)²` so the preparation sees a unit vector.
fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Convenience wrapper: circuit-path reading for a pair of distributions.
pub fn measure_qibd(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    phases: &PhaseProfile,
    mode: ReadoutMode,
) -> Result<InterferometerReading> {
    CircuitSpec::from_distributions(p, q, phases.clone())?.measure(mode)
}
