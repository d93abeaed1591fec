//! Dense statevector engine with the small gate set the interferometer uses.
//!
//! Basis index convention: qubit 0 is the most significant bit. A data
//! register is a contiguous qubit range; its first qubit carries the most
//! significant bit of the register value `x`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QibdError, Result};

/// Tolerance on the squared norm accepted by [`StateVector::from_amplitudes`].
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Below this distance from `|0…0⟩` a preparation is the identity.
const DEGENERATE_REFLECTION: f64 = 1e-15;

/// Amplitudes of an `m`-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state `|0…0⟩`.
    pub fn zeros(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits >= usize::BITS as usize {
            return Err(QibdError::InvalidParameter(format!(
                "cannot allocate a register of {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps an explicit amplitude vector. The length must be a power of two
    /// (at least 2) and the squared norm must be 1 within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QibdError::NotPowerOfTwo(len));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QibdError::InvalidNorm(norm));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(QibdError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Bit mask of `qubit` inside a basis index.
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_register(&self, data: &Range<usize>, control: Option<usize>) -> Result<()> {
        if data.start >= data.end || data.end > self.num_qubits {
            return Err(QibdError::InvalidParameter(format!(
                "data register {data:?} invalid for {} qubits",
                self.num_qubits
            )));
        }
        if let Some(c) = control {
            self.check_qubit(c)?;
            if data.contains(&c) {
                return Err(QibdError::OverlappingRegisters(c));
            }
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let a = self.amplitudes[i];
                let b = self.amplitudes[i | mask];
                self.amplitudes[i] = (a + b) * FRAC_1_SQRT_2;
                self.amplitudes[i | mask] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    /// Multiplies the `|1⟩` component of `qubit` by `e^{i·angle}`.
    pub fn apply_phase(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let factor = Complex64::from_polar(1.0, angle);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask != 0 {
                *amp *= factor;
            }
        }
        Ok(())
    }

    /// Applies `e^{iΦ(x)}` to every basis state, where `x` is the content of
    /// the data register. With a control qubit only the branch where the
    /// control is `|1⟩` picks up the phase.
    pub fn apply_diagonal(
        &mut self,
        phases: &[f64],
        data: Range<usize>,
        control: Option<usize>,
    ) -> Result<()> {
        self.check_register(&data, control)?;
        let width = data.len();
        if phases.len() != 1 << width {
            return Err(QibdError::DimensionMismatch {
                expected: 1 << width,
                found: phases.len(),
            });
        }
        let factors: Vec<Complex64> = phases
            .iter()
            .map(|&phi| Complex64::from_polar(1.0, phi))
            .collect();
        let shift = self.num_qubits - data.end;
        let value_mask = (1 << width) - 1;
        let control_mask = control.map(|c| self.mask(c));
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if control_mask.is_some_and(|m| i & m == 0) {
                continue;
            }
            *amp *= factors[(i >> shift) & value_mask];
        }
        Ok(())
    }

    /// Applies the preparation reflection to the data register, optionally
    /// controlled. Each block of `2^n` amplitudes receives the rank-1 update
    /// `a ← a − 2w(wᵀa)`, so the cost is linear in the state size.
    pub fn apply_preparation(
        &mut self,
        prep: &Preparation,
        data: Range<usize>,
        control: Option<usize>,
    ) -> Result<()> {
        self.check_register(&data, control)?;
        if prep.num_data_qubits != data.len() {
            return Err(QibdError::DimensionMismatch {
                expected: data.len(),
                found: prep.num_data_qubits,
            });
        }
        let Some(w) = prep.reflection.as_deref() else {
            return Ok(());
        };
        let shift = self.num_qubits - data.end;
        let block_mask = ((1usize << data.len()) - 1) << shift;
        let control_mask = control.map(|c| self.mask(c));
        for base in 0..self.amplitudes.len() {
            if base & block_mask != 0 || control_mask.is_some_and(|m| base & m == 0) {
                continue;
            }
            let overlap: Complex64 = w
                .iter()
                .enumerate()
                .map(|(x, &wx)| self.amplitudes[base | (x << shift)] * wx)
                .sum();
            let twice = overlap * 2.0;
            for (x, &wx) in w.iter().enumerate() {
                self.amplitudes[base | (x << shift)] -= twice * wx;
            }
        }
        Ok(())
    }

    /// Probability of reading `0` on `qubit`, clamped to `[0, 1]`.
    pub fn prob_zero(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let p: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(p.clamp(0.0, 1.0))
    }

    /// Draws `shots` independent single-qubit measurements of `qubit`.
    /// The state itself is not collapsed.
    pub fn sample_qubit(&self, qubit: usize, shots: u64, seed: u64) -> Result<ShotCounts> {
        if shots == 0 {
            return Err(QibdError::ZeroShots);
        }
        let p0 = self.prob_zero(qubit)?;
        Ok(ShotCounts::draw(p0, shots, seed))
    }
}

/// Real Householder reflection `I − 2wwᵀ` mapping `|0…0⟩` to `Σ_x √p(x)|x⟩`.
///
/// The reflection is unitary and self-adjoint, so the same object serves as
/// both `U_p` and `U_p†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Preparation {
    num_data_qubits: usize,
    target_amplitudes: Vec<f64>,
    /// Unit vector `w ∝ e_0 − v`; `None` when the target is `e_0` itself.
    reflection: Option<Vec<f64>>,
}

impl Preparation {
    /// Builds the preparation for a real nonnegative unit vector of
    /// length `2^n`.
    pub fn new(target_amplitudes: Vec<f64>) -> Result<Self> {
        let len = target_amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QibdError::NotPowerOfTwo(len));
        }
        if let Some((index, &value)) = target_amplitudes
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(QibdError::NegativeProbability { index, value });
        }
        let norm: f64 = target_amplitudes.iter().map(|v| v * v).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QibdError::InvalidNorm(norm));
        }

        // u = e_0 - v; u_0 = 1 - v_0 computed directly to keep cancellation small.
        let mut u: Vec<f64> = target_amplitudes.iter().map(|v| -v).collect();
        u[0] = 1.0 - target_amplitudes[0];
        let u_norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let reflection = if u_norm < DEGENERATE_REFLECTION {
            None
        } else {
            Some(u.into_iter().map(|x| x / u_norm).collect())
        };
        Ok(Self {
            num_data_qubits: len.trailing_zeros() as usize,
            target_amplitudes,
            reflection,
        })
    }

    pub fn num_data_qubits(&self) -> usize {
        self.num_data_qubits
    }

    pub fn target_amplitudes(&self) -> &[f64] {
        &self.target_amplitudes
    }

    pub fn reflection_vector(&self) -> Option<&[f64]> {
        self.reflection.as_deref()
    }

    pub fn is_identity(&self) -> bool {
        self.reflection.is_none()
    }
}

/// Outcome tallies from repeated single-qubit measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    pub shots: u64,
    pub count_zero: u64,
    pub count_one: u64,
    pub seed: u64,
}

impl ShotCounts {
    /// Bernoulli draws with success probability `p0` (clamped to `[0, 1]`).
    /// Deterministic for a fixed seed.
    pub fn draw(p0: f64, shots: u64, seed: u64) -> Self {
        let p0 = p0.clamp(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count_zero = (0..shots).filter(|_| rng.random::<f64>() < p0).count() as u64;
        Self {
            shots,
            count_zero,
            count_one: shots - count_zero,
            seed,
        }
    }

    pub fn frequency_zero(&self) -> f64 {
        self.count_zero as f64 / self.shots as f64
    }
}
