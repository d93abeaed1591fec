//! Diagonal interaction Hamiltonians and their phase profiles.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{QibdError, Result};

/// Largest register the library will tabulate (`2^20` entries).
pub const MAX_QUBITS: usize = 20;

/// Real diagonal `h(x) = ⟨x|H|x⟩` of a Hamiltonian in the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalHamiltonian {
    num_qubits: usize,
    diag: Vec<f64>,
}

/// A `Z_i Z_j` term with a weight. Serialized as `[i, j, weight]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling(pub usize, pub usize, pub f64);

/// Bit of qubit `i` (0 = most significant) in an `n`-bit value.
#[inline]
pub(crate) fn bit(x: usize, i: usize, n: usize) -> usize {
    (x >> (n - 1 - i)) & 1
}

/// `+1` when the two bits agree, `-1` otherwise.
#[inline]
fn zz(x: usize, i: usize, j: usize, n: usize) -> f64 {
    if bit(x, i, n) == bit(x, j, n) {
        1.0
    } else {
        -1.0
    }
}

fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return Err(QibdError::InvalidParameter(format!(
            "number of qubits must be in {min}..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

impl DiagonalHamiltonian {
    /// Wraps an explicit diagonal; the length must be a power of two.
    pub fn from_diagonal(diag: Vec<f64>) -> Result<Self> {
        let len = diag.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QibdError::NotPowerOfTwo(len));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            diag,
        })
    }

    /// Open nearest-neighbour chain `Σ_i Z_i Z_{i+1}`.
    pub fn ising_chain(n: usize) -> Result<Self> {
        check_size(n, 2)?;
        let diag = (0..1usize << n)
            .map(|x| (0..n - 1).map(|i| zz(x, i, i + 1, n)).sum())
            .collect();
        Ok(Self {
            num_qubits: n,
            diag,
        })
    }

    /// Weighted sum of `Z_i Z_j` terms over arbitrary qubit pairs.
    pub fn custom(n: usize, couplings: &[Coupling]) -> Result<Self> {
        check_size(n, 1)?;
        let mut seen = HashSet::new();
        for &Coupling(i, j, weight) in couplings {
            if i >= j || j >= n {
                return Err(QibdError::InvalidParameter(format!(
                    "coupling ({i}, {j}) needs 0 <= i < j < {n}"
                )));
            }
            if !weight.is_finite() {
                return Err(QibdError::InvalidParameter(format!(
                    "coupling ({i}, {j}) has non-finite weight"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(QibdError::DuplicateCoupling(i, j));
            }
        }
        let diag = (0..1usize << n)
            .map(|x| {
                couplings
                    .iter()
                    .map(|&Coupling(i, j, w)| w * zz(x, i, j, n))
                    .sum()
            })
            .collect();
        Ok(Self {
            num_qubits: n,
            diag,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `Φ(x) = α·h(x)`.
    pub fn phase_profile(&self, alpha: f64) -> PhaseProfile {
        PhaseProfile {
            alpha,
            phases: self.diag.iter().map(|h| alpha * h).collect(),
        }
    }
}

/// Phases `Φ(x) = α·h(x)` imprinted by `e^{iαH}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseProfile {
    alpha: f64,
    phases: Vec<f64>,
}

impl PhaseProfile {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn num_qubits(&self) -> usize {
        self.phases.len().trailing_zeros() as usize
    }
}
