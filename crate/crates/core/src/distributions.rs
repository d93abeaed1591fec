//! Probability distributions over `2^n` outcomes and their classical overlap.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QibdError, Result};
use crate::interaction::{DiagonalHamiltonian, MAX_QUBITS};

/// Tolerance on `Σ p = 1` for in-memory distributions.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Tolerance on `Σ p = 1` for values read from text; within it the input is
/// renormalized, outside it the file is rejected.
pub const FILE_SUM_TOLERANCE: f64 = 1e-6;

/// Normalized probability mass function over `{0, …, 2^n − 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    num_qubits: usize,
    probs: Vec<f64>,
}

/// Location and spread of a discrete Gaussian, in outcome-index units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mu: f64,
    pub sigma: f64,
}

/// Member of the family `q_θ(x) ∝ exp(θ·h(x))` with `h` the Ising chain diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaFamilySpec {
    pub theta: f64,
    pub num_qubits: usize,
}

fn check_length(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(QibdError::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(QibdError::InvalidParameter(format!(
            "{n} qubits exceeds the limit of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

fn check_entries(probs: &[f64]) -> Result<f64> {
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(QibdError::NegativeProbability { index, value });
        }
    }
    Ok(probs.iter().sum())
}

/// Divides unnormalized nonnegative weights by their sum.
fn normalized(weights: Vec<f64>) -> Result<DiscreteDistribution> {
    let n = check_length(weights.len())?;
    let total = check_entries(&weights)?;
    if !total.is_finite() || total <= 0.0 {
        return Err(QibdError::NotNormalized(total));
    }
    Ok(DiscreteDistribution {
        num_qubits: n,
        probs: weights.into_iter().map(|w| w / total).collect(),
    })
}

impl DiscreteDistribution {
    /// Validates an explicit probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let n = check_length(probs.len())?;
        let total = check_entries(&probs)?;
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(QibdError::NotNormalized(total));
        }
        Ok(Self {
            num_qubits: n,
            probs,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_length(1usize.checked_shl(n as u32).unwrap_or(0))?;
        normalized(vec![1.0; 1 << n])
    }

    /// All mass on outcome `x`.
    pub fn point_mass(n: usize, x: usize) -> Result<Self> {
        check_length(1usize.checked_shl(n as u32).unwrap_or(0))?;
        if x >= 1 << n {
            return Err(QibdError::InvalidParameter(format!(
                "outcome {x} outside 0..{}",
                1usize << n
            )));
        }
        let mut probs = vec![0.0; 1 << n];
        probs[x] = 1.0;
        Ok(Self {
            num_qubits: n,
            probs,
        })
    }

    /// `p(x) ∝ exp(−(x−μ)²/(2σ²))`, normalized over the truncated domain.
    pub fn gaussian(n: usize, spec: GaussianSpec) -> Result<Self> {
        if !spec.sigma.is_finite() || spec.sigma <= 0.0 || !spec.mu.is_finite() {
            return Err(QibdError::InvalidParameter(format!(
                "gaussian needs finite mu and sigma > 0, got mu={} sigma={}",
                spec.mu, spec.sigma
            )));
        }
        let len = 1usize.checked_shl(n as u32).unwrap_or(0);
        check_length(len)?;
        let two_var = 2.0 * spec.sigma * spec.sigma;
        let log_weights: Vec<f64> = (0..len)
            .map(|x| -(x as f64 - spec.mu).powi(2) / two_var)
            .collect();
        from_log_weights(log_weights)
    }

    /// `q_θ(x) = exp(θ·h(x)) / 𝒩(θ)` where `h` is the Ising chain diagonal.
    pub fn theta_correlated(spec: ThetaFamilySpec) -> Result<Self> {
        if spec.num_qubits < 2 {
            return Err(QibdError::InvalidParameter(
                "theta family needs at least two qubits".into(),
            ));
        }
        if !spec.theta.is_finite() {
            return Err(QibdError::InvalidParameter("theta must be finite".into()));
        }
        let h = DiagonalHamiltonian::ising_chain(spec.num_qubits)?;
        from_log_weights(h.diag().iter().map(|d| spec.theta * d).collect())
    }

    /// Reads a distribution from a JSON array or a one-value-per-line CSV file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses file contents; see [`DiscreteDistribution::load`].
    pub fn parse(text: &str) -> Result<Self> {
        let values: Vec<f64> = if text.trim_start().starts_with('[') {
            serde_json::from_str(text)?
        } else {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            let mut values = Vec::new();
            for record in reader.records() {
                let record = record?;
                if record.len() != 1 {
                    return Err(QibdError::Parse(format!(
                        "expected one value per line, found {}",
                        record.len()
                    )));
                }
                let field = &record[0];
                values.push(
                    field
                        .parse()
                        .map_err(|_| QibdError::Parse(format!("not a number: {field:?}")))?,
                );
            }
            values
        };
        check_length(values.len())?;
        let total = check_entries(&values)?;
        if (total - 1.0).abs() > FILE_SUM_TOLERANCE {
            return Err(QibdError::NotNormalized(total));
        }
        normalized(values)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Amplitude encoding `√p(x)`.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.sqrt()).collect()
    }

    pub fn ensure_same_size(&self, other: &Self) -> Result<()> {
        if self.probs.len() != other.probs.len() {
            return Err(QibdError::DimensionMismatch {
                expected: self.probs.len(),
                found: other.probs.len(),
            });
        }
        Ok(())
    }
}

/// Normalizes `exp(log_weights)` after shifting by the maximum.
fn from_log_weights(log_weights: Vec<f64>) -> Result<DiscreteDistribution> {
    let max = log_weights
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    normalized(log_weights.into_iter().map(|l| (l - max).exp()).collect())
}

/// `BC(p, q) = Σ_x √(p(x) q(x))`, clamped to `[0, 1]`.
pub fn bhattacharyya_coefficient(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<f64> {
    p.ensure_same_size(q)?;
    let bc: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    Ok(bc.clamp(0.0, 1.0))
}

/// `−ln BC²`; infinite for disjoint supports.
pub fn classical_distance(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    let bc = bhattacharyya_coefficient(p, q)?;
    if bc == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-2.0 * bc.ln())
}
