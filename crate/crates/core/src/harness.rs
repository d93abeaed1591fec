//! Experiment configuration, sweeps, validation and result serialization.
//!
//! Output schema (CSV header, JSON object keys):
//! `alpha,theta,qibd,classical,qibc,amp_re,amp_im`. Infinite distances are
//! written as `inf`; an absent theta is an empty CSV field or JSON `null`.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::direct::{fidelity, qibc_direct};
use crate::distributions::{
    classical_distance, DiscreteDistribution, GaussianSpec, ThetaFamilySpec,
};
use crate::error::{QibdError, Result};
use crate::interaction::{Coupling, DiagonalHamiltonian};
use crate::interferometer::{measure_qibd, InterferometerReading, ReadoutMode};

pub const CSV_HEADER: [&str; 7] = [
    "alpha",
    "theta",
    "qibd",
    "classical",
    "qibc",
    "amp_re",
    "amp_im",
];

/// Where a distribution comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSpec {
    Gaussian { mu: f64, sigma: f64 },
    Theta { theta: f64 },
    Uniform,
    File { path: PathBuf },
}

impl SourceSpec {
    pub fn build(&self, n: usize) -> Result<DiscreteDistribution> {
        let dist = match self {
            SourceSpec::Gaussian { mu, sigma } => DiscreteDistribution::gaussian(
                n,
                GaussianSpec {
                    mu: *mu,
                    sigma: *sigma,
                },
            )?,
            SourceSpec::Theta { theta } => {
                DiscreteDistribution::theta_correlated(ThetaFamilySpec {
                    theta: *theta,
                    num_qubits: n,
                })?
            }
            SourceSpec::Uniform => DiscreteDistribution::uniform(n)?,
            SourceSpec::File { path } => DiscreteDistribution::load(path)?,
        };
        if dist.num_qubits() != n {
            return Err(QibdError::DimensionMismatch {
                expected: 1 << n,
                found: dist.probs().len(),
            });
        }
        Ok(dist)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| QibdError::Parse(format!("not a number: {s:?}")))
}

/// Parses `gaussian:MU,SIGMA`, `theta:THETA`, `uniform` or `file:PATH`.
impl FromStr for SourceSpec {
    type Err = QibdError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "gaussian" => {
                let (mu, sigma) = arg.split_once(',').ok_or_else(|| {
                    QibdError::Parse(format!("expected gaussian:MU,SIGMA, got {s:?}"))
                })?;
                Ok(SourceSpec::Gaussian {
                    mu: parse_f64(mu)?,
                    sigma: parse_f64(sigma)?,
                })
            }
            "theta" => Ok(SourceSpec::Theta {
                theta: parse_f64(arg)?,
            }),
            "uniform" if arg.is_empty() => Ok(SourceSpec::Uniform),
            "file" if !arg.is_empty() => Ok(SourceSpec::File { path: arg.into() }),
            _ => Err(QibdError::Parse(format!(
                "unrecognized distribution source {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianSpec {
    #[default]
    IsingChain,
    Custom {
        couplings: Vec<Coupling>,
    },
}

impl HamiltonianSpec {
    pub fn build(&self, n: usize) -> Result<DiagonalHamiltonian> {
        match self {
            HamiltonianSpec::IsingChain => DiagonalHamiltonian::ising_chain(n),
            HamiltonianSpec::Custom { couplings } => DiagonalHamiltonian::custom(n, couplings),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = QibdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(QibdError::Parse(format!(
                "unknown format {s:?}, expected csv or json"
            ))),
        }
    }
}

/// Inclusive grid `START:STOP:STEP`. The endpoint is kept when it lies on
/// the grid up to rounding.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(QibdError::Parse(format!(
            "expected START:STOP:STEP, got {s:?}"
        )));
    };
    grid(parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?)
}

pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(QibdError::InvalidParameter(format!(
            "bad grid {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(QibdError::InvalidParameter(format!(
            "grid has {count} points"
        )));
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: SourceSpec,
    pub q: SourceSpec,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    pub alpha_grid: Vec<f64>,
    #[serde(default)]
    pub theta_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub mode: ReadoutMode,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Five-qubit Gaussian pair swept over `α ∈ [0, 0.8]`.
    pub fn alpha_sweep_default() -> Self {
        Self {
            n: 5,
            p: SourceSpec::Gaussian {
                mu: 5.0,
                sigma: 1.5,
            },
            q: SourceSpec::Gaussian {
                mu: 9.0,
                sigma: 2.0,
            },
            hamiltonian: HamiltonianSpec::IsingChain,
            alpha_grid: grid(0.0, 0.8, 0.05).expect("static grid"),
            theta_grid: None,
            mode: ReadoutMode::Exact,
            output_path: None,
            format: OutputFormat::Csv,
        }
    }

    /// Five-qubit Gaussian reference against `q_θ`, `θ ∈ [0, 0.8]`, at `α = 1`.
    pub fn theta_sweep_default() -> Self {
        Self {
            q: SourceSpec::Uniform,
            alpha_grid: vec![1.0],
            theta_grid: Some(grid(0.0, 0.8, 0.1).expect("static grid")),
            ..Self::alpha_sweep_default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn check(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(QibdError::InvalidParameter("alpha grid is empty".into()));
        }
        if self.theta_grid.as_ref().is_some_and(|g| g.is_empty()) {
            return Err(QibdError::InvalidParameter("theta grid is empty".into()));
        }
        if let ReadoutMode::Shots { shots: 0, .. } = self.mode {
            return Err(QibdError::ZeroShots);
        }
        Ok(())
    }

    /// Readout mode for grid point `index`: shot seeds are `seed ^ index`.
    fn mode_for(&self, index: usize) -> ReadoutMode {
        match self.mode {
            ReadoutMode::Exact => ReadoutMode::Exact,
            ReadoutMode::Shots { shots, seed } => ReadoutMode::Shots {
                shots,
                seed: seed ^ index as u64,
            },
        }
    }
}

/// One grid point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub theta: Option<f64>,
    pub qibd: f64,
    pub classical: f64,
    pub qibc: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
}

impl SweepRow {
    fn new(
        alpha: f64,
        theta: Option<f64>,
        classical: f64,
        reading: &InterferometerReading,
    ) -> Self {
        Self {
            alpha,
            theta,
            qibd: reading.distance,
            classical,
            qibc: reading.qibc,
            amplitude_re: reading.amplitude_re,
            amplitude_im: reading.amplitude_im,
        }
    }
}

/// Evaluates the circuit path at every `α` of the grid.
pub fn sweep_alpha(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.check()?;
    let p = config.p.build(config.n)?;
    let q = config.q.build(config.n)?;
    let h = config.hamiltonian.build(config.n)?;
    let classical = classical_distance(&p, &q)?;
    config
        .alpha_grid
        .par_iter()
        .enumerate()
        .map(|(index, &alpha)| {
            let reading = measure_qibd(&p, &q, &h.phase_profile(alpha), config.mode_for(index))?;
            log::debug!("alpha={alpha} qibd={}", reading.distance);
            Ok(SweepRow::new(alpha, None, classical, &reading))
        })
        .collect()
}

/// Evaluates `p` against `q_θ` for every `(α, θ)` pair, `α`-major.
pub fn sweep_theta(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.check()?;
    let thetas = config
        .theta_grid
        .as_ref()
        .ok_or_else(|| QibdError::InvalidParameter("theta sweep needs a theta grid".into()))?;
    let p = config.p.build(config.n)?;
    let h = config.hamiltonian.build(config.n)?;
    let points: Vec<(f64, f64)> = config
        .alpha_grid
        .iter()
        .flat_map(|&a| thetas.iter().map(move |&t| (a, t)))
        .collect();
    points
        .par_iter()
        .enumerate()
        .map(|(index, &(alpha, theta))| {
            let q = SourceSpec::Theta { theta }.build(config.n)?;
            let classical = classical_distance(&p, &q)?;
            let reading = measure_qibd(&p, &q, &h.phase_profile(alpha), config.mode_for(index))?;
            log::debug!("alpha={alpha} theta={theta} qibd={}", reading.distance);
            Ok(SweepRow::new(alpha, Some(theta), classical, &reading))
        })
        .collect()
}

/// Single-pair comparison at one `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceRecord {
    pub alpha: f64,
    pub qibd: f64,
    pub classical: f64,
    pub fidelity: f64,
    pub qibc: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub mode: ReadoutMode,
}

/// Compares the configured `p` and `q` at the first `α` of the grid.
pub fn distance(config: &ExperimentConfig) -> Result<DistanceRecord> {
    config.check()?;
    let p = config.p.build(config.n)?;
    let q = config.q.build(config.n)?;
    p.ensure_same_size(&q)?;
    let h = config.hamiltonian.build(config.n)?;
    let alpha = config.alpha_grid[0];
    let reading = measure_qibd(&p, &q, &h.phase_profile(alpha), config.mode)?;
    Ok(DistanceRecord {
        alpha,
        qibd: reading.distance,
        classical: classical_distance(&p, &q)?,
        fidelity: fidelity(&p, &q)?,
        qibc: reading.qibc,
        amplitude_re: reading.amplitude_re,
        amplitude_im: reading.amplitude_im,
        mode: reading.mode,
    })
}

/// Shortest round-trip decimal, or `inf`.
pub fn format_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

fn real_value(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format_real(x))
    }
}

fn value_real(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| QibdError::Parse(format!("bad number {n}"))),
        Value::String(s) => parse_f64(s),
        other => Err(QibdError::Parse(format!("expected a number, got {other}"))),
    }
}

impl DistanceRecord {
    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "alpha": real_value(self.alpha),
            "qibd": real_value(self.qibd),
            "classical": real_value(self.classical),
            "fidelity": real_value(self.fidelity),
            "qibc": real_value(self.qibc),
            "amp_re": real_value(self.amplitude_re),
            "amp_im": real_value(self.amplitude_im),
        });
        if let ReadoutMode::Shots { shots, seed } = self.mode {
            obj["shots"] = json!(shots);
            obj["seed"] = json!(seed);
        }
        obj
    }
}

impl fmt::Display for DistanceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alpha={}", format_real(self.alpha))?;
        writeln!(f, "qibd={}", format_real(self.qibd))?;
        writeln!(f, "classical={}", format_real(self.classical))?;
        writeln!(f, "fidelity={}", format_real(self.fidelity))?;
        writeln!(f, "qibc={}", format_real(self.qibc))?;
        writeln!(f, "amp_re={}", format_real(self.amplitude_re))?;
        write!(f, "amp_im={}", format_real(self.amplitude_im))?;
        if let ReadoutMode::Shots { shots, seed } = self.mode {
            write!(f, "\nshots={shots}\nseed={seed}")?;
        }
        Ok(())
    }
}

pub fn write_rows(rows: &[SweepRow], format: OutputFormat, out: &mut impl Write) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(CSV_HEADER)?;
            for row in rows {
                writer.write_record([
                    format_real(row.alpha),
                    row.theta.map(format_real).unwrap_or_default(),
                    format_real(row.qibd),
                    format_real(row.classical),
                    format_real(row.qibc),
                    format_real(row.amplitude_re),
                    format_real(row.amplitude_im),
                ])?;
            }
            writer.flush()?;
        }
        OutputFormat::Json => {
            let values: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "alpha": real_value(row.alpha),
                        "theta": row.theta.map(real_value),
                        "qibd": real_value(row.qibd),
                        "classical": real_value(row.classical),
                        "qibc": real_value(row.qibc),
                        "amp_re": real_value(row.amplitude_re),
                        "amp_im": real_value(row.amplitude_im),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &values)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Parses output written by [`write_rows`].
pub fn read_rows(text: &str, format: OutputFormat) -> Result<Vec<SweepRow>> {
    match format {
        OutputFormat::Csv => {
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            if reader.headers()?.iter().ne(CSV_HEADER) {
                return Err(QibdError::Parse("unexpected CSV header".into()));
            }
            reader
                .records()
                .map(|record| {
                    let record = record?;
                    let field = |i: usize| parse_f64(&record[i]);
                    Ok(SweepRow {
                        alpha: field(0)?,
                        theta: if record[1].is_empty() {
                            None
                        } else {
                            Some(field(1)?)
                        },
                        qibd: field(2)?,
                        classical: field(3)?,
                        qibc: field(4)?,
                        amplitude_re: field(5)?,
                        amplitude_im: field(6)?,
                    })
                })
                .collect()
        }
        OutputFormat::Json => {
            let values: Vec<Value> = serde_json::from_str(text)?;
            values
                .iter()
                .map(|v| {
                    let get = |key: &str| value_real(&v[key]);
                    Ok(SweepRow {
                        alpha: get("alpha")?,
                        theta: if v["theta"].is_null() {
                            None
                        } else {
                            Some(get("theta")?)
                        },
                        qibd: get("qibd")?,
                        classical: get("classical")?,
                        qibc: get("qibc")?,
                        amplitude_re: get("amp_re")?,
                        amplitude_im: get("amp_im")?,
                    })
                })
                .collect()
        }
    }
}

/// Reference values for the three-qubit Gaussian pair under the Ising chain.
pub const VALIDATION_TARGETS: [(f64, f64); 4] =
    [(0.0, 1.417), (0.5, 1.666), (1.0, 2.469), (1.5, 3.627)];
pub const TARGET_TOLERANCE: f64 = 0.01;
pub const PATH_AGREEMENT: f64 = 1e-10;
pub const CLASSICAL_LIMIT_TOLERANCE: f64 = 1e-12;

/// Weighted non-chain couplings used by the sign regression check.
pub const REGRESSION_COUPLINGS: [Coupling; 3] = [
    Coupling(0, 1, 0.7),
    Coupling(0, 2, -0.4),
    Coupling(1, 2, 1.3),
];
pub const REGRESSION_ALPHA: f64 = 0.9;
/// `A = ⟨ψ_p|e^{iαH}|ψ_q⟩` for the regression instance, from an independent evaluation.
pub const REGRESSION_AMPLITUDE: (f64, f64) = (0.218657335881905, 0.0994323627978624);

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationRow {
    pub alpha: f64,
    pub target: f64,
    pub direct: f64,
    pub circuit: f64,
    pub classical: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub regression_direct: (f64, f64),
    pub regression_circuit: (f64, f64),
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>10} {:>14} {:>14} {:>14}",
            "alpha", "target", "direct", "circuit", "classical"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6.2} {:>10.3} {:>14.10} {:>14.10} {:>14.10}",
                r.alpha, r.target, r.direct, r.circuit, r.classical
            )?;
        }
        let (dr, di) = self.regression_direct;
        let (cr, ci) = self.regression_circuit;
        writeln!(
            f,
            "regression amplitude: direct {dr:.12}{di:+.12}i circuit {cr:.12}{ci:+.12}i"
        )?;
        if self.passed() {
            write!(f, "PASS")
        } else {
            let mut s = String::from("FAIL");
            for failure in &self.failures {
                let _ = write!(s, "\n  {failure}");
            }
            write!(f, "{s}")
        }
    }
}

fn validation_pair() -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    Ok((
        DiscreteDistribution::gaussian(
            3,
            GaussianSpec {
                mu: 2.0,
                sigma: 1.0,
            },
        )?,
        DiscreteDistribution::gaussian(
            3,
            GaussianSpec {
                mu: 5.0,
                sigma: 1.5,
            },
        )?,
    ))
}

/// Runs the three-qubit reference case through both evaluation paths and
/// checks a sign-sensitive regression instance.
pub fn validate() -> Result<ValidationReport> {
    let (p, q) = validation_pair()?;
    let h = DiagonalHamiltonian::ising_chain(3)?;
    let classical = classical_distance(&p, &q)?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for &(alpha, target) in &VALIDATION_TARGETS {
        let phases = h.phase_profile(alpha);
        let direct = qibc_direct(&p, &q, &phases)?.distance;
        let circuit = measure_qibd(&p, &q, &phases, ReadoutMode::Exact)?.distance;
        if (direct - target).abs() > TARGET_TOLERANCE {
            failures.push(format!(
                "alpha={alpha}: direct {direct:.6} vs target {target} (diff {:+.6})",
                direct - target
            ));
        }
        if (circuit - target).abs() > TARGET_TOLERANCE {
            failures.push(format!(
                "alpha={alpha}: circuit {circuit:.6} vs target {target} (diff {:+.6})",
                circuit - target
            ));
        }
        if (direct - circuit).abs() > PATH_AGREEMENT {
            failures.push(format!(
                "alpha={alpha}: paths disagree by {:e}",
                direct - circuit
            ));
        }
        if alpha == 0.0 && (direct - classical).abs() > CLASSICAL_LIMIT_TOLERANCE {
            failures.push(format!(
                "alpha=0: direct {direct} differs from classical {classical}"
            ));
        }
        rows.push(ValidationRow {
            alpha,
            target,
            direct,
            circuit,
            classical,
        });
    }

    let p = DiscreteDistribution::gaussian(
        3,
        GaussianSpec {
            mu: 1.5,
            sigma: 0.8,
        },
    )?;
    let q = DiscreteDistribution::theta_correlated(ThetaFamilySpec {
        theta: 0.5,
        num_qubits: 3,
    })?;
    let phases =
        DiagonalHamiltonian::custom(3, &REGRESSION_COUPLINGS)?.phase_profile(REGRESSION_ALPHA);
    let d = qibc_direct(&p, &q, &phases)?;
    let c = measure_qibd(&p, &q, &phases, ReadoutMode::Exact)?;
    let regression_direct = (d.amplitude_re, d.amplitude_im);
    let regression_circuit = (c.amplitude_re, c.amplitude_im);
    let (er, ei) = REGRESSION_AMPLITUDE;
    for (label, (re, im)) in [
        ("direct", regression_direct),
        ("circuit", regression_circuit),
    ] {
        if (re - er).abs() > 1e-9 || (im - ei).abs() > 1e-9 {
            failures.push(format!(
                "regression {label}: amplitude {re:.12}{im:+.12}i, expected {er:.12}{ei:+.12}i"
            ));
        }
    }
    Ok(ValidationReport {
        rows,
        regression_direct,
        regression_circuit,
        failures,
    })
}
