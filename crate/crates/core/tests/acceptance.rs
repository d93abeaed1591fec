//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qibd_core::harness::{self, ExperimentConfig};
use qibd_core::{
    bhattacharyya_coefficient, classical_distance, first_order_element, measure_qibd, qibc_direct,
    CircuitSpec, DiagonalHamiltonian, DiscreteDistribution, GaussianSpec, Preparation, ReadoutMode,
    StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gauss(n: usize, mu: f64, sigma: f64) -> DiscreteDistribution {
    DiscreteDistribution::gaussian(n, GaussianSpec { mu, sigma }).unwrap()
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> DiscreteDistribution {
    let w: Vec<f64> = (0..1 << n).map(|_| rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    DiscreteDistribution::new(w.into_iter().map(|x| x / total).collect()).unwrap()
}

/// Distances agree if both are infinite or they differ by at most `tol`.
fn same_distance(a: f64, b: f64, tol: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= tol
}

fn ac1_validation_table() -> Outcome {
    let start = Instant::now();
    let report = harness::validate().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for row in &report.rows {
        for (label, value) in [("direct", row.direct), ("circuit", row.circuit)] {
            ensure((value - row.target).abs() <= 0.01, || {
                format!(
                    "alpha={} {label}={value:.5} target={}",
                    row.alpha, row.target
                )
            })?;
        }
    }
    ensure(report.passed(), || report.failures.join("; "))?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    let values: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{:.4}", r.direct))
        .collect();
    Ok(format!("D = [{}] in {elapsed:?}", values.join(", ")))
}

fn ac2_classical_limit() -> Outcome {
    let h3 = DiagonalHamiltonian::ising_chain(3).unwrap();
    let (p, q) = (gauss(3, 2.0, 1.0), gauss(3, 5.0, 1.5));
    let d = qibc_direct(&p, &q, &h3.phase_profile(0.0))
        .unwrap()
        .distance;
    let c = classical_distance(&p, &q).unwrap();
    ensure((d - c).abs() <= 1e-12, || {
        format!("validation case: {d} vs {c}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let p = random_distribution(&mut rng, n);
        let q = random_distribution(&mut rng, n);
        let h = DiagonalHamiltonian::ising_chain(n).unwrap();
        let d = qibc_direct(&p, &q, &h.phase_profile(0.0)).unwrap().distance;
        let c = classical_distance(&p, &q).unwrap();
        worst = worst.max((d - c).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("201 pairs, max |D(0) - D_classical| = {worst:.1e}"))
}

fn ac3_dual_path() -> Outcome {
    let mut worst = 0.0f64;
    let mut check = |p: &DiscreteDistribution,
                     q: &DiscreteDistribution,
                     h: &DiagonalHamiltonian,
                     alpha: f64| {
        let phases = h.phase_profile(alpha);
        let d = qibc_direct(p, q, &phases).unwrap().distance;
        let c = measure_qibd(p, q, &phases, ReadoutMode::Exact)
            .unwrap()
            .distance;
        ensure(same_distance(d, c, 1e-10), || {
            format!("n={} alpha={alpha}: direct {d} circuit {c}", p.num_qubits())
        })?;
        if d.is_finite() {
            worst = worst.max((d - c).abs());
        }
        Ok::<_, String>(())
    };

    let h3 = DiagonalHamiltonian::ising_chain(3).unwrap();
    for alpha in [0.0, 0.5, 1.0, 1.5] {
        check(&gauss(3, 2.0, 1.0), &gauss(3, 5.0, 1.5), &h3, alpha)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let p = random_distribution(&mut rng, n);
        let q = random_distribution(&mut rng, n);
        let alpha = rng.random_range(0.0..=2.0);
        check(&p, &q, &DiagonalHamiltonian::ising_chain(n).unwrap(), alpha)?;
    }
    let mut infinite = 0;
    for n in 2..=6 {
        let h = DiagonalHamiltonian::ising_chain(n).unwrap();
        let a = DiscreteDistribution::point_mass(n, 0).unwrap();
        let b = DiscreteDistribution::point_mass(n, (1 << n) - 1).unwrap();
        // half-supports: even outcomes vs odd outcomes
        let half = 2.0 / (1 << n) as f64;
        let even = DiscreteDistribution::new(
            (0..1 << n)
                .map(|x| if x % 2 == 0 { half } else { 0.0 })
                .collect(),
        )
        .unwrap();
        let odd = DiscreteDistribution::new(
            (0..1 << n)
                .map(|x| if x % 2 == 1 { half } else { 0.0 })
                .collect(),
        )
        .unwrap();
        for (p, q) in [(&a, &b), (&even, &odd)] {
            for alpha in [0.0, 0.7, 1.9] {
                let phases = h.phase_profile(alpha);
                let d = qibc_direct(p, q, &phases).unwrap().distance;
                let c = measure_qibd(p, q, &phases, ReadoutMode::Exact)
                    .unwrap()
                    .distance;
                ensure(d.is_infinite() && c.is_infinite(), || {
                    format!("disjoint n={n} alpha={alpha}: {d} vs {c}")
                })?;
                infinite += 1;
            }
        }
    }
    Ok(format!("104 finite instances, max |diff| = {worst:.1e}; {infinite} disjoint instances both infinite"))
}

fn ac4_alpha_sweep() -> Outcome {
    let rows = harness::sweep_alpha(&ExperimentConfig::alpha_sweep_default())
        .map_err(|e| e.to_string())?;
    ensure(rows.len() == 17, || format!("{} rows", rows.len()))?;
    for row in &rows {
        ensure((row.classical - 1.321).abs() <= 0.005, || {
            format!("classical {} at alpha={}", row.classical, row.alpha)
        })?;
    }
    ensure((rows[0].qibd - 1.321).abs() <= 0.005, || {
        format!("qibd(0) = {}", rows[0].qibd)
    })?;
    let last = rows.last().unwrap();
    ensure((last.alpha - 0.8).abs() < 1e-12, || {
        format!("last alpha {}", last.alpha)
    })?;
    ensure((last.qibd - 2.994).abs() <= 0.01, || {
        format!("qibd(0.8) = {}", last.qibd)
    })?;
    for pair in rows.windows(2) {
        ensure(pair[1].qibd >= pair[0].qibd, || {
            format!(
                "decrease between alpha={} and {}",
                pair[0].alpha, pair[1].alpha
            )
        })?;
    }
    Ok(format!(
        "classical = {:.4}, D(0.8) = {:.4}, nondecreasing over 17 points",
        rows[0].classical, last.qibd
    ))
}

fn ac5_theta_sweep() -> Outcome {
    let rows = harness::sweep_theta(&ExperimentConfig::theta_sweep_default())
        .map_err(|e| e.to_string())?;
    let at = |theta: f64| {
        rows.iter()
            .find(|r| (r.theta.unwrap() - theta).abs() < 1e-12)
            .unwrap()
    };
    let (lo, hi) = (at(0.0), at(0.8));
    for (row, qibd, classical) in [(lo, 4.1, 1.45), (hi, 4.3, 2.17)] {
        ensure((row.alpha - 1.0).abs() < 1e-15, || {
            format!("alpha {}", row.alpha)
        })?;
        ensure((row.qibd - qibd).abs() <= 0.15, || {
            format!("theta={:?}: qibd {}", row.theta, row.qibd)
        })?;
        ensure((row.classical - classical).abs() <= 0.15, || {
            format!("theta={:?}: classical {}", row.theta, row.classical)
        })?;
    }
    for row in &rows {
        ensure(row.qibd >= row.classical, || {
            format!("qibd < classical at theta={:?}", row.theta)
        })?;
    }
    Ok(format!(
        "theta=0: ({:.3}, {:.3}); theta=0.8: ({:.3}, {:.3})",
        lo.qibd, lo.classical, hi.qibd, hi.classical
    ))
}

fn ac6_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut max_sym = 0.0f64;
    let mut max_even = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let p = random_distribution(&mut rng, n);
        let q = random_distribution(&mut rng, n);
        let h = DiagonalHamiltonian::ising_chain(n).unwrap();
        let alpha = rng.random_range(-3.0..3.0);
        let pq = qibc_direct(&p, &q, &h.phase_profile(alpha)).unwrap();
        let qp = qibc_direct(&q, &p, &h.phase_profile(alpha)).unwrap();
        let neg = qibc_direct(&p, &q, &h.phase_profile(-alpha)).unwrap();
        ensure(pq.distance >= 0.0, || {
            format!("negative distance {}", pq.distance)
        })?;
        max_sym = max_sym.max((pq.qibc - qp.qibc).abs());
        max_even = max_even.max((pq.qibc - neg.qibc).abs());
        let same = qibc_direct(&p, &p, &h.phase_profile(0.0)).unwrap();
        ensure(same.distance.abs() <= 1e-12, || {
            format!("D(p,p,0) = {}", same.distance)
        })?;
    }
    ensure(max_sym <= 1e-14, || {
        format!("symmetry deviation {max_sym:e}")
    })?;
    ensure(max_even <= 1e-14, || {
        format!("evenness deviation {max_even:e}")
    })?;

    // Equal overlap, different interference: relabelling outcomes keeps BC
    // but moves the overlap onto states with different chain energies.
    let h2 = DiagonalHamiltonian::ising_chain(2).unwrap();
    let p1 = DiscreteDistribution::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let q1 = DiscreteDistribution::new(vec![0.8, 0.0, 0.0, 0.2]).unwrap();
    let p2 = DiscreteDistribution::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
    let q2 = DiscreteDistribution::new(vec![0.8, 0.2, 0.0, 0.0]).unwrap();
    let dbc = (bhattacharyya_coefficient(&p1, &q1).unwrap()
        - bhattacharyya_coefficient(&p2, &q2).unwrap())
    .abs();
    let dq = (qibc_direct(&p1, &q1, &h2.phase_profile(1.0)).unwrap().qibc
        - qibc_direct(&p2, &q2, &h2.phase_profile(1.0)).unwrap().qibc)
        .abs();
    ensure(dbc < 1e-12 && dq > 0.01, || {
        format!("witness |dBC|={dbc:e} |dQIBC|={dq}")
    })?;

    // First-order expansion: residual of A(alpha) - (BC + i alpha M) is O(alpha^2).
    let (p, q) = (gauss(5, 5.0, 1.5), gauss(5, 9.0, 2.0));
    let h5 = DiagonalHamiltonian::ising_chain(5).unwrap();
    let bc = bhattacharyya_coefficient(&p, &q).unwrap();
    let m = first_order_element(&p, &q, &h5).unwrap();
    let residual = |alpha: f64| {
        let a = qibc_direct(&p, &q, &h5.phase_profile(alpha))
            .unwrap()
            .amplitude();
        (a - Complex64::new(bc, alpha * m)).norm()
    };
    let ratio = residual(1e-2) / residual(1e-3);
    ensure((100.0 / 1.5..=150.0).contains(&ratio), || {
        format!("residual ratio {ratio}")
    })?;

    Ok(format!(
        "symmetry {max_sym:.1e}, evenness {max_even:.1e}, witness dBC={dbc:.1e} dQIBC={dq:.3}, residual ratio {ratio:.2}"
    ))
}

fn ac7_shot_noise() -> Outcome {
    let (p, q) = (gauss(3, 2.0, 1.0), gauss(3, 5.0, 1.5));
    let phases = DiagonalHamiltonian::ising_chain(3)
        .unwrap()
        .phase_profile(0.5);
    let spec = CircuitSpec::from_distributions(&p, &q, phases).unwrap();
    let exact = spec.measure(ReadoutMode::Exact).unwrap().qibc;
    let rmse = |shots: u64| {
        let mse: f64 = (0..50u64)
            .map(|seed| {
                let est = spec
                    .measure(ReadoutMode::Shots { shots, seed })
                    .unwrap()
                    .qibc;
                (est - exact).powi(2)
            })
            .sum::<f64>()
            / 50.0;
        mse.sqrt()
    };
    let errors: Vec<f64> = [1_000, 10_000, 100_000].into_iter().map(rmse).collect();
    let predicted = 10f64.sqrt();
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        ensure((predicted / 2.0..=predicted * 2.0).contains(&ratio), || {
            format!("per-decade RMSE ratio {ratio:.3}, errors {errors:?}")
        })?;
    }
    Ok(format!(
        "RMSE {:.2e} / {:.2e} / {:.2e}, ratios {:.2}, {:.2}",
        errors[0],
        errors[1],
        errors[2],
        errors[0] / errors[1],
        errors[1] / errors[2]
    ))
}

fn ac8_preparation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = 1 + i % 6;
        let p = random_distribution(&mut rng, n);
        let target = p.amplitudes();
        let norm = target.iter().map(|x| x * x).sum::<f64>().sqrt();
        let target: Vec<f64> = target.into_iter().map(|x| x / norm).collect();
        let prep = Preparation::new(target.clone()).unwrap();
        let mut state = StateVector::zeros(n).unwrap();
        state.apply_preparation(&prep, 0..n, None).unwrap();
        for (a, t) in state.amplitudes().iter().zip(&target) {
            worst = worst.max((a - Complex64::new(*t, 0.0)).norm());
        }
        let once = state.clone();
        state.apply_preparation(&prep, 0..n, None).unwrap();
        state.apply_preparation(&prep, 0..n, None).unwrap();
        for (a, b) in state.amplitudes().iter().zip(once.amplitudes()) {
            worst = worst.max((a - b).norm());
        }
    }
    ensure(worst <= 1e-12, || {
        format!("preparation deviation {worst:e}")
    })?;

    let mut checkpoint = 0.0f64;
    for n in 2..=6 {
        let p = random_distribution(&mut rng, n);
        let q = random_distribution(&mut rng, n);
        let phases = DiagonalHamiltonian::ising_chain(n)
            .unwrap()
            .phase_profile(1.0);
        let spec = CircuitSpec::from_distributions(&p, &q, phases).unwrap();
        let state = spec.prepare_branches().unwrap();
        let half = 1 << n;
        let (sp, sq) = (p.amplitudes(), q.amplitudes());
        for x in 0..half {
            checkpoint = checkpoint
                .max((state.amplitudes()[x] - Complex64::new(sp[x] / SQRT_2, 0.0)).norm());
            checkpoint = checkpoint
                .max((state.amplitudes()[half + x] - Complex64::new(sq[x] / SQRT_2, 0.0)).norm());
        }
    }
    ensure(checkpoint <= 1e-12, || {
        format!("branch-state deviation {checkpoint:e}")
    })?;
    Ok(format!(
        "prep deviation {worst:.1e}, branch-state deviation {checkpoint:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "AC1 validation table (n=3, +-0.01, < 1 s)",
            ac1_validation_table,
        ),
        (
            "AC2 classical limit at alpha=0 (1e-12)",
            ac2_classical_limit,
        ),
        (
            "AC3 circuit vs direct (1e-10, incl. infinity)",
            ac3_dual_path,
        ),
        (
            "AC4 n=5 alpha sweep (1.321 +-0.005, 2.994 +-0.01, monotone)",
            ac4_alpha_sweep,
        ),
        ("AC5 theta sweep endpoints (+-0.15)", ac5_theta_sweep),
        ("AC6 property suites", ac6_properties),
        ("AC7 shot-noise 1/sqrt(shots) scaling", ac7_shot_noise),
        (
            "AC8 preparation round-trip and branch state (1e-12)",
            ac8_preparation,
        ),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "acceptance: {} passed, {failed} failed in {elapsed:?}",
        8 - failed
    );
    if elapsed > Duration::from_secs(60) {
        println!("[FAIL] total runtime {elapsed:?} exceeds 60 s");
        failed += 1;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
