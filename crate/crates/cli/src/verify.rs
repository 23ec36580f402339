//! Self-checks runnable from the command line. Each suite compares a
//! computation against an independent reference and records the worst
//! deviation seen.

use cvtda_core::cvsim::{exact_conjugation, trace_distance};
use cvtda_core::homology::{boundary_matrices, chain_complex_holds, verify_dirac_square};
use cvtda_core::statevector::{diffusion, grover_success_closed_form, phase_flip, uniform_state};
use cvtda_core::{
    appendix_sweep, derive_distance_operator, enumerate_vr, pairwise_sq_distances, trotterized_evolution,
    PointCloud, SweepConfig, TrotterParams,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::pipeline::{RunReport, SuiteResult};

pub const SUITES: [&str; 6] = [
    "chain-complex",
    "dirac-square",
    "distance-operator",
    "grover",
    "trotter",
    "appendix",
];

pub const CHAIN_CLOUDS: usize = 100;
pub const CHAIN_MAX_POINTS: usize = 10;
pub const DISTANCE_CLOUDS: usize = 50;
pub const DISTANCE_TOL: f64 = 1e-10;
pub const GROVER_MAX_QUBITS: usize = 10;
pub const GROVER_MAX_ITERATIONS: usize = 20;
pub const GROVER_TOL: f64 = 1e-10;
/// `(δt, δt/2)` pairs, one per decade.
pub const TROTTER_STEPS: [(f64, f64); 3] = [(1e-1, 5e-2), (1e-2, 5e-3), (1e-3, 5e-4)];
pub const TROTTER_RATIO_TOL: f64 = 0.3;
const MAX_NOTES: usize = 10;

struct Tally {
    name: &'static str,
    checks: usize,
    failures: usize,
    max_deviation: f64,
    tolerance: f64,
    notes: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            checks: 0,
            failures: 0,
            max_deviation: 0.0,
            tolerance,
            notes: Vec::new(),
        }
    }

    /// Record a deviation that must stay within tolerance.
    fn within(&mut self, deviation: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        self.max_deviation = self.max_deviation.max(deviation);
        if !(deviation <= self.tolerance) {
            self.fail(what());
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, note: String) {
        self.failures += 1;
        if self.notes.len() < MAX_NOTES {
            self.notes.push(note);
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.into(),
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            max_deviation: self.max_deviation,
            tolerance: self.tolerance,
            notes: self.notes,
        }
    }
}

/// Uniform coordinates in `[-1, 1]^d` with `n ∈ 1..=max_n`, `d ∈ 1..=max_d`.
pub fn random_cloud(rng: &mut ChaCha8Rng, max_n: usize, max_d: usize) -> PointCloud {
    let n = rng.random_range(1..=max_n);
    let d = rng.random_range(1..=max_d);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    PointCloud::from_rows(&rows).expect("finite rows")
}

pub fn run_suite(name: &str, seed: u64) -> CliResult<SuiteResult> {
    match name {
        "chain-complex" => chain_complex(seed),
        "dirac-square" => dirac_square(seed),
        "distance-operator" => distance_operator(seed),
        "grover" => Ok(grover()),
        "trotter" => trotter(),
        "appendix" => appendix(),
        other => Err(CliError::Usage(format!(
            "unknown suite {other}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

/// Run every suite (or those named) and fold them into a report.
pub fn run_verification(cfg: &RunConfig, only: &[String]) -> CliResult<RunReport> {
    let names: Vec<&str> = if only.is_empty() {
        SUITES.to_vec()
    } else {
        only.iter().map(String::as_str).collect()
    };
    let suites = names
        .iter()
        .map(|name| run_suite(name, cfg.seed))
        .collect::<CliResult<Vec<_>>>()?;
    let passed = suites.iter().all(|s| s.passed);
    Ok(RunReport {
        config: cfg.clone(),
        points: 0,
        ambient_dim: 0,
        scales: Vec::new(),
        records: Vec::new(),
        suites,
        passed,
    })
}

fn chain_complex(seed: u64) -> CliResult<SuiteResult> {
    let mut t = Tally::new("chain-complex", 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..CHAIN_CLOUDS {
        let pc = random_cloud(&mut rng, CHAIN_MAX_POINTS, 3);
        let eps = rng.random_range(0.0..2.5);
        let vr = enumerate_vr(&pairwise_sq_distances(&pc), eps, pc.n() - 1)
            .map_err(CliError::core("chain-complex enumeration"))?;
        let bs = boundary_matrices(&vr);
        for pair in bs.windows(2) {
            let dev = pair[0].matrix.matmul(&pair[1].matrix).inf_norm() as f64;
            t.within(dev, || format!("cloud {trial}: ∂_{}∂_{} has entry {dev}", pair[0].k, pair[1].k));
        }
    }

    // Mutation control: a single flipped sign in a filled triangle must be caught.
    let tri = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]]).expect("valid");
    let vr = enumerate_vr(&pairwise_sq_distances(&tri), 1.5, 2).map_err(CliError::core("triangle"))?;
    let mut bs = boundary_matrices(&vr);
    t.check(chain_complex_holds(&bs), || "unmutated triangle fails".into());
    let last = bs.len() - 1;
    bs[last] = bs[last].with_flipped_sign(0, 0);
    t.check(!chain_complex_holds(&bs), || "flipped sign went undetected".into());
    Ok(t.finish())
}

fn dirac_square(seed: u64) -> CliResult<SuiteResult> {
    let mut t = Tally::new("dirac-square", 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for trial in 0..CHAIN_CLOUDS {
        let pc = random_cloud(&mut rng, CHAIN_MAX_POINTS, 3);
        let eps = rng.random_range(0.0..2.5);
        let vr = enumerate_vr(&pairwise_sq_distances(&pc), eps, pc.n() - 1)
            .map_err(CliError::core("dirac-square enumeration"))?;
        t.check(verify_dirac_square(&vr), || format!("cloud {trial}: B² is not block diagonal Δ"));
    }
    Ok(t.finish())
}

fn distance_operator(seed: u64) -> CliResult<SuiteResult> {
    let mut t = Tally::new("distance-operator", DISTANCE_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    for trial in 0..DISTANCE_CLOUDS {
        let pc = random_cloud(&mut rng, 8, 4);
        let out = derive_distance_operator(&pc).map_err(CliError::core("distance protocol"))?;
        let dev = out.operator.max_abs_diff(&pairwise_sq_distances(&pc));
        t.within(dev, || format!("cloud {trial}: deviation {dev:e}"));
        t.within(out.max_off_diagonal, || format!("cloud {trial}: coherence {:e}", out.max_off_diagonal));
    }
    Ok(t.finish())
}

/// Every `n ≤ 10`, every marked count, `r ≤ 20`, iterated one step at a time.
fn grover() -> SuiteResult {
    let jobs: Vec<(usize, usize)> = (1..=GROVER_MAX_QUBITS)
        .flat_map(|n| (1..=1usize << n).map(move |m| (n, m)))
        .collect();
    let worst: Vec<(usize, usize, usize, f64)> = jobs
        .par_iter()
        .map(|&(n, m)| {
            let total = 1usize << n;
            let mask: Vec<bool> = (0..total).map(|y| y < m).collect();
            let mut state = uniform_state(n).expect("n within range");
            let mut worst = (n, m, 0, 0.0);
            for r in 0..=GROVER_MAX_ITERATIONS {
                let p = state.probability_where(|y| mask[y]);
                let dev = (p - grover_success_closed_form(total, m, r)).abs();
                if dev > worst.3 {
                    worst = (n, m, r, dev);
                }
                state = diffusion(&phase_flip(&state, &mask).expect("mask length"));
            }
            worst
        })
        .collect();
    let mut t = Tally::new("grover", GROVER_TOL);
    for (n, m, r, dev) in worst {
        t.within(dev, || format!("n={n} M={m} r={r}: deviation {dev:e}"));
    }
    t.finish()
}

/// Hermitian, positive-trace generators for the Trotter check.
pub fn trotter_generators() -> Vec<(&'static str, DMatrix<Complex64>)> {
    let c = Complex64::new;
    let two = DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.2, -0.1), c(0.2, 0.1), c(0.3, 0.0)]);
    let four = DMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            c(0.1 + 0.1 * i as f64, 0.0)
        } else {
            c(0.03 * (i + j) as f64, 0.02 * (i as f64 - j as f64))
        }
    });
    vec![("2x2", two), ("4x4", four)]
}

pub fn trotter_probe(d: usize) -> DMatrix<Complex64> {
    // A pure state |ψ⟩⟨ψ| with ψ ∝ (1, i, 1, ...).
    let psi: Vec<Complex64> = (0..d)
        .map(|i| if i % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) })
        .collect();
    DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / d as f64)
}

/// Trace-distance error of the Trotterized evolution at step `dt`.
pub fn trotter_error(rho: &DMatrix<Complex64>, a: &DMatrix<Complex64>, dt: f64, total_t: f64) -> CliResult<f64> {
    let p = TrotterParams {
        delta_t: dt,
        p_r: 1.0,
        total_t,
    };
    let out = trotterized_evolution(rho, a, &p).map_err(CliError::core("Trotter evolution"))?;
    Ok(trace_distance(&out.rho, &exact_conjugation(rho, a, 1.0, out.effective_t)))
}

/// Halving δt halves the error: the ratio must be `2 ± 0.3` at each decade.
fn trotter() -> CliResult<SuiteResult> {
    let mut t = Tally::new("trotter", TROTTER_RATIO_TOL);
    for (label, a) in trotter_generators() {
        let rho = trotter_probe(a.nrows());
        for (dt, half) in TROTTER_STEPS {
            let ratio = trotter_error(&rho, &a, dt, 1.0)? / trotter_error(&rho, &a, half, 1.0)?;
            t.within((ratio - 2.0).abs(), || format!("{label} at δt={dt}: ratio {ratio:.4}"));
        }
    }
    Ok(t.finish())
}

fn appendix() -> CliResult<SuiteResult> {
    let report = appendix_sweep(&SweepConfig::default()).map_err(CliError::core("dual-rail sweep"))?;
    let mut t = Tally::new("appendix", SweepConfig::default().tolerance);
    for c in &report.checks {
        t.check(c.passed, || {
            format!("{} (n_max {}): {:e} vs {:e}", c.name, c.n_max, c.value, c.threshold)
        });
    }
    t.max_deviation = report.max_deviation;
    Ok(t.finish())
}
