//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Oracles here are written independently of the library.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cvtda_cli::fixtures::{self, Fixture};
use cvtda_cli::verify::{run_suite, trotter_error, trotter_generators, trotter_probe, TROTTER_STEPS};
use cvtda_cli::{run_pipeline_on, RunConfig};
use cvtda_core::cvsim::{Peak, QGrid};
use cvtda_core::fockgates::{exp_cond_swap, DualRailLayout, FockState};
use cvtda_core::homology::betti_by_rank;
use cvtda_core::{
    dirac_operator, eigendecompose, pairwise_sq_distances, DualRailQubit, PointCloud, SpectralDistribution,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within_time(o: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    let ok = elapsed < limit;
    outcome(
        o.passed && ok,
        format!("{}; {:.2}s (limit {}s)", o.detail, elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn suite(name: &str) -> Outcome {
    match run_suite(name, 0) {
        Ok(r) => outcome(
            r.passed,
            format!(
                "{} checks, {} failures, max deviation {:e}{}",
                r.checks,
                r.failures,
                r.max_deviation,
                r.notes.first().map(|n| format!("; first failure: {n}")).unwrap_or_default()
            ),
        ),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

// ---- criterion 3 oracle: brute-force complex, rank mod a prime ----

const PRIME: i64 = 1_000_000_007;

fn brute_levels(pc: &PointCloud, eps: f64) -> Vec<Vec<u32>> {
    let n = pc.n();
    let close = |i: usize, j: usize| {
        let d2: f64 = pc.row(i).iter().zip(pc.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
        d2.sqrt() <= eps
    };
    let mut levels = vec![Vec::new(); n];
    for w in 1u32..(1 << n) {
        let vs: Vec<usize> = (0..n).filter(|&i| w >> i & 1 == 1).collect();
        if vs.iter().enumerate().all(|(a, &i)| vs[a + 1..].iter().all(|&j| close(i, j))) {
            levels[vs.len() - 1].push(w);
        }
    }
    levels
}

/// Rows: (k−1)-simplices, columns: k-simplices; sign (−1)^position.
fn brute_boundary(levels: &[Vec<u32>], k: usize) -> Vec<Vec<i64>> {
    let (rows, cols) = (&levels[k - 1], &levels[k]);
    let mut m = vec![vec![0i64; cols.len()]; rows.len()];
    for (c, &s) in cols.iter().enumerate() {
        let mut pos = 0;
        for v in 0..32 {
            if s >> v & 1 == 1 {
                let face = s & !(1 << v);
                let r = rows.iter().position(|&f| f == face).expect("closed under faces");
                m[r][c] = if pos % 2 == 0 { 1 } else { -1 };
                pos += 1;
            }
        }
    }
    m
}

fn pow_mod(mut b: i64, mut e: i64) -> i64 {
    let mut r = 1;
    b = b.rem_euclid(PRIME);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    r
}

fn rank_mod_p(mut m: Vec<Vec<i64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c].rem_euclid(PRIME) != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = pow_mod(m[rank][c], PRIME - 2);
        for r in 0..rows {
            if r != rank && m[r][c].rem_euclid(PRIME) != 0 {
                let f = m[r][c] * inv % PRIME;
                for j in 0..cols {
                    m[r][j] = (m[r][j] - f * m[rank][j]).rem_euclid(PRIME);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn oracle_betti(pc: &PointCloud, eps: f64, k: usize) -> usize {
    let levels = brute_levels(pc, eps);
    if k >= levels.len() {
        return 0;
    }
    let rank = |j: usize| {
        if j == 0 || j >= levels.len() {
            0
        } else {
            rank_mod_p(brute_boundary(&levels, j))
        }
    };
    levels[k].len() - rank(k) - rank(k + 1)
}

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    for Fixture { name, cloud, epsilon, betti } in fixtures::all() {
        let dm = pairwise_sq_distances(&cloud);
        let vr = cvtda_core::enumerate_vr(&dm, epsilon, cloud.n() - 1).expect("enumerate");
        let eig = eigendecompose(&dirac_operator(&vr), 1.0).expect("eigen");
        for (k, &want) in betti.iter().enumerate() {
            let oracle = oracle_betti(&cloud, epsilon, k);
            let kernel = if k < cloud.n() { eig.kernel_count_in_sector(k) } else { 0 };
            let rank = if k < cloud.n() { betti_by_rank(&vr, k).expect("rank") } else { 0 };
            if oracle != want || kernel != want || rank != want {
                bad.push(format!("{name} k={k}: oracle {oracle}, kernel {kernel}, rank {rank}, known {want}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() { "4 fixtures, kernel = rank = oracle = known".into() } else { bad.join("; ") },
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for f in fixtures::all() {
        let cfg = RunConfig {
            epsilons: Some(vec![f.epsilon]),
            kmax: 3,
            ..RunConfig::default()
        };
        let run = match run_pipeline_on(&cfg, &f.cloud) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{}: {e}", f.name)),
        };
        for r in &run.report.records {
            let want = f.betti.get(r.k).copied().unwrap_or(0) as f64;
            let err = (r.beta_estimate_mixed - want).abs();
            worst = worst.max(err);
            if err > 0.05 {
                bad.push(format!("{} k={}: {:.4} vs {want}", f.name, r.k, r.beta_estimate_mixed));
            }
        }
    }
    outcome(bad.is_empty(), format!("max |error| {worst:.2e} (tolerance 0.05){}", if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }))
}

/// Equal-weight peaks at `±x/2` with `γ = s = 1`, so `γ√s·δλ = x`.
fn bimodal(x: f64) -> bool {
    let s = 1.0;
    let sigma = 1.0 / (2.0 * s as f64).sqrt();
    let half = x / 2.0;
    let grid = QGrid {
        min: -half - 8.0 * sigma,
        max: half + 8.0 * sigma,
        step: sigma / 200.0,
    };
    let peaks = vec![
        Peak { center: -half, weight: 0.5 },
        Peak { center: half, weight: 0.5 },
    ];
    SpectralDistribution::from_peaks(peaks, s, &grid).expect("valid grid").count_modes() >= 2
}

fn criterion_5() -> Outcome {
    let (mut lo, mut hi) = (0.5, 4.0);
    assert!(!bimodal(lo) && bimodal(hi));
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if bimodal(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let threshold = 0.5 * (lo + hi);
    let below_ok = !bimodal(1.8);
    let above_ok = bimodal(2.2);
    outcome(
        (threshold - 2.0).abs() <= 0.2 && below_ok && above_ok,
        format!(
            "measured threshold γ√s·δλ = {threshold:.6} (√2 = {:.6}), required 2 ± 0.2; unimodal at 1.8: {below_ok}",
            2f64.sqrt()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut ratios = Vec::new();
    let mut ok = true;
    for (label, a) in trotter_generators() {
        let rho = trotter_probe(a.nrows());
        for (dt, half) in TROTTER_STEPS {
            let r = trotter_error(&rho, &a, dt, 1.0).and_then(|e| Ok(e / trotter_error(&rho, &a, half, 1.0)?));
            match r {
                Ok(r) => {
                    ok &= (r - 2.0).abs() <= 0.3;
                    ratios.push(format!("{label}@{dt}: {r:.3}"));
                }
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    outcome(ok, ratios.join(", "))
}

fn criterion_8() -> Outcome {
    let n_max = 2;
    let mut worst: f64 = 0.0;
    let mut min_purity: f64 = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t_values = [0.0, 0.3, -0.3, 0.7, -0.7, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, 1.5, -1.5];
    for pairs in [1usize, 2] {
        let layout = DualRailLayout::new(2 * pairs, true, n_max).expect("layout");
        let anc = layout.ancilla.expect("ancilla");
        let data = layout.qubits.clone();
        let pq: Vec<(DualRailQubit, DualRailQubit)> = (0..pairs).map(|p| (data[2 * p], data[2 * p + 1])).collect();
        let all = layout.all_qubits();
        let bits = data.len();
        // S exchanges qubit 2p with 2p+1; qubit 0 is the most significant bit.
        let swap = |x: usize| {
            let mut y = 0;
            for q in 0..bits {
                let partner = q ^ 1;
                let bit = x >> (bits - 1 - partner) & 1;
                y |= bit << (bits - 1 - q);
            }
            y
        };
        for &t in &t_values {
            let g = exp_cond_swap(t, &pq, anc, layout.space).expect("circuit");
            let (s, c) = t.sin_cos();
            for x in 0..1usize << bits {
                let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (bits + 1)];
                amps[x << 1] = Complex64::new(1.0, 0.0);
                let input = FockState::logical(layout.space, &all, &amps).expect("input");
                let out = g.apply(&input).expect("apply");
                for y in 0..1usize << bits {
                    let mut want = Complex64::new(0.0, 0.0);
                    if y == x {
                        want += c;
                    }
                    if y == swap(x) {
                        want += Complex64::new(0.0, s);
                    }
                    let got = out.amplitude(layout.space.logical_index(&all, y << 1));
                    worst = worst.max((got - want).norm());
                }
            }
            // Random data input, ancilla in |0⟩: ancilla must come out pure.
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (bits + 1)];
            for x in 0..1usize << bits {
                amps[x << 1] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            let input = FockState::logical(layout.space, &all, &amps).expect("input");
            let out = g.apply(&input).expect("apply");
            let rho = out.reduced_density(&anc.modes());
            min_purity = min_purity.min((&rho * &rho).trace().re);
        }
    }
    outcome(
        worst <= 1e-10 && min_purity >= 1.0 - 1e-10,
        format!("max deviation {worst:.2e}, min ancilla purity 1 - {:.2e}, n_max 2, 1 and 2 pairs", 1.0 - min_purity),
    )
}

fn criterion_10() -> Outcome {
    let f = fixtures::circle8();
    let cfg = RunConfig {
        epsilons: Some(vec![f.epsilon]),
        kmax: 3,
        ..RunConfig::default()
    };
    let run = match run_pipeline_on(&cfg, &f.cloud) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let json: serde_json::Value = serde_json::to_value(&run.report).expect("serialize");
    let rows = json["records"].as_array().cloned().unwrap_or_default();
    let both = !rows.is_empty()
        && rows
            .iter()
            .all(|r| r["beta_estimate_mixed"].is_number() && r["beta_estimate_pure"].is_number());
    let gap = run
        .report
        .records
        .iter()
        .map(|r| (r.k, r.beta_estimate_mixed, r.beta_estimate_pure))
        .max_by(|a, b| (a.1 - a.2).abs().total_cmp(&(b.1 - b.2).abs()))
        .expect("records");
    outcome(
        both && (gap.1 - gap.2).abs() > 0.05,
        format!(
            "both estimates in every row: {both}; 8-point circle k={}: mixed {:.4}, pure {:.4}",
            gap.0, gap.1, gap.2
        ),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 chain-complex", Box::new(|| {
            let t = Instant::now();
            let o = suite("chain-complex");
            within_time(o, t.elapsed(), Duration::from_secs(10))
        })),
        ("2 dirac-square", Box::new(|| suite("dirac-square"))),
        ("3 betti-ground-truth", Box::new(|| {
            let t = Instant::now();
            let o = criterion_3();
            within_time(o, t.elapsed(), Duration::from_secs(30))
        })),
        ("4 cv-estimation-fidelity", Box::new(criterion_4)),
        ("5 peak-resolution", Box::new(criterion_5)),
        ("6 grover-closed-form", Box::new(|| {
            let t = Instant::now();
            let o = suite("grover");
            within_time(o, t.elapsed(), Duration::from_secs(5))
        })),
        ("7 trotter-convergence", Box::new(criterion_7)),
        ("8 exp-swap-circuit", Box::new(criterion_8)),
        ("9 distance-operator", Box::new(|| suite("distance-operator"))),
        ("10 pure-vs-mixed", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let o = check();
        println!("criterion {name}: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
