use std::time::Instant;

use cvtda_core::cvsim::sector_distribution;
use cvtda_core::homology::euler_characteristic;
use cvtda_core::statevector::uniform_state;
use cvtda_core::{
    betti_exact, dirac_operator, eigendecompose, enumerate_vr, estimate_betti, grover_amplify,
    load_point_cloud, normalize_to_unit_sphere, pairwise_sq_distances, sample_homodyne,
    DistanceMatrix, EstimationMode, Iterations, PhaseEstimationParams, PointCloud,
    SpectralDistribution,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Per-scale summary of the complex and the parameters used on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub epsilon: f64,
    pub simplex_counts: Vec<usize>,
    pub euler_characteristic: i64,
    pub spectral_radius: f64,
    pub smallest_nonzero: Option<f64>,
    pub params: PhaseEstimationParams,
}

/// One `(ε, k)` row of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiRecord {
    pub epsilon: f64,
    pub k: usize,
    pub simplices: usize,
    pub beta_exact: usize,
    /// Estimate in the configured mode.
    pub beta_estimate: f64,
    pub beta_estimate_mixed: f64,
    pub beta_estimate_pure: f64,
    pub zero_peak_mass_mixed: f64,
    pub zero_peak_mass_pure: f64,
    /// Kernel dimension of the shifted operator restricted to the sector.
    pub kernel_count: usize,
    pub kernel_matches_exact: bool,
    pub window: f64,
    pub resolution_warning: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grover_success: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grover_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta_estimate_sampled: Option<f64>,
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

/// Deterministic run report: nothing in here depends on timing or threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub points: usize,
    pub ambient_dim: usize,
    pub scales: Vec<ScaleRecord>,
    pub records: Vec<BettiRecord>,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub load_ms: f64,
    pub scales_ms: Vec<(f64, f64)>,
    pub total_ms: f64,
}

/// Report plus the sector densities and wall-clock timings.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: RunReport,
    pub distributions: Vec<(f64, usize, SpectralDistribution)>,
    pub timing: Timing,
}

pub fn load_input(cfg: &RunConfig) -> CliResult<PointCloud> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("no input file given".into()))?;
    let cloud = load_point_cloud(path, cfg.resolved_format()?)
        .map_err(CliError::core(format!("loading {}", path.display())))?;
    if cfg.normalize {
        normalize_to_unit_sphere(&cloud).map_err(CliError::core("normalizing"))
    } else {
        Ok(cloud)
    }
}

/// Load the configured input and run the sweep.
pub fn run_pipeline(cfg: &RunConfig) -> CliResult<PipelineRun> {
    let start = Instant::now();
    let cloud = load_input(cfg)?;
    let load_ms = ms(start);
    let mut run = run_pipeline_on(cfg, &cloud)?;
    run.timing.load_ms = load_ms;
    run.timing.total_ms = ms(start);
    Ok(run)
}

/// Run the sweep on an already loaded cloud. `cfg.normalize` is ignored here.
pub fn run_pipeline_on(cfg: &RunConfig, cloud: &PointCloud) -> CliResult<PipelineRun> {
    let start = Instant::now();
    let epsilons = cfg.epsilon_grid()?;
    let dm = pairwise_sq_distances(cloud);

    let job = |(index, &eps): (usize, &f64)| -> CliResult<(ScaleOutput, f64)> {
        let t = Instant::now();
        let out = analyze_scale(cfg, &dm, eps, index)?;
        Ok((out, ms(t)))
    };
    let results: Vec<CliResult<(ScaleOutput, f64)>> = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(|| epsilons.par_iter().enumerate().map(job).collect()),
        None => epsilons.par_iter().enumerate().map(job).collect(),
    };

    let mut scales = Vec::new();
    let mut records = Vec::new();
    let mut distributions = Vec::new();
    let mut scales_ms = Vec::new();
    for r in results {
        let (out, elapsed) = r?;
        scales_ms.push((out.scale.epsilon, elapsed));
        scales.push(out.scale);
        records.extend(out.records);
        distributions.extend(out.distributions);
    }
    let report = RunReport {
        config: cfg.clone(),
        points: cloud.n(),
        ambient_dim: cloud.d(),
        scales,
        records,
        suites: Vec::new(),
        passed: true,
    };
    Ok(PipelineRun {
        report,
        distributions,
        timing: Timing {
            load_ms: 0.0,
            scales_ms,
            total_ms: ms(start),
        },
    })
}

struct ScaleOutput {
    scale: ScaleRecord,
    records: Vec<BettiRecord>,
    distributions: Vec<(f64, usize, SpectralDistribution)>,
}

fn analyze_scale(cfg: &RunConfig, dm: &DistanceMatrix, eps: f64, index: usize) -> CliResult<ScaleOutput> {
    let n = dm.n();
    let ctx = |what: &str| format!("epsilon {eps}: {what}");
    // The up-term of level kmax needs level kmax + 1.
    let top = (cfg.kmax + 1).min(n - 1);
    let vr = enumerate_vr(dm, eps, top).map_err(CliError::core(ctx("enumeration")))?;
    let eig = eigendecompose(&dirac_operator(&vr), cfg.alpha()).map_err(CliError::core(ctx("eigendecomposition")))?;
    let mut params = PhaseEstimationParams::auto_with(&eig, cfg.s, cfg.gamma, cfg.window);
    params.alpha = cfg.alpha();
    params.validate().map_err(CliError::core(ctx("phase estimation parameters")))?;

    let mut records = Vec::new();
    let mut distributions = Vec::new();
    for k in 0..=cfg.kmax {
        if k >= n || k > vr.top_level() {
            records.push(empty_record(eps, k, &params));
            continue;
        }
        let kctx = |what: &str| format!("epsilon {eps}, k {k}: {what}");
        let exact = betti_exact(&vr, k).map_err(CliError::core(kctx("exact Betti number")))?;
        let mixed = estimate_betti(&eig, &vr, k, EstimationMode::Mixed, &params)
            .map_err(CliError::core(kctx("mixed estimate")))?;
        let pure = estimate_betti(&eig, &vr, k, EstimationMode::Pure, &params)
            .map_err(CliError::core(kctx("pure estimate")))?;
        let kernel_count = eig.kernel_count_in_sector(k);

        let (grover_success, grover_iterations) = if cfg.grover && vr.count(k) > 0 {
            let start = uniform_state(n).map_err(CliError::core(kctx("uniform state")))?;
            let g = grover_amplify(&start, &vr, k, Iterations::Auto)
                .map_err(CliError::core(kctx("Grover amplification")))?;
            (Some(g.success_probability), Some(g.iterations))
        } else {
            (None, None)
        };

        let dist = sector_distribution(&eig, &vr, k, cfg.mode, &params)
            .map_err(CliError::core(kctx("homodyne density")))?;
        let beta_estimate_sampled = match (&dist, cfg.samples) {
            (Some(d), count) if count > 0 => {
                let seed = cfg.seed ^ ((index as u64) << 16) ^ k as u64;
                let draws = sample_homodyne(d, count, seed).map_err(CliError::core(kctx("sampling")))?;
                let center = params.gamma * params.alpha;
                let hits = draws.iter().filter(|q| (*q - center).abs() <= params.window).count();
                Some(hits as f64 / count as f64 * vr.count(k) as f64)
            }
            _ => None,
        };
        if let Some(d) = dist {
            distributions.push((eps, k, d));
        }

        records.push(BettiRecord {
            epsilon: eps,
            k,
            simplices: vr.count(k),
            beta_exact: exact,
            beta_estimate: match cfg.mode {
                EstimationMode::Mixed => mixed.estimate,
                EstimationMode::Pure => pure.estimate,
            },
            beta_estimate_mixed: mixed.estimate,
            beta_estimate_pure: pure.estimate,
            zero_peak_mass_mixed: mixed.mass,
            zero_peak_mass_pure: pure.mass,
            kernel_count,
            kernel_matches_exact: kernel_count == exact,
            window: params.window,
            resolution_warning: mixed.resolution_warning,
            grover_success,
            grover_iterations,
            beta_estimate_sampled,
        });
    }

    Ok(ScaleOutput {
        scale: ScaleRecord {
            epsilon: eps,
            simplex_counts: vr.counts(),
            euler_characteristic: euler_characteristic(&vr),
            spectral_radius: eig.spectral_radius(),
            smallest_nonzero: eig.smallest_nonzero(),
            params,
        },
        records,
        distributions,
    })
}

/// `k ≥ n`: no simplices, everything is zero.
fn empty_record(eps: f64, k: usize, params: &PhaseEstimationParams) -> BettiRecord {
    BettiRecord {
        epsilon: eps,
        k,
        simplices: 0,
        beta_exact: 0,
        beta_estimate: 0.0,
        beta_estimate_mixed: 0.0,
        beta_estimate_pure: 0.0,
        zero_peak_mass_mixed: 0.0,
        zero_peak_mass_pure: 0.0,
        kernel_count: 0,
        kernel_matches_exact: true,
        window: params.window,
        resolution_warning: false,
        grover_success: None,
        grover_iterations: None,
        beta_estimate_sampled: None,
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}
