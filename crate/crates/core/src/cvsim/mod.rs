//! Continuous-variable phase estimation on the Dirac operator.
//!
//! A squeezed resource qumode coupled through `e^{iγ p_R (B + αI)}` and read
//! out by homodyne detection of `q_R` produces the density
//!
//! ```text
//! P(q_R) = Σ_i |a_i|² √(s/π) exp(−s (γ λ_i − q_R)²)
//! ```
//!
//! where `λ_i` are the eigenvalues of `B + αI` and `a_i` the overlaps of the
//! input state with its eigenvectors. The kernel of `B` is the direct sum of
//! the Laplacian kernels, so the mass of the peak at `γα` measured on sector
//! `k` estimates `β_k`. The density is evaluated analytically; homodyne
//! sampling is available for distributional checks.

mod trotter;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::complex::VietorisRipsComplex;
use crate::error::{Error, Result};
use crate::homology::DiracOperator;

pub use trotter::{
    exact_conjugation, exp_swap_step, hermitian_exp, kron, partial_trace_second, swap_operator,
    trace_distance, trotterized_evolution, validate_density, TrotterOutcome, TrotterParams,
};

/// Symmetry tolerance accepted by [`eigendecompose_matrix`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative tolerance for classifying an eigenvalue of `B` as zero.
pub const KERNEL_RTOL: f64 = 1e-8;

/// Default shift `α`.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Standard deviations (of the kernel peak) that fit inside the auto window.
const AUTO_WINDOW_SIGMAS: f64 = 8.0;

/// Grid points per standard deviation for the auto grid.
const AUTO_POINTS_PER_SIGMA: f64 = 10.0;

/// Refuse grids larger than this many points.
pub const MAX_GRID_POINTS: usize = 5_000_000;

/// Spectrum of `B + αI` with orthonormal eigenvectors, ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub alpha: f64,
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
    /// Sector boundaries of the underlying operator, as in [`DiracOperator::offsets`].
    pub offsets: Vec<usize>,
    /// `sector_weights[i][k]` is the squared norm of eigenvector `i` on sector `k`.
    pub sector_weights: Vec<Vec<f64>>,
    /// `‖B‖_∞` of the unshifted operator, used for tolerances.
    pub operator_norm: f64,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn sectors(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Eigenvalues of `B` itself, `λ_i − α`.
    pub fn unshifted(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().map(move |l| l - self.alpha)
    }

    pub fn kernel_tolerance(&self) -> f64 {
        KERNEL_RTOL * self.operator_norm.max(1.0)
    }

    pub fn is_kernel(&self, i: usize) -> bool {
        (self.eigenvalues[i] - self.alpha).abs() < self.kernel_tolerance()
    }

    /// Total count of eigenvalues equal to `α`.
    pub fn kernel_count(&self) -> usize {
        (0..self.dim()).filter(|&i| self.is_kernel(i)).count()
    }

    /// Dimension of the kernel restricted to sector `k`, i.e. the trace of the
    /// kernel projector over that sector. Independent of how a degenerate
    /// kernel basis is rotated.
    pub fn kernel_count_in_sector(&self, k: usize) -> usize {
        let trace: f64 = (0..self.dim())
            .filter(|&i| self.is_kernel(i))
            .map(|i| self.sector_weights[i][k])
            .sum();
        trace.round() as usize
    }

    /// Largest `|B|` eigenvalue (spectral radius of the unshifted operator).
    pub fn spectral_radius(&self) -> f64 {
        self.unshifted().map(f64::abs).fold(0.0, f64::max)
    }

    /// Smallest non-zero `|B|` eigenvalue, if any.
    pub fn smallest_nonzero(&self) -> Option<f64> {
        let tol = self.kernel_tolerance();
        self.unshifted()
            .map(f64::abs)
            .filter(|&v| v >= tol)
            .min_by(f64::total_cmp)
    }

    /// `max_i ‖(B+αI) e_i − λ_i e_i‖`.
    pub fn max_residual(&self, b: &DMatrix<f64>) -> f64 {
        let shifted = b + DMatrix::<f64>::identity(b.nrows(), b.ncols()) * self.alpha;
        (0..self.dim())
            .map(|i| {
                let v = self.eigenvectors.column(i);
                (&shifted * v - v * self.eigenvalues[i]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `‖VᵀV − I‖_max`.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.eigenvectors.transpose() * &self.eigenvectors;
        (g - DMatrix::<f64>::identity(self.dim(), self.dim())).amax()
    }
}

/// Full symmetric eigendecomposition of `B + αI`.
pub fn eigendecompose(b: &DiracOperator, alpha: f64) -> Result<EigenDecomposition> {
    eigendecompose_matrix(&b.matrix.to_dense(), alpha, b.offsets.clone())
}

/// As [`eigendecompose`] for an arbitrary real matrix with the given sector layout.
pub fn eigendecompose_matrix(
    b: &DMatrix<f64>,
    alpha: f64,
    offsets: Vec<usize>,
) -> Result<EigenDecomposition> {
    if !b.is_square() {
        return Err(Error::Argument(format!(
            "operator is {}×{}",
            b.nrows(),
            b.ncols()
        )));
    }
    if offsets.first() != Some(&0) || offsets.last() != Some(&b.nrows()) {
        return Err(Error::Ordering(format!(
            "sector offsets {offsets:?} do not cover dimension {}",
            b.nrows()
        )));
    }
    let asym = (b - b.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let dim = b.nrows();
    let operator_norm = b
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let shifted = b + DMatrix::<f64>::identity(dim, dim) * alpha;
    let eig = SymmetricEigen::new(shifted);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);

    let sector_weights = (0..dim)
        .map(|i| {
            offsets
                .windows(2)
                .map(|w| (w[0]..w[1]).map(|r| eigenvectors[(r, i)].powi(2)).sum())
                .collect()
        })
        .collect();

    Ok(EigenDecomposition {
        alpha,
        eigenvalues,
        eigenvectors,
        offsets,
        sector_weights,
        operator_norm,
    })
}

/// Evaluation grid for `q_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl QGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.max > self.min) {
            return Err(Error::Argument(format!("bad q grid {self:?}")));
        }
        let count = ((self.max - self.min) / self.step).floor() as usize + 1;
        if count > MAX_GRID_POINTS {
            return Err(Error::Argument(format!(
                "q grid would have {count} points (limit {MAX_GRID_POINTS})"
            )));
        }
        Ok((0..count).map(|i| self.min + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimationParams {
    /// Squeezing; the conditional variance of `q_R` is `1/(2s)`.
    pub s: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// Half-width of the integration window around `γα`.
    pub window: f64,
    pub grid: QGrid,
}

impl PhaseEstimationParams {
    /// Standard deviation of each peak in `q_R`.
    pub fn peak_sigma(&self) -> f64 {
        (2.0 * self.s).sqrt().recip()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) || !(self.gamma > 0.0) || !(self.window > 0.0) || !self.alpha.is_finite()
        {
            return Err(Error::Argument(format!(
                "phase-estimation parameters need s, gamma, window > 0: {self:?}"
            )));
        }
        self.grid.points().map(|_| ())
    }

    /// Defaults derived from the spectrum: `γ = 1/(α + ρ(B))`, window a
    /// quarter of the scaled smallest non-zero gap, `s` so the kernel peak
    /// fits eight standard deviations inside the window, and a grid covering
    /// all peaks at ten points per standard deviation.
    pub fn auto(eig: &EigenDecomposition) -> PhaseEstimationParams {
        let alpha = eig.alpha;
        let radius = eig.spectral_radius();
        let gamma = (alpha.abs() + radius).max(f64::MIN_POSITIVE).recip();
        let gap = eig.smallest_nonzero().unwrap_or(1.0);
        let window = 0.25 * gamma * gap;
        let s = 0.5 * (AUTO_WINDOW_SIGMAS / window).powi(2);
        let sigma = (2.0 * s).sqrt().recip();
        let grid = QGrid {
            min: gamma * (alpha - radius) - 8.0 * sigma,
            max: gamma * (alpha + radius) + 8.0 * sigma,
            step: sigma / AUTO_POINTS_PER_SIGMA,
        };
        PhaseEstimationParams {
            s,
            gamma,
            alpha,
            window,
            grid,
        }
    }

    /// Auto parameters with any explicitly given field replacing the default.
    /// Changing `s` also rescales the auto grid step.
    pub fn auto_with(
        eig: &EigenDecomposition,
        s: Option<f64>,
        gamma: Option<f64>,
        window: Option<f64>,
    ) -> PhaseEstimationParams {
        let mut p = PhaseEstimationParams::auto(eig);
        if let Some(g) = gamma {
            let radius = eig.spectral_radius();
            p.grid.min = g * (p.alpha - radius) - 8.0 * p.peak_sigma();
            p.grid.max = g * (p.alpha + radius) + 8.0 * p.peak_sigma();
            p.window *= g / p.gamma;
            p.gamma = g;
        }
        if let Some(w) = window {
            p.window = w;
        }
        if let Some(s) = s {
            p.s = s;
            let sigma = p.peak_sigma();
            let radius = eig.spectral_radius();
            p.grid = QGrid {
                min: p.gamma * (p.alpha - radius) - 8.0 * sigma,
                max: p.gamma * (p.alpha + radius) + 8.0 * sigma,
                step: sigma / AUTO_POINTS_PER_SIGMA,
            };
        }
        p
    }
}

/// One Gaussian of the homodyne mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// `γ λ_i`.
    pub center: f64,
    /// `|a_i|²`.
    pub weight: f64,
}

/// Homodyne outcome density tabulated on a grid, with its mixture components.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    pub s: f64,
    pub peaks: Vec<Peak>,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl SpectralDistribution {
    pub fn from_peaks(peaks: Vec<Peak>, s: f64, grid: &QGrid) -> Result<Self> {
        let total: f64 = peaks.iter().map(|p| p.weight).sum();
        if !(total > 0.0) {
            return Err(Error::Argument("mixture has no weight".into()));
        }
        let peaks: Vec<Peak> = peaks
            .into_iter()
            .filter(|p| p.weight > 0.0)
            .map(|p| Peak {
                center: p.center,
                weight: p.weight / total,
            })
            .collect();
        let grid = grid.points()?;
        let norm = (s / std::f64::consts::PI).sqrt();
        let density = grid
            .iter()
            .map(|&q| {
                peaks
                    .iter()
                    .map(|p| p.weight * norm * (-s * (p.center - q).powi(2)).exp())
                    .sum()
            })
            .collect();
        Ok(SpectralDistribution {
            s,
            peaks,
            grid,
            density,
        })
    }

    pub fn sigma(&self) -> f64 {
        (2.0 * self.s).sqrt().recip()
    }

    /// Closed-form density at `q`.
    pub fn density_at(&self, q: f64) -> f64 {
        let norm = (self.s / std::f64::consts::PI).sqrt();
        self.peaks
            .iter()
            .map(|p| p.weight * norm * (-self.s * (p.center - q).powi(2)).exp())
            .sum()
    }

    /// Trapezoid integral of the tabulated density.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(q, p)| 0.5 * (q[1] - q[0]) * (p[0] + p[1]))
            .sum()
    }

    /// Exact probability of `|q − center| ≤ half_width`.
    pub fn mass_in_window(&self, center: f64, half_width: f64) -> f64 {
        let rs = self.s.sqrt();
        self.peaks
            .iter()
            .map(|p| {
                0.5 * p.weight
                    * (erf(rs * (center + half_width - p.center))
                        - erf(rs * (center - half_width - p.center)))
            })
            .sum()
    }

    /// Number of strict local maxima of the tabulated density.
    pub fn count_modes(&self) -> usize {
        self.density
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] > w[2])
            .count()
    }

    /// Two-column `q\tP` text.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("q_R\tP\n");
        for (q, p) in self.grid.iter().zip(&self.density) {
            out.push_str(&format!("{q:.10e}\t{p:.10e}\n"));
        }
        out
    }
}

/// Overlaps `a_i = ⟨e_i|ψ⟩` for a state in canonical sector order.
pub fn overlaps(eig: &EigenDecomposition, state: &[Complex64]) -> Result<Vec<Complex64>> {
    if state.len() != eig.dim() {
        return Err(Error::Ordering(format!(
            "state has {} components, operator has dimension {}",
            state.len(),
            eig.dim()
        )));
    }
    Ok((0..eig.dim())
        .map(|i| {
            eig.eigenvectors
                .column(i)
                .iter()
                .zip(state)
                .map(|(&e, &psi)| psi * e)
                .sum()
        })
        .collect())
}

/// Homodyne density for a pure input state.
pub fn spectral_distribution(
    eig: &EigenDecomposition,
    state: &[Complex64],
    params: &PhaseEstimationParams,
) -> Result<SpectralDistribution> {
    let a = overlaps(eig, state)?;
    let parseval: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    if (parseval - 1.0).abs() > 1e-10 {
        return Err(Error::State(format!("state norm² is {parseval}, not 1")));
    }
    let peaks = eig
        .eigenvalues
        .iter()
        .zip(&a)
        .map(|(&l, x)| Peak {
            center: params.gamma * l,
            weight: x.norm_sqr(),
        })
        .collect();
    SpectralDistribution::from_peaks(peaks, params.s, &params.grid)
}

/// How the sector-`k` input is prepared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimationMode {
    /// Uniform superposition `|Ψ_k^ε⟩` over `S_k^ε`. The kernel mass is
    /// `⟨Ψ_k|P_ker|Ψ_k⟩`, which need not equal `β_k / |S_k^ε|`.
    Pure,
    /// Maximally mixed state on `S_k^ε`; kernel mass is exactly `β_k / |S_k^ε|`.
    Mixed,
}

/// Unit vector, uniform over sector `k`, in canonical order.
pub fn sector_uniform_vector(offsets: &[usize], k: usize) -> Vec<Complex64> {
    let dim = *offsets.last().expect("offsets non-empty");
    let (lo, hi) = (offsets[k], offsets[k + 1]);
    let a = Complex64::new(((hi - lo) as f64).sqrt().recip(), 0.0);
    (0..dim)
        .map(|i| if (lo..hi).contains(&i) { a } else { Complex64::new(0.0, 0.0) })
        .collect()
}

/// Equal-weight superposition of the non-empty sectors, each uniform.
pub fn uniform_superposition_vector(offsets: &[usize]) -> Vec<Complex64> {
    let populated: Vec<usize> = (0..offsets.len() - 1)
        .filter(|&k| offsets[k + 1] > offsets[k])
        .collect();
    let scale = (populated.len() as f64).sqrt().recip();
    let mut out = vec![Complex64::new(0.0, 0.0); *offsets.last().expect("non-empty")];
    for k in populated {
        for (o, v) in out.iter_mut().zip(sector_uniform_vector(offsets, k)) {
            *o += v * scale;
        }
    }
    out
}

fn sector_peaks(eig: &EigenDecomposition, k: usize, mode: EstimationMode, gamma: f64) -> Result<Vec<Peak>> {
    let size = eig.offsets[k + 1] - eig.offsets[k];
    let weights: Vec<f64> = match mode {
        EstimationMode::Mixed => (0..eig.dim())
            .map(|i| eig.sector_weights[i][k] / size as f64)
            .collect(),
        EstimationMode::Pure => overlaps(eig, &sector_uniform_vector(&eig.offsets, k))?
            .iter()
            .map(|a| a.norm_sqr())
            .collect(),
    };
    Ok(eig
        .eigenvalues
        .iter()
        .zip(weights)
        .map(|(&l, weight)| Peak {
            center: gamma * l,
            weight,
        })
        .collect())
}

fn check_sector(eig: &EigenDecomposition, vr: &VietorisRipsComplex, k: usize) -> Result<()> {
    let counts = vr.counts();
    let layout: Vec<usize> = eig.offsets.windows(2).map(|w| w[1] - w[0]).collect();
    if counts != layout {
        return Err(Error::Ordering(format!(
            "complex sector sizes {counts:?} differ from operator layout {layout:?}"
        )));
    }
    if k >= eig.sectors() {
        return Err(Error::MissingLevel(k));
    }
    // The top stored level lacks its up-term unless it is the last possible one.
    if k == vr.top_level() && k + 1 < vr.n() {
        return Err(Error::MissingLevel(k + 1));
    }
    Ok(())
}

/// Conditional homodyne density for sector `k`, or `None` if `S_k^ε` is empty.
pub fn sector_distribution(
    eig: &EigenDecomposition,
    vr: &VietorisRipsComplex,
    k: usize,
    mode: EstimationMode,
    params: &PhaseEstimationParams,
) -> Result<Option<SpectralDistribution>> {
    check_sector(eig, vr, k)?;
    if vr.count(k) == 0 {
        return Ok(None);
    }
    let peaks = sector_peaks(eig, k, mode, params.gamma)?;
    SpectralDistribution::from_peaks(peaks, params.s, &params.grid).map(Some)
}

/// Estimated Betti number from the zero-peak mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiEstimate {
    pub k: usize,
    pub epsilon: f64,
    pub mode: EstimationMode,
    pub mass: f64,
    pub estimate: f64,
    pub exact: Option<usize>,
    pub window: f64,
    /// Set when the window reaches the nearest non-zero eigenvalue peak.
    pub resolution_warning: bool,
}

/// Integrate the sector-`k` density over `γα ± window` and scale by `|S_k^ε|`.
pub fn estimate_betti(
    eig: &EigenDecomposition,
    vr: &VietorisRipsComplex,
    k: usize,
    mode: EstimationMode,
    params: &PhaseEstimationParams,
) -> Result<BettiEstimate> {
    params.validate()?;
    check_sector(eig, vr, k)?;
    let size = vr.count(k);
    let nearest = eig.smallest_nonzero().map(|g| params.gamma * g);
    let resolution_warning = nearest.is_some_and(|d| params.window >= d);
    let mass = if size == 0 {
        0.0
    } else {
        let dist = SpectralDistribution {
            s: params.s,
            peaks: sector_peaks(eig, k, mode, params.gamma)?,
            grid: Vec::new(),
            density: Vec::new(),
        };
        dist.mass_in_window(params.gamma * params.alpha, params.window)
    };
    Ok(BettiEstimate {
        k,
        epsilon: vr.epsilon(),
        mode,
        mass,
        estimate: mass * size as f64,
        exact: None,
        window: params.window,
        resolution_warning,
    })
}

/// Draw `count` homodyne outcomes: pick a peak by weight, then add Gaussian
/// noise of variance `1/(2s)`. Deterministic for a fixed seed.
pub fn sample_homodyne(dist: &SpectralDistribution, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Argument("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chooser = WeightedIndex::new(dist.peaks.iter().map(|p| p.weight))
        .map_err(|e| Error::Argument(format!("peak weights: {e}")))?;
    let noise = Normal::new(0.0, dist.sigma())
        .map_err(|e| Error::Argument(format!("peak width: {e}")))?;
    Ok((0..count)
        .map(|_| dist.peaks[chooser.sample(&mut rng)].center + noise.sample(&mut rng))
        .collect())
}
