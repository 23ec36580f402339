//! Dense `n`-qubit state vectors for the discrete part of the pipeline.
//!
//! Basis index `y` is the simplex word: bit `i` of `y` is qubit `i`.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::{VietorisRipsComplex, MAX_VERTICES};
use crate::error::{Error, Result};
use crate::geometry::{DistanceMatrix, PointCloud};

/// States wider than this are refused by the JSON export.
pub const MAX_EXPORT_QUBITS: usize = 12;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VERTICES {
        Err(Error::Size {
            n,
            max: MAX_VERTICES,
        })
    } else {
        Ok(())
    }
}

impl QuantumState {
    /// Wrap `2^n` amplitudes; the vector must be normalized.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if amps.len() != 1 << n {
            return Err(Error::Ordering(format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        let state = QuantumState { n, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::State(format!("norm {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Total probability on basis states selected by `pred`.
    pub fn probability_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(y, _)| pred(*y))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn renormalized(mut self) -> Self {
        let norm = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= norm);
        self
    }

    /// `[[re, im], …]`, refused above [`MAX_EXPORT_QUBITS`].
    pub fn to_json(&self) -> Result<serde_json::Value> {
        if self.n > MAX_EXPORT_QUBITS {
            return Err(Error::Size {
                n: self.n,
                max: MAX_EXPORT_QUBITS,
            });
        }
        let pairs: Vec<[f64; 2]> = self.amps.iter().map(|a| [a.re, a.im]).collect();
        Ok(serde_json::to_value(pairs).expect("amplitudes serialize"))
    }
}

/// `|s⟩ = 2^{-n/2} Σ_y |y⟩`.
pub fn uniform_state(n: usize) -> Result<QuantumState> {
    check_qubits(n)?;
    let dim = 1usize << n;
    let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(QuantumState {
        n,
        amps: vec![a; dim],
    })
}

/// Boolean mask over the `2^n` basis states marking `S_k^ε`.
pub fn marked_mask(vr: &VietorisRipsComplex, k: usize) -> Result<Vec<bool>> {
    let mut mask = vec![false; 1 << vr.n()];
    for s in vr.level(k)? {
        mask[s.word() as usize] = true;
    }
    Ok(mask)
}

/// Negate the amplitude of every marked basis state.
pub fn phase_flip(state: &QuantumState, marked: &[bool]) -> Result<QuantumState> {
    if marked.len() != state.amps.len() {
        return Err(Error::Ordering(format!(
            "mask of {} entries for a {}-amplitude state",
            marked.len(),
            state.amps.len()
        )));
    }
    let amps = state
        .amps
        .iter()
        .zip(marked)
        .map(|(&a, &m)| if m { -a } else { a })
        .collect();
    Ok(QuantumState { n: state.n, amps })
}

/// The oracle in its phase-kickback form: `|s⟩ → −|s⟩` iff `s ∈ S_k^ε`.
pub fn oracle_phase_flip(
    state: &QuantumState,
    vr: &VietorisRipsComplex,
    k: usize,
) -> Result<QuantumState> {
    if vr.n() != state.n {
        return Err(Error::Ordering(format!(
            "{}-qubit state against a complex on {} vertices",
            state.n,
            vr.n()
        )));
    }
    phase_flip(state, &marked_mask(vr, k)?)
}

/// Inversion about the mean, `2|s⟩⟨s| − I`.
pub fn diffusion(state: &QuantumState) -> QuantumState {
    let mean = state.amps.iter().sum::<Complex64>() / state.amps.len() as f64;
    let amps = state.amps.iter().map(|&a| 2.0 * mean - a).collect();
    QuantumState { n: state.n, amps }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Iterations {
    /// `floor((π/4) √(N/M))`.
    Auto,
    Fixed(usize),
}

/// `floor((π/4) √(N/M))` for `N` basis states and `M ≥ 1` marked ones.
pub fn optimal_iterations(total: usize, marked: usize) -> usize {
    assert!(marked >= 1, "no marked states");
    (std::f64::consts::FRAC_PI_4 * (total as f64 / marked as f64).sqrt()).floor() as usize
}

/// `sin²((2r+1)θ)` with `sin θ = √(M/N)`.
pub fn grover_success_closed_form(total: usize, marked: usize, r: usize) -> f64 {
    let theta = (marked as f64 / total as f64).sqrt().asin();
    ((2 * r + 1) as f64 * theta).sin().powi(2)
}

#[derive(Debug, Clone)]
pub struct GroverOutcome {
    pub state: QuantumState,
    pub iterations: usize,
    pub success_probability: f64,
}

/// Run `r` Grover iterations against an explicit marked set.
pub fn grover_with_mask(
    state: &QuantumState,
    marked: &[bool],
    iterations: Iterations,
) -> Result<GroverOutcome> {
    let m = marked.iter().filter(|&&b| b).count();
    if m == 0 {
        return Err(Error::EmptyTarget);
    }
    let r = match iterations {
        Iterations::Auto => optimal_iterations(marked.len(), m),
        Iterations::Fixed(r) => r,
    };
    let mut current = state.clone();
    for _ in 0..r {
        current = diffusion(&phase_flip(&current, marked)?);
    }
    if r > 0 {
        current = current.renormalized();
    }
    let success_probability = current.probability_where(|y| marked[y]);
    Ok(GroverOutcome {
        state: current,
        iterations: r,
        success_probability,
    })
}

/// Amplify `S_k^ε` starting from `state` (normally [`uniform_state`]).
pub fn grover_amplify(
    state: &QuantumState,
    vr: &VietorisRipsComplex,
    k: usize,
    iterations: Iterations,
) -> Result<GroverOutcome> {
    if vr.n() != state.n {
        return Err(Error::Ordering(format!(
            "{}-qubit state against a complex on {} vertices",
            state.n,
            vr.n()
        )));
    }
    grover_with_mask(state, &marked_mask(vr, k)?, iterations)
}

/// Joint state of the sector register and the `n` simplex qubits.
///
/// Amplitudes are stored register-major: index `reg · 2^n + y`, with
/// `reg ∈ 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedState {
    n: usize,
    amps: Vec<Complex64>,
}

impl TaggedState {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Qubits needed for the register, `ceil(log2 n)`.
    pub fn register_width(&self) -> usize {
        (usize::BITS - (self.n - 1).leading_zeros()) as usize
    }

    pub fn amplitude(&self, register: usize, y: usize) -> Complex64 {
        self.amps[register * (1 << self.n) + y]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Probability of each register value.
    pub fn register_distribution(&self) -> Vec<f64> {
        self.amps
            .chunks_exact(1 << self.n)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Components on the simplices of `vr`, in the Dirac operator's canonical
    /// order (sector `k` ascending, then word ascending). Requires the complex
    /// to store every level the state populates that matters to the caller.
    pub fn to_canonical(&self, vr: &VietorisRipsComplex) -> Result<Vec<Complex64>> {
        if vr.n() != self.n {
            return Err(Error::Ordering(format!(
                "{}-qubit state against a complex on {} vertices",
                self.n,
                vr.n()
            )));
        }
        Ok(vr
            .levels()
            .iter()
            .enumerate()
            .flat_map(|(k, level)| level.iter().map(move |s| self.amplitude(k, s.word() as usize)))
            .collect())
    }
}

/// Tag each basis state with its sector by simulating the controlled
/// increments: the register starts in `|n−1⟩` and every qubit set to 1
/// applies the cyclic shift `|r⟩ → |r+1 mod n⟩`, leaving `popcount(y) − 1`.
pub fn tag_sectors(state: &QuantumState) -> TaggedState {
    let n = state.n;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); n * dim];
    amps[(n - 1) * dim..].copy_from_slice(&state.amps);
    for qubit in 0..n {
        // Rows with this qubit clear are untouched.
        let mut next = amps.clone();
        for reg in 0..n {
            let target = (reg + 1) % n;
            for y in (0..dim).filter(|y| y >> qubit & 1 == 1) {
                next[target * dim + y] = amps[reg * dim + y];
            }
        }
        amps = next;
    }
    TaggedState { n, amps }
}

/// Reference tagging straight from the popcount.
pub fn tag_sectors_direct(state: &QuantumState) -> TaggedState {
    let n = state.n;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); n * dim];
    for (y, &a) in state.amps.iter().enumerate() {
        let reg = (y.count_ones() as usize + n - 1) % n;
        amps[reg * dim + y] = a;
    }
    TaggedState { n, amps }
}

/// `(1/√n) Σ_k |k⟩ |Ψ_k^(0)⟩` with `|Ψ_k^(0)⟩` uniform over all `C(n, k+1)`
/// `k`-simplices: uniform state, tagging, postselection away from `y = 0`,
/// then each sector rescaled to weight `1/n`.
pub fn build_initial_state(n: usize) -> Result<TaggedState> {
    let mut tagged = tag_sectors(&uniform_state(n)?);
    let dim = 1usize << n;
    // y = 0 is not a simplex; it sits at register n−1.
    tagged.amps[(n - 1) * dim] = Complex64::new(0.0, 0.0);
    for chunk in tagged.amps.chunks_exact_mut(dim) {
        let weight: f64 = chunk.iter().map(|a| a.norm_sqr()).sum();
        let scale = (n as f64 * weight).sqrt().recip();
        chunk.iter_mut().for_each(|a| *a *= scale);
    }
    Ok(tagged)
}

/// Result of simulating the distance-operator construction.
#[derive(Debug, Clone)]
pub struct DistanceProtocolOutcome {
    /// The reduced operator on `|i⟩|j⟩`, rescaled to the unnormalized `H`.
    pub operator: DistanceMatrix,
    /// Probability of the `−1` outcome of the `X` measurement on the control.
    pub postselection_probability: f64,
    /// Largest off-diagonal magnitude of the reduced operator (zero once the
    /// index labels are copied to ancillae).
    pub max_off_diagonal: f64,
}

/// Simulate the construction of `H = Σ |v_i − v_j|² |i⟩⟨i| ⊗ |j⟩⟨j|`.
///
/// Registers: index `i`, index `j`, a `d`-dimensional data register and one
/// control qubit. The data register is filled by a classical lookup standing
/// in for qRAM, addressed by `i` or `j` depending on the control.
pub fn derive_distance_operator(pc: &PointCloud) -> Result<DistanceProtocolOutcome> {
    let (n, d) = (pc.n(), pc.d());

    // (1/(√2 n)) Σ_ij |i⟩|j⟩(|v_i⟩|0⟩ + |v_j⟩|1⟩), indexed [i][j][c][x].
    let pre = (2.0_f64.sqrt() * n as f64).recip();
    let mut joint = vec![0.0_f64; n * n * 2 * d];
    for i in 0..n {
        for j in 0..n {
            for c in 0..2 {
                let source = if c == 0 { pc.row(i) } else { pc.row(j) };
                for (x, &v) in source.iter().enumerate() {
                    joint[((i * n + j) * 2 + c) * d + x] = pre * v;
                }
            }
        }
    }

    // Project the control onto |−⟩ = (|0⟩ − |1⟩)/√2.
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut projected = vec![0.0_f64; n * n * d];
    for ij in 0..n * n {
        for x in 0..d {
            projected[ij * d + x] =
                inv_sqrt2 * (joint[(ij * 2) * d + x] - joint[(ij * 2 + 1) * d + x]);
        }
    }
    let postselection_probability: f64 = projected.iter().map(|a| a * a).sum();

    // Copy i and j onto ancillae, then trace out ancillae and data:
    // ρ = Σ_{a,b,x} |χ_{abx}⟩⟨χ_{abx}| where χ_{abx}(i,j) = φ_ij(x) δ_ai δ_bj.
    let dim = n * n;
    let mut reduced = vec![0.0_f64; dim * dim];
    for a in 0..n {
        for b in 0..n {
            for x in 0..d {
                let column: Vec<(usize, f64)> = (0..dim)
                    .filter(|&ij| ij == a * n + b)
                    .map(|ij| (ij, projected[ij * d + x]))
                    .collect();
                for &(r, u) in &column {
                    for &(c, v) in &column {
                        reduced[r * dim + c] += u * v;
                    }
                }
            }
        }
    }

    let scale = (2.0 * n as f64).powi(2);
    let mut sq = vec![0.0; dim];
    let mut max_off_diagonal = 0.0_f64;
    for r in 0..dim {
        for c in 0..dim {
            if r == c {
                sq[r] = reduced[r * dim + r] * scale;
            } else {
                max_off_diagonal = max_off_diagonal.max(reduced[r * dim + c].abs());
            }
        }
    }
    let operator = DistanceMatrix::from_squared(n, sq)
        .map_err(|e| Error::Inconsistent(format!("distance protocol: {e}")))?;
    Ok(DistanceProtocolOutcome {
        operator,
        postselection_probability,
        max_off_diagonal,
    })
}
