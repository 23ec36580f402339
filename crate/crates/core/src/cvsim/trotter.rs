//! Operator exponentiation by repeated exponential swaps.
//!
//! One step couples the system to a fresh copy of `ρ_A` through
//! `e^{iθS} = cos θ I + i sin θ S` with `θ = δt·p_R` and traces the copy out,
//! which to first order applies `e^{iθρ_A}`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type CMatrix = DMatrix<Complex64>;

/// Tolerance for Hermiticity, unit trace and positivity of input densities.
pub const DENSITY_TOL: f64 = 1e-10;

/// Traces of `A` below this are treated as zero.
const TRACE_FLOOR: f64 = 1e-12;

/// Kronecker product `a ⊗ b`; `a` is the slow index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// `Tr_2` of an operator on `C^d ⊗ C^d`.
pub fn partial_trace_second(m: &CMatrix, d: usize) -> CMatrix {
    assert_eq!(m.nrows(), d * d, "operator is not on C^{d} ⊗ C^{d}");
    CMatrix::from_fn(d, d, |i, j| (0..d).map(|k| m[(i * d + k, j * d + k)]).sum())
}

/// Swap `|i⟩|j⟩ ↦ |j⟩|i⟩` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Check that `rho` is square, Hermitian, unit-trace and PSD within [`DENSITY_TOL`].
pub fn validate_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() || rho.nrows() == 0 {
        return Err(Error::State(format!(
            "density is {}×{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let asym = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > DENSITY_TOL {
        return Err(Error::State(format!("density not Hermitian (deviation {asym:e})")));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(Error::State(format!("density trace is {tr}")));
    }
    let min = SymmetricEigen::new(hermitian_part(rho))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < -DENSITY_TOL {
        return Err(Error::State(format!("density has eigenvalue {min:e}")));
    }
    Ok(())
}

/// `Tr_aux[e^{iθS}(ρ ⊗ ρ_A)e^{−iθS}]` with `θ = δt·p_R`, computed on the
/// doubled space. The result is Hermitian by construction.
pub fn exp_swap_step(rho: &CMatrix, rho_a: &CMatrix, p_r: f64, delta_t: f64) -> Result<CMatrix> {
    validate_density(rho)?;
    validate_density(rho_a)?;
    if rho.shape() != rho_a.shape() {
        return Err(Error::State(format!(
            "system is {}-dimensional, auxiliary is {}-dimensional",
            rho.nrows(),
            rho_a.nrows()
        )));
    }
    Ok(swap_step_unchecked(rho, rho_a, p_r * delta_t))
}

fn exp_swap_unitary(d: usize, theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::identity(d * d, d * d).scale(c) + swap_operator(d) * Complex64::new(0.0, s)
}

fn swap_step_unchecked(rho: &CMatrix, rho_a: &CMatrix, theta: f64) -> CMatrix {
    let d = rho.nrows();
    let u = exp_swap_unitary(d, theta);
    let joint = &u * kron(rho, rho_a) * u.adjoint();
    hermitian_part(&partial_trace_second(&joint, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterParams {
    pub delta_t: f64,
    pub p_r: f64,
    pub total_t: f64,
}

impl TrotterParams {
    /// Number of exp-swap steps: each one advances `e^{itp_RA}` by
    /// `δt / tr A`, so `round(t·tr A / δt)` steps are needed.
    pub fn steps(&self, trace_a: f64) -> usize {
        (self.total_t * trace_a / self.delta_t).round() as usize
    }

    /// Time actually simulated after rounding the step count.
    pub fn effective_t(&self, trace_a: f64) -> f64 {
        self.steps(trace_a) as f64 * self.delta_t / trace_a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterOutcome {
    pub rho: CMatrix,
    pub steps: usize,
    pub effective_t: f64,
}

/// Approximate `e^{itp_RA}ρe^{−itp_RA}` by repeated [`exp_swap_step`] with `ρ_A = A/tr A`.
pub fn trotterized_evolution(rho: &CMatrix, a: &CMatrix, params: &TrotterParams) -> Result<TrotterOutcome> {
    if !(params.delta_t > 0.0) || !params.total_t.is_finite() || !params.p_r.is_finite() {
        return Err(Error::Argument(format!("bad Trotter parameters {params:?}")));
    }
    if a.shape() != rho.shape() {
        return Err(Error::State(format!(
            "generator is {}×{}, state is {}×{}",
            a.nrows(),
            a.ncols(),
            rho.nrows(),
            rho.ncols()
        )));
    }
    let tr = a.trace();
    if tr.norm() < TRACE_FLOOR {
        return Err(Error::RegularizationRequired);
    }
    if tr.im.abs() > DENSITY_TOL {
        return Err(Error::State(format!("generator trace {tr} is not real")));
    }
    let rho_a = a.unscale(tr.re);
    validate_density(rho)?;
    validate_density(&rho_a)
        .map_err(|e| Error::Precondition(format!("A / tr A is not a density: {e}")))?;

    let steps = params.steps(tr.re);
    if steps == 0 {
        return Err(Error::Argument(format!(
            "t·trA/δt rounds to zero steps ({params:?}, tr A = {})",
            tr.re
        )));
    }
    let d = rho.nrows();
    let theta = params.p_r * params.delta_t;
    let u = exp_swap_unitary(d, theta);
    let u_dag = u.adjoint();
    let mut state = rho.clone();
    for _ in 0..steps {
        let joint = &u * kron(&state, &rho_a) * &u_dag;
        state = hermitian_part(&partial_trace_second(&joint, d));
    }
    Ok(TrotterOutcome {
        rho: state,
        steps,
        effective_t: params.effective_t(tr.re),
    })
}

/// `e^{iθA}` for Hermitian `A`, via its eigendecomposition.
pub fn hermitian_exp(a: &CMatrix, theta: f64) -> CMatrix {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, theta * l)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Exact `e^{itp_RA}ρe^{−itp_RA}`.
pub fn exact_conjugation(rho: &CMatrix, a: &CMatrix, p_r: f64, t: f64) -> CMatrix {
    let u = hermitian_exp(a, t * p_r);
    &u * rho * u.adjoint()
}

/// `½‖ρ − σ‖₁` for Hermitian arguments.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let diff = hermitian_part(&(rho - sigma));
    0.5 * SymmetricEigen::new(diff).eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}
