//! Boundary maps, the Dirac operator and combinatorial Laplacians, with exact
//! Betti numbers as the classical ground truth.
//!
//! Orientation follows the ascending-vertex convention of
//! [`crate::complex`]: the column of `∂_k` for `s = {i_0 < … < i_k}` carries
//! `(-1)^l` at the row of `s` with `i_l` removed. Within the Dirac operator,
//! sectors are laid out by `k` ascending and, inside a sector, by word value.
//!
//! Betti numbers are computed two independent ways that must agree: counting
//! near-zero Laplacian eigenvalues, and rank–nullity with exact integer ranks.

mod rank;
mod sparse;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::complex::{SimplexBits, VietorisRipsComplex};
use crate::error::{Error, Result};

pub use rank::exact_rank;
pub use sparse::IntMatrix;

/// Relative threshold below which a Laplacian eigenvalue counts as zero.
pub const ZERO_EIGENVALUE_RTOL: f64 = 1e-9;

/// The restricted boundary map `∂̃_k`: rows index `S_{k-1}`, columns `S_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub k: usize,
    pub matrix: IntMatrix,
}

impl BoundaryMatrix {
    /// Copy with the entry at `(row, col)` negated. Only useful for mutation
    /// tests of the chain-complex check.
    pub fn with_flipped_sign(&self, row: usize, col: usize) -> BoundaryMatrix {
        let mut out = self.clone();
        let v = out.matrix.get(row, col);
        out.matrix.set(row, col, -v);
        out
    }
}

pub fn boundary_matrix(vr: &VietorisRipsComplex, k: usize) -> Result<BoundaryMatrix> {
    if k == 0 || k >= vr.n() {
        return Err(Error::Dimension {
            k,
            max: vr.n() - 1,
        });
    }
    let faces = vr.level(k - 1)?;
    let simplices = vr.level(k)?;
    let mut matrix = IntMatrix::zeros(faces.len(), simplices.len());
    for (col, s) in simplices.iter().enumerate() {
        for (l, face) in s.faces() {
            // P_{k-1} projects away faces outside the complex; face closure
            // of Vietoris-Rips complexes means this never drops anything.
            if let Ok(row) = faces.binary_search(&face) {
                matrix.set(row, col, if l % 2 == 0 { 1 } else { -1 });
            }
        }
    }
    Ok(BoundaryMatrix { k, matrix })
}

/// `∂̃_1 … ∂̃_top` over the enumerated levels.
pub fn boundary_matrices(vr: &VietorisRipsComplex) -> Vec<BoundaryMatrix> {
    (1..=vr.top_level())
        .map(|k| boundary_matrix(vr, k).expect("levels 0..=top are present"))
        .collect()
}

/// Symmetric block matrix with `∂̃_k` at sector block `(k-1, k)` and its
/// transpose at `(k, k-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiracOperator {
    /// `offsets[k]` is the first row of sector `k`; the last entry is the dimension.
    pub offsets: Vec<usize>,
    pub matrix: IntMatrix,
}

impl DiracOperator {
    pub fn dim(&self) -> usize {
        *self.offsets.last().expect("offsets non-empty")
    }

    pub fn sectors(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Sector index of row `i`.
    pub fn sector_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim()).map(|i| self.matrix.get(i, i)).sum()
    }
}

pub fn dirac_operator(vr: &VietorisRipsComplex) -> DiracOperator {
    assemble_dirac(vr, &boundary_matrices(vr))
}

fn assemble_dirac(vr: &VietorisRipsComplex, boundaries: &[BoundaryMatrix]) -> DiracOperator {
    let mut offsets = Vec::with_capacity(vr.top_level() + 2);
    let mut acc = 0;
    offsets.push(0);
    for level in vr.levels() {
        acc += level.len();
        offsets.push(acc);
    }
    let mut matrix = IntMatrix::zeros(acc, acc);
    for b in boundaries {
        let (r0, c0) = (offsets[b.k - 1], offsets[b.k]);
        for (i, j, v) in b.matrix.triplets() {
            matrix.set(r0 + i, c0 + j, v);
            matrix.set(c0 + j, r0 + i, v);
        }
    }
    DiracOperator { offsets, matrix }
}

/// The complete complex on `n` vertices (every non-empty word).
pub fn complete_complex(n: usize) -> Result<VietorisRipsComplex> {
    if n == 0 || n > crate::complex::MAX_VERTICES {
        return Err(Error::Size {
            n,
            max: crate::complex::MAX_VERTICES,
        });
    }
    let mut sets = vec![Vec::new(); n];
    for word in 1u32..(1u32 << n) {
        let s = SimplexBits::new(word);
        sets[s.dim()].push(s);
    }
    VietorisRipsComplex::from_sets(n, f64::INFINITY, sets)
}

/// The unrestricted operator `B` built from the plain boundary maps on all
/// `2^n − 1` simplices.
pub fn unrestricted_dirac_operator(n: usize) -> Result<DiracOperator> {
    Ok(dirac_operator(&complete_complex(n)?))
}

/// `Δ_k = ∂̃_kᵀ∂̃_k + ∂̃_{k+1}∂̃_{k+1}ᵀ` as a sparse integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaplacianBlock {
    pub k: usize,
    pub matrix: IntMatrix,
}

/// Laplacian using only the enumerated levels: the top stored level gets no
/// up-term. This is the Laplacian of the stored skeleton.
fn skeleton_laplacian(vr: &VietorisRipsComplex, k: usize) -> LaplacianBlock {
    let size = vr.count(k);
    let mut matrix = IntMatrix::zeros(size, size);
    if k >= 1 {
        let down = boundary_matrix(vr, k).expect("level present").matrix;
        matrix = matrix.plus(&down.transpose().matmul(&down));
    }
    if k < vr.top_level() {
        let up = boundary_matrix(vr, k + 1).expect("level present").matrix;
        matrix = matrix.plus(&up.matmul(&up.transpose()));
    }
    LaplacianBlock { k, matrix }
}

pub fn laplacian(vr: &VietorisRipsComplex, k: usize) -> Result<LaplacianBlock> {
    if k >= vr.n() {
        return Err(Error::Dimension {
            k,
            max: vr.n() - 1,
        });
    }
    vr.level(k)?;
    if k + 1 < vr.n() {
        vr.level(k + 1)?;
    }
    Ok(skeleton_laplacian(vr, k))
}

/// `β_k` from the count of Laplacian eigenvalues with
/// `|λ| < ZERO_EIGENVALUE_RTOL · max(1, ‖Δ_k‖_∞)`.
pub fn betti_by_spectrum(vr: &VietorisRipsComplex, k: usize) -> Result<usize> {
    let lap = laplacian(vr, k)?;
    if lap.matrix.rows() == 0 {
        return Ok(0);
    }
    let tol = ZERO_EIGENVALUE_RTOL * (lap.matrix.inf_norm().max(1) as f64);
    let eig = SymmetricEigen::new(lap.matrix.to_dense());
    Ok(eig.eigenvalues.iter().filter(|l| l.abs() < tol).count())
}

/// `β_k = |S_k| − rank ∂̃_k − rank ∂̃_{k+1}` with exact integer ranks.
pub fn betti_by_rank(vr: &VietorisRipsComplex, k: usize) -> Result<usize> {
    if k >= vr.n() {
        return Err(Error::Dimension {
            k,
            max: vr.n() - 1,
        });
    }
    let size = vr.level(k)?.len();
    let down = if k >= 1 {
        exact_rank(&boundary_matrix(vr, k)?.matrix)
    } else {
        0
    };
    let up = if k + 1 < vr.n() {
        exact_rank(&boundary_matrix(vr, k + 1)?.matrix)
    } else {
        0
    };
    size.checked_sub(down + up).ok_or_else(|| {
        Error::Inconsistent(format!("ranks {down}+{up} exceed |S_{k}| = {size}"))
    })
}

/// `β_k`, computed by spectrum and by exact rank; the two must agree.
pub fn betti_exact(vr: &VietorisRipsComplex, k: usize) -> Result<usize> {
    let by_rank = betti_by_rank(vr, k)?;
    let by_spectrum = betti_by_spectrum(vr, k)?;
    if by_rank != by_spectrum {
        return Err(Error::Inconsistent(format!(
            "beta_{k} at eps={}: rank-nullity gives {by_rank}, spectrum gives {by_spectrum}",
            vr.epsilon()
        )));
    }
    Ok(by_rank)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiVector {
    pub epsilon: f64,
    pub betti: Vec<usize>,
}

/// `β_0 … β_kmax`; needs levels up to `kmax + 1` (or `n − 1`).
pub fn betti_vector(vr: &VietorisRipsComplex, kmax: usize) -> Result<BettiVector> {
    let betti = (0..=kmax)
        .map(|k| {
            if k >= vr.n() {
                Ok(0)
            } else {
                betti_exact(vr, k)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BettiVector {
        epsilon: vr.epsilon(),
        betti,
    })
}

/// `Σ (−1)^k |S_k|` over the enumerated levels.
pub fn euler_characteristic(vr: &VietorisRipsComplex) -> i64 {
    vr.counts()
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

/// `∂_k ∂_{k+1} = 0` for consecutive maps in `boundaries` (exact integers).
pub fn chain_complex_holds(boundaries: &[BoundaryMatrix]) -> bool {
    boundaries
        .windows(2)
        .all(|w| w[0].matrix.matmul(&w[1].matrix).is_zero())
}

pub fn verify_chain_complex(vr: &VietorisRipsComplex) -> bool {
    chain_complex_holds(&boundary_matrices(vr))
}

/// `B̃²` equals `diag(Δ_0, Δ_1, …)` exactly, with vanishing off-diagonal blocks.
pub fn verify_dirac_square(vr: &VietorisRipsComplex) -> bool {
    let dirac = dirac_operator(vr);
    let square = dirac.matrix.matmul(&dirac.matrix);
    let mut expected = IntMatrix::zeros(dirac.dim(), dirac.dim());
    for k in 0..dirac.sectors() {
        let off = dirac.offsets[k];
        for (i, j, v) in skeleton_laplacian(vr, k).matrix.triplets() {
            expected.set(off + i, off + j, v);
        }
    }
    square == expected
}
