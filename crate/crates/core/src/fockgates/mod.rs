//! Dual-rail qubit gates in a truncated bosonic Fock space.
//!
//! Every mode holds `0..=n_max` photons. Basis states are indexed in mixed
//! radix `n_max + 1` with mode 0 the most significant digit. A dual-rail
//! qubit is a mode pair `(a, b)` with logical `|0⟩ = |10⟩` and `|1⟩ = |01⟩`.
//! Layouts list the qubits first (`a` then `b` for each) and the ancilla pair
//! last.
//!
//! Gates are kept as products of small local factors, each stored as sparse
//! columns over the modes it touches. Nothing here ever forms a dense matrix
//! on the whole space, so ten modes at `n_max = 2` (59049 states) stay cheap.

mod gates;
mod sweep;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use gates::{
    ancilla_rotation, ccnot, cnot, controlled_phase_fix, cr_gate, cz, cz_via_ancilla,
    exp_cond_swap, exp_cond_swap_reversed, miswired_beam_splitter, swap_u, swap_via_cz,
    swap_via_cz_inline, z_ancilla, Axis,
};
pub use sweep::{appendix_sweep, AppendixCheck, AppendixReport, SweepConfig};

/// Largest supported Hilbert-space dimension.
pub const MAX_FOCK_DIM: usize = 1 << 24;

/// Entries below this magnitude are dropped from sparse columns.
pub const DROP_TOL: f64 = 1e-14;

type C64 = Complex64;
/// Sparse vector as sorted `(index, amplitude)` pairs.
pub type SparseVec = Vec<(usize, C64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    modes: usize,
    n_max: usize,
}

impl FockSpace {
    pub fn new(modes: usize, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Argument("n_max must be at least 1".into()));
        }
        if modes == 0 {
            return Err(Error::Argument("a Fock space needs at least one mode".into()));
        }
        let dim = (n_max + 1).checked_pow(modes as u32);
        match dim {
            Some(d) if d <= MAX_FOCK_DIM => Ok(FockSpace { modes, n_max }),
            _ => Err(Error::Size {
                n: modes,
                max: MAX_FOCK_DIM,
            }),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn radix(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.radix().pow(self.modes as u32)
    }

    /// Place value of `mode` in a global index.
    pub fn weight(&self, mode: usize) -> usize {
        self.radix().pow((self.modes - 1 - mode) as u32)
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.weight(mode)) % self.radix()
    }

    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes {
            return Err(Error::Argument(format!(
                "{} occupations for {} modes",
                occupations.len(),
                self.modes
            )));
        }
        occupations.iter().try_fold(0usize, |acc, &n| {
            if n > self.n_max {
                Err(Error::Argument(format!("occupation {n} exceeds n_max {}", self.n_max)))
            } else {
                Ok(acc * self.radix() + n)
            }
        })
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.modes).map(|m| self.occupation(index, m)).collect()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes {
            Ok(())
        } else {
            Err(Error::Index {
                index: mode,
                limit: self.modes,
            })
        }
    }

    /// Index of the logical basis state `bits` on `qubits` (qubit 0 is the most
    /// significant bit), every other mode empty.
    pub fn logical_index(&self, qubits: &[DualRailQubit], bits: usize) -> usize {
        let m = qubits.len();
        qubits
            .iter()
            .enumerate()
            .map(|(q, qb)| {
                let one = (bits >> (m - 1 - q)) & 1 == 1;
                self.weight(if one { qb.b } else { qb.a })
            })
            .sum()
    }
}

/// Single-mode annihilation operator truncated at `n_max` photons.
pub fn annihilation(n_max: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualRailQubit {
    pub a: usize,
    pub b: usize,
}

impl DualRailQubit {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::Aliasing(format!("qubit uses mode {a} twice")));
        }
        Ok(DualRailQubit { a, b })
    }

    pub fn modes(&self) -> [usize; 2] {
        [self.a, self.b]
    }
}

/// Fail if any mode appears in more than one of `qubits`.
pub fn check_disjoint(qubits: &[DualRailQubit]) -> Result<()> {
    let mut seen = Vec::new();
    for q in qubits {
        for m in q.modes() {
            if seen.contains(&m) {
                return Err(Error::Aliasing(format!("mode {m} shared between qubits")));
            }
            seen.push(m);
        }
    }
    Ok(())
}

/// `qubits` dual-rail qubits on modes `(2q, 2q+1)`, optionally followed by an
/// ancilla pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualRailLayout {
    pub space: FockSpace,
    pub qubits: Vec<DualRailQubit>,
    pub ancilla: Option<DualRailQubit>,
}

impl DualRailLayout {
    pub fn new(qubits: usize, ancilla: bool, n_max: usize) -> Result<Self> {
        let pairs = qubits + usize::from(ancilla);
        let space = FockSpace::new(2 * pairs, n_max)?;
        let make = |q: usize| DualRailQubit { a: 2 * q, b: 2 * q + 1 };
        Ok(DualRailLayout {
            space,
            qubits: (0..qubits).map(make).collect(),
            ancilla: ancilla.then(|| make(qubits)),
        })
    }

    /// Qubits followed by the ancilla, if any.
    pub fn all_qubits(&self) -> Vec<DualRailQubit> {
        self.qubits.iter().copied().chain(self.ancilla).collect()
    }
}

/// Sparse state on a [`FockSpace`], indexed globally.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    space: FockSpace,
    amps: SparseVec,
}

impl FockState {
    pub fn basis(space: FockSpace, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::Index {
                index,
                limit: space.dim(),
            });
        }
        Ok(FockState {
            space,
            amps: vec![(index, C64::new(1.0, 0.0))],
        })
    }

    /// Superposition of logical basis states of `qubits` with the given
    /// amplitudes (length `2^qubits`), normalized.
    pub fn logical(space: FockSpace, qubits: &[DualRailQubit], amps: &[C64]) -> Result<Self> {
        if amps.len() != 1 << qubits.len() {
            return Err(Error::Argument(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                qubits.len()
            )));
        }
        check_disjoint(qubits)?;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::State("zero logical state".into()));
        }
        let entries: Vec<(usize, C64)> = amps
            .iter()
            .enumerate()
            .map(|(bits, &z)| (space.logical_index(qubits, bits), z / norm))
            .collect();
        Ok(FockState {
            space,
            amps: normalize_sparse(entries),
        })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[(usize, C64)] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps
            .binary_search_by_key(&index, |e| e.0)
            .map_or(C64::new(0.0, 0.0), |p| self.amps[p].1)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|e| e.1.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Error unless every component has the ancilla in logical `|0⟩`.
    pub fn require_logical_zero(&self, ancilla: DualRailQubit) -> Result<()> {
        let bad = self.amps.iter().any(|&(i, _)| {
            self.space.occupation(i, ancilla.a) != 1 || self.space.occupation(i, ancilla.b) != 0
        });
        if bad {
            Err(Error::Precondition("ancilla is not in logical |0⟩".into()))
        } else {
            Ok(())
        }
    }

    /// Reduced density matrix on `modes`, in their local mixed-radix basis.
    pub fn reduced_density(&self, modes: &[usize]) -> DMatrix<C64> {
        let r = self.space.radix();
        let local_dim = r.pow(modes.len() as u32);
        let split = |i: usize| {
            let mut local = 0;
            let mut rest = i;
            for &m in modes {
                let d = self.space.occupation(i, m);
                local = local * r + d;
                rest -= d * self.space.weight(m);
            }
            (rest, local)
        };
        let mut groups: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
        for &(i, z) in &self.amps {
            let (rest, local) = split(i);
            groups.entry(rest).or_default().push((local, z));
        }
        let mut rho = DMatrix::zeros(local_dim, local_dim);
        for comps in groups.values() {
            for &(x, zx) in comps {
                for &(y, zy) in comps {
                    rho[(x, y)] += zx * zy.conj();
                }
            }
        }
        rho
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> C64 {
        other
            .amps
            .iter()
            .map(|&(i, z)| self.amplitude(i).conj() * z)
            .sum()
    }
}

fn normalize_sparse(entries: impl IntoIterator<Item = (usize, C64)>) -> SparseVec {
    let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
    for (i, z) in entries {
        *acc.entry(i).or_insert(C64::new(0.0, 0.0)) += z;
    }
    acc.into_iter().filter(|e| e.1.norm() > DROP_TOL).collect()
}

/// One local factor: sparse columns over `modes`, mode order as listed.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp {
    modes: Vec<usize>,
    cols: Vec<SparseVec>,
}

impl LocalOp {
    fn new(space: &FockSpace, modes: Vec<usize>, cols: Vec<SparseVec>) -> Result<Self> {
        for &m in &modes {
            space.check_mode(m)?;
        }
        let mut sorted = modes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != modes.len() {
            return Err(Error::Aliasing(format!("factor touches modes {modes:?}")));
        }
        debug_assert_eq!(cols.len(), space.radix().pow(modes.len() as u32));
        Ok(LocalOp { modes, cols })
    }

    fn from_dense(space: &FockSpace, modes: Vec<usize>, m: &DMatrix<C64>) -> Result<Self> {
        let cols = (0..m.ncols())
            .map(|c| {
                (0..m.nrows())
                    .filter(|&r| m[(r, c)].norm() > DROP_TOL)
                    .map(|r| (r, m[(r, c)]))
                    .collect()
            })
            .collect();
        LocalOp::new(space, modes, cols)
    }

    fn adjoint(&self) -> LocalOp {
        let mut cols = vec![Vec::new(); self.cols.len()];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, z) in col {
                cols[r].push((c, z.conj()));
            }
        }
        for col in &mut cols {
            col.sort_unstable_by_key(|e| e.0);
        }
        LocalOp {
            modes: self.modes.clone(),
            cols,
        }
    }

    fn dense(&self) -> DMatrix<C64> {
        let d = self.cols.len();
        let mut m = DMatrix::zeros(d, d);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, z) in col {
                m[(r, c)] = z;
            }
        }
        m
    }
}

/// Vector index layout: the listed modes, first most significant.
struct Frame {
    radix: usize,
    weights: HashMap<usize, usize>,
}

impl Frame {
    fn new(radix: usize, modes: &[usize]) -> Self {
        let len = modes.len();
        let weights = modes
            .iter()
            .enumerate()
            .map(|(p, &m)| (m, radix.pow((len - 1 - p) as u32)))
            .collect();
        Frame { radix, weights }
    }

    fn apply(&self, op: &LocalOp, v: &[(usize, C64)]) -> SparseVec {
        let w: Vec<usize> = op.modes.iter().map(|m| self.weights[m]).collect();
        let r = self.radix;
        let mut out: HashMap<usize, C64> = HashMap::with_capacity(v.len() * 2);
        for &(idx, z) in v {
            let mut local = 0;
            let mut base = idx;
            for &wm in &w {
                let d = (idx / wm) % r;
                local = local * r + d;
                base -= d * wm;
            }
            for &(l2, u) in &op.cols[local] {
                let mut target = base;
                let mut rem = l2;
                for &wm in w.iter().rev() {
                    target += (rem % r) * wm;
                    rem /= r;
                }
                *out.entry(target).or_insert(C64::new(0.0, 0.0)) += u * z;
            }
        }
        let mut v: SparseVec = out.into_iter().filter(|e| e.1.norm() > DROP_TOL).collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }
}

/// A unitary on the whole Fock space, stored as a product of local factors.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    pub label: String,
    pub params: BTreeMap<String, f64>,
    space: FockSpace,
    /// Applied first to last.
    factors: Vec<LocalOp>,
}

impl GateMatrix {
    pub fn identity(space: FockSpace) -> Self {
        GateMatrix {
            label: "I".into(),
            params: BTreeMap::new(),
            space,
            factors: Vec::new(),
        }
    }

    fn single(label: impl Into<String>, space: FockSpace, factor: LocalOp) -> Self {
        GateMatrix {
            label: label.into(),
            params: BTreeMap::new(),
            space,
            factors: vec![factor],
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    /// Product of `gates` applied in the listed order (the first acts first).
    pub fn sequence(label: impl Into<String>, gates: &[&GateMatrix]) -> Result<Self> {
        let space = gates
            .first()
            .map(|g| g.space)
            .ok_or_else(|| Error::Argument("empty gate sequence".into()))?;
        if gates.iter().any(|g| g.space != space) {
            return Err(Error::Argument("gates live on different Fock spaces".into()));
        }
        Ok(GateMatrix {
            label: label.into(),
            params: BTreeMap::new(),
            space,
            factors: gates.iter().flat_map(|g| g.factors.iter().cloned()).collect(),
        })
    }

    pub fn adjoint(&self) -> GateMatrix {
        GateMatrix {
            label: format!("{}†", self.label),
            params: self.params.clone(),
            space: self.space,
            factors: self.factors.iter().rev().map(LocalOp::adjoint).collect(),
        }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Modes touched by any factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut modes: Vec<usize> = self.factors.iter().flat_map(|f| f.modes.iter().copied()).collect();
        modes.sort_unstable();
        modes.dedup();
        modes
    }

    fn apply_in(&self, frame: &Frame, v: SparseVec) -> SparseVec {
        self.factors.iter().fold(v, |acc, f| frame.apply(f, &acc))
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if state.space != self.space {
            return Err(Error::Argument("state and gate live on different Fock spaces".into()));
        }
        let all: Vec<usize> = (0..self.space.modes).collect();
        let frame = Frame::new(self.space.radix(), &all);
        Ok(FockState {
            space: self.space,
            amps: self.apply_in(&frame, state.amps.clone()),
        })
    }

    /// Apply to a state whose ancilla must be in logical `|0⟩`.
    pub fn apply_with_ancilla(&self, state: &FockState, ancilla: DualRailQubit) -> Result<FockState> {
        state.require_logical_zero(ancilla)?;
        self.apply(state)
    }

    /// Columns of the gate restricted to its support, in the support's local basis.
    pub fn local_columns(&self) -> (Vec<usize>, Vec<SparseVec>) {
        let support = self.support();
        let frame = Frame::new(self.space.radix(), &support);
        let dim = self.space.radix().pow(support.len() as u32);
        let cols = (0..dim)
            .map(|c| self.apply_in(&frame, vec![(c, C64::new(1.0, 0.0))]))
            .collect();
        (support, cols)
    }

    /// `max |U†U − I|` over the gate's support (the gate is the identity elsewhere).
    pub fn unitarity_error(&self) -> f64 {
        let (_, cols) = self.local_columns();
        sparse_gram_deviation(&cols)
    }

    /// Largest `max |F†F − I|` over the stored local factors.
    pub fn factor_unitarity_error(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| {
                let m = f.dense();
                (m.adjoint() * &m - DMatrix::identity(m.nrows(), m.ncols()))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `⟨r|U|c⟩` over the logical basis of `qubits` (all other modes empty).
    pub fn logical_block(&self, qubits: &[DualRailQubit]) -> Result<DMatrix<C64>> {
        check_disjoint(qubits)?;
        let dim = 1usize << qubits.len();
        let rows: Vec<usize> = (0..dim).map(|b| self.space.logical_index(qubits, b)).collect();
        let mut m = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            let out = self.apply(&FockState::basis(self.space, rows[c])?)?;
            for (r, &idx) in rows.iter().enumerate() {
                m[(r, c)] = out.amplitude(idx);
            }
        }
        Ok(m)
    }

    /// Coordinate text over the full space: `rows cols nnz`, then
    /// `row col re im` per non-zero, zero-based global indices.
    pub fn to_coordinate_text(&self) -> String {
        let all: Vec<usize> = (0..self.space.modes).collect();
        let frame = Frame::new(self.space.radix(), &all);
        let dim = self.space.dim();
        let cols: Vec<SparseVec> = (0..dim)
            .map(|c| self.apply_in(&frame, vec![(c, C64::new(1.0, 0.0))]))
            .collect();
        let mut entries: Vec<(usize, usize, C64)> = cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, z)| (r, c, z)))
            .collect();
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut out = format!("{dim} {dim} {}\n", entries.len());
        for (r, c, z) in entries {
            writeln!(out, "{r} {c} {:.17e} {:.17e}", z.re, z.im).expect("write to string");
        }
        out
    }
}

fn sparse_gram_deviation(cols: &[SparseVec]) -> f64 {
    let mut by_row: HashMap<usize, Vec<(usize, C64)>> = HashMap::new();
    for (c, col) in cols.iter().enumerate() {
        for &(r, z) in col {
            by_row.entry(r).or_default().push((c, z));
        }
    }
    let mut gram: HashMap<(usize, usize), C64> = HashMap::new();
    for entries in by_row.values() {
        for &(j, zj) in entries {
            for &(k, zk) in entries {
                *gram.entry((j, k)).or_insert(C64::new(0.0, 0.0)) += zj.conj() * zk;
            }
        }
    }
    let diag_missing = (0..cols.len()).any(|j| !gram.contains_key(&(j, j)));
    if diag_missing {
        return 1.0;
    }
    gram.iter()
        .map(|(&(j, k), &z)| {
            let target = if j == k { 1.0 } else { 0.0 };
            (z - target).norm()
        })
        .fold(0.0, f64::max)
}

/// Operator norm of the part of `gate` that maps the logical subspace of
/// `qubits` (other modes empty) outside that subspace.
pub fn leakage_check(gate: &GateMatrix, qubits: &[DualRailQubit]) -> Result<f64> {
    check_disjoint(qubits)?;
    let space = gate.space();
    let dim = 1usize << qubits.len();
    let logical: Vec<usize> = (0..dim).map(|b| space.logical_index(qubits, b)).collect();
    let leaked: Vec<BTreeMap<usize, C64>> = logical
        .iter()
        .map(|&idx| {
            Ok(gate
                .apply(&FockState::basis(space, idx)?)?
                .amps
                .into_iter()
                .filter(|e| !logical.contains(&e.0))
                .collect())
        })
        .collect::<Result<_>>()?;
    let gram = DMatrix::from_fn(dim, dim, |j, k| {
        leaked[j]
            .iter()
            .map(|(i, zj)| zj.conj() * leaked[k].get(i).copied().unwrap_or_default())
            .sum::<C64>()
    });
    let top = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0, f64::max);
    Ok(top.max(0.0).sqrt())
}

/// Entrywise maximum of `|a − b|`.
pub fn max_deviation(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
