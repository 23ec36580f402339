//! The full dual-rail verification sweep, reported as a flat list of checks.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    ancilla_rotation, ccnot, cnot, cr_gate, cz, cz_via_ancilla, exp_cond_swap, exp_cond_swap_reversed,
    leakage_check, max_deviation, miswired_beam_splitter, swap_via_cz, swap_via_cz_inline, Axis,
    DualRailLayout, DualRailQubit, FockState, GateMatrix,
};
use crate::error::Result;

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_max_values: Vec<usize>,
    pub t_pr_values: Vec<f64>,
    pub pair_counts: Vec<usize>,
    pub random_inputs: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let mut t = vec![0.0];
        for x in [0.3, 0.7, FRAC_PI_4, FRAC_PI_2, 1.5] {
            t.extend([x, -x]);
        }
        SweepConfig {
            n_max_values: vec![1, 2],
            t_pr_values: t,
            pair_counts: vec![1, 2],
            random_inputs: 8,
            seed: 0x5eed,
            tolerance: 1e-10,
        }
    }
}

/// A check passes when `value ≤ threshold`, or `value > threshold` for
/// negative controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixCheck {
    pub name: String,
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_pr: Option<f64>,
    pub value: f64,
    pub threshold: f64,
    pub must_exceed: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub passed: bool,
    pub max_deviation: f64,
    pub checks: Vec<AppendixCheck>,
}

struct Recorder {
    n_max: usize,
    checks: Vec<AppendixCheck>,
}

impl Recorder {
    fn push(&mut self, name: &str, pairs: Option<usize>, t_pr: Option<f64>, value: f64, threshold: f64, must_exceed: bool) {
        let passed = if must_exceed { value > threshold } else { value <= threshold };
        self.checks.push(AppendixCheck {
            name: name.into(),
            n_max: self.n_max,
            pairs,
            t_pr,
            value,
            threshold,
            must_exceed,
            passed,
        });
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ e^{iθσ}` on (control, target).
pub(crate) fn controlled_rotation(axis: Axis, theta: f64) -> DMatrix<C64> {
    let (s, co) = theta.sin_cos();
    let sigma = match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    };
    let rot = DMatrix::identity(2, 2) * c(co, 0.0) + sigma * c(0.0, s);
    let mut m = DMatrix::identity(4, 4);
    m.view_mut((2, 2), (2, 2)).copy_from(&rot);
    m
}

/// Permutation matrix of a bit map on `bits`-qubit basis states.
pub(crate) fn permutation(bits: usize, f: impl Fn(usize) -> usize) -> DMatrix<C64> {
    let dim = 1 << bits;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        m[(f(x), x)] = c(1.0, 0.0);
    }
    m
}

/// Exchange bit pairs `(2p, 2p+1)` (counted from the most significant of
/// `bits`) for `p < pairs`.
pub(crate) fn pair_swap_bits(x: usize, pairs: usize, bits: usize) -> usize {
    let mut y = x;
    for p in 0..pairs {
        let hi = bits - 1 - 2 * p;
        let lo = hi - 1;
        let (bh, bl) = ((x >> hi) & 1, (x >> lo) & 1);
        y = (y & !(1 << hi) & !(1 << lo)) | (bl << hi) | (bh << lo);
    }
    y
}

/// `(cos θ I + i sin θ S) ⊗ |0⟩⟨0|_A` restricted to ancilla-zero columns,
/// with the ancilla as the least significant bit.
pub(crate) fn expected_cond_swap(pairs: usize, t: f64) -> DMatrix<C64> {
    let bits = 2 * pairs + 1;
    let dim = 1 << bits;
    let (s, co) = t.sin_cos();
    let mut m = DMatrix::zeros(dim, dim);
    for x in (0..dim).step_by(2) {
        m[(x, x)] += c(co, 0.0);
        m[(pair_swap_bits(x, pairs, bits), x)] += c(0.0, s);
    }
    m
}

fn ancilla_zero_columns(block: &DMatrix<C64>) -> DMatrix<C64> {
    let mut m = block.clone();
    for col in (1..m.ncols()).step_by(2) {
        m.column_mut(col).fill(c(0.0, 0.0));
    }
    m
}

fn random_logical(rng: &mut ChaCha8Rng, qubits: usize) -> Vec<C64> {
    (0..1usize << qubits)
        .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect()
}

/// Worst deviation of the ancilla's reduced state from `|0⟩⟨0|` after `gate`.
fn ancilla_disentangle_error(
    gate: &GateMatrix,
    layout: &DualRailLayout,
    data: &[DualRailQubit],
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<f64> {
    let ancilla = layout.ancilla.expect("layout with ancilla");
    let space = layout.space;
    let zero_local = space.radix();
    let mut qubits = data.to_vec();
    qubits.push(ancilla);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let data_amps = random_logical(rng, data.len());
        let mut amps = vec![c(0.0, 0.0); 1 << qubits.len()];
        for (x, z) in data_amps.into_iter().enumerate() {
            amps[x << 1] = z;
        }
        let input = FockState::logical(space, &qubits, &amps)?;
        let out = gate.apply_with_ancilla(&input, ancilla)?;
        let rho = out.reduced_density(&[ancilla.a, ancilla.b]);
        let mut target = DMatrix::zeros(rho.nrows(), rho.ncols());
        target[(zero_local, zero_local)] = c(1.0, 0.0);
        worst = worst.max(max_deviation(&rho, &target));
    }
    Ok(worst)
}

fn sweep_one(n_max: usize, cfg: &SweepConfig, rng: &mut ChaCha8Rng) -> Result<Vec<AppendixCheck>> {
    let tol = cfg.tolerance;
    let mut rec = Recorder {
        n_max,
        checks: Vec::new(),
    };

    let two = DualRailLayout::new(2, false, n_max)?;
    let (space, q) = (two.space, [two.qubits[0], two.qubits[1]]);
    for (axis, theta) in [(Axis::X, FRAC_PI_2), (Axis::Y, 0.37), (Axis::Z, FRAC_PI_2), (Axis::X, -1.1)] {
        let g = cr_gate(axis, theta, q[0], q[1], space)?;
        let name = format!("CR^{axis:?} block form");
        rec.push(&name, None, Some(theta), max_deviation(&g.logical_block(&q)?, &controlled_rotation(axis, theta)), tol, false);
        rec.push(&format!("CR^{axis:?} unitary"), None, Some(theta), g.unitarity_error(), tol, false);
        if n_max >= 2 {
            rec.push(&format!("CR^{axis:?} leakage"), None, Some(theta), leakage_check(&g, &q)?, tol, false);
        }
    }
    let cx = permutation(2, |x| if x & 2 != 0 { x ^ 1 } else { x });
    rec.push("CNOT", None, None, max_deviation(&cnot(q[0], q[1], space)?.logical_block(&q)?, &cx), tol, false);
    let czm = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]));
    rec.push("CZ", None, None, max_deviation(&cz(q[0], q[1], space)?.logical_block(&q)?, &czm), tol, false);

    let swap = swap_via_cz(q[0], q[1], space)?;
    let swap_m = permutation(2, |x| pair_swap_bits(x, 1, 2));
    rec.push("SWAP = U CZ U†", Some(1), None, max_deviation(&swap.logical_block(&q)?, &swap_m), tol, false);
    rec.push("SWAP unitary", Some(1), None, swap.unitarity_error(), tol, false);
    let inline = swap_via_cz_inline(q[0], q[1], space)?;
    rec.push("SWAP with CR^Y(+π/4) differs", Some(1), None, max_deviation(&inline.logical_block(&q)?, &swap_m), 0.1, true);
    if n_max >= 2 {
        rec.push("SWAP leakage", Some(1), None, leakage_check(&swap, &q)?, tol, false);
        let bs = miswired_beam_splitter(q[0].a, q[1].a, FRAC_PI_4, space)?;
        rec.push("mis-wired beam splitter leaks", None, None, leakage_check(&bs, &q)?, 0.1, true);
    }

    let three = DualRailLayout::new(2, true, n_max)?;
    let anc = three.ancilla.expect("ancilla");
    let all3 = three.all_qubits();
    let cz_a = cz_via_ancilla(three.qubits[0], three.qubits[1], anc, three.space)?;
    let mut expected = DMatrix::zeros(8, 8);
    for x in 0..4usize {
        expected[(x << 1, x << 1)] = czm[(x, x)];
    }
    rec.push("CZ via ancilla", Some(1), None, max_deviation(&ancilla_zero_columns(&cz_a.logical_block(&all3)?), &expected), tol, false);
    rec.push("CZ via ancilla unitary", Some(1), None, cz_a.unitarity_error(), tol, false);
    let t = ccnot(three.qubits[0], three.qubits[1], anc, three.space)?;
    rec.push("CCNOT unitary", None, None, t.unitarity_error(), tol, false);
    let dis = ancilla_disentangle_error(&cz_a, &three, &three.qubits, rng, cfg.random_inputs)?;
    rec.push("CZ via ancilla disentangles", Some(1), None, dis, tol, false);

    for &pairs in &cfg.pair_counts {
        let layout = DualRailLayout::new(2 * pairs, true, n_max)?;
        let anc = layout.ancilla.expect("ancilla");
        let pq: Vec<(DualRailQubit, DualRailQubit)> =
            (0..pairs).map(|p| (layout.qubits[2 * p], layout.qubits[2 * p + 1])).collect();
        let all = layout.all_qubits();
        for &tp in &cfg.t_pr_values {
            let g = exp_cond_swap(tp, &pq, anc, layout.space)?;
            let block = ancilla_zero_columns(&g.logical_block(&all)?);
            rec.push("exp(itpS) circuit", Some(pairs), Some(tp), max_deviation(&block, &expected_cond_swap(pairs, tp)), tol, false);
        }
        let probe = 0.7;
        let g = exp_cond_swap(probe, &pq, anc, layout.space)?;
        rec.push("exp(itpS) unitary", Some(pairs), Some(probe), g.unitarity_error(), tol, false);
        let dis = ancilla_disentangle_error(&g, &layout, &layout.qubits, rng, cfg.random_inputs)?;
        rec.push("exp(itpS) disentangles ancilla", Some(pairs), Some(probe), dis, tol, false);
        let rev = exp_cond_swap_reversed(probe, &pq, anc, layout.space)?;
        let block = ancilla_zero_columns(&rev.logical_block(&all)?);
        rec.push("reversed U/U† breaks identity", Some(pairs), Some(probe), max_deviation(&block, &expected_cond_swap(pairs, probe)), 0.1, true);
        let r = ancilla_rotation(anc, probe, layout.space)?;
        rec.push("ancilla rotation unitary", Some(pairs), Some(probe), r.unitarity_error(), tol, false);
    }
    Ok(rec.checks)
}

/// Run every dual-rail identity over the configured grid.
pub fn appendix_sweep(cfg: &SweepConfig) -> Result<AppendixReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    for &n_max in &cfg.n_max_values {
        checks.extend(sweep_one(n_max, cfg, &mut rng)?);
    }
    let max_deviation = checks
        .iter()
        .filter(|c| !c.must_exceed)
        .map(|c| c.value)
        .fold(0.0, f64::max);
    Ok(AppendixReport {
        passed: checks.iter().all(|c| c.passed),
        max_deviation,
        checks,
    })
}
