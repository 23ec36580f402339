use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::sweep::{controlled_rotation, expected_cond_swap, pair_swap_bits, permutation};
use super::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn two(n_max: usize) -> (FockSpace, [DualRailQubit; 2]) {
    let l = DualRailLayout::new(2, false, n_max).unwrap();
    (l.space, [l.qubits[0], l.qubits[1]])
}

#[test]
fn space_indexing() {
    let s = FockSpace::new(3, 2).unwrap();
    assert_eq!(s.dim(), 27);
    assert_eq!(s.index(&[1, 0, 2]).unwrap(), 11);
    assert_eq!(s.occupations(11), vec![1, 0, 2]);
    assert!(FockSpace::new(3, 0).is_err());
    assert!(s.index(&[3, 0, 0]).is_err());
    let l = DualRailLayout::new(2, true, 1).unwrap();
    assert_eq!(l.ancilla, Some(DualRailQubit { a: 4, b: 5 }));
    // |1⟩|0⟩ on qubits (0,1),(2,3): modes 1 and 2 occupied.
    assert_eq!(l.space.logical_index(&l.qubits, 0b10), l.space.index(&[0, 1, 1, 0, 0, 0]).unwrap());
}

#[test]
fn ladder_commutator_below_cutoff() {
    for n_max in 1..5 {
        let a = annihilation(n_max);
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for i in 0..n_max {
            for j in 0..n_max {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(comm[(i, j)].re, want, epsilon = 1e-14);
                assert_abs_diff_eq!(comm[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }
}

#[test]
fn zero_angle_is_identity() {
    let (s, q) = two(2);
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let g = cr_gate(axis, 0.0, q[0], q[1], s).unwrap();
        let (_, cols) = g.local_columns();
        for (i, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), 1);
            assert_eq!(col[0].0, i);
            assert_abs_diff_eq!(col[0].1.re, 1.0, epsilon = 1e-14);
        }
    }
}

#[test]
fn cr_reductions_match_block_form() {
    let (s, q) = two(2);
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for theta in [FRAC_PI_2, 0.3, -1.2] {
            let g = cr_gate(axis, theta, q[0], q[1], s).unwrap();
            let dev = max_deviation(&g.logical_block(&q).unwrap(), &controlled_rotation(axis, theta));
            assert!(dev < 1e-10, "{axis:?} {theta}: {dev}");
            assert!(g.unitarity_error() < 1e-10);
            assert!(leakage_check(&g, &q).unwrap() < 1e-10);
        }
    }
}

#[test]
fn cr_x_half_pi_is_cnot_up_to_control_phase() {
    let (s, q) = two(1);
    let block = cr_gate(Axis::X, FRAC_PI_2, q[0], q[1], s).unwrap().logical_block(&q).unwrap();
    // control |1⟩ block is iX
    assert_abs_diff_eq!(block[(3, 2)].im, 1.0, epsilon = 1e-12);
    let exact = cnot(q[0], q[1], s).unwrap().logical_block(&q).unwrap();
    let cx = permutation(2, |x| if x & 2 != 0 { x ^ 1 } else { x });
    assert!(max_deviation(&exact, &cx) < 1e-12);
    let czb = cz(q[0], q[1], s).unwrap().logical_block(&q).unwrap();
    let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1.0), c(1.0), c(-1.0)]));
    assert!(max_deviation(&czb, &want) < 1e-12);
}

#[test]
fn overlapping_pairs_rejected() {
    let s = FockSpace::new(4, 1).unwrap();
    let q0 = DualRailQubit::new(0, 1).unwrap();
    let q1 = DualRailQubit::new(1, 2).unwrap();
    assert!(matches!(cr_gate(Axis::X, 0.1, q0, q1, s), Err(Error::Aliasing(_))));
    assert!(DualRailQubit::new(3, 3).is_err());
    let q2 = DualRailQubit::new(2, 3).unwrap();
    assert!(matches!(
        exp_cond_swap(0.1, &[(q0, q2), (q2, q0)], DualRailQubit::new(4, 5).unwrap(), FockSpace::new(6, 1).unwrap()),
        Err(Error::Aliasing(_))
    ));
}

#[test]
fn swap_from_cz() {
    for n_max in [1, 2] {
        let (s, q) = two(n_max);
        let g = swap_via_cz(q[0], q[1], s).unwrap();
        let block = g.logical_block(&q).unwrap();
        let out = g.apply(&FockState::basis(s, s.logical_index(&q, 0b01)).unwrap()).unwrap();
        assert_abs_diff_eq!(out.amplitude(s.logical_index(&q, 0b10)).re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(block[(0, 0)].re, 1.0, epsilon = 1e-10);
        let perm = permutation(2, |x| pair_swap_bits(x, 1, 2));
        assert!(max_deviation(&block, &perm) < 1e-10);
        let signed = swap_via_cz_inline(q[0], q[1], s).unwrap().logical_block(&q).unwrap();
        assert!(max_deviation(&signed, &perm) > 0.1);
    }
}

#[test]
fn ancilla_cz() {
    let l = DualRailLayout::new(2, true, 2).unwrap();
    let (i, j, a) = (l.qubits[0], l.qubits[1], l.ancilla.unwrap());
    let all = l.all_qubits();
    let g = cz_via_ancilla(i, j, a, l.space).unwrap();
    let s11 = FockState::basis(l.space, l.space.logical_index(&all, 0b110)).unwrap();
    let out = g.apply_with_ancilla(&s11, a).unwrap();
    assert_abs_diff_eq!(out.inner(&s11).re, -1.0, epsilon = 1e-12);
    let s00 = FockState::basis(l.space, l.space.logical_index(&all, 0b000)).unwrap();
    assert_abs_diff_eq!(g.apply(&s00).unwrap().inner(&s00).re, 1.0, epsilon = 1e-12);
    let dirty = FockState::basis(l.space, l.space.logical_index(&all, 0b001)).unwrap();
    assert!(matches!(g.apply_with_ancilla(&dirty, a), Err(Error::Precondition(_))));
}

#[test]
fn cond_swap_examples() {
    let l = DualRailLayout::new(2, true, 1).unwrap();
    let pairs = [(l.qubits[0], l.qubits[1])];
    let a = l.ancilla.unwrap();
    let all = l.all_qubits();
    let block = |t: f64| {
        let g = exp_cond_swap(t, &pairs, a, l.space).unwrap();
        let mut m = g.logical_block(&all).unwrap();
        for col in (1..8).step_by(2) {
            m.column_mut(col).fill(c(0.0));
        }
        m
    };
    let id0 = block(0.0);
    assert!(max_deviation(&id0, &expected_cond_swap(1, 0.0)) < 1e-10);
    let half = block(FRAC_PI_2);
    // |01⟩|0⟩ → i|10⟩|0⟩
    assert_abs_diff_eq!(half[(0b100, 0b010)].im, 1.0, epsilon = 1e-10);
    assert!(max_deviation(&half, &expected_cond_swap(1, FRAC_PI_2)) < 1e-10);
}

#[test]
fn two_pair_circuit_matches_matrix_exponential() {
    // Oracle: exp(iθ S) for the 4-qubit permutation S = SWAP⊗SWAP, by series.
    let t = 0.7;
    let s = permutation(4, |x| pair_swap_bits(x, 2, 4));
    let oracle = (s * Complex64::new(0.0, t)).exp();
    let l = DualRailLayout::new(4, true, 1).unwrap();
    let pairs = [(l.qubits[0], l.qubits[1]), (l.qubits[2], l.qubits[3])];
    let g = exp_cond_swap(t, &pairs, l.ancilla.unwrap(), l.space).unwrap();
    let block = g.logical_block(&l.all_qubits()).unwrap();
    for x in 0..16 {
        for y in 0..16 {
            assert!((block[(x << 1, y << 1)] - oracle[(x, y)]).norm() < 1e-10);
            assert!(block[((x << 1) | 1, y << 1)].norm() < 1e-10);
        }
    }
    let rev = exp_cond_swap_reversed(t, &pairs, l.ancilla.unwrap(), l.space).unwrap();
    let rb = rev.logical_block(&l.all_qubits()).unwrap();
    let worst = (0..16)
        .flat_map(|x| (0..16).map(move |y| (x, y)))
        .map(|(x, y)| (rb[(x << 1, y << 1)] - oracle[(x, y)]).norm())
        .fold(0.0, f64::max);
    assert!(worst > 0.1);
}

#[test]
fn leakage_fixtures() {
    let (s, q) = two(2);
    assert_eq!(leakage_check(&GateMatrix::identity(s), &q).unwrap(), 0.0);
    let bs = miswired_beam_splitter(q[0].a, q[1].a, FRAC_PI_4, s).unwrap();
    assert!(leakage_check(&bs, &q).unwrap() > 0.1);
    assert!(bs.unitarity_error() < 1e-10);
}

#[test]
fn coordinate_export() {
    let s = FockSpace::new(2, 1).unwrap();
    let q = DualRailQubit::new(0, 1).unwrap();
    let text = z_ancilla(q, s).unwrap().to_coordinate_text();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("4 4 4"));
    // |01⟩ has index 1 and picks up −1
    let row1: Vec<f64> = lines.nth(1).unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&row1[..2], &[1.0, 1.0]);
    assert_abs_diff_eq!(row1[2], -1.0, epsilon = 1e-12);
}

#[test]
fn reduced_density_of_product_state() {
    let l = DualRailLayout::new(1, true, 1).unwrap();
    let st = FockState::logical(l.space, &l.all_qubits(), &[c(1.0), c(0.0), c(1.0), c(0.0)]).unwrap();
    let rho = st.reduced_density(&[2, 3]);
    assert_abs_diff_eq!(rho[(2, 2)].re, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(st.norm(), 1.0, epsilon = 1e-14);
}

#[test]
fn default_sweep_passes() {
    let report = appendix_sweep(&SweepConfig::default()).unwrap();
    for chk in report.checks.iter().filter(|c| !c.passed) {
        panic!("failed: {chk:?}");
    }
    assert!(report.passed);
    assert!(report.max_deviation < 1e-10);
}
