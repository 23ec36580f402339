//! Property tests for the invariants of each layer, checked against
//! brute-force oracles written here.

use num_complex::Complex64;
use proptest::prelude::*;

use cvtda_core::complex::{enumerate_vr_scan, membership, SimplexBits};
use cvtda_core::cvsim::{
    eigendecompose, exact_conjugation, exp_swap_step, trace_distance, trotterized_evolution,
};
use cvtda_core::homology::{
    betti_by_rank, betti_by_spectrum, betti_exact, dirac_operator, euler_characteristic,
    verify_chain_complex, verify_dirac_square,
};
use cvtda_core::statevector::{
    grover_success_closed_form, grover_with_mask, phase_flip, tag_sectors, tag_sectors_direct,
    uniform_state, Iterations,
};
use cvtda_core::{
    enumerate_vr, normalize_to_unit_sphere, pairwise_sq_distances, simplex_diameter, PointCloud,
    TrotterParams,
};
use nalgebra::DMatrix;

fn cloud(max_n: usize) -> impl Strategy<Value = PointCloud> {
    (1..=max_n, 1usize..=3).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), n)
            .prop_map(|rows| PointCloud::from_rows(&rows).unwrap())
    })
}

fn brute_diameter(pc: &PointCloud, s: SimplexBits) -> f64 {
    let v: Vec<usize> = s.vertices().collect();
    let mut best: f64 = 0.0;
    for (x, &i) in v.iter().enumerate() {
        for &j in &v[x + 1..] {
            let d2: f64 = pc.row(i).iter().zip(pc.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
            best = best.max(d2.sqrt());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_symmetric_zero_diagonal(pc in cloud(12)) {
        let dm = pairwise_sq_distances(&pc);
        for i in 0..pc.n() {
            prop_assert_eq!(dm.sq(i, i), 0.0);
            for j in 0..pc.n() {
                prop_assert_eq!(dm.sq(i, j), dm.sq(j, i));
                prop_assert!(dm.sq(i, j) >= 0.0);
            }
        }
    }

    #[test]
    fn normalized_distances_bounded(pc in cloud(10)) {
        if let Ok(unit) = normalize_to_unit_sphere(&pc) {
            let dm = pairwise_sq_distances(&unit);
            prop_assert!(dm.as_slice().iter().all(|&x| (0.0..=4.0 + 1e-12).contains(&x)));
        }
    }

    #[test]
    fn diameter_matches_pairs_and_is_monotone(pc in cloud(10), word in 1u32..1024) {
        let n = pc.n();
        let s = SimplexBits::new(word & ((1 << n) - 1));
        prop_assume!(!s.is_empty());
        let dm = pairwise_sq_distances(&pc);
        let d = simplex_diameter(&dm, s).unwrap();
        prop_assert!((d - brute_diameter(&pc, s)).abs() <= 1e-12);
        for (_, face) in s.faces().filter(|(_, f)| !f.is_empty()) {
            prop_assert!(simplex_diameter(&dm, face).unwrap() <= d);
            prop_assert_eq!(face.len(), s.len() - 1);
        }
    }

    #[test]
    fn membership_iff_diameter(pc in cloud(8), eps in 0.0f64..2.0) {
        let dm = pairwise_sq_distances(&pc);
        for w in 1u32..(1 << pc.n()) {
            let s = SimplexBits::new(w);
            prop_assert_eq!(membership(s, eps, &dm), simplex_diameter(&dm, s).unwrap() <= eps);
        }
    }

    #[test]
    fn enumeration_equals_scan_and_is_closed(pc in cloud(10), eps in 0.0f64..2.0) {
        let dm = pairwise_sq_distances(&pc);
        let kmax = pc.n() - 1;
        let vr = enumerate_vr(&dm, eps, kmax).unwrap();
        prop_assert_eq!(&vr, &enumerate_vr_scan(&dm, eps, kmax).unwrap());
        prop_assert!(vr.is_face_closed());
        for level in vr.levels().iter().skip(1) {
            for &s in level {
                for (_, f) in s.faces() {
                    prop_assert!(vr.contains(f));
                }
            }
        }
    }

    #[test]
    fn enumeration_monotone_in_eps(pc in cloud(8), a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let dm = pairwise_sq_distances(&pc);
        let small = enumerate_vr(&dm, lo, pc.n() - 1).unwrap();
        let big = enumerate_vr(&dm, hi, pc.n() - 1).unwrap();
        for level in small.levels() {
            for &s in level {
                prop_assert!(big.contains(s));
            }
        }
    }

    #[test]
    fn chain_complex_and_dirac_square(pc in cloud(8), eps in 0.0f64..2.0) {
        let dm = pairwise_sq_distances(&pc);
        let vr = enumerate_vr(&dm, eps, pc.n() - 1).unwrap();
        prop_assert!(verify_chain_complex(&vr));
        prop_assert!(verify_dirac_square(&vr));
        prop_assert_eq!(dirac_operator(&vr).trace(), 0);
    }

    #[test]
    fn betti_routes_agree_with_euler(pc in cloud(7), eps in 0.0f64..2.0) {
        let vr = enumerate_vr(&pairwise_sq_distances(&pc), eps, pc.n() - 1).unwrap();
        let mut chi = 0i64;
        for k in 0..pc.n() {
            let b = betti_by_rank(&vr, k).unwrap();
            prop_assert_eq!(b, betti_by_spectrum(&vr, k).unwrap());
            prop_assert!(b <= vr.count(k));
            chi += if k % 2 == 0 { b as i64 } else { -(b as i64) };
        }
        prop_assert_eq!(chi, euler_characteristic(&vr));
    }

    #[test]
    fn betti_invariant_under_relabeling(
        (pc, perm) in cloud(7).prop_flat_map(|pc| {
            let n = pc.n();
            (Just(pc), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        }),
        eps in 0.0f64..2.0,
    ) {
        let kmax = pc.n() - 1;
        let a = enumerate_vr(&pairwise_sq_distances(&pc), eps, kmax).unwrap();
        let q = pc.permuted(&perm).unwrap();
        let b = enumerate_vr(&pairwise_sq_distances(&q), eps, kmax).unwrap();
        for k in 0..pc.n() {
            prop_assert_eq!(betti_exact(&a, k).unwrap(), betti_exact(&b, k).unwrap());
        }
    }

    #[test]
    fn kernel_count_matches_betti(pc in cloud(7), eps in 0.0f64..2.0) {
        let vr = enumerate_vr(&pairwise_sq_distances(&pc), eps, pc.n() - 1).unwrap();
        let eig = eigendecompose(&dirac_operator(&vr), 1.0).unwrap();
        let total: usize = (0..pc.n()).map(|k| betti_exact(&vr, k).unwrap()).sum();
        prop_assert_eq!(eig.kernel_count(), total);
        for k in 0..pc.n() {
            prop_assert_eq!(eig.kernel_count_in_sector(k), betti_exact(&vr, k).unwrap());
        }
    }

    #[test]
    fn phase_flip_is_an_involution(n in 1usize..=8, mask_bits in any::<u64>()) {
        let state = uniform_state(n).unwrap();
        let mask: Vec<bool> = (0..1usize << n).map(|y| (mask_bits >> (y % 64)) & 1 == 1).collect();
        let twice = phase_flip(&phase_flip(&state, &mask).unwrap(), &mask).unwrap();
        prop_assert_eq!(twice.amplitudes(), state.amplitudes());
    }

    #[test]
    fn grover_matches_closed_form(n in 1usize..=10, seed in any::<u64>(), r in 0usize..=20) {
        let total = 1usize << n;
        let marked_count = 1 + (seed as usize % total);
        let mut mask = vec![false; total];
        // spread the marked states with a stride coprime to 2^n
        for i in 0..marked_count {
            mask[(i * 2654435761usize) % total] = true;
        }
        let m = mask.iter().filter(|&&b| b).count();
        prop_assume!(m == marked_count);
        let out = grover_with_mask(&uniform_state(n).unwrap(), &mask, Iterations::Fixed(r)).unwrap();
        prop_assert!((out.success_probability - grover_success_closed_form(total, m, r)).abs() <= 1e-10);
        prop_assert!((out.state.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tagging_circuit_equals_popcount(n in 1usize..=12, phase in 0.0f64..6.28) {
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|y| Complex64::from_polar(1.0, phase * y as f64))
            .map(|z| z / ((1usize << n) as f64).sqrt())
            .collect();
        let state = cvtda_core::QuantumState::from_amplitudes(n, amps).unwrap();
        prop_assert_eq!(tag_sectors(&state), tag_sectors_direct(&state));
    }

    #[test]
    fn exp_swap_keeps_density(
        a in prop::collection::vec(-1.0f64..1.0, 8),
        b in prop::collection::vec(-1.0f64..1.0, 8),
        dt in 0.0f64..1.0,
        p in -2.0f64..2.0,
    ) {
        let rho = density_from(&a);
        let sigma = density_from(&b);
        let out = exp_swap_step(&rho, &sigma, p, dt).unwrap();
        prop_assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        prop_assert_eq!(&out, &out.adjoint());
        prop_assert!(trace_distance(&out, &exact_conjugation(&rho, &sigma, p, dt)) <= (p * dt).powi(2) * 2.0 + 1e-12);
    }
}

/// `M M† / tr` for a 2×2 complex `M` built from eight reals.
fn density_from(x: &[f64]) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(2, 2, |i, j| Complex64::new(x[2 * (2 * i + j)], x[2 * (2 * i + j) + 1]));
    let mut r = &m * m.adjoint();
    let tr = r.trace().re.max(1e-9);
    r.unscale_mut(tr);
    if r.trace().re < 0.5 {
        return DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]));
    }
    r
}

#[test]
fn trotter_linear_on_four_dimensional_generator() {
    let a = DMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            Complex64::new(1.0 + i as f64, 0.0)
        } else {
            Complex64::new(0.1 * (i + j) as f64, 0.05 * (i as f64 - j as f64))
        }
    });
    let rho = DMatrix::from_fn(4, 4, |i, j| Complex64::new(if i == j { 0.25 } else { 0.1 }, 0.0));
    let err = |dt: f64| {
        let p = TrotterParams {
            delta_t: dt,
            p_r: 1.0,
            total_t: 0.5,
        };
        let out = trotterized_evolution(&rho, &a, &p).unwrap();
        trace_distance(&out.rho, &exact_conjugation(&rho, &a, 1.0, out.effective_t))
    };
    let ratio = err(0.02) / err(0.01);
    assert!((ratio - 2.0).abs() <= 0.3, "ratio {ratio}");
}
