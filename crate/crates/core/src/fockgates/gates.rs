use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_disjoint, DualRailQubit, FockSpace, GateMatrix, LocalOp, SparseVec};
use crate::cvsim::hermitian_exp;
use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    Create,
    Annihilate,
    Number,
}

use Ladder::{Annihilate, Create, Number};

/// `coefficient × product of ladder operators`, rightmost applied first.
type Term = (C64, Vec<(usize, Ladder)>);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense generator on `modes` (first most significant).
fn local_generator(space: &FockSpace, modes: &[usize], terms: &[Term]) -> DMatrix<C64> {
    let r = space.radix();
    let dim = r.pow(modes.len() as u32);
    let position = |m: usize| modes.iter().position(|&x| x == m).expect("term mode in factor");
    let mut h = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let mut occ: Vec<usize> = (0..modes.len())
            .map(|p| (c / r.pow((modes.len() - 1 - p) as u32)) % r)
            .collect();
        let base = occ.clone();
        for (coef, ops) in terms {
            occ.copy_from_slice(&base);
            let mut amp = *coef;
            let mut alive = true;
            for &(m, op) in ops.iter().rev() {
                let n = &mut occ[position(m)];
                match op {
                    Number => amp *= *n as f64,
                    Annihilate if *n == 0 => alive = false,
                    Annihilate => {
                        amp *= (*n as f64).sqrt();
                        *n -= 1;
                    }
                    Create if *n == space.n_max() => alive = false,
                    Create => {
                        *n += 1;
                        amp *= (*n as f64).sqrt();
                    }
                }
                if !alive {
                    break;
                }
            }
            if alive {
                let row = occ.iter().fold(0, |acc, &d| acc * r + d);
                h[(row, c)] += amp;
            }
        }
    }
    h
}

/// `exp(iθH)` for the Hermitian generator built from `terms`.
fn exp_gate(
    label: &str,
    space: FockSpace,
    modes: Vec<usize>,
    terms: &[Term],
    theta: f64,
) -> Result<GateMatrix> {
    let h = local_generator(&space, &modes, terms);
    let asym = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > 1e-12 {
        return Err(Error::NotSymmetric(asym));
    }
    let factor = LocalOp::from_dense(&space, modes, &hermitian_exp(&h, theta))?;
    Ok(GateMatrix::single(label, space, factor).with_param("theta", theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Controlled rotation `exp(iθ b_c†b_c G_t)` with `G_t` the number-conserving
/// hopping (`X`), the anti-Hermitian hopping times `−i` (`Y`), or the number
/// difference (`Z`) on the target pair. On the logical subspace this is
/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ e^{iθσ}`.
pub fn cr_gate(
    axis: Axis,
    theta: f64,
    control: DualRailQubit,
    target: DualRailQubit,
    space: FockSpace,
) -> Result<GateMatrix> {
    check_disjoint(&[control, target])?;
    let (n, a, b) = (control.b, target.a, target.b);
    let terms: Vec<Term> = match axis {
        Axis::X => vec![
            (re(1.0), vec![(a, Create), (b, Annihilate), (n, Number)]),
            (re(1.0), vec![(a, Annihilate), (b, Create), (n, Number)]),
        ],
        // exp(θ n (a†b − ab†)) written as exp(iθH) with H = −i n (a†b − ab†).
        Axis::Y => vec![
            (C64::new(0.0, -1.0), vec![(a, Create), (b, Annihilate), (n, Number)]),
            (C64::new(0.0, 1.0), vec![(a, Annihilate), (b, Create), (n, Number)]),
        ],
        Axis::Z => vec![
            (re(1.0), vec![(a, Number), (n, Number)]),
            (re(-1.0), vec![(b, Number), (n, Number)]),
        ],
    };
    let label = format!("CR^{axis:?}");
    exp_gate(&label, space, vec![n, a, b], &terms, theta)
}

/// `exp(iθ b_c†b_c)`: a phase on logical `|1⟩` of `control`.
pub fn controlled_phase_fix(control: DualRailQubit, theta: f64, space: FockSpace) -> Result<GateMatrix> {
    exp_gate("P", space, vec![control.b], &[(re(1.0), vec![(control.b, Number)])], theta)
}

/// `exp(−iπ/2 b_c†b_c) · CR^X(π/2)`, exactly CNOT on the logical subspace.
pub fn cnot(control: DualRailQubit, target: DualRailQubit, space: FockSpace) -> Result<GateMatrix> {
    let cr = cr_gate(Axis::X, FRAC_PI_2, control, target, space)?;
    let fix = controlled_phase_fix(control, -FRAC_PI_2, space)?;
    GateMatrix::sequence("CNOT", &[&cr, &fix])
}

/// `exp(−iπ/2 b_c†b_c) · CR^Z(π/2)`, exactly CZ on the logical subspace.
pub fn cz(control: DualRailQubit, target: DualRailQubit, space: FockSpace) -> Result<GateMatrix> {
    let cr = cr_gate(Axis::Z, FRAC_PI_2, control, target, space)?;
    let fix = controlled_phase_fix(control, -FRAC_PI_2, space)?;
    GateMatrix::sequence("CZ", &[&cr, &fix])
}

/// `exp(iπ b_A†b_A)`, equal to `Z` on the logical subspace of `ancilla`.
pub fn z_ancilla(ancilla: DualRailQubit, space: FockSpace) -> Result<GateMatrix> {
    let mut g = controlled_phase_fix(ancilla, PI, space)?;
    g.label = "Z_A".into();
    Ok(g)
}

/// `exp(i t p_R (a_A†a_A − b_A†b_A))`.
pub fn ancilla_rotation(ancilla: DualRailQubit, t_pr: f64, space: FockSpace) -> Result<GateMatrix> {
    let terms = [
        (re(1.0), vec![(ancilla.a, Number)]),
        (re(-1.0), vec![(ancilla.b, Number)]),
    ];
    let g = exp_gate("R_A", space, vec![ancilla.a, ancilla.b], &terms, t_pr)?;
    Ok(g.with_param("t_pR", t_pr))
}

/// Toffoli on the logical subspace of three dual-rail qubits; identity on
/// every other occupation pattern of their six modes.
pub fn ccnot(
    c1: DualRailQubit,
    c2: DualRailQubit,
    target: DualRailQubit,
    space: FockSpace,
) -> Result<GateMatrix> {
    check_disjoint(&[c1, c2, target])?;
    let modes = vec![c1.a, c1.b, c2.a, c2.b, target.a, target.b];
    let r = space.radix();
    let dim = r.pow(6);
    let digits = |i: usize| -> [usize; 6] { std::array::from_fn(|p| (i / r.pow(5 - p as u32)) % r) };
    let cols: Vec<SparseVec> = (0..dim)
        .map(|c| {
            let d = digits(c);
            let one = |x: usize, y: usize| d[x] == 0 && d[y] == 1;
            let logical_target = (d[4] + d[5] == 1) && d[4] <= 1;
            let row = if one(0, 1) && one(2, 3) && logical_target {
                // swap the target pair's occupations
                c - d[4] * r - d[5] + d[5] * r + d[4]
            } else {
                c
            };
            vec![(row, re(1.0))]
        })
        .collect();
    let factor = LocalOp::new(&space, modes, cols)?;
    Ok(GateMatrix::single("CCNOT", space, factor))
}

/// `U_ij = CNOT_ji · CR^Y_ij(−π/4)`, the circuit with `SWAP = U·CZ·U†`.
pub fn swap_u(i: DualRailQubit, j: DualRailQubit, space: FockSpace) -> Result<GateMatrix> {
    swap_u_with(i, j, -FRAC_PI_4, space)
}

fn swap_u_with(i: DualRailQubit, j: DualRailQubit, theta: f64, space: FockSpace) -> Result<GateMatrix> {
    let ry = cr_gate(Axis::Y, theta, i, j, space)?;
    let cx = cnot(j, i, space)?;
    GateMatrix::sequence("U", &[&ry, &cx])
}

/// `U · CZ · U†`, exactly SWAP on the logical subspace.
pub fn swap_via_cz(i: DualRailQubit, j: DualRailQubit, space: FockSpace) -> Result<GateMatrix> {
    let u = swap_u(i, j, space)?;
    let z = cz(i, j, space)?;
    GateMatrix::sequence("SWAP", &[&u.adjoint(), &z, &u])
}

/// Same construction with `CR^Y(+π/4)`; yields a signed swap, kept for tests.
pub fn swap_via_cz_inline(i: DualRailQubit, j: DualRailQubit, space: FockSpace) -> Result<GateMatrix> {
    let u = swap_u_with(i, j, FRAC_PI_4, space)?;
    let z = cz(i, j, space)?;
    GateMatrix::sequence("SWAP'", &[&u.adjoint(), &z, &u])
}

/// `CCNOT · Z_A · CCNOT`: CZ on `(i, j)` when the ancilla starts in `|0⟩`.
pub fn cz_via_ancilla(
    i: DualRailQubit,
    j: DualRailQubit,
    ancilla: DualRailQubit,
    space: FockSpace,
) -> Result<GateMatrix> {
    let t = ccnot(i, j, ancilla, space)?;
    let z = z_ancilla(ancilla, space)?;
    GateMatrix::sequence("CZ_A", &[&t, &z, &t])
}

fn cond_swap_u(pairs: &[(DualRailQubit, DualRailQubit)], ancilla: DualRailQubit, space: FockSpace) -> Result<GateMatrix> {
    if pairs.is_empty() {
        return Err(Error::Argument("conditional swap needs at least one pair".into()));
    }
    let mut all: Vec<DualRailQubit> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    all.push(ancilla);
    check_disjoint(&all)?;
    let mut parts = Vec::new();
    for &(i, j) in pairs {
        parts.push(ccnot(i, j, ancilla, space)?);
    }
    for &(i, j) in pairs {
        parts.push(swap_u(i, j, space)?);
    }
    let refs: Vec<&GateMatrix> = parts.iter().collect();
    GateMatrix::sequence("U", &refs)
}

/// `U · e^{itp_R(a_A†a_A − b_A†b_A)} · U†` with `U = Π U_{ii'} · Π CCNOT_{ii'→A}`.
/// On logical inputs with the ancilla in `|0⟩` this is `e^{itp_R S}`,
/// `S = Π SWAP_{ii'}`.
pub fn exp_cond_swap(
    t_pr: f64,
    pairs: &[(DualRailQubit, DualRailQubit)],
    ancilla: DualRailQubit,
    space: FockSpace,
) -> Result<GateMatrix> {
    let u = cond_swap_u(pairs, ancilla, space)?;
    let r = ancilla_rotation(ancilla, t_pr, space)?;
    Ok(GateMatrix::sequence("exp(itpS)", &[&u.adjoint(), &r, &u])?.with_param("t_pR", t_pr))
}

/// The same circuit with `U` and `U†` exchanged; not an identity.
pub fn exp_cond_swap_reversed(
    t_pr: f64,
    pairs: &[(DualRailQubit, DualRailQubit)],
    ancilla: DualRailQubit,
    space: FockSpace,
) -> Result<GateMatrix> {
    let u = cond_swap_u(pairs, ancilla, space)?;
    let r = ancilla_rotation(ancilla, t_pr, space)?;
    Ok(GateMatrix::sequence("exp(itpS) reversed", &[&u, &r, &u.adjoint()])?.with_param("t_pR", t_pr))
}

/// Beam splitter `exp(iθ(a_1†a_2 + a_1a_2†))` between two arbitrary modes.
/// Across qubits this breaks the dual-rail encoding.
pub fn miswired_beam_splitter(m1: usize, m2: usize, theta: f64, space: FockSpace) -> Result<GateMatrix> {
    if m1 == m2 {
        return Err(Error::Aliasing(format!("beam splitter on mode {m1} twice")));
    }
    let terms = [
        (re(1.0), vec![(m1, Create), (m2, Annihilate)]),
        (re(1.0), vec![(m1, Annihilate), (m2, Create)]),
    ];
    exp_gate("BS", space, vec![m1, m2], &terms, theta)
}
