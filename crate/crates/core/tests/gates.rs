use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use swaptest::gates::{
    apply, beam_splitter, controlled_beam_splitter, evolve_pulsed_cbs, heisenberg_creation_image, rotation,
    sideband, spin_displacement, PulseEnvelope, SidebandColor,
};
use swaptest::hilbert::{minus_state, plus_state};
use swaptest::linalg::CMatrix;
use swaptest::{Factor, ModeLayout, PureState, Qubit};

fn random_state(layout: ModeLayout, seed: &[f64]) -> PureState<f64> {
    let n = layout.total_dim();
    let amps: Vec<Complex64> = (0..n)
        .map(|i| {
            let a = seed[i % seed.len()] + 0.1 * i as f64;
            Complex64::new((a * 1.7).sin(), (a * 2.3 + 0.4).cos())
        })
        .collect();
    PureState::from_amplitudes(layout, amps).unwrap()
}

/// Random Hermitian matrix from a seed list.
fn hermitian(n: usize, seed: &[f64]) -> CMatrix<f64> {
    let raw = CMatrix::from_fn(n, n, |i, j| {
        let k = (i * n + j) % seed.len();
        Complex64::new(seed[k] * (1.0 + i as f64), seed[(k + 1) % seed.len()] - j as f64 * 0.3)
    });
    let h = &raw + &raw.adjoint();
    h.scale(Complex64::new(0.5, 0.0))
}

fn expm_by_eigen(h: &CMatrix<f64>, t: f64) -> CMatrix<f64> {
    let n = h.rows();
    let m = DMatrix::from_fn(n, n, |i, j| nalgebra::Complex::new(h[(i, j)].re, h[(i, j)].im));
    let eig = m.symmetric_eigen();
    let v = &eig.eigenvectors;
    CMatrix::from_fn(n, n, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -t * eig.eigenvalues[k]);
            let a = v[(i, k)];
            let b = v[(j, k)].conj();
            acc += Complex64::new(a.re, a.im) * phase * Complex64::new(b.re, b.im);
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expm_matches_eigendecomposition(n in 1usize..9, t in -6.0f64..6.0, seed in prop::collection::vec(-2.0f64..2.0, 4..12)) {
        let h = hermitian(n, &seed);
        let ours = h.scale(Complex64::new(0.0, -t)).expm();
        let reference = expm_by_eigen(&h, t);
        prop_assert!(ours.max_abs_diff(&reference) < 1e-10, "diff {}", ours.max_abs_diff(&reference));
    }

    #[test]
    fn gates_are_unitary(theta in 0.0f64..(2.0 * PI), psi in -PI..PI, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let l = ModeLayout::new([5, 4, 6]).unwrap();
        let gates = [
            rotation(theta),
            sideband(&l, SidebandColor::Blue, theta, Factor::B).unwrap(),
            sideband(&l, SidebandColor::Red, theta, Factor::C).unwrap(),
            controlled_beam_splitter(&l, theta, psi, (Factor::A, Factor::C)).unwrap(),
            beam_splitter(&l, theta, psi, (Factor::A, Factor::B)).unwrap(),
        ];
        for g in &gates {
            prop_assert!(g.to_dense().unitarity_defect() < 1e-9);
        }
        // displacement unitarity holds away from the truncation edge
        let big = ModeLayout::new([1, 1, 24]).unwrap();
        let d = spin_displacement(&big, Complex64::new(re, im), Factor::C).unwrap();
        let s = PureState::product(big, plus_state(), &[Complex64::new(1.0, 0.0)], &[Complex64::new(1.0, 0.0)], &[Complex64::new(1.0, 0.0)]).unwrap();
        prop_assert!((apply(&d, &s).unwrap().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn apply_is_linear_and_norm_preserving(theta in 0.0f64..6.0, psi in -PI..PI, x in -1.0f64..1.0, y in -1.0f64..1.0,
                                           s1 in prop::collection::vec(-3.0f64..3.0, 3..8),
                                           s2 in prop::collection::vec(-3.0f64..3.0, 3..8)) {
        let l = ModeLayout::new([4, 3, 3]).unwrap();
        let g = controlled_beam_splitter(&l, theta, psi, (Factor::A, Factor::B)).unwrap();
        let a = random_state(l, &s1);
        let b = random_state(l, &s2);
        let (ca, cb) = (Complex64::new(x, 0.3), Complex64::new(0.2, y));
        let combo: Vec<Complex64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(u, v)| ca * u + cb * v).collect();
        let norm = combo.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let combined = PureState::from_amplitudes(l, combo).unwrap();
        let ua = apply(&g, &a).unwrap();
        let ub = apply(&g, &b).unwrap();
        let uc = apply(&g, &combined).unwrap();
        for i in 0..l.total_dim() {
            let expected = (ca * ua.amplitudes()[i] + cb * ub.amplitudes()[i]) / norm;
            prop_assert!((uc.amplitudes()[i] - expected).norm() < 1e-12);
        }
        prop_assert!((ua.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn untouched_factor_keeps_its_reduced_state(theta in 0.0f64..6.0, seed in prop::collection::vec(-3.0f64..3.0, 3..8)) {
        let l = ModeLayout::new([3, 3, 3]).unwrap();
        let s = random_state(l, &seed);
        let g = controlled_beam_splitter(&l, theta, 0.4, (Factor::A, Factor::B)).unwrap();
        let before = swaptest::partial_trace(&s.clone().into(), &[Factor::C]).unwrap();
        let after = swaptest::partial_trace(&apply(&g, &s).unwrap().into(), &[Factor::C]).unwrap();
        prop_assert!(before.matrix().max_abs_diff(after.matrix()) < 1e-12);
    }

    #[test]
    fn creation_operators_follow_the_transformation_rule(theta in 0.0f64..(2.0 * PI), psi in -PI..PI) {
        // U† x† U = cos(θ/2) x† + i e^{−i(ψ+φs)} sin(θ/2) y†, φs = 0 in |+⟩ and π in |−⟩
        let l = ModeLayout::uniform(4).unwrap();
        let g = controlled_beam_splitter(&l, theta, psi, (Factor::A, Factor::B)).unwrap();
        for (plus, phi_s) in [(true, 0.0), (false, PI)] {
            let (cx, cy) = heisenberg_creation_image(&g, plus, true).unwrap();
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            prop_assert!((cx - Complex64::new(c, 0.0)).norm() < 1e-8);
            prop_assert!((cy - Complex64::i() * Complex64::from_polar(s, -(psi + phi_s))).norm() < 1e-8);
            let (dx, dy) = heisenberg_creation_image(&g, plus, false).unwrap();
            prop_assert!((dy - Complex64::new(c, 0.0)).norm() < 1e-8);
            prop_assert!((dx - Complex64::i() * Complex64::from_polar(s, psi + phi_s)).norm() < 1e-8);
        }
    }
}

/// `(x'†)^a (y'†)^b |0,0⟩ / √(a! b!)` on modes of dimension `d`, for
/// `x'† = p.0 x† + p.1 y†` and `y'† = q.0 x† + q.1 y†`.
fn two_mode_image(a: usize, b: usize, p: (Complex64, Complex64), q: (Complex64, Complex64), d: usize) -> Vec<Complex64> {
    // polynomial coefficients over monomials x†^i y†^j
    let mut poly = vec![Complex64::new(0.0, 0.0); d * d];
    poly[0] = Complex64::new(1.0, 0.0);
    let mul = |poly: &mut Vec<Complex64>, c: (Complex64, Complex64)| {
        let mut next = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                let z = poly[i * d + j];
                if z.norm() == 0.0 {
                    continue;
                }
                if i + 1 < d {
                    next[(i + 1) * d + j] += z * c.0;
                }
                if j + 1 < d {
                    next[i * d + j + 1] += z * c.1;
                }
            }
        }
        *poly = next;
    };
    for _ in 0..a {
        mul(&mut poly, p);
    }
    for _ in 0..b {
        mul(&mut poly, q);
    }
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let norm = (fact(a) * fact(b)).sqrt();
    // x†^i y†^j |0,0⟩ = √(i! j!) |i, j⟩
    (0..d * d).map(|k| poly[k] * (fact(k / d) * fact(k % d)).sqrt() / norm).collect()
}

#[test]
fn heisenberg_rule_on_two_phonon_states() {
    let d = 4;
    let l = ModeLayout::new([d, d, 1]).unwrap();
    for (theta, psi) in [(FRAC_PI_2, PI), (PI, 0.0), (1.1, 0.7)] {
        let g = controlled_beam_splitter(&l, theta, psi, (Factor::A, Factor::B)).unwrap();
        let inverse = g.adjoint();
        for (sector_plus, qubit) in [(true, plus_state::<f64>()), (false, minus_state())] {
            let p = heisenberg_creation_image(&g, sector_plus, true).unwrap();
            let q = heisenberg_creation_image(&g, sector_plus, false).unwrap();
            for (a, b) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
                let mut fa = vec![Complex64::new(0.0, 0.0); d];
                let mut fb = vec![Complex64::new(0.0, 0.0); d];
                fa[a] = Complex64::new(1.0, 0.0);
                fb[b] = Complex64::new(1.0, 0.0);
                let s = PureState::product(l, qubit, &fa, &fb, &[Complex64::new(1.0, 0.0)]).unwrap();
                let out = apply(&inverse, &s).unwrap();
                let image = two_mode_image(a, b, p, q, d);
                // compare in the qubit sector: out = |qubit⟩ ⊗ image
                for i in 0..d {
                    for j in 0..d {
                        for (qi, qa) in qubit.iter().enumerate() {
                            let q = if qi == 0 { Qubit::G } else { Qubit::E };
                            let got = out.amplitude(q, [i, j, 0]).unwrap();
                            assert!((got - qa * image[i * d + j]).norm() < 1e-8, "θ={theta} a={a} b={b} ({i},{j})");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn quoted_beam_splitter_transformations_hold_in_the_heisenberg_picture() {
    let l = ModeLayout::uniform(3).unwrap();
    let bs = beam_splitter(&l, PI, PI, (Factor::A, Factor::C)).unwrap();
    // a† → −i c†, c† → −i a†
    let (ax, ay) = heisenberg_creation_image(&bs, true, true).unwrap();
    assert_abs_diff_eq!(ax.norm(), 0.0, epsilon = 1e-12);
    assert!((ay - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    let (cx, cy) = heisenberg_creation_image(&bs, true, false).unwrap();
    assert_abs_diff_eq!(cy.norm(), 0.0, epsilon = 1e-12);
    assert!((cx - Complex64::new(0.0, -1.0)).norm() < 1e-12);

    // U_CBS(π, 0): a† → i e^{−iφs} c†
    let cbs = controlled_beam_splitter(&l, PI, 0.0, (Factor::A, Factor::C)).unwrap();
    let (_, plus) = heisenberg_creation_image(&cbs, true, true).unwrap();
    let (_, minus) = heisenberg_creation_image(&cbs, false, true).unwrap();
    assert!((plus - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    assert!((minus - Complex64::new(0.0, -1.0)).norm() < 1e-12);
}

#[test]
fn ramped_pulse_matches_closed_form() {
    let l = ModeLayout::for_swap_test(6).unwrap();
    let omega0 = 2.0 * PI * 680.0;
    let env = PulseEnvelope::ramped_with_area(omega0, 50e-6, FRAC_PI_2);
    assert_abs_diff_eq!(env.area(), FRAC_PI_2, epsilon = 1e-12);
    let pulsed = evolve_pulsed_cbs(&l, &env, PI, (Factor::A, Factor::B), 400).unwrap();
    let closed = controlled_beam_splitter(&l, FRAC_PI_2, PI, (Factor::A, Factor::B)).unwrap();
    assert!(pulsed.to_dense().max_abs_diff(&closed.to_dense()) < 1e-6);
}

#[test]
fn parity_gate_phases_on_c_content() {
    // U^{AC}_CBS(π,0) moves C into A with phase (∓i)^{n} in the |±⟩ sectors
    let d = 6;
    let l = ModeLayout::new([d, 1, d]).unwrap();
    let u = controlled_beam_splitter(&l, PI, 0.0, (Factor::A, Factor::C)).unwrap();
    let phi: Vec<Complex64> = (0..d).map(|n| Complex64::from_polar(1.0 / (n as f64 + 1.0), 0.4 * n as f64)).collect();
    let vac = [Complex64::new(1.0, 0.0)];
    for (qubit, unit) in [(plus_state::<f64>(), Complex64::new(0.0, -1.0)), (minus_state(), Complex64::new(0.0, 1.0))] {
        let s = PureState::product(l, qubit, &[Complex64::new(1.0, 0.0)], &vac, &phi).unwrap();
        let shifted: Vec<Complex64> = phi.iter().enumerate().map(|(n, z)| z * unit.powu(n as u32)).collect();
        let expected = PureState::product(l, qubit, &shifted, &vac, &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!((expected.inner(&apply(&u, &s).unwrap()).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}
