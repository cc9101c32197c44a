use num_complex::Complex64;
use proptest::prelude::*;

use swaptest::noise::{apply_dephasing, apply_heating, dephasing_trajectory, heating_trajectory};
use swaptest::rng::stream_rng;
use swaptest::{noisy_swap_test, prepare_registers, Ensemble, Factor, ModeLayout, NoiseConfig, PrepRecipe64, PureState, SwapTest};

fn on_c(layout: ModeLayout, c: &[Complex64]) -> PureState<f64> {
    let one = [Complex64::new(1.0, 0.0)];
    PureState::product(layout, [one[0], Complex64::new(0.0, 0.0)], &one, &one, c).unwrap()
}

fn c_occupation(s: &PureState<f64>) -> f64 {
    s.marginal(Factor::C).iter().enumerate().map(|(n, p)| n as f64 * p).sum()
}

/// Mean and standard error of `⟨n_C⟩` over heating trajectories.
fn heated_occupation(start: &PureState<f64>, p: f64, trajectories: usize, seed: u64) -> (f64, f64) {
    let mut rng = stream_rng(seed, 0);
    let samples: Vec<f64> = (0..trajectories)
        .map(|_| c_occupation(&heating_trajectory(start, Factor::C, p, 1.0, &mut rng).unwrap()))
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn vacuum_heats_by_rate_times_duration() {
    let l = ModeLayout::new([1, 1, 6]).unwrap();
    let vac = on_c(l, &[Complex64::new(1.0, 0.0)]);
    let (mean, se) = heated_occupation(&vac, 0.05, 10_000, 3);
    assert!((mean - 0.05).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn fock_occupation_grows_by_rate_times_duration() {
    let l = ModeLayout::new([1, 1, 8]).unwrap();
    let two = on_c(l, &swaptest::bosonic::fock_state(2, 8).unwrap());
    let (mean, se) = heated_occupation(&two, 0.05, 20_000, 5);
    assert!((mean - 2.05).abs() < 4.0 * se, "{mean} ± {se}");
}

#[test]
fn heating_is_monotone_in_duration() {
    let l = ModeLayout::new([1, 1, 8]).unwrap();
    let one = on_c(l, &swaptest::bosonic::fock_state(1, 8).unwrap());
    let durations = [0.0, 0.02, 0.05, 0.09];
    let stats: Vec<(f64, f64)> = durations.iter().map(|&p| heated_occupation(&one, p, 20_000, 11)).collect();
    for w in stats.windows(2) {
        let ((m0, s0), (m1, s1)) = (w[0], w[1]);
        assert!(m1 >= m0 - 3.0 * (s0 * s0 + s1 * s1).sqrt(), "{m0} then {m1}");
    }
    assert!(stats[3].0 > stats[0].0);
}

#[test]
fn heating_outside_first_order_is_rejected() {
    let l = ModeLayout::new([1, 1, 4]).unwrap();
    let vac = on_c(l, &[Complex64::new(1.0, 0.0)]);
    assert!(heating_trajectory(&vac, Factor::C, 20.2, 0.01, &mut stream_rng(0, 0)).is_err());
}

#[test]
fn dephasing_decays_coherence_by_e() {
    let l = ModeLayout::new([1, 1, 3]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = on_c(l, &[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]);
    let mut rng = stream_rng(9, 0);
    let n = 20_000;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let out = dephasing_trajectory(&s, Factor::C, 1e-2, 1e-2, &mut rng).unwrap();
        let v = out.amplitudes();
        let rho01 = v[0] * v[1].conj();
        acc += rho01;
        samples.push(rho01.re);
    }
    let mean = acc / n as f64;
    let var = samples.iter().map(|x| (x - mean.re).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let se = (var / n as f64).sqrt();
    let expected = 0.5 * (-1.0f64).exp();
    assert!((mean.norm() - expected).abs() < 4.0 * se, "{} vs {expected} ± {se}", mean.norm());
}

#[test]
fn dephasing_leaves_fock_states_alone() {
    let l = ModeLayout::new([1, 1, 5]).unwrap();
    let s = on_c(l, &swaptest::bosonic::fock_state(3, 5).unwrap());
    let out = dephasing_trajectory(&s, Factor::C, 1e-2, 5e-3, &mut stream_rng(1, 0)).unwrap();
    assert!((s.inner(&out).unwrap().norm() - 1.0).abs() < 1e-14);
}

#[test]
fn zero_strength_channels_are_identities() {
    let l = ModeLayout::for_swap_test(4).unwrap();
    let ens = prepare_registers(l, &PrepRecipe64::MixedRho1 { phi1: 1.0 }, &PrepRecipe64::Superposition01 { phi: 0.3 }).unwrap();
    let mut rng = stream_rng(2, 0);
    let heated = apply_heating(&ens, Factor::B, 0.0, 1.0, &mut rng).unwrap();
    let dephased = apply_dephasing(&ens, Factor::C, 1e-2, 0.0, &mut rng).unwrap();
    for out in [heated, dephased] {
        for ((w0, s0), (w1, s1)) in ens.branches().iter().zip(out.branches()) {
            assert_eq!(w0, w1);
            assert!(s0.amplitudes().iter().zip(s1.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-15));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn channels_keep_ensemble_weight(p in 0.0f64..0.1, t in 0.0f64..0.02, seed in any::<u64>(), phi in 0.0f64..3.0) {
        let l = ModeLayout::for_swap_test(4).unwrap();
        let ens = prepare_registers(l, &PrepRecipe64::MixedRho1 { phi1: phi }, &PrepRecipe64::MixedRho1 { phi1: 3.0 - phi }).unwrap();
        let mut rng = stream_rng(seed, 0);
        let mut out: Ensemble<f64> = apply_heating(&ens, Factor::C, p, 1.0, &mut rng).unwrap();
        out = apply_heating(&out, Factor::B, p, 1.0, &mut rng).unwrap();
        out = apply_dephasing(&out, Factor::B, 1e-2, t, &mut rng).unwrap();
        prop_assert!((out.total_weight() - 1.0).abs() < 1e-10);
        for (_, s) in out.branches() {
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn noisy_run_is_reproducible_and_noiseless_limit_is_exact() {
    let l = ModeLayout::for_swap_test(4).unwrap();
    let circuit = SwapTest::new(l).unwrap();
    let ens = prepare_registers(l, &PrepRecipe64::Fock { n: 1 }, &PrepRecipe64::Fock { n: 1 }).unwrap();
    let cfg = NoiseConfig::<f64>::measured(50);
    let a = noisy_swap_test(&circuit, &ens, &cfg, Some(500), 4).unwrap();
    let b = noisy_swap_test(&circuit, &ens, &cfg, Some(500), 4).unwrap();
    assert_eq!(a, b);

    let quiet = NoiseConfig { heating_rates: [0.0; 3], dephasing_time: None, ..cfg };
    let r = noisy_swap_test(&circuit, &ens, &quiet, None, 4).unwrap();
    assert!((r.result.p_g_exact - 1.0).abs() < 1e-12);
    assert_eq!(r.trajectory_stderr, 0.0);
}
