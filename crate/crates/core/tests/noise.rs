use hebm_core::noise::{propagate_density, NoiseRealization};
use hebm_core::oracle::{self, CMatrix};
use hebm_core::statevector::TrotterCircuit;
use hebm_core::{
    build_bas_ansatz, build_parent_ansatz, gaussian_kernel, gibbs_distribution, noisy_propagate,
    prepare_equal_state, random_initial_parameters, sample_noise_angles, single_qubit_channel,
    trotter_propagate, BitOrder, BornProblem, DensityMatrix, GibbsSpec, JumpDirection, NoiseConfig,
    OptimizerConfig, StateVector, TrotterConfig, TrotterOrder,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_4;

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(n, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn single_qubit_generator(gamma1: f64, gamma2: f64, toward_one: bool) -> CMatrix {
    oracle::dissipator(&oracle::phase_kick_operator(gamma1))
        + oracle::dissipator(&oracle::pole_kick_operator(gamma2, toward_one))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn channel_equals_generator_exponential(
        gamma1 in 0.0f64..20.0,
        gamma2 in 0.0f64..20.0,
        dt in 1e-4f64..2.0,
        toward_one in any::<bool>(),
    ) {
        let direction = if toward_one { JumpDirection::TowardOne } else { JumpDirection::TowardZero };
        let channel = single_qubit_channel(gamma1, gamma2, dt, direction).unwrap();
        let exact = (single_qubit_generator(gamma1, gamma2, toward_one) * Complex64::new(dt, 0.0)).exp();
        let fast = channel.superoperator();
        for r in 0..4 {
            for c in 0..4 {
                prop_assert!((fast[r][c] - exact[(r, c)]).norm() < 1e-12, "({r},{c})");
            }
        }
    }
}

#[test]
fn dephasing_decays_coherences_only() {
    let (gamma1, dt) = (0.8, 0.35);
    let exact = (single_qubit_generator(gamma1, 0.0, true) * Complex64::new(dt, 0.0)).exp();
    // rho01 -> exp(-gamma1 dt) rho01
    assert!((exact[(1, 1)].re - (-gamma1 * dt).exp()).abs() < 1e-14);
    assert!((exact[(0, 0)].re - 1.0).abs() < 1e-14);
    assert!((exact[(3, 3)].re - 1.0).abs() < 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let psi = random_state(&mut rng, 3);
    let mut rho = DensityMatrix::from_pure(&psi);
    let before = rho.clone();
    let channel = single_qubit_channel(gamma1, 0.0, dt, JumpDirection::TowardOne).unwrap();
    rho.apply_channel(&channel, 1).unwrap();
    assert_eq!(rho.diagonal(), before.diagonal());
    // qubit 1 is bit 1 under MSB-first on 3 qubits
    let (r, c) = (0b010, 0b000);
    assert!((rho.get(r, c) - before.get(r, c) * (-gamma1 * dt).exp()).norm() < 1e-15);
    // coherence on qubit 0 only
    assert_eq!(rho.get(0b100, 0b000), before.get(0b100, 0b000));
}

#[test]
fn zero_coefficients_with_pure_dephasing_keep_populations() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let psi = random_state(&mut rng, 4);
    let rho = DensityMatrix::from_pure(&psi);
    let noise = NoiseConfig::with_variances(40.0, 0.0);
    let out = noisy_propagate(
        &rho,
        &build_parent_ansatz(4).unwrap(),
        &TrotterConfig::default(),
        &noise,
    )
    .unwrap();
    for (a, b) in out.diagonal().iter().zip(rho.diagonal()) {
        assert!((a - b).abs() < 1e-14);
    }
}

/// Noisy propagation on the 2-qubit ring ansatz against `exp(pi/4 A + B)`,
/// with `A = -i[H, .]` and `B` the sum of every qubit's dissipator at
/// constant rates over unit total noise time.
fn lindblad_distance(theta: &[f64], n_dt: usize, order: BitOrder) -> f64 {
    let n = 2;
    let h = build_bas_ansatz(n).unwrap().with_coefficients(theta).unwrap();
    let (gamma1, gamma2) = (0.4, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let psi = random_state(&mut rng, n).with_bit_order(order);

    let unitary = oracle::commutator_generator(&oracle::dense_hamiltonian(&h, order));
    let mut generator = unitary * Complex64::new(FRAC_PI_4, 0.0);
    for q in 0..n {
        let l1 = oracle::embed(&oracle::phase_kick_operator(gamma1), q, n, order);
        let l2 = oracle::embed(&oracle::pole_kick_operator(gamma2, true), q, n, order);
        generator += oracle::dissipator(&l1) + oracle::dissipator(&l2);
    }
    let exact = oracle::apply(
        &generator.exp(),
        &oracle::vectorize(&oracle::outer(psi.amplitudes())),
    );

    let cfg = TrotterConfig::new(n_dt, TrotterOrder::Second);
    let circuit = TrotterCircuit::new(&h, &cfg, order).unwrap();
    let noise = NoiseRealization::constant(
        n,
        n_dt,
        gamma1,
        gamma2,
        1.0 / n_dt as f64,
        JumpDirection::TowardOne,
    )
    .unwrap();
    let mut rho = DensityMatrix::from_pure(&psi);
    propagate_density(&circuit, &noise, &mut rho, &h.coefficients(), None).unwrap();
    rho.entries()
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[test]
fn lindblad_splitting_converges_at_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for order in [BitOrder::MsbFirst, BitOrder::LsbFirst] {
        for _ in 0..3 {
            let theta: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let d: Vec<f64> = [4, 13, 40, 120]
                .iter()
                .map(|&n| lindblad_distance(&theta, n, order))
                .collect();
            assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
            // tripling the frame count cuts the error ninefold
            let ratio = d[2] / d[3];
            assert!((8.0..10.0).contains(&ratio), "{d:?}");
            assert!(d[3] < 1e-4, "{d:?}");
        }
    }
}

#[test]
fn lindblad_distance_at_thirteen_frames() {
    for order in [BitOrder::MsbFirst, BitOrder::LsbFirst] {
        for seed in 0..4 {
            let theta = random_initial_parameters(8, seed);
            let d = lindblad_distance(&theta, 13, order);
            assert!(d < 1e-4, "seed {seed}: {d}");
            assert!(lindblad_distance(&theta, 26, order) < d);
        }
    }
}

#[test]
fn density_invariants_hold_under_strong_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in 3..=4 {
        for (phase, pole) in [(45.0, 0.0), (0.0, 45.0), (30.0, 30.0), (44.0, 44.0)] {
            let theta: Vec<f64> = (0..3 * n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let h = build_parent_ansatz(n).unwrap().with_coefficients(&theta).unwrap();
            let mut noise = NoiseConfig::with_variances(phase, pole);
            noise.rng_seed = rng.random();
            let rho = DensityMatrix::from_pure(&random_state(&mut rng, n));
            let out = noisy_propagate(&rho, &h, &TrotterConfig::default(), &noise).unwrap();
            assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
            assert!(out.hermiticity_error() < 1e-10);
            assert!(out.min_eigenvalue() >= -1e-8, "{}", out.min_eigenvalue());
        }
    }
}

#[test]
fn zero_variance_reduces_to_statevector() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for order in [BitOrder::MsbFirst, BitOrder::LsbFirst] {
        let theta: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = build_parent_ansatz(4).unwrap().with_coefficients(&theta).unwrap();
        let psi = random_state(&mut rng, 4).with_bit_order(order);
        let cfg = TrotterConfig::default();
        let pure = trotter_propagate(&psi, &h, &cfg).unwrap();
        let mixed =
            noisy_propagate(&DensityMatrix::from_pure(&psi), &h, &cfg, &NoiseConfig::default()).unwrap();
        for (a, b) in mixed.diagonal().iter().zip(pure.amplitudes()) {
            assert!((a - b.norm_sqr()).abs() < 1e-9);
        }
    }
}

#[test]
fn phase_sampler_reaches_but_never_passes_the_clamp() {
    let cfg = NoiseConfig::with_variances(45.0, 0.0);
    let draws = sample_noise_angles(&cfg, 100_000);
    let max = draws.iter().map(|(t1, _)| t1.abs()).fold(0.0, f64::max);
    assert!((40.0..=44.999).contains(&max), "{max}");
    assert!(draws.iter().all(|(_, t2)| *t2 == 0.0));
    let mean = draws.iter().map(|(t1, _)| t1).sum::<f64>() / draws.len() as f64;
    assert!(mean.abs() < 0.5);
}

fn gibbs_problem() -> BornProblem {
    BornProblem::new(
        build_parent_ansatz(4).unwrap(),
        prepare_equal_state(4),
        gibbs_distribution(&GibbsSpec {
            n_qubits: 4,
            beta: 1.0,
        })
        .unwrap(),
        gaussian_kernel(4, &[0.25, 4.0]).unwrap(),
        TrotterConfig::default(),
    )
    .unwrap()
}

#[test]
fn noisy_loss_is_deterministic_per_seed() {
    let problem = gibbs_problem();
    let theta: Vec<f64> = (0..12).map(|i| 0.1 * i as f64 - 0.5).collect();
    let mut noise = NoiseConfig::with_variances(20.0, 20.0);
    noise.rng_seed = 5;
    let a = hebm_core::noisy_loss_of_parameters(&theta, &problem, &noise).unwrap();
    let b = hebm_core::noisy_loss_of_parameters(&theta, &problem, &noise).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    noise.rng_seed = 6;
    assert_ne!(
        a,
        hebm_core::noisy_loss_of_parameters(&theta, &problem, &noise).unwrap()
    );
}

#[test]
fn loss_degrades_with_pole_variance() {
    use rayon::prelude::*;
    let problem = gibbs_problem();
    let means: Vec<f64> = [0.0, 5.0, 10.0, 20.0, 30.0, 45.0]
        .par_iter()
        .map(|&pole| {
            let total: f64 = (0..5u64)
                .map(|seed| {
                    let mut noise = NoiseConfig::with_variances(0.0, pole);
                    noise.rng_seed = seed;
                    let p = problem.clone().with_noise(&noise).unwrap();
                    p.fit(&OptimizerConfig {
                        rng_seed: seed,
                        ..OptimizerConfig::default()
                    })
                    .unwrap()
                    .final_loss()
                })
                .sum();
            total / 5.0
        })
        .collect();
    assert!(means.windows(2).all(|w| w[1] >= w[0]), "{means:?}");
}
