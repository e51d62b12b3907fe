use hebm_cli::{verify_table_fixture, TableId};
use hebm_core::oracle::naive_gaussian_mmd;
use hebm_core::{gaussian_distribution, BitOrder, BornProblem, GaussianSpec, GradientMode};

const ORDERS: [BitOrder; 2] = [BitOrder::MsbFirst, BitOrder::LsbFirst];

#[test]
fn gaussian_table_reproduces_its_target_in_one_bit_order() {
    let losses: Vec<f64> = ORDERS
        .iter()
        .map(|&o| verify_table_fixture(TableId::Gaussian, o).unwrap())
        .collect();
    let best = losses.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(best < 1e-3, "{losses:?}");
}

#[test]
fn zeroed_tables_give_the_uniform_against_gaussian_form() {
    let f = gaussian_distribution(&GaussianSpec {
        n_qubits: 4,
        center: 7.5,
        sigma: 1.0,
    })
    .unwrap();
    let expect = naive_gaussian_mmd(&[1.0 / 16.0; 16], f.probs(), &[0.25, 4.0]);
    for table in TableId::ALL {
        let table_h = table.hamiltonian().unwrap();
        let h = table_h.with_coefficients(&vec![0.0; table_h.len()]).unwrap();
        for order in ORDERS {
            let base = TableId::Gaussian.config(order).problem().unwrap();
            let problem = BornProblem::new(
                h.clone(),
                base.initial().clone(),
                base.target().clone(),
                base.kernel().clone(),
                *base.trotter(),
            )
            .unwrap();
            let loss = problem.loss(&h.coefficients()).unwrap();
            assert!(
                (loss - expect).abs() < 1e-14,
                "{table} {order:?}: {loss} vs {expect}"
            );
        }
    }
}

#[test]
fn fixture_loss_ignores_samples_and_seeds() {
    for table in TableId::ALL {
        for order in ORDERS {
            let reference = verify_table_fixture(table, order).unwrap();
            for (samples, seed) in [(1, 0), (5, 7), (3, 12345)] {
                let mut cfg = table.config(order);
                cfg.n_samples = samples;
                cfg.set_seed(seed);
                let theta = table.hamiltonian().unwrap().coefficients();
                let loss = cfg.problem().unwrap().loss(&theta).unwrap();
                assert_eq!(loss.to_bits(), reference.to_bits());
            }
        }
    }
}

#[test]
fn gibbs_table_is_a_stationary_point() {
    let norms: Vec<f64> = ORDERS
        .iter()
        .map(|&o| {
            let (problem, theta) = TableId::Gibbs.problem(o).unwrap();
            let g = problem
                .gradient(&theta, GradientMode::FiniteDifference, 1e-6)
                .unwrap();
            g.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect();
    assert!(norms.iter().any(|&n| n < 1e-2), "{norms:?}");
}
