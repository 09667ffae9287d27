use chimat::analysis::distinct_abs_entries;
use chimat::basis::{gell_mann_basis, pauli_tensor_basis, OperatorBasis};
use chimat::channel::{apply_chi, apply_dynamical, apply_kraus, chi_from_kraus, dynamical_from_kraus, ChiConvention};
use chimat::eigen::hermitian_eig;
use chimat::montecarlo::{substream, SimulationConfig, SparseKrausSampler};
use chimat::random::{random_density, random_kraus_set};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn basis_for(d: usize, gell_mann: bool) -> OperatorBasis<f64> {
    if gell_mann {
        gell_mann_basis(d).unwrap()
    } else {
        pauli_tensor_basis(d.trailing_zeros() as usize).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_is_positive_with_trace_d_squared(seed in any::<u64>(), d in prop::sample::select(vec![2usize, 4]), r in 1usize..=3, gm in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ks = random_kraus_set::<f64, _>(d, r, &mut rng).unwrap();
        let chi = chi_from_kraus(&ks, &basis_for(d, gm), ChiConvention::TraceCoefficient).unwrap();
        // sum_i |tr(K l_i)|^2 = t ||K||^2 and sum_n ||K_n||^2 = d for a TP set.
        let t = if gm { 2.0 } else { d as f64 };
        prop_assert!((chi.matrix().trace().re - t * d as f64).abs() < 1e-9);
        let eig = hermitian_eig(chi.matrix(), 1e-9).unwrap();
        prop_assert!(eig.values.iter().all(|&v| v > -1e-9));
        prop_assert!(eig.values.iter().filter(|&&v| v > 1e-9).count() <= r);
    }

    #[test]
    fn three_actions_agree_in_odd_dimension(seed in any::<u64>(), d in 3usize..=5, r in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ks = random_kraus_set::<f64, _>(d, r, &mut rng).unwrap();
        let basis = gell_mann_basis(d).unwrap();
        let chi = chi_from_kraus(&ks, &basis, ChiConvention::Orthonormal).unwrap();
        let rho = random_density(d, &mut rng);
        let a = apply_kraus(&ks, &rho).unwrap();
        prop_assert!(a.max_abs_diff(&apply_dynamical(&dynamical_from_kraus(&ks), &rho).unwrap()).unwrap() < 1e-9);
        prop_assert!(a.max_abs_diff(&apply_chi(&chi, &basis, &rho).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn sparse_draws_keep_their_pattern(seed in any::<u64>(), index in 0u64..1000) {
        let cfg = SimulationConfig { seed, ..SimulationConfig::default() };
        let draw = SparseKrausSampler::from_config(&cfg).sample::<f64, _>(&mut substream(seed, index)).unwrap();
        prop_assert!(draw.kraus.is_trace_preserving(1e-10));
        for k in draw.kraus.operators() {
            prop_assert_eq!(k.count_nonzero(1e-12), 3);
        }
        let chi = chi_from_kraus(&draw.kraus, &pauli_tensor_basis(3).unwrap(), ChiConvention::TraceCoefficient).unwrap();
        prop_assert!(distinct_abs_entries(chi.matrix(), 1e-9, true).count <= 8usize.pow(4));
    }
}

#[test]
fn single_precision_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let basis = pauli_tensor_basis::<f32>(2).unwrap();
    for _ in 0..50 {
        let ks = random_kraus_set::<f32, _>(4, 2, &mut rng).unwrap();
        let rho = random_density::<f32, _>(4, &mut rng);
        let chi = chi_from_kraus(&ks, &basis, ChiConvention::TraceCoefficient).unwrap();
        let a = apply_kraus(&ks, &rho).unwrap();
        let b = apply_dynamical(&dynamical_from_kraus(&ks), &rho).unwrap();
        let c = apply_chi(&chi, &basis, &rho).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-5);
        assert!(a.max_abs_diff(&c).unwrap() < 1e-5);
    }
}
