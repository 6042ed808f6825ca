use filterlab_core::config::{model_from_toml, model_to_toml, ModelFile};
use filterlab_core::fixtures::{flat_simplex, random_model, RandomModelOptions};
use filterlab_core::model::{
    n_step_marginal, simulate, tv_distance, Distribution, FiniteChannel, HmmModel, ObservationChannel,
    TransitionKernel,
};
use filterlab_core::{
    conditional_kernels, filter_run, joint_table, oracle_conditional, path_log_likelihood, predictor,
    stability_curve, ObservationPath,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model_from_seed(seed: u64, dim: usize, alphabet: usize) -> HmmModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_model(&mut rng, &RandomModelOptions::positive(dim, alphabet)).unwrap()
}

fn prior_from_seed(seed: u64, dim: usize) -> Distribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5555);
    Distribution::from_weights_unchecked(flat_simplex(&mut rng, dim, 0.0))
}

fn path_for(model: &HmmModel, prior: &Distribution, len: usize, seed: u64) -> ObservationPath {
    simulate(model, prior, len, seed).unwrap().observations
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn kernels_contract_total_variation(seed: u64, dim in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..dim).map(|_| flat_simplex(&mut rng, dim, 0.3)).collect();
        let kernel = TransitionKernel::from_rows_unchecked(rows);
        let a = Distribution::from_weights_unchecked(flat_simplex(&mut rng, dim, 0.3));
        let b = Distribution::from_weights_unchecked(flat_simplex(&mut rng, dim, 0.3));
        let before = tv_distance(&a, &b).unwrap();
        let after = tv_distance(&kernel.apply(&a), &kernel.apply(&b)).unwrap();
        // permutation-like kernels do not contract and can round up by an ulp
        prop_assert!(after <= before * (1.0 + 4.0 * f64::EPSILON));
    }

    #[test]
    fn filter_matches_enumeration(seed: u64, dim in 2usize..5, alphabet in 1usize..4, len in 1usize..8) {
        let model = model_from_seed(seed, dim, alphabet);
        let prior = prior_from_seed(seed, dim);
        let y = path_for(&model, &prior, len, seed);
        let run = filter_run(&model, &prior, &y).unwrap();
        for n in 0..len {
            let table = joint_table(&model, &prior, &y.prefix(n)).unwrap();
            let exact = oracle_conditional(&table, |_| true, |p| p[n]).unwrap();
            for x in 0..dim {
                prop_assert!((run.state(n)[x] - exact[x]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn normalizers_add_up(seed: u64, dim in 2usize..6, len in 1usize..60) {
        let model = model_from_seed(seed, dim, 3);
        let prior = prior_from_seed(seed, dim);
        let y = path_for(&model, &prior, len, seed);
        let run = filter_run(&model, &prior, &y).unwrap();
        let direct = path_log_likelihood(&model, &prior, &y).unwrap();
        prop_assert!((run.log_likelihood() - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn filter_restarts_from_predictor(seed: u64, dim in 2usize..6, n in 0usize..10, k in 0usize..10) {
        let model = model_from_seed(seed, dim, 2);
        let prior = prior_from_seed(seed, dim);
        let y = path_for(&model, &prior, n + k + 1, seed);
        let full = filter_run(&model, &prior, &y).unwrap();
        let tail = filter_run(&model, &predictor(&model, &full, n).unwrap(), &y.shifted(n)).unwrap();
        for x in 0..dim {
            prop_assert!((full.state(n + k)[x] - tail.state(k)[x]).abs() <= 1e-12);
        }
    }

    #[test]
    fn scaling_the_density_changes_nothing(seed: u64, dim in 2usize..5, scale in 0.01f64..100.0) {
        let model = model_from_seed(seed, dim, 2);
        let channel = model.finite_channel().unwrap();
        let scaled: Vec<Vec<f64>> = channel
            .density_table()
            .iter()
            .map(|row| vec![row[0] * scale, row[1]])
            .collect();
        let other = HmmModel::new_unchecked(
            model.kernel.clone(),
            model.stationary.clone(),
            ObservationChannel::Finite(FiniteChannel::new_unchecked(scaled, channel.reference().to_vec())),
            "scaled",
        );
        let prior = prior_from_seed(seed, dim);
        let y = path_for(&model, &prior, 12, seed);
        let a = filter_run(&model, &prior, &y).unwrap();
        let b = filter_run(&other, &prior, &y).unwrap();
        for n in 0..12 {
            for x in 0..dim {
                prop_assert!((a.state(n)[x] - b.state(n)[x]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn uninformative_filter_is_prediction(seed: u64, dim in 2usize..6, len in 1usize..30) {
        let model = model_from_seed(seed, dim, 1);
        let flat = HmmModel::new_unchecked(
            model.kernel.clone(),
            model.stationary.clone(),
            ObservationChannel::uninformative(dim, 2),
            "flat",
        );
        let prior = prior_from_seed(seed, dim);
        let y = ObservationPath::symbols(&vec![1; len]);
        let run = filter_run(&flat, &prior, &y).unwrap();
        for n in 0..len {
            let expected = n_step_marginal(&flat.kernel, &prior, n);
            for x in 0..dim {
                prop_assert!((run.state(n)[x] - expected[x]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn relabelling_states_moves_the_curve_along(seed: u64, dim in 2usize..6) {
        let model = model_from_seed(seed, dim, 3);
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.rotate_left((seed % dim as u64) as usize);
        perm.swap(0, dim - 1);
        let permuted = model.permuted(&perm).unwrap();
        let mu = prior_from_seed(seed, dim);
        let nu = prior_from_seed(seed.wrapping_add(1), dim);
        let move_law = |law: &Distribution| {
            let mut w = vec![0.0; dim];
            for x in 0..dim {
                w[perm[x]] = law[x];
            }
            Distribution::from_weights_unchecked(w)
        };
        let y = path_for(&model, &mu, 25, seed);
        let a = stability_curve(&model, &mu, &nu, &y).unwrap();
        let b = stability_curve(&permuted, &move_law(&mu), &move_law(&nu), &y).unwrap();
        for (p, q) in a.tv.iter().zip(&b.tv) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn beta_never_increases(seed: u64, dim in 2usize..5, len in 2usize..40) {
        let model = model_from_seed(seed, dim, 2);
        let y = path_for(&model, &model.stationary, len, seed);
        let seq = conditional_kernels(&model, &y).unwrap();
        let curve = seq.beta_curve(0, dim - 1).unwrap();
        // a step that barely contracts can round up by an ulp
        for w in curve.values.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 4.0 * f64::EPSILON));
        }
    }

    #[test]
    fn model_files_round_trip_bit_exactly(seed: u64, dim in 1usize..6, alphabet in 1usize..5) {
        let model = model_from_seed(seed, dim, alphabet);
        let text = model_to_toml(&model).unwrap();
        let back = model_from_toml(&text).unwrap();
        let a = ModelFile::from_model(&model).unwrap();
        let b = ModelFile::from_model(&back).unwrap();
        let bits = |v: &[Vec<f64>]| v.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.kernel), bits(&b.kernel));
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(text, model_to_toml(&back).unwrap());
    }
}
