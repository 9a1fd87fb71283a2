//! End-to-end behavior of the collection → shuffle → tally → aggregate
//! pipeline and its determinism guarantees.

use helnaksort::aggregation::{hra_aggregate, ra_aggregate};
use helnaksort::datagen::{sample_mallows, MallowsConfig};
use helnaksort::experiment::{run_once, DataSource, ExperimentConfig, Method};
use helnaksort::privacy::PrivacySpec;
use helnaksort::protocol::{assign_queries, collect, shuffle, tally_batch};
use helnaksort::ranking::{average_kendall, pair_count, tally};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// With vanishing noise and every pair assigned to every agent, the
/// shuffled tally equals the full-information tally of the profile.
#[test]
fn noiseless_full_pipeline_recovers_the_tally() {
    let cfg = MallowsConfig::new(5, 40, 0.5, 31).unwrap();
    let profile = sample_mallows(&cfg).unwrap();
    let spec = PrivacySpec::for_bits(1e6, 1e-4, pair_count(5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    let assignments = assign_queries(profile.len(), 5, pair_count(5), &mut rng).unwrap();
    let answers = collect(&profile, &assignments, &spec, &mut rng).unwrap();
    let batch = shuffle(&answers, &mut rng);
    let counts = tally_batch(&batch, 5).unwrap();

    assert_eq!(counts, tally(&profile).unwrap());
    assert_eq!(ra_aggregate(&counts), ra_aggregate(&tally(&profile).unwrap()));
}

/// Shuffling never changes what the curator tallies.
#[test]
fn shuffle_is_a_tally_no_op() {
    let cfg = MallowsConfig::new(4, 25, 0.25, 5).unwrap();
    let profile = sample_mallows(&cfg).unwrap();
    let spec = PrivacySpec::for_bits(1.0, 1e-4, 2).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let assignments = assign_queries(profile.len(), 4, 2, &mut rng).unwrap();
    let answers = collect(&profile, &assignments, &spec, &mut rng).unwrap();

    let mut rng_a = ChaCha8Rng::seed_from_u64(1);
    let mut rng_b = ChaCha8Rng::seed_from_u64(2);
    let counts_a = tally_batch(&shuffle(&answers, &mut rng_a), 4).unwrap();
    let counts_b = tally_batch(&shuffle(&answers, &mut rng_b), 4).unwrap();
    assert_eq!(counts_a, counts_b);
    assert_eq!(counts_a, helnaksort::protocol::tally_answers(&answers, 4).unwrap());
}

/// Identical seeds reproduce the identical answer sequence and batch.
#[test]
fn collection_is_deterministic_per_seed() {
    let cfg = MallowsConfig::new(6, 30, 0.5, 13).unwrap();
    let profile = sample_mallows(&cfg).unwrap();
    let spec = PrivacySpec::for_bits(2.0, 1e-4, 3).unwrap();

    let run = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let assignments = assign_queries(profile.len(), 6, 3, &mut rng).unwrap();
        let answers = collect(&profile, &assignments, &spec, &mut rng).unwrap();
        let batch = shuffle(&answers, &mut rng);
        (answers, batch)
    };

    let (answers_a, batch_a) = run(99);
    let (answers_b, batch_b) = run(99);
    assert_eq!(answers_a, answers_b);
    assert_eq!(batch_a, batch_b);

    let (answers_c, _) = run(100);
    assert_ne!(answers_a, answers_c);
}

/// The noiseless, full-information private run lands exactly on the
/// noiseless aggregate; repeated runs agree rep by rep.
#[test]
fn private_run_converges_to_hra_with_huge_budget() {
    let mut cfg = ExperimentConfig::new(
        Method::DdpHelnaksort,
        DataSource::Mallows {
            m: 4,
            n: 101,
            theta: 1.0,
        },
    );
    cfg.epsilon = 1e6;
    cfg.epsilon_is_central = Some(false);
    cfg.k_queries = 6;
    cfg.master_seed = 17;

    let profile = cfg.prepare_profile().unwrap();
    let reference = hra_aggregate(&tally(&profile).unwrap());
    let expected = average_kendall(&reference, &profile).unwrap();
    for rep in 0..5 {
        assert_eq!(run_once(&cfg, rep).unwrap(), expected, "rep {rep}");
    }
}

/// Distances are reproducible per (master seed, repetition) pair.
#[test]
fn run_once_depends_only_on_seed_and_rep() {
    let mut cfg = ExperimentConfig::new(
        Method::LdpQuicksort,
        DataSource::Mallows {
            m: 5,
            n: 60,
            theta: 0.5,
        },
    );
    cfg.master_seed = 23;

    let first = run_once(&cfg, 0).unwrap();
    assert_eq!(run_once(&cfg, 0).unwrap(), first);
    let different_rep = run_once(&cfg, 1).unwrap();
    let mut other_seed = cfg.clone();
    other_seed.master_seed = 24;
    // Not a hard invariant, but with continuous noise a collision would be
    // a seed-derivation bug in practice.
    assert!(first != different_rep || first != run_once(&other_seed, 0).unwrap());
}
