//! The map/reduce executor agrees with the nested-loop reference.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semcep::query::{builtin_plans, execute, execute_reference, parse_query};
use semcep::rdf::partition;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chunking_never_changes_results(seed in any::<u64>(), k in 1usize..9, parallelism in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = common::random_store(&mut rng, 800);
        let chunked = partition(&store, k).unwrap();
        let mut plans: Vec<_> = builtin_plans().into_iter().map(|(_, p)| p).collect();
        for _ in 0..4 {
            plans.push(parse_query(&common::random_query(&mut rng)).unwrap());
        }
        for plan in &plans {
            prop_assert_eq!(execute(&chunked, plan, parallelism).unwrap(), execute_reference(&store, plan));
        }
    }

    #[test]
    fn limit_takes_a_canonical_prefix(seed in any::<u64>(), limit in 0usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = common::random_store(&mut rng, 400);
        let q = "SELECT ?s ?hr WHERE { ?s SSN:hasHeartRate ?hr }";
        let all = execute(&partition(&store, 3).unwrap(), &parse_query(q).unwrap(), 2).unwrap();
        let cut = execute(&partition(&store, 5).unwrap(), &parse_query(&format!("{q} LIMIT {limit}")).unwrap(), 1).unwrap();
        prop_assert_eq!(&cut.rows[..], &all.rows[..limit.min(all.len())]);
    }
}
