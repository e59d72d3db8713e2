mod common;

use std::collections::BTreeSet;

use mdres::closure::{emit_datalog, ta_blocks_from_program, ta_closure};
use mdres::query::{eval_cq, eval_rewritten, rewrite, ConjunctiveQuery};
use mdres::relation::{load_dir, write_dir, Position};
use mdres::resolve::{enumerate_mris_oracle, fast_mri_family, is_stable, Bounds};
use mdres::Error;
use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn case_for(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if seed.is_multiple_of(2) {
        random_ni_case(&mut rng)
    } else {
        random_hsc_case(&mut rng)
    }
}

fn bounds() -> Bounds {
    Bounds {
        max_states: 20_000,
        ..Bounds::default()
    }
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        rng_seed: RngSeed::Fixed(seed()),
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn fast_family_equals_oracle(seed in any::<u64>()) {
        let c = case_for(seed);
        let fam = fast_mri_family(&c.instance, &c.mds).unwrap();
        let (all, truncated) = fam.materialize(4096);
        prop_assume!(!truncated);
        prop_assert_eq!(fam.count(), BigUint::from(all.len()));
        for x in &all {
            prop_assert!(is_stable(x, &c.mds));
            prop_assert_eq!(c.instance.change_count(x), fam.min_change());
        }
        match enumerate_mris_oracle(&c.instance, &c.mds, &bounds()) {
            Ok(o) => {
                prop_assert_eq!(&all, &o.mris);
                prop_assert_eq!(fam.min_change(), o.min_change);
            }
            Err(Error::BoundsExceeded(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn datalog_closure_agrees(seed in any::<u64>()) {
        let c = case_for(seed);
        let part = ta_closure(&c.instance, &c.mds);
        let linked: Vec<Vec<Position>> = part.nontrivial().cloned().collect();
        let derived = ta_blocks_from_program(&emit_datalog(&c.instance, &c.mds), &c.instance).unwrap();
        prop_assert_eq!(linked, derived);
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>()) {
        let c = case_for(seed);
        let dir = tempfile::tempdir().unwrap();
        write_dir(&c.instance, dir.path()).unwrap();
        let back = load_dir(c.instance.schema().clone(), dir.path()).unwrap();
        prop_assert_eq!(back, c.instance);
    }

    #[test]
    fn query_text_round_trip(seed in any::<u64>()) {
        let c = case_for(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        let q = random_query(&mut rng, &c.mds, &value_pool(4), 3);
        let again = ConjunctiveQuery::parse(&q.to_string(), c.mds.schema()).unwrap();
        prop_assert_eq!(again.to_string(), q.to_string());
    }

    #[test]
    fn classification_ignores_md_order(seed in any::<u64>()) {
        let c = case_for(seed);
        let order: Vec<usize> = (0..c.mds.len()).rev().collect();
        prop_assert_eq!(
            c.mds.classify_on(&c.instance).label,
            c.mds.permuted(&order).classify_on(&c.instance).label
        );
    }

    #[test]
    fn rewrite_keeps_queries_without_changeable_answers(seed in any::<u64>()) {
        let c = case_for(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
        let q = random_ujcq(&mut rng, &c.mds, &value_pool(4), 3);
        let rq = rewrite(&q, &c.mds).unwrap();
        if rq.is_identity() {
            prop_assert_eq!(eval_rewritten(&rq, &c.instance).tuples, eval_cq(&q, &c.instance).tuples);
        }
    }

    #[test]
    fn closure_blocks_partition_changeable_positions(seed in any::<u64>()) {
        let c = case_for(seed);
        let part = ta_closure(&c.instance, &c.mds);
        let changeable = c.mds.changeable_attrs();
        let want: BTreeSet<Position> = c
            .instance
            .positions()
            .filter(|p| changeable.contains(&p.attr_ref()))
            .collect();
        let mut seen = BTreeSet::new();
        for b in part.blocks() {
            for &p in b {
                prop_assert!(seen.insert(p));
            }
        }
        prop_assert_eq!(seen, want);
    }
}
