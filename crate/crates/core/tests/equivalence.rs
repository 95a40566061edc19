//! Randomized differential tests: the projection miner against the
//! brute-force oracle, across every pruning configuration and the parallel
//! mode. The database generator here is deliberately separate from the unit
//! tests' fixtures.

use std::collections::BTreeMap;
use std::time::Duration;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use husp_core::miner::{mine, verify, MinerConfig};
use husp_core::model::{
    Item, Pattern, ProfitTable, QElement, QItem, QSequence, QSequenceDatabase, Threshold, Utility,
};
use husp_core::oracle::{oracle_mine, OracleLimits};

/// Up to 6 sequences over up to 5 items, 4 elements a sequence, 3 items an
/// element, quantities to 4; profits to 8 with zero allowed.
fn random_db(seed: u64) -> QSequenceDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe = rng.gen_range(1..=5u32);
    let profits = ProfitTable::from_entries(
        (1..=universe).map(|id| (Item::new(id).unwrap(), rng.gen_range(0..=8u64))),
    )
    .unwrap();
    let mut sequences = Vec::new();
    for sid in 1..=rng.gen_range(1..=6u32) {
        let mut elements = Vec::new();
        for _ in 0..rng.gen_range(1..=4usize) {
            let k = rng.gen_range(1..=3.min(universe as usize));
            let mut ids: Vec<u32> = (1..=universe).collect();
            ids.shuffle(&mut rng);
            ids.truncate(k);
            ids.sort_unstable();
            let qitems = ids
                .into_iter()
                .map(|id| QItem::new(Item::new(id).unwrap(), rng.gen_range(1..=4u32)).unwrap())
                .collect();
            elements.push(QElement::new(qitems).unwrap());
        }
        sequences.push(QSequence::new(sid, elements).unwrap());
    }
    QSequenceDatabase::new(sequences, profits).unwrap()
}

fn as_map(husps: &[(Pattern, Utility)]) -> BTreeMap<Pattern, Utility> {
    husps.iter().cloned().collect()
}

fn configs(threshold: Threshold) -> [(&'static str, MinerConfig); 4] {
    let base = MinerConfig::new(threshold);
    [
        ("full", base),
        (
            "no-puk",
            MinerConfig {
                enable_puk: false,
                ..base
            },
        ),
        (
            "no-puo",
            MinerConfig {
                enable_puo: false,
                ..base
            },
        ),
        (
            "none",
            MinerConfig {
                enable_puo: false,
                enable_puk: false,
                ..base
            },
        ),
    ]
}

#[test]
fn all_configurations_match_the_oracle() {
    let limits = OracleLimits::default();
    let thresholds: Vec<Threshold> = ["5%", "20%"].iter().map(|s| s.parse().unwrap()).collect();
    for seed in 0..150u64 {
        let db = random_db(seed);
        for &threshold in &thresholds {
            let expected = as_map(&oracle_mine(&db, threshold, &limits).unwrap());
            for (name, config) in configs(threshold) {
                let result = mine(&db, &config).unwrap();
                assert_eq!(
                    as_map(result.husps()),
                    expected,
                    "seed {seed}, threshold {threshold}, config {name}"
                );
            }
        }
    }
}

#[test]
fn parallel_exploration_changes_nothing_but_wall_time() {
    for seed in 0..60u64 {
        let db = random_db(seed.wrapping_add(10_000));
        let threshold = Threshold::new(1, 20).unwrap();
        let sequential = mine(&db, &MinerConfig::new(threshold)).unwrap();
        let parallel = mine(
            &db,
            &MinerConfig {
                parallel_roots: true,
                ..MinerConfig::new(threshold)
            },
        )
        .unwrap();
        assert_eq!(sequential.husps(), parallel.husps(), "seed {seed}");
        let (mut a, mut b) = (*sequential.stats(), *parallel.stats());
        a.elapsed = Duration::ZERO;
        b.elapsed = Duration::ZERO;
        assert_eq!(a, b, "seed {seed}");
    }
}

#[test]
fn verification_passes_on_mined_results() {
    let limits = OracleLimits::default();
    for seed in 0..40u64 {
        let db = random_db(seed.wrapping_add(77_000));
        let threshold = Threshold::new(1, 10).unwrap();
        let result = mine(&db, &MinerConfig::new(threshold)).unwrap();
        let report = verify(&result, &db, threshold, &limits).unwrap();
        assert!(report.is_clean(), "seed {seed}: {report:?}");
    }
}
