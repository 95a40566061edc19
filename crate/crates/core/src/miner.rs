//! The mining search: candidate generation over pivot projections,
//! depth-first exploration with an explicit stack, both pruning strategies,
//! statistics and result verification.
//!
//! Pruning strategy 1 (item removal): items whose single-item SWU falls
//! below the minimum utility cannot appear in any result and are deleted
//! from the database up front. The minimum utility is always computed
//! against the original database utility.
//!
//! Pruning strategy 2 (candidate pruning): every extension candidate comes
//! with its exact SEU; a candidate below the minimum utility is dropped
//! together with its whole subtree, which is lossless because SEU bounds the
//! utility of every descendant and never increases along an extension edge.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::matcher;
use crate::model::{
    database_utility, sequence_utility, Item, Pattern, QElement, QSequence, QSequenceDatabase,
    Threshold, Utility,
};
use crate::oracle::{self, OracleError, OracleLimits};
use crate::uarray::{
    build_all, extension_candidates, initial_projection, project_i, project_s, CandidateSet,
    ProjectionOutcome, ProjectionState, UtilityArray,
};

/// Search configuration. Both pruning strategies default to on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinerConfig {
    pub threshold: Threshold,
    /// Strategy 1: delete globally unpromising items before indexing.
    pub enable_puo: bool,
    /// Strategy 2: drop extension candidates whose SEU is below the minimum.
    pub enable_puk: bool,
    /// Safety valve: abort (never truncate) if a pattern would grow past
    /// this many items. `None` means unlimited.
    pub max_pattern_length: Option<usize>,
    /// Explore first-level subtrees on separate threads. The result is
    /// identical to the sequential run.
    pub parallel_roots: bool,
}

impl MinerConfig {
    pub fn new(threshold: Threshold) -> Self {
        MinerConfig {
            threshold,
            enable_puo: true,
            enable_puk: true,
            max_pattern_length: None,
            parallel_roots: false,
        }
    }
}

/// Search counters. All except `elapsed` are deterministic for a given
/// database and configuration, including under parallel root exploration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MiningStats {
    /// Patterns whose projection was built and examined.
    pub nodes_visited: u64,
    /// Per-sequence pivot projections constructed across all nodes.
    pub projections_built: u64,
    /// Items deleted by pruning strategy 1.
    pub puo_removed_items: u64,
    /// Candidate subtrees dropped by pruning strategy 2.
    pub puk_pruned_nodes: u64,
    /// Patterns reported.
    pub husp_count: u64,
    /// Wall time of the whole mine call.
    pub elapsed: Duration,
}

/// Mining output: the high-utility patterns with exact utilities, sorted by
/// size, then length, then lexicographic elements, plus the run's counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningResult {
    husps: Vec<(Pattern, Utility)>,
    stats: MiningStats,
}

impl MiningResult {
    pub fn new(husps: Vec<(Pattern, Utility)>, stats: MiningStats) -> Self {
        MiningResult { husps, stats }
    }

    pub fn husps(&self) -> &[(Pattern, Utility)] {
        &self.husps
    }

    pub fn stats(&self) -> &MiningStats {
        &self.stats
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MineError {
    #[error(
        "pattern length cap {cap} reached with extensions remaining; raise the cap or the threshold"
    )]
    PatternLengthCapExceeded { cap: usize },
}

/// Pruning strategy 1. Computes each item's SWU (the summed utility of the
/// sequences it occurs in, against the original total), deletes items that
/// cannot reach the minimum utility and drops elements and sequences that
/// become empty. Surviving pattern utilities are unchanged: deleted items
/// cannot occur in any pattern meeting the threshold, and deleting items
/// never removes a match of a pattern over surviving items.
pub fn revise_database(
    db: &QSequenceDatabase,
    threshold: Threshold,
) -> (QSequenceDatabase, BTreeSet<Item>) {
    let total = database_utility(db);
    let mut swu: std::collections::BTreeMap<Item, Utility> = std::collections::BTreeMap::new();
    for s in db.sequences() {
        let u = sequence_utility(s, db.profits()).expect("database items are resolvable");
        for item in s.distinct_items() {
            *swu.entry(item).or_insert(0) += u;
        }
    }
    let removed: BTreeSet<Item> = swu
        .into_iter()
        .filter(|(_, swu)| !threshold.is_met(*swu, total))
        .map(|(item, _)| item)
        .collect();
    if removed.is_empty() {
        return (db.clone(), removed);
    }

    let mut sequences = Vec::new();
    for s in db.sequences() {
        let elements: Vec<QElement> = s
            .elements()
            .iter()
            .filter_map(|e| {
                let kept: Vec<_> = e
                    .qitems()
                    .iter()
                    .filter(|q| !removed.contains(&q.item()))
                    .copied()
                    .collect();
                if kept.is_empty() {
                    None
                } else {
                    Some(QElement::new(kept).expect("kept items stay sorted and distinct"))
                }
            })
            .collect();
        if !elements.is_empty() {
            sequences.push(QSequence::new(s.sid(), elements).expect("non-empty"));
        }
    }
    let revised = QSequenceDatabase::new(sequences, db.profits().clone())
        .expect("filtering preserves database invariants");
    (revised, removed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExtensionKind {
    Itemset,
    Sequence,
}

struct Frame {
    pattern: Pattern,
    state: ProjectionState,
    seu: Utility,
    candidates: Vec<(ExtensionKind, Item, Utility)>,
    next: usize,
}

/// Counters accumulated per explored subtree, merged deterministically.
#[derive(Debug, Clone, Copy, Default)]
struct SubtreeStats {
    nodes_visited: u64,
    projections_built: u64,
    puk_pruned_nodes: u64,
}

struct SearchCtx<'a> {
    arrays: &'a [UtilityArray],
    threshold: Threshold,
    total: Utility,
    enable_puk: bool,
    max_pattern_length: Option<usize>,
}

impl SearchCtx<'_> {
    fn meets(&self, u: Utility) -> bool {
        self.threshold.is_met(u, self.total)
    }

    /// Orders and prunes a node's candidates: itemset extensions first, then
    /// sequence extensions, items ascending within each kind.
    fn admit(
        &self,
        cands: CandidateSet,
        stats: &mut SubtreeStats,
    ) -> Vec<(ExtensionKind, Item, Utility)> {
        let mut list: Vec<(ExtensionKind, Item, Utility)> = cands
            .i_items
            .into_iter()
            .map(|(i, seu)| (ExtensionKind::Itemset, i, seu))
            .chain(
                cands
                    .s_items
                    .into_iter()
                    .map(|(i, seu)| (ExtensionKind::Sequence, i, seu)),
            )
            .collect();
        if self.enable_puk {
            list.retain(|(_, _, seu)| {
                let keep = self.meets(*seu);
                if !keep {
                    stats.puk_pruned_nodes += 1;
                }
                keep
            });
        }
        list
    }

    /// Counts, reports and prepares a node the search just entered.
    fn enter(
        &self,
        pattern: Pattern,
        outcome: ProjectionOutcome,
        out: &mut Vec<(Pattern, Utility)>,
        stats: &mut SubtreeStats,
    ) -> Result<Frame, MineError> {
        debug_assert!(outcome.utility <= outcome.seu);
        stats.nodes_visited += 1;
        stats.projections_built += outcome.state.seq_count() as u64;
        if self.meets(outcome.utility) {
            out.push((pattern.clone(), outcome.utility));
        }
        let candidates = self.admit(extension_candidates(&outcome.state, self.arrays), stats);
        if let Some(cap) = self.max_pattern_length {
            if pattern.length() >= cap && !candidates.is_empty() {
                return Err(MineError::PatternLengthCapExceeded { cap });
            }
        }
        Ok(Frame {
            pattern,
            state: outcome.state,
            seu: outcome.seu,
            candidates,
            next: 0,
        })
    }

    /// Depth-first exploration of one first-level item's subtree, with an
    /// explicit stack (pattern depth equals stack depth, so memory stays
    /// proportional to the longest pattern, not to the subtree).
    fn explore_root(
        &self,
        item: Item,
        candidate_seu: Utility,
    ) -> Result<(Vec<(Pattern, Utility)>, SubtreeStats), MineError> {
        let mut out = Vec::new();
        let mut stats = SubtreeStats::default();
        let outcome = initial_projection(self.arrays, item);
        debug_assert_eq!(outcome.seu, candidate_seu);
        let mut stack = vec![self.enter(Pattern::single(item), outcome, &mut out, &mut stats)?];

        while let Some(top) = stack.last_mut() {
            if top.next == top.candidates.len() {
                stack.pop();
                continue;
            }
            let (kind, i, cand_seu) = top.candidates[top.next];
            top.next += 1;
            let (child, outcome) = match kind {
                ExtensionKind::Itemset => (
                    top.pattern
                        .i_concat(i)
                        .expect("itemset candidates exceed the last item"),
                    project_i(&top.state, self.arrays, i),
                ),
                ExtensionKind::Sequence => {
                    (top.pattern.s_concat(i), project_s(&top.state, self.arrays, i))
                }
            };
            // The candidate SEU is exact, and SEU never increases along an
            // extension edge.
            debug_assert_eq!(outcome.seu, cand_seu);
            debug_assert!(outcome.seu <= top.seu);
            debug_assert!(!outcome.state.is_empty(), "candidates come from occurrences");
            let frame = self.enter(child, outcome, &mut out, &mut stats)?;
            stack.push(frame);
        }
        Ok((out, stats))
    }
}

/// Mines every pattern whose utility reaches `threshold` times the database
/// utility. See [`MinerConfig`] for the pruning and parallelism switches;
/// results and deterministic counters are identical across all switch
/// combinations (only the work differs).
pub fn mine(db: &QSequenceDatabase, config: &MinerConfig) -> Result<MiningResult, MineError> {
    let start = Instant::now();
    let total = database_utility(db);
    let mut stats = MiningStats::default();

    let revised: QSequenceDatabase;
    let db_mined = if config.enable_puo {
        let (r, removed) = revise_database(db, config.threshold);
        stats.puo_removed_items = removed.len() as u64;
        revised = r;
        &revised
    } else {
        db
    };

    let arrays = build_all(db_mined);
    let ctx = SearchCtx {
        arrays: &arrays,
        threshold: config.threshold,
        total,
        enable_puk: config.enable_puk,
        max_pattern_length: config.max_pattern_length,
    };

    let root_state = ProjectionState::root(&arrays);
    let root_candidates = extension_candidates(&root_state, &arrays);
    debug_assert!(root_candidates.i_items.is_empty());
    let mut subtree_stats = SubtreeStats::default();
    let roots = ctx.admit(root_candidates, &mut subtree_stats);

    type SubtreeOutcome = Result<(Vec<(Pattern, Utility)>, SubtreeStats), MineError>;

    let mut husps: Vec<(Pattern, Utility)> = Vec::new();
    if config.parallel_roots && roots.len() > 1 {
        let workers = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(roots.len());
        let mut slots: Vec<Option<SubtreeOutcome>> = Vec::new();
        slots.resize_with(roots.len(), || None);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let ctx = &ctx;
                let roots = &roots;
                handles.push(scope.spawn(move || {
                    let mut mine: Vec<(usize, _)> = Vec::new();
                    for (idx, (_, item, seu)) in roots.iter().enumerate() {
                        if idx % workers == w {
                            mine.push((idx, ctx.explore_root(*item, *seu)));
                        }
                    }
                    mine
                }));
            }
            for h in handles {
                for (idx, res) in h.join().expect("worker panicked") {
                    slots[idx] = Some(res);
                }
            }
        });
        // Merge in root order so the outcome never depends on scheduling.
        for slot in slots {
            let (sub_husps, sub_stats) = slot.expect("every root explored")?;
            husps.extend(sub_husps);
            merge(&mut subtree_stats, sub_stats);
        }
    } else {
        for (_, item, seu) in &roots {
            let (sub_husps, sub_stats) = ctx.explore_root(*item, *seu)?;
            husps.extend(sub_husps);
            merge(&mut subtree_stats, sub_stats);
        }
    }

    husps.sort_by(|(a, _), (b, _)| a.canonical_key().cmp(&b.canonical_key()));
    stats.nodes_visited = subtree_stats.nodes_visited;
    stats.projections_built = subtree_stats.projections_built;
    stats.puk_pruned_nodes = subtree_stats.puk_pruned_nodes;
    stats.husp_count = husps.len() as u64;
    stats.elapsed = start.elapsed();
    Ok(MiningResult { husps, stats })
}

fn merge(into: &mut SubtreeStats, from: SubtreeStats) {
    into.nodes_visited += from.nodes_visited;
    into.projections_built += from.projections_built;
    into.puk_pruned_nodes += from.puk_pruned_nodes;
}

/// One discrepancy class found by [`verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    /// Patterns the oracle reports but the result lacks.
    pub missing: Vec<(Pattern, Utility)>,
    /// Reported patterns the oracle does not confirm.
    pub extra: Vec<(Pattern, Utility)>,
    /// Reported patterns whose recomputed utility differs:
    /// (pattern, reported, actual).
    pub mis_valued: Vec<(Pattern, Utility, Utility)>,
    /// Number of reported patterns checked.
    pub checked: usize,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.mis_valued.is_empty()
    }
}

/// Re-derives every reported utility with the reference matcher and compares
/// the reported set against the brute-force oracle at the same threshold.
pub fn verify(
    result: &MiningResult,
    db: &QSequenceDatabase,
    threshold: Threshold,
    limits: &OracleLimits,
) -> Result<VerifyReport, OracleError> {
    let mut mis_valued = Vec::new();
    for (t, reported) in result.husps() {
        let actual = matcher::pattern_utility(t, db);
        if actual != *reported {
            mis_valued.push((t.clone(), *reported, actual));
        }
    }

    let expected = oracle::oracle_mine(db, threshold, limits)?;
    let expected_set: std::collections::BTreeMap<&Pattern, Utility> =
        expected.iter().map(|(t, u)| (t, *u)).collect();
    let reported_set: std::collections::BTreeMap<&Pattern, Utility> =
        result.husps().iter().map(|(t, u)| (t, *u)).collect();

    let missing = expected
        .iter()
        .filter(|(t, _)| !reported_set.contains_key(t))
        .cloned()
        .collect();
    let extra = result
        .husps()
        .iter()
        .filter(|(t, _)| !expected_set.contains_key(t))
        .cloned()
        .collect();

    Ok(VerifyReport {
        missing,
        extra,
        mis_valued,
        checked: result.husps().len(),
    })
}
