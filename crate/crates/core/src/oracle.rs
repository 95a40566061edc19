//! Brute-force reference enumeration of contained patterns.
//!
//! Deliberately naive: containment and utilities come straight from the
//! [`crate::matcher`] definitions with no shared machinery with the real
//! miner, so the two can check each other. Two enumeration strategies with
//! different failure modes are provided; their agreement is itself tested.
//!
//! Intended for small databases (up to roughly 10^4 contained patterns).
//! Hard caps abort with an error rather than ever returning a truncated
//! result.

use std::collections::HashSet;

use thiserror::Error;

use crate::matcher;
use crate::model::{database_utility, Item, Pattern, QSequenceDatabase, Threshold, Utility};

/// Abort caps for the enumerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Longest contained pattern (in items) the enumeration may encounter.
    pub max_pattern_length: usize,
    /// Most distinct contained patterns the enumeration may produce.
    pub max_patterns: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_pattern_length: 64,
            max_patterns: 1_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("a contained pattern exceeds the {0}-item length cap")]
    PatternLengthExceeded(usize),
    #[error("more than {0} distinct contained patterns")]
    PatternBudgetExceeded(usize),
}

/// Enumerates every distinct pattern contained in at least one sequence,
/// with its exact utility, sorted canonically (size, then length, then
/// lexicographic elements). Growth-based: each pattern is reached once, from
/// its unique canonical parent, via I- and S-concatenation; containment of a
/// pattern implies containment of the parent, so pruning loses nothing.
pub fn enumerate_all_patterns(
    db: &QSequenceDatabase,
    limits: &OracleLimits,
) -> Result<Vec<(Pattern, Utility)>, OracleError> {
    let universe: Vec<Item> = db.distinct_items().into_iter().collect();
    let contained = |t: &Pattern| db.sequences().iter().any(|s| matcher::contains(t, s));

    let mut out: Vec<(Pattern, Utility)> = Vec::new();
    let mut stack: Vec<Pattern> = universe
        .iter()
        .rev()
        .map(|&i| Pattern::single(i))
        .filter(|t| contained(t))
        .collect();

    while let Some(t) = stack.pop() {
        if out.len() == limits.max_patterns {
            return Err(OracleError::PatternBudgetExceeded(limits.max_patterns));
        }
        out.push((t.clone(), matcher::pattern_utility(&t, db)));

        let last = t.last_item().expect("stack holds non-empty patterns");
        let extensions = universe
            .iter()
            .filter(|&&i| i > last)
            .map(|&i| t.i_concat(i).expect("i exceeds the last item"))
            .chain(universe.iter().map(|&i| t.s_concat(i)));
        for child in extensions {
            if contained(&child) {
                if child.length() > limits.max_pattern_length {
                    return Err(OracleError::PatternLengthExceeded(limits.max_pattern_length));
                }
                stack.push(child);
            }
        }
    }

    out.sort_by(|(a, _), (b, _)| a.canonical_key().cmp(&b.canonical_key()));
    Ok(out)
}

/// Independent cross-check enumerator: generates every pattern of every
/// single sequence directly (choose a subsequence of elements, then a
/// non-empty item subset of each) and deduplicates globally. No growth, no
/// pruning argument to trust.
pub fn enumerate_by_subsequences(
    db: &QSequenceDatabase,
    limits: &OracleLimits,
) -> Result<Vec<Pattern>, OracleError> {
    let mut seen: HashSet<Pattern> = HashSet::new();

    for s in db.sequences() {
        let element_subsets: Vec<Vec<Vec<Item>>> = s
            .elements()
            .iter()
            .map(|e| {
                let items: Vec<Item> = e.qitems().iter().map(|q| q.item()).collect();
                // All non-empty subsets, ascending order preserved.
                (1u32..1 << items.len())
                    .map(|mask| {
                        items
                            .iter()
                            .enumerate()
                            .filter(|(idx, _)| mask >> idx & 1 == 1)
                            .map(|(_, &i)| i)
                            .collect()
                    })
                    .collect()
            })
            .collect();

        // Walk elements left to right, either skipping or taking a subset.
        let mut partial: Vec<Vec<Item>> = Vec::new();
        fn walk(
            eidx: usize,
            subsets: &[Vec<Vec<Item>>],
            partial: &mut Vec<Vec<Item>>,
            seen: &mut HashSet<Pattern>,
            limits: &OracleLimits,
        ) -> Result<(), OracleError> {
            if eidx == subsets.len() {
                if partial.is_empty() {
                    return Ok(());
                }
                let t = Pattern::from_elements(partial.clone())
                    .expect("subsets keep element order");
                if t.length() > limits.max_pattern_length {
                    return Err(OracleError::PatternLengthExceeded(limits.max_pattern_length));
                }
                if seen.insert(t) && seen.len() > limits.max_patterns {
                    return Err(OracleError::PatternBudgetExceeded(limits.max_patterns));
                }
                return Ok(());
            }
            walk(eidx + 1, subsets, partial, seen, limits)?;
            for subset in &subsets[eidx] {
                partial.push(subset.clone());
                walk(eidx + 1, subsets, partial, seen, limits)?;
                partial.pop();
            }
            Ok(())
        }
        walk(0, &element_subsets, &mut partial, &mut seen, limits)?;
    }

    let mut out: Vec<Pattern> = seen.into_iter().collect();
    out.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
    Ok(out)
}

/// Reference miner: enumerate everything, keep what meets the threshold.
pub fn oracle_mine(
    db: &QSequenceDatabase,
    threshold: Threshold,
    limits: &OracleLimits,
) -> Result<Vec<(Pattern, Utility)>, OracleError> {
    let total = database_utility(db);
    Ok(enumerate_all_patterns(db, limits)?
        .into_iter()
        .filter(|(_, u)| threshold.is_met(*u, total))
        .collect())
}
