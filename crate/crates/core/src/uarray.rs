//! Utility-array index and pivot projections.
//!
//! A utility-array stores, per q-item occurrence of one sequence: the element
//! id, the item, its utility, the remaining utility after it, a link to the
//! next occurrence of the same item and a link to the start of the next
//! element. Positions and element ids are 1-based; absent links are `None`.
//!
//! Pattern search never rewrites sequences. A pattern's footprint in a
//! sequence is a list of pivots: one per element where some match ends, each
//! carrying the position of the match end and the best utility among the
//! matches ending there. Extending the pattern only moves pivots forward, so
//! a projection costs a few machine words per containing sequence.

use std::collections::BTreeMap;

use crate::model::{q_item_utility, Item, ProfitTable, QSequence, QSequenceDatabase, Utility};

/// One q-item occurrence inside a [`UtilityArray`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UtilityArrayEntry {
    eid: u32,
    item: Item,
    u: Utility,
    ru: Utility,
    next_pos: Option<u32>,
    next_eid: Option<u32>,
}

impl UtilityArrayEntry {
    /// 1-based id of the element this occurrence belongs to.
    pub fn eid(&self) -> u32 {
        self.eid
    }

    pub fn item(&self) -> Item {
        self.item
    }

    /// Utility of this occurrence (quantity times unit profit).
    pub fn u(&self) -> Utility {
        self.u
    }

    /// Remaining utility: sum of the utilities at all later positions.
    pub fn ru(&self) -> Utility {
        self.ru
    }

    /// Position of the next occurrence of the same item, if any.
    pub fn next_pos(&self) -> Option<u32> {
        self.next_pos
    }

    /// Position where the next element starts, if any.
    pub fn next_eid(&self) -> Option<u32> {
        self.next_eid
    }
}

/// The per-sequence index: entries in sequence order plus a first-occurrence
/// table per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityArray {
    sid: u32,
    entries: Vec<UtilityArrayEntry>,
    first_occurrence: BTreeMap<Item, u32>,
}

impl UtilityArray {
    pub fn sid(&self) -> u32 {
        self.sid
    }

    /// Number of q-item occurrences.
    pub fn len(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at 1-based position `pos`. Panics outside 1..=len.
    pub fn entry(&self, pos: u32) -> &UtilityArrayEntry {
        &self.entries[pos as usize - 1]
    }

    pub fn entries(&self) -> &[UtilityArrayEntry] {
        &self.entries
    }

    pub fn first_occurrence(&self, item: Item) -> Option<u32> {
        self.first_occurrence.get(&item).copied()
    }

    /// Positions of all occurrences of `item`, ascending, by chasing the
    /// next_pos links from the first occurrence.
    pub fn occurrences(&self, item: Item) -> impl Iterator<Item = u32> + '_ {
        let mut next = self.first_occurrence(item);
        std::iter::from_fn(move || {
            let pos = next?;
            next = self.entry(pos).next_pos();
            Some(pos)
        })
    }

    /// Renders the array as a tab-separated table, one row per position,
    /// with `-` for absent links.
    pub fn render_table(&self) -> String {
        let mut out = String::from("pos\teid\titem\tu\tru\tnext_pos\tnext_eid\n");
        let link = |l: Option<u32>| l.map_or_else(|| "-".to_string(), |v| v.to_string());
        for (idx, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                idx + 1,
                e.eid(),
                e.item(),
                e.u(),
                e.ru(),
                link(e.next_pos()),
                link(e.next_eid()),
            ));
        }
        out
    }
}

/// Builds the utility-array of one sequence: one forward pass for positions,
/// element ids, utilities and first occurrences, one backward pass for the
/// remaining-utility suffix sums and the same-item links.
pub fn build_utility_array(s: &QSequence, profits: &ProfitTable) -> UtilityArray {
    let mut entries = Vec::with_capacity(s.qitem_count());
    let mut first_occurrence = BTreeMap::new();
    let mut element_start = Vec::with_capacity(s.elements().len());

    let mut pos: u32 = 0;
    for (eidx, e) in s.elements().iter().enumerate() {
        element_start.push(pos + 1);
        for q in e.qitems() {
            pos += 1;
            first_occurrence.entry(q.item()).or_insert(pos);
            entries.push(UtilityArrayEntry {
                eid: eidx as u32 + 1,
                item: q.item(),
                u: q_item_utility(q, profits).expect("database items are resolvable"),
                ru: 0,
                next_pos: None,
                next_eid: None,
            });
        }
    }

    let element_count = s.elements().len() as u32;
    let mut suffix: Utility = 0;
    let mut last_seen: BTreeMap<Item, u32> = BTreeMap::new();
    for idx in (0..entries.len()).rev() {
        let e = &mut entries[idx];
        e.ru = suffix;
        suffix += e.u;
        e.next_pos = last_seen.insert(e.item, idx as u32 + 1);
        if e.eid < element_count {
            e.next_eid = Some(element_start[e.eid as usize]);
        }
    }

    UtilityArray {
        sid: s.sid(),
        entries,
        first_occurrence,
    }
}

/// Builds utility-arrays for every sequence of the database, in order.
pub fn build_all(db: &QSequenceDatabase) -> Vec<UtilityArray> {
    db.sequences()
        .iter()
        .map(|s| build_utility_array(s, db.profits()))
        .collect()
}

/// A match end inside one sequence: the end position, its element id and the
/// best utility among the matches of the current pattern ending there.
/// The virtual root pivot (pos 0, eid 0, best 0) seeds the empty pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pivot {
    pos: u32,
    eid: u32,
    best: Utility,
}

impl Pivot {
    pub fn pos(&self) -> u32 {
        self.pos
    }

    pub fn eid(&self) -> u32 {
        self.eid
    }

    pub fn best(&self) -> Utility {
        self.best
    }
}

/// Pivots of one containing sequence, ascending by position with at most one
/// pivot per element (matches sharing an end element share an end position).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqProjection {
    array_index: usize,
    pivots: Vec<Pivot>,
}

impl SeqProjection {
    pub fn array_index(&self) -> usize {
        self.array_index
    }

    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }
}

/// A pattern's projection: pivots for exactly the sequences containing it.
/// Holds positions into the immutable utility-arrays, never sequence data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProjectionState {
    entries: Vec<SeqProjection>,
}

impl ProjectionState {
    /// Projection of the empty pattern: one virtual pivot ahead of every
    /// non-empty sequence. S-projecting from it lands on initial items.
    pub fn root(arrays: &[UtilityArray]) -> Self {
        ProjectionState {
            entries: arrays
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_empty())
                .map(|(array_index, _)| SeqProjection {
                    array_index,
                    pivots: vec![Pivot {
                        pos: 0,
                        eid: 0,
                        best: 0,
                    }],
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[SeqProjection] {
        &self.entries
    }

    /// Number of sequences still containing the pattern.
    pub fn seq_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A projection step's result: the new state plus the projected pattern's
/// exact utility and SEU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionOutcome {
    pub state: ProjectionState,
    pub utility: Utility,
    pub seu: Utility,
}

fn debug_check_pivots(pivots: &[Pivot]) {
    debug_assert!(!pivots.is_empty());
    debug_assert!(pivots.windows(2).all(|w| w[0].pos < w[1].pos));
    debug_assert!(pivots.windows(2).all(|w| w[0].eid < w[1].eid));
}

/// S-concatenation step: moves each sequence's pivots onto the occurrences
/// of `item` in strictly later elements. The best utility at a new pivot is
/// the running maximum over earlier-element pivots plus the occurrence's
/// utility; the SEU contribution is the per-sequence maximum of best + ru.
pub fn project_s(
    state: &ProjectionState,
    arrays: &[UtilityArray],
    item: Item,
) -> ProjectionOutcome {
    let mut entries = Vec::new();
    let mut utility: Utility = 0;
    let mut seu: Utility = 0;

    for sp in state.entries() {
        let arr = &arrays[sp.array_index];
        let mut pivots = Vec::new();
        let (mut best_u, mut best_seu): (Utility, Utility) = (0, 0);
        let mut run_best: Option<Utility> = None;
        let mut older = sp.pivots().iter().peekable();
        for pos in arr.occurrences(item) {
            let e = arr.entry(pos);
            while let Some(p) = older.peek() {
                if p.eid() < e.eid() {
                    run_best = Some(run_best.map_or(p.best(), |b| b.max(p.best())));
                    older.next();
                } else {
                    break;
                }
            }
            if let Some(base) = run_best {
                let best = base + e.u();
                pivots.push(Pivot {
                    pos,
                    eid: e.eid(),
                    best,
                });
                best_u = best_u.max(best);
                best_seu = best_seu.max(best + e.ru());
            }
        }
        if !pivots.is_empty() {
            debug_check_pivots(&pivots);
            entries.push(SeqProjection {
                array_index: sp.array_index,
                pivots,
            });
            utility += best_u;
            seu += best_seu;
        }
    }

    ProjectionOutcome {
        state: ProjectionState { entries },
        utility,
        seu,
    }
}

/// I-concatenation step: each pivot advances to `item` inside its own
/// element, if present after the pivot position. `item` must exceed the
/// pattern's last item; occurrences before the pivot cannot belong to a
/// canonical extension and are skipped by the element-ordered scan.
pub fn project_i(
    state: &ProjectionState,
    arrays: &[UtilityArray],
    item: Item,
) -> ProjectionOutcome {
    let mut entries = Vec::new();
    let mut utility: Utility = 0;
    let mut seu: Utility = 0;

    for sp in state.entries() {
        let arr = &arrays[sp.array_index];
        let mut pivots = Vec::new();
        let (mut best_u, mut best_seu): (Utility, Utility) = (0, 0);
        for p in sp.pivots() {
            let mut pos = p.pos() + 1;
            while pos <= arr.len() {
                let e = arr.entry(pos);
                if e.eid() != p.eid() || e.item() > item {
                    break;
                }
                if e.item() == item {
                    let best = p.best() + e.u();
                    pivots.push(Pivot {
                        pos,
                        eid: e.eid(),
                        best,
                    });
                    best_u = best_u.max(best);
                    best_seu = best_seu.max(best + e.ru());
                    break;
                }
                pos += 1;
            }
        }
        if !pivots.is_empty() {
            debug_check_pivots(&pivots);
            entries.push(SeqProjection {
                array_index: sp.array_index,
                pivots,
            });
            utility += best_u;
            seu += best_seu;
        }
    }

    ProjectionOutcome {
        state: ProjectionState { entries },
        utility,
        seu,
    }
}

/// Projection of a single-item pattern, equivalent to S-projecting from the
/// root state.
pub fn initial_projection(arrays: &[UtilityArray], item: Item) -> ProjectionOutcome {
    project_s(&ProjectionState::root(arrays), arrays, item)
}

/// Extension candidates of the projected pattern, each with its exact SEU.
/// Keys iterate in ascending item order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSet {
    /// Items extending the last element (I-concatenation).
    pub i_items: BTreeMap<Item, Utility>,
    /// Items starting a new element (S-concatenation).
    pub s_items: BTreeMap<Item, Utility>,
}

/// Running (sum over finished sequences, current sequence maximum)
/// aggregate; SEU sums one maximum per containing sequence.
struct SeuAgg {
    sum: Utility,
    cur_seq: usize,
    cur_max: Utility,
}

fn bump(map: &mut BTreeMap<Item, SeuAgg>, item: Item, seq: usize, value: Utility) {
    map.entry(item)
        .and_modify(|a| {
            if a.cur_seq == seq {
                a.cur_max = a.cur_max.max(value);
            } else {
                a.sum += a.cur_max;
                a.cur_seq = seq;
                a.cur_max = value;
            }
        })
        .or_insert(SeuAgg {
            sum: 0,
            cur_seq: seq,
            cur_max: value,
        });
}

fn settle(map: BTreeMap<Item, SeuAgg>) -> BTreeMap<Item, Utility> {
    map.into_iter()
        .map(|(item, a)| (item, a.sum + a.cur_max))
        .collect()
}

/// One scan over the projected sequences yields every I- and S-extension
/// item together with its exact SEU. An item inside a pivot's element (after
/// the pivot) is an I-candidate; an item in any element after some pivot's
/// element is an S-candidate; both contribute `reachable best + u + ru`,
/// maximized per sequence and summed across sequences.
pub fn extension_candidates(state: &ProjectionState, arrays: &[UtilityArray]) -> CandidateSet {
    let mut i_agg: BTreeMap<Item, SeuAgg> = BTreeMap::new();
    let mut s_agg: BTreeMap<Item, SeuAgg> = BTreeMap::new();

    for (seq, sp) in state.entries().iter().enumerate() {
        let arr = &arrays[sp.array_index];

        for p in sp.pivots() {
            let mut pos = p.pos() + 1;
            while pos <= arr.len() {
                let e = arr.entry(pos);
                if e.eid() != p.eid() {
                    break;
                }
                bump(&mut i_agg, e.item(), seq, p.best() + e.u() + e.ru());
                pos += 1;
            }
        }

        let mut run_best: Option<Utility> = None;
        let mut older = sp.pivots().iter().peekable();
        for pos in sp.pivots()[0].pos() + 1..=arr.len() {
            let e = arr.entry(pos);
            while let Some(p) = older.peek() {
                if p.eid() < e.eid() {
                    run_best = Some(run_best.map_or(p.best(), |b| b.max(p.best())));
                    older.next();
                } else {
                    break;
                }
            }
            if let Some(base) = run_best {
                bump(&mut s_agg, e.item(), seq, base + e.u() + e.ru());
            }
        }
    }

    CandidateSet {
        i_items: settle(i_agg),
        s_items: settle(s_agg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher;
    use crate::model::{Item, Pattern};
    use crate::testutil::{db_from_text, random_contained_pattern, random_db, table1};
    use proptest::prelude::*;

    fn item(id: u32) -> Item {
        Item::new(id).unwrap()
    }

    #[test]
    fn golden_array_for_the_first_sequence() {
        let db = table1();
        let arr = build_utility_array(&db.sequences()[0], db.profits());
        assert_eq!(arr.sid(), 1);
        assert_eq!(arr.len(), 7);

        let expect = [
            // (eid, item, u, ru, next_pos, next_eid)
            (1, 1, 6, 65, Some(6), Some(3)),
            (1, 3, 10, 55, Some(3), Some(3)),
            (2, 3, 20, 35, None, Some(4)),
            (3, 2, 20, 15, None, Some(6)),
            (3, 6, 3, 12, None, Some(6)),
            (4, 1, 6, 6, None, None),
            (4, 5, 6, 0, None, None),
        ];
        for (idx, &(eid, id, u, ru, next_pos, next_eid)) in expect.iter().enumerate() {
            let e = arr.entry(idx as u32 + 1);
            assert_eq!(e.eid(), eid, "eid at pos {}", idx + 1);
            assert_eq!(e.item(), item(id), "item at pos {}", idx + 1);
            assert_eq!(e.u(), u, "u at pos {}", idx + 1);
            assert_eq!(e.ru(), ru, "ru at pos {}", idx + 1);
            assert_eq!(e.next_pos(), next_pos, "next_pos at pos {}", idx + 1);
            assert_eq!(e.next_eid(), next_eid, "next_eid at pos {}", idx + 1);
        }

        for (id, pos) in [(1, 1), (3, 2), (2, 4), (6, 5), (5, 7)] {
            assert_eq!(arr.first_occurrence(item(id)), Some(pos));
        }
        assert_eq!(arr.first_occurrence(item(4)), None);
        let a_positions: Vec<u32> = arr.occurrences(item(1)).collect();
        assert_eq!(a_positions, [1, 6]);
    }

    #[test]
    fn table_rendering_matches_the_golden_rows() {
        let db = table1();
        let arr = build_utility_array(&db.sequences()[0], db.profits());
        let expected = "\
pos\teid\titem\tu\tru\tnext_pos\tnext_eid
1\t1\t1\t6\t65\t6\t3
2\t1\t3\t10\t55\t3\t3
3\t2\t3\t20\t35\t-\t4
4\t3\t2\t20\t15\t-\t6
5\t3\t6\t3\t12\t-\t6
6\t4\t1\t6\t6\t-\t-
7\t4\t5\t6\t0\t-\t-
";
        assert_eq!(arr.render_table(), expected);
    }

    #[test]
    fn entry_counts_across_the_database() {
        let db = table1();
        let arrays = build_all(&db);
        let counts: Vec<u32> = arrays.iter().map(|a| a.len()).collect();
        assert_eq!(counts, [7, 7, 6, 5, 7]);
    }

    #[test]
    fn single_item_sequence() {
        let db = db_from_text("3:2 -2", "3\t10\n");
        let arr = build_utility_array(&db.sequences()[0], db.profits());
        assert_eq!(arr.len(), 1);
        let e = arr.entry(1);
        assert_eq!((e.eid(), e.u(), e.ru()), (1, 20, 0));
        assert_eq!((e.next_pos(), e.next_eid()), (None, None));
    }

    #[test]
    fn initial_projection_on_the_running_example() {
        let db = table1();
        let arrays = build_all(&db);

        let a = initial_projection(&arrays, item(1));
        assert_eq!(a.utility, 54);
        assert_eq!(a.seu, matcher::seu(&Pattern::single(item(1)), &db));
        assert_eq!(a.state.seq_count(), 5);
        // S1 keeps both occurrences of item 1 as pivots.
        let s1 = &a.state.entries()[0];
        let pivots: Vec<(u32, u32, u64)> = s1
            .pivots()
            .iter()
            .map(|p| (p.pos(), p.eid(), p.best()))
            .collect();
        assert_eq!(pivots, [(1, 1, 6), (6, 4, 6)]);

        // Per-sequence SEU contribution of S1 alone is 6 + 65 = 71.
        let s1_only = db_from_text("1:2 3:1 -1 3:2 -1 2:10 6:3 -1 1:2 5:1 -2", "1\t3\n2\t2\n3\t10\n5\t6\n6\t1\n");
        let s1_arrays = build_all(&s1_only);
        assert_eq!(initial_projection(&s1_arrays, item(1)).seu, 71);
        // And for item 3 (two occurrences, max of 10+55 and 20+35) it is 65.
        let c = initial_projection(&s1_arrays, item(3));
        assert_eq!(c.seu, 65);
        assert_eq!(c.utility, 20);

        let absent = initial_projection(&arrays, item(9));
        assert!(absent.state.is_empty());
        assert_eq!((absent.utility, absent.seu), (0, 0));
    }

    #[test]
    fn i_projection_on_the_running_example() {
        let db = table1();
        let arrays = build_all(&db);

        // <[1]> extended to <[1 3]>: only S1's first pivot has a 3 after it
        // in the same element.
        let a = initial_projection(&arrays, item(1));
        let ac = project_i(&a.state, &arrays, item(3));
        assert_eq!(ac.utility, 16);
        assert_eq!(ac.state.seq_count(), 1);
        let pivots = ac.state.entries()[0].pivots();
        assert_eq!((pivots[0].pos(), pivots[0].eid(), pivots[0].best()), (2, 1, 16));
        assert_eq!(
            ac.seu,
            matcher::seu(&Pattern::from_elements(vec![vec![item(1), item(3)]]).unwrap(), &db)
        );

        // Extending with an item at or below the pattern's last item finds
        // nothing (such an extension is never canonical).
        let aa = project_i(&a.state, &arrays, item(1));
        assert!(aa.state.is_empty());
    }

    #[test]
    fn s_projection_on_the_running_example() {
        let db = table1();
        let arrays = build_all(&db);
        let a = initial_projection(&arrays, item(1));
        let ab = project_s(&a.state, &arrays, item(2));

        assert_eq!(ab.utility, 69);
        assert_eq!(ab.seu, 118);
        assert_eq!(ab.state.seq_count(), 3);

        // S3 keeps pivots in both elements containing item 2; the second
        // pivot's best tracks the prefix maximum of the earlier pivots.
        let s3 = &ab.state.entries()[2];
        let pivots: Vec<(u32, u32, u64)> = s3
            .pivots()
            .iter()
            .map(|p| (p.pos(), p.eid(), p.best()))
            .collect();
        assert_eq!(pivots, [(2, 2, 20), (5, 4, 16)]);

        // <[5]> then <[5],[1]> in the last sequence: 6 + 12.
        let e = initial_projection(&arrays, item(5));
        let ea = project_s(&e.state, &arrays, item(1));
        let s5_pivot = ea.state.entries().last().unwrap().pivots()[0];
        assert_eq!((s5_pivot.pos(), s5_pivot.best()), (6, 18));
    }

    #[test]
    fn root_candidates_on_the_running_example() {
        let db = table1();
        let arrays = build_all(&db);
        let root = ProjectionState::root(&arrays);
        let cands = extension_candidates(&root, &arrays);

        assert!(cands.i_items.is_empty());
        let items: Vec<u32> = cands.s_items.keys().map(|i| i.id()).collect();
        assert_eq!(items, [1, 2, 3, 4, 5, 6]);
        for (i, seu) in &cands.s_items {
            assert_eq!(*seu, matcher::seu(&Pattern::single(*i), &db), "item {i}");
        }
    }

    #[test]
    fn candidates_after_a_pivot() {
        // Single sequence <[(a:3)(b:4)(d:5)],[(c:2)(e:1)]>; from <[2]> the
        // I-candidate is item 4 and the S-candidates are items 3 and 5.
        let db = db_from_text("1:3 2:4 4:5 -1 3:2 5:1 -2", "1\t3\n2\t2\n3\t10\n4\t4\n5\t6\n");
        let arrays = build_all(&db);
        let b = initial_projection(&arrays, item(2));
        let cands = extension_candidates(&b.state, &arrays);

        let i_items: Vec<(u32, u64)> = cands.i_items.iter().map(|(i, s)| (i.id(), *s)).collect();
        assert_eq!(i_items, [(4, 54)]); // 8 + 20 + 26
        let s_items: Vec<(u32, u64)> = cands.s_items.iter().map(|(i, s)| (i.id(), *s)).collect();
        assert_eq!(s_items, [(3, 34), (5, 14)]); // 8+20+6 and 8+6+0

        // Candidate SEU values are exact: they equal the projected child's.
        assert_eq!(project_i(&b.state, &arrays, item(4)).seu, 54);
        assert_eq!(project_s(&b.state, &arrays, item(3)).seu, 34);
        assert_eq!(project_s(&b.state, &arrays, item(5)).seu, 14);
    }

    proptest! {
        // Links partition occurrences: chasing next_pos from first
        // occurrences visits each position exactly once, in order, with
        // matching items.
        #[test]
        fn links_partition_positions(seed in 0u64..300) {
            let db = random_db(seed);
            for (s, arr) in db.sequences().iter().zip(build_all(&db)) {
                let mut seen = Vec::new();
                for i in arr.first_occurrence.keys() {
                    for pos in arr.occurrences(*i) {
                        prop_assert_eq!(arr.entry(pos).item(), *i);
                        seen.push(pos);
                    }
                }
                seen.sort_unstable();
                let all: Vec<u32> = (1..=s.qitem_count() as u32).collect();
                prop_assert_eq!(seen, all);
            }
        }

        // ru telescopes: ru(pos) is the exact suffix utility sum, ending at 0.
        #[test]
        fn remaining_utility_telescopes(seed in 0u64..300) {
            let db = random_db(seed.wrapping_add(1_000_000));
            for arr in build_all(&db) {
                let mut suffix: u64 = 0;
                for pos in (1..=arr.len()).rev() {
                    prop_assert_eq!(arr.entry(pos).ru(), suffix);
                    suffix += arr.entry(pos).u();
                }
                for pos in 1..=arr.len() {
                    let e = arr.entry(pos);
                    prop_assert_eq!(
                        e.next_eid().is_none(),
                        e.eid() == arr.entry(arr.len()).eid()
                    );
                    if let Some(np) = e.next_eid() {
                        prop_assert_eq!(arr.entry(np).eid(), e.eid() + 1);
                        prop_assert!(np == 1 || arr.entry(np - 1).eid() == e.eid());
                    }
                }
            }
        }

        // Growing a contained pattern step by step through projections gives
        // the same utility and SEU as the reference matcher at every step.
        #[test]
        fn projection_agrees_with_the_matcher(seed in 0u64..500) {
            let db = random_db(seed.wrapping_mul(3).wrapping_add(17));
            let Some(target) = random_contained_pattern(&db, seed ^ 0x5ca1ab1e) else {
                return Ok(());
            };
            let arrays = build_all(&db);
            let mut pattern = Pattern::empty();
            let mut state = ProjectionState::root(&arrays);
            for (eidx, element) in target.elements().iter().enumerate() {
                for (jdx, &i) in element.iter().enumerate() {
                    let outcome = if eidx > 0 || jdx > 0 {
                        if jdx == 0 {
                            pattern = pattern.s_concat(i);
                            project_s(&state, &arrays, i)
                        } else {
                            pattern = pattern.i_concat(i).unwrap();
                            project_i(&state, &arrays, i)
                        }
                    } else {
                        pattern = Pattern::single(i);
                        initial_projection(&arrays, i)
                    };
                    prop_assert_eq!(outcome.utility, matcher::pattern_utility(&pattern, &db));
                    prop_assert_eq!(outcome.seu, matcher::seu(&pattern, &db));
                    let containing = db
                        .sequences()
                        .iter()
                        .filter(|s| matcher::contains(&pattern, s))
                        .count();
                    prop_assert_eq!(outcome.state.seq_count(), containing);
                    state = outcome.state;
                }
            }

            // Candidate SEUs agree with a fresh projection of each child.
            let cands = extension_candidates(&state, &arrays);
            for (&i, &seu) in &cands.i_items {
                prop_assert_eq!(project_i(&state, &arrays, i).seu, seu);
            }
            for (&i, &seu) in &cands.s_items {
                prop_assert_eq!(project_s(&state, &arrays, i).seu, seu);
            }
        }
    }
}
