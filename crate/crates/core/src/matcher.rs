//! Reference pattern-matching semantics: match enumeration, pattern
//! utilities, remaining utilities and the SWU / SEU / SPU measures.
//!
//! Everything here is computed directly from the q-sequences, with no index
//! structures, so it stays simple enough to trust. The projection engine in
//! [`crate::uarray`] must agree with these functions and is tested against
//! them.
//!
//! Functions taking a [`ProfitTable`] assume every occurring item has a
//! profit entry, which [`QSequenceDatabase`] construction guarantees.

use crate::model::{
    element_utility, q_item_utility, sequence_utility, ModelError, Pattern, ProfitTable, QElement,
    QSequence, QSequenceDatabase, Utility,
};

/// One occurrence of a pattern inside a q-sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    /// Per pattern element: (0-based sequence element index, 0-based item
    /// indices inside that element), with element indices strictly
    /// increasing.
    positions: Vec<(usize, Vec<usize>)>,
    /// 1-based global position (counting q-items in sequence order) of the
    /// last matched item.
    end_position: usize,
}

impl Match {
    pub fn positions(&self) -> &[(usize, Vec<usize>)] {
        &self.positions
    }

    pub fn end_position(&self) -> usize {
        self.end_position
    }

    /// Element indices only, the lexicographic ordering key for matches.
    pub fn element_indices(&self) -> Vec<usize> {
        self.positions.iter().map(|(e, _)| *e).collect()
    }

    /// Sum of the matched q-items' utilities.
    pub fn utility(&self, s: &QSequence, profits: &ProfitTable) -> Utility {
        self.positions
            .iter()
            .map(|(eidx, idxs)| {
                let e = &s.elements()[*eidx];
                idxs.iter()
                    .map(|&i| {
                        q_item_utility(&e.qitems()[i], profits).expect("profit entry present")
                    })
                    .sum::<Utility>()
            })
            .sum()
    }
}

/// The part of a q-sequence strictly after a match's end position: the tail
/// of the end element plus all following elements. May be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestPart {
    end_position: usize,
    elements: Vec<QElement>,
    utility: Utility,
}

impl RestPart {
    pub fn end_position(&self) -> usize {
        self.end_position
    }

    pub fn elements(&self) -> &[QElement] {
        &self.elements
    }

    pub fn utility(&self) -> Utility {
        self.utility
    }
}

/// 1-based global start position of each element.
fn element_starts(s: &QSequence) -> Vec<usize> {
    let mut starts = Vec::with_capacity(s.elements().len());
    let mut pos = 1;
    for e in s.elements() {
        starts.push(pos);
        pos += e.len();
    }
    starts
}

fn item_indices(e: &QElement, items: &[crate::model::Item]) -> Vec<usize> {
    items
        .iter()
        .map(|&i| {
            e.qitems()
                .binary_search_by_key(&i, |q| q.item())
                .expect("caller checked containment")
        })
        .collect()
}

fn close_match(
    t: &Pattern,
    starts: &[usize],
    chosen: &[(usize, Vec<usize>)],
) -> Match {
    debug_assert_eq!(chosen.len(), t.size());
    let (eidx, idxs) = chosen.last().expect("non-empty pattern");
    Match {
        positions: chosen.to_vec(),
        end_position: starts[*eidx] + idxs.last().expect("non-empty element"),
    }
}

/// Enumerates every match of `t` in `s`, in lexicographic order of the
/// element-index vectors. The empty pattern yields no matches.
pub fn enumerate_matches(t: &Pattern, s: &QSequence) -> Vec<Match> {
    if t.is_empty() {
        return Vec::new();
    }
    let starts = element_starts(s);
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, Vec<usize>)> = Vec::with_capacity(t.size());

    fn recurse(
        t: &Pattern,
        s: &QSequence,
        starts: &[usize],
        level: usize,
        from: usize,
        chosen: &mut Vec<(usize, Vec<usize>)>,
        out: &mut Vec<Match>,
    ) {
        if level == t.size() {
            out.push(close_match(t, starts, chosen));
            return;
        }
        let want = &t.elements()[level];
        for eidx in from..s.elements().len() {
            let e = &s.elements()[eidx];
            if e.contains_all(want) {
                chosen.push((eidx, item_indices(e, want)));
                recurse(t, s, starts, level + 1, eidx + 1, chosen, out);
                chosen.pop();
            }
        }
    }

    recurse(t, s, &starts, 0, 0, &mut chosen, &mut out);
    out
}

/// First match: the lexicographically smallest element-index vector, found
/// greedily. If any match exists, taking the earliest feasible element at
/// each level stays feasible, so the greedy pick is the minimum; it also has
/// the earliest end position of all matches.
pub fn first_match(t: &Pattern, s: &QSequence) -> Option<Match> {
    if t.is_empty() {
        return None;
    }
    let starts = element_starts(s);
    let mut chosen: Vec<(usize, Vec<usize>)> = Vec::with_capacity(t.size());
    let mut from = 0;
    for want in t.elements() {
        let eidx = (from..s.elements().len())
            .find(|&k| s.elements()[k].contains_all(want))?;
        chosen.push((eidx, item_indices(&s.elements()[eidx], want)));
        from = eidx + 1;
    }
    Some(close_match(t, &starts, &chosen))
}

/// True when `t` occurs in `s` at least once.
pub fn contains(t: &Pattern, s: &QSequence) -> bool {
    first_match(t, s).is_some()
}

/// Utility of `t` in `s`: the maximum utility over all matches. `None` when
/// `t` does not occur.
pub fn pattern_utility_in_seq(
    t: &Pattern,
    s: &QSequence,
    profits: &ProfitTable,
) -> Option<Utility> {
    enumerate_matches(t, s)
        .iter()
        .map(|m| m.utility(s, profits))
        .max()
}

/// Utility of `t` in the database: sum of per-sequence maxima over the
/// sequences that contain `t`.
pub fn pattern_utility(t: &Pattern, db: &QSequenceDatabase) -> Utility {
    db.sequences()
        .iter()
        .filter_map(|s| pattern_utility_in_seq(t, s, db.profits()))
        .sum()
}

/// Sum of q-item utilities strictly after 1-based position `pos`. The last
/// position yields 0; positions outside 1..=len are rejected.
pub fn remaining_utility_at(
    s: &QSequence,
    pos: usize,
    profits: &ProfitTable,
) -> Result<Utility, ModelError> {
    let len = s.qitem_count();
    if pos == 0 || pos > len {
        return Err(ModelError::PositionOutOfRange { pos, len });
    }
    Ok(s.iter_qitems()
        .skip(pos)
        .map(|(_, q)| q_item_utility(q, profits).expect("profit entry present"))
        .sum())
}

/// Maximum remaining utility over all matches of `t` in `s`. Because the
/// first match ends earliest, this always equals the first match's rest.
pub fn remaining_utility_of_pattern(
    t: &Pattern,
    s: &QSequence,
    profits: &ProfitTable,
) -> Option<Utility> {
    enumerate_matches(t, s)
        .iter()
        .map(|m| {
            remaining_utility_at(s, m.end_position(), profits).expect("match end is in range")
        })
        .max()
}

/// Database-level remaining utility: sum over containing sequences of
/// [`remaining_utility_of_pattern`].
pub fn remaining_utility(t: &Pattern, db: &QSequenceDatabase) -> Utility {
    db.sequences()
        .iter()
        .filter_map(|s| remaining_utility_of_pattern(t, s, db.profits()))
        .sum()
}

/// Materializes the q-sequence part after the first match of `t` in `s`.
pub fn first_match_rest(t: &Pattern, s: &QSequence, profits: &ProfitTable) -> Option<RestPart> {
    let m = first_match(t, s)?;
    let end = m.end_position();
    let (last_eidx, last_idx) = {
        let (eidx, idxs) = m.positions().last().expect("non-empty pattern");
        (*eidx, *idxs.last().expect("non-empty element"))
    };
    let mut elements = Vec::new();
    let tail: Vec<_> = s.elements()[last_eidx].qitems()[last_idx + 1..].to_vec();
    if !tail.is_empty() {
        elements.push(QElement::new(tail).expect("tail of a valid element"));
    }
    elements.extend_from_slice(&s.elements()[last_eidx + 1..]);
    let utility = elements
        .iter()
        .map(|e| element_utility(e, profits).expect("profit entry present"))
        .sum();
    Some(RestPart {
        end_position: end,
        elements,
        utility,
    })
}

/// Sequence-weighted utility: sum of the full utilities of the sequences
/// containing `t`. The loosest of the three bounds.
pub fn swu(t: &Pattern, db: &QSequenceDatabase) -> Utility {
    db.sequences()
        .iter()
        .filter(|s| contains(t, s))
        .map(|s| sequence_utility(s, db.profits()).expect("database items are resolvable"))
        .sum()
}

/// Per-sequence SEU contribution: the maximum over matches of match utility
/// plus remaining utility after that match's end.
pub fn seu_in_seq(t: &Pattern, s: &QSequence, profits: &ProfitTable) -> Option<Utility> {
    enumerate_matches(t, s)
        .iter()
        .map(|m| {
            m.utility(s, profits)
                + remaining_utility_at(s, m.end_position(), profits)
                    .expect("match end is in range")
        })
        .max()
}

/// Sequence-projected extension utility: the pruning bound. For every
/// descendant t' of `t` under concatenation, u(t') <= seu(t) <= swu(t), and
/// seu never increases along a concatenation edge.
pub fn seu(t: &Pattern, db: &QSequenceDatabase) -> Utility {
    db.sequences()
        .iter()
        .filter_map(|s| seu_in_seq(t, s, db.profits()))
        .sum()
}

/// Per-sequence SPU contribution: FIRST-match utility plus the rest after
/// the first match. At most the SEU contribution, but not comparable with
/// u(t, s) in general.
pub fn spu_in_seq(t: &Pattern, s: &QSequence, profits: &ProfitTable) -> Option<Utility> {
    let m = first_match(t, s)?;
    let rest = remaining_utility_at(s, m.end_position(), profits).expect("match end is in range");
    Some(m.utility(s, profits) + rest)
}

/// Sequence-projected first-occurrence utility. Diagnostic only: it can fall
/// below the true pattern utility, so it must never be used for pruning.
pub fn spu(t: &Pattern, db: &QSequenceDatabase) -> Utility {
    db.sequences()
        .iter()
        .filter_map(|s| spu_in_seq(t, s, db.profits()))
        .sum()
}
