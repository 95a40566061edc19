//! Core domain types: items, quantitative sequences, profit tables, patterns
//! and the exact-fraction utility threshold.
//!
//! All utility arithmetic is exact integer arithmetic on `u64`, with `u128`
//! intermediates for threshold comparisons. Inputs are assumed small enough
//! that no utility total reaches 2^63; the q-item constructor and the parser
//! keep quantities and profits in `u32`/`u64`, which makes overflow
//! unreachable for any realistic dataset (it would take ~10^9 items of
//! maximal profit in one database to get close).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Exact utility value. Non-negative by construction.
pub type Utility = u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("item ids start at 1")]
    ZeroItemId,
    #[error("quantities start at 1")]
    ZeroQuantity,
    #[error("element contains no items")]
    EmptyElement,
    #[error("element contains item {0} more than once")]
    DuplicateItem(Item),
    #[error("sequence {0} contains no elements")]
    EmptySequence(u32),
    #[error("duplicate sequence id {0}")]
    DuplicateSid(u32),
    #[error("no profit entry for item {0}")]
    UnknownItem(Item),
    #[error("duplicate profit entry for item {0}")]
    DuplicateProfit(Item),
    #[error("position {pos} out of range 1..={len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("i-concatenation item {item} must exceed the last item {last}")]
    ConcatOrder { item: Item, last: Item },
    #[error("cannot i-concatenate onto an empty pattern")]
    ConcatOntoEmpty,
    #[error("threshold must satisfy 0 < value <= 1")]
    ThresholdOutOfRange,
    #[error("cannot parse threshold from {0:?}")]
    ThresholdSyntax(String),
}

/// An item identifier. Ids are positive; ordering follows the numeric id and
/// defines the canonical item order inside elements and patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item(u32);

impl Item {
    pub fn new(id: u32) -> Result<Self, ModelError> {
        if id == 0 {
            return Err(ModelError::ZeroItemId);
        }
        Ok(Item(id))
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An item paired with a purchase quantity. Quantity is at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QItem {
    item: Item,
    quantity: u32,
}

impl QItem {
    pub fn new(item: Item, quantity: u32) -> Result<Self, ModelError> {
        if quantity == 0 {
            return Err(ModelError::ZeroQuantity);
        }
        Ok(QItem { item, quantity })
    }

    pub fn item(&self) -> Item {
        self.item
    }

    pub fn quantity(&self) -> u32 {
        self.quantity
    }
}

/// Unit profits per item. Profits are non-negative and fixed per item.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfitTable {
    profits: HashMap<Item, u64>,
}

impl ProfitTable {
    /// Builds a table from (item, profit) pairs, rejecting duplicates.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (Item, u64)>,
    ) -> Result<Self, ModelError> {
        let mut profits = HashMap::new();
        for (item, profit) in entries {
            if profits.insert(item, profit).is_some() {
                return Err(ModelError::DuplicateProfit(item));
            }
        }
        Ok(ProfitTable { profits })
    }

    pub fn unit_profit(&self, item: Item) -> Result<u64, ModelError> {
        self.profits
            .get(&item)
            .copied()
            .ok_or(ModelError::UnknownItem(item))
    }

    pub fn contains(&self, item: Item) -> bool {
        self.profits.contains_key(&item)
    }

    pub fn len(&self) -> usize {
        self.profits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profits.is_empty()
    }

    /// Entries sorted by item id, for deterministic serialization.
    pub fn sorted_entries(&self) -> Vec<(Item, u64)> {
        let mut entries: Vec<_> = self.profits.iter().map(|(i, p)| (*i, *p)).collect();
        entries.sort_unstable_by_key(|(i, _)| *i);
        entries
    }
}

/// One element (itemset) of a q-sequence: q-items strictly ascending by item,
/// so an item occurs at most once per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QElement {
    qitems: Vec<QItem>,
}

impl QElement {
    /// Sorts the q-items by item id and rejects empty elements and duplicate
    /// items.
    pub fn new(mut qitems: Vec<QItem>) -> Result<Self, ModelError> {
        if qitems.is_empty() {
            return Err(ModelError::EmptyElement);
        }
        qitems.sort_unstable_by_key(|q| q.item());
        for pair in qitems.windows(2) {
            if pair[0].item() == pair[1].item() {
                return Err(ModelError::DuplicateItem(pair[0].item()));
            }
        }
        Ok(QElement { qitems })
    }

    pub fn qitems(&self) -> &[QItem] {
        &self.qitems
    }

    pub fn len(&self) -> usize {
        self.qitems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qitems.is_empty()
    }

    /// Looks an item up by binary search (the element is item-sorted).
    pub fn find(&self, item: Item) -> Option<&QItem> {
        self.qitems
            .binary_search_by_key(&item, |q| q.item())
            .ok()
            .map(|idx| &self.qitems[idx])
    }

    pub fn contains_item(&self, item: Item) -> bool {
        self.find(item).is_some()
    }

    /// True when every item of `items` (an ascending pattern element) occurs
    /// in this element.
    pub fn contains_all(&self, items: &[Item]) -> bool {
        items.iter().all(|&i| self.contains_item(i))
    }
}

/// A quantitative sequence: a non-empty ordered list of elements with an
/// external identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSequence {
    sid: u32,
    elements: Vec<QElement>,
}

impl QSequence {
    pub fn new(sid: u32, elements: Vec<QElement>) -> Result<Self, ModelError> {
        if elements.is_empty() {
            return Err(ModelError::EmptySequence(sid));
        }
        Ok(QSequence { sid, elements })
    }

    pub fn sid(&self) -> u32 {
        self.sid
    }

    pub fn elements(&self) -> &[QElement] {
        &self.elements
    }

    /// Total number of q-items across all elements.
    pub fn qitem_count(&self) -> usize {
        self.elements.iter().map(|e| e.len()).sum()
    }

    /// Iterates q-items in sequence order as (element index, q-item), with
    /// element indices 0-based. Global positions are 1-based enumeration
    /// order over this iterator.
    pub fn iter_qitems(&self) -> impl Iterator<Item = (usize, &QItem)> {
        self.elements
            .iter()
            .enumerate()
            .flat_map(|(eidx, e)| e.qitems().iter().map(move |q| (eidx, q)))
    }

    pub fn distinct_items(&self) -> BTreeSet<Item> {
        self.iter_qitems().map(|(_, q)| q.item()).collect()
    }
}

/// A q-sequence database plus its profit table. Construction checks that sids
/// are unique and every occurring item has a profit entry, so utility lookups
/// never fail downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSequenceDatabase {
    sequences: Vec<QSequence>,
    profits: ProfitTable,
}

impl QSequenceDatabase {
    pub fn new(sequences: Vec<QSequence>, profits: ProfitTable) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for s in &sequences {
            if !seen.insert(s.sid()) {
                return Err(ModelError::DuplicateSid(s.sid()));
            }
            for (_, q) in s.iter_qitems() {
                if !profits.contains(q.item()) {
                    return Err(ModelError::UnknownItem(q.item()));
                }
            }
        }
        Ok(QSequenceDatabase { sequences, profits })
    }

    pub fn sequences(&self) -> &[QSequence] {
        &self.sequences
    }

    pub fn profits(&self) -> &ProfitTable {
        &self.profits
    }

    pub fn sequence_by_sid(&self, sid: u32) -> Option<&QSequence> {
        self.sequences.iter().find(|s| s.sid() == sid)
    }

    pub fn distinct_items(&self) -> BTreeSet<Item> {
        self.sequences
            .iter()
            .flat_map(|s| s.iter_qitems().map(|(_, q)| q.item()))
            .collect()
    }
}

/// Utility of one q-item: quantity times unit profit.
pub fn q_item_utility(q: &QItem, profits: &ProfitTable) -> Result<Utility, ModelError> {
    Ok(q.quantity() as u64 * profits.unit_profit(q.item())?)
}

/// Utility of an element: sum over its q-items.
pub fn element_utility(e: &QElement, profits: &ProfitTable) -> Result<Utility, ModelError> {
    e.qitems().iter().map(|q| q_item_utility(q, profits)).sum()
}

/// Utility of a whole q-sequence: sum over its elements.
pub fn sequence_utility(s: &QSequence, profits: &ProfitTable) -> Result<Utility, ModelError> {
    s.elements()
        .iter()
        .map(|e| element_utility(e, profits))
        .sum()
}

/// Utility of the database: sum over its sequences.
pub fn database_utility(db: &QSequenceDatabase) -> Utility {
    db.sequences()
        .iter()
        .map(|s| sequence_utility(s, db.profits()).expect("database items are resolvable"))
        .sum()
}

/// A sequential pattern: an ordered list of elements, each a strictly
/// ascending non-empty itemset. The empty pattern (no elements) is the search
/// root only and is never reported.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    elements: Vec<Vec<Item>>,
}

impl Pattern {
    pub fn empty() -> Self {
        Pattern::default()
    }

    /// Builds a single-element, single-item pattern.
    pub fn single(item: Item) -> Self {
        Pattern {
            elements: vec![vec![item]],
        }
    }

    /// Builds a pattern from raw element item lists, enforcing the ascending
    /// no-duplicate invariant per element.
    pub fn from_elements(elements: Vec<Vec<Item>>) -> Result<Self, ModelError> {
        for e in &elements {
            if e.is_empty() {
                return Err(ModelError::EmptyElement);
            }
            for pair in e.windows(2) {
                if pair[0] >= pair[1] {
                    if pair[0] == pair[1] {
                        return Err(ModelError::DuplicateItem(pair[0]));
                    }
                    return Err(ModelError::ConcatOrder {
                        item: pair[1],
                        last: pair[0],
                    });
                }
            }
        }
        Ok(Pattern { elements })
    }

    pub fn elements(&self) -> &[Vec<Item>] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of elements.
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Total number of items across elements.
    pub fn length(&self) -> usize {
        self.elements.iter().map(|e| e.len()).sum()
    }

    /// Last item of the last element, if any.
    pub fn last_item(&self) -> Option<Item> {
        self.elements.last().and_then(|e| e.last().copied())
    }

    /// I-concatenation: appends `item` to the last element. `item` must
    /// exceed every item already there, which keeps elements canonical and
    /// means each unordered itemset is built exactly one way.
    pub fn i_concat(&self, item: Item) -> Result<Pattern, ModelError> {
        let last = self.last_item().ok_or(ModelError::ConcatOntoEmpty)?;
        if item <= last {
            return Err(ModelError::ConcatOrder { item, last });
        }
        let mut elements = self.elements.clone();
        elements.last_mut().unwrap().push(item);
        Ok(Pattern { elements })
    }

    /// S-concatenation: appends a fresh `{item}` element.
    pub fn s_concat(&self, item: Item) -> Pattern {
        let mut elements = self.elements.clone();
        elements.push(vec![item]);
        Pattern { elements }
    }

    /// Canonical report order: by size, then length, then lexicographic
    /// element comparison.
    pub fn canonical_key(&self) -> (usize, usize, &[Vec<Item>]) {
        (self.size(), self.length(), &self.elements)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (idx, e) in self.elements.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (jdx, item) in e.iter().enumerate() {
                if jdx > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{item}")?;
            }
            write!(f, "]")?;
        }
        write!(f, ">")
    }
}

/// A minimum-utility threshold as an exact fraction of the database utility,
/// with 0 < numerator/denominator <= 1. Parsed from decimal ("0.25") or
/// percentage ("25%") notation without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threshold {
    numerator: u64,
    denominator: u64,
}

impl Threshold {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self, ModelError> {
        if numerator == 0 || denominator == 0 || numerator > denominator {
            return Err(ModelError::ThresholdOutOfRange);
        }
        let g = gcd(numerator, denominator);
        Ok(Threshold {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Exact test of utility >= fraction * total, via u128 cross
    /// multiplication. No floating point anywhere.
    pub fn is_met(&self, utility: Utility, total: Utility) -> bool {
        utility as u128 * self.denominator as u128 >= self.numerator as u128 * total as u128
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for Threshold {
    type Err = ModelError;

    /// Accepts "0.25", ".25", "25%", "0.5%", "1". The digit string becomes
    /// the numerator; the denominator is the matching power of ten (times 100
    /// for percentages), so "0.25" and "25%" are the same exact fraction.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || ModelError::ThresholdSyntax(s.to_string());
        let trimmed = s.trim();
        let (body, percent) = match trimmed.strip_suffix('%') {
            Some(rest) => (rest, true),
            None => (trimmed, false),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(syntax());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(syntax());
        }
        // 18 significant digits keep numerator * 10^frac_len inside u64.
        if int_part.len() + frac_part.len() > 18 {
            return Err(syntax());
        }
        let digits = format!("{int_part}{frac_part}");
        let numerator: u64 = digits.parse().map_err(|_| syntax())?;
        let mut denominator: u64 = 10u64.pow(frac_part.len() as u32);
        if percent {
            denominator = denominator.checked_mul(100).ok_or_else(syntax)?;
        }
        Threshold::new(numerator, denominator)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
