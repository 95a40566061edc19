//! Text formats and synthetic data generation.
//!
//! Dataset files hold one q-sequence per line: `item:quantity` tokens, with
//! ` -1 ` between elements and ` -2` closing the line (the last element is
//! not followed by -1). Profit files hold one `item<TAB>profit` line per
//! item. Both are UTF-8 with LF line endings; blank lines are ignored.
//! Serialization is canonical (items ascending inside elements), so
//! parse-then-serialize is the identity on canonical files.
//!
//! Result files hold one pattern per line (`1 -1 2 -1<TAB>69`), in the
//! miner's canonical order, followed by `# key=value` comment lines carrying
//! the deterministic counters. Wall time is deliberately not written: two
//! runs over the same input must produce byte-identical files.

use std::fmt::Write as _;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::miner::MiningResult;
use crate::model::{Item, Pattern, ProfitTable, QElement, QItem, QSequence};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: malformed token {token:?}, expected item:quantity, -1 or -2")]
    MalformedToken {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}, column {col}: item ids start at 1")]
    ZeroItem { line: usize, col: usize },
    #[error("line {line}, column {col}: quantities start at 1")]
    ZeroQuantity { line: usize, col: usize },
    #[error("line {line}, column {col}: duplicate item {item} in element")]
    DuplicateItem { line: usize, col: usize, item: u32 },
    #[error("line {line}, column {col}: element without items")]
    EmptyElement { line: usize, col: usize },
    #[error("line {line}: missing -2 terminator")]
    MissingTerminator { line: usize },
    #[error("line {line}, column {col}: unexpected token {token:?} after -2")]
    TrailingToken {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}: expected item<TAB>profit")]
    MalformedProfit { line: usize },
    #[error("line {line}: duplicate profit entry for item {item}")]
    DuplicateProfit { line: usize, item: u32 },
}

/// Whitespace-separated tokens of a line with their 1-based starting column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut idx = 0;
    for tok in line.split_whitespace() {
        let at = line[idx..].find(tok).expect("token comes from this line") + idx;
        out.push((at + 1, tok));
        idx = at + tok.len();
    }
    out
}

/// Parses a dataset. Sequences get sids 1..=n in line order (blank lines
/// skipped); element item order is normalized to ascending.
pub fn parse_dataset(text: &str) -> Result<Vec<QSequence>, ParseError> {
    let mut sequences = Vec::new();
    for (lidx, raw) in text.lines().enumerate() {
        let line_no = lidx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }

        let mut elements: Vec<QElement> = Vec::new();
        let mut current: Vec<QItem> = Vec::new();
        let mut terminated = false;
        for (col, tok) in tokens(line) {
            if terminated {
                return Err(ParseError::TrailingToken {
                    line: line_no,
                    col,
                    token: tok.to_string(),
                });
            }
            match tok {
                "-1" | "-2" => {
                    if current.is_empty() {
                        return Err(ParseError::EmptyElement { line: line_no, col });
                    }
                    let element = QElement::new(std::mem::take(&mut current))
                        .expect("items checked token by token");
                    elements.push(element);
                    terminated = tok == "-2";
                }
                _ => {
                    let malformed = || ParseError::MalformedToken {
                        line: line_no,
                        col,
                        token: tok.to_string(),
                    };
                    let (item_part, qty_part) = tok.split_once(':').ok_or_else(malformed)?;
                    let item_id: u32 = item_part.parse().map_err(|_| malformed())?;
                    let quantity: u32 = qty_part.parse().map_err(|_| malformed())?;
                    if item_id == 0 {
                        return Err(ParseError::ZeroItem { line: line_no, col });
                    }
                    if quantity == 0 {
                        return Err(ParseError::ZeroQuantity { line: line_no, col });
                    }
                    let item = Item::new(item_id).expect("non-zero id");
                    if current.iter().any(|q| q.item() == item) {
                        return Err(ParseError::DuplicateItem {
                            line: line_no,
                            col,
                            item: item_id,
                        });
                    }
                    current.push(QItem::new(item, quantity).expect("non-zero quantity"));
                }
            }
        }
        if !terminated {
            return Err(ParseError::MissingTerminator { line: line_no });
        }
        let sid = sequences.len() as u32 + 1;
        sequences.push(QSequence::new(sid, elements).expect("terminator requires an element"));
    }
    Ok(sequences)
}

/// Canonical dataset encoding; the inverse of [`parse_dataset`] on canonical
/// input.
pub fn serialize_dataset(sequences: &[QSequence]) -> String {
    let mut out = String::new();
    for s in sequences {
        for (eidx, e) in s.elements().iter().enumerate() {
            if eidx > 0 {
                out.push_str("-1 ");
            }
            for q in e.qitems() {
                let _ = write!(out, "{}:{} ", q.item(), q.quantity());
            }
        }
        out.push_str("-2\n");
    }
    out
}

/// Parses a profit table: one `item<TAB>profit` line per item.
pub fn parse_profits(text: &str) -> Result<ProfitTable, ParseError> {
    let mut entries: Vec<(Item, u64)> = Vec::new();
    for (lidx, raw) in text.lines().enumerate() {
        let line_no = lidx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let malformed = ParseError::MalformedProfit { line: line_no };
        let (item_part, profit_part) = line.split_once('\t').ok_or(malformed.clone())?;
        let item_id: u32 = item_part.trim().parse().map_err(|_| malformed.clone())?;
        if item_id == 0 {
            return Err(ParseError::ZeroItem {
                line: line_no,
                col: 1,
            });
        }
        let profit: u64 = profit_part.trim().parse().map_err(|_| malformed.clone())?;
        let item = Item::new(item_id).expect("non-zero id");
        if entries.iter().any(|(i, _)| *i == item) {
            return Err(ParseError::DuplicateProfit {
                line: line_no,
                item: item_id,
            });
        }
        entries.push((item, profit));
    }
    Ok(ProfitTable::from_entries(entries).expect("duplicates pre-checked"))
}

/// Canonical profit encoding, sorted by item id.
pub fn serialize_profits(profits: &ProfitTable) -> String {
    let mut out = String::new();
    for (item, profit) in profits.sorted_entries() {
        let _ = writeln!(out, "{item}\t{profit}");
    }
    out
}

/// Flat pattern rendering: items space-separated, each element closed by -1.
pub fn format_pattern(t: &Pattern) -> String {
    let mut out = String::new();
    for e in t.elements() {
        for item in e {
            let _ = write!(out, "{item} ");
        }
        out.push_str("-1 ");
    }
    out.trim_end().to_string()
}

/// Renders a mining result: one `pattern<TAB>utility` line per HUSP in the
/// result's order, then the deterministic counters as comments.
pub fn write_results(result: &MiningResult) -> String {
    let mut out = String::new();
    for (t, u) in result.husps() {
        let _ = writeln!(out, "{}\t{}", format_pattern(t), u);
    }
    let s = result.stats();
    let _ = writeln!(out, "# nodes_visited={}", s.nodes_visited);
    let _ = writeln!(out, "# projections_built={}", s.projections_built);
    let _ = writeln!(out, "# puo_removed_items={}", s.puo_removed_items);
    let _ = writeln!(out, "# puk_pruned_nodes={}", s.puk_pruned_nodes);
    let _ = writeln!(out, "# husp_count={}", s.husp_count);
    out
}

/// Parameters for the synthetic generator. Element counts per sequence and
/// item counts per element follow a geometric distribution around the given
/// means, truncated to [1, 4x mean]; quantities and profits are uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub sequence_count: usize,
    pub item_universe: u32,
    pub mean_elements: f64,
    pub mean_items_per_element: f64,
    pub max_quantity: u32,
    pub profit_min: u64,
    pub profit_max: u64,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("item universe must contain at least one item")]
    EmptyUniverse,
    #[error("mean element and item counts must be at least 1")]
    MeanBelowOne,
    #[error("max quantity must be at least 1")]
    ZeroMaxQuantity,
    #[error("profit range is empty (min > max)")]
    EmptyProfitRange,
}

impl GenParams {
    fn validate(&self) -> Result<(), GenError> {
        if self.item_universe == 0 {
            return Err(GenError::EmptyUniverse);
        }
        if self.mean_elements < 1.0 || self.mean_items_per_element < 1.0 {
            return Err(GenError::MeanBelowOne);
        }
        if self.max_quantity == 0 {
            return Err(GenError::ZeroMaxQuantity);
        }
        if self.profit_min > self.profit_max {
            return Err(GenError::EmptyProfitRange);
        }
        Ok(())
    }
}

/// Geometric draw on {1, 2, ...} with the given mean, truncated to 4x mean.
fn truncated_geometric(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    let cap = (mean * 4.0).ceil().max(1.0) as usize;
    if mean <= 1.0 {
        return 1;
    }
    let p = 1.0 / mean;
    let u: f64 = rng.gen();
    let draw = 1.0 + ((1.0 - u).ln() / (1.0 - p).ln()).floor();
    (draw as usize).clamp(1, cap)
}

/// Generates a database: profits uniform over [profit_min, profit_max] for
/// every item of the universe, sequences of geometric shape with distinct
/// uniform items per element and uniform quantities in [1, max_quantity].
/// Byte-identical output for equal parameters (ChaCha8-seeded).
pub fn generate(params: &GenParams) -> Result<(Vec<QSequence>, ProfitTable), GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let profits = ProfitTable::from_entries((1..=params.item_universe).map(|id| {
        (
            Item::new(id).expect("ids start at 1"),
            rng.gen_range(params.profit_min..=params.profit_max),
        )
    }))
    .expect("universe ids are distinct");

    let mut sequences = Vec::with_capacity(params.sequence_count);
    for sid in 1..=params.sequence_count {
        let element_count = truncated_geometric(&mut rng, params.mean_elements);
        let mut elements = Vec::with_capacity(element_count);
        for _ in 0..element_count {
            let k = truncated_geometric(&mut rng, params.mean_items_per_element)
                .min(params.item_universe as usize);
            let mut ids = rand::seq::index::sample(&mut rng, params.item_universe as usize, k)
                .into_iter()
                .map(|zero_based| zero_based as u32 + 1)
                .collect::<Vec<u32>>();
            ids.sort_unstable();
            let qitems = ids
                .into_iter()
                .map(|id| {
                    QItem::new(
                        Item::new(id).expect("ids start at 1"),
                        rng.gen_range(1..=params.max_quantity),
                    )
                    .expect("quantities start at 1")
                })
                .collect();
            elements.push(QElement::new(qitems).expect("sampled ids are distinct"));
        }
        sequences.push(QSequence::new(sid as u32, elements).expect("at least one element"));
    }
    Ok((sequences, profits))
}
