//! Subadditivity of joint complexity, K̂(x,y) ≤ K̂(x) + K̂(y|x) + c, checked
//! exhaustively over short strings, and its telescoped form over a list.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::bits::BitString;
use crate::paradox::{generate_list, GeneratorTemplate};
use crate::searcher::{budget_sweep_with, KTable, SearchOptions};

/// 1^{|x|} 0 x y. The unary prefix makes the pair recoverable.
pub fn pair_encode(x: &BitString, y: &BitString) -> BitString {
    let mut out = BitString::new();
    for _ in 0..x.len() {
        out.push(true);
    }
    out.push(false);
    out.extend_from(x);
    out.extend_from(y);
    out
}

pub fn pair_decode(encoded: &BitString) -> Option<(BitString, BitString)> {
    let bits = encoded.as_slice();
    let n = bits.iter().position(|&b| !b)?;
    let rest = &bits[n + 1..];
    if rest.len() < n {
        return None;
    }
    Some((BitString::from(&rest[..n]), BitString::from(&rest[n..])))
}

/// Program-length and step bounds for the tables a check relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub max_program_bits: usize,
    /// Ascending; entries must agree across the last two to count.
    pub budgets: Vec<u64>,
}

impl SearchBounds {
    pub fn new(max_program_bits: usize, budgets: &[u64]) -> Self {
        SearchBounds {
            max_program_bits,
            budgets: budgets.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JointError {
    #[error("no converged entry for output {output:?} given input {input:?}; raise the search bounds")]
    IncompleteTable { output: BitString, input: BitString },
    #[error("budget sweeps need at least two ascending budgets")]
    SweepTooShort,
}

/// Final sweep tables, one per conditioning input, built on demand.
struct Tables<'a> {
    bounds: &'a SearchBounds,
    opts: SearchOptions,
    by_input: HashMap<BitString, KTable>,
}

impl<'a> Tables<'a> {
    fn new(bounds: &'a SearchBounds, opts: SearchOptions) -> Result<Self, JointError> {
        if bounds.budgets.len() < 2 {
            return Err(JointError::SweepTooShort);
        }
        Ok(Tables { bounds, opts, by_input: HashMap::new() })
    }

    fn table(&mut self, input: &BitString) -> &KTable {
        let (bounds, opts) = (self.bounds, self.opts);
        self.by_input.entry(input.clone()).or_insert_with(|| {
            budget_sweep_with(bounds.max_program_bits, &bounds.budgets, input, opts)
                .pop()
                .expect("non-empty sweep")
        })
    }

    /// Converged K̂(output | input).
    fn k(&mut self, output: &BitString, input: &BitString) -> Result<usize, JointError> {
        match self.table(input).get(output) {
            Some(e) if e.converged => Ok(e.min_bits),
            _ => Err(JointError::IncompleteTable {
                output: output.clone(),
                input: input.clone(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubadditivityRow {
    pub x: BitString,
    pub y: BitString,
    pub pair: BitString,
    pub k_pair: usize,
    pub k_x: usize,
    pub k_y_given_x: usize,
    pub k_y: usize,
    /// k_pair − k_x − k_y_given_x
    pub margin: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubadditivityReport {
    pub n_x: usize,
    pub n_y: usize,
    pub search_bounds: SearchBounds,
    pub rows: Vec<SubadditivityRow>,
    pub max_margin: i64,
}

impl SubadditivityReport {
    /// Rows as aligned text with exact integers.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{:>4} {:>4} {:>8} {:>6} {:>4} {:>6} {:>4} {:>6}", "x", "y", "pair", "K(x,y)", "K(x)", "K(y|x)", "K(y)", "margin").unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{:>4} {:>4} {:>8} {:>6} {:>4} {:>6} {:>4} {:>6}",
                r.x.label(),
                r.y.label(),
                r.pair.label(),
                r.k_pair,
                r.k_x,
                r.k_y_given_x,
                r.k_y,
                r.margin
            )
            .unwrap();
        }
        writeln!(s, "max_margin {}", self.max_margin).unwrap();
        s
    }
}

/// All strings of length 0..=n, in canonical order.
fn strings_up_to_len(n: usize) -> Vec<BitString> {
    (0..=n)
        .flat_map(|w| (0..1u64 << w).map(move |v| BitString::from_u64(v, w)))
        .collect()
}

pub fn verify_subadditivity(n_x: usize, n_y: usize, bounds: &SearchBounds) -> Result<SubadditivityReport, JointError> {
    verify_subadditivity_with(n_x, n_y, bounds, SearchOptions::default())
}

pub fn verify_subadditivity_with(
    n_x: usize,
    n_y: usize,
    bounds: &SearchBounds,
    opts: SearchOptions,
) -> Result<SubadditivityReport, JointError> {
    let mut tables = Tables::new(bounds, opts)?;
    let empty = BitString::new();
    let mut rows = Vec::new();
    for x in strings_up_to_len(n_x) {
        for y in strings_up_to_len(n_y) {
            let pair = pair_encode(&x, &y);
            let k_pair = tables.k(&pair, &empty)?;
            let k_x = tables.k(&x, &empty)?;
            let k_y = tables.k(&y, &empty)?;
            let k_y_given_x = tables.k(&y, &x)?;
            rows.push(SubadditivityRow {
                margin: k_pair as i64 - k_x as i64 - k_y_given_x as i64,
                x: x.clone(),
                y,
                pair,
                k_pair,
                k_x,
                k_y_given_x,
                k_y,
            });
        }
    }
    let max_margin = rows.iter().map(|r| r.margin).max().expect("at least one row");
    Ok(SubadditivityReport {
        n_x,
        n_y,
        search_bounds: bounds.clone(),
        rows,
        max_margin,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub item: BitString,
    /// Everything before this item, concatenated.
    pub given: BitString,
    pub k_item_given_prefix: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub links: Vec<ChainLink>,
    /// Added once per join of two parts.
    pub pair_overhead: i64,
    /// Σ K̂(item | prefix) + (links − 1)·overhead
    pub chain_bound: i64,
    pub concat: BitString,
    /// K̂(concat), when the plain table reaches it.
    pub k_concat: Option<usize>,
    pub generator_bits: Option<usize>,
    pub max_item_k: usize,
}

/// Telescoped bound over `items` with a fixed per-join overhead.
pub fn chain_bound(
    items: &[BitString],
    pair_overhead: i64,
    bounds: &SearchBounds,
    opts: SearchOptions,
) -> Result<ChainReport, JointError> {
    assert!(!items.is_empty(), "chain needs at least one item");
    let mut tables = Tables::new(bounds, opts)?;
    let mut given = BitString::new();
    let mut links = Vec::with_capacity(items.len());
    for item in items {
        let k = tables.k(item, &given)?;
        links.push(ChainLink {
            item: item.clone(),
            given: given.clone(),
            k_item_given_prefix: k,
        });
        given.extend_from(item);
    }
    let sum: i64 = links.iter().map(|l| l.k_item_given_prefix as i64).sum();
    let chain_bound = sum + (links.len() as i64 - 1) * pair_overhead;
    let k_concat = tables.table(&BitString::new()).k_hat(&given);
    let max_item_k = links.iter().map(|l| l.k_item_given_prefix).max().unwrap_or(0);
    Ok(ChainReport {
        links,
        pair_overhead,
        chain_bound,
        concat: given,
        k_concat,
        generator_bits: None,
        max_item_k,
    })
}

/// The chain over ℓ(N), with the per-join overhead taken from the measured
/// subadditivity margin at scope (1, 1) (clamped at zero).
pub fn recursive_list_bound(n: u64, bounds: &SearchBounds) -> Result<ChainReport, JointError> {
    recursive_list_bound_with(n, bounds, SearchOptions::default())
}

pub fn recursive_list_bound_with(
    n: u64,
    bounds: &SearchBounds,
    opts: SearchOptions,
) -> Result<ChainReport, JointError> {
    let overhead = verify_subadditivity_with(1, 1, bounds, opts)?.max_margin.max(0);
    let list = generate_list(n).expect("desk-scale N");
    let mut report = chain_bound(&list.items, overhead, bounds, opts)?;
    report.generator_bits = Some(GeneratorTemplate::all_strings().bits_for(n));
    Ok(report)
}
