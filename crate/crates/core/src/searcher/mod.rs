//! Exhaustive program search and complexity tables.
//!
//! Programs are enumerated in (bit length, encoding value) order and run
//! under a step budget. The first program to produce an output is its
//! minimal witness. Work is split by fixed opcode prefixes and the partial
//! tables are merged by pointwise minimum, so the result does not depend on
//! the number of workers.

mod cache;
pub(crate) mod counting;

pub use cache::{read_cache, write_cache, CacheError, CacheHeader, CACHE_FORMAT_VERSION};
pub use counting::{
    counting_formulas, paradox_threshold, paradox_threshold_by, strings_up_to, valid_program_count,
    valid_programs_up_to, CountReport,
};

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::bits::BitString;
use crate::bitvm::{jump_table, Opcode, PackedSink, Program, Runner, Status, MACHINE_VERSION};

pub const DEFAULT_OUTPUT_CAP: u32 = 64;

/// Opcodes that may appear before END, in code order.
const BODY_OPS: [Opcode; 7] = [
    Opcode::Left,
    Opcode::Right,
    Opcode::Flip,
    Opcode::Out,
    Opcode::In,
    Opcode::LoopOpen,
    Opcode::LoopClose,
];

/// Can `op` be placed with the loop depth so far, leaving `remaining` slots
/// after it in which to close every open loop?
#[inline]
fn placeable(op: Opcode, depth: usize, remaining: usize) -> Option<usize> {
    let next = match op {
        Opcode::LoopOpen => depth + 1,
        Opcode::LoopClose => depth.checked_sub(1)?,
        _ => depth,
    };
    (next <= remaining).then_some(next)
}

/// Every valid program of at most `max_bits` bits, by length then encoding.
///
/// Structurally invalid sequences are never generated.
pub fn enumerate_programs(max_bits: usize) -> ProgramEnumerator {
    assert!(max_bits >= 3, "the shortest program is 3 bits");
    ProgramEnumerator {
        max_ops: max_bits / 3,
        body: Vec::new(),
        depths: vec![0],
        started: false,
    }
}

pub struct ProgramEnumerator {
    max_ops: usize,
    body: Vec<Opcode>,
    // depths[i] = open loops after the first i body opcodes
    depths: Vec<usize>,
    started: bool,
}

impl ProgramEnumerator {
    /// Fill positions `from..len` with the smallest valid completion.
    fn fill_min(&mut self, from: usize, len: usize) {
        self.body.truncate(from);
        self.depths.truncate(from + 1);
        for i in from..len {
            let d = self.depths[i];
            let remaining = len - i - 1;
            let op = if d <= remaining { Opcode::Left } else { Opcode::LoopClose };
            self.body.push(op);
            self.depths.push(placeable(op, d, remaining).expect("feasible fill"));
        }
    }

    fn advance(&mut self) -> bool {
        let len = self.body.len();
        for i in (0..len).rev() {
            let d = self.depths[i];
            let remaining = len - i - 1;
            let cur = self.body[i].code();
            for op in BODY_OPS.iter().copied().filter(|op| op.code() > cur) {
                if let Some(nd) = placeable(op, d, remaining) {
                    self.body.truncate(i);
                    self.depths.truncate(i + 1);
                    self.body.push(op);
                    self.depths.push(nd);
                    self.fill_min(i + 1, len);
                    return true;
                }
            }
        }
        if len + 2 > self.max_ops {
            return false;
        }
        self.fill_min(0, len + 1);
        true
    }
}

impl Iterator for ProgramEnumerator {
    type Item = Program;

    fn next(&mut self) -> Option<Program> {
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            return None;
        }
        let mut ops = self.body.clone();
        ops.push(Opcode::End);
        Some(Program::from_ops_unchecked(ops))
    }
}

/// Depth-first visit of every valid body of exactly `len` opcodes that
/// starts with `prefix`, in encoding order.
fn visit_bodies(prefix: &[Opcode], len: usize, f: &mut impl FnMut(&[Opcode])) {
    let mut depth = 0usize;
    for (i, &op) in prefix.iter().enumerate() {
        match placeable(op, depth, len - i - 1) {
            Some(d) => depth = d,
            None => return,
        }
    }
    let mut buf = prefix.to_vec();
    buf.reserve(len + 1 - prefix.len());
    fn rec(buf: &mut Vec<Opcode>, depth: usize, len: usize, f: &mut impl FnMut(&[Opcode])) {
        let i = buf.len();
        if i == len {
            buf.push(Opcode::End);
            f(buf);
            buf.pop();
            return;
        }
        let remaining = len - i - 1;
        for op in BODY_OPS {
            if let Some(d) = placeable(op, depth, remaining) {
                buf.push(op);
                rec(buf, d, len, f);
                buf.pop();
            }
        }
    }
    rec(&mut buf, depth, len, f);
}

/// Compact witness: opcode count plus codes packed 3 bits each, most
/// significant first. For equal counts the packed value orders exactly like
/// the encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Witness {
    n_ops: u8,
    packed: u128,
}

impl Witness {
    fn of(ops: &[Opcode]) -> Witness {
        debug_assert!(ops.len() <= 42);
        Witness {
            n_ops: ops.len() as u8,
            packed: ops.iter().fold(0u128, |acc, op| (acc << 3) | op.code() as u128),
        }
    }

    fn program(&self) -> Program {
        let ops = (0..self.n_ops)
            .rev()
            .map(|i| Opcode::from_code(((self.packed >> (3 * i as u32)) & 7) as u8))
            .collect();
        Program::from_ops_unchecked(ops)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct OutKey {
    len: u8,
    value: u64,
}

impl OutKey {
    fn bits(&self) -> BitString {
        BitString::from_u64(self.value, self.len as usize)
    }
}

#[derive(Clone, Copy, Debug)]
struct Hit {
    witness: Witness,
    steps: u64,
}

/// One partial table per budget of a sweep.
type Partial = Vec<HashMap<OutKey, Hit>>;

fn merge_into(acc: &mut Partial, other: Partial) {
    for (mine, theirs) in acc.iter_mut().zip(other) {
        for (k, hit) in theirs {
            mine.entry(k)
                .and_modify(|h| {
                    if hit.witness < h.witness {
                        *h = hit;
                    }
                })
                .or_insert(hit);
        }
    }
}

/// Knobs that change how a search runs but never what it finds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub workers: usize,
    pub output_cap: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_cap: DEFAULT_OUTPUT_CAP,
        }
    }
}

impl SearchOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KEntry {
    pub min_bits: usize,
    pub witness: Program,
    pub steps: u64,
    pub converged: bool,
}

/// Minimal known program length for each output, relative to `bitvm-v1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KTable {
    pub entries: BTreeMap<BitString, KEntry>,
    pub max_program_bits: usize,
    pub budget: u64,
    pub output_cap: u32,
    pub input: BitString,
    pub machine_version: String,
}

impl KTable {
    pub fn get(&self, s: &BitString) -> Option<&KEntry> {
        self.entries.get(s)
    }

    /// K̂(s), if some program within bounds produces `s`.
    pub fn k_hat(&self, s: &BitString) -> Option<usize> {
        self.entries.get(s).map(|e| e.min_bits)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct outputs with K̂ ≤ `bits`.
    pub fn outputs_within(&self, bits: usize) -> usize {
        self.entries.values().filter(|e| e.min_bits <= bits).count()
    }
}

fn search_partials(
    max_program_bits: usize,
    budgets: &[u64],
    input: &BitString,
    opts: SearchOptions,
) -> Partial {
    assert!(max_program_bits >= 3, "max_program_bits must be at least 3");
    assert!(!budgets.is_empty());
    assert!(
        budgets.windows(2).all(|w| w[0] < w[1]),
        "budgets must be strictly ascending"
    );
    assert!(opts.output_cap <= 64, "output cap above 64 bits is unsupported");
    let max_budget = *budgets.last().unwrap();
    let max_body = max_program_bits / 3 - 1;

    // fixed-length prefixes: all bodies of length ≤ 2 run as one task each,
    // longer ones are split on their first two opcodes
    let mut tasks: Vec<(usize, Vec<Opcode>)> = Vec::new();
    for len in 0..=max_body {
        if len <= 2 {
            tasks.push((len, Vec::new()));
        } else {
            for a in BODY_OPS {
                for b in BODY_OPS {
                    tasks.push((len, vec![a, b]));
                }
            }
        }
    }

    let input = input.as_slice();
    let run_task = |(len, prefix): &(usize, Vec<Opcode>)| -> Partial {
        let mut partial: Partial = vec![HashMap::new(); budgets.len()];
        let mut runner = Runner::new();
        visit_bodies(prefix, *len, &mut |ops| {
            let jumps = jump_table(ops);
            let mut sink = PackedSink::new(opts.output_cap);
            let (status, steps) = runner.execute(ops, &jumps, input, max_budget, &mut sink);
            if status != Status::Halted {
                return;
            }
            let key = OutKey { len: sink.len as u8, value: sink.value };
            for (j, &b) in budgets.iter().enumerate() {
                if steps <= b {
                    partial[j]
                        .entry(key)
                        .or_insert_with(|| Hit { witness: Witness::of(ops), steps });
                }
            }
        });
        partial
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        tasks
            .par_iter()
            .map(run_task)
            .reduce(
                || vec![HashMap::new(); budgets.len()],
                |mut a, b| {
                    merge_into(&mut a, b);
                    a
                },
            )
    })
}

fn to_table(
    hits: &HashMap<OutKey, Hit>,
    previous: Option<&KTable>,
    max_program_bits: usize,
    budget: u64,
    input: &BitString,
    opts: SearchOptions,
) -> KTable {
    let entries = hits
        .iter()
        .map(|(k, hit)| {
            let s = k.bits();
            let min_bits = 3 * hit.witness.n_ops as usize;
            let converged = previous
                .and_then(|t| t.k_hat(&s))
                .is_some_and(|prev| prev == min_bits);
            (
                s,
                KEntry {
                    min_bits,
                    witness: hit.witness.program(),
                    steps: hit.steps,
                    converged,
                },
            )
        })
        .collect();
    KTable {
        entries,
        max_program_bits,
        budget,
        output_cap: opts.output_cap,
        input: input.clone(),
        machine_version: MACHINE_VERSION.to_string(),
    }
}

/// Minimal witnesses for every output reachable within the bounds.
///
/// A single-budget table has no convergence evidence; every entry's
/// `converged` flag is false. Use [`budget_sweep`] for that.
pub fn build_ktable(max_program_bits: usize, budget: u64, input: &BitString) -> KTable {
    build_ktable_with(max_program_bits, budget, input, SearchOptions::default())
}

pub fn build_ktable_with(
    max_program_bits: usize,
    budget: u64,
    input: &BitString,
    opts: SearchOptions,
) -> KTable {
    let partial = search_partials(max_program_bits, &[budget], input, opts);
    to_table(&partial[0], None, max_program_bits, budget, input, opts)
}

/// One table per budget, from a single scan at the largest budget: a run
/// that halts within B steps halts identically under any larger budget.
///
/// Each table's `converged` flags compare it with the table before it.
pub fn budget_sweep(max_program_bits: usize, budgets: &[u64], input: &BitString) -> Vec<KTable> {
    budget_sweep_with(max_program_bits, budgets, input, SearchOptions::default())
}

pub fn budget_sweep_with(
    max_program_bits: usize,
    budgets: &[u64],
    input: &BitString,
    opts: SearchOptions,
) -> Vec<KTable> {
    let partials = search_partials(max_program_bits, budgets, input, opts);
    let mut tables: Vec<KTable> = Vec::with_capacity(budgets.len());
    for (hits, &budget) in partials.iter().zip(budgets) {
        let t = to_table(hits, tables.last(), max_program_bits, budget, input, opts);
        tables.push(t);
    }
    tables
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::bitvm::{run, MachineConfig, OutcomeKind};

    /// Generate every opcode sequence up to `max_ops` and keep the valid ones.
    fn naive_programs(max_ops: usize) -> Vec<Program> {
        let mut out = Vec::new();
        for n in 1..=max_ops {
            for code in 0..8u32.pow(n as u32) {
                let ops: Vec<Opcode> = (0..n)
                    .rev()
                    .map(|i| Opcode::from_code(((code >> (3 * i)) & 7) as u8))
                    .collect();
                if let Ok(p) = Program::new(ops) {
                    out.push(p);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_small_cases() {
        let progs: Vec<Program> = enumerate_programs(3).collect();
        assert_eq!(progs, vec![Program::new(vec![Opcode::End]).unwrap()]);
        let progs: Vec<String> = enumerate_programs(6).map(|p| p.to_string()).collect();
        assert_eq!(progs, ["END", "L END", "R END", "F END", "O END", "I END"]);
        // non-multiples of three round down
        assert_eq!(enumerate_programs(8).count(), 6);
    }

    #[test]
    fn enumeration_matches_naive_filter() {
        for max_ops in 1..=5 {
            let fast: Vec<Program> = enumerate_programs(3 * max_ops).collect();
            assert_eq!(fast, naive_programs(max_ops), "max_ops {max_ops}");
        }
    }

    #[test]
    fn enumeration_count_at_twelve_bits() {
        // oracle: generate-then-validate over all sequences of ≤ 4 opcodes
        let oracle = naive_programs(4).len();
        assert_eq!(oracle, 172);
        assert_eq!(enumerate_programs(12).count(), oracle);
    }

    #[test]
    fn dfs_visit_agrees_with_iterator() {
        let mut seen = Vec::new();
        for len in 0..=4 {
            visit_bodies(&[], len, &mut |ops| seen.push(Program::new(ops.to_vec()).unwrap()));
        }
        let it: Vec<Program> = enumerate_programs(15).collect();
        assert_eq!(seen, it);
    }

    #[test]
    fn small_complexities() {
        let t = build_ktable_with(12, 100, &BitString::new(), SearchOptions::default().with_workers(1));
        assert_eq!(t.k_hat(&bits("")), Some(3));
        assert_eq!(t.get(&bits("")).unwrap().witness.to_string(), "END");
        assert_eq!(t.k_hat(&bits("0")), Some(6));
        assert_eq!(t.get(&bits("0")).unwrap().witness.to_string(), "O END");
        assert_eq!(t.k_hat(&bits("1")), Some(9));
        assert_eq!(t.get(&bits("1")).unwrap().witness.to_string(), "F O END");
    }

    #[test]
    fn conditional_tie_break_prefers_smaller_encoding() {
        let t = build_ktable(9, 100, &bits("1"));
        let e = t.get(&bits("1")).unwrap();
        assert_eq!(e.min_bits, 9);
        // F O END (010 011 111) beats I O END (100 011 111)
        assert_eq!(e.witness.to_string(), "F O END");
    }

    #[test]
    fn witnesses_reproduce_their_keys() {
        let t = build_ktable(18, 1000, &BitString::new());
        for (s, e) in &t.entries {
            let out = run(&e.witness, &MachineConfig::new(t.budget));
            assert_eq!(out.kind, OutcomeKind::Halted);
            assert_eq!(out.output.as_ref(), Some(s));
            assert_eq!(out.steps_used, e.steps);
            assert_eq!(e.witness.bit_length(), e.min_bits);
        }
    }

    #[test]
    fn table_is_exhaustive_against_brute_force() {
        let budget = 200;
        let t = build_ktable(15, budget, &BitString::new());
        let mut best: BTreeMap<BitString, Program> = BTreeMap::new();
        for p in naive_programs(5) {
            if let Some(out) = run(&p, &MachineConfig::new(budget)).output {
                best.entry(out).or_insert(p);
            }
        }
        assert_eq!(best.len(), t.len());
        for (s, p) in best {
            assert_eq!(&t.get(&s).unwrap().witness, &p);
        }
    }

    #[test]
    fn worker_count_does_not_change_table() {
        let a = build_ktable_with(18, 500, &bits("1"), SearchOptions::default().with_workers(1));
        let b = build_ktable_with(18, 500, &bits("1"), SearchOptions::default().with_workers(4));
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_is_monotone_and_flags_convergence() {
        let tables = budget_sweep(15, &[10, 100], &BitString::new());
        assert_eq!(tables[0].k_hat(&bits("")), Some(3));
        assert_eq!(tables[1].k_hat(&bits("")), Some(3));
        for (s, e) in &tables[0].entries {
            let later = tables[1].get(s).expect("entries persist");
            assert!(later.min_bits <= e.min_bits);
        }
        assert!(tables[0].entries.values().all(|e| !e.converged));
        assert!(tables[1].get(&bits("")).unwrap().converged);
    }

    #[test]
    fn sweep_tables_equal_single_budget_builds() {
        let budgets = [5, 20, 300];
        let sweep = budget_sweep(15, &budgets, &bits("0"));
        for (t, &b) in sweep.iter().zip(&budgets) {
            let single = build_ktable(15, b, &bits("0"));
            assert_eq!(t.entries.len(), single.entries.len());
            for (s, e) in &single.entries {
                let se = t.get(s).unwrap();
                assert_eq!((se.min_bits, &se.witness, se.steps), (e.min_bits, &e.witness, e.steps));
            }
        }
    }

    #[test]
    fn output_cap_drops_long_outputs() {
        let opts = SearchOptions { workers: 1, output_cap: 2 };
        let t = build_ktable_with(15, 100, &BitString::new(), opts);
        assert!(t.entries.keys().all(|s| s.len() <= 2));
        assert_eq!(t.output_cap, 2);
        assert_eq!(t.k_hat(&bits("00")), Some(9));
    }
}
