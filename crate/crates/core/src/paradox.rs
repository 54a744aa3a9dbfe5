//! The list ℓ(N) of all binary strings of length 1..=N, a machine-code
//! generator for it whose length grows only with the digits of N, literal
//! selector programs for single items, and the counting report that ties
//! them together.
//!
//! The generator prints the whole list. Singling out one item s_j needs a
//! program that carries s_j (or its index, which is as long) itself; the
//! selector programs make that cost explicit.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bits::{binary_width, BitString};
use crate::bitvm::{assemble, run, MachineConfig, Opcode, OutcomeKind, Program, MACHINE_VERSION};
use crate::searcher::counting::{as_decimal, strings_up_to};

pub const SPLICE_MARKER: &str = "%N%";

/// Largest list that [`generate_list`] will materialize, in items.
pub const DEFAULT_LIST_CAP: u64 = 1 << 22;

/// Selector template overhead: the trailing END.
pub const SELECTOR_OVERHEAD_BITS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParadoxError {
    #[error("list for N={n} has {items} items, above the cap of {cap}")]
    ListTooLarge { n: u64, items: BigUint, cap: u64 },
    #[error("index {j} outside 1..={max}")]
    IndexOutOfRange { j: u64, max: BigUint },
    #[error("N must be at least 1")]
    ZeroN,
}

/// Number of items in ℓ(N): 2^{N+1} − 2.
pub fn list_len(n: u64) -> BigUint {
    (BigUint::one() << (n + 1)) - 2u32
}

/// Length of concat(ℓ(N)): Σ_{i=1..N} i·2^i = (N−1)·2^{N+1} + 2.
pub fn concat_len(n: u64) -> BigUint {
    (BigUint::from(n - 1) << (n + 1)) + 2u32
}

/// The j-th item of ℓ (1-based, independent of N): j+1 in binary without
/// its leading one.
pub fn list_item(j: u64) -> BitString {
    assert!(j >= 1);
    let v = j + 1;
    let w = binary_width(v) as usize - 1;
    BitString::from_u64(v, w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringList {
    pub n: u64,
    pub items: Vec<BitString>,
    pub concat: BitString,
}

pub fn generate_list(n: u64) -> Result<StringList, ParadoxError> {
    generate_list_capped(n, DEFAULT_LIST_CAP)
}

pub fn generate_list_capped(n: u64, cap: u64) -> Result<StringList, ParadoxError> {
    if n == 0 {
        return Err(ParadoxError::ZeroN);
    }
    let items_count = list_len(n);
    if items_count > BigUint::from(cap) {
        return Err(ParadoxError::ListTooLarge { n, items: items_count, cap });
    }
    let mut items = Vec::new();
    let mut concat = BitString::new();
    for w in 1..=n as usize {
        for v in 0..1u64 << w {
            let s = BitString::from_u64(v, w);
            concat.extend_from(&s);
            items.push(s);
        }
    }
    Ok(StringList { n, items, concat })
}

/// Opcodes for one digit of N: flag, digit, spare cell.
fn digit_ops(bit: bool) -> [Opcode; 5] {
    use Opcode::{Flip as F, Right as R};
    if bit {
        [R, F, R, F, R]
    } else {
        [R, F, R, R, F]
    }
}

/// Bits of program per binary digit of N.
pub const BITS_PER_DIGIT: usize = 15;

/// A hand-written program with a splice point for N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorTemplate {
    pub name: &'static str,
    pub source: &'static str,
    prefix: Vec<Opcode>,
    suffix: Vec<Opcode>,
}

impl GeneratorTemplate {
    fn from_source(name: &'static str, source: &'static str) -> GeneratorTemplate {
        let code = |line: &str| line.split('#').next().unwrap_or("").trim().to_string();
        let lines: Vec<&str> = source.lines().collect();
        let at = lines
            .iter()
            .position(|l| code(l) == SPLICE_MARKER)
            .expect("template has a splice line");
        let prefix = assemble(&lines[..at].join("\n")).expect("template assembles");
        let suffix = assemble(&lines[at + 1..].join("\n")).expect("template assembles");
        GeneratorTemplate { name, source, prefix, suffix }
    }

    /// Generator for ℓ(N): every string of length 1..=N, concatenated.
    pub fn all_strings() -> GeneratorTemplate {
        GeneratorTemplate::from_source("all_strings", include_str!("../assets/all_strings.asm"))
    }

    /// Generator for the binary numerals 1 .. 2^{N+1}−1, concatenated.
    pub fn counting() -> GeneratorTemplate {
        GeneratorTemplate::from_source("counting", include_str!("../assets/counting.asm"))
    }

    /// Template overhead in bits, independent of N.
    pub fn k_gen(&self) -> usize {
        3 * (self.prefix.len() + self.suffix.len())
    }

    pub fn c_per_bit(&self) -> usize {
        BITS_PER_DIGIT
    }

    /// Program length for N without building it.
    pub fn bits_for(&self, n: u64) -> usize {
        self.k_gen() + self.c_per_bit() * binary_width(n) as usize
    }

    /// The template's fixed parts as encodings, split at the splice point.
    pub fn compiled(&self) -> (BitString, BitString) {
        let enc = |ops: &[Opcode]| -> BitString {
            ops.iter()
                .flat_map(|op| {
                    let c = op.code();
                    [c & 4 != 0, c & 2 != 0, c & 1 != 0]
                })
                .collect()
        };
        (enc(&self.prefix), enc(&self.suffix))
    }

    pub fn instantiate(&self, n: u64) -> GeneratorAccount {
        assert!(n >= 1, "N must be at least 1");
        let n_bits = binary_width(n) as usize;
        let mut ops = self.prefix.clone();
        for i in (0..n_bits).rev() {
            ops.extend(digit_ops((n >> i) & 1 == 1));
        }
        ops.extend_from_slice(&self.suffix);
        let program = Program::new(ops).expect("template instantiates to a valid program");
        GeneratorAccount {
            n,
            total_bits: program.bit_length(),
            program,
            k_gen: self.k_gen(),
            c_per_bit: self.c_per_bit(),
            n_bits,
        }
    }
}

/// A generator instance with its length broken down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorAccount {
    pub n: u64,
    pub program: Program,
    pub total_bits: usize,
    pub k_gen: usize,
    pub c_per_bit: usize,
    /// ⌈log₂(N+1)⌉, the binary digits of N.
    pub n_bits: usize,
}

impl GeneratorAccount {
    pub fn identity_holds(&self) -> bool {
        self.total_bits == self.k_gen + self.c_per_bit * self.n_bits
    }
}

pub fn generator_program(n: u64) -> GeneratorAccount {
    GeneratorTemplate::all_strings().instantiate(n)
}

/// Run a generator and compare its output with concat(ℓ(N)).
pub fn verify_generator(n: u64, budget: u64) -> Result<GeneratorCheck, ParadoxError> {
    let account = generator_program(n);
    let expected = generate_list(n)?.concat;
    let out = run(&account.program, &MachineConfig::new(budget));
    Ok(GeneratorCheck {
        n,
        halted: out.kind == OutcomeKind::Halted,
        steps: out.steps_used,
        matches: out.output.as_ref() == Some(&expected),
        output_bits: out.output.as_ref().map_or(0, |o| o.len()),
        output: out.output.filter(|o| o.len() <= 256).map(|o| o.to_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCheck {
    #[serde(rename = "N")]
    pub n: u64,
    pub halted: bool,
    pub matches: bool,
    pub steps: u64,
    pub output_bits: usize,
    /// What the generator printed, when it halted and is short enough to show.
    pub output: Option<String>,
}

/// Literal printer for `s`: an O per bit and an F wherever the bit differs
/// from the current cell, then END.
pub fn literal_printer(s: &BitString) -> Program {
    let mut ops = Vec::with_capacity(2 * s.len() + 1);
    let mut cell = false;
    for b in s.iter() {
        if b != cell {
            ops.push(Opcode::Flip);
            cell = b;
        }
        ops.push(Opcode::Out);
    }
    ops.push(Opcode::End);
    Program::new(ops).expect("literal printers are loop-free")
}

/// Program that outputs exactly the j-th item of ℓ(N).
pub fn selector_program(n: u64, j: u64) -> Result<Program, ParadoxError> {
    let max = list_len(n);
    if j == 0 || BigUint::from(j) > max {
        return Err(ParadoxError::IndexOutOfRange { j, max });
    }
    Ok(literal_printer(&list_item(j)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectorExample {
    pub j: u64,
    pub s_j: String,
    pub selector_bits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParadoxReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub machine: String,
    pub k_gen: usize,
    pub c_per_bit: usize,
    pub generator_bits: usize,
    #[serde(serialize_with = "as_decimal")]
    pub strings_in_list: BigInt,
    /// 2^{g+1} − 2 binary strings of length 1..=g, g = generator_bits.
    #[serde(serialize_with = "as_decimal")]
    pub programs_bound: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub guaranteed_high_complexity_count: BigInt,
    pub concat_bits: String,
    pub selector_overhead_bits: usize,
    pub selector_examples: Vec<SelectorExample>,
    pub notes: Vec<String>,
}

fn selector_indices(n: u64) -> Vec<u64> {
    if n > 62 {
        return vec![1, 2];
    }
    let last = (1u64 << (n + 1)) - 2;
    if last <= 14 {
        return (1..=last).collect();
    }
    let first_longest = (1u64 << n) - 1;
    vec![1, 2, first_longest, last - 1, last]
}

pub fn paradox_report(n: u64) -> ParadoxReport {
    assert!(n >= 1, "N must be at least 1");
    let template = GeneratorTemplate::all_strings();
    let generator_bits = template.bits_for(n);
    let strings_in_list = strings_up_to(n);
    let programs_bound = strings_up_to(generator_bits as u64);
    let deficit = &strings_in_list - &programs_bound;
    let guaranteed = if deficit > BigInt::zero() { deficit } else { BigInt::zero() };

    let selector_examples = selector_indices(n)
        .into_iter()
        .map(|j| {
            let s = list_item(j);
            SelectorExample {
                j,
                selector_bits: literal_printer(&s).bit_length(),
                s_j: s.label(),
            }
        })
        .collect();

    ParadoxReport {
        n,
        machine: MACHINE_VERSION.to_string(),
        k_gen: template.k_gen(),
        c_per_bit: template.c_per_bit(),
        generator_bits,
        strings_in_list,
        programs_bound,
        guaranteed_high_complexity_count: guaranteed,
        concat_bits: concat_len(n).to_string(),
        selector_overhead_bits: SELECTOR_OVERHEAD_BITS,
        selector_examples,
        notes: vec![
            format!("all complexities are K̂ relative to reference machine {MACHINE_VERSION}"),
            "the generator outputs concat(ℓ(N)), never a single item s_j".into(),
            "a program that halts on s_j alone must carry s_j or its index; a counter told \
             where to stop needs the same number of bits as the literal printer shown"
                .into(),
            "N is written in plain binary, ⌈log₂(N+1)⌉ digits; shorter descriptions of \
             special N would only lower the generator length by a constant factor"
                .into(),
        ],
    }
}

/// Least N for which counting alone forces some item of ℓ(N) above the
/// generator's own length.
pub fn generator_paradox_threshold() -> u64 {
    let t = GeneratorTemplate::all_strings();
    crate::searcher::paradox_threshold_by(|n| t.bits_for(n) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    fn strings(list: &StringList) -> Vec<String> {
        list.items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn list_examples() {
        let l1 = generate_list(1).unwrap();
        assert_eq!(strings(&l1), ["0", "1"]);
        assert_eq!(l1.concat, bits("01"));
        let l2 = generate_list(2).unwrap();
        assert_eq!(strings(&l2), ["0", "1", "00", "01", "10", "11"]);
        let l3 = generate_list(3).unwrap();
        assert_eq!(l3.items.len(), 14);
        assert_eq!(l3.concat.len(), 2 + 2 * 4 + 3 * 8);
    }

    #[test]
    fn list_cap_and_zero() {
        assert!(matches!(generate_list_capped(10, 100), Err(ParadoxError::ListTooLarge { .. })));
        assert_eq!(generate_list(0), Err(ParadoxError::ZeroN));
    }

    #[test]
    fn list_item_matches_materialized_list() {
        let l = generate_list(6).unwrap();
        for (i, s) in l.items.iter().enumerate() {
            assert_eq!(&list_item(i as u64 + 1), s);
        }
    }

    #[test]
    fn generator_small_runs() {
        let g = generator_program(1);
        let out = run(&g.program, &MachineConfig::new(10_000));
        assert_eq!(out.output, Some(bits("01")));

        let check = verify_generator(4, 1_000_000).unwrap();
        assert!(check.halted && check.matches);
        assert_eq!(check.output_bits, 98);
    }

    #[test]
    fn generator_length_identity() {
        let t = GeneratorTemplate::all_strings();
        for n in 1..=8 {
            assert!(generator_program(n).identity_holds());
            assert_eq!(generator_program(n).total_bits, t.bits_for(n));
        }
        let d = generator_program(8).total_bits - generator_program(1).total_bits;
        assert_eq!(d, t.c_per_bit() * 3);
    }

    #[test]
    fn compiled_encodings_match_listings() {
        for (t, shipped) in [
            (GeneratorTemplate::all_strings(), include_str!("../assets/all_strings.bits")),
            (GeneratorTemplate::counting(), include_str!("../assets/counting.bits")),
        ] {
            let (prefix, suffix) = t.compiled();
            let field = |name: &str| {
                shipped
                    .lines()
                    .find_map(|l| l.strip_prefix(name))
                    .map(|v| v.trim().to_string())
                    .unwrap()
            };
            assert_eq!(field("prefix"), prefix.to_string(), "{}", t.name);
            assert_eq!(field("suffix"), suffix.to_string(), "{}", t.name);
        }
    }

    #[test]
    fn shipped_constants() {
        let t = GeneratorTemplate::all_strings();
        assert_eq!(t.k_gen(), 312);
        assert_eq!(t.c_per_bit(), 15);
        assert_eq!(GeneratorTemplate::counting().k_gen(), 312);
    }

    #[test]
    fn counting_template_prints_numerals() {
        let t = GeneratorTemplate::counting();
        for n in 1..=4u64 {
            let out = run(&t.instantiate(n).program, &MachineConfig::new(1_000_000));
            let expected: BitString = (1..(1u64 << (n + 1)))
                .flat_map(|v| BitString::from_u64(v, binary_width(v) as usize).into_inner())
                .collect();
            assert_eq!(out.output, Some(expected), "N={n}");
        }
    }

    #[test]
    fn selector_examples() {
        let p = selector_program(2, 1).unwrap();
        assert_eq!(run(&p, &MachineConfig::new(100)).output, Some(bits("0")));
        let p14 = selector_program(3, 14).unwrap();
        assert_eq!(run(&p14, &MachineConfig::new(100)).output, Some(bits("111")));
        assert!(p14.bit_length() > selector_program(3, 1).unwrap().bit_length());
        assert!(matches!(selector_program(2, 7), Err(ParadoxError::IndexOutOfRange { .. })));
        assert!(matches!(selector_program(2, 0), Err(ParadoxError::IndexOutOfRange { .. })));
    }

    #[test]
    fn selector_growth() {
        for n in 1..=6u64 {
            for j in 1..=(1u64 << (n + 1)) - 2 {
                let s = list_item(j);
                let p = selector_program(n, j).unwrap();
                assert!(p.bit_length() - SELECTOR_OVERHEAD_BITS >= 3 * s.len());
                assert!(p.bit_length() - SELECTOR_OVERHEAD_BITS <= 6 * s.len());
                assert_eq!(run(&p, &MachineConfig::new(1000)).output, Some(s));
            }
        }
    }

    #[test]
    fn report_below_threshold_is_zero() {
        let r = paradox_report(3);
        assert_eq!(r.guaranteed_high_complexity_count, BigInt::zero());
        assert_eq!(r.selector_examples.len(), 14);
    }

    #[test]
    fn report_at_fixed_point() {
        // N = generator_bits(N) + 1, found by scan
        let t = GeneratorTemplate::all_strings();
        let n = (1..2000u64).find(|&n| n == t.bits_for(n) as u64 + 1).unwrap();
        let r = paradox_report(n);
        let expected = (BigInt::one() << (n + 1)) - (BigInt::one() << n);
        assert_eq!(r.guaranteed_high_complexity_count, expected);
    }
}
