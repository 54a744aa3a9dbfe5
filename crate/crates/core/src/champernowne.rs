//! Champernowne-style sequences: statistically normal, algorithmically
//! trivial.
//!
//! Block frequencies are exact rationals over sliding windows. Entropy is
//! the one floating-point quantity here (f64, about 15 significant digits).

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{binary_width, BitString};
use crate::paradox::GeneratorTemplate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    /// All strings of length 1, 2, 3, ... in order: the limit of concat(ℓ(N)).
    AllStrings,
    /// Binary numerals 1, 10, 11, 100, ... without leading zeros.
    Counting,
}

impl Variant {
    pub fn template(self) -> GeneratorTemplate {
        match self {
            Variant::AllStrings => GeneratorTemplate::all_strings(),
            Variant::Counting => GeneratorTemplate::counting(),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-strings" | "all_strings" | "AllStrings" => Ok(Variant::AllStrings),
            "counting" | "Counting" => Ok(Variant::Counting),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceSpec {
    pub variant: Variant,
    pub n: u64,
}

impl SequenceSpec {
    pub fn new(variant: Variant, n: u64) -> Self {
        assert!(n >= 1, "prefix length must be at least 1");
        SequenceSpec { variant, n }
    }
}

/// The infinite sequence as a stream; memory use is constant.
pub fn sequence_stream(variant: Variant) -> impl Iterator<Item = bool> {
    let (mut width, mut value) = match variant {
        Variant::AllStrings => (1u32, 0u64),
        Variant::Counting => (1u32, 1u64),
    };
    let mut pos = width;
    std::iter::from_fn(move || {
        if pos == 0 {
            value += 1;
            match variant {
                Variant::AllStrings if value == 1 << width => {
                    width += 1;
                    value = 0;
                }
                Variant::Counting if value == 1 << width => width += 1,
                _ => {}
            }
            pos = width;
        }
        pos -= 1;
        Some((value >> pos) & 1 == 1)
    })
}

pub fn sequence_prefix(spec: SequenceSpec) -> BitString {
    sequence_stream(spec.variant).take(spec.n as usize).collect()
}

/// Sliding-window block counts: `counts[v]` is the number of windows whose
/// `b` bits read as `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCounts {
    pub b: u32,
    pub counts: Vec<u64>,
    pub windows: u64,
}

impl BlockCounts {
    pub fn from_stream(bits: impl Iterator<Item = bool>, b: u32) -> BlockCounts {
        assert!((1..=16).contains(&b), "block size must be in 1..=16");
        let mask = (1u32 << b) - 1;
        let mut counts = vec![0u64; 1 << b];
        let mut window = 0u32;
        let mut seen = 0u64;
        for bit in bits {
            window = ((window << 1) | bit as u32) & mask;
            seen += 1;
            if seen >= b as u64 {
                counts[window as usize] += 1;
            }
        }
        let windows = (seen + 1).saturating_sub(b as u64);
        BlockCounts { b, counts, windows }
    }

    /// Counted in `shards` ranges that overlap by b − 1 bits, then summed.
    pub fn sharded(bits: &[bool], b: u32, shards: usize) -> BlockCounts {
        assert!((1..=16).contains(&b), "block size must be in 1..=16");
        let b_len = b as usize;
        if bits.len() < b_len {
            return BlockCounts::from_stream(bits.iter().copied(), b);
        }
        let starts = bits.len() - b_len + 1;
        let per = starts.div_ceil(shards.max(1));
        (0..starts)
            .step_by(per.max(1))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|lo| {
                let hi = (lo + per).min(starts);
                BlockCounts::from_stream(bits[lo..hi + b_len - 1].iter().copied(), b)
            })
            .reduce(
                || BlockCounts { b, counts: vec![0; 1 << b], windows: 0 },
                |mut a, c| {
                    for (x, y) in a.counts.iter_mut().zip(c.counts) {
                        *x += y;
                    }
                    a.windows += c.windows;
                    a
                },
            )
    }

    pub fn frequency(&self, block: u32) -> Ratio<u64> {
        Ratio::new(self.counts[block as usize], self.windows)
    }

    pub fn frequencies(&self) -> Vec<(BitString, Ratio<u64>)> {
        (0..self.counts.len() as u32)
            .map(|v| (BitString::from_u64(v as u64, self.b as usize), self.frequency(v)))
            .collect()
    }

    /// max over blocks of |frequency − 2^{−b}|, exactly.
    pub fn discrepancy(&self) -> Ratio<u128> {
        let scale = 1u128 << self.b;
        let w = self.windows as u128;
        let worst = self
            .counts
            .iter()
            .map(|&c| (c as u128 * scale).abs_diff(w))
            .max()
            .unwrap_or(0);
        Ratio::new(worst, w * scale)
    }

    /// H_b / b with H_b = −Σ f log₂ f.
    pub fn entropy_rate(&self) -> f64 {
        let w = self.windows as f64;
        let h: f64 = self
            .counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let f = c as f64 / w;
                -f * f.log2()
            })
            .sum();
        (h / self.b as f64).clamp(0.0, 1.0)
    }
}

/// One step of incremental parsing: extend phrase `parent` (0 = empty) by
/// `bit`. Only the final phrase may lack its bit, when the input ends on a
/// phrase that is already in the dictionary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phrase {
    pub parent: u32,
    pub bit: Option<bool>,
}

pub fn dictionary_parse(bits: &[bool]) -> Vec<Phrase> {
    // trie node 0 is the empty phrase; node t is phrase t
    let mut children: Vec<[u32; 2]> = vec![[0, 0]];
    let mut phrases = Vec::new();
    let mut node = 0u32;
    for &b in bits {
        let next = children[node as usize][b as usize];
        if next != 0 {
            node = next;
            continue;
        }
        let id = children.len() as u32;
        children[node as usize][b as usize] = id;
        children.push([0, 0]);
        phrases.push(Phrase { parent: node, bit: Some(b) });
        node = 0;
    }
    if node != 0 {
        phrases.push(Phrase { parent: node, bit: None });
    }
    phrases
}

pub fn dictionary_decode(phrases: &[Phrase]) -> BitString {
    let mut dict: Vec<Vec<bool>> = vec![Vec::new()];
    let mut out = Vec::new();
    for p in phrases {
        let mut s = dict[p.parent as usize].clone();
        if let Some(b) = p.bit {
            s.push(b);
        }
        out.extend_from_slice(&s);
        dict.push(s);
    }
    BitString::from_bools(out)
}

/// Phrase t (1-based) costs ⌈log₂ t⌉ bits of parent index plus one bit.
pub fn phrase_cost(t: u64) -> u64 {
    crate::bits::ceil_log2(t) as u64 + 1
}

pub fn compressed_bits(phrases: &[Phrase]) -> u64 {
    (1..=phrases.len() as u64).map(phrase_cost).sum()
}

pub fn dictionary_compress_ratio(bits: &[bool]) -> Ratio<u64> {
    assert!(!bits.is_empty(), "compression ratio of empty input");
    Ratio::new(compressed_bits(&dictionary_parse(bits)), bits.len() as u64)
}

/// (generator id, n) description length: template overhead plus n in binary.
pub fn description_bits(variant: Variant, n: u64) -> u64 {
    variant.template().k_gen() as u64 + binary_width(n) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChampStats {
    pub spec: SequenceSpec,
    pub b: u32,
    pub windows: u64,
    pub window_mode: &'static str,
    /// (block, count); frequency is count / windows.
    pub counts: Vec<(String, u64)>,
    pub discrepancy: (u128, u128),
    pub discrepancy_approx: f64,
    pub entropy_rate: f64,
    pub compression_ratio: (u64, u64),
    pub compressed_bits: u64,
    pub description_bits: u64,
}

pub fn block_stats(spec: SequenceSpec, b: u32) -> ChampStats {
    assert!(b <= 16 && spec.n >= b as u64);
    let prefix = sequence_prefix(spec);
    let counts = BlockCounts::from_stream(prefix.iter(), b);
    stats_from(spec, &prefix, counts)
}

/// As [`block_stats`], counting windows in parallel shards on `workers`
/// threads; the counts are identical.
pub fn block_stats_with(spec: SequenceSpec, b: u32, workers: usize) -> ChampStats {
    assert!(b <= 16 && spec.n >= b as u64);
    let prefix = sequence_prefix(spec);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let counts = pool.install(|| BlockCounts::sharded(prefix.as_slice(), b, workers.max(1) * 4));
    stats_from(spec, &prefix, counts)
}

fn stats_from(spec: SequenceSpec, prefix: &BitString, counts: BlockCounts) -> ChampStats {
    let disc = counts.discrepancy();
    let phrases = dictionary_parse(prefix.as_slice());
    let compressed = compressed_bits(&phrases);
    let ratio = Ratio::new(compressed, prefix.len() as u64);
    ChampStats {
        spec,
        b: counts.b,
        windows: counts.windows,
        window_mode: "sliding",
        counts: counts
            .counts
            .iter()
            .enumerate()
            .map(|(v, &c)| (BitString::from_u64(v as u64, counts.b as usize).to_string(), c))
            .collect(),
        discrepancy: (*disc.numer(), *disc.denom()),
        discrepancy_approx: *disc.numer() as f64 / *disc.denom() as f64,
        entropy_rate: counts.entropy_rate(),
        compression_ratio: (*ratio.numer(), *ratio.denom()),
        compressed_bits: compressed,
        description_bits: description_bits(spec.variant, spec.n),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContrastReport {
    pub spec: SequenceSpec,
    pub b: u32,
    pub description_bits: u64,
    pub compressed_bits: u64,
    /// n × entropy rate at block size b.
    pub entropy_bits: f64,
    /// false when n is too small to say anything
    pub contrast: bool,
    /// min(compressed, entropy) / description
    pub gap: f64,
    pub description_per_bit: f64,
}

pub fn complexity_contrast(spec: SequenceSpec, b: u32) -> ContrastReport {
    let prefix = sequence_prefix(spec);
    let counts = BlockCounts::from_stream(prefix.iter(), b);
    let entropy_bits = spec.n as f64 * counts.entropy_rate();
    let compressed = compressed_bits(&dictionary_parse(prefix.as_slice()));
    let description = description_bits(spec.variant, spec.n);
    let statistical = (compressed as f64).min(entropy_bits);
    ContrastReport {
        spec,
        b,
        description_bits: description,
        compressed_bits: compressed,
        entropy_bits,
        contrast: spec.n > description,
        gap: statistical / description as f64,
        description_per_bit: description as f64 / spec.n as f64,
    }
}

/// Pack most significant bit first, for external inspection.
pub fn export_packed(spec: SequenceSpec) -> Vec<u8> {
    sequence_prefix(spec).to_packed()
}
