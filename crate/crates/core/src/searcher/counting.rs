use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bits::ceil_log2;

/// Exact counts behind the pigeonhole step of the paradox.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    /// 2^{N+1} − 2 strings of length 1..=N.
    #[serde(serialize_with = "as_decimal")]
    pub strings_in_list: BigInt,
    /// 2^{⌈log₂N⌉+k+1} − 2 binary strings of length 1..=⌈log₂N⌉+k.
    #[serde(serialize_with = "as_decimal")]
    pub programs_bound: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub deficit: BigInt,
}

impl CountReport {
    pub fn paradox_bites(&self) -> bool {
        self.deficit.is_positive()
    }
}

pub(crate) fn as_decimal<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// 2^{e+1} − 2: the number of binary strings of length 1..=e.
pub fn strings_up_to(e: u64) -> BigInt {
    (BigInt::one() << (e + 1)) - 2
}

pub fn counting_formulas(n: u64, k: u64) -> CountReport {
    assert!(n >= 1, "N must be at least 1");
    let strings_in_list = strings_up_to(n);
    let programs_bound = strings_up_to(ceil_log2(n) as u64 + k);
    let deficit = &strings_in_list - &programs_bound;
    CountReport {
        n,
        k,
        strings_in_list,
        programs_bound,
        deficit,
    }
}

/// Least N whose list outnumbers every program of ⌈log₂N⌉+k bits.
pub fn paradox_threshold(k: u64) -> u64 {
    paradox_threshold_by(|n| ceil_log2(n) as u64 + k)
}

/// Least N ≥ 1 with 2^{N+1} − 2 > 2^{len(N)+1} − 2, for a program length
/// function `len`, by ascending scan. Panics if the scan passes 2^20.
pub fn paradox_threshold_by(len: impl Fn(u64) -> u64) -> u64 {
    (1..=1 << 20)
        .find(|&n| strings_up_to(n) > strings_up_to(len(n)))
        .expect("threshold beyond scan range")
}

/// Number of valid programs of exactly `n_ops` opcodes (END included).
pub fn valid_program_count(n_ops: usize) -> BigUint {
    if n_ops == 0 {
        return BigUint::zero();
    }
    let body = n_ops - 1;
    // ways[d] = bodies so far ending at loop depth d
    let mut ways = vec![BigUint::zero(); body + 2];
    ways[0] = BigUint::one();
    for _ in 0..body {
        let mut next = vec![BigUint::zero(); body + 2];
        for d in 0..=body {
            if ways[d].is_zero() {
                continue;
            }
            next[d] += &ways[d] * 5u32;
            next[d + 1] += &ways[d];
            if d > 0 {
                next[d - 1] += &ways[d];
            }
        }
        ways = next;
    }
    ways.swap_remove(0)
}

/// Valid programs of at most `max_bits` bits.
pub fn valid_programs_up_to(max_bits: usize) -> BigUint {
    (1..=max_bits / 3).map(valid_program_count).sum()
}
