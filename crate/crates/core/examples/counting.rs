//! Exact pigeonhole counts: strings in the list against short programs.
//!
//!     cargo run --example counting -- 100 10

use klab::searcher::{counting_formulas, paradox_threshold, valid_programs_up_to};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map_or(100, |s| s.parse().expect("N"));
    let k: u64 = args.next().map_or(10, |s| s.parse().expect("k"));
    let r = counting_formulas(n, k);
    println!("N = {n}, k = {k}");
    println!("strings of length 1..=N         {}", r.strings_in_list);
    println!("programs of ≤ ⌈log₂N⌉+k bits    {}", r.programs_bound);
    println!("deficit                          {}", r.deficit);
    println!("some string exceeds the bound    {}", r.paradox_bites());
    println!();
    println!("{:>4}  {:>11}", "k", "threshold N");
    for k in [0, 1, 5, 10, 20, 50, 100] {
        println!("{k:>4}  {:>11}", paradox_threshold(k));
    }
    println!();
    println!("valid bitvm-v1 programs versus raw bit strings");
    for bits in (3..=30).step_by(3) {
        println!("{bits:>4} bits  {:>12}  {:>12}", valid_programs_up_to(bits), (1u64 << (bits + 1)) - 2);
    }
}
