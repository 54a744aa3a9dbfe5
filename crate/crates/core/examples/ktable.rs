//! Exhaustive complexity table with a budget sweep.
//!
//!     cargo run --release --example ktable -- 24 1000,10000

use klab::bits::BitString;
use klab::searcher::budget_sweep;

fn main() {
    let mut args = std::env::args().skip(1);
    let max_bits: usize = args.next().map_or(24, |s| s.parse().expect("max program bits"));
    let budgets: Vec<u64> = args
        .next()
        .map_or("1000,10000".into(), |s| s)
        .split(',')
        .map(|b| b.parse().expect("budget"))
        .collect();
    let tables = budget_sweep(max_bits, &budgets, &BitString::new());
    let table = tables.last().unwrap();
    println!("K̂ on bitvm-v1, programs ≤ {max_bits} bits, budgets {budgets:?}: {} outputs", table.len());
    println!("{:>10}  {:>3}  {:>6}  {:>9}  witness", "output", "K̂", "steps", "converged");
    for (s, e) in table.entries.iter().take(40) {
        println!("{:>10}  {:>3}  {:>6}  {:>9}  {}", s.label(), e.min_bits, e.steps, e.converged, e.witness);
    }
    if table.len() > 40 {
        println!("... {} more", table.len() - 40);
    }
}
