//! K̂(x,y) against K̂(x) + K̂(y|x) for short strings, and the chained bound
//! over a small list.
//!
//!     cargo run --release --example subadditivity -- 27 500,1000

use klab::joint::{recursive_list_bound, verify_subadditivity, SearchBounds};

fn main() {
    let mut args = std::env::args().skip(1);
    let max_bits: usize = args.next().map_or(27, |s| s.parse().expect("max program bits"));
    let budgets: Vec<u64> = args
        .next()
        .map_or("500,1000".into(), |s| s)
        .split(',')
        .map(|b| b.parse().expect("budget"))
        .collect();
    let bounds = SearchBounds::new(max_bits, &budgets);
    match verify_subadditivity(1, 1, &bounds) {
        Ok(r) => print!("{}", r.to_text()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(3);
        }
    }
    match recursive_list_bound(1, &bounds) {
        Ok(c) => {
            println!();
            for l in &c.links {
                println!("K̂({} | {}) = {}", l.item.label(), l.given.label(), l.k_item_given_prefix);
            }
            println!("chain bound {} (overhead {} per join), K̂(concat) = {:?}", c.chain_bound, c.pair_overhead, c.k_concat);
        }
        Err(e) => eprintln!("chain: {e}"),
    }
}
