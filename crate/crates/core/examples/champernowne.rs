//! Block statistics, compression and description length of the
//! all-strings and counting sequences.
//!
//!     cargo run --release --example champernowne -- 1000000

use klab::champernowne::{block_stats, complexity_contrast, sequence_prefix, SequenceSpec, Variant};

fn main() {
    let n: u64 = std::env::args().nth(1).map_or(1_000_000, |s| s.parse().expect("n"));
    for variant in [Variant::AllStrings, Variant::Counting] {
        let spec = SequenceSpec::new(variant, n);
        println!("{variant:?}: {}...", sequence_prefix(SequenceSpec::new(variant, n.min(40))));
        for b in 1..=4 {
            let s = block_stats(spec, b);
            println!("  b={b}  discrepancy {:.5}  entropy rate {:.5}", s.discrepancy_approx, s.entropy_rate);
        }
        let c = complexity_contrast(spec, 4);
        println!(
            "  compressed {} bits, description {} bits, gap {:.0}x",
            c.compressed_bits, c.description_bits, c.gap
        );
    }
}
