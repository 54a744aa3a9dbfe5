//! Generator length, execution, and selector sizes for the list of all
//! strings of length ≤ N.
//!
//!     cargo run --example paradox -- 3

use klab::paradox::{generator_paradox_threshold, paradox_report, verify_generator, GeneratorTemplate};

fn main() {
    let n: u64 = std::env::args().nth(1).map_or(3, |s| s.parse().expect("N"));
    let t = GeneratorTemplate::all_strings();
    let r = paradox_report(n);
    println!("generator: {} + {}·⌈log₂(N+1)⌉ = {} bits at N = {n}", t.k_gen(), t.c_per_bit(), r.generator_bits);
    println!("strings in list            {}", r.strings_in_list);
    println!("programs ≤ generator bits  {}", r.programs_bound);
    println!("forced above generator     {}", r.guaranteed_high_complexity_count);
    println!("counting bites from N =    {}", generator_paradox_threshold());
    if n <= 6 {
        let c = verify_generator(n, 100_000_000).unwrap();
        println!("run: halted {} in {} steps, output matches list: {}", c.halted, c.steps, c.matches);
        if let Some(out) = c.output {
            println!("output {out}");
        }
    }
    println!("\n{:>6}  {:>10}  selector bits", "j", "s_j");
    for e in &r.selector_examples {
        println!("{:>6}  {:>10}  {}", e.j, e.s_j, e.selector_bits);
    }
}
