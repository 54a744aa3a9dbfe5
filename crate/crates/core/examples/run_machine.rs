//! Assemble a few programs and run them on the reference machine.
//!
//!     cargo run --example run_machine -- "F O O END"
//!     cargo run --example run_machine -- "I [ O I ] END" 1101

use klab::bits::BitString;
use klab::bitvm::{run, MachineConfig, Program};

fn show(src: &str, input: &BitString, budget: u64) {
    let program = match Program::parse_asm(src) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{src:?}: {e}");
            return;
        }
    };
    let out = run(&program, &MachineConfig::new(budget).with_input(input.clone()));
    println!("program   {program}");
    println!("encoding  {} ({} bits)", program.encode(), program.bit_length());
    println!("input     {}", input.label());
    println!(
        "outcome   {:?} after {} steps, output {}",
        out.kind,
        out.steps_used,
        out.output.map_or("-".into(), |o| o.label())
    );
    println!();
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let Some(src) = args.first() {
        let input: BitString = args.get(1).map_or(Ok(BitString::new()), |s| s.parse()).expect("input bits");
        show(src, &input, 1_000_000);
        return;
    }
    show("END", &BitString::new(), 100);
    show("O END", &BitString::new(), 100);
    show("F O END", &BitString::new(), 100);
    show("F [ ] END", &BitString::new(), 100);
    show("I [ O I ] END", &"1101".parse().unwrap(), 100);
    show("I END", &BitString::new(), 100);
}
