//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};

use klab::bits::BitString;
use klab::bitvm::{run, MachineConfig, OutcomeKind};
use klab::champernowne::{
    block_stats_with, complexity_contrast, dictionary_decode, dictionary_parse, sequence_prefix, SequenceSpec,
    Variant,
};
use klab::cli::{self, Cli};
use klab::joint::{verify_subadditivity_with, SearchBounds};
use klab::paradox::{
    generate_list, list_item, paradox_report, selector_program, verify_generator, GeneratorTemplate,
};
use klab::searcher::{budget_sweep_with, counting_formulas, valid_programs_up_to, SearchOptions};

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took <= limit, "took {took:.2?}, limit {limit:?}");
    Ok(())
}

fn workers() -> usize {
    SearchOptions::default().workers.max(4)
}

fn counting_reproduction() -> Result<String, String> {
    let start = Instant::now();
    for n in 1..=16u64 {
        let list = generate_list(n).map_err(|e| e.to_string())?;
        let expected = (BigInt::one() << (n + 1)) - 2;
        ensure!(BigInt::from(list.items.len()) == expected, "N={n}: {} items", list.items.len());
    }
    let r = counting_formulas(100, 10);
    ensure!(r.strings_in_list == (BigInt::one() << 101) - 2, "strings {}", r.strings_in_list);
    ensure!(r.programs_bound == (BigInt::one() << 18) - 2, "bound {}", r.programs_bound);
    ensure!(r.deficit > BigInt::zero(), "deficit {}", r.deficit);
    within(Duration::from_secs(1), start)?;
    Ok(format!("N=1..16 exact; (100,10): {} vs {}", r.strings_in_list, r.programs_bound))
}

fn machine_pigeonhole() -> Result<String, String> {
    let start = Instant::now();
    let opts = SearchOptions::default().with_workers(workers());
    let tables = budget_sweep_with(18, &[1000, 10_000], &BitString::new(), opts);
    let table = tables.last().unwrap();
    let unconverged = table.entries.values().filter(|e| !e.converged).count();
    ensure!(unconverged == 0, "{unconverged} entries not converged");
    let mut violations = 0;
    for l in 0..=18usize {
        let outputs = BigUint::from(table.outputs_within(l));
        let programs = valid_programs_up_to(l);
        let raw = if l == 0 { BigUint::zero() } else { (BigUint::one() << (l + 1)) - 2u32 };
        if !(outputs <= programs && programs <= raw) {
            violations += 1;
        }
    }
    ensure!(violations == 0, "{violations} violations");
    within(Duration::from_secs(120), start)?;
    Ok(format!("L=0..18, {} outputs, 0 violations", table.len()))
}

fn small_complexities() -> Result<String, String> {
    let eps = BitString::new();
    let want = [("", 3), ("0", 6), ("1", 9)];
    let mut tables = Vec::new();
    for budget in [1000u64, 100_000] {
        for w in [1, workers()] {
            let opts = SearchOptions::default().with_workers(w);
            let t = budget_sweep_with(21, &[budget / 2, budget], &eps, opts).pop().unwrap();
            for (s, k) in want {
                let got = t.k_hat(&s.parse().unwrap());
                ensure!(got == Some(k), "K̂({s:?}) = {got:?} at budget {budget}, {w} workers");
            }
            tables.push((budget, w, t));
        }
    }
    for pair in tables.chunks(2) {
        ensure!(pair[0].2 == pair[1].2, "budget {}: 1 and {} workers differ", pair[0].0, pair[1].1);
    }
    Ok(format!("K̂(ε)=3 K̂(0)=6 K̂(1)=9 at budgets 10^3 and 10^5; 1 and {} workers identical", workers()))
}

fn paradox_reproduction() -> Result<String, String> {
    let start = Instant::now();
    let t = GeneratorTemplate::all_strings();
    for n in 1..=8u64 {
        let a = t.instantiate(n);
        let width = 64 - n.leading_zeros() as usize;
        ensure!(a.total_bits == t.k_gen() + t.c_per_bit() * width, "identity fails at N={n}");
        ensure!(a.program.bit_length() == a.total_bits, "program length differs at N={n}");
    }
    for n in 1..=4u64 {
        let c = verify_generator(n, 10_000_000).map_err(|e| e.to_string())?;
        ensure!(c.halted && c.matches, "generator wrong at N={n}: {c:?}");
    }
    let mut first = None;
    for n in 1..=5000u64 {
        let r = paradox_report(n);
        let above = n > r.generator_bits as u64;
        ensure!(
            above == (r.guaranteed_high_complexity_count > BigInt::zero()),
            "N={n}: generator {} bits, count {}",
            r.generator_bits,
            r.guaranteed_high_complexity_count
        );
        if above && first.is_none() {
            first = Some(n);
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "k_gen={} c={} identity N=1..8, runs N=1..4, count>0 exactly for N>g(N) (from N={})",
        t.k_gen(),
        t.c_per_bit(),
        first.unwrap()
    ))
}

fn selector_bound() -> Result<String, String> {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=6u64 {
        for j in 1..=(1u64 << (n + 1)) - 2 {
            let s = list_item(j);
            let p = selector_program(n, j).map_err(|e| e.to_string())?;
            ensure!(p.bit_length() >= 3 * s.len() + 3, "N={n} j={j}: {} bits", p.bit_length());
            let out = run(&p, &MachineConfig::new(10_000));
            ensure!(out.kind == OutcomeKind::Halted && out.output.as_ref() == Some(&s), "N={n} j={j} prints wrong");
            checked += 1;
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{checked} selectors, all ≥ 3|s_j|+3 bits and correct"))
}

fn subadditivity() -> Result<String, String> {
    let start = Instant::now();
    let opts = SearchOptions::default().with_workers(workers());
    let mut margins = Vec::new();
    for (bits, budgets) in [(27, [500u64, 1000]), (27, [1000, 2000]), (30, [500, 1000])] {
        let r = verify_subadditivity_with(1, 1, &SearchBounds::new(bits, &budgets), opts)
            .map_err(|e| format!("{bits} bits {budgets:?}: {e}"))?;
        ensure!(r.rows.len() == 9, "{} rows", r.rows.len());
        margins.push(r.max_margin);
    }
    ensure!(margins.iter().all(|&m| m == margins[0]), "max_margin varies: {margins:?}");
    within(Duration::from_secs(600), start)?;
    Ok(format!("max_margin {} under base, doubled budget, +1 opcode", margins[0]))
}

fn champernowne_contrast() -> Result<String, String> {
    let start = Instant::now();
    let spec = SequenceSpec::new(Variant::AllStrings, 1_000_000);
    let mut worst = Ratio::<u128>::zero();
    for b in 1..=3 {
        let d = block_stats_with(spec, b, workers()).discrepancy;
        let d = Ratio::new(d.0, d.1);
        ensure!(d < Ratio::new(5, 100), "discrepancy {d} at b={b}");
        worst = worst.max(d);
    }
    let s4 = block_stats_with(spec, 4, workers());
    ensure!(s4.entropy_rate >= 0.95, "entropy rate {}", s4.entropy_rate);
    let ratio = Ratio::new(s4.compression_ratio.0, s4.compression_ratio.1);
    ensure!(ratio >= Ratio::new(1, 2), "compression ratio {ratio}");
    ensure!(s4.description_bits <= 400, "description {} bits", s4.description_bits);
    let c = complexity_contrast(spec, 4);
    ensure!(c.contrast && c.gap >= 1000.0, "gap {}", c.gap);
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "max discrepancy {:.4}, H4/4 {:.4}, ratio {:.3}, description {} bits, gap {:.0}x",
        *worst.numer() as f64 / *worst.denom() as f64,
        s4.entropy_rate,
        *ratio.numer() as f64 / *ratio.denom() as f64,
        s4.description_bits,
        c.gap
    ))
}

fn compressor_losslessness() -> Result<String, String> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut inputs: Vec<Vec<bool>> = (0..1000)
        .map(|_| {
            let len = rng.gen_range(1..=10_000);
            (0..len).map(|_| rng.gen_bool(0.5)).collect()
        })
        .collect();
    let structured: Vec<Vec<bool>> = vec![
        vec![false],
        vec![true],
        vec![false; 10_000],
        vec![true; 10_000],
        (0..10_000).map(|i| i % 2 == 0).collect(),
        (0..10_000).map(|i| i % 3 == 0).collect(),
        (0..10_000).map(|i: u32| i.count_ones() % 2 == 1).collect(),
        (0..10_000).map(|i: u64| (i * i) % 7 < 3).collect(),
        sequence_prefix(SequenceSpec::new(Variant::AllStrings, 10_000)).into_inner(),
        sequence_prefix(SequenceSpec::new(Variant::Counting, 10_000)).into_inner(),
    ];
    inputs.extend(structured);
    let failures = inputs
        .iter()
        .filter(|x| dictionary_decode(&dictionary_parse(x)).as_slice() != &x[..])
        .count();
    ensure!(failures == 0, "{failures} round-trip failures");
    Ok(format!("{} inputs, 0 failures", inputs.len()))
}

fn cli_determinism() -> Result<String, String> {
    use clap::Parser;
    let runs: &[&[&str]] = &[
        &["ktable", "--max-program-bits", "18", "--budgets", "100,1000"],
        &["counting"],
        &["paradox", "--n", "3"],
        &["subadd"],
        &["champernowne", "--variant", "both", "--n", "20000"],
    ];
    for args in runs {
        let mut texts = Vec::new();
        for w in ["1", "3"] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let mut full = vec!["klab", "--quiet", "--workers", w, "--out-dir", dir.path().to_str().unwrap()];
            full.extend_from_slice(args);
            let cli = Cli::try_parse_from(&full).map_err(|e| e.to_string())?;
            let (report, _) = cli::execute(&cli).map_err(|e| format!("{}: {e}", args[0]))?;
            texts.push(report.results_text());
        }
        ensure!(texts[0] == texts[1], "{} results differ between reruns", args[0]);
    }
    Ok(format!("{} commands rerun with byte-identical results", runs.len()))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("1 counting reproduction", counting_reproduction),
        ("2 machine-level pigeonhole", machine_pigeonhole),
        ("3 exact small complexities", small_complexities),
        ("4 paradox reproduction", paradox_reproduction),
        ("5 selector/address bound", selector_bound),
        ("6 subadditivity", subadditivity),
        ("7 champernowne contrast", champernowne_contrast),
        ("8 compressor losslessness", compressor_losslessness),
        ("9 cli determinism", cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name} ({took:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
