//! Command-line front end: five experiments, one report per run.
//!
//! Every run writes `<out-dir>/<command>.json` (format `doc`) or
//! `<out-dir>/<command>.txt` (format `table`). The `results` section is a
//! pure function of the parameters; only `provenance` varies between runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bits::BitString;
use crate::bitvm::MACHINE_VERSION;
use crate::champernowne::{self, SequenceSpec, Variant};
use crate::joint::{self, JointError, SearchBounds};
use crate::paradox;
use crate::searcher::{
    self, counting_formulas, paradox_threshold, CacheError, CacheHeader, KTable, SearchOptions,
    DEFAULT_OUTPUT_CAP,
};

pub const SCHEMA_VERSION: &str = "klab-report-1";

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;
pub const EXIT_CACHE: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(name = "klab", version, about = "Exact algorithmic-complexity experiments on machine bitvm-v1")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Directory that receives every file this run writes.
    #[arg(long, global = true, default_value = "klab-out")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Doc)]
    pub format: Format,
    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// KTable cache file (ktable only); relative paths live under --out-dir.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// One self-describing JSON document.
    Doc,
    /// Aligned plain text.
    Table,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Complexity table by exhaustive search with a budget sweep.
    Ktable(KtableArgs),
    /// Exact pigeonhole counts and thresholds.
    Counting(CountingArgs),
    /// Generator lengths, execution checks and selector examples.
    Paradox(ParadoxArgs),
    /// Subadditivity margins and the chained bound over a list.
    Subadd(SubaddArgs),
    /// Block statistics, compression and description length of normal sequences.
    Champernowne(ChampernowneArgs),
}

#[derive(Args, Debug, Clone)]
pub struct KtableArgs {
    #[arg(long, default_value_t = 24)]
    pub max_program_bits: usize,
    /// Ascending step budgets, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1000u64, 10000])]
    pub budgets: Vec<u64>,
    /// Conditioning input on the read stream ("" or ε for none).
    #[arg(long, default_value = "")]
    pub input: String,
    #[arg(long, default_value_t = DEFAULT_OUTPUT_CAP)]
    pub output_cap: u32,
    /// Exit with status 3 unless every entry converged.
    #[arg(long)]
    pub require_converged: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CountingArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = [3u64, 16, 100])]
    pub n: Vec<u64>,
    #[arg(long = "k", value_delimiter = ',', default_values_t = [0u64, 10])]
    pub k: Vec<u64>,
    /// Materialize ℓ(N) and count it for N up to this value.
    #[arg(long, default_value_t = 16)]
    pub materialize_up_to: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ParadoxArgs {
    #[arg(long = "n", default_value_t = 4)]
    pub n: u64,
    /// Run the generator when N is at most this.
    #[arg(long, default_value_t = 4)]
    pub verify_up_to: u64,
    #[arg(long, default_value_t = 10_000_000)]
    pub verify_budget: u64,
}

#[derive(Args, Debug, Clone)]
pub struct SubaddArgs {
    #[arg(long, default_value_t = 1)]
    pub n_x: usize,
    #[arg(long, default_value_t = 1)]
    pub n_y: usize,
    #[arg(long, default_value_t = 27)]
    pub max_program_bits: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [500u64, 1000])]
    pub budgets: Vec<u64>,
    /// Chain the bound over ℓ(N) for this N; 0 skips it.
    #[arg(long, default_value_t = 1)]
    pub chain_n: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantArg {
    AllStrings,
    Counting,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct ChampernowneArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::AllStrings)]
    pub variant: VariantArg,
    /// Prefix length in bits.
    #[arg(long = "n", default_value_t = 1_000_000)]
    pub n: u64,
    /// Block sizes, comma separated.
    #[arg(long = "b", value_delimiter = ',', default_values_t = [1u32, 2, 3, 4])]
    pub b: Vec<u32>,
    /// Also write the prefix as a packed bit file.
    #[arg(long)]
    pub export: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {msg}")]
    Config { field: &'static str, msg: String },
    #[error("incomplete table: {0}")]
    Incomplete(String),
    #[error("cache {path}: {source}")]
    Cache { path: PathBuf, source: CacheError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Incomplete(_) => EXIT_INCOMPLETE,
            CliError::Cache { source: CacheError::Io(_), .. } | CliError::Io { .. } => EXIT_IO,
            CliError::Cache { .. } => EXIT_CACHE,
        }
    }
}

fn config(field: &'static str, msg: impl Into<String>) -> CliError {
    CliError::Config { field, msg: msg.into() }
}

impl From<JointError> for CliError {
    fn from(e: JointError) -> Self {
        match e {
            JointError::SweepTooShort => config("budgets", e.to_string()),
            JointError::IncompleteTable { .. } => CliError::Incomplete(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub workers: usize,
    pub cache_hits: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub machine_version: String,
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub provenance: Provenance,
}

impl Report {
    /// The deterministic part, serialized exactly as in the document.
    pub fn results_text(&self) -> String {
        serde_json::to_string_pretty(&self.results).expect("json")
    }

    pub fn to_doc(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("json");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "# klab {} ({}), machine {}\n# workers {}, cache hits {}, timestamp {}\n",
            self.command,
            self.schema_version,
            self.machine_version,
            self.provenance.workers,
            self.provenance.cache_hits,
            self.provenance.timestamp
        );
        out.push_str("\n[parameters]\n");
        render(&self.parameters, "", &mut out);
        out.push_str("\n[results]\n");
        render(&self.results, "", &mut out);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(if s.is_empty() { "ε".into() } else { s.clone() }),
        _ => None,
    }
}

/// Scalars as `key: value`, arrays of flat records as aligned columns,
/// anything else recursively with dotted keys.
fn render(v: &Value, prefix: &str, out: &mut String) {
    let Value::Object(map) = v else {
        out.push_str(&format!("{prefix}: {}\n", scalar(v).unwrap_or_else(|| v.to_string())));
        return;
    };
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(_) => render(v, &key, out),
            Value::Array(rows) if rows.iter().all(Value::is_object) && !rows.is_empty() => {
                render_rows(&key, rows, out)
            }
            Value::Array(items) => {
                let cells: Vec<String> =
                    items.iter().map(|x| scalar(x).unwrap_or_else(|| x.to_string())).collect();
                out.push_str(&format!("{key}: [{}]\n", cells.join(", ")));
            }
            _ => out.push_str(&format!("{key}: {}\n", scalar(v).unwrap())),
        }
    }
}

fn render_rows(key: &str, rows: &[Value], out: &mut String) {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.as_object().unwrap().keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| match r.get(c) {
                    None => String::new(),
                    Some(x) => scalar(x).unwrap_or_else(|| x.to_string()),
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap())
        .collect();
    let line = |vals: &[String]| {
        let padded: Vec<String> = vals
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:>w$}", w = *w))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    out.push_str(&format!("\n[{key}]\n"));
    out.push_str(&line(&cols));
    for r in &cells {
        out.push_str(&line(r));
    }
    out.push('\n');
}

struct Ctx<'a> {
    common: &'a Common,
    workers: usize,
    cache_hits: u64,
}

impl Ctx<'_> {
    fn progress(&self, msg: &str) {
        if !self.common.quiet {
            eprintln!("klab: {msg}");
        }
    }

    fn opts(&self) -> SearchOptions {
        SearchOptions::default().with_workers(self.workers)
    }
}

/// Parse, run, write; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((_, path)) => {
            if !cli.common.quiet {
                eprintln!("klab: wrote {}", path.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("klab: error: {e}");
            e.exit_code()
        }
    }
}

/// Run the command and write its report; returns the report and its path.
pub fn execute(cli: &Cli) -> Result<(Report, PathBuf), CliError> {
    let report = run(cli)?;
    let dir = &cli.common.out_dir;
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    let (name, body) = match cli.common.format {
        Format::Doc => (format!("{}.json", report.command), report.to_doc()),
        Format::Table => (format!("{}.txt", report.command), report.to_table()),
    };
    let path = dir.join(name);
    fs::write(&path, body).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok((report, path))
}

/// Validate and run the command without writing the report (cache and
/// export files are still written under the output directory).
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let workers = match cli.common.workers {
        Some(0) => return Err(config("workers", "must be at least 1")),
        Some(w) => w,
        None => SearchOptions::default().workers,
    };
    let mut ctx = Ctx { common: &cli.common, workers, cache_hits: 0 };
    let (command, parameters, results) = match &cli.command {
        Command::Ktable(a) => ("ktable", serde_json::to_value(ktable_params(a)?).unwrap(), cmd_ktable(&mut ctx, a)?),
        Command::Counting(a) => ("counting", counting_params(a)?, cmd_counting(&ctx, a)),
        Command::Paradox(a) => ("paradox", paradox_params(a)?, cmd_paradox(&ctx, a)?),
        Command::Subadd(a) => ("subadd", subadd_params(a)?, cmd_subadd(&ctx, a)?),
        Command::Champernowne(a) => ("champernowne", champernowne_params(a)?, cmd_champernowne(&ctx, a)?),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION.into(),
        machine_version: MACHINE_VERSION.into(),
        command: command.into(),
        parameters,
        results,
        provenance: Provenance {
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            workers,
            cache_hits: ctx.cache_hits,
        },
    })
}

fn check_budgets(budgets: &[u64], min_len: usize) -> Result<(), CliError> {
    if budgets.len() < min_len {
        return Err(config("budgets", format!("need at least {min_len}")));
    }
    if budgets.contains(&0) {
        return Err(config("budgets", "must be positive"));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config("budgets", "must be strictly ascending"));
    }
    Ok(())
}

fn check_program_bits(bits: usize, max: usize) -> Result<(), CliError> {
    if !(3..=max).contains(&bits) {
        return Err(config("max_program_bits", format!("must be in 3..={max}")));
    }
    Ok(())
}

// ---- ktable ----

#[derive(Serialize)]
struct KtableParams {
    max_program_bits: usize,
    budgets: Vec<u64>,
    input: BitString,
    output_cap: u32,
    require_converged: bool,
}

fn ktable_params(a: &KtableArgs) -> Result<KtableParams, CliError> {
    check_program_bits(a.max_program_bits, 48)?;
    check_budgets(&a.budgets, 1)?;
    if !(1..=64).contains(&a.output_cap) {
        return Err(config("output_cap", "must be in 1..=64"));
    }
    let input: BitString = a.input.parse().map_err(|e| config("input", format!("{e}")))?;
    Ok(KtableParams {
        max_program_bits: a.max_program_bits,
        budgets: a.budgets.clone(),
        input,
        output_cap: a.output_cap,
        require_converged: a.require_converged,
    })
}

fn cache_path(ctx: &Ctx) -> Option<PathBuf> {
    ctx.common.cache.as_ref().map(|p| {
        if p.is_absolute() {
            p.clone()
        } else {
            ctx.common.out_dir.join(p)
        }
    })
}

fn load_or_build(ctx: &mut Ctx, p: &KtableParams) -> Result<KTable, CliError> {
    let header = CacheHeader::new(p.max_program_bits, &p.budgets, p.output_cap, &p.input);
    let path = cache_path(ctx);
    if let Some(path) = path.as_deref().filter(|p| p.exists()) {
        let table = searcher::read_cache(path, &header)
            .map_err(|source| CliError::Cache { path: path.to_path_buf(), source })?;
        ctx.cache_hits += 1;
        ctx.progress(&format!("served from cache {}", path.display()));
        return Ok(table);
    }
    ctx.progress(&format!(
        "searching programs up to {} bits, budgets {:?}, {} workers",
        p.max_program_bits, p.budgets, ctx.workers
    ));
    let opts = SearchOptions { output_cap: p.output_cap, ..ctx.opts() };
    let table = searcher::budget_sweep_with(p.max_program_bits, &p.budgets, &p.input, opts)
        .pop()
        .expect("one table per budget");
    if let Some(path) = path {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.into(), source })?;
        }
        searcher::write_cache(&path, &header, &table)
            .map_err(|source| CliError::Cache { path: path.clone(), source })?;
        ctx.progress(&format!("cached to {}", path.display()));
    }
    Ok(table)
}

fn cmd_ktable(ctx: &mut Ctx, a: &KtableArgs) -> Result<Value, CliError> {
    let p = ktable_params(a)?;
    let table = load_or_build(ctx, &p)?;
    let unconverged = table.entries.values().filter(|e| !e.converged).count();
    if p.require_converged && unconverged > 0 {
        return Err(CliError::Incomplete(format!(
            "{unconverged} of {} entries changed across the last budget step",
            table.len()
        )));
    }
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|(s, e)| {
            json!({
                "output": s.to_string(),
                "k_hat": e.min_bits,
                "witness": e.witness.to_string(),
                "witness_encoding_hex": e.witness.encoding_hex(),
                "steps": e.steps,
                "converged": e.converged,
            })
        })
        .collect();
    Ok(json!({
        "complexity_label": format!("K̂ relative to reference machine {MACHINE_VERSION}"),
        "input": p.input.to_string(),
        "outputs": table.len(),
        "unconverged": unconverged,
        "pigeonhole": pigeonhole_rows(&table),
        "entries": entries,
    }))
}

/// For each program length L: distinct outputs with K̂ ≤ L, valid programs
/// of ≤ L bits, and all binary strings of length 1..=L.
pub fn pigeonhole_rows(table: &KTable) -> Vec<Value> {
    (3..=table.max_program_bits)
        .step_by(3)
        .map(|l| {
            let outputs = table.outputs_within(l);
            let programs = searcher::valid_programs_up_to(l);
            let raw = searcher::strings_up_to(l as u64);
            json!({
                "L": l,
                "outputs_within": outputs,
                "valid_programs": programs.to_string(),
                "raw_strings": raw.to_string(),
                "holds": num_bigint::BigUint::from(outputs) <= programs
                    && num_bigint::BigInt::from(programs.clone()) <= raw,
            })
        })
        .collect()
}

// ---- counting ----

fn counting_params(a: &CountingArgs) -> Result<Value, CliError> {
    if a.n.is_empty() || a.n.contains(&0) {
        return Err(config("N", "need one or more values ≥ 1"));
    }
    if a.n.iter().any(|&n| n > 1 << 24) {
        return Err(config("N", "values above 2^24 are out of range"));
    }
    if a.k.is_empty() || a.k.iter().any(|&k| k > 1 << 20) {
        return Err(config("k", "need one or more values ≤ 2^20"));
    }
    if a.materialize_up_to > 20 {
        return Err(config("materialize_up_to", "lists beyond N = 20 are too large"));
    }
    Ok(json!({ "N": a.n, "k": a.k, "materialize_up_to": a.materialize_up_to }))
}

fn cmd_counting(ctx: &Ctx, a: &CountingArgs) -> Value {
    let mut rows = Vec::new();
    for &n in &a.n {
        for &k in &a.k {
            rows.push(serde_json::to_value(counting_formulas(n, k)).unwrap());
        }
    }
    let thresholds: Vec<Value> = a
        .k
        .iter()
        .map(|&k| json!({ "k": k, "threshold_N": paradox_threshold(k) }))
        .collect();
    ctx.progress(&format!("materializing lists up to N = {}", a.materialize_up_to));
    let materialized: Vec<Value> = (1..=a.materialize_up_to)
        .map(|n| {
            let list = paradox::generate_list(n).expect("small N");
            let expected = searcher::strings_up_to(n);
            json!({
                "N": n,
                "materialized": list.items.len(),
                "formula": expected.to_string(),
                "equal": num_bigint::BigInt::from(list.items.len()) == expected,
            })
        })
        .collect();
    json!({ "rows": rows, "thresholds": thresholds, "materialized": materialized })
}

// ---- paradox ----

fn paradox_params(a: &ParadoxArgs) -> Result<Value, CliError> {
    if a.n == 0 || a.n > 1 << 30 {
        return Err(config("N", "must be in 1..=2^30"));
    }
    if a.verify_up_to > 8 {
        return Err(config("verify_up_to", "generator runs beyond N = 8 are out of range"));
    }
    if a.verify_budget == 0 {
        return Err(config("verify_budget", "must be positive"));
    }
    Ok(json!({ "N": a.n, "verify_up_to": a.verify_up_to, "verify_budget": a.verify_budget }))
}

fn cmd_paradox(ctx: &Ctx, a: &ParadoxArgs) -> Result<Value, CliError> {
    let report = paradox::paradox_report(a.n);
    let account = paradox::generator_program(a.n);
    let check = if a.n <= a.verify_up_to {
        ctx.progress(&format!("running the generator for N = {}", a.n));
        let c = paradox::verify_generator(a.n, a.verify_budget).map_err(|e| config("N", e.to_string()))?;
        serde_json::to_value(c).unwrap()
    } else {
        Value::Null
    };
    Ok(json!({
        "report": report,
        "generator": {
            "program_bits": account.total_bits,
            "n_bits": account.n_bits,
            "identity_holds": account.identity_holds(),
            "encoding_hex": account.program.encoding_hex(),
        },
        "generator_check": check,
        "generator_paradox_threshold": paradox::generator_paradox_threshold(),
    }))
}

// ---- subadd ----

fn subadd_params(a: &SubaddArgs) -> Result<Value, CliError> {
    check_program_bits(a.max_program_bits, 36)?;
    check_budgets(&a.budgets, 2)?;
    if a.n_x > 2 || a.n_y > 2 {
        return Err(config("n_x/n_y", "string lengths above 2 are out of range"));
    }
    if a.chain_n > 3 {
        return Err(config("chain_n", "must be in 0..=3"));
    }
    Ok(json!({
        "n_x": a.n_x,
        "n_y": a.n_y,
        "max_program_bits": a.max_program_bits,
        "budgets": a.budgets,
        "chain_n": a.chain_n,
    }))
}

fn cmd_subadd(ctx: &Ctx, a: &SubaddArgs) -> Result<Value, CliError> {
    let bounds = SearchBounds::new(a.max_program_bits, &a.budgets);
    ctx.progress(&format!(
        "subadditivity over |x| ≤ {}, |y| ≤ {}, {} program bits",
        a.n_x, a.n_y, a.max_program_bits
    ));
    let report = joint::verify_subadditivity_with(a.n_x, a.n_y, &bounds, ctx.opts())?;
    let chain = if a.chain_n > 0 {
        ctx.progress(&format!("chained bound over the list for N = {}", a.chain_n));
        serde_json::to_value(joint::recursive_list_bound_with(a.chain_n, &bounds, ctx.opts())?).unwrap()
    } else {
        Value::Null
    };
    Ok(json!({
        "complexity_label": format!("K̂ relative to reference machine {MACHINE_VERSION}"),
        "subadditivity": report,
        "chain": chain,
    }))
}

// ---- champernowne ----

fn champernowne_params(a: &ChampernowneArgs) -> Result<Value, CliError> {
    if a.n == 0 || a.n > 100_000_000 {
        return Err(config("n", "must be in 1..=10^8"));
    }
    if a.b.is_empty() || a.b.iter().any(|&b| b == 0 || b > 16 || b as u64 > a.n) {
        return Err(config("b", "block sizes must be in 1..=16 and at most n"));
    }
    Ok(json!({
        "variant": format!("{:?}", a.variant),
        "n": a.n,
        "b": a.b,
        "export": a.export,
    }))
}

fn variants(v: VariantArg) -> Vec<Variant> {
    match v {
        VariantArg::AllStrings => vec![Variant::AllStrings],
        VariantArg::Counting => vec![Variant::Counting],
        VariantArg::Both => vec![Variant::AllStrings, Variant::Counting],
    }
}

/// Block counts are listed only up to this block size.
const LISTED_COUNTS_MAX_B: u32 = 8;

fn cmd_champernowne(ctx: &Ctx, a: &ChampernowneArgs) -> Result<Value, CliError> {
    let mut out = Vec::new();
    for variant in variants(a.variant) {
        let spec = SequenceSpec::new(variant, a.n);
        ctx.progress(&format!("{variant:?}: {} bits", a.n));
        let mut blocks = Vec::new();
        let mut compression = Value::Null;
        for &b in &a.b {
            let mut s = serde_json::to_value(champernowne::block_stats_with(spec, b, ctx.workers)).unwrap();
            let obj = s.as_object_mut().unwrap();
            obj.remove("spec");
            if b > LISTED_COUNTS_MAX_B {
                obj.remove("counts");
            }
            compression = json!({
                "compressed_bits": obj.remove("compressed_bits"),
                "compression_ratio": obj.remove("compression_ratio"),
                "description_bits": obj.remove("description_bits"),
            });
            blocks.push(s);
        }
        let contrast_b = *a.b.iter().max().unwrap();
        let sweep: Vec<Value> = std::iter::successors(Some(1000u64), |n| n.checked_mul(10))
            .take_while(|&n| n < a.n)
            .chain([a.n])
            .map(|n| {
                let r = champernowne::complexity_contrast(SequenceSpec::new(variant, n), contrast_b.min(n as u32));
                json!({
                    "n": n,
                    "description_bits": r.description_bits,
                    "compressed_bits": r.compressed_bits,
                    "entropy_bits": r.entropy_bits,
                    "description_per_bit": r.description_per_bit,
                    "gap": r.gap,
                    "contrast": r.contrast,
                })
            })
            .collect();
        if a.export {
            let dir = &ctx.common.out_dir;
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            let path = dir.join(export_name(spec));
            fs::write(&path, champernowne::export_packed(spec))
                .map_err(|source| CliError::Io { path: path.clone(), source })?;
        }
        out.push(json!({
            "variant": format!("{variant:?}"),
            "n": a.n,
            "prefix_head": champernowne::sequence_prefix(SequenceSpec::new(variant, a.n.min(64))).to_string(),
            "blocks": blocks,
            "compression": compression,
            "contrast_b": contrast_b,
            "contrast_sweep": sweep,
            "export_file": if a.export { Value::from(export_name(spec)) } else { Value::Null },
        }));
    }
    Ok(json!({ "sequences": out }))
}

fn export_name(spec: SequenceSpec) -> String {
    let v = match spec.variant {
        Variant::AllStrings => "all-strings",
        Variant::Counting => "counting",
    };
    format!("{v}-{}.bits", spec.n)
}

/// Path of the report file a run with `cli` writes.
pub fn report_path(cli: &Cli, command: &str) -> PathBuf {
    let ext = match cli.common.format {
        Format::Doc => "json",
        Format::Table => "txt",
    };
    Path::new(&cli.common.out_dir).join(format!("{command}.{ext}"))
}
