//! On-disk KTable cache.
//!
//! Line 1 is a JSON header; every following line is one JSON entry record,
//! ordered by output key (length, then value). A cache is reused only when
//! its header equals the requested one field for field.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{KEntry, KTable};
use crate::bits::BitString;
use crate::bitvm::{Program, MACHINE_VERSION, OPCODE_TABLE};

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format_version: u32,
    pub machine_version: String,
    pub opcode_table_hash: String,
    pub max_program_bits: usize,
    pub budget: u64,
    pub output_cap: u32,
    pub input_bits: BitString,
    /// Budgets of the sweep that produced the converged flags.
    pub sweep_budgets: Vec<u64>,
}

impl CacheHeader {
    pub fn new(max_program_bits: usize, sweep_budgets: &[u64], output_cap: u32, input: &BitString) -> Self {
        CacheHeader {
            format_version: CACHE_FORMAT_VERSION,
            machine_version: MACHINE_VERSION.to_string(),
            opcode_table_hash: opcode_table_hash(),
            max_program_bits,
            budget: *sweep_budgets.last().expect("at least one budget"),
            output_cap,
            input_bits: input.clone(),
            sweep_budgets: sweep_budgets.to_vec(),
        }
    }

    /// First field that differs from `other`, if any.
    fn mismatch(&self, other: &CacheHeader) -> Option<&'static str> {
        if self.format_version != other.format_version {
            Some("format_version")
        } else if self.machine_version != other.machine_version {
            Some("machine_version")
        } else if self.opcode_table_hash != other.opcode_table_hash {
            Some("opcode_table_hash")
        } else if self.max_program_bits != other.max_program_bits {
            Some("max_program_bits")
        } else if self.budget != other.budget {
            Some("budget")
        } else if self.output_cap != other.output_cap {
            Some("output_cap")
        } else if self.input_bits != other.input_bits {
            Some("input_bits")
        } else if self.sweep_budgets != other.sweep_budgets {
            Some("sweep_budgets")
        } else {
            None
        }
    }
}

pub fn opcode_table_hash() -> String {
    hex::encode(Sha256::digest(OPCODE_TABLE.as_bytes()))
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    output_bits: BitString,
    min_bits: usize,
    witness_encoding_hex: String,
    steps: u64,
    converged_flag: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("cache header mismatch on field `{0}`")]
    HeaderMismatch(&'static str),
}

pub fn write_cache(path: &Path, header: &CacheHeader, table: &KTable) -> Result<(), CacheError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer(&mut w, header).map_err(std::io::Error::from)?;
    writeln!(w)?;
    for (s, e) in &table.entries {
        let rec = EntryRecord {
            output_bits: s.clone(),
            min_bits: e.min_bits,
            witness_encoding_hex: e.witness.encoding_hex(),
            steps: e.steps,
            converged_flag: e.converged,
        };
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Load a cache, refusing it unless its header equals `expected`.
pub fn read_cache(path: &Path, expected: &CacheHeader) -> Result<KTable, CacheError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = reader.lines();
    let malformed = |line: usize, msg: String| CacheError::Malformed { line, msg };

    let first = lines.next().ok_or_else(|| malformed(1, "empty file".into()))??;
    let header: CacheHeader =
        serde_json::from_str(&first).map_err(|e| malformed(1, e.to_string()))?;
    if let Some(field) = header.mismatch(expected) {
        return Err(CacheError::HeaderMismatch(field));
    }

    let mut entries = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let n = i + 2;
        let rec: EntryRecord = serde_json::from_str(&line).map_err(|e| malformed(n, e.to_string()))?;
        let witness = Program::from_encoding_hex(&rec.witness_encoding_hex, rec.min_bits)
            .map_err(|e| malformed(n, e.to_string()))?;
        entries.insert(
            rec.output_bits,
            KEntry {
                min_bits: rec.min_bits,
                witness,
                steps: rec.steps,
                converged: rec.converged_flag,
            },
        );
    }
    Ok(KTable {
        entries,
        max_program_bits: header.max_program_bits,
        budget: header.budget,
        output_cap: header.output_cap,
        input: header.input_bits,
        machine_version: header.machine_version,
    })
}
