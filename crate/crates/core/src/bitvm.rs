//! The reference machine: eight opcodes over a two-way infinite tape of bit
//! cells, a read-only input bit stream and a write-only output bit stream.
//!
//! Programs are sequences of 3-bit codes terminated by a single `END`, which
//! makes the set of valid encodings prefix-free. Every complexity value in
//! this crate is measured against this machine (`MACHINE_VERSION`).

use std::fmt;

use crate::bits::BitString;

pub const MACHINE_VERSION: &str = "bitvm-v1";

/// The bit-exact opcode table, in code order.
pub const OPCODE_TABLE: &str =
    "000=L,001=R,010=F,011=O,100=I,101=LOOP_OPEN,110=LOOP_CLOSE,111=END";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Opcode {
    Left = 0,
    Right = 1,
    Flip = 2,
    Out = 3,
    In = 4,
    LoopOpen = 5,
    LoopClose = 6,
    End = 7,
}

impl Opcode {
    pub const ALL: [Opcode; 8] = [
        Opcode::Left,
        Opcode::Right,
        Opcode::Flip,
        Opcode::Out,
        Opcode::In,
        Opcode::LoopOpen,
        Opcode::LoopClose,
        Opcode::End,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Opcode {
        Opcode::ALL[(code & 7) as usize]
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Left => "L",
            Opcode::Right => "R",
            Opcode::Flip => "F",
            Opcode::Out => "O",
            Opcode::In => "I",
            Opcode::LoopOpen => "[",
            Opcode::LoopClose => "]",
            Opcode::End => "END",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Opcode> {
        Some(match s {
            "L" => Opcode::Left,
            "R" => Opcode::Right,
            "F" => Opcode::Flip,
            "O" => Opcode::Out,
            "I" => Opcode::In,
            "[" | "LOOP_OPEN" => Opcode::LoopOpen,
            "]" | "LOOP_CLOSE" => Opcode::LoopClose,
            "END" => Opcode::End,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("bit length {0} is not a multiple of three")]
    NotMultipleOfThree(usize),
    #[error("program must end with exactly one END, as its last opcode")]
    NoTerminalEnd,
    #[error("loop brackets are unbalanced")]
    UnbalancedLoops,
    #[error("unknown mnemonic {0:?}")]
    UnknownMnemonic(String),
    #[error("malformed hex encoding")]
    BadHex,
}

/// A validated program: balanced loops, END last and only last.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Program {
    ops: Vec<Opcode>,
}

impl Program {
    /// Validate an opcode sequence that includes its terminal END.
    pub fn new(ops: Vec<Opcode>) -> Result<Program, DecodeError> {
        match ops.iter().position(|&op| op == Opcode::End) {
            Some(i) if i + 1 == ops.len() => {}
            _ => return Err(DecodeError::NoTerminalEnd),
        }
        let mut depth = 0usize;
        for &op in &ops {
            match op {
                Opcode::LoopOpen => depth += 1,
                Opcode::LoopClose => {
                    depth = depth.checked_sub(1).ok_or(DecodeError::UnbalancedLoops)?
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(DecodeError::UnbalancedLoops);
        }
        Ok(Program { ops })
    }

    /// Body opcodes followed by an appended END.
    pub fn from_body(body: &[Opcode]) -> Result<Program, DecodeError> {
        let mut ops = body.to_vec();
        ops.push(Opcode::End);
        Program::new(ops)
    }

    /// Whitespace-separated mnemonics; `#` starts a comment.
    pub fn parse_asm(text: &str) -> Result<Program, DecodeError> {
        let ops = assemble(text)?;
        Program::new(ops)
    }

    pub(crate) fn from_ops_unchecked(ops: Vec<Opcode>) -> Program {
        debug_assert!(Program::new(ops.clone()).is_ok());
        Program { ops }
    }

    pub fn ops(&self) -> &[Opcode] {
        &self.ops
    }

    pub fn body(&self) -> &[Opcode] {
        &self.ops[..self.ops.len() - 1]
    }

    pub fn bit_length(&self) -> usize {
        program_bit_length(self)
    }

    pub fn encode(&self) -> BitString {
        let mut out = BitString::new();
        for op in &self.ops {
            let c = op.code();
            out.push(c & 4 != 0);
            out.push(c & 2 != 0);
            out.push(c & 1 != 0);
        }
        out
    }

    pub fn encoding_hex(&self) -> String {
        hex::encode(self.encode().to_packed())
    }

    pub fn from_encoding_hex(hex_str: &str, bit_len: usize) -> Result<Program, DecodeError> {
        let bytes = hex::decode(hex_str).map_err(|_| DecodeError::BadHex)?;
        let bits = BitString::from_packed(&bytes, bit_len)
            .ok_or(DecodeError::NotMultipleOfThree(bit_len))?;
        decode_program(&bits)
    }

    /// Position of each loop bracket's partner; zero for other opcodes.
    pub fn jump_table(&self) -> Vec<u32> {
        jump_table(&self.ops)
    }
}

impl PartialOrd for Program {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by bit length, then by the numeric value of the encoding.
impl Ord for Program {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ops
            .len()
            .cmp(&other.ops.len())
            .then_with(|| self.ops.cmp(&other.ops))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(op.mnemonic())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Program[{}]", self)
    }
}

pub(crate) fn assemble(text: &str) -> Result<Vec<Opcode>, DecodeError> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|tok| Opcode::from_mnemonic(tok).ok_or_else(|| DecodeError::UnknownMnemonic(tok.into())))
        .collect()
}

pub fn decode_program(bits: &BitString) -> Result<Program, DecodeError> {
    if !bits.len().is_multiple_of(3) {
        return Err(DecodeError::NotMultipleOfThree(bits.len()));
    }
    let ops = bits
        .as_slice()
        .chunks(3)
        .map(|c| Opcode::from_code(((c[0] as u8) << 2) | ((c[1] as u8) << 1) | c[2] as u8))
        .collect();
    Program::new(ops)
}

pub fn program_bit_length(p: &Program) -> usize {
    3 * p.ops.len()
}

pub(crate) fn jump_table(ops: &[Opcode]) -> Vec<u32> {
    let mut jumps = vec![0u32; ops.len()];
    let mut stack = Vec::new();
    for (i, &op) in ops.iter().enumerate() {
        match op {
            Opcode::LoopOpen => stack.push(i),
            Opcode::LoopClose => {
                let open = stack.pop().expect("validated program");
                jumps[open] = i as u32;
                jumps[i] = open as u32;
            }
            _ => {}
        }
    }
    jumps
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineConfig {
    pub step_budget: u64,
    pub input: BitString,
}

impl MachineConfig {
    pub fn new(step_budget: u64) -> Self {
        assert!(step_budget >= 1, "step budget must be at least 1");
        MachineConfig {
            step_budget,
            input: BitString::new(),
        }
    }

    pub fn with_input(mut self, input: BitString) -> Self {
        self.input = input;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum OutcomeKind {
    Halted,
    BudgetExceeded,
    InputExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecOutcome {
    pub kind: OutcomeKind,
    pub output: Option<BitString>,
    pub steps_used: u64,
}

impl ExecOutcome {
    pub fn halted_output(&self) -> Option<&BitString> {
        self.output.as_ref()
    }
}

/// Run `p` under `cfg`. Deterministic; never panics on valid programs.
pub fn run(p: &Program, cfg: &MachineConfig) -> ExecOutcome {
    let mut runner = Runner::new();
    let jumps = p.jump_table();
    let mut sink = VecSink(Vec::new());
    let (status, steps) = runner.execute(&p.ops, &jumps, cfg.input.as_slice(), cfg.step_budget, &mut sink);
    match status {
        Status::Halted => ExecOutcome {
            kind: OutcomeKind::Halted,
            output: Some(BitString::from_bools(sink.0)),
            steps_used: steps,
        },
        Status::BudgetExceeded => ExecOutcome {
            kind: OutcomeKind::BudgetExceeded,
            output: None,
            steps_used: steps,
        },
        Status::InputExhausted => ExecOutcome {
            kind: OutcomeKind::InputExhausted,
            output: None,
            steps_used: steps,
        },
        Status::SinkFull => unreachable!("vector sink never fills"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Status {
    Halted,
    BudgetExceeded,
    InputExhausted,
    SinkFull,
}

pub(crate) trait OutputSink {
    /// Returns false when the sink refuses more output.
    fn push(&mut self, bit: bool) -> bool;
}

struct VecSink(Vec<bool>);

impl OutputSink for VecSink {
    #[inline]
    fn push(&mut self, bit: bool) -> bool {
        self.0.push(bit);
        true
    }
}

/// Output packed into a u64, refusing anything beyond `cap` bits (cap ≤ 64).
pub(crate) struct PackedSink {
    pub value: u64,
    pub len: u32,
    pub cap: u32,
}

impl PackedSink {
    pub fn new(cap: u32) -> Self {
        debug_assert!(cap <= 64);
        PackedSink { value: 0, len: 0, cap }
    }
}

impl OutputSink for PackedSink {
    #[inline]
    fn push(&mut self, bit: bool) -> bool {
        if self.len == self.cap {
            return false;
        }
        self.value = (self.value << 1) | bit as u64;
        self.len += 1;
        true
    }
}

const NO_VISIT: u64 = u64::MAX;

/// Reusable interpreter state, so exhaustive scans avoid per-run allocation.
pub(crate) struct Runner {
    tape: Vec<u8>,
    visits: Vec<(u64, usize)>,
}

impl Runner {
    pub fn new() -> Self {
        Runner {
            tape: Vec::new(),
            visits: Vec::new(),
        }
    }

    /// Core interpreter loop.
    ///
    /// A backward jump that finds the machine at the same `]` with the same
    /// head position and no flip or input since its previous visit there has
    /// reached a state it has already been in, so it can never halt; that run
    /// is reported exactly as an exhausted budget would report it.
    pub fn execute<S: OutputSink>(
        &mut self,
        ops: &[Opcode],
        jumps: &[u32],
        input: &[bool],
        budget: u64,
        sink: &mut S,
    ) -> (Status, u64) {
        const INITIAL: usize = 64;
        self.tape.clear();
        self.tape.resize(2 * INITIAL, 0);
        self.visits.clear();
        self.visits.resize(ops.len(), (NO_VISIT, 0));
        let mut head = INITIAL;
        let mut pc = 0usize;
        let mut steps = 0u64;
        let mut mutations = 0u64;
        let mut next_input = 0usize;

        loop {
            if steps == budget {
                return (Status::BudgetExceeded, budget);
            }
            steps += 1;
            match ops[pc] {
                Opcode::Left => {
                    if head == 0 {
                        head = self.grow_left();
                    }
                    head -= 1;
                }
                Opcode::Right => {
                    head += 1;
                    if head == self.tape.len() {
                        let n = self.tape.len();
                        self.tape.resize(2 * n, 0);
                    }
                }
                Opcode::Flip => {
                    self.tape[head] ^= 1;
                    mutations += 1;
                }
                Opcode::Out => {
                    if !sink.push(self.tape[head] == 1) {
                        return (Status::SinkFull, steps);
                    }
                }
                Opcode::In => {
                    match input.get(next_input) {
                        Some(&b) => self.tape[head] = b as u8,
                        None => return (Status::InputExhausted, steps),
                    }
                    next_input += 1;
                    mutations += 1;
                }
                Opcode::LoopOpen => {
                    if self.tape[head] == 0 {
                        pc = jumps[pc] as usize;
                    }
                }
                Opcode::LoopClose => {
                    if self.tape[head] == 1 {
                        let seen = &mut self.visits[pc];
                        if seen.0 == mutations && seen.1 == head {
                            return (Status::BudgetExceeded, budget);
                        }
                        *seen = (mutations, head);
                        pc = jumps[pc] as usize;
                    }
                }
                Opcode::End => return (Status::Halted, steps),
            }
            pc += 1;
        }
    }

    /// Double the tape, keeping content at the right half. Returns the new
    /// index of the old cell 0.
    #[cold]
    fn grow_left(&mut self) -> usize {
        let n = self.tape.len();
        let mut grown = vec![0u8; 2 * n];
        grown[n..].copy_from_slice(&self.tape);
        self.tape = grown;
        // head positions recorded for cycle detection shift with the tape
        for v in self.visits.iter_mut() {
            v.1 += n;
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use Opcode::*;

    fn prog(body: &[Opcode]) -> Program {
        Program::from_body(body).unwrap()
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_program(&bits("111")).unwrap().ops(), &[End]);
        let p = decode_program(&bits("011111")).unwrap();
        assert_eq!(p.ops(), &[Out, End]);
        assert_eq!(p.bit_length(), 6);
        assert_eq!(decode_program(&bits("101111")), Err(DecodeError::UnbalancedLoops));
    }

    #[test]
    fn decode_errors() {
        assert_eq!(decode_program(&bits("11")), Err(DecodeError::NotMultipleOfThree(2)));
        assert_eq!(decode_program(&bits("")), Err(DecodeError::NoTerminalEnd));
        assert_eq!(decode_program(&bits("011")), Err(DecodeError::NoTerminalEnd));
        assert_eq!(decode_program(&bits("111011111")), Err(DecodeError::NoTerminalEnd));
        assert_eq!(decode_program(&bits("110101111")), Err(DecodeError::UnbalancedLoops));
    }

    #[test]
    fn bit_lengths() {
        assert_eq!(prog(&[]).bit_length(), 3);
        assert_eq!(prog(&[Out]).bit_length(), 6);
        assert_eq!(prog(&[Flip, Out, Flip, Out]).bit_length(), 15);
    }

    #[test]
    fn run_examples() {
        let out = run(&prog(&[Out]), &MachineConfig::new(10));
        assert_eq!(out.kind, OutcomeKind::Halted);
        assert_eq!(out.output, Some(bits("0")));
        assert_eq!(out.steps_used, 2);

        let out = run(&prog(&[Flip, Out]), &MachineConfig::new(10));
        assert_eq!(out.output, Some(bits("1")));

        let out = run(&prog(&[Flip, LoopOpen, LoopClose]), &MachineConfig::new(100));
        assert_eq!(out.kind, OutcomeKind::BudgetExceeded);
        assert_eq!(out.output, None);
        assert_eq!(out.steps_used, 100);

        let cfg = MachineConfig::new(10).with_input(bits("1"));
        assert_eq!(run(&prog(&[In, Out]), &cfg).output, Some(bits("1")));
    }

    #[test]
    fn input_exhaustion_is_distinct() {
        let out = run(&prog(&[In, Out]), &MachineConfig::new(10));
        assert_eq!(out.kind, OutcomeKind::InputExhausted);
        assert_eq!(out.steps_used, 1);
        assert!(out.output.is_none());
    }

    #[test]
    fn budget_counts_every_opcode() {
        // [ with cell 0 jumps past its partner: two steps in total
        let p = prog(&[LoopOpen, LoopClose]);
        assert_eq!(run(&p, &MachineConfig::new(2)).kind, OutcomeKind::Halted);
        assert_eq!(run(&p, &MachineConfig::new(2)).steps_used, 2);
        assert_eq!(run(&p, &MachineConfig::new(1)).kind, OutcomeKind::BudgetExceeded);
    }

    #[test]
    fn loops_move_over_tape() {
        // set three cells, walk back over them, print the blank to the left
        let p = Program::parse_asm("F R F R F [ L ] O F O END").unwrap();
        let out = run(&p, &MachineConfig::new(100));
        assert_eq!(out.output, Some(bits("01")));
    }

    #[test]
    fn tape_grows_both_ways() {
        // walk 200 cells left flipping, then 300 right, then print
        let mut body = vec![];
        for _ in 0..200 {
            body.extend([Left, Flip]);
        }
        body.extend([Out, LoopOpen, Right, LoopClose]);
        for _ in 0..300 {
            body.push(Right);
        }
        body.push(Out);
        let out = run(&prog(&body), &MachineConfig::new(10_000));
        assert_eq!(out.output, Some(bits("10")));
    }

    #[test]
    fn cycle_shortcut_matches_plain_budget_exhaustion() {
        for asm in ["F [ ] END", "F [ L R ] END", "F [ O ] END", "F [ R L O ] END", "F [ [ ] ] END"] {
            let p = Program::parse_asm(asm).unwrap();
            for budget in [1, 2, 3, 7, 50, 1000] {
                let out = run(&p, &MachineConfig::new(budget));
                assert_eq!(out.kind, OutcomeKind::BudgetExceeded, "{asm}");
                assert_eq!(out.steps_used, budget);
            }
        }
    }

    #[test]
    fn mnemonic_round_trip() {
        for op in Opcode::ALL {
            assert_eq!(Opcode::from_mnemonic(op.mnemonic()), Some(op));
            assert_eq!(Opcode::from_code(op.code()), op);
        }
    }
}
