//! Word RAM / real RAM programs: parsing, execution, cost accounting, and
//! the division-elimination transformation.
//!
//! A program is a finite list of instructions over two sparse register files:
//! word registers `M[i]` holding unbounded integers and real registers `R[i]`
//! holding exact rationals. Unwritten cells read as 0. Jump targets in the
//! assembly are 1-based instruction numbers.

mod nodiv;
mod parse;
mod run;

pub use nodiv::eliminate_division;
pub use parse::{parse_program, ParseError};
pub use run::run;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exactnum::{BigInt, Rational};

/// Unit-cost step counters, one per instruction class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CostMeter {
    pub word_ops: u64,
    pub real_ops: u64,
    pub floor_ops: u64,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.word_ops + self.real_ops + self.floor_ops
    }
}

/// Word operand: a register, or the register a register points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordRef {
    Direct(usize),
    Indirect(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    fn symbol(self) -> char {
        match self {
            ArithOp::Add => '+',
            ArithOp::Sub => '-',
            ArithOp::Mul => '*',
            ArithOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Gt,
}

/// Word arithmetic and comparison operand: a register access or an integer
/// literal (the listings in use mix both).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordOperand {
    Ref(WordRef),
    Const(BigInt),
}

/// What a `RETURN` yields: a word value or the `NO` sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReturnSource {
    Word(WordRef),
    No,
}

/// Where a conditional branch goes when it fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchAction {
    Goto(usize),
    Return(ReturnSource),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    WordAssign { dst: WordRef, value: BigInt },
    WordCopy { dst: WordRef, src: WordRef },
    WordArith { dst: WordRef, op: ArithOp, lhs: WordOperand, rhs: WordOperand },
    /// `R[dst] <- 0|1`; 0 and 1 are the only real constants.
    RealAssign { dst: usize, one: bool },
    RealCopy { dst: usize, src: usize },
    RealArith { dst: usize, op: ArithOp, lhs: usize, rhs: usize },
    /// `IFEQ`/`IFGT` on two word operands.
    CompareJump { cmp: Cmp, lhs: WordOperand, rhs: WordOperand, action: BranchAction },
    /// `IFPOS R[reg]`: the real sign test `R > 0`.
    SignJump { reg: usize, action: BranchAction },
    Goto { target: usize },
    /// `FLOOR R[src] -> M[dst]`, gated by [`ProgramFlags::floor_enabled`].
    Floor { src: usize, dst: WordRef },
    Accept,
    Reject,
    Return { value: ReturnSource },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProgramFlags {
    pub floor_enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub instructions: Vec<Instruction>,
    pub flags: ProgramFlags,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        Program { instructions, flags: ProgramFlags::default() }
    }

    pub fn with_floor(mut self, enabled: bool) -> Self {
        self.flags.floor_enabled = enabled;
        self
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn uses_floor(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i, Instruction::Floor { .. }))
    }

    pub fn uses_real_division(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i, Instruction::RealArith { op: ArithOp::Div, .. }))
    }
}

/// Registers, program counter and cost counters of one run.
#[derive(Debug, Clone, Default)]
pub struct MachineState {
    pub word_mem: BTreeMap<usize, BigInt>,
    pub real_mem: BTreeMap<usize, Rational>,
    pub pc: usize,
    pub cost: CostMeter,
}

impl MachineState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_word(mut self, addr: usize, value: impl Into<BigInt>) -> Self {
        self.word_mem.insert(addr, value.into());
        self
    }

    pub fn with_real(mut self, addr: usize, value: Rational) -> Self {
        self.real_mem.insert(addr, value);
        self
    }

    pub fn word(&self, addr: usize) -> BigInt {
        self.word_mem.get(&addr).cloned().unwrap_or_default()
    }

    pub fn real(&self, addr: usize) -> Rational {
        self.real_mem.get(&addr).cloned().unwrap_or_default()
    }
}

/// Runtime faults. These are outcomes, not panics: the machine stops and
/// reports where it stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("word division by zero at instruction {line}")]
    WordDivisionByZero { line: usize },
    #[error("real division by zero at instruction {line}")]
    RealDivisionByZero { line: usize },
    #[error("floor instruction at {line} but floor is not enabled")]
    FloorDisabled { line: usize },
    #[error("indirect access through a non-address value at instruction {line}")]
    BadAddress { line: usize },
    #[error("program counter ran past the last instruction")]
    PcOutOfRange,
}

/// Final value of a `RETURN`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Word(BigInt),
    No,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Word(n) => write!(f, "{n}"),
            Value::No => write!(f, "NO"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Reject,
    Return(Value),
    OutOfFuel,
    Fault(Fault),
}

impl Outcome {
    /// Accept/Reject as a boolean; None for anything else.
    pub fn decision(&self) -> Option<bool> {
        match self {
            Outcome::Accept => Some(true),
            Outcome::Reject => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Accept => write!(f, "ACCEPT"),
            Outcome::Reject => write!(f, "REJECT"),
            Outcome::Return(v) => write!(f, "RETURN {v}"),
            Outcome::OutOfFuel => write!(f, "OUT-OF-FUEL"),
            Outcome::Fault(fault) => write!(f, "FAULT: {fault}"),
        }
    }
}

impl fmt::Display for WordRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordRef::Direct(i) => write!(f, "M[{i}]"),
            WordRef::Indirect(i) => write!(f, "M[M[{i}]]"),
        }
    }
}

impl fmt::Display for WordOperand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordOperand::Ref(r) => write!(f, "{r}"),
            WordOperand::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for ReturnSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReturnSource::Word(r) => write!(f, "RETURN {r}"),
            ReturnSource::No => write!(f, "RETURN NO"),
        }
    }
}

impl fmt::Display for BranchAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchAction::Goto(t) => write!(f, "GOTO {}", t + 1),
            BranchAction::Return(src) => write!(f, "{src}"),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::WordAssign { dst, value } => write!(f, "{dst} <- {value}"),
            Instruction::WordCopy { dst, src } => write!(f, "{dst} <- {src}"),
            Instruction::WordArith { dst, op, lhs, rhs } => {
                write!(f, "{dst} <- {lhs} {} {rhs}", op.symbol())
            }
            Instruction::RealAssign { dst, one } => {
                write!(f, "R[{dst}] <- {}", if *one { 1 } else { 0 })
            }
            Instruction::RealCopy { dst, src } => write!(f, "R[{dst}] <- R[{src}]"),
            Instruction::RealArith { dst, op, lhs, rhs } => {
                write!(f, "R[{dst}] <- R[{lhs}] {} R[{rhs}]", op.symbol())
            }
            Instruction::CompareJump { cmp, lhs, rhs, action } => {
                let kw = match cmp {
                    Cmp::Eq => "IFEQ",
                    Cmp::Gt => "IFGT",
                };
                write!(f, "{kw} {lhs} {rhs} {action}")
            }
            Instruction::SignJump { reg, action } => write!(f, "IFPOS R[{reg}] {action}"),
            Instruction::Goto { target } => write!(f, "GOTO {}", target + 1),
            Instruction::Floor { src, dst } => write!(f, "FLOOR R[{src}] -> {dst}"),
            Instruction::Accept => write!(f, "ACCEPT"),
            Instruction::Reject => write!(f, "REJECT"),
            Instruction::Return { value } => write!(f, "{value}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for instr in &self.instructions {
            writeln!(f, "{instr}")?;
        }
        Ok(())
    }
}
