//! The interpreter. Every executed instruction charges exactly one unit to
//! its class counter: word ops (including control flow and halting), real
//! ops (including the sign test), and floor.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{
    ArithOp, BranchAction, Cmp, Fault, Instruction, MachineState, Outcome, Program,
    ReturnSource, Value, WordOperand, WordRef,
};
use crate::exactnum::{BigInt, Rational};

enum Step {
    Next,
    Jump(usize),
    Halt(Outcome),
}

fn read_addr(state: &MachineState, reg: usize, line: usize) -> Result<usize, Fault> {
    state
        .word(reg)
        .to_usize()
        .ok_or(Fault::BadAddress { line })
}

fn resolve(state: &MachineState, r: WordRef, line: usize) -> Result<usize, Fault> {
    match r {
        WordRef::Direct(i) => Ok(i),
        WordRef::Indirect(i) => read_addr(state, i, line),
    }
}

fn read_word(state: &MachineState, r: WordRef, line: usize) -> Result<BigInt, Fault> {
    Ok(state.word(resolve(state, r, line)?))
}

fn read_operand(state: &MachineState, op: &WordOperand, line: usize) -> Result<BigInt, Fault> {
    match op {
        WordOperand::Ref(r) => read_word(state, *r, line),
        WordOperand::Const(c) => Ok(c.clone()),
    }
}

fn write_word(
    state: &mut MachineState,
    r: WordRef,
    value: BigInt,
    line: usize,
) -> Result<(), Fault> {
    let addr = resolve(state, r, line)?;
    state.word_mem.insert(addr, value);
    Ok(())
}

fn word_arith(op: ArithOp, a: BigInt, b: BigInt, line: usize) -> Result<BigInt, Fault> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => {
            if b.is_zero() {
                Err(Fault::WordDivisionByZero { line })
            } else {
                // Word division rounds toward minus infinity, consistent
                // with the floor operation.
                Ok(a.div_floor(&b))
            }
        }
    }
}

fn real_arith(op: ArithOp, a: Rational, b: Rational, line: usize) -> Result<Rational, Fault> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => {
            if b.is_zero() {
                Err(Fault::RealDivisionByZero { line })
            } else {
                Ok(a / b)
            }
        }
    }
}

fn take_branch(state: &MachineState, action: &BranchAction, line: usize) -> Result<Step, Fault> {
    match action {
        BranchAction::Goto(t) => Ok(Step::Jump(*t)),
        BranchAction::Return(src) => Ok(Step::Halt(Outcome::Return(match src {
            ReturnSource::Word(r) => Value::Word(read_word(state, *r, line)?),
            ReturnSource::No => Value::No,
        }))),
    }
}

fn execute(p: &Program, state: &mut MachineState, line: usize) -> Result<Step, Fault> {
    match &p.instructions[line] {
        Instruction::WordAssign { dst, value } => {
            state.cost.word_ops += 1;
            write_word(state, *dst, value.clone(), line)?;
            Ok(Step::Next)
        }
        Instruction::WordCopy { dst, src } => {
            state.cost.word_ops += 1;
            let v = read_word(state, *src, line)?;
            write_word(state, *dst, v, line)?;
            Ok(Step::Next)
        }
        Instruction::WordArith { dst, op, lhs, rhs } => {
            state.cost.word_ops += 1;
            let a = read_operand(state, lhs, line)?;
            let b = read_operand(state, rhs, line)?;
            write_word(state, *dst, word_arith(*op, a, b, line)?, line)?;
            Ok(Step::Next)
        }
        Instruction::RealAssign { dst, one } => {
            state.cost.real_ops += 1;
            let v = if *one { Rational::from_integer(1.into()) } else { Rational::zero() };
            state.real_mem.insert(*dst, v);
            Ok(Step::Next)
        }
        Instruction::RealCopy { dst, src } => {
            state.cost.real_ops += 1;
            let v = state.real(*src);
            state.real_mem.insert(*dst, v);
            Ok(Step::Next)
        }
        Instruction::RealArith { dst, op, lhs, rhs } => {
            state.cost.real_ops += 1;
            let a = state.real(*lhs);
            let b = state.real(*rhs);
            state.real_mem.insert(*dst, real_arith(*op, a, b, line)?);
            Ok(Step::Next)
        }
        Instruction::CompareJump { cmp, lhs, rhs, action } => {
            state.cost.word_ops += 1;
            let a = read_operand(state, lhs, line)?;
            let b = read_operand(state, rhs, line)?;
            let fire = match cmp {
                Cmp::Eq => a == b,
                Cmp::Gt => a > b,
            };
            if fire {
                take_branch(state, action, line)
            } else {
                Ok(Step::Next)
            }
        }
        Instruction::SignJump { reg, action } => {
            state.cost.real_ops += 1;
            if state.real(*reg).is_positive() {
                take_branch(state, action, line)
            } else {
                Ok(Step::Next)
            }
        }
        Instruction::Goto { target } => {
            state.cost.word_ops += 1;
            Ok(Step::Jump(*target))
        }
        Instruction::Floor { src, dst } => {
            if !p.flags.floor_enabled {
                return Err(Fault::FloorDisabled { line });
            }
            state.cost.floor_ops += 1;
            let v = crate::exactnum::floor_rational(&state.real(*src));
            write_word(state, *dst, v, line)?;
            Ok(Step::Next)
        }
        Instruction::Accept => {
            state.cost.word_ops += 1;
            Ok(Step::Halt(Outcome::Accept))
        }
        Instruction::Reject => {
            state.cost.word_ops += 1;
            Ok(Step::Halt(Outcome::Reject))
        }
        Instruction::Return { value } => {
            state.cost.word_ops += 1;
            let v = match value {
                ReturnSource::Word(r) => Value::Word(read_word(state, *r, line)?),
                ReturnSource::No => Value::No,
            };
            Ok(Step::Halt(Outcome::Return(v)))
        }
    }
}

/// Runs `p` from `init` for at most `fuel` instruction executions.
pub fn run(p: &Program, init: MachineState, fuel: u64) -> (Outcome, MachineState) {
    let mut state = init;
    let mut executed = 0u64;
    loop {
        if state.pc >= p.instructions.len() {
            return (Outcome::Fault(Fault::PcOutOfRange), state);
        }
        if executed == fuel {
            return (Outcome::OutOfFuel, state);
        }
        let line = state.pc;
        match execute(p, &mut state, line) {
            Ok(Step::Next) => state.pc = line + 1,
            Ok(Step::Jump(t)) => state.pc = t,
            Ok(Step::Halt(outcome)) => return (outcome, state),
            Err(fault) => return (Outcome::Fault(fault), state),
        }
        executed += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, ratio};
    use crate::machine::parse_program;

    /// Linear search over M[3..n+2] for the target M[1], with M[0]=n.
    /// Returns the address of the first hit or NO.
    pub const LINEAR_SEARCH: &str = "\
M[0] <- M[0] + 2
M[2] <- 3
IFEQ M[M[2]] M[1] RETURN M[2]
M[2] <- M[2] + 1
IFGT M[2] M[0] RETURN NO
GOTO 3
";

    fn linear_search() -> Program {
        parse_program(LINEAR_SEARCH).unwrap()
    }

    #[test]
    fn linear_search_is_six_instructions() {
        assert_eq!(linear_search().len(), 6);
    }

    #[test]
    fn linear_search_finds_target() {
        let p = linear_search();
        let init = MachineState::new()
            .with_word(0, 3)
            .with_word(1, 7)
            .with_word(3, 2)
            .with_word(4, 7)
            .with_word(5, 9);
        let (outcome, _) = run(&p, init, 10_000);
        assert_eq!(outcome, Outcome::Return(Value::Word(4.into())));
    }

    #[test]
    fn linear_search_reports_missing_target() {
        let p = linear_search();
        let init = MachineState::new()
            .with_word(0, 3)
            .with_word(1, 7)
            .with_word(3, 2)
            .with_word(4, 5)
            .with_word(5, 9);
        let (outcome, _) = run(&p, init, 10_000);
        assert_eq!(outcome, Outcome::Return(Value::No));
    }

    #[test]
    fn empty_loop_runs_out_of_fuel() {
        let p = parse_program("GOTO 1").unwrap();
        let (outcome, state) = run(&p, MachineState::new(), 100);
        assert_eq!(outcome, Outcome::OutOfFuel);
        assert_eq!(state.cost.word_ops, 100);
    }

    #[test]
    fn word_division_by_zero_faults() {
        let p = parse_program("M[0] <- 1\nM[2] <- M[0] / M[1]\nACCEPT").unwrap();
        let (outcome, _) = run(&p, MachineState::new(), 100);
        assert_eq!(outcome, Outcome::Fault(Fault::WordDivisionByZero { line: 1 }));
    }

    #[test]
    fn word_division_rounds_toward_minus_infinity() {
        let p = parse_program("M[2] <- M[0] / M[1]\nRETURN M[2]").unwrap();
        let init = MachineState::new().with_word(0, -7).with_word(1, 2);
        let (outcome, _) = run(&p, init, 100);
        assert_eq!(outcome, Outcome::Return(Value::Word((-4).into())));
    }

    #[test]
    fn real_division_by_zero_faults() {
        let p = parse_program("R[0] <- 1\nR[2] <- R[0] / R[1]\nACCEPT").unwrap();
        let (outcome, _) = run(&p, MachineState::new(), 100);
        assert_eq!(outcome, Outcome::Fault(Fault::RealDivisionByZero { line: 1 }));
    }

    #[test]
    fn floor_requires_the_flag() {
        let src = "FLOOR R[0] -> M[0]\nRETURN M[0]";
        let p = parse_program(src).unwrap();
        let init = MachineState::new().with_real(0, ratio(7, 2));
        let (outcome, _) = run(&p, init.clone(), 100);
        assert_eq!(outcome, Outcome::Fault(Fault::FloorDisabled { line: 0 }));

        let p = parse_program(src).unwrap().with_floor(true);
        let (outcome, state) = run(&p, init, 100);
        assert_eq!(outcome, Outcome::Return(Value::Word(3.into())));
        assert_eq!(state.cost.floor_ops, 1);
    }

    #[test]
    fn indirect_write_and_read() {
        let p = parse_program("M[1] <- 10\nM[M[1]] <- 42\nRETURN M[10]").unwrap();
        let (outcome, _) = run(&p, MachineState::new(), 100);
        assert_eq!(outcome, Outcome::Return(Value::Word(42.into())));
    }

    #[test]
    fn negative_indirect_address_faults() {
        let p = parse_program("M[1] <- -3\nM[0] <- M[M[1]]\nACCEPT").unwrap();
        let (outcome, _) = run(&p, MachineState::new(), 100);
        assert_eq!(outcome, Outcome::Fault(Fault::BadAddress { line: 1 }));
    }

    #[test]
    fn fuel_monotonicity() {
        let p = linear_search();
        let init = MachineState::new().with_word(0, 3).with_word(1, 9).with_word(5, 9);
        let mut minimal = None;
        for fuel in 0..200 {
            let (outcome, _) = run(&p, init.clone(), fuel);
            if outcome != Outcome::OutOfFuel {
                minimal = Some((fuel, outcome));
                break;
            }
        }
        let (f0, settled) = minimal.expect("program halts");
        for extra in [1, 7, 100] {
            let (outcome, _) = run(&p, init.clone(), f0 + extra);
            assert_eq!(outcome, settled);
        }
    }

    #[test]
    fn sign_test_branches_on_positive_only() {
        let src = "IFPOS R[0] GOTO 3\nREJECT\nACCEPT";
        let p = parse_program(src).unwrap();
        for (value, expected) in [
            (int(2), Outcome::Accept),
            (int(0), Outcome::Reject),
            (int(-1), Outcome::Reject),
        ] {
            let init = MachineState::new().with_real(0, value);
            let (outcome, _) = run(&p, init, 10);
            assert_eq!(outcome, expected);
        }
    }
}
