//! Assembly parser. One instruction per line, `#` starts a comment, blank
//! lines are skipped. Tokens are whitespace-separated. `GOTO n` refers to the
//! n-th instruction (1-based, comments not counted).

use std::fmt;

use thiserror::Error;

use super::{
    ArithOp, BranchAction, Cmp, Instruction, Program, ReturnSource, WordOperand, WordRef,
};
use crate::exactnum::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, line {}", self.reason, self.line)
    }
}

fn err(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError { line, reason: reason.into() }
}

fn parse_index(s: &str, line: usize) -> Result<usize, ParseError> {
    s.parse()
        .map_err(|_| err(line, format!("malformed register index `{s}`")))
}

/// `M[i]` or `M[M[i]]`.
fn parse_word_ref(tok: &str, line: usize) -> Result<WordRef, ParseError> {
    if let Some(inner) = tok.strip_prefix("M[M[").and_then(|s| s.strip_suffix("]]")) {
        return Ok(WordRef::Indirect(parse_index(inner, line)?));
    }
    if let Some(inner) = tok.strip_prefix("M[").and_then(|s| s.strip_suffix(']')) {
        return Ok(WordRef::Direct(parse_index(inner, line)?));
    }
    Err(err(line, format!("malformed operand `{tok}`")))
}

/// A word register access or an integer literal.
fn parse_word_operand(tok: &str, line: usize) -> Result<WordOperand, ParseError> {
    if tok.starts_with("M[") {
        Ok(WordOperand::Ref(parse_word_ref(tok, line)?))
    } else {
        let value: BigInt = tok
            .parse()
            .map_err(|_| err(line, format!("malformed operand `{tok}`")))?;
        Ok(WordOperand::Const(value))
    }
}

fn parse_real_reg(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.strip_prefix("R[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("malformed operand `{tok}`")))
        .and_then(|inner| parse_index(inner, line))
}

fn parse_arith_op(tok: &str, line: usize) -> Result<ArithOp, ParseError> {
    match tok {
        "+" => Ok(ArithOp::Add),
        "-" => Ok(ArithOp::Sub),
        "*" => Ok(ArithOp::Mul),
        "/" => Ok(ArithOp::Div),
        _ => Err(err(line, format!("malformed operator `{tok}`"))),
    }
}

/// 1-based target in the source; converted to 0-based later, once the
/// instruction count is known.
fn parse_target(tok: &str, line: usize) -> Result<usize, ParseError> {
    let n: usize = tok
        .parse()
        .map_err(|_| err(line, format!("malformed jump target `{tok}`")))?;
    if n == 0 {
        return Err(err(line, "jump target 0 (instructions are numbered from 1)"));
    }
    Ok(n - 1)
}

/// `GOTO n`, `RETURN M[i]` or `RETURN NO`, as the tail of a conditional.
fn parse_action(toks: &[&str], line: usize) -> Result<BranchAction, ParseError> {
    match toks {
        ["GOTO", t] => Ok(BranchAction::Goto(parse_target(t, line)?)),
        ["RETURN", "NO"] => Ok(BranchAction::Return(ReturnSource::No)),
        ["RETURN", r] => Ok(BranchAction::Return(ReturnSource::Word(parse_word_ref(
            r, line,
        )?))),
        _ => Err(err(line, "malformed branch action")),
    }
}

fn parse_instruction(toks: &[&str], line: usize) -> Result<Instruction, ParseError> {
    let first = toks[0];
    match first {
        "GOTO" => match toks {
            ["GOTO", t] => Ok(Instruction::Goto { target: parse_target(t, line)? }),
            _ => Err(err(line, "GOTO takes exactly one target")),
        },
        "ACCEPT" => match toks {
            ["ACCEPT"] => Ok(Instruction::Accept),
            _ => Err(err(line, "ACCEPT takes no operands")),
        },
        "REJECT" => match toks {
            ["REJECT"] => Ok(Instruction::Reject),
            _ => Err(err(line, "REJECT takes no operands")),
        },
        "RETURN" => match toks {
            ["RETURN", "NO"] => Ok(Instruction::Return { value: ReturnSource::No }),
            ["RETURN", r] => Ok(Instruction::Return {
                value: ReturnSource::Word(parse_word_ref(r, line)?),
            }),
            _ => Err(err(line, "RETURN takes one operand")),
        },
        "IFEQ" | "IFGT" => {
            if toks.len() < 5 {
                return Err(err(line, "malformed comparison"));
            }
            let cmp = if first == "IFEQ" { Cmp::Eq } else { Cmp::Gt };
            let lhs = parse_word_operand(toks[1], line)?;
            let rhs = parse_word_operand(toks[2], line)?;
            let action = parse_action(&toks[3..], line)?;
            Ok(Instruction::CompareJump { cmp, lhs, rhs, action })
        }
        "IFPOS" => {
            if toks.len() < 4 {
                return Err(err(line, "malformed sign test"));
            }
            let reg = parse_real_reg(toks[1], line)?;
            let action = parse_action(&toks[2..], line)?;
            Ok(Instruction::SignJump { reg, action })
        }
        "FLOOR" => match toks {
            ["FLOOR", src, "->", dst] => Ok(Instruction::Floor {
                src: parse_real_reg(src, line)?,
                dst: parse_word_ref(dst, line)?,
            }),
            _ => Err(err(line, "malformed floor (expected FLOOR R[i] -> M[j])")),
        },
        _ if first.starts_with("M[") => {
            let dst = parse_word_ref(first, line)?;
            match toks {
                [_, "<-", src] => {
                    if src.starts_with("M[") {
                        Ok(Instruction::WordCopy { dst, src: parse_word_ref(src, line)? })
                    } else {
                        let value: BigInt = src.parse().map_err(|_| {
                            err(line, format!("malformed constant `{src}`"))
                        })?;
                        Ok(Instruction::WordAssign { dst, value })
                    }
                }
                [_, "<-", lhs, op, rhs] => Ok(Instruction::WordArith {
                    dst,
                    op: parse_arith_op(op, line)?,
                    lhs: parse_word_operand(lhs, line)?,
                    rhs: parse_word_operand(rhs, line)?,
                }),
                _ => Err(err(line, "malformed word instruction")),
            }
        }
        _ if first.starts_with("R[") => {
            let dst = parse_real_reg(first, line)?;
            match toks {
                [_, "<-", "0"] => Ok(Instruction::RealAssign { dst, one: false }),
                [_, "<-", "1"] => Ok(Instruction::RealAssign { dst, one: true }),
                [_, "<-", src] if src.starts_with("R[") => {
                    Ok(Instruction::RealCopy { dst, src: parse_real_reg(src, line)? })
                }
                [_, "<-", src] => Err(err(
                    line,
                    format!("real registers may only be assigned 0 or 1, got `{src}`"),
                )),
                [_, "<-", lhs, op, rhs] => Ok(Instruction::RealArith {
                    dst,
                    op: parse_arith_op(op, line)?,
                    lhs: parse_real_reg(lhs, line)?,
                    rhs: parse_real_reg(rhs, line)?,
                }),
                _ => Err(err(line, "malformed real instruction")),
            }
        }
        _ => Err(err(line, "unknown opcode")),
    }
}

fn jump_targets(instr: &Instruction) -> Vec<usize> {
    let action_target = |a: &BranchAction| match a {
        BranchAction::Goto(t) => Some(*t),
        BranchAction::Return(_) => None,
    };
    match instr {
        Instruction::Goto { target } => vec![*target],
        Instruction::CompareJump { action, .. } | Instruction::SignJump { action, .. } => {
            action_target(action).into_iter().collect()
        }
        _ => vec![],
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut instructions = Vec::new();
    let mut source_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        instructions.push(parse_instruction(&toks, line_no)?);
        source_lines.push(line_no);
    }
    if instructions.is_empty() {
        return Err(err(1, "empty program"));
    }
    let len = instructions.len();
    for (instr, &line_no) in instructions.iter().zip(&source_lines) {
        for target in jump_targets(instr) {
            if target >= len {
                return Err(err(
                    line_no,
                    format!("jump target {} out of range (program has {len} instructions)", target + 1),
                ));
            }
        }
    }
    Ok(Program::new(instructions))
}
