//! Eliminates real division from a deciding program.
//!
//! Every real register i of the source program is simulated by the pair
//! (R[2i], R[2i+1]) holding numerator and denominator. A preamble moves each
//! input value q into its pair as (q, 1); afterwards the pair arithmetic is
//!
//!   q1 + q2 = (a1*b2 + a2*b1) / (b1*b2)
//!   q1 - q2 = (a1*b2 - a2*b1) / (b1*b2)
//!   q1 * q2 = (a1*a2) / (b1*b2)
//!   q1 / q2 = (a1*b2) / (b1*a2)
//!
//! and a sign test q > 0 becomes a*b > 0. Each source instruction expands to
//! at most six instructions.

use thiserror::Error;

use super::{ArithOp, BranchAction, Instruction, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("program uses the floor instruction; division elimination requires a floor-free program")]
    FloorUnsupported,
}

fn max_real_register(p: &Program) -> Option<usize> {
    let mut max = None;
    let mut bump = |r: usize| max = Some(max.map_or(r, |m: usize| m.max(r)));
    for instr in &p.instructions {
        match instr {
            Instruction::RealAssign { dst, .. } => bump(*dst),
            Instruction::RealCopy { dst, src } => {
                bump(*dst);
                bump(*src);
            }
            Instruction::RealArith { dst, lhs, rhs, .. } => {
                bump(*dst);
                bump(*lhs);
                bump(*rhs);
            }
            Instruction::SignJump { reg, .. } => bump(*reg),
            Instruction::Floor { src, .. } => bump(*src),
            _ => {}
        }
    }
    max
}

/// Expansion of one source instruction, branch targets still in source
/// coordinates (remapped once all offsets are known).
fn expand(instr: &Instruction, scratch: usize) -> Vec<Instruction> {
    let num = |r: usize| 2 * r;
    let den = |r: usize| 2 * r + 1;
    let (t0, t1, t2, t3) = (scratch, scratch + 1, scratch + 2, scratch + 3);
    let mul = |dst, lhs, rhs| Instruction::RealArith { dst, op: ArithOp::Mul, lhs, rhs };
    match instr {
        Instruction::RealAssign { dst, one } => vec![
            Instruction::RealAssign { dst: num(*dst), one: *one },
            Instruction::RealAssign { dst: den(*dst), one: true },
        ],
        Instruction::RealCopy { dst, src } => vec![
            Instruction::RealCopy { dst: num(*dst), src: num(*src) },
            Instruction::RealCopy { dst: den(*dst), src: den(*src) },
        ],
        Instruction::RealArith { dst, op: op @ (ArithOp::Add | ArithOp::Sub), lhs, rhs } => vec![
            mul(t0, num(*lhs), den(*rhs)),
            mul(t1, num(*rhs), den(*lhs)),
            Instruction::RealArith { dst: t2, op: *op, lhs: t0, rhs: t1 },
            mul(t3, den(*lhs), den(*rhs)),
            Instruction::RealCopy { dst: num(*dst), src: t2 },
            Instruction::RealCopy { dst: den(*dst), src: t3 },
        ],
        Instruction::RealArith { dst, op: ArithOp::Mul, lhs, rhs } => vec![
            mul(t0, num(*lhs), num(*rhs)),
            mul(t1, den(*lhs), den(*rhs)),
            Instruction::RealCopy { dst: num(*dst), src: t0 },
            Instruction::RealCopy { dst: den(*dst), src: t1 },
        ],
        Instruction::RealArith { dst, op: ArithOp::Div, lhs, rhs } => vec![
            mul(t0, num(*lhs), den(*rhs)),
            mul(t1, den(*lhs), num(*rhs)),
            Instruction::RealCopy { dst: num(*dst), src: t0 },
            Instruction::RealCopy { dst: den(*dst), src: t1 },
        ],
        Instruction::SignJump { reg, action } => vec![
            mul(t0, num(*reg), den(*reg)),
            Instruction::SignJump { reg: t0, action: action.clone() },
        ],
        other => vec![other.clone()],
    }
}

fn remap_action(action: &BranchAction, offsets: &[usize]) -> BranchAction {
    match action {
        BranchAction::Goto(t) => BranchAction::Goto(offsets[*t]),
        ret @ BranchAction::Return(_) => ret.clone(),
    }
}

/// Rewrites `p` into an equivalent program with no real division. The output
/// runs on the same initial state and reaches the same decision; only `+`,
/// `-` and `*` act on real registers.
pub fn eliminate_division(p: &Program) -> Result<Program, TransformError> {
    if p.uses_floor() {
        return Err(TransformError::FloorUnsupported);
    }
    if !p.uses_real_division() {
        return Ok(p.clone());
    }
    let maxr = max_real_register(p).unwrap_or(0);
    let scratch = 2 * maxr + 2;

    // Move input values into their pairs, highest register first so no
    // original value is overwritten before it is copied.
    let mut preamble = Vec::new();
    for i in (0..=maxr).rev() {
        preamble.push(Instruction::RealCopy { dst: 2 * i, src: i });
        preamble.push(Instruction::RealAssign { dst: 2 * i + 1, one: true });
    }

    let expansions: Vec<Vec<Instruction>> =
        p.instructions.iter().map(|i| expand(i, scratch)).collect();
    let mut offsets = Vec::with_capacity(expansions.len());
    let mut at = preamble.len();
    for block in &expansions {
        offsets.push(at);
        at += block.len();
    }

    let mut instructions = preamble;
    for block in expansions {
        for instr in block {
            instructions.push(match instr {
                Instruction::Goto { target } => Instruction::Goto { target: offsets[target] },
                Instruction::CompareJump { cmp, lhs, rhs, action } => Instruction::CompareJump {
                    cmp,
                    lhs,
                    rhs,
                    action: remap_action(&action, &offsets),
                },
                Instruction::SignJump { reg, action } => Instruction::SignJump {
                    reg,
                    action: remap_action(&action, &offsets),
                },
                other => other,
            });
        }
    }
    Ok(Program { instructions, flags: p.flags })
}
