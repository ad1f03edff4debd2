//! The five arithmetic primitives shared by every evaluator.
//!
//! Subtraction is monus, division is floor division, and both `n / 0` and
//! `n mod 0` are `0`. Every machine in the crate calls [`apply`], so the
//! operational semantics can never disagree on a corner case.

use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

/// Results wider than this many bits are refused. The machines report such a
/// run as out of fuel; the sized model treats it as infinity.
pub const MAX_NUMERAL_BITS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl ArithOp {
    pub const ALL: [ArithOp; 5] = [
        ArithOp::Add,
        ArithOp::Sub,
        ArithOp::Mul,
        ArithOp::Div,
        ArithOp::Mod,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ArithOp::Add => "add",
            ArithOp::Sub => "sub",
            ArithOp::Mul => "mul",
            ArithOp::Div => "div",
            ArithOp::Mod => "mod",
        }
    }

    pub fn from_keyword(word: &str) -> Option<ArithOp> {
        ArithOp::ALL.into_iter().find(|op| op.keyword() == word)
    }
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Evaluates `lhs op rhs`, or `None` if the result would exceed
/// [`MAX_NUMERAL_BITS`].
pub fn apply(op: ArithOp, lhs: &BigUint, rhs: &BigUint) -> Option<BigUint> {
    let out = match op {
        ArithOp::Add => lhs + rhs,
        ArithOp::Sub => monus(lhs, rhs),
        ArithOp::Mul => {
            if lhs.bits() + rhs.bits() > MAX_NUMERAL_BITS + 1 {
                return None;
            }
            lhs * rhs
        }
        ArithOp::Div => {
            if rhs.is_zero() {
                BigUint::zero()
            } else {
                lhs.div_floor(rhs)
            }
        }
        ArithOp::Mod => {
            if rhs.is_zero() {
                BigUint::zero()
            } else {
                lhs.mod_floor(rhs)
            }
        }
    };
    (out.bits() <= MAX_NUMERAL_BITS).then_some(out)
}

/// Truncated subtraction.
pub fn monus(lhs: &BigUint, rhs: &BigUint) -> BigUint {
    if lhs > rhs {
        lhs - rhs
    } else {
        BigUint::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(k: u32) -> BigUint {
        BigUint::from(k)
    }

    #[test]
    fn zero_divisors_are_totalised() {
        assert_eq!(apply(ArithOp::Div, &n(7), &n(0)), Some(n(0)));
        assert_eq!(apply(ArithOp::Mod, &n(7), &n(0)), Some(n(0)));
        assert_eq!(apply(ArithOp::Mod, &n(0), &n(0)), Some(n(0)));
    }

    #[test]
    fn subtraction_truncates() {
        assert_eq!(apply(ArithOp::Sub, &n(5), &n(7)), Some(n(0)));
        assert_eq!(apply(ArithOp::Sub, &n(7), &n(5)), Some(n(2)));
    }

    #[test]
    fn division_floors() {
        assert_eq!(apply(ArithOp::Div, &n(7), &n(2)), Some(n(3)));
        assert_eq!(apply(ArithOp::Mod, &n(7), &n(3)), Some(n(1)));
    }

    #[test]
    fn oversized_products_are_refused() {
        let big = BigUint::from(1u8) << (MAX_NUMERAL_BITS as usize - 2);
        assert!(apply(ArithOp::Mul, &big, &big).is_none());
        assert!(apply(ArithOp::Add, &big, &big).is_some());
    }
}
