//! Cost analysis for PCF by way of Call-by-Push-Value.
//!
//! The pipeline implemented here is:
//!
//! ```text
//!   PCF (CBV or CBN) --embed--> CBPV (+ charge) --extract--> PCFc --denote--> sized domains
//! ```
//!
//! Each stage comes with its own evaluator so that the stages can be checked
//! against each other: [`pcf_machine`] and [`cbpv_machine`] are cost-counting
//! big-step interpreters, [`pcfc::eval_pcfc`] is the costless evaluator for
//! the recurrence language, and [`sized`] interprets recurrences as upper
//! bounds in which divergence doubles as infinity.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, file handling and
//! the command-line driver live in the `recx` crate.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod cbpv;
pub mod cbpv_machine;
pub mod embed;
pub mod extract;
pub mod names;
pub mod pcf;
pub mod pcf_machine;
pub mod pcfc;
pub mod simplify;
pub mod sized;

pub use arith::ArithOp;
pub use num_bigint::BigUint;
pub use pcf::{PcfTerm, PcfType, Strategy};

/// Which component a projection selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }

    pub fn pick<T>(self, left: T, right: T) -> T {
        match self {
            Side::Left => left,
            Side::Right => right,
        }
    }
}
