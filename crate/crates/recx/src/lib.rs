//! Surface syntax, the testing workbench and the driver behind the `recx`
//! command.

pub mod check;
pub mod corpus;
pub mod gen;
pub mod report;
pub mod shrink;
pub mod stack;
pub mod syntax;

pub use check::{check_bound, check_bound_with, diff_cost, BoundReport, CheckConfig, DiffCost, Verdict};
pub use gen::{gen_program, GenConfig};
pub use syntax::{parse_cbpv, parse_pcf, parse_pcf_as, parse_pcfc, ParseError};
