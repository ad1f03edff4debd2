//! Hand-written programs shipped with the tool.

use recx_core::pcfc::PcfcTerm;
use recx_core::{PcfTerm, Strategy};

use crate::syntax::{parse_pcf_as, parse_pcfc};

#[derive(Clone, Debug)]
pub struct NamedProgram {
    pub name: String,
    pub strategy: Strategy,
    pub term: PcfTerm,
}

const CBV: &[Strategy] = &[Strategy::Cbv];
const CBN: &[Strategy] = &[Strategy::Cbn];
const BOTH: &[Strategy] = &[Strategy::Cbv, Strategy::Cbn];

/// (name, source, strategies it is meant for)
const SOURCES: &[(&str, &str, &[Strategy])] = &[
    ("exp", include_str!("../corpus/exp.pcf"), CBV),
    ("mergesort", include_str!("../corpus/mergesort.pcf"), CBV),
    ("sum", include_str!("../corpus/sum.pcf"), CBV),
    ("omega-cbv", include_str!("../corpus/omega-cbv.pcf"), CBV),
    ("fact-cbn", include_str!("../corpus/fact-cbn.pcf"), CBN),
    ("lazy-arg", include_str!("../corpus/lazy-arg.pcf"), CBN),
    ("lazy-pair", include_str!("../corpus/lazy-pair.pcf"), CBN),
    ("cbn-stream", include_str!("../corpus/cbn-stream.pcf"), CBN),
    ("omega", include_str!("../corpus/omega.pcf"), CBN),
    ("cbn-duplication", include_str!("../corpus/cbn-duplication.pcf"), BOTH),
    ("monus", include_str!("../corpus/monus.pcf"), BOTH),
    ("div-zero", include_str!("../corpus/div-zero.pcf"), BOTH),
    ("mod-zero", include_str!("../corpus/mod-zero.pcf"), BOTH),
    ("big-numerals", include_str!("../corpus/big-numerals.pcf"), BOTH),
];

pub const MERGESORT_RECURRENCE: &str = include_str!("../corpus/mergesort-recurrence.pcfc");

/// Every corpus program under every strategy it is meant for. Programs run
/// under both strategies get the strategy appended to their name.
pub fn corpus() -> Vec<NamedProgram> {
    let mut out = Vec::new();
    for (name, text, strategies) in SOURCES {
        for &s in *strategies {
            let (term, _) = parse_pcf_as(text, Some(s)).unwrap_or_else(|e| panic!("corpus program {name}: {e}"));
            let name = if strategies.len() > 1 { format!("{name}-{s}") } else { name.to_string() };
            out.push(NamedProgram { name, strategy: s, term });
        }
    }
    out
}

pub fn find(name: &str) -> Option<NamedProgram> {
    corpus().into_iter().find(|p| p.name == name)
}

/// The merge sort recurrence written by hand in PCFc, with stub
/// recurrences for its helpers.
pub fn mergesort_recurrence() -> PcfcTerm {
    parse_pcfc(MERGESORT_RECURRENCE).expect("corpus recurrence parses")
}
