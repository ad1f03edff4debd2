//! End-to-end bound checking and differential cost testing.
//!
//! `check_bound` runs a program on the PCF machine and denotes its extracted
//! recurrence, then walks the program's type comparing the two. Ground
//! observations compare cost and size. Products are observed through their
//! components and functions through applications to sample arguments, each
//! of which is a fresh run of a derived program. A derived program pays one
//! unit per elimination that the recurrence does not see, and that offset is
//! subtracted before comparing.

use std::fmt;

use num_bigint::BigUint;
use recx_core::cbpv_machine::eval_cbpv;
use recx_core::embed::{embed_program, EmbedError};
use recx_core::extract::{extract, ExtractError};
use recx_core::pcf::{typecheck_pcf, TypingContext};
use recx_core::pcf_machine::{eval_pcf, EvalOutcome, Fuel};
use recx_core::pcfc::PcfcTerm;
use recx_core::sized::{Budget, Env, Model, SizedValue};
use recx_core::{PcfTerm, PcfType, Side, Strategy};
use serde::Serialize;

/// Outcome of a bound check, ordered by precedence: when a program has
/// several observations, the report carries the greatest verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "HOLDS_TRIVIALLY_∞")]
    HoldsTriviallyInf,
    #[serde(rename = "HOLDS")]
    Holds,
    #[serde(rename = "INCONCLUSIVE_FUEL")]
    InconclusiveFuel,
    #[serde(rename = "VIOLATION")]
    Violation,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::HoldsTriviallyInf => "HOLDS_TRIVIALLY_∞",
            Verdict::Holds => "HOLDS",
            Verdict::InconclusiveFuel => "INCONCLUSIVE_FUEL",
            Verdict::Violation => "VIOLATION",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One observation: a (possibly derived) program run against its bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    /// How the observation was reached from the program, e.g. `root`,
    /// `proj1`, `app 3 . proj2`.
    pub path: String,
    pub observed_cost: Option<u64>,
    pub bound_cost: Option<BigUint>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub program_id: String,
    pub strategy: Strategy,
    pub fuel_used: u64,
    /// `None` when the run did not finish.
    pub observed_cost: Option<u64>,
    pub observed_value: String,
    /// `None` is infinity.
    pub bound_cost: Option<BigUint>,
    pub bound_potential: String,
    pub verdict: Verdict,
    pub leaves: Vec<Leaf>,
}

impl BoundReport {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.program_id = id.into();
        self
    }

    /// The first violating observation, if any.
    pub fn violation(&self) -> Option<&Leaf> {
        self.leaves.iter().find(|l| l.verdict == Verdict::Violation)
    }
}

pub const DEFAULT_SAMPLES: [u64; 7] = [0, 1, 2, 3, 5, 8, 13];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub fuel: Fuel,
    pub samples: Vec<u64>,
    /// How many nested arrows are sampled; deeper ones are not observed.
    pub arrow_depth: usize,
    pub budget: Budget,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            fuel: Fuel::DEFAULT,
            samples: DEFAULT_SAMPLES.to_vec(),
            arrow_depth: 1,
            budget: Budget {
                depth: 10_000,
                steps: 5_000_000,
            },
        }
    }
}

pub fn check_bound(t: &PcfTerm, s: Strategy, fuel: Fuel, samples: &[u64]) -> Result<BoundReport, ExtractError> {
    let cfg = CheckConfig {
        fuel,
        samples: samples.to_vec(),
        ..CheckConfig::default()
    };
    check_bound_with(t, s, &cfg)
}

pub fn check_bound_with(t: &PcfTerm, s: Strategy, cfg: &CheckConfig) -> Result<BoundReport, ExtractError> {
    let ty = typecheck_pcf(&TypingContext::new(), t, s).map_err(|e| ExtractError::Embed(e.into()))?;
    let recurrence = extract(t, s)?.term;

    // Sample arguments and their recurrences are built before the model
    // session starts, since its values borrow the terms they came from.
    let mut domains = Vec::new();
    collect_domains(&ty, cfg.arrow_depth, &mut domains);
    let mut table: Vec<SampleSet> = Vec::new();
    for dom in domains {
        let mut args = Vec::new();
        for &k in &cfg.samples {
            let arg = sample_arg(&dom, k);
            let rec = extract(&arg, s)?.term;
            args.push((k, arg, rec));
        }
        table.push(SampleSet { dom, args });
    }

    let model = Model::new(cfg.budget);
    let env = Env::empty();
    let root = model.eval(&recurrence, &env);
    let sized: Vec<Vec<SizedValue<'_>>> = table
        .iter()
        .map(|set| {
            set.args
                .iter()
                .map(|(_, _, rec)| {
                    let v = model.eval(rec, &env);
                    match s {
                        // A CBV argument is a value: its potential is the
                        // second half of the complexity of returning it.
                        Strategy::Cbv => v.components().map_or(SizedValue::Bottom, |(_, p)| p),
                        Strategy::Cbn => v,
                    }
                })
                .collect()
        })
        .collect();

    let run = eval_pcf(t, s, cfg.fuel);
    let mut walker = Walker {
        s,
        cfg,
        model: &model,
        table: &table,
        sized: &sized,
        leaves: Vec::new(),
    };
    let bound_potential;
    match s {
        Strategy::Cbv => {
            let (c, p) = split(&root);
            bound_potential = p.to_string();
            walker.computation(&run, 0, &c, &p, &ty, "root".into(), cfg.arrow_depth);
        }
        Strategy::Cbn => {
            bound_potential = match &ty {
                PcfType::Nat => split(&root).1.to_string(),
                _ => root.to_string(),
            };
            walker.cbn(t, Some(run.clone()), 0, &root, &ty, "root".into(), cfg.arrow_depth);
        }
    }
    let leaves = walker.leaves;
    let verdict = leaves.iter().map(|l| l.verdict).max().unwrap_or(Verdict::Holds);
    let first = leaves.first();
    Ok(BoundReport {
        program_id: String::new(),
        strategy: s,
        fuel_used: match &run {
            EvalOutcome::Converged { fuel_used, .. } => *fuel_used,
            _ => cfg.fuel.0,
        },
        observed_cost: first.and_then(|l| l.observed_cost),
        observed_value: run.value().map_or_else(|| "inf".to_string(), |v| v.to_string()),
        bound_cost: first.and_then(|l| l.bound_cost.clone()),
        bound_potential,
        verdict,
        leaves,
    })
}

struct SampleSet {
    dom: PcfType,
    args: Vec<(u64, PcfTerm, PcfcTerm)>,
}

fn collect_domains(ty: &PcfType, depth: usize, out: &mut Vec<PcfType>) {
    match ty {
        PcfType::Nat | PcfType::List(_) => {}
        PcfType::Prod(a, b) => {
            collect_domains(a, depth, out);
            collect_domains(b, depth, out);
        }
        PcfType::Arrow(a, b) => {
            if depth == 0 {
                return;
            }
            if !out.contains(a) {
                out.push((**a).clone());
            }
            collect_domains(b, depth - 1, out);
        }
    }
}

/// A closed value of type `ty` whose size grows with `k`.
pub fn sample_arg(ty: &PcfType, k: u64) -> PcfTerm {
    match ty {
        PcfType::Nat => PcfTerm::num(k),
        PcfType::Prod(a, b) => PcfTerm::pair(sample_arg(a, k), sample_arg(b, k)),
        PcfType::List(a) => (0..k).rev().fold(PcfTerm::Nil, |tail, i| PcfTerm::cons(sample_arg(a, i), tail)),
        PcfType::Arrow(a, b) => PcfTerm::lam("_", (**a).clone(), sample_arg(b, k)),
    }
}

/// Cost and potential halves of a complexity at an `F` type.
fn split<'t>(v: &SizedValue<'t>) -> (SizedValue<'t>, SizedValue<'t>) {
    v.components().unwrap_or((SizedValue::Bottom, SizedValue::Bottom))
}

fn fin(v: &SizedValue<'_>) -> Option<BigUint> {
    v.as_fin().cloned()
}

struct Walker<'a, 't> {
    s: Strategy,
    cfg: &'a CheckConfig,
    model: &'a Model,
    table: &'a [SampleSet],
    sized: &'a [Vec<SizedValue<'t>>],
    leaves: Vec<Leaf>,
}

impl<'t> Walker<'_, 't> {
    fn samples(&self, dom: &PcfType) -> Vec<(u64, PcfTerm, SizedValue<'t>)> {
        let i = self.table.iter().position(|set| &set.dom == dom).expect("domain was collected");
        self.table[i]
            .args
            .iter()
            .zip(&self.sized[i])
            .map(|((k, arg, _), v)| (*k, arg.clone(), v.clone()))
            .collect()
    }

    /// Records the cost half of an observation; returns the value to check
    /// when the run finished.
    fn observe(&mut self, run: &EvalOutcome, offset: u64, c: &SizedValue<'t>, path: &str) -> Option<PcfTerm> {
        let bound_cost = fin(c);
        let (observed_cost, verdict, note, value) = match run {
            EvalOutcome::Converged { value, cost, .. } => {
                let own = cost.saturating_sub(offset);
                let (verdict, note) = match &bound_cost {
                    None => (Verdict::HoldsTriviallyInf, None),
                    Some(b) if *b < BigUint::from(own) => {
                        (Verdict::Violation, Some(format!("cost {own} exceeds bound {b}")))
                    }
                    Some(_) => (Verdict::Holds, None),
                };
                (Some(own), verdict, note, Some(value.clone()))
            }
            EvalOutcome::OutOfFuel if bound_cost.is_none() => (None, Verdict::HoldsTriviallyInf, None, None),
            EvalOutcome::OutOfFuel => (None, Verdict::InconclusiveFuel, None, None),
            EvalOutcome::Stuck(why) => (None, Verdict::Violation, Some(format!("stuck: {why}")), None),
        };
        self.leaves.push(Leaf {
            path: path.to_string(),
            observed_cost,
            bound_cost,
            verdict,
            note,
        });
        value
    }

    fn size_violation(&mut self, path: &str, what: String) {
        self.leaves.push(Leaf {
            path: path.to_string(),
            observed_cost: None,
            bound_cost: None,
            verdict: Verdict::Violation,
            note: Some(what),
        });
    }

    /// CBV: a run of a computation of type `F ty` against `<c, p>`.
    #[allow(clippy::too_many_arguments)]
    fn computation(
        &mut self,
        run: &EvalOutcome,
        offset: u64,
        c: &SizedValue<'t>,
        p: &SizedValue<'t>,
        ty: &PcfType,
        path: String,
        depth: usize,
    ) {
        if let Some(v) = self.observe(run, offset, c, &path) {
            self.value(&v, p, ty, &path, depth);
        }
    }

    /// CBV value relation.
    fn value(&mut self, v: &PcfTerm, p: &SizedValue<'t>, ty: &PcfType, path: &str, depth: usize) {
        match ty {
            PcfType::Nat | PcfType::List(_) => {
                let size = match (ty, v) {
                    (PcfType::Nat, PcfTerm::Num(k)) => k.clone(),
                    (PcfType::List(_), _) => BigUint::from(v.list_len().unwrap_or(0)),
                    _ => return self.size_violation(path, format!("not a canonical form: {v}")),
                };
                if let Some(b) = fin(p) {
                    if size > b {
                        self.size_violation(path, format!("size {size} exceeds potential {b}"));
                    }
                }
            }
            PcfType::Prod(a, b) => {
                let PcfTerm::Pair(v1, v2) = v else {
                    return self.size_violation(path, format!("not a pair: {v}"));
                };
                let (p1, p2) = split(p);
                self.value(v1, &p1, a, &format!("{path} . fst"), depth);
                self.value(v2, &p2, b, &format!("{path} . snd"), depth);
            }
            PcfType::Arrow(a, b) => {
                if depth == 0 {
                    return;
                }
                for (k, arg, size) in self.samples(a) {
                    let run = eval_pcf(&PcfTerm::app(v.clone(), arg), self.s, self.cfg.fuel);
                    let e = if p.is_bottom() { SizedValue::Bottom } else { self.model.apply(p, size) };
                    let (c, q) = split(&e);
                    self.computation(&run, 1, &c, &q, b, format!("{path} . app {k}"), depth - 1);
                }
            }
        }
    }

    /// CBN: `prog` against the complexity `e`, with `offset` eliminations
    /// already paid for.
    #[allow(clippy::too_many_arguments)]
    fn cbn(
        &mut self,
        prog: &PcfTerm,
        run: Option<EvalOutcome>,
        offset: u64,
        e: &SizedValue<'t>,
        ty: &PcfType,
        path: String,
        depth: usize,
    ) {
        match ty {
            PcfType::Nat => {
                let run = run.unwrap_or_else(|| eval_pcf(prog, self.s, self.cfg.fuel));
                let (c, p) = split(e);
                if let Some(v) = self.observe(&run, offset, &c, &path) {
                    self.value(&v, &p, ty, &path, 0);
                }
            }
            PcfType::Prod(a, b) => {
                for (side, comp) in [(Side::Left, a), (Side::Right, b)] {
                    let (e1, e2) = split(e);
                    let part = side.pick(e1, e2);
                    let derived = PcfTerm::proj(side, prog.clone());
                    let path = format!("{path} . proj{}", side.index());
                    self.cbn(&derived, None, offset + 1, &part, comp, path, depth);
                }
            }
            PcfType::Arrow(a, b) => {
                if depth == 0 {
                    return;
                }
                for (k, arg, size) in self.samples(a) {
                    let derived = PcfTerm::app(prog.clone(), arg);
                    let applied = if e.is_bottom() { SizedValue::Bottom } else { self.model.apply(e, size) };
                    self.cbn(&derived, None, offset + 1, &applied, b, format!("{path} . app {k}"), depth - 1);
                }
            }
            PcfType::List(_) => unreachable!("lists are call-by-value only"),
        }
    }
}

/// Costs of a program on the PCF machine and of its embedding on the CBPV
/// machine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffCost {
    pub pcf_cost: Option<u64>,
    pub cbpv_cost: Option<u64>,
    /// False exactly when the PCF run finished and the CBPV run did not
    /// finish with the same cost.
    pub equal: bool,
}

/// The embedding takes several machine rules per source rule, so the CBPV
/// run gets this multiple of the PCF fuel when there is a cost to match.
pub const CBPV_FUEL_FACTOR: u64 = 16;

pub fn diff_cost(t: &PcfTerm, s: Strategy, fuel: Fuel) -> Result<DiffCost, EmbedError> {
    let embedded = embed_program(t, s)?;
    let pcf_cost = eval_pcf(t, s, fuel).cost();
    // A PCF run out of fuel has nothing to compare against, so the CBPV
    // run is only given the same fuel.
    let factor = if pcf_cost.is_some() { CBPV_FUEL_FACTOR } else { 1 };
    let cbpv_cost = eval_cbpv(&embedded.term, Fuel(fuel.0.saturating_mul(factor))).cost();
    let equal = match (pcf_cost, cbpv_cost) {
        (Some(a), Some(b)) => a == b,
        (Some(_), None) => false,
        (None, _) => true,
    };
    Ok(DiffCost {
        pcf_cost,
        cbpv_cost,
        equal,
    })
}
