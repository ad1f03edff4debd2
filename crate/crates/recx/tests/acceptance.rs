//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion does.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recx::check::{check_bound_with, diff_cost, CheckConfig, Verdict};
use recx::corpus::{corpus, find, mergesort_recurrence, NamedProgram};
use recx::gen::{gen_pcfc, gen_program, GenConfig, PcfcCtx, PcfcGen};
use recx::shrink::shrink;
use recx::stack::with_big_stack;
use recx_core::arith::ArithOp;
use recx_core::extract::extract;
use recx_core::pcf_machine::{eval_pcf, EvalOutcome, Fuel};
use recx_core::pcfc::{eval_pcfc, numc, unfold_fix, PcfcOutcome, PcfcTerm, PcfcType};
use recx_core::simplify::Rule;
use recx_core::sized::{first_order_eq, size_leq, Budget, Env, Model, SizedValue};
use recx_core::{PcfTerm, Side, Strategy};

const FUEL: Fuel = Fuel(100_000);
const GENERATED_PER_STRATEGY: u64 = 500;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn population() -> Vec<NamedProgram> {
    let mut out = corpus();
    for s in [Strategy::Cbv, Strategy::Cbn] {
        for seed in 0..GENERATED_PER_STRATEGY {
            out.push(NamedProgram {
                name: format!("gen-{s}-{seed}"),
                strategy: s,
                term: gen_program(&GenConfig::new(seed, s)),
            });
        }
    }
    out
}

fn cost_preservation() -> Outcome {
    let programs = population();
    let mut converged = 0;
    let mut mismatches = Vec::new();
    for p in &programs {
        let d = diff_cost(&p.term, p.strategy, FUEL).expect("population is well typed");
        if d.pcf_cost.is_some() {
            converged += 1;
        }
        if !d.equal {
            mismatches.push(format!("{} (pcf {:?}, cbpv {:?})", p.name, d.pcf_cost, d.cbpv_cost));
        }
    }
    outcome(
        mismatches.is_empty() && converged > 0,
        format!(
            "{} programs, {converged} converged, {} mismatches {}",
            programs.len(),
            mismatches.len(),
            mismatches.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn bounding() -> Outcome {
    let programs = population();
    let cfg = CheckConfig::default();
    let (mut converged, mut trivial, mut holds, mut inconclusive) = (0usize, 0usize, 0usize, 0usize);
    let mut violations = Vec::new();
    for p in &programs {
        let r = check_bound_with(&p.term, p.strategy, &cfg).expect("population is well typed");
        let finished = matches!(eval_pcf(&p.term, p.strategy, FUEL), EvalOutcome::Converged { .. });
        match r.verdict {
            Verdict::Violation => {
                let s = p.strategy;
                let fails = |t: &PcfTerm| {
                    check_bound_with(t, s, &cfg).is_ok_and(|r| r.verdict == Verdict::Violation)
                };
                let small = shrink(&p.term, s, fails);
                let leaf = r.violation().map(|l| format!("{}: {:?}", l.path, l.note)).unwrap_or_default();
                violations.push(format!("{} [{leaf}] shrunk to {small}", p.name));
            }
            Verdict::HoldsTriviallyInf if finished => trivial += 1,
            Verdict::Holds => holds += 1,
            Verdict::InconclusiveFuel => inconclusive += 1,
            _ => {}
        }
        if finished {
            converged += 1;
        }
    }
    let ratio = trivial as f64 / converged.max(1) as f64;
    outcome(
        violations.is_empty() && ratio < 0.20,
        format!(
            "{} programs, {converged} converged; {holds} HOLDS, {trivial} trivially infinite among converged ({:.1}%), \
             {inconclusive} inconclusive, {} violations {}",
            programs.len(),
            ratio * 100.0,
            violations.len(),
            violations.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn budget() -> Budget {
    Budget {
        depth: 10_000,
        steps: 5_000_000,
    }
}

fn exponentiation() -> Outcome {
    let exp = find("exp").expect("corpus has exp").term;
    let rec = extract(&exp, Strategy::Cbv).expect("exp extracts").term;
    let model = Model::new(budget());
    let root = model.eval(&rec, &Env::empty());
    let (_, pot) = root.components().expect("a returner");
    let t = |n: u64| -> Option<BigUint> {
        let (c, _) = model.apply(&pot, SizedValue::fin(n)).components()?;
        c.as_fin().cloned()
    };
    let mut problems = Vec::new();
    if t(0) != Some(BigUint::from(0u8)) {
        problems.push(format!("T(0) = {:?}", t(0)));
    }
    let mut deltas = Vec::new();
    for n in [1u64, 2, 4, 8, 16, 32] {
        match (t(2 * n), t(n)) {
            (Some(a), Some(b)) if a >= b => deltas.push(a - b),
            other => problems.push(format!("T({}), T({n}) = {other:?}", 2 * n)),
        }
    }
    if deltas.iter().any(|d| *d != BigUint::from(3u8)) {
        problems.push(format!("T(2n) - T(n) = {deltas:?}"));
    }
    let cfg = CheckConfig {
        samples: (0..=40).collect(),
        ..CheckConfig::default()
    };
    let report = check_bound_with(&exp, Strategy::Cbv, &cfg).unwrap();
    if report.verdict != Verdict::Holds {
        problems.push(format!("check_bound on exp: {}", report.verdict));
    }
    let shown: Vec<String> = deltas.iter().map(|d| d.to_string()).collect();
    outcome(
        problems.is_empty(),
        format!(
            "T(0) = {:?}, T(2n) - T(n) = [{}] for n in 1..32, check_bound {}; {}",
            t(0).map(|v| v.to_string()),
            shown.join(", "),
            report.verdict,
            problems.join("; ")
        ),
    )
}

/// T(1) = 0, T(n) = 7 + 2n + 2 T(n/2) at powers of two.
fn mergesort_oracle(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        7 + 2 * n + 2 * mergesort_oracle(n / 2)
    }
}

fn merge_sort() -> Outcome {
    let mut problems = Vec::new();
    let rec = mergesort_recurrence();
    let model = Model::new(budget());
    let sort = model.eval(&rec, &Env::empty());
    for n in [0u64, 1, 2, 4, 8, 16, 32] {
        let (c, s) = model.apply(&sort, SizedValue::fin(n)).components().unwrap();
        if s.as_u64() != Some(n) {
            problems.push(format!("S({n}) = {s}"));
        }
        if n >= 1 && c.as_u64() != Some(mergesort_oracle(n)) {
            problems.push(format!("T({n}) = {c}, expected {}", mergesort_oracle(n)));
        }
    }

    let sort = find("mergesort").expect("corpus has mergesort").term;
    let cfg = CheckConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for len in 0..=32u64 {
        let contents: [Vec<u64>; 3] = [
            (0..len).collect(),
            (0..len).rev().collect(),
            (0..len).map(|_| rng.gen_range(0..100)).collect(),
        ];
        let mut bounds = Vec::new();
        for items in contents {
            let program = PcfTerm::app(sort.clone(), PcfTerm::nat_list(items));
            let r = check_bound_with(&program, Strategy::Cbv, &cfg).unwrap();
            checked += 1;
            if r.verdict != Verdict::Holds {
                problems.push(format!("length {len}: {}", r.verdict));
            }
            bounds.push((r.bound_cost, r.bound_potential));
        }
        if bounds.windows(2).any(|w| w[0] != w[1]) {
            problems.push(format!("length {len}: bound depends on contents: {bounds:?}"));
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "S(n) = n and T(n) = 7 + 2n + 2T(n/2) for n in 0..32; {checked} sorts of lengths 0..32 checked; {}",
            problems.iter().take(4).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn adequacy() -> Outcome {
    let (mut finite, mut seed) = (0, 0u64);
    let mut failures = Vec::new();
    while finite < 250 && seed < 5_000 {
        let (t, _) = gen_pcfc(seed, 5);
        seed += 1;
        let model = Model::new(budget());
        let m = match model.eval(&t, &Env::empty()) {
            SizedValue::Fin(m) => m,
            _ => continue,
        };
        finite += 1;
        match eval_pcfc(&t, Fuel(2_000_000)) {
            PcfcOutcome::Converged { value, .. } => match value.ground() {
                Some(k) if *k <= m => {}
                _ => failures.push(format!("seed {}: {value:?} vs {m}", seed - 1)),
            },
            other => failures.push(format!("seed {}: {other:?} with denotation {m}", seed - 1)),
        }
    }
    outcome(
        failures.is_empty() && finite >= 200,
        format!(
            "{finite} terms with finite denotation ({seed} generated), {} failures {}",
            failures.len(),
            failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

const INSTANCES_PER_RULE: usize = 120;
const RAT_BODIES: usize = 60;

/// Free ground variables of the rule instances, with random values.
fn env_for<'t>(names: &'t [(String, PcfcType)], rng: &mut ChaCha8Rng) -> Env<'t> {
    let mut env = Env::empty();
    for (x, _) in names {
        let v = if rng.gen_bool(0.1) { SizedValue::Bottom } else { SizedValue::fin(rng.gen_range(0..12)) };
        env = env.bind(x, v);
    }
    env
}

fn ground_pair(g: &mut PcfcGen) -> PcfcType {
    let a = g.ground_type();
    let b = g.ground_type();
    PcfcType::prod(a, b)
}

/// A random instance of `rule` over `ctx`, plus the arguments it is
/// observed at when its type is a function type.
fn rule_instance(rule: Rule, g: &mut PcfcGen, ctx: &mut PcfcCtx) -> (PcfcTerm, Vec<PcfcTerm>) {
    let ground = g.ground_type();
    let side = if g.rng().gen_bool(0.5) { Side::Left } else { Side::Right };
    let t = match rule {
        Rule::BetaApp => {
            let aty = match g.rng().gen_range(0..4) {
                0 => PcfcType::Nat,
                1 => PcfcType::Cost,
                2 => PcfcType::prod(PcfcType::Cost, PcfcType::Nat),
                _ => PcfcType::arrow(PcfcType::Nat, PcfcType::prod(PcfcType::Cost, PcfcType::Nat)),
            };
            let arg = g.term(ctx, &aty, 3);
            let x = g.fresh("b");
            ctx.push((x.clone(), aty.clone()));
            let body = g.term(ctx, &ground, 3);
            ctx.pop();
            PcfcTerm::app(PcfcTerm::lam(&x, aty, body), arg)
        }
        Rule::BetaPairArg => {
            let aty = ground_pair(g);
            let PcfcType::Prod(a, b) = &aty else { unreachable!() };
            let arg = PcfcTerm::pair(g.term(ctx, a, 2), g.term(ctx, b, 2));
            let x = g.fresh("p");
            ctx.push((x.clone(), aty.clone()));
            let body = g.term(ctx, &ground, 3);
            ctx.pop();
            PcfcTerm::app(PcfcTerm::lam(&x, aty, body), arg)
        }
        Rule::BetaProj => {
            let other = g.ground_type();
            PcfcTerm::proj(side, PcfcTerm::pair(g.term(ctx, &ground, 3), g.term(ctx, &other, 3)))
        }
        Rule::IfZero => PcfcTerm::ifz(PcfcTerm::num(0), g.term(ctx, &ground, 3), g.term(ctx, &ground, 3)),
        Rule::IfSame => {
            let n = g.term(ctx, &ground, 3);
            PcfcTerm::ifz(PcfcTerm::num(g.rng().gen_range(0..3)), n.clone(), n)
        }
        Rule::CostNormal => {
            let mut t = g.term(ctx, &PcfcType::Cost, 1);
            for _ in 0..g.rng().gen_range(1..5) {
                let s = match g.rng().gen_range(0..3) {
                    0 => PcfcTerm::One,
                    1 => PcfcTerm::Zero,
                    _ => g.term(ctx, &PcfcType::Cost, 2),
                };
                t = if g.rng().gen_bool(0.5) { PcfcTerm::cplus(s, t) } else { PcfcTerm::cplus(t, s) };
            }
            t
        }
        Rule::FoldArith => {
            let op = ArithOp::ALL[g.rng().gen_range(0..5)];
            let (a, b) = (g.rng().gen_range(0..20), g.rng().gen_range(0..6));
            PcfcTerm::arith(op, PcfcTerm::num(a), PcfcTerm::num(b))
        }
        Rule::ProjIf => {
            let pty = ground_pair(g);
            let n = g.term(ctx, &PcfcType::Nat, 2);
            PcfcTerm::proj(side, PcfcTerm::ifz(n, g.term(ctx, &pty, 3), g.term(ctx, &pty, 3)))
        }
        Rule::EtaLam => {
            let fty = PcfcType::arrow(PcfcType::Nat, ground.clone());
            let f = g.term(ctx, &fty, 3);
            let x = g.fresh("e");
            let t = PcfcTerm::lam(&x, PcfcType::Nat, PcfcTerm::app(f, PcfcTerm::var(&x)));
            return (t, (0..6).map(PcfcTerm::num).collect());
        }
        Rule::EtaPair => {
            let pty = ground_pair(g);
            let m = g.term(ctx, &pty, 3);
            PcfcTerm::pair(PcfcTerm::proj(Side::Left, m.clone()), PcfcTerm::proj(Side::Right, m))
        }
        Rule::SuccPred => {
            let m = g.term(ctx, &PcfcType::Nat, 3);
            PcfcTerm::arith(
                ArithOp::Sub,
                PcfcTerm::arith(ArithOp::Add, m, PcfcTerm::num(1)),
                PcfcTerm::num(1),
            )
        }
        Rule::Efix => match g.rng().gen_range(0..5) {
            0 => {
                let pty = ground_pair(g);
                PcfcTerm::proj(side, PcfcTerm::omega(pty))
            }
            1 => {
                let arg = g.term(ctx, &PcfcType::Nat, 2);
                PcfcTerm::app(PcfcTerm::omega(PcfcType::arrow(PcfcType::Nat, ground)), arg)
            }
            2 => PcfcTerm::arith(
                ArithOp::ALL[g.rng().gen_range(0..5)],
                PcfcTerm::omega(PcfcType::Nat),
                g.term(ctx, &PcfcType::Nat, 2),
            ),
            3 => PcfcTerm::arith(
                ArithOp::ALL[g.rng().gen_range(0..5)],
                g.term(ctx, &PcfcType::Nat, 2),
                PcfcTerm::omega(PcfcType::Nat),
            ),
            _ => PcfcTerm::cplus(
                g.term(ctx, &PcfcType::Cost, 2),
                PcfcTerm::cplus(PcfcTerm::omega(PcfcType::Cost), numc(2)),
            ),
        },
    };
    (t, Vec::new())
}

fn observe<'t>(model: &Model, t: &'t PcfcTerm, args: &'t [PcfcTerm], env: &Env<'t>) -> Vec<SizedValue<'t>> {
    let v = model.eval(t, env);
    if args.is_empty() {
        return vec![v];
    }
    args.iter().map(|a| model.apply(&v, model.eval(a, env))).collect()
}

fn occurrences(t: &PcfcTerm, x: &str) -> usize {
    let mut n = 0;
    t.walk(&mut |s| n += usize::from(matches!(s, PcfcTerm::Var(y) if y == x)));
    n
}

fn size_order_soundness() -> Outcome {
    let mut failures = Vec::new();
    let mut g = PcfcGen::new(99);
    g.omega_rate = 0.05;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ctx: PcfcCtx = vec![
        ("a".into(), PcfcType::Nat),
        ("b".into(), PcfcType::Nat),
        ("c".into(), PcfcType::Cost),
        ("k".into(), PcfcType::Cost),
    ];
    let mut per_rule = Vec::new();
    for rule in Rule::ALL {
        let mut count = 0;
        let mut attempts = 0;
        while count < INSTANCES_PER_RULE && attempts < 50 * INSTANCES_PER_RULE {
            attempts += 1;
            let (lhs, args) = rule_instance(rule, &mut g, &mut ctx);
            let Some(rhs) = rule.apply(&lhs) else { continue };
            count += 1;
            let names = ctx.clone();
            let env = env_for(&names, &mut rng);
            let model = Model::new(budget());
            let left = observe(&model, &lhs, &args, &env);
            let right = observe(&model, &rhs, &args, &env);
            let same = left.iter().zip(&right).all(|(v, w)| first_order_eq(v, w) == Ok(true));
            if !same {
                failures.push(format!("{}: {lhs} gave {left:?} but {rhs} gave {right:?}", rule.name()));
            }
        }
        per_rule.push(format!("{} {count}", rule.name()));
        if count < INSTANCES_PER_RULE {
            failures.push(format!("{}: only {count} instances", rule.name()));
        }
    }

    // Approximants of fixed points decrease in the size order.
    let mut bodies = 0;
    for i in 0..RAT_BODIES {
        let mut local: PcfcCtx = Vec::new();
        let (approxes, args): (Vec<PcfcTerm>, Vec<PcfcTerm>) = if i % 3 == 2 {
            let ty = g.ground_type();
            let x = g.fresh("x");
            local.push((x.clone(), ty.clone()));
            // Unfolding copies the body once per occurrence of `x`.
            let body = loop {
                let body = g.term(&mut local, &ty, 4);
                if occurrences(&body, &x) <= 2 {
                    break body;
                }
            };
            ((0..=11).map(|n| unfold_fix(&x, &ty, &body, n)).collect(), Vec::new())
        } else {
            let cod = if i % 3 == 0 { PcfcType::prod(PcfcType::Cost, PcfcType::Nat) } else { PcfcType::Cost };
            let (_, f, fty, inner) = g.recurrence_body(&mut local, &cod, 3, false);
            ((0..=11).map(|n| unfold_fix(&f, &fty, &inner, n)).collect(), (0..7).map(PcfcTerm::num).collect())
        };
        bodies += 1;
        let model = Model::new(budget());
        let env = Env::empty();
        let values: Vec<Vec<SizedValue<'_>>> = approxes.iter().map(|t| observe(&model, t, &args, &env)).collect();
        for n in 0..=10 {
            for (v, w) in values[n + 1].iter().zip(&values[n]) {
                if size_leq(v, w) != Ok(true) {
                    failures.push(format!("rat at n = {n}: {v} vs {w} for {}", approxes[1]));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "instances per rule: {}; {bodies} fixed-point bodies at n = 0..10; {} failures {}",
            per_rule.join(", "),
            failures.len(),
            failures.iter().take(2).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn determinacy() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut seed = 10_000;
    while checked < 250 && seed < 20_000 {
        let s = if seed % 2 == 0 { Strategy::Cbv } else { Strategy::Cbn };
        let t = gen_program(&GenConfig::new(seed, s));
        seed += 1;
        let first = eval_pcf(&t, s, FUEL);
        let EvalOutcome::Converged { fuel_used, .. } = first else { continue };
        checked += 1;
        for f in [fuel_used, 2 * fuel_used, 10 * fuel_used] {
            let again = eval_pcf(&t, s, Fuel(f));
            if again != first {
                failures.push(format!("seed {}: fuel {f} gave {again:?}", seed - 1));
            }
        }
        if fuel_used > 0 && eval_pcf(&t, s, Fuel(fuel_used - 1)) != EvalOutcome::OutOfFuel {
            failures.push(format!("seed {}: fuel {} is not minimal", seed - 1, fuel_used));
        }
    }
    outcome(
        failures.is_empty() && checked >= 200,
        format!(
            "{checked} converging programs at fuel minimal/2x/10x, {} failures {}",
            failures.len(),
            failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 cost preservation", cost_preservation),
        ("2 bounding theorem", bounding),
        ("3 exponentiation", exponentiation),
        ("4 merge sort", merge_sort),
        ("5 adequacy", adequacy),
        ("6 size-order soundness", size_order_soundness),
        ("7 determinacy and fuel monotonicity", determinacy),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut all = true;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = with_big_stack(run);
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {verdict} ({:.1}s) {}",
            start.elapsed().as_secs_f64(),
            result.detail
        );
        all &= result.pass;
    }
    if !all {
        std::process::exit(1);
    }
}
