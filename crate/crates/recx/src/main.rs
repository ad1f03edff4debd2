use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recx::check::{check_bound_with, diff_cost, CheckConfig, Verdict, DEFAULT_SAMPLES};
use recx::corpus::corpus;
use recx::gen::{gen_program, GenConfig};
use recx::report;
use recx::stack::with_big_stack;
use recx::syntax::{parse_pcf_as, parse_pcfc};
use recx_core::embed::embed_program;
use recx_core::extract::extract;
use recx_core::pcf::{typecheck_pcf, TypingContext};
use recx_core::pcf_machine::{eval_pcf_traced, EvalOutcome, Fuel, Tracer};
use recx_core::pcfc::{typecheck_pcfc, PcfcContext, PcfcTerm};
use recx_core::simplify::{simplify, RuleSet, DEFAULT_PASSES};
use recx_core::sized::{Budget, Env, Model, SizedValue};
use recx_core::{PcfTerm, Strategy};

#[derive(Parser)]
#[command(name = "recx", version, about = "Cost recurrences for PCF programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program, printing its value and cost.
    Run {
        #[command(flatten)]
        input: Input,
        /// Print a translation instead of running.
        #[arg(long, value_enum)]
        emit: Option<Emit>,
        #[command(flatten)]
        simp: Simplify,
        /// Log one line per evaluation rule on stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Print the CBPV embedding of a program.
    EmitCbpv {
        #[command(flatten)]
        input: Input,
    },
    /// Print the extracted recurrence of a program.
    Extract {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        simp: Simplify,
    },
    /// Denote a recurrence (of a program, or a .pcfc file) at sample points.
    EvalRecurrence {
        #[command(flatten)]
        input: Input,
        /// Points to apply the recurrence at.
        points: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        samples: Vec<u64>,
    },
    /// Compare a program's cost with the bound its recurrence predicts.
    CheckBound {
        #[command(flatten)]
        input: Input,
        /// Arguments at which function-typed results are sampled.
        #[arg(long, value_delimiter = ',')]
        samples: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Compare PCF and CBPV machine costs.
    DiffCost {
        #[command(flatten)]
        input: Input,
    },
    /// Check the corpus and a batch of generated programs.
    Suite {
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<Strategy>,
        #[arg(long, default_value_t = Fuel::DEFAULT.0)]
        fuel: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        samples: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Print generated programs, one per line.
    Gen {
        #[arg(long, value_parser = parse_strategy, default_value = "cbv")]
        strategy: Strategy,
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Input {
    /// Program file (`-` for stdin).
    file: PathBuf,
    /// Evaluation strategy; inferred from the program when omitted.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    #[arg(long, default_value_t = Fuel::DEFAULT.0)]
    fuel: u64,
}

#[derive(Args)]
struct Simplify {
    /// Simplify the recurrence; levels are cumulative: core, eta, lists.
    /// List axioms are always on for programs that use lists.
    #[arg(long, value_enum, num_args = 0..=1, require_equals = true, default_missing_value = "core")]
    simplify: Option<Level>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Core,
    Eta,
    Lists,
}

impl Level {
    fn rules(self) -> RuleSet {
        match self {
            Level::Core => RuleSet::CORE,
            Level::Eta => RuleSet { eta: true, lists: false },
            Level::Lists => RuleSet::ALL,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Cbpv,
    Recurrence,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    recx::syntax::parse_strategy(s).ok_or_else(|| format!("unknown strategy `{s}` (expected cbv or cbn)"))
}

/// Failures before or outside the checks proper.
#[derive(Debug, thiserror::Error)]
enum CliError {
    /// Unreadable, unparsable or ill-typed input.
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin()).map_err(|e| input_err(format!("stdin: {e}")));
    }
    std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn is_pcfc(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "pcfc")
}

/// Parses and typechecks a PCF program.
fn load(input: &Input) -> Result<(PcfTerm, Strategy), CliError> {
    let text = read(&input.file)?;
    let (t, s) = parse_pcf_as(&text, input.strategy)
        .map_err(|e| input_err(format!("{}:{e}", input.file.display())))?;
    typecheck_pcf(&TypingContext::new(), &t, s).map_err(|e| input_err(format!("{}: {e}", input.file.display())))?;
    Ok((t, s))
}

fn recurrence(t: &PcfTerm, s: Strategy, simp: &Simplify) -> Result<PcfcTerm, CliError> {
    let raw = extract(t, s).map_err(input_err)?.term;
    Ok(match simp.simplify {
        Some(level) => {
            let mut rules = level.rules();
            // The list axioms assume 0 <= 1 on costs, which only list
            // programs need.
            rules.lists |= t.mentions_lists();
            simplify(&raw, rules, DEFAULT_PASSES)
        }
        None => raw,
    })
}

struct StderrTrace;

impl Tracer for StderrTrace {
    fn rule(&mut self, depth: usize, rule: &'static str, term: &PcfTerm) {
        eprintln!("{:width$}{rule} {term}", "", width = depth.min(80));
    }
}

struct NoTrace;

impl Tracer for NoTrace {
    fn rule(&mut self, _: usize, _: &'static str, _: &PcfTerm) {}
}

fn samples_or_default(samples: &[u64]) -> Vec<u64> {
    if samples.is_empty() {
        DEFAULT_SAMPLES.to_vec()
    } else {
        samples.to_vec()
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let mut out = std::io::stdout().lock();
    let mut say = |line: String| {
        // A closed pipe is not an error worth reporting.
        let _ = writeln!(out, "{line}");
    };
    match cli.command {
        Command::Run { input, emit, simp, trace } => {
            let (t, s) = load(&input)?;
            match emit {
                Some(Emit::Cbpv) => say(embed_program(&t, s).map_err(input_err)?.term.to_string()),
                Some(Emit::Recurrence) => say(recurrence(&t, s, &simp)?.to_string()),
                None => {
                    let outcome = if trace {
                        eval_pcf_traced(&t, s, Fuel(input.fuel), &mut StderrTrace)
                    } else {
                        eval_pcf_traced(&t, s, Fuel(input.fuel), &mut NoTrace)
                    };
                    match outcome {
                        EvalOutcome::Converged { value, cost, fuel_used } => {
                            say(format!("value: {value}"));
                            say(format!("cost: {cost}"));
                            say(format!("fuel: {fuel_used}"));
                        }
                        EvalOutcome::OutOfFuel => say(format!("out of fuel after {} rules", input.fuel)),
                        EvalOutcome::Stuck(why) => return Err(CliError::Internal(format!("evaluation stuck: {why}"))),
                    }
                }
            }
        }
        Command::EmitCbpv { input } => {
            let (t, s) = load(&input)?;
            say(embed_program(&t, s).map_err(input_err)?.term.to_string());
        }
        Command::Extract { input, simp } => {
            let (t, s) = load(&input)?;
            say(recurrence(&t, s, &simp)?.to_string());
        }
        Command::EvalRecurrence { input, mut points, samples } => {
            points.extend(samples);
            let term = if is_pcfc(&input.file) {
                let text = read(&input.file)?;
                let term = parse_pcfc(&text).map_err(|e| input_err(format!("{}:{e}", input.file.display())))?;
                typecheck_pcfc(&PcfcContext::new(), &term)
                    .map_err(|e| input_err(format!("{}: {e}", input.file.display())))?;
                term
            } else {
                let (t, s) = load(&input)?;
                extract(&t, s).map_err(input_err)?.term
            };
            let model = Model::new(Budget::DEFAULT);
            let v = model.eval(&term, &Env::empty());
            // A program returning a function has a recurrence <cost, f>;
            // sample points go to f.
            let f = match v.components() {
                Some((_, p)) if p.is_function() && !v.is_bottom() => p,
                _ => v.clone(),
            };
            if points.is_empty() || !f.is_function() {
                say(v.to_string());
            } else {
                for n in points {
                    say(format!("{n}: {}", model.apply(&f, SizedValue::fin(n))));
                }
            }
        }
        Command::CheckBound { input, samples, output } => {
            let (t, s) = load(&input)?;
            let cfg = CheckConfig {
                fuel: Fuel(input.fuel),
                samples: samples_or_default(&samples),
                ..CheckConfig::default()
            };
            let id = input.file.display().to_string();
            let r = check_bound_with(&t, s, &cfg).map_err(input_err)?.with_id(id);
            say(match output {
                Output::Json => report::json_line(&r),
                Output::Text => report::text(&r).trim_end().to_string(),
            });
            if r.verdict == Verdict::Violation {
                return Ok(ExitCode::from(1));
            }
        }
        Command::DiffCost { input } => {
            let (t, s) = load(&input)?;
            let d = diff_cost(&t, s, Fuel(input.fuel)).map_err(input_err)?;
            let show = |c: Option<u64>| c.map_or_else(|| "inf".to_string(), |c| c.to_string());
            say(format!("pcf: {}", show(d.pcf_cost)));
            say(format!("cbpv: {}", show(d.cbpv_cost)));
            say(format!("equal: {}", d.equal));
            if !d.equal {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Suite { strategy, fuel, count, seed, samples, output } => {
            let cfg = CheckConfig {
                fuel: Fuel(fuel),
                samples: samples_or_default(&samples),
                ..CheckConfig::default()
            };
            let strategies: Vec<Strategy> = match strategy {
                Some(s) => vec![s],
                None => vec![Strategy::Cbv, Strategy::Cbn],
            };
            let mut programs: Vec<(String, PcfTerm, Strategy)> = corpus()
                .into_iter()
                .filter(|p| strategies.contains(&p.strategy))
                .map(|p| (p.name, p.term, p.strategy))
                .collect();
            for &s in &strategies {
                for k in seed..seed + count {
                    programs.push((format!("gen-{s}-{k}"), gen_program(&GenConfig::new(k, s)), s));
                }
            }
            let mut failed = false;
            for (id, t, s) in programs {
                let r = check_bound_with(&t, s, &cfg).map_err(input_err)?.with_id(id.clone());
                let d = diff_cost(&t, s, Fuel(fuel)).map_err(input_err)?;
                if !d.equal {
                    failed = true;
                    eprintln!("{id}: cost mismatch, pcf {:?} vs cbpv {:?}", d.pcf_cost, d.cbpv_cost);
                }
                failed |= r.verdict == Verdict::Violation;
                say(match output {
                    Output::Json => report::json_line(&r),
                    Output::Text => report::text(&r).trim_end().to_string(),
                });
            }
            if failed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Gen { strategy, count, seed } => {
            for k in seed..seed + count {
                say(gen_program(&GenConfig::new(k, strategy)).to_string());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Panics inside the pipeline are internal errors; the default hook has
    // already printed the message.
    let result = std::panic::catch_unwind(|| with_big_stack(move || run(cli)));
    match result {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("recx: {e}");
            ExitCode::from(e.code())
        }
        Err(_) => ExitCode::from(3),
    }
}

