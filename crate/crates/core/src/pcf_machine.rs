//! Cost-instrumented big-step evaluation of PCF.
//!
//! Applications and projections cost one unit each; every other rule is
//! free. Evaluation is substitution based and bounded by [`Fuel`], which
//! counts rule applications rather than cost.

use alloc::format;
use alloc::string::String;

use crate::arith;
use crate::pcf::{subst, PcfTerm, Strategy};

/// Budget of big-step rule applications.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fuel(pub u64);

impl Fuel {
    pub const DEFAULT: Fuel = Fuel(100_000);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    Converged {
        value: PcfTerm,
        cost: u64,
        /// Rule applications used; the smallest fuel that converges.
        fuel_used: u64,
    },
    OutOfFuel,
    Stuck(String),
}

impl EvalOutcome {
    pub fn cost(&self) -> Option<u64> {
        match self {
            EvalOutcome::Converged { cost, .. } => Some(*cost),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&PcfTerm> {
        match self {
            EvalOutcome::Converged { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Receives one call per rule application.
pub trait Tracer {
    fn rule(&mut self, depth: usize, rule: &'static str, term: &PcfTerm);
}

pub struct NoTrace;

impl Tracer for NoTrace {
    fn rule(&mut self, _: usize, _: &'static str, _: &PcfTerm) {}
}

pub(crate) enum Halt {
    OutOfFuel,
    Stuck(String),
}

pub fn eval_pcf(t: &PcfTerm, s: Strategy, fuel: Fuel) -> EvalOutcome {
    eval_pcf_traced(t, s, fuel, &mut NoTrace)
}

pub fn eval_pcf_traced(t: &PcfTerm, s: Strategy, fuel: Fuel, tracer: &mut dyn Tracer) -> EvalOutcome {
    let mut machine = Machine {
        strategy: s,
        fuel: fuel.0,
        tracer,
    };
    match machine.eval(t.clone(), 0) {
        Ok((value, cost)) => EvalOutcome::Converged {
            value,
            cost,
            fuel_used: fuel.0 - machine.fuel,
        },
        Err(Halt::OutOfFuel) => EvalOutcome::OutOfFuel,
        Err(Halt::Stuck(reason)) => EvalOutcome::Stuck(reason),
    }
}

/// Observed cost, with `None` standing for a run that did not finish.
pub fn observed_cost(t: &PcfTerm, s: Strategy, fuel: Fuel) -> Option<u64> {
    eval_pcf(t, s, fuel).cost()
}

struct Machine<'a> {
    strategy: Strategy,
    fuel: u64,
    tracer: &'a mut dyn Tracer,
}

fn stuck<T>(what: &str, t: &PcfTerm) -> Result<T, Halt> {
    Err(Halt::Stuck(format!("{what}: {t}")))
}

impl Machine<'_> {
    fn tick(&mut self, depth: usize, rule: &'static str, t: &PcfTerm) -> Result<(), Halt> {
        if self.fuel == 0 {
            return Err(Halt::OutOfFuel);
        }
        self.fuel -= 1;
        self.tracer.rule(depth, rule, t);
        Ok(())
    }

    fn eval(&mut self, mut t: PcfTerm, depth: usize) -> Result<(PcfTerm, u64), Halt> {
        let cbv = self.strategy == Strategy::Cbv;
        let mut cost = 0u64;
        loop {
            match t {
                PcfTerm::Var(_) => return stuck("free variable", &t),
                _ if t.is_value(self.strategy) => {
                    self.tick(depth, "value", &t)?;
                    return Ok((t, cost));
                }
                PcfTerm::Arith(op, m, n) => {
                    self.tick(depth, "arith", &PcfTerm::Arith(op, m.clone(), n.clone()))?;
                    let (a, c1) = self.eval_num(*m, depth + 1)?;
                    let (b, c2) = self.eval_num(*n, depth + 1)?;
                    let out = arith::apply(op, &a, &b).ok_or(Halt::OutOfFuel)?;
                    return Ok((PcfTerm::Num(out), cost + c1 + c2));
                }
                PcfTerm::IfZ(n, p, q) => {
                    self.tick(depth, "ifz", &n)?;
                    let (k, c) = self.eval_num(*n, depth + 1)?;
                    cost += c;
                    t = if num_traits::Zero::is_zero(&k) { *p } else { *q };
                }
                PcfTerm::Pair(m, n) => {
                    // Only reached under CBV with a component still to evaluate.
                    self.tick(depth, "pair", &PcfTerm::Pair(m.clone(), n.clone()))?;
                    let (v, c1) = self.eval(*m, depth + 1)?;
                    let (w, c2) = self.eval(*n, depth + 1)?;
                    return Ok((PcfTerm::pair(v, w), cost + c1 + c2));
                }
                PcfTerm::Proj(side, m) => {
                    self.tick(depth, "proj", &m)?;
                    let (p, c) = self.eval(*m, depth + 1)?;
                    cost += c + 1;
                    match p {
                        PcfTerm::Pair(l, r) => {
                            let chosen = *side.pick(l, r);
                            if cbv {
                                return Ok((chosen, cost));
                            }
                            t = chosen;
                        }
                        other => return stuck("projection from non-pair", &other),
                    }
                }
                PcfTerm::App(m, n) => {
                    self.tick(depth, "app", &m)?;
                    let (f, c1) = self.eval(*m, depth + 1)?;
                    cost += c1 + 1;
                    let arg = if cbv {
                        let (v, c2) = self.eval(*n, depth + 1)?;
                        cost += c2;
                        v
                    } else {
                        *n
                    };
                    t = match f {
                        PcfTerm::Lam(x, _, body) => subst(&body, &x, &arg),
                        PcfTerm::Rec { fun: ref fname, arg: ref x, ref body, .. } if cbv => {
                            let unrolled = subst(body, fname, &f);
                            subst(&unrolled, x, &arg)
                        }
                        other => return stuck("application of non-function", &other),
                    };
                }
                PcfTerm::Fix(ref x, _, ref body) if !cbv => {
                    self.tick(depth, "fix", &t)?;
                    let unrolled = subst(body, x, &t);
                    t = unrolled;
                }
                PcfTerm::Cons(h, tl) if cbv => {
                    self.tick(depth, "cons", &PcfTerm::Cons(h.clone(), tl.clone()))?;
                    let (v, c1) = self.eval(*h, depth + 1)?;
                    let (w, c2) = self.eval(*tl, depth + 1)?;
                    return Ok((PcfTerm::cons(v, w), cost + c1 + c2));
                }
                PcfTerm::LCase { scrut, nil, head, tail, cons } if cbv => {
                    self.tick(depth, "lcase", &scrut)?;
                    let (l, c) = self.eval(*scrut, depth + 1)?;
                    cost += c;
                    t = match l {
                        PcfTerm::Nil => *nil,
                        PcfTerm::Cons(v, w) => subst(&subst(&cons, &head, &v), &tail, &w),
                        other => return stuck("list case on non-list", &other),
                    };
                }
                other => return stuck("construct not available under this strategy", &other),
            }
        }
    }

    fn eval_num(&mut self, t: PcfTerm, depth: usize) -> Result<(num_bigint::BigUint, u64), Halt> {
        match self.eval(t, depth)? {
            (PcfTerm::Num(k), c) => Ok((k, c)),
            (other, _) => stuck("expected a numeral", &other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ArithOp;
    use crate::pcf::PcfType;
    use crate::Side;

    fn converged(t: &PcfTerm, s: Strategy) -> (PcfTerm, u64) {
        match eval_pcf(t, s, Fuel(10_000)) {
            EvalOutcome::Converged { value, cost, .. } => (value, cost),
            other => panic!("did not converge: {other:?}"),
        }
    }

    #[test]
    fn canonical_forms_are_free() {
        assert_eq!(converged(&PcfTerm::num(7), Strategy::Cbv), (PcfTerm::num(7), 0));
        assert_eq!(observed_cost(&PcfTerm::num(7), Strategy::Cbn, Fuel(1)), Some(0));
    }

    #[test]
    fn application_costs_one() {
        let id = PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x"));
        let t = PcfTerm::app(id, PcfTerm::num(0));
        assert_eq!(converged(&t, Strategy::Cbv), (PcfTerm::num(0), 1));
        assert_eq!(converged(&t, Strategy::Cbn), (PcfTerm::num(0), 1));
    }

    #[test]
    fn projection_costs_one() {
        let t = PcfTerm::proj(Side::Left, PcfTerm::pair(PcfTerm::num(2), PcfTerm::num(3)));
        assert_eq!(converged(&t, Strategy::Cbv), (PcfTerm::num(2), 1));
        assert_eq!(converged(&t, Strategy::Cbn), (PcfTerm::num(2), 1));
    }

    #[test]
    fn omega_runs_out_of_fuel() {
        let omega = PcfTerm::fix("x", PcfType::Nat, PcfTerm::var("x"));
        assert_eq!(eval_pcf(&omega, Strategy::Cbn, Fuel(500)), EvalOutcome::OutOfFuel);
        assert_eq!(observed_cost(&omega, Strategy::Cbn, Fuel(500)), None);
    }

    #[test]
    fn cbn_arguments_are_not_evaluated() {
        let omega = PcfTerm::fix("x", PcfType::Nat, PcfTerm::var("x"));
        let k = PcfTerm::lam("y", PcfType::Nat, PcfTerm::num(1));
        let t = PcfTerm::app(k, omega);
        assert_eq!(converged(&t, Strategy::Cbn), (PcfTerm::num(1), 1));
    }

    #[test]
    fn cbv_recursion_counts_every_call() {
        // count down from 3: four calls in total
        let body = PcfTerm::ifz(
            PcfTerm::var("x"),
            PcfTerm::num(0),
            PcfTerm::app(
                PcfTerm::var("f"),
                PcfTerm::arith(ArithOp::Sub, PcfTerm::var("x"), PcfTerm::num(1)),
            ),
        );
        let f = PcfTerm::rec("f", "x", PcfType::Nat, PcfType::Nat, body);
        let t = PcfTerm::app(f, PcfTerm::num(3));
        assert_eq!(converged(&t, Strategy::Cbv), (PcfTerm::num(0), 4));
    }

    #[test]
    fn lists_evaluate_elementwise_without_cost() {
        let l = PcfTerm::cons(
            PcfTerm::arith(ArithOp::Add, PcfTerm::num(1), PcfTerm::num(1)),
            PcfTerm::Nil,
        );
        let t = PcfTerm::lcase(l, PcfTerm::num(0), "h", "t", PcfTerm::var("h"));
        assert_eq!(converged(&t, Strategy::Cbv), (PcfTerm::num(2), 0));
    }

    #[test]
    fn fuel_used_is_minimal() {
        let id = PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x"));
        let t = PcfTerm::app(id, PcfTerm::num(0));
        let used = match eval_pcf(&t, Strategy::Cbv, Fuel(100)) {
            EvalOutcome::Converged { fuel_used, .. } => fuel_used,
            other => panic!("{other:?}"),
        };
        assert!(matches!(eval_pcf(&t, Strategy::Cbv, Fuel(used)), EvalOutcome::Converged { .. }));
        assert_eq!(eval_pcf(&t, Strategy::Cbv, Fuel(used - 1)), EvalOutcome::OutOfFuel);
    }
}
