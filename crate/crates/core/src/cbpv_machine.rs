//! Cost big-step evaluation of CBPV.
//!
//! Only `charge` costs anything; every other rule adds up the costs of its
//! premises. Like [`crate::pcf_machine`] this is substitution based and
//! bounded by fuel counting rule applications.

use alloc::format;
use alloc::string::String;

use num_traits::Zero;

use crate::arith;
use crate::cbpv::{subst_comp, Comp, Value};
use crate::pcf_machine::Fuel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CbpvOutcome {
    /// A terminal computation: `return`, a pair or a lambda.
    Terminal { term: Comp, cost: u64, fuel_used: u64 },
    OutOfFuel,
    Stuck(String),
}

impl CbpvOutcome {
    pub fn cost(&self) -> Option<u64> {
        match self {
            CbpvOutcome::Terminal { cost, .. } => Some(*cost),
            _ => None,
        }
    }

    pub fn terminal(&self) -> Option<&Comp> {
        match self {
            CbpvOutcome::Terminal { term, .. } => Some(term),
            _ => None,
        }
    }
}

pub trait CbpvTracer {
    fn rule(&mut self, depth: usize, rule: &'static str, term: &Comp);
}

pub struct NoTrace;

impl CbpvTracer for NoTrace {
    fn rule(&mut self, _: usize, _: &'static str, _: &Comp) {}
}

enum Halt {
    OutOfFuel,
    Stuck(String),
}

pub fn eval_cbpv(m: &Comp, fuel: Fuel) -> CbpvOutcome {
    eval_cbpv_traced(m, fuel, &mut NoTrace)
}

pub fn eval_cbpv_traced(m: &Comp, fuel: Fuel, tracer: &mut dyn CbpvTracer) -> CbpvOutcome {
    let mut machine = Machine { fuel: fuel.0, tracer };
    match machine.eval(m.clone(), 0) {
        Ok((term, cost)) => CbpvOutcome::Terminal {
            term,
            cost,
            fuel_used: fuel.0 - machine.fuel,
        },
        Err(Halt::OutOfFuel) => CbpvOutcome::OutOfFuel,
        Err(Halt::Stuck(reason)) => CbpvOutcome::Stuck(reason),
    }
}

struct Machine<'a> {
    fuel: u64,
    tracer: &'a mut dyn CbpvTracer,
}

fn stuck<T>(what: &str, shown: &dyn core::fmt::Display) -> Result<T, Halt> {
    Err(Halt::Stuck(format!("{what}: {shown}")))
}

impl Machine<'_> {
    fn tick(&mut self, depth: usize, rule: &'static str, m: &Comp) -> Result<(), Halt> {
        if self.fuel == 0 {
            return Err(Halt::OutOfFuel);
        }
        self.fuel -= 1;
        self.tracer.rule(depth, rule, m);
        Ok(())
    }

    fn eval(&mut self, mut m: Comp, depth: usize) -> Result<(Comp, u64), Halt> {
        let mut cost = 0u64;
        loop {
            if m.is_terminal() {
                self.tick(depth, "terminal", &m)?;
                return Ok((m, cost));
            }
            self.tick(depth, rule_name(&m), &m)?;
            m = match m {
                Comp::Bind(x, first, rest) => {
                    let (t, c) = self.eval(*first, depth + 1)?;
                    cost += c;
                    match t {
                        Comp::Return(v) => subst_comp(&rest, &x, &v),
                        other => return stuck("bind of a non-return", &other),
                    }
                }
                Comp::Force(Value::Thunk(body)) => *body,
                Comp::Force(v) => return stuck("force of a non-thunk", &v),
                Comp::App(f, v) => {
                    let (t, c) = self.eval(*f, depth + 1)?;
                    cost += c;
                    match t {
                        Comp::Lam(x, _, body) => subst_comp(&body, &x, &v),
                        other => return stuck("application of a non-lambda", &other),
                    }
                }
                Comp::Proj(side, inner) => {
                    let (t, c) = self.eval(*inner, depth + 1)?;
                    cost += c;
                    match t {
                        Comp::Pair(a, b) => *side.pick(a, b),
                        other => return stuck("projection from a non-pair", &other),
                    }
                }
                Comp::Split(Value::Pair(a, b), x1, x2, body) => {
                    let once = subst_comp(&body, &x1, &a);
                    subst_comp(&once, &x2, &b)
                }
                Comp::Split(v, ..) => return stuck("split of a non-pair", &v),
                Comp::IfZ(Value::Num(k), p, q) => {
                    if k.is_zero() {
                        *p
                    } else {
                        *q
                    }
                }
                Comp::IfZ(v, ..) => return stuck("ifz on a non-numeral", &v),
                Comp::Calc { var, op, lhs: Value::Num(a), rhs: Value::Num(b), body } => {
                    let out = arith::apply(op, &a, &b).ok_or(Halt::OutOfFuel)?;
                    subst_comp(&body, &var, &Value::Num(out))
                }
                Comp::Calc { lhs, .. } => return stuck("calc on a non-numeral", &lhs),
                Comp::Charge(inner) => {
                    cost += 1;
                    *inner
                }
                Comp::Fix(x, ty, body) => {
                    let me = Value::thunk(Comp::Fix(x.clone(), ty, body.clone()));
                    subst_comp(&body, &x, &me)
                }
                Comp::LCase { scrut, nil, head, tail, cons } => match scrut {
                    Value::Nil => *nil,
                    Value::Cons(h, t) => subst_comp(&subst_comp(&cons, &head, &h), &tail, &t),
                    other => return stuck("list case on a non-list", &other),
                },
                Comp::Return(_) | Comp::Pair(..) | Comp::Lam(..) => unreachable!("terminal handled above"),
            };
        }
    }
}

fn rule_name(m: &Comp) -> &'static str {
    match m {
        Comp::Return(_) | Comp::Pair(..) | Comp::Lam(..) => "terminal",
        Comp::Bind(..) => "bind",
        Comp::Force(_) => "force",
        Comp::App(..) => "app",
        Comp::Proj(..) => "proj",
        Comp::Split(..) => "split",
        Comp::IfZ(..) => "ifz",
        Comp::Calc { .. } => "calc",
        Comp::Charge(_) => "charge",
        Comp::Fix(..) => "fix",
        Comp::LCase { .. } => "lcase",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ArithOp;
    use crate::cbpv::{CompType, ValType};
    use crate::Side;

    fn run(m: &Comp) -> (Comp, u64) {
        match eval_cbpv(m, Fuel(10_000)) {
            CbpvOutcome::Terminal { term, cost, .. } => (term, cost),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn return_is_free() {
        let m = Comp::ret(Value::num(3));
        assert_eq!(run(&m), (m.clone(), 0));
    }

    #[test]
    fn charge_costs_one() {
        assert_eq!(run(&Comp::charge(Comp::ret(Value::num(0)))).1, 1);
    }

    #[test]
    fn bind_sums_premises() {
        let m = Comp::bind(
            "x",
            Comp::charge(Comp::ret(Value::num(1))),
            Comp::charge(Comp::ret(Value::var("x"))),
        );
        assert_eq!(run(&m), (Comp::ret(Value::num(1)), 2));
    }

    #[test]
    fn calc_uses_shared_arithmetic() {
        let m = Comp::calc("v", ArithOp::Div, Value::num(7), Value::num(0), Comp::ret(Value::var("v")));
        assert_eq!(run(&m).0, Comp::ret(Value::num(0)));
    }

    #[test]
    fn lazy_pairs_only_run_the_chosen_side() {
        let omega = Comp::fix("x", CompType::free(ValType::Nat), Comp::Force(Value::var("x")));
        let m = Comp::proj(Side::Right, Comp::pair(omega.clone(), Comp::charge(Comp::ret(Value::num(2)))));
        assert_eq!(run(&m), (Comp::ret(Value::num(2)), 1));
        assert_eq!(eval_cbpv(&omega, Fuel(1000)), CbpvOutcome::OutOfFuel);
    }

    #[test]
    fn recursion_through_thunks() {
        // count down, charging once per step
        let ty = CompType::arrow(ValType::Nat, CompType::free(ValType::Nat));
        let body = Comp::lam(
            "n",
            ValType::Nat,
            Comp::ifz(
                Value::var("n"),
                Comp::ret(Value::num(0)),
                Comp::calc(
                    "m",
                    ArithOp::Sub,
                    Value::var("n"),
                    Value::num(1),
                    Comp::charge(Comp::app(Comp::Force(Value::var("f")), Value::var("m"))),
                ),
            ),
        );
        let m = Comp::app(Comp::fix("f", ty, body), Value::num(5));
        assert_eq!(run(&m), (Comp::ret(Value::num(0)), 5));
    }
}
