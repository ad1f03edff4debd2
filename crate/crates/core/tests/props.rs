//! Property tests against a direct interpreter for a first-order fragment:
//! numerals, arithmetic, ifz and let (as a beta redex), with one free
//! variable `x`.

use std::collections::HashMap;

use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::strategy::Strategy as Gen;
use recx_core::arith::{self, ArithOp};
use recx_core::pcf::{alpha_eq, free_vars, subst, typecheck_pcf, TypingContext};
use recx_core::pcf_machine::{eval_pcf, EvalOutcome, Fuel};
use recx_core::{PcfTerm, PcfType, Strategy};

fn op() -> impl Gen<Value = ArithOp> {
    prop::sample::select(ArithOp::ALL.to_vec())
}

/// Nat-typed terms whose free variables are among `x`, `y0`, `y1`, ...
fn nat_term() -> impl Gen<Value = PcfTerm> {
    let leaf = prop_oneof![
        (0u64..40).prop_map(PcfTerm::num),
        Just(PcfTerm::var("x")),
        (0usize..3).prop_map(|i| PcfTerm::var(&format!("y{i}"))),
    ];
    leaf.prop_recursive(4, 40, 3, |inner| {
        prop_oneof![
            (op(), inner.clone(), inner.clone()).prop_map(|(o, m, n)| PcfTerm::arith(o, m, n)),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, c)| PcfTerm::ifz(a, b, c)),
            (0usize..3, inner.clone(), inner).prop_map(|(i, m, n)| PcfTerm::let_in(
                &format!("y{i}"),
                PcfType::Nat,
                m,
                n
            )),
        ]
    })
}

/// Closes the `y`s left free by binding them to zero.
fn close_ys(t: PcfTerm) -> PcfTerm {
    (0..3).fold(t, |t, i| PcfTerm::let_in(&format!("y{i}"), PcfType::Nat, PcfTerm::num(0), t))
}

#[derive(Clone)]
enum Slot {
    Value(BigUint),
    Thunk(PcfTerm, Env),
}

type Env = HashMap<String, Slot>;

/// Returns (value, number of applications), evaluating let-bound
/// arguments once by value or at every use by name.
fn oracle(t: &PcfTerm, env: &Env, s: Strategy) -> (BigUint, u64) {
    match t {
        PcfTerm::Num(k) => (k.clone(), 0),
        PcfTerm::Var(x) => match &env[x.as_str()] {
            Slot::Value(v) => (v.clone(), 0),
            Slot::Thunk(m, e) => oracle(m, e, s),
        },
        PcfTerm::Arith(o, m, n) => {
            let (a, c) = oracle(m, env, s);
            let (b, d) = oracle(n, env, s);
            let zero = BigUint::from(0u8);
            let v = match o {
                ArithOp::Add => &a + &b,
                ArithOp::Sub => if a > b { &a - &b } else { zero },
                ArithOp::Mul => &a * &b,
                ArithOp::Div => if b == zero { zero } else { &a / &b },
                ArithOp::Mod => if b == zero { zero } else { &a % &b },
            };
            (v, c + d)
        }
        PcfTerm::IfZ(a, b, c) => {
            let (v, k) = oracle(a, env, s);
            let (w, j) = if v == BigUint::from(0u8) { oracle(b, env, s) } else { oracle(c, env, s) };
            (w, k + j)
        }
        PcfTerm::App(f, arg) => {
            let PcfTerm::Lam(y, _, body) = &**f else { unreachable!() };
            let mut inner = env.clone();
            let mut cost = 1;
            match s {
                Strategy::Cbv => {
                    let (v, c) = oracle(arg, env, s);
                    cost += c;
                    inner.insert(y.to_string(), Slot::Value(v));
                }
                Strategy::Cbn => {
                    inner.insert(y.to_string(), Slot::Thunk((**arg).clone(), env.clone()));
                }
            }
            let (v, c) = oracle(body, &inner, s);
            (v, cost + c)
        }
        other => unreachable!("outside the fragment: {other}"),
    }
}

fn strategy() -> impl Gen<Value = Strategy> {
    prop_oneof![Just(Strategy::Cbv), Just(Strategy::Cbn)]
}

proptest! {
    #[test]
    fn arithmetic_matches_u128(a in 0u64..1 << 40, b in 0u64..1 << 20, o in op()) {
        let (x, y) = (a as u128, b as u128);
        let want = match o {
            ArithOp::Add => x + y,
            ArithOp::Sub => x.saturating_sub(y),
            ArithOp::Mul => x * y,
            ArithOp::Div => x.checked_div(y).unwrap_or(0),
            ArithOp::Mod => x.checked_rem(y).unwrap_or(0),
        };
        prop_assert_eq!(arith::apply(o, &a.into(), &b.into()), Some(BigUint::from(want)));
    }

    #[test]
    fn substitution_preserves_typing(t in nat_term(), k in 0u64..100, s in strategy()) {
        let t = close_ys(t);
        let ctx = TypingContext::new().extend("x", PcfType::Nat);
        prop_assert_eq!(typecheck_pcf(&ctx, &t, s), Ok(PcfType::Nat));
        let closed = subst(&t, "x", &PcfTerm::num(k));
        prop_assert!(free_vars(&closed).is_empty());
        prop_assert_eq!(typecheck_pcf(&TypingContext::new(), &closed, s), Ok(PcfType::Nat));
    }

    #[test]
    fn machine_agrees_with_interpreter(t in nat_term(), k in 0u64..100, s in strategy()) {
        let t = close_ys(t);
        let mut env = Env::new();
        env.insert("x".into(), Slot::Value(k.into()));
        let (value, cost) = oracle(&t, &env, s);
        let closed = subst(&t, "x", &PcfTerm::num(k));
        match eval_pcf(&closed, s, Fuel(1_000_000)) {
            EvalOutcome::Converged { value: v, cost: c, .. } => {
                prop_assert_eq!(v, PcfTerm::Num(value));
                prop_assert_eq!(c, cost);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn evaluation_is_deterministic(t in nat_term(), s in strategy()) {
        let closed = subst(&close_ys(t), "x", &PcfTerm::num(3));
        prop_assert_eq!(eval_pcf(&closed, s, Fuel(1_000_000)), eval_pcf(&closed, s, Fuel(1_000_000)));
    }

    #[test]
    fn renaming_a_binder_is_alpha_equivalent(t in nat_term(), body in nat_term()) {
        let a = PcfTerm::let_in("y0", PcfType::Nat, t.clone(), body.clone());
        let renamed = subst(&body, "y0", &PcfTerm::var("fresh"));
        let b = PcfTerm::let_in("fresh", PcfType::Nat, t, renamed);
        prop_assert!(alpha_eq(&a, &b));
    }
}
