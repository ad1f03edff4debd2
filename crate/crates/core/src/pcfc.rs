//! PCFc, the recurrence language: call-by-name PCF with a type of costs.
//!
//! Besides syntax and typing this module has the costless evaluator, the
//! syntactic fixed-point approximants `fix^n`, and the cost algebras that
//! give every CBPV computation type a way of absorbing extra cost.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::arith::{self, ArithOp};
use crate::cbpv::{CompType, ValType};
use crate::names::{prime_away, Name};
use crate::pcf::BinderPairs;
use crate::pcf_machine::Fuel;
use crate::Side;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PcfcType {
    Nat,
    Cost,
    Prod(Box<PcfcType>, Box<PcfcType>),
    Arrow(Box<PcfcType>, Box<PcfcType>),
}

impl PcfcType {
    pub fn prod(a: PcfcType, b: PcfcType) -> PcfcType {
        PcfcType::Prod(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: PcfcType, b: PcfcType) -> PcfcType {
        PcfcType::Arrow(Box::new(a), Box::new(b))
    }

    /// Nat and Cost, where the size order is decidable.
    pub fn is_ground(&self) -> bool {
        matches!(self, PcfcType::Nat | PcfcType::Cost)
    }

    /// Built from ground types with products only.
    pub fn is_first_order(&self) -> bool {
        match self {
            PcfcType::Nat | PcfcType::Cost => true,
            PcfcType::Prod(a, b) => a.is_first_order() && b.is_first_order(),
            PcfcType::Arrow(..) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PcfcTerm {
    Var(Name),
    Num(BigUint),
    Arith(ArithOp, Box<PcfcTerm>, Box<PcfcTerm>),
    IfZ(Box<PcfcTerm>, Box<PcfcTerm>, Box<PcfcTerm>),
    Pair(Box<PcfcTerm>, Box<PcfcTerm>),
    Proj(Side, Box<PcfcTerm>),
    Lam(Name, PcfcType, Box<PcfcTerm>),
    App(Box<PcfcTerm>, Box<PcfcTerm>),
    Fix(Name, PcfcType, Box<PcfcTerm>),
    Zero,
    One,
    CPlus(Box<PcfcTerm>, Box<PcfcTerm>),
}

impl PcfcTerm {
    pub fn var(x: &str) -> PcfcTerm {
        PcfcTerm::Var(x.to_string())
    }

    pub fn num(k: u64) -> PcfcTerm {
        PcfcTerm::Num(BigUint::from(k))
    }

    pub fn arith(op: ArithOp, m: PcfcTerm, n: PcfcTerm) -> PcfcTerm {
        PcfcTerm::Arith(op, Box::new(m), Box::new(n))
    }

    pub fn ifz(n: PcfcTerm, p: PcfcTerm, q: PcfcTerm) -> PcfcTerm {
        PcfcTerm::IfZ(Box::new(n), Box::new(p), Box::new(q))
    }

    pub fn pair(m: PcfcTerm, n: PcfcTerm) -> PcfcTerm {
        PcfcTerm::Pair(Box::new(m), Box::new(n))
    }

    pub fn proj(side: Side, m: PcfcTerm) -> PcfcTerm {
        PcfcTerm::Proj(side, Box::new(m))
    }

    pub fn lam(x: &str, ty: PcfcType, m: PcfcTerm) -> PcfcTerm {
        PcfcTerm::Lam(x.to_string(), ty, Box::new(m))
    }

    pub fn app(m: PcfcTerm, n: PcfcTerm) -> PcfcTerm {
        PcfcTerm::App(Box::new(m), Box::new(n))
    }

    pub fn fix(x: &str, ty: PcfcType, m: PcfcTerm) -> PcfcTerm {
        PcfcTerm::Fix(x.to_string(), ty, Box::new(m))
    }

    pub fn cplus(m: PcfcTerm, n: PcfcTerm) -> PcfcTerm {
        PcfcTerm::CPlus(Box::new(m), Box::new(n))
    }

    /// `fix x. x` at type `ty`: divergence, read as infinity.
    pub fn omega(ty: PcfcType) -> PcfcTerm {
        PcfcTerm::fix("x", ty, PcfcTerm::var("x"))
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, PcfcTerm::Fix(x, _, body) if matches!(&**body, PcfcTerm::Var(y) if y == x))
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal of every subterm.
    pub fn walk(&self, f: &mut dyn FnMut(&PcfcTerm)) {
        f(self);
        match self {
            PcfcTerm::Var(_) | PcfcTerm::Num(_) | PcfcTerm::Zero | PcfcTerm::One => {}
            PcfcTerm::Proj(_, m) | PcfcTerm::Lam(_, _, m) | PcfcTerm::Fix(_, _, m) => m.walk(f),
            PcfcTerm::Arith(_, m, n) | PcfcTerm::Pair(m, n) | PcfcTerm::App(m, n) | PcfcTerm::CPlus(m, n) => {
                m.walk(f);
                n.walk(f);
            }
            PcfcTerm::IfZ(a, b, c) => {
                a.walk(f);
                b.walk(f);
                c.walk(f);
            }
        }
    }

    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        self.walk(&mut |t| match t {
            PcfcTerm::Var(x) | PcfcTerm::Lam(x, ..) | PcfcTerm::Fix(x, ..) => {
                out.insert(x.clone());
            }
            _ => {}
        });
    }
}

/// The right-associated sum of `n` unit costs.
pub fn numc(n: u64) -> PcfcTerm {
    (0..n).fold(PcfcTerm::Zero, |acc, _| PcfcTerm::cplus(PcfcTerm::One, acc))
}

// ---------------------------------------------------------------------------
// Typing

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcfcError {
    pub at: String,
    pub message: String,
}

impl fmt::Display for PcfcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type error: {}\n  in: {}", self.message, self.at)
    }
}

pub type PcfcContext = Vec<(Name, PcfcType)>;

fn terr(t: &PcfcTerm, message: String) -> PcfcError {
    let mut at = t.to_string();
    if at.len() > 120 {
        let mut cut = 117;
        while !at.is_char_boundary(cut) {
            cut -= 1;
        }
        at.truncate(cut);
        at.push_str("...");
    }
    PcfcError { at, message }
}

pub fn typecheck_pcfc(ctx: &PcfcContext, t: &PcfcTerm) -> Result<PcfcType, PcfcError> {
    let mut ctx = ctx.clone();
    infer(&mut ctx, t)
}

fn infer(ctx: &mut PcfcContext, t: &PcfcTerm) -> Result<PcfcType, PcfcError> {
    let expect = |ctx: &mut PcfcContext, m: &PcfcTerm, want: &PcfcType| -> Result<(), PcfcError> {
        let got = infer(ctx, m)?;
        if &got == want {
            Ok(())
        } else {
            Err(terr(m, format!("expected {want}, found {got}")))
        }
    };
    match t {
        PcfcTerm::Var(x) => ctx
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, ty)| ty.clone())
            .ok_or_else(|| terr(t, format!("unbound variable `{x}`"))),
        PcfcTerm::Num(_) => Ok(PcfcType::Nat),
        PcfcTerm::Zero | PcfcTerm::One => Ok(PcfcType::Cost),
        PcfcTerm::CPlus(m, n) => {
            expect(ctx, m, &PcfcType::Cost)?;
            expect(ctx, n, &PcfcType::Cost)?;
            Ok(PcfcType::Cost)
        }
        PcfcTerm::Arith(_, m, n) => {
            expect(ctx, m, &PcfcType::Nat)?;
            expect(ctx, n, &PcfcType::Nat)?;
            Ok(PcfcType::Nat)
        }
        PcfcTerm::IfZ(n, p, q) => {
            expect(ctx, n, &PcfcType::Nat)?;
            let ty = infer(ctx, p)?;
            expect(ctx, q, &ty)?;
            Ok(ty)
        }
        PcfcTerm::Pair(m, n) => Ok(PcfcType::prod(infer(ctx, m)?, infer(ctx, n)?)),
        PcfcTerm::Proj(side, m) => match infer(ctx, m)? {
            PcfcType::Prod(a, b) => Ok(*side.pick(a, b)),
            other => Err(terr(t, format!("projection from {other}"))),
        },
        PcfcTerm::Lam(x, a, m) => {
            ctx.push((x.clone(), a.clone()));
            let b = infer(ctx, m);
            ctx.pop();
            Ok(PcfcType::arrow(a.clone(), b?))
        }
        PcfcTerm::App(m, n) => match infer(ctx, m)? {
            PcfcType::Arrow(a, b) => {
                expect(ctx, n, &a)?;
                Ok(*b)
            }
            other => Err(terr(t, format!("application of {other}"))),
        },
        PcfcTerm::Fix(x, a, m) => {
            ctx.push((x.clone(), a.clone()));
            let r = expect(ctx, m, a);
            ctx.pop();
            r?;
            Ok(a.clone())
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution and alpha-equivalence

pub fn free_vars(t: &PcfcTerm) -> BTreeSet<Name> {
    fn go<'a>(t: &'a PcfcTerm, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
        match t {
            PcfcTerm::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            PcfcTerm::Num(_) | PcfcTerm::Zero | PcfcTerm::One => {}
            PcfcTerm::Lam(x, _, m) | PcfcTerm::Fix(x, _, m) => {
                bound.push(x);
                go(m, bound, out);
                bound.pop();
            }
            PcfcTerm::Proj(_, m) => go(m, bound, out),
            PcfcTerm::Arith(_, m, n) | PcfcTerm::Pair(m, n) | PcfcTerm::App(m, n) | PcfcTerm::CPlus(m, n) => {
                go(m, bound, out);
                go(n, bound, out);
            }
            PcfcTerm::IfZ(a, b, c) => {
                go(a, bound, out);
                go(b, bound, out);
                go(c, bound, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn occurs_free(t: &PcfcTerm, x: &str) -> bool {
    match t {
        PcfcTerm::Var(y) => y == x,
        PcfcTerm::Num(_) | PcfcTerm::Zero | PcfcTerm::One => false,
        PcfcTerm::Lam(y, _, m) | PcfcTerm::Fix(y, _, m) => y != x && occurs_free(m, x),
        PcfcTerm::Proj(_, m) => occurs_free(m, x),
        PcfcTerm::Arith(_, m, n) | PcfcTerm::Pair(m, n) | PcfcTerm::App(m, n) | PcfcTerm::CPlus(m, n) => {
            occurs_free(m, x) || occurs_free(n, x)
        }
        PcfcTerm::IfZ(a, b, c) => occurs_free(a, x) || occurs_free(b, x) || occurs_free(c, x),
    }
}

/// Capture-avoiding `t[v/x]`.
pub fn subst(t: &PcfcTerm, x: &str, v: &PcfcTerm) -> PcfcTerm {
    let fv = free_vars(v);
    subst_with(t, x, v, &fv)
}

fn subst_with(t: &PcfcTerm, x: &str, v: &PcfcTerm, fv: &BTreeSet<Name>) -> PcfcTerm {
    let go = |m: &PcfcTerm| Box::new(subst_with(m, x, v, fv));
    match t {
        PcfcTerm::Var(y) if y == x => v.clone(),
        PcfcTerm::Var(_) | PcfcTerm::Num(_) | PcfcTerm::Zero | PcfcTerm::One => t.clone(),
        PcfcTerm::Arith(op, m, n) => PcfcTerm::Arith(*op, go(m), go(n)),
        PcfcTerm::IfZ(a, b, c) => PcfcTerm::IfZ(go(a), go(b), go(c)),
        PcfcTerm::Pair(m, n) => PcfcTerm::Pair(go(m), go(n)),
        PcfcTerm::App(m, n) => PcfcTerm::App(go(m), go(n)),
        PcfcTerm::CPlus(m, n) => PcfcTerm::CPlus(go(m), go(n)),
        PcfcTerm::Proj(side, m) => PcfcTerm::Proj(*side, go(m)),
        PcfcTerm::Lam(y, ty, m) | PcfcTerm::Fix(y, ty, m) => {
            let rebuild = |y: Name, m: PcfcTerm| match t {
                PcfcTerm::Lam(..) => PcfcTerm::Lam(y, ty.clone(), Box::new(m)),
                _ => PcfcTerm::Fix(y, ty.clone(), Box::new(m)),
            };
            if y == x || !occurs_free(m, x) {
                t.clone()
            } else if fv.contains(y) {
                let body_fv = free_vars(m);
                let fresh = prime_away(y, |c| fv.contains(c) || body_fv.contains(c) || c == x);
                let renamed = subst(m, y, &PcfcTerm::Var(fresh.clone()));
                rebuild(fresh, subst_with(&renamed, x, v, fv))
            } else {
                rebuild(y.clone(), subst_with(m, x, v, fv))
            }
        }
    }
}

pub fn alpha_eq(a: &PcfcTerm, b: &PcfcTerm) -> bool {
    fn go<'a>(a: &'a PcfcTerm, b: &'a PcfcTerm, env: &mut BinderPairs<'a>) -> bool {
        use PcfcTerm as T;
        match (a, b) {
            (T::Var(x), T::Var(y)) => env.vars_match(x, y),
            (T::Num(j), T::Num(k)) => j == k,
            (T::Zero, T::Zero) | (T::One, T::One) => true,
            (T::Arith(o1, m1, n1), T::Arith(o2, m2, n2)) => o1 == o2 && go(m1, m2, env) && go(n1, n2, env),
            (T::IfZ(a1, b1, c1), T::IfZ(a2, b2, c2)) => go(a1, a2, env) && go(b1, b2, env) && go(c1, c2, env),
            (T::Pair(m1, n1), T::Pair(m2, n2))
            | (T::App(m1, n1), T::App(m2, n2))
            | (T::CPlus(m1, n1), T::CPlus(m2, n2)) => go(m1, m2, env) && go(n1, n2, env),
            (T::Proj(s1, m1), T::Proj(s2, m2)) => s1 == s2 && go(m1, m2, env),
            (T::Lam(x, t1, m1), T::Lam(y, t2, m2)) | (T::Fix(x, t1, m1), T::Fix(y, t2, m2)) => {
                t1 == t2 && env.with(&[(x, y)], |env| go(m1, m2, env))
            }
            _ => false,
        }
    }
    go(a, b, &mut BinderPairs::new())
}

/// The `n`-th syntactic approximant of `fix x. body`: `fix^0` is `fix x. x`
/// and `fix^(n+1)` is `body[fix^n / x]`.
pub fn unfold_fix(x: &str, ty: &PcfcType, body: &PcfcTerm, n: usize) -> PcfcTerm {
    let mut approx = PcfcTerm::fix(x, ty.clone(), PcfcTerm::var(x));
    for _ in 0..n {
        approx = subst(body, x, &approx);
    }
    approx
}

// ---------------------------------------------------------------------------
// Costless evaluation

/// Canonical forms of the costless semantics. Costs are kept as counts
/// rather than as `numc` chains; see [`Canonical::to_term`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Canonical {
    Nat(BigUint),
    Cost(BigUint),
    /// A pair or a lambda; CBN leaves the insides unevaluated.
    Term(PcfcTerm),
}

impl Canonical {
    pub fn to_term(&self) -> PcfcTerm {
        match self {
            Canonical::Nat(k) => PcfcTerm::Num(k.clone()),
            Canonical::Cost(k) => {
                let n: u64 = k.try_into().expect("cost fits in u64");
                numc(n)
            }
            Canonical::Term(t) => t.clone(),
        }
    }

    /// The natural number carried by a ground canonical form.
    pub fn ground(&self) -> Option<&BigUint> {
        match self {
            Canonical::Nat(k) | Canonical::Cost(k) => Some(k),
            Canonical::Term(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PcfcOutcome {
    Converged { value: Canonical, fuel_used: u64 },
    OutOfFuel,
    Stuck(String),
}

impl PcfcOutcome {
    pub fn value(&self) -> Option<&Canonical> {
        match self {
            PcfcOutcome::Converged { value, .. } => Some(value),
            _ => None,
        }
    }
}

enum Halt {
    OutOfFuel,
    Stuck(String),
}

pub fn eval_pcfc(t: &PcfcTerm, fuel: Fuel) -> PcfcOutcome {
    let mut left = fuel.0;
    match eval(t.clone(), &mut left) {
        Ok(value) => PcfcOutcome::Converged {
            value,
            fuel_used: fuel.0 - left,
        },
        Err(Halt::OutOfFuel) => PcfcOutcome::OutOfFuel,
        Err(Halt::Stuck(s)) => PcfcOutcome::Stuck(s),
    }
}

fn eval(mut t: PcfcTerm, fuel: &mut u64) -> Result<Canonical, Halt> {
    loop {
        if *fuel == 0 {
            return Err(Halt::OutOfFuel);
        }
        *fuel -= 1;
        t = match t {
            PcfcTerm::Num(k) => return Ok(Canonical::Nat(k)),
            PcfcTerm::Zero => return Ok(Canonical::Cost(BigUint::zero())),
            PcfcTerm::One => return Ok(Canonical::Cost(BigUint::from(1u8))),
            PcfcTerm::Pair(..) | PcfcTerm::Lam(..) => return Ok(Canonical::Term(t)),
            PcfcTerm::Var(x) => return Err(Halt::Stuck(format!("free variable {x}"))),
            PcfcTerm::CPlus(m, n) => {
                let a = eval_ground(*m, fuel)?;
                let b = eval_ground(*n, fuel)?;
                let sum = a + b;
                if sum.bits() > arith::MAX_NUMERAL_BITS {
                    return Err(Halt::OutOfFuel);
                }
                return Ok(Canonical::Cost(sum));
            }
            PcfcTerm::Arith(op, m, n) => {
                let a = eval_ground(*m, fuel)?;
                let b = eval_ground(*n, fuel)?;
                let out = arith::apply(op, &a, &b).ok_or(Halt::OutOfFuel)?;
                return Ok(Canonical::Nat(out));
            }
            PcfcTerm::IfZ(n, p, q) => {
                if eval_ground(*n, fuel)?.is_zero() {
                    *p
                } else {
                    *q
                }
            }
            PcfcTerm::Proj(side, m) => match eval(*m, fuel)? {
                Canonical::Term(PcfcTerm::Pair(a, b)) => *side.pick(a, b),
                other => return Err(Halt::Stuck(format!("projection from {other:?}"))),
            },
            PcfcTerm::App(m, n) => match eval(*m, fuel)? {
                Canonical::Term(PcfcTerm::Lam(x, _, body)) => subst(&body, &x, &n),
                other => return Err(Halt::Stuck(format!("application of {other:?}"))),
            },
            PcfcTerm::Fix(x, ty, body) => {
                let me = PcfcTerm::Fix(x.clone(), ty, body.clone());
                subst(&body, &x, &me)
            }
        };
    }
}

fn eval_ground(t: PcfcTerm, fuel: &mut u64) -> Result<BigUint, Halt> {
    match eval(t, fuel)? {
        Canonical::Nat(k) | Canonical::Cost(k) => Ok(k),
        Canonical::Term(t) => Err(Halt::Stuck(format!("expected a number, found {t}"))),
    }
}

// ---------------------------------------------------------------------------
// Cost algebras

/// A carrier type with an action of costs on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostAlgebra {
    pub carrier: PcfcType,
    /// Open in exactly [`CostAlgebra::COST_VAR`] and [`CostAlgebra::CARRIER_VAR`].
    pub structure: PcfcTerm,
}

impl CostAlgebra {
    pub const COST_VAR: &'static str = "c";
    pub const CARRIER_VAR: &'static str = "x";

    /// `structure[c/c, e/x]`
    pub fn instantiate(&self, c: &PcfcTerm, e: &PcfcTerm) -> PcfcTerm {
        // Rename the carrier variable first so `c` cannot be captured by it.
        let fresh = prime_away(Self::CARRIER_VAR, |n| occurs_free(c, n) || occurs_free(&self.structure, n));
        let step = subst(&self.structure, Self::CARRIER_VAR, &PcfcTerm::Var(fresh.clone()));
        let step = subst(&step, Self::COST_VAR, c);
        subst(&step, &fresh, e)
    }
}

/// Carrier of the algebra for `B`, given potential types of value types.
pub fn carrier_of(b: &CompType, pot: &dyn Fn(&ValType) -> PcfcType) -> PcfcType {
    match b {
        CompType::Free(a) => PcfcType::prod(PcfcType::Cost, pot(a)),
        CompType::With(b1, b2) => PcfcType::prod(carrier_of(b1, pot), carrier_of(b2, pot)),
        CompType::Arrow(a, b) => PcfcType::arrow(pot(a), carrier_of(b, pot)),
    }
}

/// The algebra for `B`: free on `F A`, componentwise on `&`, pointwise on
/// functions.
pub fn algebra_for(b: &CompType, pot: &dyn Fn(&ValType) -> PcfcType) -> CostAlgebra {
    CostAlgebra {
        carrier: carrier_of(b, pot),
        structure: alg_apply(b, pot, &PcfcTerm::var(CostAlgebra::COST_VAR), &PcfcTerm::var(CostAlgebra::CARRIER_VAR)),
    }
}

/// `c +_B e`, built directly by recursion on `B`. A non-variable `e` that
/// would be duplicated is shared through a beta-redex instead.
pub fn alg_apply(b: &CompType, pot: &dyn Fn(&ValType) -> PcfcType, c: &PcfcTerm, e: &PcfcTerm) -> PcfcTerm {
    let e_dup = matches!(b, CompType::Free(_) | CompType::With(..)) && !is_atomic(e);
    let c_dup = matches!(b, CompType::With(..)) && !is_atomic(c);
    if e_dup || c_dup {
        let mut avoid = free_vars(c);
        avoid.extend(free_vars(e));
        let (m, k) = (fresh_in("m", &avoid), fresh_in("k", &avoid));
        let c_use = if c_dup { PcfcTerm::Var(k.clone()) } else { c.clone() };
        let e_use = if e_dup { PcfcTerm::Var(m.clone()) } else { e.clone() };
        let mut out = alg_apply(b, pot, &c_use, &e_use);
        if e_dup {
            out = PcfcTerm::app(PcfcTerm::lam(&m, carrier_of(b, pot), out), e.clone());
        }
        if c_dup {
            out = PcfcTerm::app(PcfcTerm::lam(&k, PcfcType::Cost, out), c.clone());
        }
        return out;
    }
    match b {
        CompType::Free(_) => PcfcTerm::pair(
            PcfcTerm::cplus(c.clone(), PcfcTerm::proj(Side::Left, e.clone())),
            PcfcTerm::proj(Side::Right, e.clone()),
        ),
        CompType::With(b1, b2) => PcfcTerm::pair(
            alg_apply(b1, pot, c, &PcfcTerm::proj(Side::Left, e.clone())),
            alg_apply(b2, pot, c, &PcfcTerm::proj(Side::Right, e.clone())),
        ),
        CompType::Arrow(a, body) => {
            let y = prime_away("y", |n| occurs_free(c, n) || occurs_free(e, n));
            let applied = PcfcTerm::app(e.clone(), PcfcTerm::Var(y.clone()));
            PcfcTerm::lam(&y, pot(a), alg_apply(body, pot, c, &applied))
        }
    }
}

fn fresh_in(base: &str, avoid: &BTreeSet<Name>) -> Name {
    if avoid.contains(base) {
        prime_away(base, |n| avoid.contains(n))
    } else {
        base.to_string()
    }
}

/// Terms cheap enough to copy: variables and constants.
pub fn is_atomic(t: &PcfcTerm) -> bool {
    matches!(t, PcfcTerm::Var(_) | PcfcTerm::Num(_) | PcfcTerm::Zero | PcfcTerm::One)
}

// ---------------------------------------------------------------------------
// Printing

impl fmt::Display for PcfcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfcType::Nat => f.write_str("nat"),
            PcfcType::Cost => f.write_str("cost"),
            PcfcType::Prod(a, b) => write!(f, "(prod {a} {b})"),
            PcfcType::Arrow(a, b) => write!(f, "(-> {a} {b})"),
        }
    }
}

impl fmt::Display for PcfcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfcTerm::Var(x) => f.write_str(x),
            PcfcTerm::Num(k) => write!(f, "(num {k})"),
            PcfcTerm::Arith(op, m, n) => write!(f, "({op} {m} {n})"),
            PcfcTerm::IfZ(n, p, q) => write!(f, "(ifz {n} {p} {q})"),
            PcfcTerm::Pair(m, n) => write!(f, "(pair {m} {n})"),
            PcfcTerm::Proj(side, m) => write!(f, "(proj{} {m})", side.index()),
            PcfcTerm::Lam(x, ty, m) => write!(f, "(lam ({x} {ty}) {m})"),
            PcfcTerm::App(m, n) => write!(f, "(app {m} {n})"),
            PcfcTerm::Fix(x, ty, m) => write!(f, "(fix ({x} {ty}) {m})"),
            PcfcTerm::Zero => f.write_str("czero"),
            PcfcTerm::One => f.write_str("cone"),
            PcfcTerm::CPlus(m, n) => write!(f, "(cplus {m} {n})"),
        }
    }
}
