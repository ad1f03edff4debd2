//! Call-by-Push-Value with natural numbers, general recursion, lists and a
//! single effect, `charge`, which incurs one unit of cost.
//!
//! Values and computations are separate Rust types, so a computation can
//! never sit in value position (or the reverse) once a term is built. The
//! parser is the only place that can encounter that mistake, and reports it
//! as [`CbpvError::Polarity`].

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::arith::ArithOp;
use crate::names::{prime_away, Name};
use crate::pcf::BinderPairs;
use crate::Side;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValType {
    Nat,
    Prod(Box<ValType>, Box<ValType>),
    /// `U B`, thunks of computations of type `B`.
    Thunk(Box<CompType>),
    List(Box<ValType>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompType {
    /// `F A`, computations returning a value of type `A`.
    Free(Box<ValType>),
    /// Negative (lazy) product `B1 & B2`.
    With(Box<CompType>, Box<CompType>),
    Arrow(Box<ValType>, Box<CompType>),
}

impl ValType {
    pub fn prod(a: ValType, b: ValType) -> ValType {
        ValType::Prod(Box::new(a), Box::new(b))
    }

    pub fn thunk(b: CompType) -> ValType {
        ValType::Thunk(Box::new(b))
    }

    pub fn list(a: ValType) -> ValType {
        ValType::List(Box::new(a))
    }
}

impl CompType {
    pub fn free(a: ValType) -> CompType {
        CompType::Free(Box::new(a))
    }

    pub fn with(a: CompType, b: CompType) -> CompType {
        CompType::With(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: ValType, b: CompType) -> CompType {
        CompType::Arrow(Box::new(a), Box::new(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Var(Name),
    Num(BigUint),
    Pair(Box<Value>, Box<Value>),
    Thunk(Box<Comp>),
    Nil,
    Cons(Box<Value>, Box<Value>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Comp {
    Return(Value),
    Bind(Name, Box<Comp>, Box<Comp>),
    Force(Value),
    Lam(Name, ValType, Box<Comp>),
    App(Box<Comp>, Value),
    Pair(Box<Comp>, Box<Comp>),
    Proj(Side, Box<Comp>),
    Split(Value, Name, Name, Box<Comp>),
    IfZ(Value, Box<Comp>, Box<Comp>),
    /// `calc v = lhs op rhs in body`
    Calc {
        var: Name,
        op: ArithOp,
        lhs: Value,
        rhs: Value,
        body: Box<Comp>,
    },
    Charge(Box<Comp>),
    /// Recursion; `var` is bound to a thunk of the whole fixed point.
    Fix(Name, CompType, Box<Comp>),
    LCase {
        scrut: Value,
        nil: Box<Comp>,
        head: Name,
        tail: Name,
        cons: Box<Comp>,
    },
}

impl Value {
    pub fn var(x: &str) -> Value {
        Value::Var(x.to_string())
    }

    pub fn num(k: u64) -> Value {
        Value::Num(BigUint::from(k))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn thunk(m: Comp) -> Value {
        Value::Thunk(Box::new(m))
    }

    pub fn cons(h: Value, t: Value) -> Value {
        Value::Cons(Box::new(h), Box::new(t))
    }
}

impl Comp {
    pub fn ret(v: Value) -> Comp {
        Comp::Return(v)
    }

    pub fn bind(x: &str, m: Comp, n: Comp) -> Comp {
        Comp::Bind(x.to_string(), Box::new(m), Box::new(n))
    }

    pub fn lam(x: &str, ty: ValType, m: Comp) -> Comp {
        Comp::Lam(x.to_string(), ty, Box::new(m))
    }

    pub fn app(m: Comp, v: Value) -> Comp {
        Comp::App(Box::new(m), v)
    }

    pub fn pair(m: Comp, n: Comp) -> Comp {
        Comp::Pair(Box::new(m), Box::new(n))
    }

    pub fn proj(side: Side, m: Comp) -> Comp {
        Comp::Proj(side, Box::new(m))
    }

    pub fn split(v: Value, x1: &str, x2: &str, n: Comp) -> Comp {
        Comp::Split(v, x1.to_string(), x2.to_string(), Box::new(n))
    }

    pub fn ifz(v: Value, p: Comp, q: Comp) -> Comp {
        Comp::IfZ(v, Box::new(p), Box::new(q))
    }

    pub fn calc(var: &str, op: ArithOp, lhs: Value, rhs: Value, body: Comp) -> Comp {
        Comp::Calc {
            var: var.to_string(),
            op,
            lhs,
            rhs,
            body: Box::new(body),
        }
    }

    pub fn charge(m: Comp) -> Comp {
        Comp::Charge(Box::new(m))
    }

    pub fn fix(x: &str, ty: CompType, m: Comp) -> Comp {
        Comp::Fix(x.to_string(), ty, Box::new(m))
    }

    pub fn lcase(scrut: Value, nil: Comp, head: &str, tail: &str, cons: Comp) -> Comp {
        Comp::LCase {
            scrut,
            nil: Box::new(nil),
            head: head.to_string(),
            tail: tail.to_string(),
            cons: Box::new(cons),
        }
    }

    /// Terminal computations: `return`, pairs and lambdas.
    pub fn is_terminal(&self) -> bool {
        matches!(self, Comp::Return(_) | Comp::Pair(..) | Comp::Lam(..))
    }

    /// Number of `charge` nodes in the term, including under thunks.
    pub fn charge_count(&self) -> usize {
        let mut n = 0;
        walk_comp(self, &mut |c| {
            if matches!(c, Comp::Charge(_)) {
                n += 1
            }
        });
        n
    }

    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        walk_comp(self, &mut |c| match c {
            Comp::Bind(x, ..) | Comp::Lam(x, ..) | Comp::Fix(x, ..) | Comp::Calc { var: x, .. } => {
                out.insert(x.clone());
            }
            Comp::Split(_, a, b, _) | Comp::LCase { head: a, tail: b, .. } => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            _ => {}
        });
        let mut vars = BTreeSet::new();
        collect_vars_comp(self, &mut vars);
        out.extend(vars);
    }
}

fn collect_vars_val(v: &Value, out: &mut BTreeSet<Name>) {
    match v {
        Value::Var(x) => {
            out.insert(x.clone());
        }
        Value::Num(_) | Value::Nil => {}
        Value::Pair(a, b) | Value::Cons(a, b) => {
            collect_vars_val(a, out);
            collect_vars_val(b, out);
        }
        Value::Thunk(m) => collect_vars_comp(m, out),
    }
}

fn collect_vars_comp(m: &Comp, out: &mut BTreeSet<Name>) {
    for_each_child(m, &mut |child| match child {
        Child::Val(v) => collect_vars_val(v, out),
        Child::Comp(c) => collect_vars_comp(c, out),
    });
}

enum Child<'a> {
    Val(&'a Value),
    Comp(&'a Comp),
}

fn for_each_child<'a>(m: &'a Comp, f: &mut dyn FnMut(Child<'a>)) {
    match m {
        Comp::Return(v) | Comp::Force(v) => f(Child::Val(v)),
        Comp::Bind(_, a, b) | Comp::Pair(a, b) => {
            f(Child::Comp(a));
            f(Child::Comp(b));
        }
        Comp::Lam(_, _, a) | Comp::Proj(_, a) | Comp::Charge(a) | Comp::Fix(_, _, a) => f(Child::Comp(a)),
        Comp::App(a, v) => {
            f(Child::Comp(a));
            f(Child::Val(v));
        }
        Comp::Split(v, _, _, a) => {
            f(Child::Val(v));
            f(Child::Comp(a));
        }
        Comp::IfZ(v, a, b) | Comp::LCase { scrut: v, nil: a, cons: b, .. } => {
            f(Child::Val(v));
            f(Child::Comp(a));
            f(Child::Comp(b));
        }
        Comp::Calc { lhs, rhs, body, .. } => {
            f(Child::Val(lhs));
            f(Child::Val(rhs));
            f(Child::Comp(body));
        }
    }
}

/// Visits every computation node, descending through thunks.
fn walk_comp(m: &Comp, f: &mut dyn FnMut(&Comp)) {
    f(m);
    fn walk_val(v: &Value, f: &mut dyn FnMut(&Comp)) {
        match v {
            Value::Thunk(m) => walk_comp(m, f),
            Value::Pair(a, b) | Value::Cons(a, b) => {
                walk_val(a, f);
                walk_val(b, f);
            }
            _ => {}
        }
    }
    for_each_child(m, &mut |child| match child {
        Child::Val(v) => walk_val(v, f),
        Child::Comp(c) => walk_comp(c, f),
    });
}

// ---------------------------------------------------------------------------
// Typing

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CbpvError {
    Type { at: String, message: String },
    /// A computation written where a value is expected, or vice versa.
    Polarity { at: String, message: String },
}

impl fmt::Display for CbpvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CbpvError::Type { at, message } => write!(f, "type error: {message}\n  in: {at}"),
            CbpvError::Polarity { at, message } => write!(f, "polarity error: {message}\n  in: {at}"),
        }
    }
}

/// Typing context; only value types can be bound.
pub type CbpvContext = Vec<(Name, ValType)>;

fn terr(at: &dyn fmt::Display, message: String) -> CbpvError {
    let mut at = at.to_string();
    if at.len() > 120 {
        let mut cut = 117;
        while !at.is_char_boundary(cut) {
            cut -= 1;
        }
        at.truncate(cut);
        at.push_str("...");
    }
    CbpvError::Type { at, message }
}

pub fn typecheck_val(ctx: &CbpvContext, v: &Value) -> Result<ValType, CbpvError> {
    let mut ctx = ctx.clone();
    infer_val(&mut ctx, v)
}

pub fn typecheck_comp(ctx: &CbpvContext, m: &Comp) -> Result<CompType, CbpvError> {
    let mut ctx = ctx.clone();
    infer_comp(&mut ctx, m)
}

fn lookup<'c>(ctx: &'c CbpvContext, x: &str) -> Option<&'c ValType> {
    ctx.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
}

fn under<T>(ctx: &mut CbpvContext, binds: &[(&str, ValType)], f: impl FnOnce(&mut CbpvContext) -> T) -> T {
    for (x, t) in binds {
        ctx.push((x.to_string(), t.clone()));
    }
    let out = f(ctx);
    ctx.truncate(ctx.len() - binds.len());
    out
}

fn check_val(ctx: &mut CbpvContext, v: &Value, want: &ValType) -> Result<(), CbpvError> {
    match (v, want) {
        (Value::Nil, ValType::List(_)) => Ok(()),
        (Value::Cons(h, t), ValType::List(elem)) => {
            check_val(ctx, h, elem)?;
            check_val(ctx, t, want)
        }
        (Value::Pair(a, b), ValType::Prod(ta, tb)) => {
            check_val(ctx, a, ta)?;
            check_val(ctx, b, tb)
        }
        (Value::Thunk(m), ValType::Thunk(b)) => check_comp(ctx, m, b),
        _ => {
            let got = infer_val(ctx, v)?;
            if &got == want {
                Ok(())
            } else {
                Err(terr(v, format!("expected {want}, found {got}")))
            }
        }
    }
}

fn infer_val(ctx: &mut CbpvContext, v: &Value) -> Result<ValType, CbpvError> {
    match v {
        Value::Var(x) => lookup(ctx, x)
            .cloned()
            .ok_or_else(|| terr(v, format!("unbound variable `{x}`"))),
        Value::Num(_) => Ok(ValType::Nat),
        Value::Pair(a, b) => Ok(ValType::prod(infer_val(ctx, a)?, infer_val(ctx, b)?)),
        Value::Thunk(m) => Ok(ValType::thunk(infer_comp(ctx, m)?)),
        Value::Nil => Ok(ValType::list(ValType::Nat)),
        Value::Cons(h, t) => {
            let list = ValType::list(infer_val(ctx, h)?);
            check_val(ctx, t, &list)?;
            Ok(list)
        }
    }
}

fn check_comp(ctx: &mut CbpvContext, m: &Comp, want: &CompType) -> Result<(), CbpvError> {
    match (m, want) {
        (Comp::Return(v), CompType::Free(a)) => check_val(ctx, v, a),
        (Comp::Lam(x, a, body), CompType::Arrow(wa, wb)) if a == &**wa => {
            under(ctx, &[(x, a.clone())], |ctx| check_comp(ctx, body, wb))
        }
        (Comp::Pair(a, b), CompType::With(ta, tb)) => {
            check_comp(ctx, a, ta)?;
            check_comp(ctx, b, tb)
        }
        (Comp::IfZ(v, p, q), _) => {
            check_val(ctx, v, &ValType::Nat)?;
            check_comp(ctx, p, want)?;
            check_comp(ctx, q, want)
        }
        (Comp::Charge(inner), _) => check_comp(ctx, inner, want),
        (Comp::Bind(x, first, rest), _) => {
            let a = returned_type(ctx, first)?;
            under(ctx, &[(x, a)], |ctx| check_comp(ctx, rest, want))
        }
        (Comp::Calc { var, op: _, lhs, rhs, body }, _) => {
            check_val(ctx, lhs, &ValType::Nat)?;
            check_val(ctx, rhs, &ValType::Nat)?;
            under(ctx, &[(var, ValType::Nat)], |ctx| check_comp(ctx, body, want))
        }
        (Comp::Split(v, x1, x2, body), _) => {
            let (a1, a2) = split_types(ctx, v)?;
            under(ctx, &[(x1, a1), (x2, a2)], |ctx| check_comp(ctx, body, want))
        }
        (Comp::LCase { scrut, nil, head, tail, cons }, _) => {
            let elem = list_elem(ctx, scrut)?;
            check_comp(ctx, nil, want)?;
            let list = ValType::list(elem.clone());
            under(ctx, &[(head, elem), (tail, list)], |ctx| check_comp(ctx, cons, want))
        }
        _ => {
            let got = infer_comp(ctx, m)?;
            if &got == want {
                Ok(())
            } else {
                Err(terr(m, format!("expected {want}, found {got}")))
            }
        }
    }
}

fn returned_type(ctx: &mut CbpvContext, m: &Comp) -> Result<ValType, CbpvError> {
    match infer_comp(ctx, m)? {
        CompType::Free(a) => Ok(*a),
        other => Err(terr(m, format!("bind of a non-returner of type {other}"))),
    }
}

fn split_types(ctx: &mut CbpvContext, v: &Value) -> Result<(ValType, ValType), CbpvError> {
    match infer_val(ctx, v)? {
        ValType::Prod(a, b) => Ok((*a, *b)),
        other => Err(terr(v, format!("split of non-product {other}"))),
    }
}

fn list_elem(ctx: &mut CbpvContext, v: &Value) -> Result<ValType, CbpvError> {
    match infer_val(ctx, v)? {
        ValType::List(a) => Ok(*a),
        other => Err(terr(v, format!("list case on {other}"))),
    }
}

/// Infers one branch and checks the other, avoiding inference on a branch
/// that merely returns `nil`.
fn comp_branches(
    ctx: &mut CbpvContext,
    first: &Comp,
    second: &Comp,
    second_binds: &[(&str, ValType)],
) -> Result<CompType, CbpvError> {
    let returns_nil = |c: &Comp| matches!(c, Comp::Return(Value::Nil));
    if returns_nil(first) && !returns_nil(second) {
        let ty = under(ctx, second_binds, |ctx| infer_comp(ctx, second))?;
        check_comp(ctx, first, &ty)?;
        Ok(ty)
    } else {
        let ty = infer_comp(ctx, first)?;
        under(ctx, second_binds, |ctx| check_comp(ctx, second, &ty))?;
        Ok(ty)
    }
}

fn infer_comp(ctx: &mut CbpvContext, m: &Comp) -> Result<CompType, CbpvError> {
    match m {
        Comp::Return(v) => Ok(CompType::free(infer_val(ctx, v)?)),
        Comp::Bind(x, first, rest) => {
            let a = returned_type(ctx, first)?;
            under(ctx, &[(x, a)], |ctx| infer_comp(ctx, rest))
        }
        Comp::Force(v) => match infer_val(ctx, v)? {
            ValType::Thunk(b) => Ok(*b),
            other => Err(terr(m, format!("force of non-thunk {other}"))),
        },
        Comp::Lam(x, a, body) => {
            let b = under(ctx, &[(x, a.clone())], |ctx| infer_comp(ctx, body))?;
            Ok(CompType::arrow(a.clone(), b))
        }
        Comp::App(f, v) => match infer_comp(ctx, f)? {
            CompType::Arrow(a, b) => {
                check_val(ctx, v, &a)?;
                Ok(*b)
            }
            other => Err(terr(m, format!("application of {other}"))),
        },
        Comp::Pair(a, b) => Ok(CompType::with(infer_comp(ctx, a)?, infer_comp(ctx, b)?)),
        Comp::Proj(side, inner) => match infer_comp(ctx, inner)? {
            CompType::With(a, b) => Ok(*side.pick(a, b)),
            other => Err(terr(m, format!("projection from {other}"))),
        },
        Comp::Split(v, x1, x2, body) => {
            let (a1, a2) = split_types(ctx, v)?;
            under(ctx, &[(x1, a1), (x2, a2)], |ctx| infer_comp(ctx, body))
        }
        Comp::IfZ(v, p, q) => {
            check_val(ctx, v, &ValType::Nat)?;
            comp_branches(ctx, p, q, &[])
        }
        Comp::Calc { var, lhs, rhs, body, .. } => {
            check_val(ctx, lhs, &ValType::Nat)?;
            check_val(ctx, rhs, &ValType::Nat)?;
            under(ctx, &[(var, ValType::Nat)], |ctx| infer_comp(ctx, body))
        }
        Comp::Charge(inner) => infer_comp(ctx, inner),
        Comp::Fix(x, b, body) => {
            under(ctx, &[(x, ValType::thunk(b.clone()))], |ctx| check_comp(ctx, body, b))?;
            Ok(b.clone())
        }
        Comp::LCase { scrut, nil, head, tail, cons } => {
            let elem = list_elem(ctx, scrut)?;
            let list = ValType::list(elem.clone());
            comp_branches(ctx, nil, cons, &[(head, elem), (tail, list)])
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution of values for variables

pub fn free_vars_comp(m: &Comp) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    fv_comp(m, &mut Vec::new(), &mut out);
    out
}

pub fn free_vars_val(v: &Value) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    fv_val(v, &mut Vec::new(), &mut out);
    out
}

fn fv_val<'a>(v: &'a Value, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
    match v {
        Value::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Value::Num(_) | Value::Nil => {}
        Value::Pair(a, b) | Value::Cons(a, b) => {
            fv_val(a, bound, out);
            fv_val(b, bound, out);
        }
        Value::Thunk(m) => fv_comp(m, bound, out),
    }
}

fn fv_comp<'a>(m: &'a Comp, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
    let scoped = |names: &[&'a str], body: &'a Comp, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>| {
        bound.extend_from_slice(names);
        fv_comp(body, bound, out);
        bound.truncate(bound.len() - names.len());
    };
    match m {
        Comp::Return(v) | Comp::Force(v) => fv_val(v, bound, out),
        Comp::Bind(x, a, b) => {
            fv_comp(a, bound, out);
            scoped(&[x], b, bound, out);
        }
        Comp::Lam(x, _, a) | Comp::Fix(x, _, a) => scoped(&[x], a, bound, out),
        Comp::App(a, v) => {
            fv_comp(a, bound, out);
            fv_val(v, bound, out);
        }
        Comp::Pair(a, b) => {
            fv_comp(a, bound, out);
            fv_comp(b, bound, out);
        }
        Comp::Proj(_, a) | Comp::Charge(a) => fv_comp(a, bound, out),
        Comp::Split(v, x1, x2, body) => {
            fv_val(v, bound, out);
            scoped(&[x1, x2], body, bound, out);
        }
        Comp::IfZ(v, a, b) => {
            fv_val(v, bound, out);
            fv_comp(a, bound, out);
            fv_comp(b, bound, out);
        }
        Comp::Calc { var, lhs, rhs, body, .. } => {
            fv_val(lhs, bound, out);
            fv_val(rhs, bound, out);
            scoped(&[var], body, bound, out);
        }
        Comp::LCase { scrut, nil, head, tail, cons } => {
            fv_val(scrut, bound, out);
            fv_comp(nil, bound, out);
            scoped(&[head, tail], cons, bound, out);
        }
    }
}

/// Capture-avoiding `m[v/x]`.
pub fn subst_comp(m: &Comp, x: &str, v: &Value) -> Comp {
    let fv = free_vars_val(v);
    Subst { x, v, fv: &fv }.comp(m)
}

/// Capture-avoiding `w[v/x]`.
pub fn subst_val(w: &Value, x: &str, v: &Value) -> Value {
    let fv = free_vars_val(v);
    Subst { x, v, fv: &fv }.val(w)
}

struct Subst<'a> {
    x: &'a str,
    v: &'a Value,
    fv: &'a BTreeSet<Name>,
}

impl Subst<'_> {
    /// Renames the binders in `names` that would capture a free variable of
    /// the substituted value; returns the new names and body. `None` if one
    /// of the binders shadows the substituted variable.
    fn enter(&self, names: &[&Name], body: &Comp) -> Option<(Vec<Name>, Comp)> {
        if names.iter().any(|n| n.as_str() == self.x) {
            return None;
        }
        let mut names: Vec<Name> = names.iter().map(|n| (*n).clone()).collect();
        let mut body = body.clone();
        for i in 0..names.len() {
            if self.fv.contains(&names[i]) {
                let body_fv = free_vars_comp(&body);
                let fresh = prime_away(&names[i], |c| {
                    self.fv.contains(c) || body_fv.contains(c) || c == self.x || names.iter().any(|n| n == c)
                });
                body = subst_comp(&body, &names[i], &Value::Var(fresh.clone()));
                names[i] = fresh;
            }
        }
        let body = self.comp(&body);
        Some((names, body))
    }

    fn val(&self, w: &Value) -> Value {
        match w {
            Value::Var(y) if y == self.x => self.v.clone(),
            Value::Var(_) | Value::Num(_) | Value::Nil => w.clone(),
            Value::Pair(a, b) => Value::pair(self.val(a), self.val(b)),
            Value::Cons(a, b) => Value::cons(self.val(a), self.val(b)),
            Value::Thunk(m) => Value::thunk(self.comp(m)),
        }
    }

    fn comp(&self, m: &Comp) -> Comp {
        match m {
            Comp::Return(v) => Comp::Return(self.val(v)),
            Comp::Force(v) => Comp::Force(self.val(v)),
            Comp::Bind(x, a, b) => {
                let a = self.comp(a);
                match self.enter(&[x], b) {
                    Some((names, b)) => Comp::Bind(names[0].clone(), Box::new(a), Box::new(b)),
                    None => Comp::Bind(x.clone(), Box::new(a), b.clone()),
                }
            }
            Comp::Lam(x, ty, body) => match self.enter(&[x], body) {
                Some((names, b)) => Comp::Lam(names[0].clone(), ty.clone(), Box::new(b)),
                None => m.clone(),
            },
            Comp::Fix(x, ty, body) => match self.enter(&[x], body) {
                Some((names, b)) => Comp::Fix(names[0].clone(), ty.clone(), Box::new(b)),
                None => m.clone(),
            },
            Comp::App(a, v) => Comp::App(Box::new(self.comp(a)), self.val(v)),
            Comp::Pair(a, b) => Comp::pair(self.comp(a), self.comp(b)),
            Comp::Proj(side, a) => Comp::proj(*side, self.comp(a)),
            Comp::Charge(a) => Comp::charge(self.comp(a)),
            Comp::Split(v, x1, x2, body) => {
                let v = self.val(v);
                match self.enter(&[x1, x2], body) {
                    Some((names, b)) => Comp::Split(v, names[0].clone(), names[1].clone(), Box::new(b)),
                    None => Comp::Split(v, x1.clone(), x2.clone(), body.clone()),
                }
            }
            Comp::IfZ(v, a, b) => Comp::IfZ(self.val(v), Box::new(self.comp(a)), Box::new(self.comp(b))),
            Comp::Calc { var, op, lhs, rhs, body } => {
                let lhs = self.val(lhs);
                let rhs = self.val(rhs);
                let (var, body) = match self.enter(&[var], body) {
                    Some((names, b)) => (names[0].clone(), b),
                    None => (var.clone(), (**body).clone()),
                };
                Comp::Calc {
                    var,
                    op: *op,
                    lhs,
                    rhs,
                    body: Box::new(body),
                }
            }
            Comp::LCase { scrut, nil, head, tail, cons } => {
                let scrut = self.val(scrut);
                let nil = self.comp(nil);
                let (head, tail, cons) = match self.enter(&[head, tail], cons) {
                    Some((names, b)) => (names[0].clone(), names[1].clone(), b),
                    None => (head.clone(), tail.clone(), (**cons).clone()),
                };
                Comp::LCase {
                    scrut,
                    nil: Box::new(nil),
                    head,
                    tail,
                    cons: Box::new(cons),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

pub fn alpha_eq_comp(a: &Comp, b: &Comp) -> bool {
    alpha_comp(a, b, &mut BinderPairs::new())
}

pub fn alpha_eq_val(a: &Value, b: &Value) -> bool {
    alpha_val(a, b, &mut BinderPairs::new())
}

fn alpha_val<'a>(a: &'a Value, b: &'a Value, env: &mut BinderPairs<'a>) -> bool {
    match (a, b) {
        (Value::Var(x), Value::Var(y)) => env.vars_match(x, y),
        (Value::Num(j), Value::Num(k)) => j == k,
        (Value::Nil, Value::Nil) => true,
        (Value::Pair(a1, b1), Value::Pair(a2, b2)) | (Value::Cons(a1, b1), Value::Cons(a2, b2)) => {
            alpha_val(a1, a2, env) && alpha_val(b1, b2, env)
        }
        (Value::Thunk(m1), Value::Thunk(m2)) => alpha_comp(m1, m2, env),
        _ => false,
    }
}

fn alpha_comp<'a>(a: &'a Comp, b: &'a Comp, env: &mut BinderPairs<'a>) -> bool {
    match (a, b) {
        (Comp::Return(v), Comp::Return(w)) | (Comp::Force(v), Comp::Force(w)) => alpha_val(v, w, env),
        (Comp::Bind(x, a1, b1), Comp::Bind(y, a2, b2)) => {
            alpha_comp(a1, a2, env) && env.with(&[(x, y)], |env| alpha_comp(b1, b2, env))
        }
        (Comp::Lam(x, t1, m1), Comp::Lam(y, t2, m2)) => {
            t1 == t2 && env.with(&[(x, y)], |env| alpha_comp(m1, m2, env))
        }
        (Comp::Fix(x, t1, m1), Comp::Fix(y, t2, m2)) => {
            t1 == t2 && env.with(&[(x, y)], |env| alpha_comp(m1, m2, env))
        }
        (Comp::App(m1, v1), Comp::App(m2, v2)) => alpha_comp(m1, m2, env) && alpha_val(v1, v2, env),
        (Comp::Pair(a1, b1), Comp::Pair(a2, b2)) => alpha_comp(a1, a2, env) && alpha_comp(b1, b2, env),
        (Comp::Proj(s1, m1), Comp::Proj(s2, m2)) => s1 == s2 && alpha_comp(m1, m2, env),
        (Comp::Charge(m1), Comp::Charge(m2)) => alpha_comp(m1, m2, env),
        (Comp::Split(v1, x1, y1, m1), Comp::Split(v2, x2, y2, m2)) => {
            alpha_val(v1, v2, env) && env.with(&[(x1, x2), (y1, y2)], |env| alpha_comp(m1, m2, env))
        }
        (Comp::IfZ(v1, p1, q1), Comp::IfZ(v2, p2, q2)) => {
            alpha_val(v1, v2, env) && alpha_comp(p1, p2, env) && alpha_comp(q1, q2, env)
        }
        (
            Comp::Calc { var: x1, op: o1, lhs: l1, rhs: r1, body: b1 },
            Comp::Calc { var: x2, op: o2, lhs: l2, rhs: r2, body: b2 },
        ) => {
            o1 == o2
                && alpha_val(l1, l2, env)
                && alpha_val(r1, r2, env)
                && env.with(&[(x1, x2)], |env| alpha_comp(b1, b2, env))
        }
        (
            Comp::LCase { scrut: s1, nil: n1, head: h1, tail: t1, cons: c1 },
            Comp::LCase { scrut: s2, nil: n2, head: h2, tail: t2, cons: c2 },
        ) => {
            alpha_val(s1, s2, env)
                && alpha_comp(n1, n2, env)
                && env.with(&[(h1, h2), (t1, t2)], |env| alpha_comp(c1, c2, env))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Printing

impl fmt::Display for ValType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValType::Nat => f.write_str("nat"),
            ValType::Prod(a, b) => write!(f, "(prod {a} {b})"),
            ValType::Thunk(b) => write!(f, "(U {b})"),
            ValType::List(a) => write!(f, "(list {a})"),
        }
    }
}

impl fmt::Display for CompType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompType::Free(a) => write!(f, "(F {a})"),
            CompType::With(a, b) => write!(f, "(with {a} {b})"),
            CompType::Arrow(a, b) => write!(f, "(-> {a} {b})"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Var(x) => f.write_str(x),
            Value::Num(k) => write!(f, "(num {k})"),
            Value::Pair(a, b) => write!(f, "(vpair {a} {b})"),
            Value::Thunk(m) => write!(f, "(thunk {m})"),
            Value::Nil => f.write_str("nil"),
            Value::Cons(a, b) => write!(f, "(cons {a} {b})"),
        }
    }
}

impl fmt::Display for Comp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comp::Return(v) => write!(f, "(return {v})"),
            Comp::Bind(x, m, n) => write!(f, "(bind ({x} {m}) {n})"),
            Comp::Force(v) => write!(f, "(force {v})"),
            Comp::Lam(x, ty, m) => write!(f, "(lam ({x} {ty}) {m})"),
            Comp::App(m, v) => write!(f, "(app {m} {v})"),
            Comp::Pair(m, n) => write!(f, "(cpair {m} {n})"),
            Comp::Proj(side, m) => write!(f, "(cproj{} {m})", side.index()),
            Comp::Split(v, x, y, m) => write!(f, "(split {v} ({x} {y}) {m})"),
            Comp::IfZ(v, p, q) => write!(f, "(ifz {v} {p} {q})"),
            Comp::Calc { var, op, lhs, rhs, body } => write!(f, "(calc ({var} {op} {lhs} {rhs}) {body})"),
            Comp::Charge(m) => write!(f, "(charge {m})"),
            Comp::Fix(x, ty, m) => write!(f, "(cfix ({x} {ty}) {m})"),
            Comp::LCase { scrut, nil, head, tail, cons } => {
                write!(f, "(lcase {scrut} {nil} ({head} {tail} {cons}))")
            }
        }
    }
}
