//! Source language: PCF in its call-by-value and call-by-name variants,
//! extended with call-by-value lists.
//!
//! The two variants share one syntax tree. They differ only in how recursion
//! is written: call-by-name programs use `fix` at any type, call-by-value
//! programs use `rec` to define recursive functions and may also use lists.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::arith::ArithOp;
use crate::names::{prime_away, Name};
use crate::Side;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PcfType {
    Nat,
    Prod(Box<PcfType>, Box<PcfType>),
    Arrow(Box<PcfType>, Box<PcfType>),
    List(Box<PcfType>),
}

impl PcfType {
    pub fn prod(left: PcfType, right: PcfType) -> PcfType {
        PcfType::Prod(Box::new(left), Box::new(right))
    }

    pub fn arrow(dom: PcfType, cod: PcfType) -> PcfType {
        PcfType::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn list(elem: PcfType) -> PcfType {
        PcfType::List(Box::new(elem))
    }

    pub fn contains_list(&self) -> bool {
        match self {
            PcfType::Nat => false,
            PcfType::List(_) => true,
            PcfType::Prod(a, b) | PcfType::Arrow(a, b) => a.contains_list() || b.contains_list(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Cbv,
    Cbn,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Cbv => "cbv",
            Strategy::Cbn => "cbn",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PcfTerm {
    Var(Name),
    Num(BigUint),
    Arith(ArithOp, Box<PcfTerm>, Box<PcfTerm>),
    IfZ(Box<PcfTerm>, Box<PcfTerm>, Box<PcfTerm>),
    Pair(Box<PcfTerm>, Box<PcfTerm>),
    Proj(Side, Box<PcfTerm>),
    Lam(Name, PcfType, Box<PcfTerm>),
    App(Box<PcfTerm>, Box<PcfTerm>),
    /// Call-by-name fixed point at any type.
    Fix(Name, PcfType, Box<PcfTerm>),
    /// Call-by-value recursive function `rec f x. body : dom -> cod`.
    Rec {
        fun: Name,
        arg: Name,
        dom: PcfType,
        cod: PcfType,
        body: Box<PcfTerm>,
    },
    Nil,
    Cons(Box<PcfTerm>, Box<PcfTerm>),
    LCase {
        scrut: Box<PcfTerm>,
        nil: Box<PcfTerm>,
        head: Name,
        tail: Name,
        cons: Box<PcfTerm>,
    },
}

impl PcfTerm {
    pub fn var(name: &str) -> PcfTerm {
        PcfTerm::Var(name.to_string())
    }

    pub fn num(k: u64) -> PcfTerm {
        PcfTerm::Num(BigUint::from(k))
    }

    pub fn arith(op: ArithOp, m: PcfTerm, n: PcfTerm) -> PcfTerm {
        PcfTerm::Arith(op, Box::new(m), Box::new(n))
    }

    pub fn ifz(n: PcfTerm, zero: PcfTerm, succ: PcfTerm) -> PcfTerm {
        PcfTerm::IfZ(Box::new(n), Box::new(zero), Box::new(succ))
    }

    pub fn pair(m: PcfTerm, n: PcfTerm) -> PcfTerm {
        PcfTerm::Pair(Box::new(m), Box::new(n))
    }

    pub fn proj(side: Side, m: PcfTerm) -> PcfTerm {
        PcfTerm::Proj(side, Box::new(m))
    }

    pub fn lam(x: &str, ty: PcfType, body: PcfTerm) -> PcfTerm {
        PcfTerm::Lam(x.to_string(), ty, Box::new(body))
    }

    pub fn app(m: PcfTerm, n: PcfTerm) -> PcfTerm {
        PcfTerm::App(Box::new(m), Box::new(n))
    }

    pub fn fix(x: &str, ty: PcfType, body: PcfTerm) -> PcfTerm {
        PcfTerm::Fix(x.to_string(), ty, Box::new(body))
    }

    pub fn rec(fun: &str, arg: &str, dom: PcfType, cod: PcfType, body: PcfTerm) -> PcfTerm {
        PcfTerm::Rec {
            fun: fun.to_string(),
            arg: arg.to_string(),
            dom,
            cod,
            body: Box::new(body),
        }
    }

    pub fn cons(h: PcfTerm, t: PcfTerm) -> PcfTerm {
        PcfTerm::Cons(Box::new(h), Box::new(t))
    }

    pub fn lcase(scrut: PcfTerm, nil: PcfTerm, head: &str, tail: &str, cons: PcfTerm) -> PcfTerm {
        PcfTerm::LCase {
            scrut: Box::new(scrut),
            nil: Box::new(nil),
            head: head.to_string(),
            tail: tail.to_string(),
            cons: Box::new(cons),
        }
    }

    /// `let x = m in n`, desugared to an immediately applied lambda.
    pub fn let_in(x: &str, ty: PcfType, m: PcfTerm, n: PcfTerm) -> PcfTerm {
        PcfTerm::app(PcfTerm::lam(x, ty, n), m)
    }

    /// A list literal of numerals.
    pub fn nat_list(items: impl IntoIterator<Item = u64>) -> PcfTerm {
        let items: Vec<u64> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(PcfTerm::Nil, |tail, k| PcfTerm::cons(PcfTerm::num(k), tail))
    }

    /// Is this a canonical form under the given strategy?
    pub fn is_value(&self, strategy: Strategy) -> bool {
        match (self, strategy) {
            (PcfTerm::Num(_) | PcfTerm::Lam(..), _) => true,
            (PcfTerm::Pair(..), Strategy::Cbn) => true,
            (PcfTerm::Pair(m, n), Strategy::Cbv) => {
                m.is_value(strategy) && n.is_value(strategy)
            }
            (PcfTerm::Rec { .. } | PcfTerm::Nil, Strategy::Cbv) => true,
            (PcfTerm::Cons(h, t), Strategy::Cbv) => h.is_value(strategy) && t.is_value(strategy),
            _ => false,
        }
    }

    /// Syntactic values of CBV: canonical forms plus variables.
    pub fn is_cbv_syntactic_value(&self) -> bool {
        match self {
            PcfTerm::Var(_)
            | PcfTerm::Num(_)
            | PcfTerm::Lam(..)
            | PcfTerm::Rec { .. }
            | PcfTerm::Nil => true,
            PcfTerm::Pair(m, n) | PcfTerm::Cons(m, n) => {
                m.is_cbv_syntactic_value() && n.is_cbv_syntactic_value()
            }
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        1 + match self {
            PcfTerm::Var(_) | PcfTerm::Num(_) | PcfTerm::Nil => 0,
            PcfTerm::Proj(_, m) | PcfTerm::Lam(_, _, m) | PcfTerm::Fix(_, _, m) => m.size(),
            PcfTerm::Rec { body, .. } => body.size(),
            PcfTerm::Arith(_, m, n)
            | PcfTerm::Pair(m, n)
            | PcfTerm::App(m, n)
            | PcfTerm::Cons(m, n) => m.size() + n.size(),
            PcfTerm::IfZ(a, b, c) => a.size() + b.size() + c.size(),
            PcfTerm::LCase { scrut, nil, cons, .. } => scrut.size() + nil.size() + cons.size(),
        }
    }

    /// Length of a fully evaluated list, if this is one.
    pub fn list_len(&self) -> Option<usize> {
        match self {
            PcfTerm::Nil => Some(0),
            PcfTerm::Cons(_, t) => t.list_len().map(|n| n + 1),
            _ => None,
        }
    }

    pub fn mentions_lists(&self) -> bool {
        match self {
            PcfTerm::Nil | PcfTerm::Cons(..) | PcfTerm::LCase { .. } => true,
            PcfTerm::Var(_) | PcfTerm::Num(_) => false,
            PcfTerm::Lam(_, ty, m) | PcfTerm::Fix(_, ty, m) => ty.contains_list() || m.mentions_lists(),
            PcfTerm::Rec { dom, cod, body, .. } => {
                dom.contains_list() || cod.contains_list() || body.mentions_lists()
            }
            PcfTerm::Proj(_, m) => m.mentions_lists(),
            PcfTerm::Arith(_, m, n) | PcfTerm::Pair(m, n) | PcfTerm::App(m, n) => {
                m.mentions_lists() || n.mentions_lists()
            }
            PcfTerm::IfZ(a, b, c) => a.mentions_lists() || b.mentions_lists() || c.mentions_lists(),
        }
    }

    /// Every identifier occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            PcfTerm::Var(x) => {
                out.insert(x.clone());
            }
            PcfTerm::Num(_) | PcfTerm::Nil => {}
            PcfTerm::Proj(_, m) => m.all_names(out),
            PcfTerm::Lam(x, _, m) | PcfTerm::Fix(x, _, m) => {
                out.insert(x.clone());
                m.all_names(out);
            }
            PcfTerm::Rec { fun, arg, body, .. } => {
                out.insert(fun.clone());
                out.insert(arg.clone());
                body.all_names(out);
            }
            PcfTerm::Arith(_, m, n) | PcfTerm::Pair(m, n) | PcfTerm::App(m, n) | PcfTerm::Cons(m, n) => {
                m.all_names(out);
                n.all_names(out);
            }
            PcfTerm::IfZ(a, b, c) => {
                a.all_names(out);
                b.all_names(out);
                c.all_names(out);
            }
            PcfTerm::LCase { scrut, nil, head, tail, cons } => {
                out.insert(head.clone());
                out.insert(tail.clone());
                scrut.all_names(out);
                nil.all_names(out);
                cons.all_names(out);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Typing

/// Variable-to-type map that behaves like a stack: extending with a name that
/// is already bound shadows the older binding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingContext {
    entries: Vec<(Name, PcfType)>,
}

impl TypingContext {
    pub fn new() -> Self {
        TypingContext::default()
    }

    pub fn extend(&self, x: &str, ty: PcfType) -> Self {
        let mut next = self.clone();
        next.push(x, ty);
        next
    }

    fn push(&mut self, x: &str, ty: PcfType) {
        self.entries.push((x.to_string(), ty));
    }

    fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn lookup(&self, x: &str) -> Option<&PcfType> {
        self.entries.iter().rev().find(|(y, _)| y == x).map(|(_, ty)| ty)
    }

    /// Visible bindings, innermost binding for each name.
    pub fn bindings(&self) -> Vec<(Name, PcfType)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (x, ty) in self.entries.iter().rev() {
            if seen.insert(x.clone()) {
                out.push((x.clone(), ty.clone()));
            }
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PcfError {
    /// Ill-typed term. `at` is the printed offending subterm.
    Type { at: String, message: String },
    /// A construct that the chosen strategy does not have.
    Strategy {
        at: String,
        construct: &'static str,
        strategy: Strategy,
    },
}

impl fmt::Display for PcfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfError::Type { at, message } => write!(f, "type error: {message}\n  in: {at}"),
            PcfError::Strategy {
                at,
                construct,
                strategy,
            } => write!(f, "`{construct}` is not available under {strategy}\n  in: {at}"),
        }
    }
}

fn excerpt(t: &PcfTerm) -> String {
    let mut text = t.to_string();
    if text.len() > 120 {
        let mut cut = 117;
        while !text.is_char_boundary(cut) {
            cut -= 1;
        }
        text.truncate(cut);
        text.push_str("...");
    }
    text
}

fn type_error(t: &PcfTerm, message: String) -> PcfError {
    PcfError::Type {
        at: excerpt(t),
        message,
    }
}

/// Computes the type of `t` under `ctx`.
///
/// Typing is syntax directed. The one construct without an annotation is
/// `nil`: where its element type is not dictated by the surrounding term it
/// defaults to `nat`.
pub fn typecheck_pcf(ctx: &TypingContext, t: &PcfTerm, s: Strategy) -> Result<PcfType, PcfError> {
    let mut ctx = ctx.clone();
    Checker { strategy: s }.infer(&mut ctx, t)
}

struct Checker {
    strategy: Strategy,
}

impl Checker {
    fn require(&self, t: &PcfTerm, construct: &'static str, wanted: Strategy) -> Result<(), PcfError> {
        if self.strategy == wanted {
            Ok(())
        } else {
            Err(PcfError::Strategy {
                at: excerpt(t),
                construct,
                strategy: self.strategy,
            })
        }
    }

    fn under<T>(
        &self,
        ctx: &mut TypingContext,
        binds: &[(&str, &PcfType)],
        f: impl FnOnce(&Self, &mut TypingContext) -> T,
    ) -> T {
        for (x, ty) in binds {
            ctx.push(x, (*ty).clone());
        }
        let out = f(self, ctx);
        for _ in binds {
            ctx.pop();
        }
        out
    }

    fn check(&self, ctx: &mut TypingContext, t: &PcfTerm, want: &PcfType) -> Result<(), PcfError> {
        match (t, want) {
            (PcfTerm::Nil, PcfType::List(_)) => self.require(t, "nil", Strategy::Cbv),
            (PcfTerm::Cons(h, tl), PcfType::List(elem)) => {
                self.require(t, "cons", Strategy::Cbv)?;
                self.check(ctx, h, elem)?;
                self.check(ctx, tl, want)
            }
            (PcfTerm::IfZ(n, p, q), _) => {
                self.check(ctx, n, &PcfType::Nat)?;
                self.check(ctx, p, want)?;
                self.check(ctx, q, want)
            }
            (PcfTerm::Pair(m, n), PcfType::Prod(a, b)) => {
                self.check(ctx, m, a)?;
                self.check(ctx, n, b)
            }
            (PcfTerm::LCase { scrut, nil, head, tail, cons }, _) => {
                self.require(t, "lcase", Strategy::Cbv)?;
                let elem = self.scrutinee_elem(ctx, scrut)?;
                self.check(ctx, nil, want)?;
                let list = PcfType::list(elem.clone());
                self.under(ctx, &[(head, &elem), (tail, &list)], |me, ctx| me.check(ctx, cons, want))
            }
            _ => {
                let got = self.infer(ctx, t)?;
                if &got == want {
                    Ok(())
                } else {
                    Err(type_error(t, alloc::format!("expected {want}, found {got}")))
                }
            }
        }
    }

    fn scrutinee_elem(&self, ctx: &mut TypingContext, scrut: &PcfTerm) -> Result<PcfType, PcfError> {
        match self.infer(ctx, scrut)? {
            PcfType::List(elem) => Ok(*elem),
            other => Err(type_error(scrut, alloc::format!("expected a list, found {other}"))),
        }
    }

    /// Infers one branch and checks the other against it, preferring to
    /// infer a branch that is not a bare `nil`.
    fn branches(
        &self,
        ctx: &mut TypingContext,
        first: &PcfTerm,
        second: &PcfTerm,
        second_binds: &[(&str, &PcfType)],
    ) -> Result<PcfType, PcfError> {
        if matches!(first, PcfTerm::Nil) && !matches!(second, PcfTerm::Nil) {
            let ty = self.under(ctx, second_binds, |me, ctx| me.infer(ctx, second))?;
            self.check(ctx, first, &ty)?;
            Ok(ty)
        } else {
            let ty = self.infer(ctx, first)?;
            self.under(ctx, second_binds, |me, ctx| me.check(ctx, second, &ty))?;
            Ok(ty)
        }
    }

    fn infer(&self, ctx: &mut TypingContext, t: &PcfTerm) -> Result<PcfType, PcfError> {
        match t {
            PcfTerm::Var(x) => ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| type_error(t, alloc::format!("unbound variable `{x}`"))),
            PcfTerm::Num(_) => Ok(PcfType::Nat),
            PcfTerm::Arith(_, m, n) => {
                self.check(ctx, m, &PcfType::Nat)?;
                self.check(ctx, n, &PcfType::Nat)?;
                Ok(PcfType::Nat)
            }
            PcfTerm::IfZ(n, p, q) => {
                self.check(ctx, n, &PcfType::Nat)?;
                self.branches(ctx, p, q, &[])
            }
            PcfTerm::Pair(m, n) => Ok(PcfType::prod(self.infer(ctx, m)?, self.infer(ctx, n)?)),
            PcfTerm::Proj(side, m) => match self.infer(ctx, m)? {
                PcfType::Prod(a, b) => Ok(*side.pick(a, b)),
                other => Err(type_error(t, alloc::format!("projection from non-product {other}"))),
            },
            PcfTerm::Lam(x, dom, body) => {
                let cod = self.under(ctx, &[(x, dom)], |me, ctx| me.infer(ctx, body))?;
                Ok(PcfType::arrow(dom.clone(), cod))
            }
            PcfTerm::App(m, n) => match self.infer(ctx, m)? {
                PcfType::Arrow(dom, cod) => {
                    self.check(ctx, n, &dom)?;
                    Ok(*cod)
                }
                other => Err(type_error(t, alloc::format!("application of non-function {other}"))),
            },
            PcfTerm::Fix(x, ty, body) => {
                self.require(t, "fix", Strategy::Cbn)?;
                self.under(ctx, &[(x, ty)], |me, ctx| me.check(ctx, body, ty))?;
                Ok(ty.clone())
            }
            PcfTerm::Rec { fun, arg, dom, cod, body } => {
                self.require(t, "rec", Strategy::Cbv)?;
                let fty = PcfType::arrow(dom.clone(), cod.clone());
                self.under(ctx, &[(fun, &fty), (arg, dom)], |me, ctx| me.check(ctx, body, cod))?;
                Ok(fty)
            }
            PcfTerm::Nil => {
                self.require(t, "nil", Strategy::Cbv)?;
                Ok(PcfType::list(PcfType::Nat))
            }
            PcfTerm::Cons(h, tl) => {
                self.require(t, "cons", Strategy::Cbv)?;
                let elem = self.infer(ctx, h)?;
                let list = PcfType::list(elem);
                self.check(ctx, tl, &list)?;
                Ok(list)
            }
            PcfTerm::LCase { scrut, nil, head, tail, cons } => {
                self.require(t, "lcase", Strategy::Cbv)?;
                let elem = self.scrutinee_elem(ctx, scrut)?;
                let list = PcfType::list(elem.clone());
                self.branches(ctx, nil, cons, &[(head, &elem), (tail, &list)])
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Variables and substitution

pub fn free_vars(t: &PcfTerm) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

fn collect_free<'a>(t: &'a PcfTerm, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
    let under = |names: &[&'a str], body: &'a PcfTerm, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>| {
        bound.extend_from_slice(names);
        collect_free(body, bound, out);
        bound.truncate(bound.len() - names.len());
    };
    match t {
        PcfTerm::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        PcfTerm::Num(_) | PcfTerm::Nil => {}
        PcfTerm::Proj(_, m) => collect_free(m, bound, out),
        PcfTerm::Lam(x, _, m) | PcfTerm::Fix(x, _, m) => under(&[x], m, bound, out),
        PcfTerm::Rec { fun, arg, body, .. } => under(&[fun, arg], body, bound, out),
        PcfTerm::Arith(_, m, n) | PcfTerm::Pair(m, n) | PcfTerm::App(m, n) | PcfTerm::Cons(m, n) => {
            collect_free(m, bound, out);
            collect_free(n, bound, out);
        }
        PcfTerm::IfZ(a, b, c) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
            collect_free(c, bound, out);
        }
        PcfTerm::LCase { scrut, nil, head, tail, cons } => {
            collect_free(scrut, bound, out);
            collect_free(nil, bound, out);
            under(&[head, tail], cons, bound, out);
        }
    }
}

/// Capture-avoiding substitution `t[v/x]`.
pub fn subst(t: &PcfTerm, x: &str, v: &PcfTerm) -> PcfTerm {
    let fv = free_vars(v);
    Subst { x, v, fv: &fv }.go(t)
}

struct Subst<'a> {
    x: &'a str,
    v: &'a PcfTerm,
    fv: &'a BTreeSet<Name>,
}

impl Subst<'_> {
    /// Renames `binder` in `body` if it would capture a free variable of the
    /// substituted term. Returns the (possibly new) binder and body.
    fn freshen(&self, binder: &Name, body: &PcfTerm, others: &[&Name]) -> (Name, PcfTerm) {
        if !self.fv.contains(binder) {
            return (binder.clone(), body.clone());
        }
        let body_fv = free_vars(body);
        let fresh = prime_away(binder, |c| {
            self.fv.contains(c) || body_fv.contains(c) || c == self.x || others.iter().any(|o| o.as_str() == c)
        });
        let renamed = subst(body, binder, &PcfTerm::Var(fresh.clone()));
        (fresh, renamed)
    }

    fn go(&self, t: &PcfTerm) -> PcfTerm {
        match t {
            PcfTerm::Var(y) => {
                if y == self.x {
                    self.v.clone()
                } else {
                    t.clone()
                }
            }
            PcfTerm::Num(_) | PcfTerm::Nil => t.clone(),
            PcfTerm::Arith(op, m, n) => PcfTerm::arith(*op, self.go(m), self.go(n)),
            PcfTerm::IfZ(a, b, c) => PcfTerm::ifz(self.go(a), self.go(b), self.go(c)),
            PcfTerm::Pair(m, n) => PcfTerm::pair(self.go(m), self.go(n)),
            PcfTerm::Proj(side, m) => PcfTerm::proj(*side, self.go(m)),
            PcfTerm::App(m, n) => PcfTerm::app(self.go(m), self.go(n)),
            PcfTerm::Cons(m, n) => PcfTerm::cons(self.go(m), self.go(n)),
            PcfTerm::Lam(y, ty, body) | PcfTerm::Fix(y, ty, body) => {
                let rebuild = |y: Name, body: PcfTerm| match t {
                    PcfTerm::Lam(..) => PcfTerm::Lam(y, ty.clone(), Box::new(body)),
                    _ => PcfTerm::Fix(y, ty.clone(), Box::new(body)),
                };
                if y == self.x {
                    return t.clone();
                }
                let (y, body) = self.freshen(y, body, &[]);
                rebuild(y, self.go(&body))
            }
            PcfTerm::Rec { fun, arg, dom, cod, body } => {
                if fun == self.x || arg == self.x {
                    return t.clone();
                }
                let (fun, body) = self.freshen(fun, body, &[arg]);
                let (arg, body) = self.freshen(arg, &body, &[&fun]);
                PcfTerm::Rec {
                    fun,
                    arg,
                    dom: dom.clone(),
                    cod: cod.clone(),
                    body: Box::new(self.go(&body)),
                }
            }
            PcfTerm::LCase { scrut, nil, head, tail, cons } => {
                let scrut = self.go(scrut);
                let nil = self.go(nil);
                let (head, tail, cons) = if head == self.x || tail == self.x {
                    (head.clone(), tail.clone(), (**cons).clone())
                } else {
                    let (h, c) = self.freshen(head, cons, &[tail]);
                    let (tl, c) = self.freshen(tail, &c, &[&h]);
                    let c = self.go(&c);
                    (h, tl, c)
                };
                PcfTerm::LCase {
                    scrut: Box::new(scrut),
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

/// Pairs of simultaneously bound names, innermost last.
pub(crate) struct BinderPairs<'a>(Vec<(&'a str, &'a str)>);

impl<'a> BinderPairs<'a> {
    pub(crate) fn new() -> Self {
        BinderPairs(Vec::new())
    }

    pub(crate) fn vars_match(&self, x: &str, y: &str) -> bool {
        for (l, r) in self.0.iter().rev() {
            match (*l == x, *r == y) {
                (true, true) => return true,
                (false, false) => continue,
                _ => return false,
            }
        }
        x == y
    }

    pub(crate) fn with<T>(&mut self, pairs: &[(&'a str, &'a str)], f: impl FnOnce(&mut Self) -> T) -> T {
        self.0.extend_from_slice(pairs);
        let out = f(self);
        self.0.truncate(self.0.len() - pairs.len());
        out
    }
}

pub fn alpha_eq(a: &PcfTerm, b: &PcfTerm) -> bool {
    alpha(a, b, &mut BinderPairs::new())
}

fn alpha<'a>(a: &'a PcfTerm, b: &'a PcfTerm, env: &mut BinderPairs<'a>) -> bool {
    use PcfTerm as T;
    match (a, b) {
        (T::Var(x), T::Var(y)) => env.vars_match(x, y),
        (T::Num(j), T::Num(k)) => j == k,
        (T::Nil, T::Nil) => true,
        (T::Arith(o1, m1, n1), T::Arith(o2, m2, n2)) => o1 == o2 && alpha(m1, m2, env) && alpha(n1, n2, env),
        (T::IfZ(a1, b1, c1), T::IfZ(a2, b2, c2)) => {
            alpha(a1, a2, env) && alpha(b1, b2, env) && alpha(c1, c2, env)
        }
        (T::Pair(m1, n1), T::Pair(m2, n2))
        | (T::App(m1, n1), T::App(m2, n2))
        | (T::Cons(m1, n1), T::Cons(m2, n2)) => alpha(m1, m2, env) && alpha(n1, n2, env),
        (T::Proj(s1, m1), T::Proj(s2, m2)) => s1 == s2 && alpha(m1, m2, env),
        (T::Lam(x, t1, m1), T::Lam(y, t2, m2)) | (T::Fix(x, t1, m1), T::Fix(y, t2, m2)) => {
            t1 == t2 && env.with(&[(x, y)], |env| alpha(m1, m2, env))
        }
        (
            T::Rec { fun: f1, arg: x1, dom: d1, cod: c1, body: b1 },
            T::Rec { fun: f2, arg: x2, dom: d2, cod: c2, body: b2 },
        ) => d1 == d2 && c1 == c2 && env.with(&[(f1, f2), (x1, x2)], |env| alpha(b1, b2, env)),
        (
            T::LCase { scrut: s1, nil: n1, head: h1, tail: t1, cons: c1 },
            T::LCase { scrut: s2, nil: n2, head: h2, tail: t2, cons: c2 },
        ) => {
            alpha(s1, s2, env)
                && alpha(n1, n2, env)
                && env.with(&[(h1, h2), (t1, t2)], |env| alpha(c1, c2, env))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Printing (the s-expression surface syntax)

impl fmt::Display for PcfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfType::Nat => f.write_str("nat"),
            PcfType::Prod(a, b) => write!(f, "(prod {a} {b})"),
            PcfType::Arrow(a, b) => write!(f, "(-> {a} {b})"),
            PcfType::List(a) => write!(f, "(list {a})"),
        }
    }
}

impl fmt::Display for PcfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfTerm::Var(x) => f.write_str(x),
            PcfTerm::Num(k) => write!(f, "(num {k})"),
            PcfTerm::Arith(op, m, n) => write!(f, "({op} {m} {n})"),
            PcfTerm::IfZ(a, b, c) => write!(f, "(ifz {a} {b} {c})"),
            PcfTerm::Pair(m, n) => write!(f, "(pair {m} {n})"),
            PcfTerm::Proj(side, m) => write!(f, "(proj{} {m})", side.index()),
            PcfTerm::Lam(x, ty, m) => write!(f, "(lam ({x} {ty}) {m})"),
            PcfTerm::App(m, n) => write!(f, "(app {m} {n})"),
            PcfTerm::Fix(x, ty, m) => write!(f, "(fix ({x} {ty}) {m})"),
            PcfTerm::Rec { fun, arg, dom, cod, body } => {
                write!(f, "(rec ({fun} {arg} {dom} {cod}) {body})")
            }
            PcfTerm::Nil => f.write_str("nil"),
            PcfTerm::Cons(h, t) => write!(f, "(cons {h} {t})"),
            PcfTerm::LCase { scrut, nil, head, tail, cons } => {
                write!(f, "(lcase {scrut} {nil} ({head} {tail} {cons}))")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> PcfType {
        PcfType::Nat
    }

    #[test]
    fn identity_has_arrow_type() {
        let id = PcfTerm::lam("x", nat(), PcfTerm::var("x"));
        assert_eq!(
            typecheck_pcf(&TypingContext::new(), &id, Strategy::Cbv),
            Ok(PcfType::arrow(nat(), nat()))
        );
    }

    #[test]
    fn fix_is_rejected_under_cbv() {
        let omega = PcfTerm::fix("x", nat(), PcfTerm::var("x"));
        let err = typecheck_pcf(&TypingContext::new(), &omega, Strategy::Cbv).unwrap_err();
        assert!(matches!(err, PcfError::Strategy { construct: "fix", .. }));
        assert_eq!(typecheck_pcf(&TypingContext::new(), &omega, Strategy::Cbn), Ok(nat()));
    }

    #[test]
    fn rec_and_lists_are_rejected_under_cbn() {
        let r = PcfTerm::rec("f", "x", nat(), nat(), PcfTerm::var("x"));
        assert!(matches!(
            typecheck_pcf(&TypingContext::new(), &r, Strategy::Cbn),
            Err(PcfError::Strategy { construct: "rec", .. })
        ));
        assert!(matches!(
            typecheck_pcf(&TypingContext::new(), &PcfTerm::Nil, Strategy::Cbn),
            Err(PcfError::Strategy { construct: "nil", .. })
        ));
    }

    #[test]
    fn list_case_on_nil() {
        let t = PcfTerm::lcase(PcfTerm::Nil, PcfTerm::num(0), "h", "t", PcfTerm::num(1));
        assert_eq!(typecheck_pcf(&TypingContext::new(), &t, Strategy::Cbv), Ok(nat()));
    }

    #[test]
    fn nil_takes_its_element_type_from_context() {
        let pairs = PcfType::list(PcfType::prod(nat(), nat()));
        let f = PcfTerm::lam("l", pairs.clone(), PcfTerm::var("l"));
        let t = PcfTerm::app(f, PcfTerm::Nil);
        assert_eq!(typecheck_pcf(&TypingContext::new(), &t, Strategy::Cbv), Ok(pairs.clone()));
        let c = PcfTerm::cons(PcfTerm::pair(PcfTerm::num(1), PcfTerm::num(2)), PcfTerm::Nil);
        assert_eq!(typecheck_pcf(&TypingContext::new(), &c, Strategy::Cbv), Ok(pairs));
    }

    #[test]
    fn ill_typed_terms_report_location() {
        let t = PcfTerm::app(PcfTerm::num(1), PcfTerm::num(2));
        match typecheck_pcf(&TypingContext::new(), &t, Strategy::Cbv) {
            Err(PcfError::Type { at, .. }) => assert_eq!(at, "(app (num 1) (num 2))"),
            other => panic!("unexpected {other:?}"),
        }
        let unbound = PcfTerm::var("y");
        assert!(typecheck_pcf(&TypingContext::new(), &unbound, Strategy::Cbn).is_err());
    }

    #[test]
    fn context_shadowing() {
        let ctx = TypingContext::new().extend("x", nat()).extend("x", PcfType::list(nat()));
        assert_eq!(ctx.lookup("x"), Some(&PcfType::list(nat())));
        assert_eq!(ctx.bindings().len(), 1);
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(subst(&PcfTerm::var("x"), "x", &PcfTerm::num(3)), PcfTerm::num(3));
        let shielded = PcfTerm::lam("x", nat(), PcfTerm::var("x"));
        assert_eq!(subst(&shielded, "x", &PcfTerm::num(3)), shielded);
        let capture = PcfTerm::lam("y", nat(), PcfTerm::var("x"));
        let out = subst(&capture, "x", &PcfTerm::var("y"));
        assert_eq!(out, PcfTerm::lam("y'", nat(), PcfTerm::var("y")));
    }

    #[test]
    fn capture_avoidance_in_list_case() {
        let t = PcfTerm::lcase(
            PcfTerm::var("l"),
            PcfTerm::var("x"),
            "h",
            "t",
            PcfTerm::arith(ArithOp::Add, PcfTerm::var("h"), PcfTerm::var("x")),
        );
        let out = subst(&t, "x", &PcfTerm::var("h"));
        let expected = PcfTerm::lcase(
            PcfTerm::var("l"),
            PcfTerm::var("h"),
            "k",
            "t",
            PcfTerm::arith(ArithOp::Add, PcfTerm::var("k"), PcfTerm::var("h")),
        );
        assert!(alpha_eq(&out, &expected), "{out}");
    }

    #[test]
    fn alpha_equivalence() {
        let a = PcfTerm::lam("x", nat(), PcfTerm::var("x"));
        let b = PcfTerm::lam("y", nat(), PcfTerm::var("y"));
        assert!(alpha_eq(&a, &b));
        let c = PcfTerm::lam("y", nat(), PcfTerm::var("x"));
        assert!(!alpha_eq(&a, &c));
        let d = PcfTerm::lam("x", nat(), PcfTerm::lam("y", nat(), PcfTerm::var("x")));
        let e = PcfTerm::lam("y", nat(), PcfTerm::lam("x", nat(), PcfTerm::var("y")));
        let g = PcfTerm::lam("y", nat(), PcfTerm::lam("x", nat(), PcfTerm::var("x")));
        assert!(alpha_eq(&d, &e));
        assert!(!alpha_eq(&d, &g));
    }

    #[test]
    fn printing() {
        let t = PcfTerm::rec(
            "f",
            "x",
            nat(),
            nat(),
            PcfTerm::ifz(PcfTerm::var("x"), PcfTerm::num(1), PcfTerm::var("x")),
        );
        assert_eq!(t.to_string(), "(rec (f x nat nat) (ifz x (num 1) x))");
    }
}
