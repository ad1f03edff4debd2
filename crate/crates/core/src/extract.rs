//! Recurrence extraction from CBPV into PCFc.
//!
//! Values are sent to their potentials and computations to complexities,
//! elements of the carrier of the cost algebra of their type. The end-user
//! extractions for PCF are the composite of an embedding with this
//! translation.
//!
//! Wherever a clause would copy a non-trivial subterm (`bind` uses both
//! halves of the complexity of its first computation, for instance) the
//! subterm is shared through a beta-redex instead, which keeps the output
//! linear in the size of the input. The simplifier inlines these redexes
//! when that is cheap.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use core::fmt;

use crate::arith::ArithOp;
use crate::cbpv::{typecheck_comp, typecheck_val, CbpvContext, CbpvError, Comp, CompType, ValType, Value};
use crate::embed::{embed_program, EmbedError};
use crate::names::{Name, NameSupply};
use crate::pcf::{PcfTerm, Strategy};
use crate::pcfc::{alg_apply, algebra_for, carrier_of, is_atomic, occurs_free, subst, CostAlgebra, PcfcTerm, PcfcType};
use crate::Side;

pub fn potential_type(a: &ValType) -> PcfcType {
    match a {
        ValType::Nat | ValType::List(_) => PcfcType::Nat,
        ValType::Prod(a, b) => PcfcType::prod(potential_type(a), potential_type(b)),
        ValType::Thunk(b) => complexity_type(b),
    }
}

/// Carrier of the algebra assigned to `B`.
pub fn complexity_type(b: &CompType) -> PcfcType {
    carrier_of(b, &potential_type)
}

pub fn complexity_algebra(b: &CompType) -> CostAlgebra {
    algebra_for(b, &potential_type)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtractError {
    Embed(EmbedError),
    Cbpv(CbpvError),
}

impl fmt::Display for ExtractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractError::Embed(e) => write!(f, "{e}"),
            ExtractError::Cbpv(e) => write!(f, "{e}"),
        }
    }
}

impl From<EmbedError> for ExtractError {
    fn from(e: EmbedError) -> Self {
        ExtractError::Embed(e)
    }
}

impl From<CbpvError> for ExtractError {
    fn from(e: CbpvError) -> Self {
        ExtractError::Cbpv(e)
    }
}

/// An extracted recurrence together with its PCFc type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionResult {
    pub term: PcfcTerm,
    pub ty: PcfcType,
}

pub fn potential_term(ctx: &CbpvContext, v: &Value) -> Result<PcfcTerm, ExtractError> {
    let mut names = BTreeSet::new();
    collect_val_names(v, &mut names);
    names.extend(ctx.iter().map(|(x, _)| x.clone()));
    Extractor::new(ctx.clone(), names).val(v)
}

pub fn complexity_term(ctx: &CbpvContext, m: &Comp) -> Result<PcfcTerm, ExtractError> {
    let mut names = BTreeSet::new();
    m.all_names(&mut names);
    names.extend(ctx.iter().map(|(x, _)| x.clone()));
    Extractor::new(ctx.clone(), names).comp(m)
}

fn collect_val_names(v: &Value, out: &mut BTreeSet<Name>) {
    Comp::Return(v.clone()).all_names(out);
}

/// Extracts a closed computation and pairs it with its type.
pub fn extract_closed(m: &Comp) -> Result<ExtractionResult, ExtractError> {
    let ctx = CbpvContext::new();
    let ty = typecheck_comp(&ctx, m)?;
    Ok(ExtractionResult {
        term: complexity_term(&ctx, m)?,
        ty: complexity_type(&ty),
    })
}

/// Recurrence for a closed PCF program under the given strategy.
pub fn extract(t: &PcfTerm, s: Strategy) -> Result<ExtractionResult, ExtractError> {
    let embedded = embed_program(t, s)?;
    Ok(ExtractionResult {
        term: complexity_term(&CbpvContext::new(), &embedded.term)?,
        ty: complexity_type(&embedded.ty),
    })
}

pub fn extract_cbv(t: &PcfTerm) -> Result<ExtractionResult, ExtractError> {
    extract(t, Strategy::Cbv)
}

pub fn extract_cbn(t: &PcfTerm) -> Result<ExtractionResult, ExtractError> {
    extract(t, Strategy::Cbn)
}

struct Extractor {
    ctx: CbpvContext,
    names: NameSupply,
}

impl Extractor {
    fn new(ctx: CbpvContext, used: BTreeSet<Name>) -> Self {
        Extractor {
            ctx,
            names: NameSupply::new(used),
        }
    }

    fn under<T>(&mut self, binds: &[(&Name, ValType)], f: impl FnOnce(&mut Self) -> T) -> T {
        for (x, a) in binds {
            self.ctx.push(((*x).clone(), a.clone()));
        }
        let out = f(self);
        let keep = self.ctx.len() - binds.len();
        self.ctx.truncate(keep);
        out
    }

    fn comp_type(&self, m: &Comp) -> Result<CompType, ExtractError> {
        Ok(typecheck_comp(&self.ctx, m)?)
    }

    fn val_type(&self, v: &Value) -> Result<ValType, ExtractError> {
        Ok(typecheck_val(&self.ctx, v)?)
    }

    /// `body(q)` for a fresh `q` standing for `shared`; `q` is replaced by
    /// `shared` outright when that is atomic, and bound by a redex otherwise.
    fn share(&mut self, shared: PcfcTerm, ty: PcfcType, body: impl FnOnce(&PcfcTerm) -> PcfcTerm) -> PcfcTerm {
        let q = self.names.fresh("q");
        let out = body(&PcfcTerm::Var(q.clone()));
        if is_atomic(&shared) || !occurs_free(&out, &q) {
            subst(&out, &q, &shared)
        } else {
            PcfcTerm::app(PcfcTerm::Lam(q, ty, Box::new(out)), shared)
        }
    }

    fn val(&mut self, v: &Value) -> Result<PcfcTerm, ExtractError> {
        Ok(match v {
            Value::Var(x) => PcfcTerm::Var(x.clone()),
            Value::Num(k) => PcfcTerm::Num(k.clone()),
            Value::Pair(a, b) => PcfcTerm::pair(self.val(a)?, self.val(b)?),
            Value::Thunk(m) => self.comp(m)?,
            Value::Nil => PcfcTerm::num(0),
            Value::Cons(_, tail) => PcfcTerm::arith(ArithOp::Add, self.val(tail)?, PcfcTerm::num(1)),
        })
    }

    fn comp(&mut self, m: &Comp) -> Result<PcfcTerm, ExtractError> {
        Ok(match m {
            Comp::Return(v) => PcfcTerm::pair(PcfcTerm::Zero, self.val(v)?),
            Comp::Bind(x, first, rest) => {
                let first_ty = self.comp_type(first)?;
                let CompType::Free(a) = &first_ty else {
                    unreachable!("bind of a well-typed non-returner")
                };
                let a = (**a).clone();
                let whole_ty = self.comp_type(m)?;
                let head = self.comp(first)?;
                let tail = self.under(&[(x, a.clone())], |me| me.comp(rest))?;
                // A literal pair needs no sharing: ||return V|| is <0, <<V>>>.
                if let PcfcTerm::Pair(c, p) = &head {
                    if is_atomic(p) {
                        let tail = subst(&tail, x, p);
                        return Ok(alg_apply(&whole_ty, &potential_type, c, &tail));
                    }
                }
                let carrier = complexity_type(&first_ty);
                self.share(head, carrier, |mv| {
                    let tail = subst(&tail, x, &PcfcTerm::proj(Side::Right, mv.clone()));
                    alg_apply(&whole_ty, &potential_type, &PcfcTerm::proj(Side::Left, mv.clone()), &tail)
                })
            }
            Comp::Force(v) => self.val(v)?,
            Comp::Lam(x, a, body) => {
                let inner = self.under(&[(x, a.clone())], |me| me.comp(body))?;
                PcfcTerm::Lam(x.clone(), potential_type(a), Box::new(inner))
            }
            Comp::App(f, v) => PcfcTerm::app(self.comp(f)?, self.val(v)?),
            Comp::Pair(a, b) => PcfcTerm::pair(self.comp(a)?, self.comp(b)?),
            Comp::Proj(side, inner) => PcfcTerm::proj(*side, self.comp(inner)?),
            Comp::Split(v, x1, x2, body) => {
                let ty = self.val_type(v)?;
                let ValType::Prod(a1, a2) = &ty else {
                    unreachable!("split of a well-typed non-product")
                };
                let binds = [(x1, (**a1).clone()), (x2, (**a2).clone())];
                let inner = self.under(&binds, |me| me.comp(body))?;
                let pv = self.val(v)?;
                self.share(pv, potential_type(&ty), |q| {
                    let once = subst(&inner, x1, &PcfcTerm::proj(Side::Left, q.clone()));
                    subst(&once, x2, &PcfcTerm::proj(Side::Right, q.clone()))
                })
            }
            Comp::IfZ(v, p, q) => PcfcTerm::ifz(self.val(v)?, self.comp(p)?, self.comp(q)?),
            Comp::Calc { var, op, lhs, rhs, body } => {
                let a = self.val(lhs)?;
                let b = self.val(rhs)?;
                let potential = calc_potential(*op, a, b);
                let inner = self.under(&[(var, ValType::Nat)], |me| me.comp(body))?;
                self.share(potential, PcfcType::Nat, |q| subst(&inner, var, q))
            }
            Comp::Charge(inner) => {
                let ty = self.comp_type(inner)?;
                let e = self.comp(inner)?;
                alg_apply(&ty, &potential_type, &PcfcTerm::One, &e)
            }
            Comp::Fix(x, b, body) => {
                let inner = self.under(&[(x, ValType::thunk(b.clone()))], |me| me.comp(body))?;
                PcfcTerm::Fix(x.clone(), complexity_type(b), Box::new(inner))
            }
            Comp::LCase { scrut, nil, head, tail, cons } => {
                let ty = self.val_type(scrut)?;
                let ValType::List(elem) = &ty else {
                    unreachable!("list case on a well-typed non-list")
                };
                let elem = (**elem).clone();
                let nil_c = self.comp(nil)?;
                let binds = [(head, elem.clone()), (tail, ty.clone())];
                let cons_c = self.under(&binds, |me| me.comp(cons))?;
                let pv = self.val(scrut)?;
                // The head's size is unknown: it is given potential infinity.
                let unknown = PcfcTerm::omega(potential_type(&elem));
                self.share(pv, PcfcType::Nat, |l| {
                    let shorter = PcfcTerm::arith(ArithOp::Sub, l.clone(), PcfcTerm::num(1));
                    let cons_c = subst(&subst(&cons_c, head, &unknown), tail, &shorter);
                    PcfcTerm::ifz(l.clone(), nil_c, cons_c)
                })
            }
        })
    }
}

/// Potential of `a op b`: an upper bound on the result that is monotone in
/// the potentials of the operands.
fn calc_potential(op: ArithOp, a: PcfcTerm, b: PcfcTerm) -> PcfcTerm {
    match op {
        ArithOp::Add | ArithOp::Mul => PcfcTerm::arith(op, a, b),
        ArithOp::Sub | ArithOp::Div if matches!(b, PcfcTerm::Num(_)) => PcfcTerm::arith(op, a, b),
        ArithOp::Sub | ArithOp::Div => a,
        ArithOp::Mod => PcfcTerm::arith(ArithOp::Sub, b, PcfcTerm::num(1)),
    }
}
