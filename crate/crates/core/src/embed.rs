//! Cost-preserving translations of PCF into CBPV.
//!
//! Both translations place exactly one `charge` at every application and
//! every projection, mirroring where the PCF machine charges. The CBV
//! translation only introduces `bind` for subterms that are not already
//! syntactic values, so numerals and variables reach `calc` directly and the
//! extracted potentials of `-` and `div` by a constant stay exact.

use alloc::collections::BTreeSet;
use core::fmt;

use crate::cbpv::{Comp, CompType, ValType, Value};
use crate::names::{NameSupply, Name};
use crate::pcf::{typecheck_pcf, PcfError, PcfTerm, PcfType, Strategy, TypingContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbedError {
    /// Lists exist only in call-by-value PCF.
    UnsupportedType(PcfType),
    /// A construct of the other strategy (e.g. `fix` under CBV).
    WrongStrategy { construct: &'static str, strategy: Strategy },
    Type(PcfError),
}

impl fmt::Display for EmbedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedError::UnsupportedType(ty) => write!(f, "type {ty} has no call-by-name translation"),
            EmbedError::WrongStrategy { construct, strategy } => {
                write!(f, "`{construct}` is not part of {strategy} PCF")
            }
            EmbedError::Type(e) => write!(f, "{e}"),
        }
    }
}

impl From<PcfError> for EmbedError {
    fn from(e: PcfError) -> Self {
        EmbedError::Type(e)
    }
}

/// A translated closed program with its CBPV type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingResult {
    pub term: Comp,
    pub ty: CompType,
}

/// Typechecks `t` under `s` and translates both the term and its type.
pub fn embed_program(t: &PcfTerm, s: Strategy) -> Result<EmbeddingResult, EmbedError> {
    let ty = typecheck_pcf(&TypingContext::new(), t, s)?;
    match s {
        Strategy::Cbv => Ok(EmbeddingResult {
            term: embed_cbv(t)?,
            ty: CompType::free(embed_cbv_type(&ty)),
        }),
        Strategy::Cbn => Ok(EmbeddingResult {
            term: embed_cbn(t)?,
            ty: embed_cbn_type(&ty)?,
        }),
    }
}

pub fn embed(t: &PcfTerm, s: Strategy) -> Result<Comp, EmbedError> {
    match s {
        Strategy::Cbv => embed_cbv(t),
        Strategy::Cbn => embed_cbn(t),
    }
}

fn supply_for(t: &PcfTerm) -> NameSupply {
    let mut names = BTreeSet::new();
    t.all_names(&mut names);
    NameSupply::new(names)
}

// ---------------------------------------------------------------------------
// Call-by-name

pub fn embed_cbn_type(ty: &PcfType) -> Result<CompType, EmbedError> {
    Ok(match ty {
        PcfType::Nat => CompType::free(ValType::Nat),
        PcfType::Prod(a, b) => CompType::with(embed_cbn_type(a)?, embed_cbn_type(b)?),
        PcfType::Arrow(a, b) => CompType::arrow(ValType::thunk(embed_cbn_type(a)?), embed_cbn_type(b)?),
        PcfType::List(_) => return Err(EmbedError::UnsupportedType(ty.clone())),
    })
}

pub fn embed_cbn(t: &PcfTerm) -> Result<Comp, EmbedError> {
    Cbn { names: supply_for(t) }.comp(t)
}

struct Cbn {
    names: NameSupply,
}

impl Cbn {
    /// Binds the result of `t` unless it is a numeral, which is used as is.
    fn operand(&mut self, t: &PcfTerm, hint: &str) -> Result<(Option<(Name, Comp)>, Value), EmbedError> {
        if let PcfTerm::Num(k) = t {
            return Ok((None, Value::Num(k.clone())));
        }
        let x = self.names.fresh(hint);
        let m = self.comp(t)?;
        Ok((Some((x.clone(), m)), Value::Var(x)))
    }

    fn comp(&mut self, t: &PcfTerm) -> Result<Comp, EmbedError> {
        let wrong = |construct| EmbedError::WrongStrategy {
            construct,
            strategy: Strategy::Cbn,
        };
        Ok(match t {
            PcfTerm::Var(x) => Comp::Force(Value::Var(x.clone())),
            PcfTerm::Num(k) => Comp::Return(Value::Num(k.clone())),
            PcfTerm::Arith(op, m, n) => {
                let (bm, a) = self.operand(m, "a")?;
                let (bn, b) = self.operand(n, "b")?;
                let v = self.names.fresh("v");
                let calc = Comp::calc(&v, *op, a, b, Comp::ret(Value::Var(v.clone())));
                wrap_binds([bm, bn], calc)
            }
            PcfTerm::IfZ(n, p, q) => {
                let (bn, a) = self.operand(n, "z")?;
                let body = Comp::ifz(a, self.comp(p)?, self.comp(q)?);
                wrap_binds([bn, None], body)
            }
            PcfTerm::Pair(m, n) => Comp::pair(self.comp(m)?, self.comp(n)?),
            PcfTerm::Proj(side, m) => Comp::charge(Comp::proj(*side, self.comp(m)?)),
            PcfTerm::Lam(x, ty, m) => Comp::lam(x, ValType::thunk(embed_cbn_type(ty)?), self.comp(m)?),
            PcfTerm::App(m, n) => Comp::charge(Comp::app(self.comp(m)?, Value::thunk(self.comp(n)?))),
            PcfTerm::Fix(x, ty, m) => Comp::fix(x, embed_cbn_type(ty)?, self.comp(m)?),
            PcfTerm::Rec { .. } => return Err(wrong("rec")),
            PcfTerm::Nil => return Err(wrong("nil")),
            PcfTerm::Cons(..) => return Err(wrong("cons")),
            PcfTerm::LCase { .. } => return Err(wrong("lcase")),
        })
    }
}

fn wrap_binds<const N: usize>(binds: [Option<(Name, Comp)>; N], body: Comp) -> Comp {
    binds
        .into_iter()
        .rev()
        .flatten()
        .fold(body, |rest, (x, m)| Comp::Bind(x, alloc::boxed::Box::new(m), alloc::boxed::Box::new(rest)))
}

// ---------------------------------------------------------------------------
// Call-by-value

pub fn embed_cbv_type(ty: &PcfType) -> ValType {
    match ty {
        PcfType::Nat => ValType::Nat,
        PcfType::Prod(a, b) => ValType::prod(embed_cbv_type(a), embed_cbv_type(b)),
        PcfType::Arrow(a, b) => ValType::thunk(arrow_type(a, b)),
        PcfType::List(a) => ValType::list(embed_cbv_type(a)),
    }
}

fn arrow_type(a: &PcfType, b: &PcfType) -> CompType {
    CompType::arrow(embed_cbv_type(a), CompType::free(embed_cbv_type(b)))
}

/// Translation of a CBV syntactic value; `None` if `t` is not one.
pub fn embed_cbv_val(t: &PcfTerm) -> Result<Option<Value>, EmbedError> {
    Cbv { names: supply_for(t) }.val(t)
}

pub fn embed_cbv(t: &PcfTerm) -> Result<Comp, EmbedError> {
    Cbv { names: supply_for(t) }.comp(t)
}

struct Cbv {
    names: NameSupply,
}

impl Cbv {
    fn val(&mut self, t: &PcfTerm) -> Result<Option<Value>, EmbedError> {
        Ok(Some(match t {
            PcfTerm::Var(x) => Value::Var(x.clone()),
            PcfTerm::Num(k) => Value::Num(k.clone()),
            PcfTerm::Nil => Value::Nil,
            PcfTerm::Lam(x, ty, m) => Value::thunk(Comp::lam(x, embed_cbv_type(ty), self.comp(m)?)),
            PcfTerm::Rec { fun, arg, dom, cod, body } => {
                let inner = Comp::lam(arg, embed_cbv_type(dom), self.comp(body)?);
                Value::thunk(Comp::fix(fun, arrow_type(dom, cod), inner))
            }
            PcfTerm::Pair(m, n) | PcfTerm::Cons(m, n) if t.is_cbv_syntactic_value() => {
                let (Some(a), Some(b)) = (self.val(m)?, self.val(n)?) else {
                    unreachable!("components of a syntactic value are values")
                };
                if matches!(t, PcfTerm::Pair(..)) {
                    Value::pair(a, b)
                } else {
                    Value::cons(a, b)
                }
            }
            _ => return Ok(None),
        }))
    }

    /// Value of `t`, binding it first when it is not a syntactic value.
    fn operand(&mut self, t: &PcfTerm, hint: &str) -> Result<(Option<(Name, Comp)>, Value), EmbedError> {
        if let Some(v) = self.val(t)? {
            return Ok((None, v));
        }
        let x = self.names.fresh(hint);
        let m = self.comp(t)?;
        Ok((Some((x.clone(), m)), Value::Var(x)))
    }

    fn comp(&mut self, t: &PcfTerm) -> Result<Comp, EmbedError> {
        if let Some(v) = self.val(t)? {
            return Ok(Comp::Return(v));
        }
        Ok(match t {
            PcfTerm::Arith(op, m, n) => {
                let (bm, a) = self.operand(m, "a")?;
                let (bn, b) = self.operand(n, "b")?;
                let v = self.names.fresh("v");
                let calc = Comp::calc(&v, *op, a, b, Comp::ret(Value::Var(v.clone())));
                wrap_binds([bm, bn], calc)
            }
            PcfTerm::IfZ(n, p, q) => {
                let (bn, a) = self.operand(n, "z")?;
                let body = Comp::ifz(a, self.comp(p)?, self.comp(q)?);
                wrap_binds([bn, None], body)
            }
            PcfTerm::Pair(m, n) => {
                let (bm, a) = self.operand(m, "p")?;
                let (bn, b) = self.operand(n, "q")?;
                wrap_binds([bm, bn], Comp::ret(Value::pair(a, b)))
            }
            PcfTerm::Cons(m, n) => {
                let (bm, a) = self.operand(m, "h")?;
                let (bn, b) = self.operand(n, "t")?;
                wrap_binds([bm, bn], Comp::ret(Value::cons(a, b)))
            }
            PcfTerm::Proj(side, m) => {
                let (bm, p) = self.operand(m, "p")?;
                let x1 = self.names.fresh("x");
                let x2 = self.names.fresh("y");
                let chosen = Value::Var(side.pick(&x1, &x2).clone());
                let body = Comp::split(p, &x1, &x2, Comp::charge(Comp::ret(chosen)));
                wrap_binds([bm, None], body)
            }
            PcfTerm::App(m, n) => {
                let (bm, f) = self.operand(m, "f")?;
                let (bn, a) = self.operand(n, "a")?;
                wrap_binds([bm, bn], Comp::charge(Comp::app(Comp::Force(f), a)))
            }
            PcfTerm::LCase { scrut, nil, head, tail, cons } => {
                let (bl, l) = self.operand(scrut, "l")?;
                let body = Comp::lcase(l, self.comp(nil)?, head, tail, self.comp(cons)?);
                wrap_binds([bl, None], body)
            }
            PcfTerm::Fix(..) => {
                return Err(EmbedError::WrongStrategy {
                    construct: "fix",
                    strategy: Strategy::Cbv,
                })
            }
            PcfTerm::Var(_) | PcfTerm::Num(_) | PcfTerm::Nil | PcfTerm::Lam(..) | PcfTerm::Rec { .. } => {
                unreachable!("values are returned above")
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ArithOp;
    use crate::cbpv::{alpha_eq_comp, typecheck_comp, CbpvContext};
    use crate::cbpv_machine::eval_cbpv;
    use crate::pcf_machine::{eval_pcf, Fuel};
    use crate::Side;

    #[test]
    fn cbn_types() {
        let fnat = CompType::free(ValType::Nat);
        assert_eq!(embed_cbn_type(&PcfType::Nat), Ok(fnat.clone()));
        assert_eq!(
            embed_cbn_type(&PcfType::arrow(PcfType::Nat, PcfType::Nat)),
            Ok(CompType::arrow(ValType::thunk(fnat.clone()), fnat.clone()))
        );
        assert_eq!(
            embed_cbn_type(&PcfType::prod(PcfType::Nat, PcfType::Nat)),
            Ok(CompType::with(fnat.clone(), fnat))
        );
        assert!(embed_cbn_type(&PcfType::list(PcfType::Nat)).is_err());
    }

    #[test]
    fn cbv_types() {
        assert_eq!(
            embed_cbv_type(&PcfType::arrow(PcfType::Nat, PcfType::Nat)),
            ValType::thunk(CompType::arrow(ValType::Nat, CompType::free(ValType::Nat)))
        );
    }

    #[test]
    fn numerals_and_variables() {
        assert_eq!(embed_cbn(&PcfTerm::num(3)), Ok(Comp::ret(Value::num(3))));
        assert_eq!(embed_cbn(&PcfTerm::var("x")), Ok(Comp::Force(Value::var("x"))));
        assert_eq!(embed_cbv(&PcfTerm::num(5)), Ok(Comp::ret(Value::num(5))));
    }

    #[test]
    fn cbv_rec_becomes_a_thunked_fix() {
        let body = PcfTerm::app(PcfTerm::var("f"), PcfTerm::var("x"));
        let t = PcfTerm::rec("f", "x", PcfType::Nat, PcfType::Nat, body);
        let v = embed_cbv_val(&t).unwrap().unwrap();
        let ty = arrow_type(&PcfType::Nat, &PcfType::Nat);
        let expected = Value::thunk(Comp::fix(
            "f",
            ty,
            Comp::lam(
                "x",
                ValType::Nat,
                Comp::charge(Comp::app(Comp::Force(Value::var("f")), Value::var("x"))),
            ),
        ));
        assert_eq!(v, expected);
    }

    #[test]
    fn cbn_application_charges_once() {
        let id = PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x"));
        let m = embed_cbn(&PcfTerm::app(id, PcfTerm::num(0))).unwrap();
        let expected = Comp::charge(Comp::app(
            Comp::lam("x", ValType::thunk(CompType::free(ValType::Nat)), Comp::Force(Value::var("x"))),
            Value::thunk(Comp::ret(Value::num(0))),
        ));
        assert!(alpha_eq_comp(&m, &expected), "{m}");
    }

    #[test]
    fn translated_programs_typecheck() {
        let t = PcfTerm::arith(
            ArithOp::Add,
            PcfTerm::app(PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x")), PcfTerm::num(1)),
            PcfTerm::num(2),
        );
        for s in [Strategy::Cbv, Strategy::Cbn] {
            let r = embed_program(&t, s).unwrap();
            assert_eq!(typecheck_comp(&CbpvContext::new(), &r.term), Ok(r.ty.clone()));
        }
    }

    #[test]
    fn costs_agree_on_a_small_program() {
        let t = PcfTerm::proj(
            Side::Left,
            PcfTerm::pair(
                PcfTerm::app(PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x")), PcfTerm::num(4)),
                PcfTerm::num(1),
            ),
        );
        for s in [Strategy::Cbv, Strategy::Cbn] {
            let pcf = eval_pcf(&t, s, Fuel(1000)).cost();
            let cbpv = eval_cbpv(&embed(&t, s).unwrap(), Fuel(1000)).cost();
            assert_eq!(pcf, Some(2));
            assert_eq!(pcf, cbpv, "{s}");
        }
    }

    #[test]
    fn fresh_binders_avoid_source_names() {
        let t = PcfTerm::arith(
            ArithOp::Add,
            PcfTerm::app(PcfTerm::var("_a1"), PcfTerm::num(0)),
            PcfTerm::num(0),
        );
        let m = embed_cbv(&t).unwrap();
        match m {
            Comp::Bind(x, ..) => assert_ne!(x, "_a1"),
            other => panic!("{other}"),
        }
    }
}
