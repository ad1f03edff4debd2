//! S-expression surface syntax for PCF, CBPV and PCFc.
//!
//! The three grammars share a reader; each front end then walks the tree.
//! Printing is the `Display` impls of the core crate, and the parsers accept
//! exactly what those print (plus `let`, bare numerals and comments).

use std::fmt;

use num_bigint::BigUint;
use recx_core::arith::ArithOp;
use recx_core::cbpv::{CompType, Comp, ValType, Value};
use recx_core::pcf::{typecheck_pcf, TypingContext};
use recx_core::pcfc::{typecheck_pcfc, PcfcContext, PcfcTerm, PcfcType};
use recx_core::{PcfTerm, PcfType, Side, Strategy};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items, _) => match items.first() {
                Some(Sexp::Atom(a, _)) => Some(a),
                _ => None,
            },
            Sexp::Atom(..) => None,
        }
    }
}

/// Reads exactly one s-expression, ignoring `;` comments.
pub fn read_sexp(text: &str) -> Result<Sexp, ParseError> {
    let mut r = Reader {
        chars: text.chars().collect(),
        i: 0,
        line: 1,
        col: 1,
    };
    r.skip_trivia();
    if r.peek().is_none() {
        return Err(r.pos().error("empty input"));
    }
    let e = r.sexp()?;
    r.skip_trivia();
    if r.peek().is_some() {
        return Err(r.pos().error("trailing input after the program"));
    }
    Ok(e)
}

struct Reader {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Reader {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn sexp(&mut self) -> Result<Sexp, ParseError> {
        let start = self.pos();
        match self.peek() {
            None => Err(start.error("unexpected end of input")),
            Some(')') => Err(start.error("unbalanced `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(start.error("unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.sexp()?),
                    }
                }
            }
            Some(_) => {
                let mut atom = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(atom, start))
            }
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-')
}

fn numeral(s: &str) -> Option<BigUint> {
    if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

/// Splits `(kw a b ...)` into its arguments, checking the count.
fn args<'a>(e: &'a Sexp, kw: &str, n: usize) -> Result<&'a [Sexp], ParseError> {
    let Sexp::List(items, pos) = e else { unreachable!() };
    if items.len() != n + 1 {
        return Err(pos.error(format!("`{kw}` takes {n} argument(s), found {}", items.len() - 1)));
    }
    Ok(&items[1..])
}

fn ident(e: &Sexp, reserved: &[&str]) -> Result<String, ParseError> {
    match e {
        Sexp::Atom(a, _) if is_ident(a) && !reserved.contains(&a.as_str()) => Ok(a.clone()),
        _ => Err(e.pos().error(format!("expected an identifier, found `{}`", show(e)))),
    }
}

fn num_arg(e: &Sexp) -> Result<BigUint, ParseError> {
    match e {
        Sexp::Atom(a, _) => numeral(a).ok_or_else(|| e.pos().error(format!("expected a numeral, found `{a}`"))),
        _ => Err(e.pos().error("expected a numeral")),
    }
}

/// A list of exactly `n` items, as in binder groups `(x T)`.
fn group(e: &Sexp, n: usize, what: &str) -> Result<Vec<Sexp>, ParseError> {
    match e {
        Sexp::List(items, _) if items.len() == n => Ok(items.clone()),
        _ => Err(e.pos().error(format!("expected {what}"))),
    }
}

fn show(e: &Sexp) -> String {
    match e {
        Sexp::Atom(a, _) => a.clone(),
        Sexp::List(items, _) => {
            let inner: Vec<String> = items.iter().map(show).collect();
            format!("({})", inner.join(" "))
        }
    }
}

fn side_of(kw: &str, base: &str) -> Option<Side> {
    match kw.strip_prefix(base)? {
        "1" => Some(Side::Left),
        "2" => Some(Side::Right),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// PCF

const PCF_RESERVED: &[&str] = &["nil"];

pub fn parse_pcf_type(e: &Sexp) -> Result<PcfType, ParseError> {
    match e {
        Sexp::Atom(a, _) if a == "nat" => Ok(PcfType::Nat),
        Sexp::List(..) => match e.head() {
            Some("prod") => {
                let a = args(e, "prod", 2)?;
                Ok(PcfType::prod(parse_pcf_type(&a[0])?, parse_pcf_type(&a[1])?))
            }
            Some("->") => {
                let a = args(e, "->", 2)?;
                Ok(PcfType::arrow(parse_pcf_type(&a[0])?, parse_pcf_type(&a[1])?))
            }
            Some("list") => {
                let a = args(e, "list", 1)?;
                Ok(PcfType::list(parse_pcf_type(&a[0])?))
            }
            _ => Err(e.pos().error(format!("unknown type `{}`", show(e)))),
        },
        _ => Err(e.pos().error(format!("unknown type `{}`", show(e)))),
    }
}

/// PCF syntax before `let` is desugared. Positions are kept only where a
/// later phase can fail.
enum Pre {
    Var(String),
    Num(BigUint),
    Arith(ArithOp, Box<Pre>, Box<Pre>),
    IfZ(Box<Pre>, Box<Pre>, Box<Pre>),
    Pair(Box<Pre>, Box<Pre>),
    Proj(Side, Box<Pre>),
    Lam(String, PcfType, Box<Pre>),
    App(Box<Pre>, Box<Pre>),
    Fix(String, PcfType, Box<Pre>),
    Rec(String, String, PcfType, PcfType, Box<Pre>),
    Nil,
    Cons(Box<Pre>, Box<Pre>),
    LCase(Box<Pre>, Box<Pre>, String, String, Box<Pre>),
    Let(String, Box<Pre>, Box<Pre>, Pos),
}

fn pre(e: &Sexp) -> Result<Pre, ParseError> {
    let b = |e: &Sexp| pre(e).map(Box::new);
    match e {
        Sexp::Atom(a, pos) => {
            if a == "nil" {
                Ok(Pre::Nil)
            } else if let Some(k) = numeral(a) {
                Ok(Pre::Num(k))
            } else if is_ident(a) {
                Ok(Pre::Var(a.clone()))
            } else {
                Err(pos.error(format!("unexpected `{a}`")))
            }
        }
        Sexp::List(items, pos) => {
            let Some(kw) = e.head() else {
                return Err(pos.error(if items.is_empty() {
                    "empty application `()`".to_string()
                } else {
                    "expected a keyword after `(`".to_string()
                }));
            };
            if let Some(op) = ArithOp::from_keyword(kw) {
                let a = args(e, kw, 2)?;
                return Ok(Pre::Arith(op, b(&a[0])?, b(&a[1])?));
            }
            if let Some(side) = side_of(kw, "proj") {
                let a = args(e, kw, 1)?;
                return Ok(Pre::Proj(side, b(&a[0])?));
            }
            match kw {
                "num" => Ok(Pre::Num(num_arg(&args(e, kw, 1)?[0])?)),
                "ifz" => {
                    let a = args(e, kw, 3)?;
                    Ok(Pre::IfZ(b(&a[0])?, b(&a[1])?, b(&a[2])?))
                }
                "pair" => {
                    let a = args(e, kw, 2)?;
                    Ok(Pre::Pair(b(&a[0])?, b(&a[1])?))
                }
                "lam" | "fix" => {
                    let a = args(e, kw, 2)?;
                    let g = group(&a[0], 2, "a binder `(x T)`")?;
                    let x = ident(&g[0], PCF_RESERVED)?;
                    let ty = parse_pcf_type(&g[1])?;
                    let body = b(&a[1])?;
                    Ok(if kw == "lam" { Pre::Lam(x, ty, body) } else { Pre::Fix(x, ty, body) })
                }
                "app" => {
                    let a = args(e, kw, 2)?;
                    Ok(Pre::App(b(&a[0])?, b(&a[1])?))
                }
                "rec" => {
                    let a = args(e, kw, 2)?;
                    let g = group(&a[0], 4, "a binder `(f x T T)`")?;
                    Ok(Pre::Rec(
                        ident(&g[0], PCF_RESERVED)?,
                        ident(&g[1], PCF_RESERVED)?,
                        parse_pcf_type(&g[2])?,
                        parse_pcf_type(&g[3])?,
                        b(&a[1])?,
                    ))
                }
                "cons" => {
                    let a = args(e, kw, 2)?;
                    Ok(Pre::Cons(b(&a[0])?, b(&a[1])?))
                }
                "lcase" => {
                    let a = args(e, kw, 3)?;
                    let g = group(&a[2], 3, "a cons branch `(h t M)`")?;
                    Ok(Pre::LCase(
                        b(&a[0])?,
                        b(&a[1])?,
                        ident(&g[0], PCF_RESERVED)?,
                        ident(&g[1], PCF_RESERVED)?,
                        b(&g[2])?,
                    ))
                }
                "let" => {
                    let a = args(e, kw, 2)?;
                    let g = group(&a[0], 2, "a binding `(x M)`")?;
                    Ok(Pre::Let(ident(&g[0], PCF_RESERVED)?, b(&g[1])?, b(&a[1])?, *pos))
                }
                _ => Err(pos.error(format!("unknown form `{kw}`"))),
            }
        }
    }
}

#[derive(Default)]
struct Markers {
    cbn: bool,
    cbv: bool,
}

fn markers(p: &Pre, m: &mut Markers) {
    let ty = |t: &PcfType, m: &mut Markers| m.cbv |= t.contains_list();
    match p {
        Pre::Var(_) | Pre::Num(_) => {}
        Pre::Nil => m.cbv = true,
        Pre::Arith(_, a, b) | Pre::Pair(a, b) | Pre::App(a, b) => {
            markers(a, m);
            markers(b, m);
        }
        Pre::Cons(a, b) => {
            m.cbv = true;
            markers(a, m);
            markers(b, m);
        }
        Pre::IfZ(a, b, c) => {
            markers(a, m);
            markers(b, m);
            markers(c, m);
        }
        Pre::Proj(_, a) => markers(a, m),
        Pre::Lam(_, t, a) => {
            ty(t, m);
            markers(a, m);
        }
        Pre::Fix(_, t, a) => {
            m.cbn = true;
            ty(t, m);
            markers(a, m);
        }
        Pre::Rec(_, _, t, u, a) => {
            m.cbv = true;
            ty(t, m);
            ty(u, m);
            markers(a, m);
        }
        Pre::LCase(a, b, _, _, c) => {
            m.cbv = true;
            markers(a, m);
            markers(b, m);
            markers(c, m);
        }
        Pre::Let(_, a, b, _) => {
            markers(a, m);
            markers(b, m);
        }
    }
}

fn desugar(p: &Pre, ctx: &TypingContext, s: Strategy) -> Result<PcfTerm, ParseError> {
    let d = |p: &Pre| desugar(p, ctx, s).map(Box::new);
    Ok(match p {
        Pre::Var(x) => PcfTerm::Var(x.clone()),
        Pre::Num(k) => PcfTerm::Num(k.clone()),
        Pre::Nil => PcfTerm::Nil,
        Pre::Arith(op, a, b) => PcfTerm::Arith(*op, d(a)?, d(b)?),
        Pre::Pair(a, b) => PcfTerm::Pair(d(a)?, d(b)?),
        Pre::App(a, b) => PcfTerm::App(d(a)?, d(b)?),
        Pre::Cons(a, b) => PcfTerm::Cons(d(a)?, d(b)?),
        Pre::IfZ(a, b, c) => PcfTerm::IfZ(d(a)?, d(b)?, d(c)?),
        Pre::Proj(side, a) => PcfTerm::Proj(*side, d(a)?),
        Pre::Lam(x, t, a) => PcfTerm::Lam(x.clone(), t.clone(), Box::new(desugar(a, &ctx.extend(x, t.clone()), s)?)),
        Pre::Fix(x, t, a) => PcfTerm::Fix(x.clone(), t.clone(), Box::new(desugar(a, &ctx.extend(x, t.clone()), s)?)),
        Pre::Rec(f, x, dom, cod, a) => {
            let inner = ctx
                .extend(f, PcfType::arrow(dom.clone(), cod.clone()))
                .extend(x, dom.clone());
            PcfTerm::Rec {
                fun: f.clone(),
                arg: x.clone(),
                dom: dom.clone(),
                cod: cod.clone(),
                body: Box::new(desugar(a, &inner, s)?),
            }
        }
        Pre::LCase(a, b, h, t, c) => {
            let scrut = d(a)?;
            // The element type is only needed by `let`s inside the cons
            // branch; if it is unavailable the typechecker reports later.
            let inner = match typecheck_pcf(ctx, &scrut, s) {
                Ok(PcfType::List(elem)) => ctx.extend(h, (*elem).clone()).extend(t, PcfType::List(elem)),
                _ => ctx.clone(),
            };
            PcfTerm::LCase {
                scrut,
                nil: d(b)?,
                head: h.clone(),
                tail: t.clone(),
                cons: Box::new(desugar(c, &inner, s)?),
            }
        }
        Pre::Let(x, m, n, pos) => {
            let m = desugar(m, ctx, s)?;
            let ty = typecheck_pcf(ctx, &m, s)
                .map_err(|e| pos.error(format!("cannot infer the type of `{x}`: {e}")))?;
            let n = desugar(n, &ctx.extend(x, ty.clone()), s)?;
            PcfTerm::let_in(x, ty, m, n)
        }
    })
}

/// Parses a PCF program and infers its strategy: `fix` means call-by-name,
/// `rec` and lists mean call-by-value, and programs with neither default to
/// call-by-value.
pub fn parse_pcf(text: &str) -> Result<(PcfTerm, Strategy), ParseError> {
    parse_pcf_as(text, None)
}

/// Like [`parse_pcf`], with the strategy fixed by the caller. A program that
/// does not fit the strategy still parses; the typechecker rejects it.
pub fn parse_pcf_as(text: &str, strategy: Option<Strategy>) -> Result<(PcfTerm, Strategy), ParseError> {
    let e = read_sexp(text)?;
    let p = pre(&e)?;
    let s = match strategy {
        Some(s) => s,
        None => {
            let mut m = Markers::default();
            markers(&p, &mut m);
            match (m.cbn, m.cbv) {
                (true, true) => {
                    return Err(e.pos().error(
                        "program mixes `fix` with `rec` or lists; pass a strategy explicitly",
                    ))
                }
                (true, false) => Strategy::Cbn,
                _ => Strategy::Cbv,
            }
        }
    };
    Ok((desugar(&p, &TypingContext::new(), s)?, s))
}

pub fn parse_strategy(s: &str) -> Option<Strategy> {
    match s {
        "cbv" => Some(Strategy::Cbv),
        "cbn" => Some(Strategy::Cbn),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// CBPV

const CBPV_RESERVED: &[&str] = &["nil"];
const COMP_KEYWORDS: &[&str] = &[
    "return", "bind", "force", "lam", "app", "cpair", "cproj1", "cproj2", "split", "ifz", "calc", "charge", "cfix",
    "lcase",
];
const VALUE_KEYWORDS: &[&str] = &["num", "vpair", "thunk", "cons"];

pub fn parse_val_type(e: &Sexp) -> Result<ValType, ParseError> {
    match e {
        Sexp::Atom(a, _) if a == "nat" => Ok(ValType::Nat),
        Sexp::List(..) => match e.head() {
            Some("prod") => {
                let a = args(e, "prod", 2)?;
                Ok(ValType::prod(parse_val_type(&a[0])?, parse_val_type(&a[1])?))
            }
            Some("U") => Ok(ValType::thunk(parse_comp_type(&args(e, "U", 1)?[0])?)),
            Some("list") => Ok(ValType::list(parse_val_type(&args(e, "list", 1)?[0])?)),
            Some("F" | "with" | "->") => Err(e.pos().error(format!("expected a value type, found `{}`", show(e)))),
            _ => Err(e.pos().error(format!("unknown type `{}`", show(e)))),
        },
        _ => Err(e.pos().error(format!("unknown type `{}`", show(e)))),
    }
}

pub fn parse_comp_type(e: &Sexp) -> Result<CompType, ParseError> {
    match e.head() {
        Some("F") => Ok(CompType::free(parse_val_type(&args(e, "F", 1)?[0])?)),
        Some("with") => {
            let a = args(e, "with", 2)?;
            Ok(CompType::with(parse_comp_type(&a[0])?, parse_comp_type(&a[1])?))
        }
        Some("->") => {
            let a = args(e, "->", 2)?;
            Ok(CompType::arrow(parse_val_type(&a[0])?, parse_comp_type(&a[1])?))
        }
        _ => Err(e.pos().error(format!("expected a computation type, found `{}`", show(e)))),
    }
}

pub fn parse_value(e: &Sexp) -> Result<Value, ParseError> {
    match e {
        Sexp::Atom(a, pos) => {
            if a == "nil" {
                Ok(Value::Nil)
            } else if let Some(k) = numeral(a) {
                Ok(Value::Num(k))
            } else if is_ident(a) {
                Ok(Value::Var(a.clone()))
            } else {
                Err(pos.error(format!("unexpected `{a}`")))
            }
        }
        Sexp::List(_, pos) => match e.head() {
            Some("num") => Ok(Value::Num(num_arg(&args(e, "num", 1)?[0])?)),
            Some("vpair") => {
                let a = args(e, "vpair", 2)?;
                Ok(Value::pair(parse_value(&a[0])?, parse_value(&a[1])?))
            }
            Some("thunk") => Ok(Value::thunk(parse_comp(&args(e, "thunk", 1)?[0])?)),
            Some("cons") => {
                let a = args(e, "cons", 2)?;
                Ok(Value::cons(parse_value(&a[0])?, parse_value(&a[1])?))
            }
            Some(kw) if COMP_KEYWORDS.contains(&kw) => {
                Err(pos.error(format!("polarity: expected a value, found the computation `{kw}`")))
            }
            _ => Err(pos.error(format!("unknown value form `{}`", show(e)))),
        },
    }
}

pub fn parse_comp(e: &Sexp) -> Result<Comp, ParseError> {
    let Sexp::List(_, pos) = e else {
        return Err(e.pos().error(format!(
            "polarity: expected a computation, found the value `{}`",
            show(e)
        )));
    };
    let Some(kw) = e.head() else {
        return Err(pos.error("expected a keyword after `(`"));
    };
    let c = |e: &Sexp| parse_comp(e);
    let v = |e: &Sexp| parse_value(e);
    if let Some(side) = side_of(kw, "cproj") {
        return Ok(Comp::proj(side, c(&args(e, kw, 1)?[0])?));
    }
    match kw {
        "return" => Ok(Comp::ret(v(&args(e, kw, 1)?[0])?)),
        "bind" => {
            let a = args(e, kw, 2)?;
            let g = group(&a[0], 2, "a binding `(x M)`")?;
            Ok(Comp::bind(&ident(&g[0], CBPV_RESERVED)?, c(&g[1])?, c(&a[1])?))
        }
        "force" => Ok(Comp::Force(v(&args(e, kw, 1)?[0])?)),
        "lam" => {
            let a = args(e, kw, 2)?;
            let g = group(&a[0], 2, "a binder `(x A)`")?;
            Ok(Comp::lam(&ident(&g[0], CBPV_RESERVED)?, parse_val_type(&g[1])?, c(&a[1])?))
        }
        "app" => {
            let a = args(e, kw, 2)?;
            Ok(Comp::app(c(&a[0])?, v(&a[1])?))
        }
        "cpair" => {
            let a = args(e, kw, 2)?;
            Ok(Comp::pair(c(&a[0])?, c(&a[1])?))
        }
        "split" => {
            let a = args(e, kw, 3)?;
            let g = group(&a[1], 2, "a binder pair `(x y)`")?;
            Ok(Comp::split(
                v(&a[0])?,
                &ident(&g[0], CBPV_RESERVED)?,
                &ident(&g[1], CBPV_RESERVED)?,
                c(&a[2])?,
            ))
        }
        "ifz" => {
            let a = args(e, kw, 3)?;
            Ok(Comp::ifz(v(&a[0])?, c(&a[1])?, c(&a[2])?))
        }
        "calc" => {
            let a = args(e, kw, 2)?;
            let g = group(&a[0], 4, "an operation `(v op V W)`")?;
            let op = match &g[1] {
                Sexp::Atom(o, _) => ArithOp::from_keyword(o),
                _ => None,
            }
            .ok_or_else(|| g[1].pos().error(format!("unknown operator `{}`", show(&g[1]))))?;
            Ok(Comp::calc(&ident(&g[0], CBPV_RESERVED)?, op, v(&g[2])?, v(&g[3])?, c(&a[1])?))
        }
        "charge" => Ok(Comp::charge(c(&args(e, kw, 1)?[0])?)),
        "cfix" => {
            let a = args(e, kw, 2)?;
            let g = group(&a[0], 2, "a binder `(x B)`")?;
            Ok(Comp::fix(&ident(&g[0], CBPV_RESERVED)?, parse_comp_type(&g[1])?, c(&a[1])?))
        }
        "lcase" => {
            let a = args(e, kw, 3)?;
            let g = group(&a[2], 3, "a cons branch `(h t M)`")?;
            Ok(Comp::lcase(
                v(&a[0])?,
                c(&a[1])?,
                &ident(&g[0], CBPV_RESERVED)?,
                &ident(&g[1], CBPV_RESERVED)?,
                c(&g[2])?,
            ))
        }
        _ if VALUE_KEYWORDS.contains(&kw) => Err(pos.error(format!(
            "polarity: expected a computation, found the value `{kw}`"
        ))),
        _ => Err(pos.error(format!("unknown computation form `{kw}`"))),
    }
}

pub fn parse_cbpv(text: &str) -> Result<Comp, ParseError> {
    parse_comp(&read_sexp(text)?)
}

// ---------------------------------------------------------------------------
// PCFc

const PCFC_RESERVED: &[&str] = &["czero", "cone"];

pub fn parse_pcfc_type(e: &Sexp) -> Result<PcfcType, ParseError> {
    match e {
        Sexp::Atom(a, _) if a == "nat" => Ok(PcfcType::Nat),
        Sexp::Atom(a, _) if a == "cost" => Ok(PcfcType::Cost),
        Sexp::List(..) => match e.head() {
            Some("prod") => {
                let a = args(e, "prod", 2)?;
                Ok(PcfcType::prod(parse_pcfc_type(&a[0])?, parse_pcfc_type(&a[1])?))
            }
            Some("->") => {
                let a = args(e, "->", 2)?;
                Ok(PcfcType::arrow(parse_pcfc_type(&a[0])?, parse_pcfc_type(&a[1])?))
            }
            _ => Err(e.pos().error(format!("unknown type `{}`", show(e)))),
        },
        _ => Err(e.pos().error(format!("unknown type `{}`", show(e)))),
    }
}

/// Parses a PCFc term. `let` is accepted and desugars to a redex, so the
/// bound term must typecheck in the enclosing binders.
pub fn parse_pcfc(text: &str) -> Result<PcfcTerm, ParseError> {
    pcfc(&read_sexp(text)?, &PcfcContext::new())
}

fn pcfc(e: &Sexp, ctx: &PcfcContext) -> Result<PcfcTerm, ParseError> {
    let b = |e: &Sexp| pcfc(e, ctx);
    let under = |x: &str, ty: &PcfcType, e: &Sexp| {
        let mut inner = ctx.clone();
        inner.push((x.to_string(), ty.clone()));
        pcfc(e, &inner)
    };
    match e {
        Sexp::Atom(a, pos) => match a.as_str() {
            "czero" => Ok(PcfcTerm::Zero),
            "cone" => Ok(PcfcTerm::One),
            _ => {
                if let Some(k) = numeral(a) {
                    Ok(PcfcTerm::Num(k))
                } else if is_ident(a) {
                    Ok(PcfcTerm::Var(a.clone()))
                } else {
                    Err(pos.error(format!("unexpected `{a}`")))
                }
            }
        },
        Sexp::List(_, pos) => {
            let Some(kw) = e.head() else {
                return Err(pos.error("expected a keyword after `(`"));
            };
            if let Some(op) = ArithOp::from_keyword(kw) {
                let a = args(e, kw, 2)?;
                return Ok(PcfcTerm::arith(op, b(&a[0])?, b(&a[1])?));
            }
            if let Some(side) = side_of(kw, "proj") {
                return Ok(PcfcTerm::proj(side, b(&args(e, kw, 1)?[0])?));
            }
            match kw {
                "num" => Ok(PcfcTerm::Num(num_arg(&args(e, kw, 1)?[0])?)),
                "ifz" => {
                    let a = args(e, kw, 3)?;
                    Ok(PcfcTerm::ifz(b(&a[0])?, b(&a[1])?, b(&a[2])?))
                }
                "pair" => {
                    let a = args(e, kw, 2)?;
                    Ok(PcfcTerm::pair(b(&a[0])?, b(&a[1])?))
                }
                "app" => {
                    let a = args(e, kw, 2)?;
                    Ok(PcfcTerm::app(b(&a[0])?, b(&a[1])?))
                }
                "cplus" => {
                    let a = args(e, kw, 2)?;
                    Ok(PcfcTerm::cplus(b(&a[0])?, b(&a[1])?))
                }
                "lam" | "fix" => {
                    let a = args(e, kw, 2)?;
                    let g = group(&a[0], 2, "a binder `(x T)`")?;
                    let x = ident(&g[0], PCFC_RESERVED)?;
                    let ty = parse_pcfc_type(&g[1])?;
                    let body = under(&x, &ty, &a[1])?;
                    Ok(if kw == "lam" { PcfcTerm::lam(&x, ty, body) } else { PcfcTerm::fix(&x, ty, body) })
                }
                "let" => {
                    let a = args(e, kw, 2)?;
                    let g = group(&a[0], 2, "a binding `(x M)`")?;
                    let x = ident(&g[0], PCFC_RESERVED)?;
                    let m = b(&g[1])?;
                    let ty = typecheck_pcfc(ctx, &m)
                        .map_err(|err| pos.error(format!("cannot infer the type of `{x}`: {err}")))?;
                    let n = under(&x, &ty, &a[1])?;
                    Ok(PcfcTerm::app(PcfcTerm::lam(&x, ty, n), m))
                }
                _ => Err(pos.error(format!("unknown form `{kw}`"))),
            }
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use recx_core::pcf::alpha_eq;

    #[test]
    fn numerals_and_applications() {
        assert_eq!(parse_pcf("(num 5)").unwrap().0, PcfTerm::num(5));
        let (t, s) = parse_pcf("(app (lam (x nat) x) (num 0))").unwrap();
        assert_eq!(t, PcfTerm::app(PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x")), PcfTerm::num(0)));
        assert_eq!(s, Strategy::Cbv);
    }

    #[test]
    fn strategy_inference() {
        let (_, s) = parse_pcf("(rec (f x nat nat) (ifz x (num 1) (app f (sub x (num 1)))))").unwrap();
        assert_eq!(s, Strategy::Cbv);
        assert_eq!(parse_pcf("(fix (x nat) x)").unwrap().1, Strategy::Cbn);
        assert_eq!(parse_pcf("(lcase nil 0 (h t h))").unwrap().1, Strategy::Cbv);
        assert!(parse_pcf("(pair (fix (x nat) x) nil)").is_err());
    }

    #[test]
    fn let_takes_the_type_of_its_definition() {
        let (t, _) = parse_pcf("(let (f (lam (x nat) x)) (app f 3))").unwrap();
        let id = PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x"));
        let expected = PcfTerm::let_in(
            "f",
            PcfType::arrow(PcfType::Nat, PcfType::Nat),
            id,
            PcfTerm::app(PcfTerm::var("f"), PcfTerm::num(3)),
        );
        assert!(alpha_eq(&t, &expected));
    }

    #[test]
    fn let_inside_binders_sees_them() {
        let src = "(lcase (cons 1 nil) 0 (h t (let (y (add h 1)) y)))";
        assert!(parse_pcf(src).is_ok());
        let src = "(rec (f l (list nat) nat) (let (k l) 0))";
        assert!(parse_pcf(src).is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_pcf("(add 1\n  (bogus 2))").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
        let err = parse_pcf("(app 1").unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
        let err = parse_pcf("; just a comment").unwrap_err();
        assert!(err.message.contains("empty"));
        let err = parse_pcf("(let (x (app 1 2)) x)").unwrap_err();
        assert!(err.message.contains("cannot infer"));
    }

    #[test]
    fn comments_are_skipped() {
        let t = parse_pcf("; header\n(num ; inline\n 7) ; trailer").unwrap().0;
        assert_eq!(t, PcfTerm::num(7));
    }

    #[test]
    fn generated_names_are_identifiers() {
        assert!(parse_cbpv("(bind (_x1 (return (num 1))) (return _x1))").is_ok());
        assert!(parse_pcfc("(lam (y' nat) y')").is_ok());
    }

    #[test]
    fn cbpv_polarity_errors() {
        let err = parse_cbpv("(force (return 1))").unwrap_err();
        assert!(err.message.starts_with("polarity"), "{err}");
        let err = parse_cbpv("(thunk (return 1))").unwrap_err();
        assert!(err.message.starts_with("polarity"), "{err}");
        let err = parse_cbpv("x").unwrap_err();
        assert!(err.message.starts_with("polarity"), "{err}");
    }

    #[test]
    fn pcfc_let_and_costs() {
        let t = parse_pcfc("(let (k (cplus cone czero)) (pair k (num 2)))").unwrap();
        assert_eq!(
            typecheck_pcfc(&PcfcContext::new(), &t),
            Ok(PcfcType::prod(PcfcType::Cost, PcfcType::Nat))
        );
    }
}
