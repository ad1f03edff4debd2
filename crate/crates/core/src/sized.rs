//! The sized-domain model of PCFc.
//!
//! Nat and Cost are interpreted in the flat domain of naturals, whose bottom
//! element stands for both divergence and infinity. Products are pointwise,
//! functions are closures, and the conditional and the arithmetic operators
//! are monotonized so that the interpretation of a recurrence is an upper
//! bound in the size order.
//!
//! Fixed points are interpreted by their finite approximants. A fixed point
//! evaluates to `FixRef(node, n)`, the `n`-th approximant, and unfolds lazily
//! on use. Approximants increase in the information order, which reverses
//! into the size order, so cutting evaluation short (by the unfolding depth
//! or the global step budget) only makes bounds looser, never wrong.
//! Applications of approximants to first-order arguments are memoized per
//! node; without that, recurrences that branch on both sides of a
//! monotonized conditional (merging two lists, say) are exponential.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::String;
use core::cell::{Cell, RefCell};
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::arith::{self, ArithOp};
use crate::pcfc::{PcfcTerm, PcfcType};

#[derive(Clone)]
pub enum SizedValue<'t> {
    Fin(BigUint),
    /// Divergence, read as infinity; the greatest element of the size order.
    Bottom,
    Pair(Rc<SizedValue<'t>>, Rc<SizedValue<'t>>),
    Closure {
        param: &'t str,
        body: &'t PcfcTerm,
        env: Env<'t>,
    },
    /// Pointwise join of two functions, computed on application.
    JoinFun(Rc<SizedValue<'t>>, Rc<SizedValue<'t>>),
    /// The `n`-th approximant of a fixed point at function type.
    FixRef(Rc<FixNode<'t>>, u64),
}

impl<'t> SizedValue<'t> {
    pub fn fin(k: u64) -> Self {
        SizedValue::Fin(BigUint::from(k))
    }

    pub fn pair(a: SizedValue<'t>, b: SizedValue<'t>) -> Self {
        SizedValue::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, SizedValue::Bottom)
    }

    pub fn as_fin(&self) -> Option<&BigUint> {
        match self {
            SizedValue::Fin(k) => Some(k),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_fin().and_then(|k| k.try_into().ok())
    }

    /// Components of a pair; bottom at a product type is the pair of bottoms.
    pub fn components(&self) -> Option<(SizedValue<'t>, SizedValue<'t>)> {
        match self {
            SizedValue::Pair(a, b) => Some(((**a).clone(), (**b).clone())),
            SizedValue::Bottom => Some((SizedValue::Bottom, SizedValue::Bottom)),
            _ => None,
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(
            self,
            SizedValue::Closure { .. } | SizedValue::JoinFun(..) | SizedValue::FixRef(..)
        )
    }
}

impl fmt::Debug for SizedValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SizedValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizedValue::Fin(k) => write!(f, "{k}"),
            SizedValue::Bottom => f.write_str("inf"),
            SizedValue::Pair(a, b) => write!(f, "<{a}, {b}>"),
            SizedValue::Closure { .. } | SizedValue::JoinFun(..) | SizedValue::FixRef(..) => f.write_str("<fun>"),
        }
    }
}

/// Immutable environments, shared between closures.
#[derive(Clone, Default)]
pub struct Env<'t>(Option<Rc<EnvNode<'t>>>);

struct EnvNode<'t> {
    name: &'t str,
    value: SizedValue<'t>,
    next: Env<'t>,
}

impl<'t> Env<'t> {
    pub fn empty() -> Self {
        Env(None)
    }

    pub fn bind(&self, name: &'t str, value: SizedValue<'t>) -> Self {
        Env(Some(Rc::new(EnvNode {
            name,
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&SizedValue<'t>> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }
}

/// A fixed point closed over its environment, with memo tables for its
/// approximants.
pub struct FixNode<'t> {
    var: &'t str,
    ty: &'t PcfcType,
    body: &'t PcfcTerm,
    env: Env<'t>,
    applied: RefCell<BTreeMap<(u64, Key), SizedValue<'t>>>,
    forced: RefCell<BTreeMap<u64, SizedValue<'t>>>,
}

/// First-order values, usable as memo keys.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Fin(BigUint),
    Bottom,
    Pair(alloc::boxed::Box<Key>, alloc::boxed::Box<Key>),
}

fn key_of(v: &SizedValue<'_>) -> Option<Key> {
    match v {
        SizedValue::Fin(k) => Some(Key::Fin(k.clone())),
        SizedValue::Bottom => Some(Key::Bottom),
        SizedValue::Pair(a, b) => Some(Key::Pair(
            alloc::boxed::Box::new(key_of(a)?),
            alloc::boxed::Box::new(key_of(b)?),
        )),
        _ => None,
    }
}

/// Limits on the work done by one denotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Index of the approximant used for each fixed point.
    pub depth: u64,
    /// Total evaluation steps; once spent, everything left is bottom.
    pub steps: u64,
}

impl Budget {
    pub const DEFAULT: Budget = Budget {
        depth: 10_000,
        steps: 20_000_000,
    };
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

pub fn denote<'t>(t: &'t PcfcTerm, env: &Env<'t>, budget: Budget) -> SizedValue<'t> {
    Model::new(budget).eval(t, env)
}

pub fn denote_closed(t: &PcfcTerm, budget: Budget) -> SizedValue<'_> {
    denote(t, &Env::empty(), budget)
}

/// An evaluation session. Values from one session may be applied in it
/// again, which is how recurrences are sampled at several arguments.
pub struct Model {
    depth: u64,
    steps: Cell<u64>,
}

impl Model {
    pub fn new(budget: Budget) -> Self {
        Model {
            depth: budget.depth,
            steps: Cell::new(budget.steps),
        }
    }

    /// Whether the step budget ran out at some point.
    pub fn exhausted(&self) -> bool {
        self.steps.get() == 0
    }

    fn step(&self) -> bool {
        let left = self.steps.get();
        if left == 0 {
            return false;
        }
        self.steps.set(left - 1);
        true
    }

    pub fn eval<'t>(&self, t: &'t PcfcTerm, env: &Env<'t>) -> SizedValue<'t> {
        if !self.step() {
            return SizedValue::Bottom;
        }
        match t {
            PcfcTerm::Var(x) => match env.lookup(x) {
                Some(SizedValue::FixRef(node, n)) if !matches!(node.ty, PcfcType::Arrow(..)) => {
                    self.force(node, *n)
                }
                Some(v) => v.clone(),
                None => panic!("unbound variable `{x}` in the sized model"),
            },
            PcfcTerm::Num(k) => SizedValue::Fin(k.clone()),
            PcfcTerm::Zero => SizedValue::fin(0),
            PcfcTerm::One => SizedValue::fin(1),
            PcfcTerm::CPlus(m, n) => {
                let a = self.eval(m, env);
                let b = self.eval(n, env);
                ground_op(&a, &b, |a, b| arith::apply(ArithOp::Add, a, b))
            }
            PcfcTerm::Arith(op, m, n) => {
                let a = self.eval(m, env);
                let b = self.eval(n, env);
                let exact = matches!(**n, PcfcTerm::Num(_));
                ground_op(&a, &b, |a, b| monotone_op(*op, a, b, exact))
            }
            PcfcTerm::IfZ(n, p, q) => match self.eval(n, env) {
                SizedValue::Fin(k) if k.is_zero() => self.eval(p, env),
                SizedValue::Fin(_) => {
                    let v = self.eval(p, env);
                    let w = self.eval(q, env);
                    join(&v, &w)
                }
                _ => SizedValue::Bottom,
            },
            PcfcTerm::Pair(m, n) => SizedValue::pair(self.eval(m, env), self.eval(n, env)),
            PcfcTerm::Proj(side, m) => match self.eval(m, env).components() {
                Some((a, b)) => side.pick(a, b),
                None => panic!("projection from a function in the sized model"),
            },
            PcfcTerm::Lam(x, _, body) => SizedValue::Closure {
                param: x,
                body,
                env: env.clone(),
            },
            PcfcTerm::App(m, n) => {
                let f = self.eval(m, env);
                let a = self.eval(n, env);
                self.apply(&f, a)
            }
            PcfcTerm::Fix(x, ty, body) => {
                if t.is_omega() {
                    return SizedValue::Bottom;
                }
                let node = Rc::new(FixNode {
                    var: x,
                    ty,
                    body,
                    env: env.clone(),
                    applied: RefCell::new(BTreeMap::new()),
                    forced: RefCell::new(BTreeMap::new()),
                });
                if matches!(ty, PcfcType::Arrow(..)) {
                    SizedValue::FixRef(node, self.depth)
                } else {
                    self.force(&node, self.depth)
                }
            }
        }
    }

    /// The `n`-th approximant of a fixed point at a non-function type.
    fn force<'t>(&self, node: &Rc<FixNode<'t>>, n: u64) -> SizedValue<'t> {
        if n == 0 {
            return SizedValue::Bottom;
        }
        if let Some(v) = node.forced.borrow().get(&n) {
            return v.clone();
        }
        let v = self.unfold(node, n);
        node.forced.borrow_mut().insert(n, v.clone());
        v
    }

    /// The body of a fixed point with the variable bound to approximant n-1.
    fn unfold<'t>(&self, node: &Rc<FixNode<'t>>, n: u64) -> SizedValue<'t> {
        let env = node.env.bind(node.var, SizedValue::FixRef(node.clone(), n - 1));
        self.eval(node.body, &env)
    }

    pub fn apply<'t>(&self, f: &SizedValue<'t>, arg: SizedValue<'t>) -> SizedValue<'t> {
        if !self.step() {
            return SizedValue::Bottom;
        }
        match f {
            SizedValue::Closure { param, body, env } => self.eval(body, &env.bind(param, arg)),
            SizedValue::JoinFun(g, h) => {
                let v = self.apply(g, arg.clone());
                let w = self.apply(h, arg);
                join(&v, &w)
            }
            SizedValue::FixRef(node, n) => {
                if *n == 0 {
                    return SizedValue::Bottom;
                }
                let key = key_of(&arg).map(|k| (*n, k));
                if let Some(key) = &key {
                    if let Some(v) = node.applied.borrow().get(key) {
                        return v.clone();
                    }
                }
                let g = self.unfold(node, *n);
                let v = self.apply(&g, arg);
                if let Some(key) = key {
                    node.applied.borrow_mut().insert(key, v.clone());
                }
                v
            }
            SizedValue::Bottom => SizedValue::Bottom,
            SizedValue::Fin(_) | SizedValue::Pair(..) => panic!("application of a non-function in the sized model"),
        }
    }
}

fn ground_op<'t>(
    a: &SizedValue<'t>,
    b: &SizedValue<'t>,
    op: impl FnOnce(&BigUint, &BigUint) -> Option<BigUint>,
) -> SizedValue<'t> {
    match (a, b) {
        (SizedValue::Fin(a), SizedValue::Fin(b)) => op(a, b).map_or(SizedValue::Bottom, SizedValue::Fin),
        _ => SizedValue::Bottom,
    }
}

/// Arithmetic as interpreted in the model. `-` and `div` are exact only
/// when their right operand is a numeral; otherwise they are bounded by
/// their left operand. `a mod b` is bounded by `b - 1`.
fn monotone_op(op: ArithOp, a: &BigUint, b: &BigUint, right_is_numeral: bool) -> Option<BigUint> {
    match op {
        ArithOp::Add | ArithOp::Mul => arith::apply(op, a, b),
        ArithOp::Sub | ArithOp::Div if right_is_numeral => arith::apply(op, a, b),
        ArithOp::Sub | ArithOp::Div => Some(a.clone()),
        ArithOp::Mod => Some(arith::monus(b, &BigUint::from(1u8))),
    }
}

/// Binary join: maximum on naturals, absorbing bottom, componentwise on
/// pairs and pointwise (lazily) on functions.
pub fn join<'t>(v: &SizedValue<'t>, w: &SizedValue<'t>) -> SizedValue<'t> {
    match (v, w) {
        (SizedValue::Bottom, _) | (_, SizedValue::Bottom) => SizedValue::Bottom,
        (SizedValue::Fin(a), SizedValue::Fin(b)) => SizedValue::Fin(a.max(b).clone()),
        (SizedValue::Pair(a1, b1), SizedValue::Pair(a2, b2)) => SizedValue::pair(join(a1, a2), join(b1, b2)),
        (f, g) if f.is_function() && g.is_function() => SizedValue::JoinFun(Rc::new(f.clone()), Rc::new(g.clone())),
        _ => panic!("join of values of different shapes: {v} and {w}"),
    }
}

/// Raised when the size order would have to compare functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Undecidable(pub String);

impl fmt::Display for Undecidable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size order is not decidable on {}", self.0)
    }
}

/// The size order at first-order types: `v ⪯ w` iff `w` is bottom or
/// `v <= w`, componentwise on pairs.
pub fn size_leq(v: &SizedValue<'_>, w: &SizedValue<'_>) -> Result<bool, Undecidable> {
    if v.is_function() || w.is_function() {
        return Err(Undecidable(alloc::format!("{v} and {w}")));
    }
    match (v, w) {
        (_, SizedValue::Bottom) => Ok(true),
        (SizedValue::Bottom, SizedValue::Fin(_)) => Ok(false),
        (SizedValue::Fin(a), SizedValue::Fin(b)) => Ok(a <= b),
        _ => pair_leq(v, w),
    }
}

fn pair_leq(v: &SizedValue<'_>, w: &SizedValue<'_>) -> Result<bool, Undecidable> {
    match (v.components(), w.components()) {
        (Some((a1, b1)), Some((a2, b2))) => Ok(size_leq(&a1, &a2)? && size_leq(&b1, &b2)?),
        _ => Err(Undecidable(alloc::format!("{v} and {w}"))),
    }
}

/// Equality at first-order types, identifying bottom with a pair of bottoms.
pub fn first_order_eq(v: &SizedValue<'_>, w: &SizedValue<'_>) -> Result<bool, Undecidable> {
    Ok(size_leq(v, w)? && size_leq(w, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcfc::numc;
    use crate::Side;

    fn small() -> Budget {
        Budget { depth: 200, steps: 1_000_000 }
    }

    fn d(t: &PcfcTerm) -> SizedValue<'_> {
        denote_closed(t, small())
    }

    #[test]
    fn omega_is_infinite() {
        assert!(d(&PcfcTerm::omega(PcfcType::Cost)).is_bottom());
        let spin = PcfcTerm::fix("x", PcfcType::Cost, PcfcTerm::cplus(PcfcTerm::One, PcfcTerm::var("x")));
        assert!(d(&spin).is_bottom());
    }

    #[test]
    fn conditional_is_monotonized() {
        let t = PcfcTerm::ifz(PcfcTerm::num(2), PcfcTerm::num(1), PcfcTerm::num(5));
        assert_eq!(d(&t).as_u64(), Some(5));
        let t = PcfcTerm::ifz(PcfcTerm::num(2), PcfcTerm::num(7), PcfcTerm::num(5));
        assert_eq!(d(&t).as_u64(), Some(7));
        let t = PcfcTerm::ifz(PcfcTerm::num(0), PcfcTerm::num(1), PcfcTerm::omega(PcfcType::Nat));
        assert_eq!(d(&t).as_u64(), Some(1));
    }

    #[test]
    fn arithmetic() {
        let t = PcfcTerm::arith(ArithOp::Mod, PcfcTerm::num(7), PcfcTerm::num(3));
        assert_eq!(d(&t).as_u64(), Some(2));
        let t = PcfcTerm::arith(ArithOp::Sub, PcfcTerm::num(5), PcfcTerm::num(7));
        assert_eq!(d(&t).as_u64(), Some(0));
        // a general subtraction is bounded by its left operand
        let t = PcfcTerm::arith(
            ArithOp::Sub,
            PcfcTerm::num(5),
            PcfcTerm::arith(ArithOp::Add, PcfcTerm::num(1), PcfcTerm::num(1)),
        );
        assert_eq!(d(&t).as_u64(), Some(5));
    }

    #[test]
    fn numc_denotes_its_count() {
        for k in 0..=10 {
            assert_eq!(d(&numc(k)).as_u64(), Some(k));
        }
    }

    #[test]
    fn joins() {
        assert_eq!(join(&SizedValue::fin(3), &SizedValue::fin(5)).as_u64(), Some(5));
        assert!(join(&SizedValue::Bottom, &SizedValue::fin(5)).is_bottom());
        let p = join(
            &SizedValue::pair(SizedValue::fin(1), SizedValue::fin(2)),
            &SizedValue::pair(SizedValue::fin(2), SizedValue::fin(1)),
        );
        assert_eq!(
            first_order_eq(&p, &SizedValue::pair(SizedValue::fin(2), SizedValue::fin(2))),
            Ok(true)
        );
    }

    #[test]
    fn size_order() {
        assert_eq!(size_leq(&SizedValue::fin(3), &SizedValue::Bottom), Ok(true));
        assert_eq!(size_leq(&SizedValue::Bottom, &SizedValue::fin(3)), Ok(false));
        assert_eq!(size_leq(&SizedValue::fin(3), &SizedValue::fin(3)), Ok(true));
        let p = SizedValue::pair(SizedValue::fin(1), SizedValue::Bottom);
        assert_eq!(size_leq(&p, &SizedValue::Bottom), Ok(true));
        assert_eq!(size_leq(&SizedValue::Bottom, &p), Ok(false));
        let id = PcfcTerm::lam("x", PcfcType::Nat, PcfcTerm::var("x"));
        assert!(size_leq(&d(&id), &SizedValue::fin(1)).is_err());
    }

    #[test]
    fn recursion_through_approximants() {
        // T(n) = ifz n 0 (1 + T(n - 1))
        let body = PcfcTerm::lam(
            "n",
            PcfcType::Nat,
            PcfcTerm::ifz(
                PcfcTerm::var("n"),
                PcfcTerm::Zero,
                PcfcTerm::cplus(
                    PcfcTerm::One,
                    PcfcTerm::app(
                        PcfcTerm::var("t"),
                        PcfcTerm::arith(ArithOp::Sub, PcfcTerm::var("n"), PcfcTerm::num(1)),
                    ),
                ),
            ),
        );
        let t = PcfcTerm::fix("t", PcfcType::arrow(PcfcType::Nat, PcfcType::Cost), body);
        let model = Model::new(small());
        let f = model.eval(&t, &Env::empty());
        assert_eq!(model.apply(&f, SizedValue::fin(7)).as_u64(), Some(7));
        // past the unfolding depth the bound degrades to infinity
        assert!(model.apply(&f, SizedValue::fin(500)).is_bottom());
    }

    #[test]
    fn memoization_tames_double_recursion() {
        // M(k) = ifz k 1 (M(k - 1) + M(k - 1)) = 2^k, with two calls per level
        let rec = || {
            PcfcTerm::app(
                PcfcTerm::var("m"),
                PcfcTerm::arith(ArithOp::Sub, PcfcTerm::var("k"), PcfcTerm::num(1)),
            )
        };
        let body = PcfcTerm::lam(
            "k",
            PcfcType::Nat,
            PcfcTerm::ifz(
                PcfcTerm::var("k"),
                PcfcTerm::One,
                PcfcTerm::cplus(rec(), rec()),
            ),
        );
        let t = PcfcTerm::fix("m", PcfcType::arrow(PcfcType::Nat, PcfcType::Cost), body);
        let model = Model::new(Budget { depth: 200, steps: 100_000 });
        let f = model.eval(&t, &Env::empty());
        let v = model.apply(&f, SizedValue::fin(60));
        assert_eq!(v.as_fin(), Some(&(BigUint::from(1u8) << 60usize)));
        assert!(!model.exhausted());
    }

    #[test]
    fn projections_of_bottom() {
        let t = PcfcTerm::proj(Side::Left, PcfcTerm::omega(PcfcType::prod(PcfcType::Nat, PcfcType::Nat)));
        assert!(d(&t).is_bottom());
    }
}
