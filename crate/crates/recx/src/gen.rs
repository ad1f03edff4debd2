//! Random well-typed programs.
//!
//! Generation follows typing derivations: every node is chosen among the
//! rules that conclude the requested type, so the output typechecks by
//! construction. Recursion is only introduced through fixed shapes whose
//! recursive calls shrink the argument tested by the conditional (`n - k`,
//! `n div 2`, the tail of a list). Those terminate both operationally and in
//! the sized model, where the conditional explores both branches.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recx_core::arith::ArithOp;
use recx_core::pcfc::{PcfcTerm, PcfcType};
use recx_core::{PcfTerm, PcfType, Side, Strategy};

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub strategy: Strategy,
    /// Probability of picking a non-`nat` type where there is a choice.
    pub type_bias: f64,
    /// Probability of a recursive function where one could go.
    pub recursion_rate: f64,
}

impl GenConfig {
    pub fn new(seed: u64, strategy: Strategy) -> Self {
        GenConfig {
            seed,
            max_depth: 5,
            strategy,
            type_bias: 0.3,
            recursion_rate: 0.25,
        }
    }
}

/// Probability that a `nat` leaf is a divergent term instead.
const DIVERGENCE_RATE: f64 = 0.02;

pub fn gen_program(cfg: &GenConfig) -> PcfTerm {
    let mut g = PcfGen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg: cfg.clone(),
        counter: 0,
    };
    let ty = g.result_type();
    g.term(&mut Vec::new(), &ty, cfg.max_depth)
}

struct Binding {
    name: String,
    ty: PcfType,
    /// Bound (directly or through a definition) to a list element, whose
    /// potential is infinite. Such variables stay out of conditionals and
    /// recursion arguments, where infinity would swallow the whole bound.
    tainted: bool,
}

type Ctx = Vec<Binding>;

struct PcfGen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
    counter: usize,
}

impl PcfGen {
    fn cbv(&self) -> bool {
        self.cfg.strategy == Strategy::Cbv
    }

    fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("{base}{}", self.counter)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }

    fn result_type(&mut self) -> PcfType {
        if !self.chance(self.cfg.type_bias) {
            return PcfType::Nat;
        }
        let mut options = vec![
            PcfType::prod(PcfType::Nat, PcfType::Nat),
            PcfType::arrow(PcfType::Nat, PcfType::Nat),
        ];
        if self.cbv() {
            options.push(PcfType::list(PcfType::Nat));
        }
        options.choose(&mut self.rng).cloned().unwrap()
    }

    /// A small type for intermediate results.
    fn aux_type(&mut self) -> PcfType {
        if !self.chance(self.cfg.type_bias) {
            return PcfType::Nat;
        }
        self.result_type()
    }

    fn small_num(&mut self) -> PcfTerm {
        let k = if self.chance(0.85) { self.rng.gen_range(0..6) } else { self.rng.gen_range(6..40) };
        PcfTerm::num(k)
    }

    fn divergent(&mut self, ty: &PcfType) -> PcfTerm {
        if self.cbv() {
            let f = self.fresh("loop");
            let x = self.fresh("x");
            let body = PcfTerm::app(PcfTerm::var(&f), PcfTerm::var(&x));
            PcfTerm::app(PcfTerm::rec(&f, &x, PcfType::Nat, ty.clone(), body), PcfTerm::num(0))
        } else {
            let x = self.fresh("w");
            PcfTerm::fix(&x, ty.clone(), PcfTerm::var(&x))
        }
    }

    fn vars_of(ctx: &Ctx, ty: &PcfType, finite: bool) -> Vec<String> {
        ctx.iter()
            .filter(|b| &b.ty == ty && !(finite && b.tainted))
            .map(|b| b.name.clone())
            .collect()
    }

    fn leaf(&mut self, ctx: &mut Ctx, ty: &PcfType, finite: bool) -> PcfTerm {
        let vars = Self::vars_of(ctx, ty, finite);
        if !vars.is_empty() && self.chance(0.6) {
            return PcfTerm::var(vars.choose(&mut self.rng).unwrap());
        }
        match ty {
            PcfType::Nat => {
                if self.chance(DIVERGENCE_RATE) {
                    self.divergent(ty)
                } else {
                    self.small_num()
                }
            }
            PcfType::Prod(a, b) => {
                let m = self.leaf(ctx, a, finite);
                let n = self.leaf(ctx, b, finite);
                PcfTerm::pair(m, n)
            }
            PcfType::Arrow(a, b) => {
                let x = self.fresh("x");
                ctx.push(Binding { name: x.clone(), ty: (**a).clone(), tainted: false });
                let body = self.leaf(ctx, b, finite);
                ctx.pop();
                PcfTerm::lam(&x, (**a).clone(), body)
            }
            PcfType::List(a) => {
                let len = self.rng.gen_range(0..5);
                let mut out = PcfTerm::Nil;
                for _ in 0..len {
                    let h = self.leaf(ctx, a, finite);
                    out = PcfTerm::cons(h, out);
                }
                out
            }
        }
    }

    fn term(&mut self, ctx: &mut Ctx, ty: &PcfType, depth: usize) -> PcfTerm {
        self.term_in(ctx, ty, depth, false)
    }

    /// `finite` asks for a term whose potential is finite whenever the
    /// potentials of its variables are.
    fn term_in(&mut self, ctx: &mut Ctx, ty: &PcfType, depth: usize, finite: bool) -> PcfTerm {
        if depth == 0 {
            return self.leaf(ctx, ty, finite);
        }
        let d = depth - 1;
        let roll: f64 = self.rng.gen();
        if roll < self.cfg.recursion_rate * 0.6 && !finite {
            if let Some(t) = self.recursive_use(ctx, ty, d) {
                return t;
            }
        }
        match ty {
            PcfType::Nat => match self.rng.gen_range(0..12) {
                0 | 1 => self.leaf(ctx, ty, finite),
                2..=4 => {
                    let op = *ArithOp::ALL.choose(&mut self.rng).unwrap();
                    let m = self.term_in(ctx, ty, d, finite);
                    let n = self.term_in(ctx, ty, d, finite);
                    PcfTerm::arith(op, m, n)
                }
                5 | 6 => self.conditional(ctx, ty, d, finite),
                7 | 8 => self.let_in(ctx, ty, d, finite),
                9 => {
                    let other = self.aux_type();
                    let side = if self.chance(0.5) { Side::Left } else { Side::Right };
                    let pty = side.pick(
                        PcfType::prod(ty.clone(), other.clone()),
                        PcfType::prod(other, ty.clone()),
                    );
                    PcfTerm::proj(side, self.term_in(ctx, &pty, d, finite))
                }
                10 => self.apply_var(ctx, ty, d, finite),
                _ => self.list_case(ctx, ty, d, finite),
            },
            PcfType::Prod(a, b) => match self.rng.gen_range(0..6) {
                0..=3 => {
                    let m = self.term_in(ctx, a, d, finite);
                    let n = self.term_in(ctx, b, d, finite);
                    PcfTerm::pair(m, n)
                }
                4 => self.conditional(ctx, ty, d, finite),
                _ => self.let_in(ctx, ty, d, finite),
            },
            PcfType::Arrow(a, b) => match self.rng.gen_range(0..6) {
                0..=3 => {
                    let x = self.fresh("x");
                    ctx.push(Binding { name: x.clone(), ty: (**a).clone(), tainted: false });
                    let body = self.term_in(ctx, b, d, finite);
                    ctx.pop();
                    PcfTerm::lam(&x, (**a).clone(), body)
                }
                4 => self.conditional(ctx, ty, d, finite),
                _ => match self.recursive_function(ctx, a, b, d) {
                    Some(f) if !finite => f,
                    _ => self.let_in(ctx, ty, d, finite),
                },
            },
            PcfType::List(a) => match self.rng.gen_range(0..7) {
                0 | 1 => self.leaf(ctx, ty, finite),
                2 | 3 => {
                    let h = self.term_in(ctx, a, d, finite);
                    let t = self.term_in(ctx, ty, d, finite);
                    PcfTerm::cons(h, t)
                }
                4 => self.conditional(ctx, ty, d, finite),
                5 => self.let_in(ctx, ty, d, finite),
                _ => self.list_case(ctx, ty, d, finite),
            },
        }
    }

    fn conditional(&mut self, ctx: &mut Ctx, ty: &PcfType, d: usize, finite: bool) -> PcfTerm {
        let n = self.term_in(ctx, &PcfType::Nat, d.min(2), true);
        let p = self.term_in(ctx, ty, d, finite);
        let q = self.term_in(ctx, ty, d, finite);
        PcfTerm::ifz(n, p, q)
    }

    fn let_in(&mut self, ctx: &mut Ctx, ty: &PcfType, d: usize, finite: bool) -> PcfTerm {
        let bty = self.aux_type();
        let m = self.term_in(ctx, &bty, d, finite);
        let tainted = mentions_tainted(&m, ctx);
        let x = self.fresh("v");
        ctx.push(Binding { name: x.clone(), ty: bty.clone(), tainted });
        let n = self.term_in(ctx, ty, d, finite);
        ctx.pop();
        PcfTerm::let_in(&x, bty, m, n)
    }

    /// Applies a function variable from the context, or falls back to a let.
    fn apply_var(&mut self, ctx: &mut Ctx, ty: &PcfType, d: usize, finite: bool) -> PcfTerm {
        let funs: Vec<(String, PcfType)> = ctx
            .iter()
            .filter_map(|b| match &b.ty {
                PcfType::Arrow(a, r) if **r == *ty => Some((b.name.clone(), (**a).clone())),
                _ => None,
            })
            .collect();
        match funs.choose(&mut self.rng).cloned() {
            Some((f, a)) => {
                let arg = self.term_in(ctx, &a, d, true);
                PcfTerm::app(PcfTerm::var(&f), arg)
            }
            None => self.let_in(ctx, ty, d, finite),
        }
    }

    fn list_case(&mut self, ctx: &mut Ctx, ty: &PcfType, d: usize, finite: bool) -> PcfTerm {
        if !self.cbv() {
            return self.conditional(ctx, ty, d, finite);
        }
        let lty = PcfType::list(PcfType::Nat);
        let scrut = self.term_in(ctx, &lty, d, finite);
        let nil = self.term_in(ctx, ty, d, finite);
        let (h, t) = (self.fresh("h"), self.fresh("t"));
        ctx.push(Binding { name: h.clone(), ty: PcfType::Nat, tainted: true });
        ctx.push(Binding { name: t.clone(), ty: lty, tainted: false });
        let cons = self.term_in(ctx, ty, d, finite);
        ctx.pop();
        ctx.pop();
        PcfTerm::lcase(scrut, nil, &h, &t, cons)
    }

    /// A recursive function applied to a small argument.
    fn recursive_use(&mut self, ctx: &mut Ctx, ty: &PcfType, d: usize) -> Option<PcfTerm> {
        let dom = if self.cbv() && self.chance(0.3) { PcfType::list(PcfType::Nat) } else { PcfType::Nat };
        let f = self.recursive_function(ctx, &dom, ty, d)?;
        let arg = match &dom {
            PcfType::Nat => {
                let vars = Self::vars_of(ctx, &dom, true);
                if !vars.is_empty() && self.chance(0.3) {
                    PcfTerm::var(vars.choose(&mut self.rng).unwrap())
                } else {
                    PcfTerm::num(self.rng.gen_range(0..9))
                }
            }
            _ => PcfTerm::nat_list((0..self.rng.gen_range(0..7)).map(|i| (i * 7 + 3) % 10)),
        };
        Some(PcfTerm::app(f, arg))
    }

    /// `rec f x. ...` (or its call-by-name counterpart) of type `dom -> cod`,
    /// recursing on a smaller argument. Only `nat` and lists are recursed on.
    fn recursive_function(&mut self, ctx: &mut Ctx, dom: &PcfType, cod: &PcfType, d: usize) -> Option<PcfTerm> {
        let by_list = matches!(dom, PcfType::List(_));
        if !matches!(dom, PcfType::Nat) && !(by_list && self.cbv()) {
            return None;
        }
        let (f, x) = (self.fresh("f"), self.fresh("n"));
        let fty = PcfType::arrow(dom.clone(), cod.clone());
        // The function itself stays out of the context: it is only called
        // through the shapes below.
        ctx.push(Binding { name: x.clone(), ty: dom.clone(), tainted: false });
        let base = self.term(ctx, cod, d.min(2));
        let (h, t) = (self.fresh("h"), self.fresh("t"));
        let mut calls = Vec::new();
        let ncalls = if self.chance(0.25) { 2 } else { 1 };
        for _ in 0..ncalls {
            let arg = if by_list {
                PcfTerm::var(&t)
            } else if self.chance(0.3) {
                PcfTerm::arith(ArithOp::Div, PcfTerm::var(&x), PcfTerm::num(2))
            } else {
                PcfTerm::arith(ArithOp::Sub, PcfTerm::var(&x), PcfTerm::num(self.rng.gen_range(1..3)))
            };
            calls.push((self.fresh("r"), PcfTerm::app(PcfTerm::var(&f), arg)));
        }
        if by_list {
            ctx.push(Binding { name: h.clone(), ty: PcfType::Nat, tainted: true });
            ctx.push(Binding { name: t.clone(), ty: dom.clone(), tainted: false });
        }
        for (r, _) in &calls {
            ctx.push(Binding { name: r.clone(), ty: cod.clone(), tainted: false });
        }
        let mut step = self.term(ctx, cod, d.min(3));
        for _ in &calls {
            ctx.pop();
        }
        for (r, call) in calls.into_iter().rev() {
            step = PcfTerm::let_in(&r, cod.clone(), call, step);
        }
        if by_list {
            ctx.pop();
            ctx.pop();
        }
        ctx.pop();
        let body = if by_list {
            PcfTerm::lcase(PcfTerm::var(&x), base, &h, &t, step)
        } else {
            PcfTerm::ifz(PcfTerm::var(&x), base, step)
        };
        Some(if self.cbv() {
            PcfTerm::rec(&f, &x, dom.clone(), cod.clone(), body)
        } else {
            PcfTerm::fix(&f, fty, PcfTerm::lam(&x, dom.clone(), body))
        })
    }
}

fn mentions_tainted(t: &PcfTerm, ctx: &Ctx) -> bool {
    let free = recx_core::pcf::free_vars(t);
    ctx.iter().any(|b| b.tainted && free.contains(&b.name))
}

// ---------------------------------------------------------------------------
// PCFc

/// Random PCFc terms, closed or over a context of ground variables.
pub struct PcfcGen {
    rng: ChaCha8Rng,
    counter: usize,
    /// Probability of `fix x. x` at a leaf.
    pub omega_rate: f64,
}

pub type PcfcCtx = Vec<(String, PcfcType)>;

impl PcfcGen {
    pub fn new(seed: u64) -> Self {
        PcfcGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
            omega_rate: 0.03,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("{base}{}", self.counter)
    }

    pub fn ground_type(&mut self) -> PcfcType {
        if self.rng.gen_bool(0.5) {
            PcfcType::Nat
        } else {
            PcfcType::Cost
        }
    }

    fn aux_type(&mut self) -> PcfcType {
        match self.rng.gen_range(0..6) {
            0 | 1 => PcfcType::Nat,
            2 | 3 => PcfcType::Cost,
            4 => PcfcType::prod(PcfcType::Cost, PcfcType::Nat),
            _ => PcfcType::arrow(PcfcType::Nat, PcfcType::prod(PcfcType::Cost, PcfcType::Nat)),
        }
    }

    pub fn leaf(&mut self, ctx: &mut PcfcCtx, ty: &PcfcType) -> PcfcTerm {
        let vars: Vec<String> = ctx.iter().filter(|(_, t)| t == ty).map(|(x, _)| x.clone()).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.6) {
            return PcfcTerm::var(vars.choose(&mut self.rng).unwrap());
        }
        if ty.is_ground() && self.rng.gen_bool(self.omega_rate) {
            return PcfcTerm::omega(ty.clone());
        }
        match ty {
            PcfcType::Nat => PcfcTerm::num(self.rng.gen_range(0..7)),
            PcfcType::Cost => match self.rng.gen_range(0..3) {
                0 => PcfcTerm::Zero,
                1 => PcfcTerm::One,
                _ => recx_core::pcfc::numc(self.rng.gen_range(2..5)),
            },
            PcfcType::Prod(a, b) => {
                let m = self.leaf(ctx, a);
                let n = self.leaf(ctx, b);
                PcfcTerm::pair(m, n)
            }
            PcfcType::Arrow(a, b) => {
                let x = self.fresh("x");
                ctx.push((x.clone(), (**a).clone()));
                let body = self.leaf(ctx, b);
                ctx.pop();
                PcfcTerm::lam(&x, (**a).clone(), body)
            }
        }
    }

    pub fn term(&mut self, ctx: &mut PcfcCtx, ty: &PcfcType, depth: usize) -> PcfcTerm {
        if depth == 0 {
            return self.leaf(ctx, ty);
        }
        let d = depth - 1;
        match ty {
            PcfcType::Nat | PcfcType::Cost => match self.rng.gen_range(0..11) {
                0 | 1 => self.leaf(ctx, ty),
                2 | 3 => {
                    let m = self.term(ctx, ty, d);
                    let n = self.term(ctx, ty, d);
                    if *ty == PcfcType::Cost {
                        PcfcTerm::cplus(m, n)
                    } else {
                        PcfcTerm::arith(*ArithOp::ALL.choose(&mut self.rng).unwrap(), m, n)
                    }
                }
                4 | 5 => self.conditional(ctx, ty, d),
                6 | 7 => self.let_in(ctx, ty, d),
                8 => {
                    let other = self.aux_type();
                    let side = if self.rng.gen_bool(0.5) { Side::Left } else { Side::Right };
                    let pty = side.pick(PcfcType::prod(ty.clone(), other.clone()), PcfcType::prod(other, ty.clone()));
                    PcfcTerm::proj(side, self.term(ctx, &pty, d))
                }
                _ => {
                    // A call of a recurrence, projected to the requested half.
                    let rty = PcfcType::prod(PcfcType::Cost, PcfcType::Nat);
                    let f = self.recurrence(ctx, &rty, d);
                    let arg = PcfcTerm::num(self.rng.gen_range(0..7));
                    let side = if *ty == PcfcType::Cost { Side::Left } else { Side::Right };
                    PcfcTerm::proj(side, PcfcTerm::app(f, arg))
                }
            },
            PcfcType::Prod(a, b) => match self.rng.gen_range(0..5) {
                0..=2 => {
                    let m = self.term(ctx, a, d);
                    let n = self.term(ctx, b, d);
                    PcfcTerm::pair(m, n)
                }
                3 => self.conditional(ctx, ty, d),
                _ => self.let_in(ctx, ty, d),
            },
            PcfcType::Arrow(a, b) => match self.rng.gen_range(0..4) {
                0 | 1 => {
                    let x = self.fresh("x");
                    ctx.push((x.clone(), (**a).clone()));
                    let body = self.term(ctx, b, d);
                    ctx.pop();
                    PcfcTerm::lam(&x, (**a).clone(), body)
                }
                2 if **a == PcfcType::Nat => self.recurrence(ctx, b, d),
                _ => self.conditional(ctx, ty, d),
            },
        }
    }

    fn conditional(&mut self, ctx: &mut PcfcCtx, ty: &PcfcType, d: usize) -> PcfcTerm {
        let n = self.term(ctx, &PcfcType::Nat, d.min(2));
        let p = self.term(ctx, ty, d);
        let q = self.term(ctx, ty, d);
        PcfcTerm::ifz(n, p, q)
    }

    fn let_in(&mut self, ctx: &mut PcfcCtx, ty: &PcfcType, d: usize) -> PcfcTerm {
        let bty = self.aux_type();
        let m = self.term(ctx, &bty, d);
        let x = self.fresh("v");
        ctx.push((x.clone(), bty.clone()));
        let n = self.term(ctx, ty, d);
        ctx.pop();
        PcfcTerm::app(PcfcTerm::lam(&x, bty, n), m)
    }

    /// `fix f. λn. ifz n base step` of type `nat -> cod`, in the shape of an
    /// extracted recurrence.
    pub fn recurrence(&mut self, ctx: &mut PcfcCtx, cod: &PcfcType, d: usize) -> PcfcTerm {
        let body = self.recurrence_body(ctx, cod, d, true);
        body.0
    }

    /// Returns the fixed point and, separately, its variable, type and body.
    /// With `well_founded` false the recursive calls may fail to shrink the
    /// argument, which is fine for checking approximants.
    pub fn recurrence_body(
        &mut self,
        ctx: &mut PcfcCtx,
        cod: &PcfcType,
        d: usize,
        well_founded: bool,
    ) -> (PcfcTerm, String, PcfcType, PcfcTerm) {
        let (f, n) = (self.fresh("f"), self.fresh("n"));
        let fty = PcfcType::arrow(PcfcType::Nat, cod.clone());
        ctx.push((n.clone(), PcfcType::Nat));
        let base = self.term(ctx, cod, d.min(2));
        let mut calls = Vec::new();
        for _ in 0..if self.rng.gen_bool(0.3) { 2 } else { 1 } {
            let arg = match self.rng.gen_range(0..if well_founded { 3 } else { 4 }) {
                0 => PcfcTerm::arith(ArithOp::Div, PcfcTerm::var(&n), PcfcTerm::num(2)),
                1 | 2 => PcfcTerm::arith(ArithOp::Sub, PcfcTerm::var(&n), PcfcTerm::num(1)),
                _ => PcfcTerm::var(&n),
            };
            calls.push((self.fresh("r"), PcfcTerm::app(PcfcTerm::var(&f), arg)));
        }
        for (r, _) in &calls {
            ctx.push((r.clone(), cod.clone()));
        }
        let mut step = self.term(ctx, cod, d.min(3));
        // Make the step pay for something, like an extracted recurrence does.
        if let PcfcType::Prod(a, _) = cod {
            if **a == PcfcType::Cost {
                step = PcfcTerm::pair(
                    PcfcTerm::cplus(PcfcTerm::One, PcfcTerm::proj(Side::Left, step.clone())),
                    PcfcTerm::proj(Side::Right, step),
                );
            }
        }
        for _ in &calls {
            ctx.pop();
        }
        ctx.pop();
        for (r, call) in calls.into_iter().rev() {
            step = PcfcTerm::app(PcfcTerm::lam(&r, cod.clone(), step), call);
        }
        let inner = PcfcTerm::lam(&n, PcfcType::Nat, PcfcTerm::ifz(PcfcTerm::var(&n), base, step));
        (PcfcTerm::fix(&f, fty.clone(), inner.clone()), f, fty, inner)
    }
}

/// A closed PCFc term of ground type.
pub fn gen_pcfc(seed: u64, depth: usize) -> (PcfcTerm, PcfcType) {
    let mut g = PcfcGen::new(seed);
    let ty = g.ground_type();
    let t = g.term(&mut Vec::new(), &ty, depth);
    (t, ty)
}
