//! Rewriting of recurrences into a more readable form.
//!
//! Every rule here is an equality in the sized-domain model, so simplified
//! recurrences denote exactly what the originals do. Rules that only hold as
//! inequalities (the fixed-point induction principles, `0 <= 1`) are not
//! rewrites. Note that `ifz (num k) P Q` with `k > 0` is *not* reduced to
//! `Q`: the model joins both branches there.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One as _, Zero as _};

use crate::arith::{self, ArithOp};
use crate::names::prime_away;
use crate::pcfc::{alpha_eq, free_vars, is_atomic, numc, occurs_free, subst, PcfcTerm, PcfcType};
use crate::Side;

/// Which groups of rules are enabled; the beta group is always on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RuleSet {
    /// Eta for functions and pairs.
    pub eta: bool,
    /// `(M + 1) - 1 = M` and the absorbing behaviour of `fix x. x`.
    pub lists: bool,
}

impl RuleSet {
    pub const CORE: RuleSet = RuleSet { eta: false, lists: false };
    pub const ALL: RuleSet = RuleSet { eta: true, lists: true };

    pub fn enables(self, rule: Rule) -> bool {
        match rule.group() {
            Group::Core => true,
            Group::Eta => self.eta,
            Group::Lists => self.lists,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Core,
    Eta,
    Lists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `(λx. M) N → M[N/x]`, when that does not copy a large `N`.
    BetaApp,
    /// `(λx. M) <a, b> → (λx1. λx2. M[<x1, x2>/x]) a b`
    BetaPairArg,
    /// `π_i <M1, M2> → M_i`
    BetaProj,
    /// `ifz 0 P Q → P`
    IfZero,
    /// `ifz (num k) N N → N`
    IfSame,
    /// Right-associated sums with units first and no zeros.
    CostNormal,
    /// Arithmetic on two numerals, as the model computes it.
    FoldArith,
    /// `π_i (ifz N P Q) → ifz N (π_i P) (π_i Q)`
    ProjIf,
    /// `λx. M x → M`
    EtaLam,
    /// `<π1 M, π2 M> → M`
    EtaPair,
    /// `(M + 1) - 1 → M`
    SuccPred,
    /// `fix x. x` absorbs eliminations and strict operations.
    Efix,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::BetaApp,
        Rule::BetaPairArg,
        Rule::BetaProj,
        Rule::IfZero,
        Rule::IfSame,
        Rule::CostNormal,
        Rule::FoldArith,
        Rule::ProjIf,
        Rule::EtaLam,
        Rule::EtaPair,
        Rule::SuccPred,
        Rule::Efix,
    ];

    pub fn group(self) -> Group {
        match self {
            Rule::EtaLam | Rule::EtaPair => Group::Eta,
            Rule::SuccPred | Rule::Efix => Group::Lists,
            _ => Group::Core,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::BetaApp => "beta-app",
            Rule::BetaPairArg => "beta-pair-arg",
            Rule::BetaProj => "beta-proj",
            Rule::IfZero => "ifz-zero",
            Rule::IfSame => "ifz-same",
            Rule::CostNormal => "cost-normal",
            Rule::FoldArith => "fold-arith",
            Rule::ProjIf => "proj-ifz",
            Rule::EtaLam => "eta-lam",
            Rule::EtaPair => "eta-pair",
            Rule::SuccPred => "succ-pred",
            Rule::Efix => "efix",
        }
    }

    /// One rewrite at the root of `t`, if this rule applies there.
    pub fn apply(self, t: &PcfcTerm) -> Option<PcfcTerm> {
        match self {
            Rule::BetaApp => beta_app(t),
            Rule::BetaPairArg => beta_pair_arg(t),
            Rule::BetaProj => match t {
                PcfcTerm::Proj(side, m) => match &**m {
                    PcfcTerm::Pair(a, b) => Some((**side.pick(a, b)).clone()),
                    _ => None,
                },
                _ => None,
            },
            Rule::IfZero => match t {
                PcfcTerm::IfZ(n, p, _) if matches!(&**n, PcfcTerm::Num(k) if k.is_zero()) => Some((**p).clone()),
                _ => None,
            },
            Rule::IfSame => match t {
                PcfcTerm::IfZ(n, p, q) if matches!(**n, PcfcTerm::Num(_)) && alpha_eq(p, q) => Some((**p).clone()),
                _ => None,
            },
            Rule::CostNormal => cost_normal(t),
            Rule::FoldArith => match t {
                PcfcTerm::Arith(op, m, n) => match (&**m, &**n) {
                    (PcfcTerm::Num(a), PcfcTerm::Num(b)) => fold(*op, a, b).map(PcfcTerm::Num),
                    _ => None,
                },
                _ => None,
            },
            Rule::ProjIf => match t {
                PcfcTerm::Proj(side, m) => match &**m {
                    PcfcTerm::IfZ(n, p, q) => Some(PcfcTerm::ifz(
                        (**n).clone(),
                        PcfcTerm::proj(*side, (**p).clone()),
                        PcfcTerm::proj(*side, (**q).clone()),
                    )),
                    _ => None,
                },
                _ => None,
            },
            Rule::EtaLam => match t {
                PcfcTerm::Lam(x, _, body) => match &**body {
                    PcfcTerm::App(f, arg) if matches!(&**arg, PcfcTerm::Var(y) if y == x) && !occurs_free(f, x) => {
                        Some((**f).clone())
                    }
                    _ => None,
                },
                _ => None,
            },
            Rule::EtaPair => match t {
                PcfcTerm::Pair(a, b) => match (&**a, &**b) {
                    (PcfcTerm::Proj(Side::Left, m1), PcfcTerm::Proj(Side::Right, m2)) if alpha_eq(m1, m2) => {
                        Some((**m1).clone())
                    }
                    _ => None,
                },
                _ => None,
            },
            Rule::SuccPred => match t {
                PcfcTerm::Arith(ArithOp::Sub, m, one) if is_num(one, 1) => match &**m {
                    PcfcTerm::Arith(ArithOp::Add, inner, one) if is_num(one, 1) => Some((**inner).clone()),
                    _ => None,
                },
                _ => None,
            },
            Rule::Efix => efix(t),
        }
    }
}

fn is_num(t: &PcfcTerm, k: u64) -> bool {
    matches!(t, PcfcTerm::Num(n) if *n == BigUint::from(k))
}

/// Closed arithmetic as interpreted by the model.
fn fold(op: ArithOp, a: &BigUint, b: &BigUint) -> Option<BigUint> {
    match op {
        ArithOp::Mod => Some(arith::monus(b, &BigUint::one())),
        _ => arith::apply(op, a, b),
    }
}

/// Arguments at most this big are copied freely by beta.
const INLINE_SIZE: usize = 12;
/// Beta never produces a term bigger than this.
const MAX_OUTPUT: usize = 200_000;

fn count_free(t: &PcfcTerm, x: &str) -> usize {
    match t {
        PcfcTerm::Var(y) => usize::from(y == x),
        PcfcTerm::Num(_) | PcfcTerm::Zero | PcfcTerm::One => 0,
        PcfcTerm::Lam(y, _, m) | PcfcTerm::Fix(y, _, m) => {
            if y == x {
                0
            } else {
                count_free(m, x)
            }
        }
        PcfcTerm::Proj(_, m) => count_free(m, x),
        PcfcTerm::Arith(_, m, n) | PcfcTerm::Pair(m, n) | PcfcTerm::App(m, n) | PcfcTerm::CPlus(m, n) => {
            count_free(m, x) + count_free(n, x)
        }
        PcfcTerm::IfZ(a, b, c) => count_free(a, x) + count_free(b, x) + count_free(c, x),
    }
}

fn beta_app(t: &PcfcTerm) -> Option<PcfcTerm> {
    let PcfcTerm::App(f, arg) = t else { return None };
    let PcfcTerm::Lam(x, _, body) = &**f else { return None };
    let uses = count_free(body, x);
    let arg_size = arg.size();
    if uses > 1 && !is_atomic(arg) && arg_size > INLINE_SIZE {
        return None;
    }
    if body.size() + uses * arg_size > MAX_OUTPUT {
        return None;
    }
    Some(subst(body, x, arg))
}

fn beta_pair_arg(t: &PcfcTerm) -> Option<PcfcTerm> {
    let PcfcTerm::App(f, arg) = t else { return None };
    let PcfcTerm::Lam(x, PcfcType::Prod(ta, tb), body) = &**f else { return None };
    let PcfcTerm::Pair(a, b) = &**arg else { return None };
    let mut avoid: BTreeSet<_> = free_vars(body);
    avoid.insert(x.clone());
    let x1 = prime_away(x, |n| avoid.contains(n));
    avoid.insert(x1.clone());
    let x2 = prime_away(&x1, |n| avoid.contains(n));
    let body = subst(body, x, &PcfcTerm::pair(PcfcTerm::Var(x1.clone()), PcfcTerm::Var(x2.clone())));
    let inner = PcfcTerm::Lam(x1, (**ta).clone(), Box::new(PcfcTerm::Lam(x2, (**tb).clone(), Box::new(body))));
    Some(PcfcTerm::app(PcfcTerm::app(inner, (**a).clone()), (**b).clone()))
}

fn flatten_cost<'a>(t: &'a PcfcTerm, out: &mut Vec<&'a PcfcTerm>) {
    match t {
        PcfcTerm::CPlus(m, n) => {
            flatten_cost(m, out);
            flatten_cost(n, out);
        }
        _ => out.push(t),
    }
}

fn cost_normal(t: &PcfcTerm) -> Option<PcfcTerm> {
    if !matches!(t, PcfcTerm::CPlus(..)) {
        return None;
    }
    let mut summands = Vec::new();
    flatten_cost(t, &mut summands);
    let ones = summands.iter().filter(|s| matches!(s, PcfcTerm::One)).count() as u64;
    let others: Vec<&PcfcTerm> = summands
        .into_iter()
        .filter(|s| !matches!(s, PcfcTerm::One | PcfcTerm::Zero))
        .collect();
    let out = match others.split_last() {
        None => numc(ones),
        Some((last, init)) => {
            let tail = init
                .iter()
                .rev()
                .fold((*last).clone(), |acc, s| PcfcTerm::cplus((*s).clone(), acc));
            (0..ones).fold(tail, |acc, _| PcfcTerm::cplus(PcfcTerm::One, acc))
        }
    };
    (out != *t).then_some(out)
}

fn efix(t: &PcfcTerm) -> Option<PcfcTerm> {
    let omega_ty = |m: &PcfcTerm| match m {
        PcfcTerm::Fix(_, ty, _) if m.is_omega() => Some(ty.clone()),
        _ => None,
    };
    match t {
        PcfcTerm::Proj(side, m) => match omega_ty(m)? {
            PcfcType::Prod(a, b) => Some(PcfcTerm::omega(*side.pick(a, b))),
            _ => None,
        },
        PcfcTerm::App(m, _) => match omega_ty(m)? {
            PcfcType::Arrow(_, b) => Some(PcfcTerm::omega(*b)),
            _ => None,
        },
        PcfcTerm::Arith(_, m, n) if omega_ty(m).is_some() || omega_ty(n).is_some() => {
            Some(PcfcTerm::omega(PcfcType::Nat))
        }
        PcfcTerm::CPlus(..) => {
            let mut summands = Vec::new();
            flatten_cost(t, &mut summands);
            summands
                .iter()
                .any(|s| omega_ty(s).is_some())
                .then(|| PcfcTerm::omega(PcfcType::Cost))
        }
        _ => None,
    }
}

/// Rewrites bottom-up until nothing changes or `max_passes` passes are done.
pub fn simplify(t: &PcfcTerm, rules: RuleSet, max_passes: usize) -> PcfcTerm {
    let enabled: Vec<Rule> = Rule::ALL.iter().copied().filter(|r| rules.enables(*r)).collect();
    let mut cur = t.clone();
    for _ in 0..max_passes {
        let mut changed = false;
        let next = pass(&cur, &enabled, &mut changed);
        cur = next;
        if !changed {
            break;
        }
    }
    cur
}

pub const DEFAULT_PASSES: usize = 64;

fn pass(t: &PcfcTerm, rules: &[Rule], changed: &mut bool) -> PcfcTerm {
    let mut go = |m: &PcfcTerm| Box::new(pass(m, rules, changed));
    let mut out = match t {
        PcfcTerm::Var(_) | PcfcTerm::Num(_) | PcfcTerm::Zero | PcfcTerm::One => t.clone(),
        PcfcTerm::Arith(op, m, n) => PcfcTerm::Arith(*op, go(m), go(n)),
        PcfcTerm::IfZ(a, b, c) => PcfcTerm::IfZ(go(a), go(b), go(c)),
        PcfcTerm::Pair(m, n) => PcfcTerm::Pair(go(m), go(n)),
        PcfcTerm::Proj(side, m) => PcfcTerm::Proj(*side, go(m)),
        PcfcTerm::Lam(x, ty, m) => PcfcTerm::Lam(x.clone(), ty.clone(), go(m)),
        PcfcTerm::App(m, n) => PcfcTerm::App(go(m), go(n)),
        PcfcTerm::Fix(x, ty, m) => PcfcTerm::Fix(x.clone(), ty.clone(), go(m)),
        PcfcTerm::CPlus(m, n) => PcfcTerm::CPlus(go(m), go(n)),
    };
    // Rules at the root, until none applies. Results of a rule are simplified
    // again in the next pass, which keeps each pass linear.
    let mut budget = 8;
    while budget > 0 {
        budget -= 1;
        match rules.iter().find_map(|r| r.apply(&out)) {
            Some(next) => {
                *changed = true;
                out = next;
            }
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sized::{denote_closed, first_order_eq, Budget};

    fn simp(t: &PcfcTerm) -> PcfcTerm {
        simplify(t, RuleSet::CORE, DEFAULT_PASSES)
    }

    #[test]
    fn zero_is_a_unit() {
        let t = PcfcTerm::cplus(PcfcTerm::Zero, PcfcTerm::var("c"));
        assert_eq!(simp(&t), PcfcTerm::var("c"));
    }

    #[test]
    fn projection_of_a_pair() {
        let t = PcfcTerm::proj(Side::Left, PcfcTerm::pair(PcfcTerm::var("a"), PcfcTerm::var("b")));
        assert_eq!(simp(&t), PcfcTerm::var("a"));
    }

    #[test]
    fn conditional_with_equal_branches() {
        let n = PcfcTerm::cplus(PcfcTerm::One, PcfcTerm::var("c"));
        assert_eq!(simp(&PcfcTerm::ifz(PcfcTerm::num(4), n.clone(), n.clone())), n);
    }

    #[test]
    fn nonzero_conditionals_are_kept() {
        let t = PcfcTerm::ifz(PcfcTerm::num(4), PcfcTerm::num(1), PcfcTerm::num(2));
        assert_eq!(simp(&t), t);
    }

    #[test]
    fn cost_sums_are_normalized() {
        let t = PcfcTerm::cplus(
            PcfcTerm::cplus(PcfcTerm::var("a"), PcfcTerm::One),
            PcfcTerm::cplus(PcfcTerm::Zero, PcfcTerm::cplus(PcfcTerm::One, PcfcTerm::var("b"))),
        );
        let expected = PcfcTerm::cplus(
            PcfcTerm::One,
            PcfcTerm::cplus(PcfcTerm::One, PcfcTerm::cplus(PcfcTerm::var("a"), PcfcTerm::var("b"))),
        );
        assert_eq!(simp(&t), expected);
        assert_eq!(simp(&PcfcTerm::cplus(PcfcTerm::One, PcfcTerm::One)), numc(2));
    }

    #[test]
    fn mod_folds_like_the_model() {
        let t = PcfcTerm::arith(ArithOp::Mod, PcfcTerm::num(7), PcfcTerm::num(3));
        assert_eq!(simp(&t), PcfcTerm::num(2));
    }

    #[test]
    fn charge_of_return_collapses() {
        let e = PcfcTerm::pair(PcfcTerm::Zero, PcfcTerm::num(5));
        let charged = crate::pcfc::alg_apply(
            &crate::cbpv::CompType::free(crate::cbpv::ValType::Nat),
            &|_| PcfcType::Nat,
            &PcfcTerm::One,
            &e,
        );
        assert_eq!(simp(&charged), PcfcTerm::pair(numc(1), PcfcTerm::num(5)));
    }

    #[test]
    fn omega_is_left_alone_but_absorbs_under_lists() {
        let w = PcfcTerm::omega(PcfcType::Nat);
        let t = PcfcTerm::arith(ArithOp::Sub, w.clone(), PcfcTerm::num(1));
        assert_eq!(simp(&t), t);
        let lists = RuleSet { eta: false, lists: true };
        assert_eq!(simplify(&t, lists, 8), w);
    }

    #[test]
    fn succ_pred() {
        let t = PcfcTerm::arith(
            ArithOp::Sub,
            PcfcTerm::arith(ArithOp::Add, PcfcTerm::var("n"), PcfcTerm::num(1)),
            PcfcTerm::num(1),
        );
        assert_eq!(simplify(&t, RuleSet::ALL, 8), PcfcTerm::var("n"));
    }

    #[test]
    fn eta() {
        let f = PcfcTerm::lam("y", PcfcType::Nat, PcfcTerm::app(PcfcTerm::var("g"), PcfcTerm::var("y")));
        assert_eq!(simplify(&f, RuleSet::ALL, 8), PcfcTerm::var("g"));
        let p = PcfcTerm::pair(
            PcfcTerm::proj(Side::Left, PcfcTerm::var("p")),
            PcfcTerm::proj(Side::Right, PcfcTerm::var("p")),
        );
        assert_eq!(simplify(&p, RuleSet::ALL, 8), PcfcTerm::var("p"));
        assert_eq!(simp(&p), p);
    }

    #[test]
    fn closed_terms_keep_their_denotation() {
        let t = PcfcTerm::app(
            PcfcTerm::lam(
                "p",
                PcfcType::prod(PcfcType::Cost, PcfcType::Nat),
                PcfcTerm::ifz(
                    PcfcTerm::proj(Side::Right, PcfcTerm::var("p")),
                    PcfcTerm::cplus(PcfcTerm::One, PcfcTerm::proj(Side::Left, PcfcTerm::var("p"))),
                    PcfcTerm::proj(Side::Left, PcfcTerm::var("p")),
                ),
            ),
            PcfcTerm::pair(numc(3), PcfcTerm::arith(ArithOp::Mod, PcfcTerm::num(9), PcfcTerm::num(4))),
        );
        let s = simplify(&t, RuleSet::ALL, DEFAULT_PASSES);
        let budget = Budget { depth: 50, steps: 100_000 };
        assert_eq!(first_order_eq(&denote_closed(&t, budget), &denote_closed(&s, budget)), Ok(true));
        assert!(s.size() < t.size());
    }
}
