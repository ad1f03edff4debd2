//! Minimizing failing programs.
//!
//! A shrink step replaces one node of the typing derivation by a smaller
//! derivation of the same judgement: one of the node's own subderivations
//! when its type matches, or a canonical leaf. Candidates are re-typechecked,
//! so the result is always a well-typed closed program of the original
//! type.

use recx_core::pcf::{typecheck_pcf, TypingContext};
use recx_core::{PcfTerm, PcfType, Strategy};

fn children(t: &PcfTerm) -> Vec<&PcfTerm> {
    match t {
        PcfTerm::Var(_) | PcfTerm::Num(_) | PcfTerm::Nil => vec![],
        PcfTerm::Proj(_, m) | PcfTerm::Lam(_, _, m) | PcfTerm::Fix(_, _, m) => vec![m],
        PcfTerm::Rec { body, .. } => vec![body],
        PcfTerm::Arith(_, m, n) | PcfTerm::Pair(m, n) | PcfTerm::App(m, n) | PcfTerm::Cons(m, n) => vec![m, n],
        PcfTerm::IfZ(a, b, c) => vec![a, b, c],
        PcfTerm::LCase { scrut, nil, cons, .. } => vec![scrut, nil, cons],
    }
}

fn with_children(t: &PcfTerm, mut kids: Vec<PcfTerm>) -> PcfTerm {
    let mut next = || Box::new(kids.remove(0));
    match t {
        PcfTerm::Var(_) | PcfTerm::Num(_) | PcfTerm::Nil => t.clone(),
        PcfTerm::Proj(side, _) => PcfTerm::Proj(*side, next()),
        PcfTerm::Lam(x, ty, _) => PcfTerm::Lam(x.clone(), ty.clone(), next()),
        PcfTerm::Fix(x, ty, _) => PcfTerm::Fix(x.clone(), ty.clone(), next()),
        PcfTerm::Rec { fun, arg, dom, cod, .. } => PcfTerm::Rec {
            fun: fun.clone(),
            arg: arg.clone(),
            dom: dom.clone(),
            cod: cod.clone(),
            body: next(),
        },
        PcfTerm::Arith(op, ..) => PcfTerm::Arith(*op, next(), next()),
        PcfTerm::Pair(..) => PcfTerm::Pair(next(), next()),
        PcfTerm::App(..) => PcfTerm::App(next(), next()),
        PcfTerm::Cons(..) => PcfTerm::Cons(next(), next()),
        PcfTerm::IfZ(..) => PcfTerm::IfZ(next(), next(), next()),
        PcfTerm::LCase { head, tail, .. } => PcfTerm::LCase {
            scrut: next(),
            nil: next(),
            head: head.clone(),
            tail: tail.clone(),
            cons: next(),
        },
    }
}

/// Programs obtained by replacing exactly one node of `t`.
fn candidates(t: &PcfTerm) -> Vec<PcfTerm> {
    let mut out: Vec<PcfTerm> = children(t).into_iter().cloned().collect();
    if !matches!(t, PcfTerm::Num(_) | PcfTerm::Nil) {
        out.push(PcfTerm::num(0));
        out.push(PcfTerm::Nil);
    }
    if let PcfTerm::Num(k) = t {
        if *k > 0u8.into() {
            out.push(PcfTerm::Num(k / 2u8));
        }
    }
    let kids: Vec<PcfTerm> = children(t).into_iter().cloned().collect();
    for i in 0..kids.len() {
        for c in candidates(&kids[i]) {
            let mut replaced = kids.clone();
            replaced[i] = c;
            out.push(with_children(t, replaced));
        }
    }
    out
}

/// Greedily shrinks `t` while `still_fails` holds, keeping the type.
pub fn shrink(t: &PcfTerm, s: Strategy, still_fails: impl Fn(&PcfTerm) -> bool) -> PcfTerm {
    let ctx = TypingContext::new();
    let Ok(ty) = typecheck_pcf(&ctx, t, s) else {
        return t.clone();
    };
    let keeps_type = |c: &PcfTerm, ty: &PcfType| typecheck_pcf(&ctx, c, s).as_ref() == Ok(ty);
    let mut cur = t.clone();
    // Each accepted step strictly decreases (size, numeral total), so this
    // terminates; the cap only bounds the work on huge inputs.
    for _ in 0..1_000 {
        let mut cands = candidates(&cur);
        cands.sort_by_key(|c| c.size());
        let weight = measure(&cur);
        let next = cands
            .into_iter()
            .filter(|c| measure(c) < weight)
            .find(|c| keeps_type(c, &ty) && still_fails(c));
        match next {
            Some(c) => cur = c,
            None => break,
        }
    }
    cur
}

fn measure(t: &PcfTerm) -> (usize, num_bigint::BigUint) {
    fn total(t: &PcfTerm) -> num_bigint::BigUint {
        match t {
            PcfTerm::Num(k) => k.clone(),
            _ => children(t).into_iter().map(total).sum(),
        }
    }
    (t.size(), total(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use recx_core::arith::ArithOp;
    use recx_core::pcf_machine::{eval_pcf, Fuel};

    #[test]
    fn shrinks_to_a_minimal_witness() {
        // "Fails" whenever the program costs at least one unit.
        let id = PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x"));
        let t = PcfTerm::arith(
            ArithOp::Add,
            PcfTerm::num(7),
            PcfTerm::ifz(PcfTerm::num(3), PcfTerm::num(1), PcfTerm::app(id, PcfTerm::num(9))),
        );
        let costly = |c: &PcfTerm| eval_pcf(c, Strategy::Cbv, Fuel(1000)).cost().is_some_and(|k| k >= 1);
        assert!(costly(&t));
        let small = shrink(&t, Strategy::Cbv, costly);
        assert!(costly(&small));
        assert_eq!(small.to_string(), "(app (lam (x nat) x) (num 0))");
    }

    #[test]
    fn keeps_the_type() {
        let t = PcfTerm::pair(PcfTerm::num(4), PcfTerm::num(5));
        let small = shrink(&t, Strategy::Cbv, |_| true);
        assert_eq!(small, PcfTerm::pair(PcfTerm::num(0), PcfTerm::num(0)));
    }
}
