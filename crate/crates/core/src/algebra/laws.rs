//! Executable law checkers for the algebra: the two defining laws of the
//! effectful abstraction, and the five-axiom S/K presentation.
//!
//! Failures are collected as data with witnesses; fuel exhaustion on
//! either side of an equation is reported as indeterminate rather than
//! as a verdict.

use crate::algebra::{
    apply, eval, k1_code, k_code, s1_code, s2_code, s_code, Code, Effect, EvalError, EvalResult,
};
use crate::gen::{gen_closure, gen_expr, Rng};
use crate::report::{LawItem, LawReport, Outcome};
use crate::syntax::{subst, Expr};

/// Budget for each observation made while comparing computations.
const EQ_FUEL: u64 = 4_000;

/// Sampling configuration shared by the law suites.
#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub count: usize,
    pub depth: u32,
    pub seed: u64,
    /// Extra codes (e.g. `#flip`) mixed into generated terms.
    pub pool: Vec<Code>,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            count: 500,
            depth: 6,
            seed: 0x6d6361,
            pool: Vec::new(),
        }
    }
}

fn record_eq<E: Effect>(
    item: &mut LawItem,
    eff: &E,
    lhs: EvalResult<E::Comp>,
    rhs: EvalResult<E::Comp>,
    witness: impl Fn() -> String,
) {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => match eff.eq_comp(&a, &b, EQ_FUEL) {
            Ok(true) => item.record(Outcome::Pass),
            Ok(false) => item.record(Outcome::Fail(witness())),
            Err(_) => item.record(Outcome::Indeterminate(witness())),
        },
        (Err(EvalError::FuelExhausted), _) | (_, Err(EvalError::FuelExhausted)) => {
            item.record(Outcome::Indeterminate(witness()))
        }
        (Err(e), _) | (_, Err(e)) => item.record(Outcome::Fail(format!("{}: {e}", witness()))),
    }
}

/// Check the two abstraction laws on generated closures:
/// `⟨λ^{n+1}.e⟩·c = ret ⟨λⁿ.e[c]⟩` and `⟨λ⁰.e⟩·c = ν(e[c])`.
pub fn check_mca_laws<E: Effect>(eff: &E, samples: &SampleSpec, fuel: u64) -> LawReport {
    let mut report = LawReport::new(format!("mca[{}]", eff.name()));
    let mut peel = LawItem::new("abstraction-step");
    let mut beta = LawItem::new("abstraction-eval");
    let mut rng = Rng::new(samples.seed);

    for _ in 0..samples.count {
        let arg = gen_closure(&mut rng, samples.depth.min(3), &samples.pool);

        // law 1: an under-applied closure peels one parameter, purely
        let arity = 1 + rng.below(3) as u32;
        let body = gen_expr(&mut rng, arity + 1, samples.depth, &samples.pool);
        let closure = Code::closure_unchecked(arity, body.clone());
        let lhs = apply(eff, &closure, &arg, fuel);
        let rhs = subst(&body, arity, &arg)
            .map(|next| eff.ret(Code::closure_unchecked(arity - 1, next)))
            .map_err(EvalError::from);
        record_eq(&mut peel, eff, lhs, rhs, || format!("{closure} · {arg}"));

        // law 2: a saturated closure evaluates its substituted body
        let body0 = gen_expr(&mut rng, 1, samples.depth, &samples.pool);
        let closure0 = Code::closure_unchecked(0, body0.clone());
        let lhs = apply(eff, &closure0, &arg, fuel);
        let rhs = subst(&body0, 0, &arg)
            .map_err(EvalError::from)
            .and_then(|closed| eval(eff, &closed, fuel));
        record_eq(&mut beta, eff, lhs, rhs, || format!("{closure0} · {arg}"));
    }

    report.push(peel);
    report.push(beta);
    report
}

/// Check the S/K presentation. The published axiom table omits the
/// partial-application law for `S₁` (one row is printed twice); the laws
/// here are the ones forced by the abstraction laws, realizing `S₁`/`S₂`
/// as the closures obtained by substituting into `⟨λ².(0 2)(1 2)⟩`.
pub fn check_sk_axioms<E: Effect>(eff: &E, samples: &SampleSpec, fuel: u64) -> LawReport {
    let mut report = LawReport::new(format!("sk[{}]", eff.name()));
    let mut items = [
        LawItem::new("S·c1 = ret S1(c1)"),
        LawItem::new("K·c1 = ret K1(c1)"),
        LawItem::new("S1(c1)·c2 = ret S2(c1,c2)"),
        LawItem::new("K1(c1)·c2 = ret c1"),
        LawItem::new("S2(c1,c2)·c3 = eval (c1 c3)(c2 c3)"),
    ];
    let mut rng = Rng::new(samples.seed);
    let (s, k) = (s_code(), k_code());

    for _ in 0..samples.count {
        let c1 = gen_closure(&mut rng, samples.depth.min(4), &samples.pool);
        let c2 = gen_closure(&mut rng, samples.depth.min(4), &samples.pool);
        let c3 = gen_closure(&mut rng, samples.depth.min(4), &samples.pool);
        let w = || format!("c1={c1} c2={c2} c3={c3}");

        record_eq(
            &mut items[0],
            eff,
            apply(eff, &s, &c1, fuel),
            Ok(eff.ret(s1_code(&c1))),
            w,
        );
        record_eq(
            &mut items[1],
            eff,
            apply(eff, &k, &c1, fuel),
            Ok(eff.ret(k1_code(&c1))),
            w,
        );
        record_eq(
            &mut items[2],
            eff,
            apply(eff, &s1_code(&c1), &c2, fuel),
            Ok(eff.ret(s2_code(&c1, &c2))),
            w,
        );
        record_eq(
            &mut items[3],
            eff,
            apply(eff, &k1_code(&c1), &c2, fuel),
            Ok(eff.ret(c1.clone())),
            w,
        );
        let direct = Expr::app(
            Expr::app(Expr::lit(c1.clone()), Expr::lit(c3.clone())),
            Expr::app(Expr::lit(c2.clone()), Expr::lit(c3.clone())),
        );
        record_eq(
            &mut items[4],
            eff,
            apply(eff, &s2_code(&c1, &c2), &c3, fuel),
            eval(eff, &direct, fuel),
            w,
        );
    }

    for item in items {
        report.push(item);
    }
    report
}
