//! Executable checkers for the modality laws and their derived lemmas.
//!
//! Instances are generated from a seeded sampler; every global infimum
//! over codes is computed exactly through the finite-support scheme.
//! Fuel exhaustion inside an instance makes it indeterminate.

use std::rc::Rc;

use crate::algebra::{apply, eval, Code, Effect, EvalError, EvalResult};
use crate::gen::{canonical_codes, gen_closed_pure_expr, gen_closure, gen_expr, Rng};
use crate::modality::{global_implication_inf, ElemOf, FinPred, Modality};
use crate::order::{Heyting, HeytingJoins};
use crate::report::{LawItem, LawReport, Outcome};
use crate::syntax::Expr;

#[derive(Clone, Debug)]
pub struct ModSampleSpec {
    pub count: usize,
    pub seed: u64,
    pub depth: u32,
    /// Effect primitives mixed into generated computations.
    pub pool: Vec<Code>,
    pub fuel: u64,
}

impl Default for ModSampleSpec {
    fn default() -> Self {
        ModSampleSpec {
            count: 300,
            seed: 0xafedd,
            depth: 4,
            pool: Vec::new(),
            fuel: 400,
        }
    }
}

/// A random computation of the effect: either a returned code or the
/// evaluation of a small closed term over the primitive pool.
pub fn gen_computation<E: Effect>(
    eff: &E,
    rng: &mut Rng,
    spec: &ModSampleSpec,
) -> Option<E::Comp> {
    if spec.pool.is_empty() || rng.chance(1, 3) {
        let e = if rng.chance(1, 2) {
            gen_closed_pure_expr(rng, spec.depth)
        } else {
            Expr::lit(gen_closure(rng, spec.depth, &[]))
        };
        return eval(eff, &e, spec.fuel).ok();
    }
    let e = gen_expr(rng, 0, spec.depth, &spec.pool);
    eval(eff, &e, spec.fuel).ok()
}

/// A random finite-support predicate over a pool of codes.
pub fn gen_finpred<H: Heyting>(alg: &H, rng: &mut Rng, codes: &[Code]) -> FinPred<H::Elem> {
    let elems = alg.elements();
    let support = 1 + rng.below(3) as usize;
    let mut entries = Vec::new();
    for _ in 0..support {
        let c = rng.pick(codes).clone();
        if entries.iter().any(|(k, _)| *k == c) {
            continue;
        }
        let v = rng.pick(&elems).clone();
        entries.push((c, v));
    }
    let default = if rng.chance(2, 3) {
        alg.bottom()
    } else {
        rng.pick(&elems).clone()
    };
    FinPred { entries, default }
}

fn code_pool(spec: &ModSampleSpec, rng: &mut Rng) -> Vec<Code> {
    let mut pool = canonical_codes();
    for _ in 0..4 {
        pool.push(gen_closure(rng, 3, &[]));
    }
    pool.extend(spec.pool.iter().cloned());
    pool
}

/// After-Return: `φ(a) ≤ after(ret a, φ)`.
pub fn check_after_return<M: Modality>(moda: &M, spec: &ModSampleSpec) -> LawReport {
    let mut report = LawReport::new(format!("after-return[{}]", moda.name()));
    let mut item = LawItem::new("after-return");
    let mut rng = Rng::new(spec.seed);
    let pool = code_pool(spec, &mut rng);

    for _ in 0..spec.count {
        let a = rng.pick(&pool).clone();
        let mut phi = gen_finpred(moda.algebra(), &mut rng, &pool);
        if rng.chance(1, 2) {
            let elems = moda.algebra().elements();
            phi.entries.retain(|(k, _)| *k != a);
            phi.entries.push((a.clone(), rng.pick(&elems).clone()));
        }
        let ret = moda.effect().ret(a.clone());
        match moda.after_fin(&ret, &phi, spec.fuel) {
            Ok(v) => item.record_bool(moda.algebra().leq(&phi.eval(&a), &v), || {
                format!(
                    "a={a} φ(a)={} after={}",
                    moda.algebra().render(&phi.eval(&a)),
                    moda.algebra().render(&v)
                )
            }),
            Err(EvalError::FuelExhausted) => {
                item.record(Outcome::Indeterminate(format!("a={a}")))
            }
            Err(e) => item.record(Outcome::Fail(format!("a={a}: {e}"))),
        }
    }
    report.push(item);
    report
}

/// After-Bind: `after x←m. (after y←f(x). φ(y))  ≤  after y←(bind m f). φ(y)`.
pub fn check_after_bind<M: Modality>(moda: &M, spec: &ModSampleSpec) -> LawReport {
    let mut report = LawReport::new(format!("after-bind[{}]", moda.name()));
    let mut item = LawItem::new("after-bind");
    let mut rng = Rng::new(spec.seed.wrapping_add(1));
    let pool = code_pool(spec, &mut rng);

    for _ in 0..spec.count {
        let Some(m) = gen_computation(moda.effect(), &mut rng, spec) else {
            item.record(Outcome::Indeterminate("sample computation diverged".into()));
            continue;
        };
        let cf = rng.pick(&pool).clone();
        let phi = gen_finpred(moda.algebra(), &mut rng, &pool);
        let support = phi.support();
        let eff = moda.effect().clone();
        let fuel = spec.fuel;

        // ψ(x) = after y ← (c_f · x). φ(y)
        let inner_moda = moda.clone();
        let inner_phi = phi.clone();
        let inner_support = support.clone();
        let cf2 = cf.clone();
        let psi = move |x: &Code| -> EvalResult<ElemOf<M>> {
            let fx = apply(&eff, &cf2, x, fuel)?;
            inner_moda.after(&fx, &|c| Ok(inner_phi.eval(c)), &inner_support, fuel)
        };

        let lhs = moda.after(&m, &psi, &support, fuel);

        let eff2 = moda.effect().clone();
        let cf3 = cf.clone();
        let bound = moda.effect().bind(
            m.clone(),
            Rc::new(move |x, run_fuel: &crate::algebra::Fuel| {
                crate::algebra::apply_with(&eff2, &cf3, &x, run_fuel)
            }),
            &crate::algebra::Fuel::new(fuel),
        );
        let rhs = bound.and_then(|b| moda.after(&b, &|c| Ok(phi.eval(c)), &support, fuel));

        match (lhs, rhs) {
            (Ok(l), Ok(r)) => item.record_bool(moda.algebra().leq(&l, &r), || {
                format!(
                    "f={cf} lhs={} rhs={}",
                    moda.algebra().render(&l),
                    moda.algebra().render(&r)
                )
            }),
            (Err(EvalError::FuelExhausted), _) | (_, Err(EvalError::FuelExhausted)) => {
                item.record(Outcome::Indeterminate(format!("f={cf}")))
            }
            (Err(e), _) | (_, Err(e)) => item.record(Outcome::Fail(format!("f={cf}: {e}"))),
        }
    }
    report.push(item);
    report
}

/// Internal Monotonicity:
/// `⨅_c (φ₁(c) ⊐ φ₂(c))  ≤  after(m, φ₁) ⊐ after(m, φ₂)`,
/// with the global infimum computed exactly over the support union and
/// the defaults.
pub fn check_internal_monotonicity<M: Modality>(moda: &M, spec: &ModSampleSpec) -> LawReport {
    let mut report = LawReport::new(format!("internal-monotonicity[{}]", moda.name()));
    let mut item = LawItem::new("internal-monotonicity");
    let mut rng = Rng::new(spec.seed.wrapping_add(2));
    let pool = code_pool(spec, &mut rng);

    for _ in 0..spec.count {
        let Some(m) = gen_computation(moda.effect(), &mut rng, spec) else {
            item.record(Outcome::Indeterminate("sample computation diverged".into()));
            continue;
        };
        let p1 = gen_finpred(moda.algebra(), &mut rng, &pool);
        let p2 = gen_finpred(moda.algebra(), &mut rng, &pool);
        let global = global_implication_inf(moda.algebra(), &p1, &p2);
        let a1 = moda.after_fin(&m, &p1, spec.fuel);
        let a2 = moda.after_fin(&m, &p2, spec.fuel);
        match (a1, a2) {
            (Ok(a1), Ok(a2)) => {
                let rhs = moda.algebra().implies(&a1, &a2);
                item.record_bool(moda.algebra().leq(&global, &rhs), || {
                    format!(
                        "inf={} after₁={} after₂={}",
                        moda.algebra().render(&global),
                        moda.algebra().render(&a1),
                        moda.algebra().render(&a2)
                    )
                });
            }
            (Err(EvalError::FuelExhausted), _) | (_, Err(EvalError::FuelExhausted)) => {
                item.record(Outcome::Indeterminate("fuel".into()))
            }
            (Err(e), _) | (_, Err(e)) => item.record(Outcome::Fail(e.to_string())),
        }
    }
    report.push(item);
    report
}

/// The three derived lemmas: predicate monotonicity of `after`,
/// implication extrusion, and conjunction intrusion.
pub fn check_derived_lemmas<M: Modality>(moda: &M, spec: &ModSampleSpec) -> LawReport
where
    M::Alg: HeytingJoins,
{
    let mut report = LawReport::new(format!("derived-lemmas[{}]", moda.name()));
    let mut mono = LawItem::new("after-mono");
    let mut imp = LawItem::new("after-imp");
    let mut conj = LawItem::new("after-conj");
    let mut rng = Rng::new(spec.seed.wrapping_add(3));
    let pool = code_pool(spec, &mut rng);
    let alg = moda.algebra();
    let elems = alg.elements();

    for _ in 0..spec.count {
        let Some(m) = gen_computation(moda.effect(), &mut rng, spec) else {
            mono.record(Outcome::Indeterminate("sample computation diverged".into()));
            continue;
        };
        let phi = gen_finpred(alg, &mut rng, &pool);
        let support = phi.support();

        // φ₁ ≤ φ₂ pointwise (φ₂ built as a pointwise join) ⇒ monotone
        let psi = gen_finpred(alg, &mut rng, &pool);
        let mut bigger_entries: Vec<(Code, ElemOf<M>)> = Vec::new();
        for c in phi.support().into_iter().chain(psi.support()) {
            if bigger_entries.iter().any(|(k, _)| *k == c) {
                continue;
            }
            bigger_entries.push((c.clone(), alg.join(&phi.eval(&c), &psi.eval(&c))));
        }
        let bigger = FinPred {
            entries: bigger_entries,
            default: alg.join(&phi.default, &psi.default),
        };
        match (
            moda.after_fin(&m, &phi, spec.fuel),
            moda.after_fin(&m, &bigger, spec.fuel),
        ) {
            (Ok(a), Ok(b)) => mono.record_bool(alg.leq(&a, &b), || {
                format!("after(φ₁)={} after(φ₂)={}", alg.render(&a), alg.render(&b))
            }),
            _ => mono.record(Outcome::Indeterminate("fuel".into())),
        }

        // after(θ ⊐ φ) ≤ θ ⊐ after(φ)
        let theta = rng.pick(&elems).clone();
        let t2 = theta.clone();
        let phi2 = phi.clone();
        let alg2 = alg;
        let lifted = move |c: &Code| Ok(alg2.implies(&t2, &phi2.eval(c)));
        match (
            moda.after(&m, &lifted, &support, spec.fuel),
            moda.after_fin(&m, &phi, spec.fuel),
        ) {
            (Ok(l), Ok(r)) => {
                let rhs = alg.implies(&theta, &r);
                imp.record_bool(alg.leq(&l, &rhs), || {
                    format!("θ={} lhs={} rhs={}", alg.render(&theta), alg.render(&l), alg.render(&rhs))
                });
            }
            _ => imp.record(Outcome::Indeterminate("fuel".into())),
        }

        // θ ⊓ after(φ) ≤ after(θ ⊓ φ)
        let t3 = theta.clone();
        let phi3 = phi.clone();
        let alg3 = alg;
        let met = move |c: &Code| Ok(alg3.meet(&t3, &phi3.eval(c)));
        match (
            moda.after_fin(&m, &phi, spec.fuel),
            moda.after(&m, &met, &support, spec.fuel),
        ) {
            (Ok(a), Ok(r)) => {
                let lhs = alg.meet(&theta, &a);
                conj.record_bool(alg.leq(&lhs, &r), || {
                    format!("θ={} lhs={} rhs={}", alg.render(&theta), alg.render(&lhs), alg.render(&r))
                });
            }
            _ => conj.record(Outcome::Indeterminate("fuel".into())),
        }
    }

    report.push(mono);
    report.push(imp);
    report.push(conj);
    report
}

/// Naturality probe: `after(map f m, φ)` is order-equivalent to
/// `after(m, φ ∘ f)` for involutive renamings `f` on codes.
pub fn check_naturality<M: Modality>(moda: &M, spec: &ModSampleSpec) -> LawReport {
    let mut report = LawReport::new(format!("naturality[{}]", moda.name()));
    let mut item = LawItem::new("naturality-swap");
    let mut rng = Rng::new(spec.seed.wrapping_add(4));
    let pool = code_pool(spec, &mut rng);

    for _ in 0..spec.count {
        let Some(m) = gen_computation(moda.effect(), &mut rng, spec) else {
            item.record(Outcome::Indeterminate("sample computation diverged".into()));
            continue;
        };
        let a = rng.pick(&pool).clone();
        let b = rng.pick(&pool).clone();
        let swap = {
            let (a, b) = (a.clone(), b.clone());
            move |c: &Code| {
                if *c == a {
                    b.clone()
                } else if *c == b {
                    a.clone()
                } else {
                    c.clone()
                }
            }
        };
        let phi = gen_finpred(moda.algebra(), &mut rng, &pool);

        let eff = moda.effect().clone();
        let swap2 = swap.clone();
        let mapped = moda.effect().bind(
            m.clone(),
            Rc::new(move |x, _: &crate::algebra::Fuel| Ok(eff.ret(swap2(&x)))),
            &crate::algebra::Fuel::new(spec.fuel),
        );
        let swapped_support: Vec<Code> = phi.support().iter().map(&swap).collect();
        let phi2 = phi.clone();
        let composed = move |c: &Code| Ok(phi2.eval(&swap(c)));

        let lhs = mapped.and_then(|mm| moda.after_fin(&mm, &phi, spec.fuel));
        let rhs = moda.after(&m, &composed, &swapped_support, spec.fuel);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => item.record_bool(moda.algebra().equiv(&l, &r), || {
                format!(
                    "swap {a}<->{b}: {} vs {}",
                    moda.algebra().render(&l),
                    moda.algebra().render(&r)
                )
            }),
            _ => item.record(Outcome::Indeterminate("fuel".into())),
        }
    }
    report.push(item);
    report
}
