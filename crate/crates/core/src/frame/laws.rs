//! The evidenced-frame law suite and the consistency theorem, run as
//! executable checks against a monadic core.
//!
//! Rows with hypotheses (transitivity, conjunction introduction,
//! implication introduction, the uncurrying lemma) are exercised on
//! constructed instances whose premises are themselves checked first;
//! a failing conclusion after passing premises is a law violation.

use std::rc::Rc;

use crate::algebra::Code;
use crate::frame::{
    check_evidence, ev_comp, ev_curry, ev_eval, ev_fst, ev_id, ev_pair, ev_snd, ev_top,
    ev_uncurry, gen_base_prop, tuple_code, Core, Evidence, Prop, Verdict,
};
use crate::gen::Rng;
use crate::modality::{ElemOf, FinPred, Modality};
use crate::order::Heyting;
use crate::report::{LawItem, LawReport, Outcome};

#[derive(Clone, Debug)]
pub struct FrameSampleSpec {
    pub per_row: usize,
    pub seed: u64,
}

impl Default for FrameSampleSpec {
    fn default() -> Self {
        FrameSampleSpec {
            per_row: 100,
            seed: 0xef,
        }
    }
}

/// A base proposition together with a code known to realize it.
struct Realized<T: Clone> {
    prop: Rc<Prop<T>>,
    realizer: Code,
}

fn gen_realized<M: Modality>(core: &Core<M>, rng: &mut Rng, pool: &[Code]) -> Realized<ElemOf<M>> {
    let base = gen_base_prop(core, rng, pool);
    let realizer = rng.pick(pool).clone();
    let Prop::Base(fp) = base.as_ref() else {
        unreachable!()
    };
    let mut entries: Vec<(Code, ElemOf<M>)> = fp
        .entries
        .iter()
        .filter(|(c, _)| *c != realizer)
        .cloned()
        .collect();
    entries.push((realizer.clone(), core.alg().top()));
    Realized {
        prop: Rc::new(Prop::Base(FinPred {
            entries,
            default: core.alg().bottom(),
        })),
        realizer,
    }
}

fn ev<M: Modality>(core: &Core<M>, code: Code) -> Evidence {
    Evidence::new(&core.separator, code).expect("evidence builders stay inside the separator")
}

/// Record a judgment expected to pass, also policing that exact verdicts
/// appear exactly when the left-hand proposition is a base one.
fn expect_pass<M: Modality>(
    core: &Core<M>,
    item: &mut LawItem,
    exactness: &mut LawItem,
    p1: &Prop<ElemOf<M>>,
    e: &Evidence,
    p2: &Prop<ElemOf<M>>,
    probes: &[Code],
    label: &str,
) -> bool {
    let verdict = check_evidence(core, p1, e, p2, probes);
    let base_left = matches!(p1, Prop::Base(_) | Prop::Bot);
    match &verdict {
        Verdict::ExactPass | Verdict::SampledPass => {
            item.record(verdict.outcome());
            let exact = matches!(verdict, Verdict::ExactPass);
            exactness.record_bool(exact == base_left, || {
                format!("{label}: base-left={base_left} but exact={exact}")
            });
            true
        }
        Verdict::Indeterminate(w) => {
            item.record(Outcome::Indeterminate(format!("{label}: {w}")));
            false
        }
        Verdict::Fail(w) => {
            item.record(Outcome::Fail(format!("{label}: {w}")));
            false
        }
    }
}

/// Exercise every row of the evidenced-frame table, plus the uncurrying
/// lemma, on `per_row` constructed instances each.
pub fn check_ef_laws<M: Modality>(core: &Core<M>, spec: &FrameSampleSpec) -> LawReport {
    let mut report = LawReport::new(format!("ef[{}]", core.modality.name()));
    let mut rng = Rng::new(spec.seed);

    let mut refl = LawItem::new("reflexivity");
    let mut trans = LawItem::new("transitivity");
    let mut top = LawItem::new("top-intro");
    let mut cintro = LawItem::new("conj-intro");
    let mut celim1 = LawItem::new("conj-elim1");
    let mut celim2 = LawItem::new("conj-elim2");
    let mut uintro = LawItem::new("uimpl-intro");
    let mut uelim = LawItem::new("uimpl-elim");
    let mut uncurry = LawItem::new("uncurry-lemma");
    let mut exactness = LawItem::new("verdict-exactness");
    let mut closure = LawItem::new("separator-closure");

    // pool of pure codes realizing the generated base props; primitives
    // and codes whose applications diverge stay out — a divergent
    // support code makes every verdict touching it vacuously
    // indeterminate
    let candidates: Vec<Code> = core
        .separator
        .generate(spec.seed.wrapping_add(41), 64, &[])
        .into_iter()
        .filter(|c| !matches!(c, Code::Prim(_)))
        .collect();
    let pool = crate::frame::mutually_tame_pool(core, candidates, 24);

    for _ in 0..spec.per_row {
        let ra = gen_realized(core, &mut rng, &pool);
        let rb = gen_realized(core, &mut rng, &pool);
        let rc_ = gen_realized(core, &mut rng, &pool);
        let pair_ab = tuple_code(&ra.realizer, &rb.realizer);
        let conj_ab = Prop::conj(ra.prop.clone(), rb.prop.clone());

        // reflexivity, over base and composite shapes
        let shapes: [Rc<Prop<ElemOf<M>>>; 3] = [
            ra.prop.clone(),
            conj_ab.clone(),
            Prop::uimpl(ra.prop.clone(), vec![rb.prop.clone()]),
        ];
        let p = &shapes[rng.below(3) as usize];
        expect_pass(
            core,
            &mut refl,
            &mut exactness,
            p,
            &ev(core, ev_id()),
            p,
            std::slice::from_ref(&pair_ab),
            "φ →[id] φ",
        );

        // transitivity: Conj(Conj(a,b), c) -fst-> Conj(a,b) -snd-> b
        let nested = Prop::conj(conj_ab.clone(), rc_.prop.clone());
        let pair_nested = tuple_code(&pair_ab, &rc_.realizer);
        let probes = [pair_nested.clone(), pair_ab.clone()];
        let pre1 = check_evidence(core, &nested, &ev(core, ev_fst()), &conj_ab, &probes);
        let pre2 = check_evidence(core, &conj_ab, &ev(core, ev_snd()), &rb.prop, &probes);
        if pre1.passed() && pre2.passed() {
            expect_pass(
                core,
                &mut trans,
                &mut exactness,
                &nested,
                &ev(core, ev_comp(&ev_fst(), &ev_snd())),
                &rb.prop,
                &probes,
                "comp(fst, snd)",
            );
        } else {
            trans.record(Outcome::Indeterminate("premise did not pass".into()));
        }

        // top
        expect_pass(
            core,
            &mut top,
            &mut exactness,
            &ra.prop,
            &ev(core, ev_top()),
            &Prop::Top,
            &[],
            "φ →[top] ⊤",
        );

        // conjunction introduction: re-pair the two projections
        let pre1 = check_evidence(core, &conj_ab, &ev(core, ev_fst()), &ra.prop, std::slice::from_ref(&pair_ab));
        let pre2 = check_evidence(core, &conj_ab, &ev(core, ev_snd()), &rb.prop, std::slice::from_ref(&pair_ab));
        if pre1.passed() && pre2.passed() {
            expect_pass(
                core,
                &mut cintro,
                &mut exactness,
                &conj_ab,
                &ev(core, ev_pair(&ev_fst(), &ev_snd())),
                &conj_ab,
                std::slice::from_ref(&pair_ab),
                "pair(fst, snd)",
            );
        } else {
            cintro.record(Outcome::Indeterminate("premise did not pass".into()));
        }

        // conjunction eliminations
        expect_pass(
            core,
            &mut celim1,
            &mut exactness,
            &conj_ab,
            &ev(core, ev_fst()),
            &ra.prop,
            std::slice::from_ref(&pair_ab),
            "fst",
        );
        expect_pass(
            core,
            &mut celim2,
            &mut exactness,
            &conj_ab,
            &ev(core, ev_snd()),
            &rb.prop,
            std::slice::from_ref(&pair_ab),
            "snd",
        );

        // universal-implication introduction: a family and one evidence
        // covering it
        let (family, e0): (Vec<Rc<Prop<ElemOf<M>>>>, Code) = match rng.below(4) {
            0 => (vec![rb.prop.clone()], ev_snd()),
            1 => (vec![ra.prop.clone()], ev_fst()),
            2 => (vec![Prop::top()], ev_top()),
            _ => (vec![ra.prop.clone(), Prop::top()], ev_fst()),
        };
        let mut premises_ok = true;
        for phi in &family {
            if !check_evidence(core, &conj_ab, &ev(core, e0.clone()), phi, std::slice::from_ref(&pair_ab))
                .passed()
            {
                premises_ok = false;
            }
        }
        let uimpl_prop = Prop::uimpl(rb.prop.clone(), family.clone());
        if premises_ok {
            expect_pass(
                core,
                &mut uintro,
                &mut exactness,
                &ra.prop,
                &ev(core, ev_curry(&e0)),
                &uimpl_prop,
                &[],
                "curry",
            );
        } else {
            uintro.record(Outcome::Indeterminate("premise did not pass".into()));
        }

        // universal-implication elimination: (a ⊃ F) ∧ a →[eval] φ
        let const_rb = Code::closure_unchecked(0, crate::syntax::Expr::lit(rb.realizer.clone()));
        let (family, f_code): (Vec<Rc<Prop<ElemOf<M>>>>, Code) = if rng.chance(1, 2) {
            (vec![rb.prop.clone()], const_rb)
        } else {
            (vec![Prop::top()], ev_id())
        };
        let u = Prop::uimpl(ra.prop.clone(), family.clone());
        let lhs = Prop::conj(u, ra.prop.clone());
        let probe = tuple_code(&f_code, &ra.realizer);
        for phi in &family {
            expect_pass(
                core,
                &mut uelim,
                &mut exactness,
                &lhs,
                &ev(core, ev_eval()),
                phi,
                std::slice::from_ref(&probe),
                "eval",
            );
        }

        // uncurrying: from a →[curry(snd)] (b ⊃ [b]) conclude
        // Conj(a,b) →[uncurry(curry(snd))] b
        let u = Prop::uimpl(rb.prop.clone(), vec![rb.prop.clone()]);
        let pre = check_evidence(core, &ra.prop, &ev(core, ev_curry(&ev_snd())), &u, &[]);
        if pre.passed() {
            expect_pass(
                core,
                &mut uncurry,
                &mut exactness,
                &conj_ab,
                &ev(core, ev_uncurry(&ev_curry(&ev_snd()))),
                &rb.prop,
                std::slice::from_ref(&pair_ab),
                "uncurry(curry(snd))",
            );
        } else {
            uncurry.record(Outcome::Indeterminate("premise did not pass".into()));
        }

        // the builders stay inside the separator
        for code in [
            ev_id(),
            ev_comp(&ev_fst(), &ev_snd()),
            ev_pair(&ev_fst(), &ev_snd()),
            ev_fst(),
            ev_snd(),
            ev_curry(&ev_snd()),
            ev_eval(),
            ev_uncurry(&ev_curry(&ev_snd())),
        ] {
            closure.record_bool(core.separator.membership(&code), || format!("{code}"));
        }
    }

    for item in [
        refl, trans, top, cintro, celim1, celim2, uintro, uelim, uncurry, exactness, closure,
    ] {
        report.push(item);
    }
    report
}

/// Consistency: no generated separator member evidences `⊤ → ⊥` over a
/// nontrivial algebra. A pass of that check is a hard error of the core
/// and is reported with the offending evidence.
pub fn check_consistency<M: Modality>(
    core: &Core<M>,
    budget: usize,
    seed: u64,
    extras: &[Code],
) -> LawReport {
    let mut report = LawReport::new(format!(
        "consistency[{} sep={}]",
        core.modality.name(),
        core.separator.name()
    ));

    let mut nontrivial = LawItem::new("omega-nontrivial");
    nontrivial.record_bool(
        !core.alg().leq(&core.alg().top(), &core.alg().bottom()),
        || "⊤ ≤ ⊥ holds: trivial algebra".to_string(),
    );
    report.push(nontrivial);

    let mut item = LawItem::new("no-top-to-bot-evidence");
    let members = core.separator.generate(seed, budget, extras);
    let probes: Vec<Code> = members.iter().take(6).cloned().collect();
    let top: Prop<ElemOf<M>> = Prop::Top;
    let bot: Prop<ElemOf<M>> = Prop::Bot;

    for e in &members {
        let verdict = check_evidence(core, &top, &Evidence::raw(e.clone()), &bot, &probes);
        match verdict {
            Verdict::Fail(_) => item.record(Outcome::Pass),
            Verdict::ExactPass | Verdict::SampledPass => item.record(Outcome::Fail(format!(
                "evidence {e} certifies ⊤ → ⊥"
            ))),
            Verdict::Indeterminate(w) => item.record(Outcome::Indeterminate(format!("{e}: {w}"))),
        }
    }
    report.push(item);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modality::{PartialModality, SeparatorSpec};

    fn core() -> Core<PartialModality> {
        Core::new(PartialModality::default(), SeparatorSpec::pure(), 4_000)
    }

    #[test]
    fn ef_laws_pass_for_the_partial_core() {
        crate::with_deep_stack(|| {
            let spec = FrameSampleSpec {
                per_row: 25,
                seed: 0xef,
            };
            let report = check_ef_laws(&core(), &spec);
            assert!(report.passed(), "{report}");
        });
    }

    #[test]
    fn consistency_holds_for_the_partial_core() {
        crate::with_deep_stack(|| {
            let report = check_consistency(&core(), 60, 5, &[]);
            assert!(report.passed(), "{report}");
        });
    }
}
