//! Assemblies over an evidenced frame: finite carriers whose every
//! element holds evidence for its own proposition, with morphisms
//! tracked by uniform evidence.

use std::rc::Rc;

use crate::algebra::Code;
use crate::frame::{check_evidence, ev_comp, ev_id, Core, Evidence, Prop, Verdict};
use crate::gen::{gen_closure, Rng};
use crate::modality::{ElemOf, Modality};
use crate::order::Heyting;
use crate::report::{LawItem, LawReport, Outcome};
use crate::syntax::Expr;

/// A finite assembly: labels, the proposition each label realizes, and
/// evidence that the proposition is inhabited (`⊤ → realizes(x)`).
#[derive(Clone)]
pub struct Assembly<T: Clone> {
    pub labels: Vec<String>,
    pub realizes: Vec<Rc<Prop<T>>>,
    pub witness: Vec<Code>,
}

impl<T: Clone> Assembly<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A function on labels together with a tracking evidence code.
#[derive(Clone)]
pub struct AsmMorphism {
    pub map: Vec<usize>,
    pub tracker: Code,
}

/// The identity morphism, tracked by the reflexivity evidence.
pub fn identity<T: Clone>(x: &Assembly<T>) -> AsmMorphism {
    AsmMorphism {
        map: (0..x.len()).collect(),
        tracker: ev_id(),
    }
}

/// Diagrammatic composition: first `f : X → Y`, then `g : Y → Z`,
/// tracked by the transitivity evidence of the two trackers.
pub fn compose(f: &AsmMorphism, g: &AsmMorphism) -> AsmMorphism {
    AsmMorphism {
        map: f.map.iter().map(|&i| g.map[i]).collect(),
        tracker: ev_comp(&f.tracker, &g.tracker),
    }
}

/// Check the assembly condition: every label's witness evidences
/// `⊤ → realizes(x)`.
pub fn check_assembly<M: Modality>(core: &Core<M>, x: &Assembly<ElemOf<M>>) -> LawReport {
    let mut report = LawReport::new("assembly");
    let mut item = LawItem::new("labels-evidenced");
    for i in 0..x.len() {
        let verdict = check_evidence(
            core,
            &Prop::Top,
            &Evidence::raw(x.witness[i].clone()),
            &x.realizes[i],
            &[],
        );
        match verdict {
            Verdict::ExactPass | Verdict::SampledPass => item.record(Outcome::Pass),
            Verdict::Indeterminate(w) => {
                item.record(Outcome::Indeterminate(format!("{}: {w}", x.labels[i])))
            }
            Verdict::Fail(w) => item.record(Outcome::Fail(format!("{}: {w}", x.labels[i]))),
        }
    }
    let mut member = LawItem::new("witness-in-separator");
    for (i, w) in x.witness.iter().enumerate() {
        member.record_bool(core.separator.membership(w), || {
            format!("{}: {w}", x.labels[i])
        });
    }
    report.push(item);
    report.push(member);
    report
}

/// Check that `f`'s tracker sends each label's realizers into the
/// image label's proposition, reporting per-label verdicts.
pub fn check_morphism<M: Modality>(
    core: &Core<M>,
    x: &Assembly<ElemOf<M>>,
    y: &Assembly<ElemOf<M>>,
    f: &AsmMorphism,
) -> LawReport {
    let mut report = LawReport::new("morphism");
    let mut item = LawItem::new("tracked");
    if f.map.len() != x.len() || f.map.iter().any(|&i| i >= y.len()) {
        item.record(Outcome::Fail("label map does not fit the carriers".into()));
        report.push(item);
        return report;
    }
    for i in 0..x.len() {
        let target = &y.realizes[f.map[i]];
        let verdict = check_evidence(
            core,
            &x.realizes[i],
            &Evidence::raw(f.tracker.clone()),
            target,
            &[],
        );
        match verdict {
            Verdict::ExactPass | Verdict::SampledPass => item.record(Outcome::Pass),
            Verdict::Indeterminate(w) => {
                item.record(Outcome::Indeterminate(format!("{}: {w}", x.labels[i])))
            }
            Verdict::Fail(w) => item.record(Outcome::Fail(format!("{}: {w}", x.labels[i]))),
        }
    }
    report.push(item);
    report
}

/// Generate an assembly whose label propositions are singleton base
/// predicates realized by fresh pure codes, witnessed by the constant
/// evidence returning the realizer.
pub fn gen_assembly<M: Modality>(
    core: &Core<M>,
    rng: &mut Rng,
    max_labels: usize,
) -> Assembly<ElemOf<M>> {
    let n = 1 + rng.below(max_labels as u64) as usize;
    let mut labels = Vec::new();
    let mut realizes = Vec::new();
    let mut witness = Vec::new();
    for i in 0..n {
        let realizer = gen_closure(rng, 2, &[]);
        labels.push(format!("x{i}"));
        realizes.push(Prop::base(
            vec![(realizer.clone(), core.alg().top())],
            core.alg().bottom(),
        ));
        witness.push(Code::closure_unchecked(0, Expr::lit(realizer)));
    }
    Assembly {
        labels,
        realizes,
        witness,
    }
}

/// Derive a target assembly and a tracked morphism onto it by pushing
/// every realizer through an under-applied closure. Applying `⟨λⁿ⁺¹.e⟩`
/// to one argument is pure in every effect — it returns the peeled
/// closure — so the target realizers are computed by substitution and
/// the pushing code itself tracks the morphism.
pub fn gen_tracked_morphism<M: Modality>(
    core: &Core<M>,
    rng: &mut Rng,
    x: &Assembly<ElemOf<M>>,
) -> Option<(Assembly<ElemOf<M>>, AsmMorphism)> {
    let arity = 1 + rng.below(3) as u32;
    let body = crate::gen::gen_expr(rng, arity + 1, 3, &[]);
    let h = Code::closure_unchecked(arity, body.clone());
    let mut realizes = Vec::new();
    let mut witness = Vec::new();
    for i in 0..x.len() {
        let Prop::Base(fp) = x.realizes[i].as_ref() else {
            return None;
        };
        let (src, _) = fp.entries.first()?;
        let out =
            Code::closure_unchecked(arity - 1, crate::syntax::subst(&body, arity, src).ok()?);
        realizes.push(Prop::base(
            vec![(out.clone(), core.alg().top())],
            core.alg().bottom(),
        ));
        witness.push(Code::closure_unchecked(0, Expr::lit(out)));
    }
    let y = Assembly {
        labels: x.labels.clone(),
        realizes,
        witness,
    };
    let f = AsmMorphism {
        map: (0..x.len()).collect(),
        tracker: h,
    };
    Some((y, f))
}

/// The assembly law suite: generated assemblies satisfy the evidence
/// condition, identity and composed morphisms are tracked, label
/// functions compose associatively, and a broken tracker is caught with
/// its witness label.
pub fn check_assembly_laws<M: Modality>(
    core: &Core<M>,
    instances: usize,
    seed: u64,
) -> LawReport {
    let mut report = LawReport::new(format!("assembly[{}]", core.modality.name()));
    let mut evidenced = LawItem::new("labels-evidenced");
    let mut id_tracked = LawItem::new("identity-tracked");
    let mut comp_tracked = LawItem::new("composition-tracked");
    let mut assoc = LawItem::new("label-composition-associative");
    let mut negative = LawItem::new("negative-control-caught");
    let mut rng = Rng::new(seed);

    for _ in 0..instances {
        let x = gen_assembly(core, &mut rng, 5);
        let ok = check_assembly(core, &x).passed();
        evidenced.record_bool(ok, || "generated assembly failed its own condition".into());

        let id = identity(&x);
        id_tracked.record_bool(check_morphism(core, &x, &x, &id).passed(), || {
            "identity tracker rejected".into()
        });

        if let Some((y, f)) = gen_tracked_morphism(core, &mut rng, &x) {
            if let Some((z, g)) = gen_tracked_morphism(core, &mut rng, &y) {
                let fg = compose(&f, &g);
                comp_tracked.record_bool(check_morphism(core, &x, &z, &fg).passed(), || {
                    "composite tracker rejected".into()
                });
                // associativity of the label functions through identity
                let h = identity(&z);
                assoc.record_bool(
                    compose(&compose(&f, &g), &h).map == compose(&f, &compose(&g, &h)).map,
                    || "label maps disagree".into(),
                );
            }
        }

        // a tracker pointing at a code outside every target proposition
        let bad = AsmMorphism {
            map: (0..x.len()).collect(),
            tracker: Code::closure_unchecked(
                0,
                Expr::lit(crate::effects::church(40 + rng.below(10))),
            ),
        };
        let report_bad = check_morphism(core, &x, &x, &bad);
        let caught = !report_bad.passed()
            && report_bad.items[0]
                .first_failure
                .as_deref()
                .is_some_and(|w| w.contains("x"));
        negative.record_bool(caught, || "bad tracker slipped through".into());
    }

    report.push(evidenced);
    report.push(id_tracked);
    report.push(comp_tracked);
    report.push(assoc);
    report.push(negative);
    report
}
