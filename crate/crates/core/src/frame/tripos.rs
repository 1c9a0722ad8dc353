//! The tripos preorder: indexed families of propositions, ordered by a
//! single uniform evidence code, with reindexing along functions.

use std::rc::Rc;

use crate::algebra::Code;
use crate::frame::{
    check_evidence, ev_comp, ev_fst, ev_id, ev_snd, gen_base_prop, tuple_code, Core, Evidence,
    Prop, Verdict,
};
use crate::gen::{canonical_codes, Rng};
use crate::modality::{ElemOf, Modality};
use crate::report::{LawItem, LawReport, Outcome};

/// A finite family of propositions indexed by `0..len`.
pub type Fam<T> = Vec<Rc<Prop<T>>>;

/// `φ ≤_I ψ` via `e`: for every index, `e` uniformly evidences
/// `φ(i) → ψ(i)`. The combined verdict is the worst per-index verdict.
pub fn tripos_leq<M: Modality>(
    core: &Core<M>,
    phi: &Fam<ElemOf<M>>,
    psi: &Fam<ElemOf<M>>,
    e: &Evidence,
    probes: &[Code],
) -> Verdict {
    assert_eq!(phi.len(), psi.len(), "families must share the index set");
    let mut combined = Verdict::ExactPass;
    for (i, (p, q)) in phi.iter().zip(psi).enumerate() {
        let v = check_evidence(core, p, e, q, probes);
        combined = match (combined, v) {
            (f @ Verdict::Fail(_), _) | (_, f @ Verdict::Fail(_)) => {
                return match f {
                    Verdict::Fail(w) => Verdict::Fail(format!("index {i}: {w}")),
                    _ => unreachable!(),
                }
            }
            (ind @ Verdict::Indeterminate(_), _) | (_, ind @ Verdict::Indeterminate(_)) => ind,
            (Verdict::SampledPass, _) | (_, Verdict::SampledPass) => Verdict::SampledPass,
            _ => Verdict::ExactPass,
        };
    }
    combined
}

/// Reindex a family along `f : J → I`, pointwise: `j ↦ φ(f(j))`.
pub fn tripos_reindex<T: Clone>(f: &[usize], phi: &Fam<T>) -> Fam<T> {
    f.iter().map(|&i| phi[i].clone()).collect()
}

/// The tripos-preorder law suite: reflexivity and transitivity of `≤_I`
/// with uniform evidence on sampled finite families, and exact
/// functoriality of reindexing.
pub fn check_tripos_laws<M: Modality>(core: &Core<M>, instances: usize, seed: u64) -> LawReport {
    let mut report = LawReport::new(format!("tripos[{}]", core.modality.name()));
    let mut refl = LawItem::new("reflexivity");
    let mut trans = LawItem::new("transitivity");
    let mut reidx_id = LawItem::new("reindex-identity");
    let mut reidx_comp = LawItem::new("reindex-composition");
    let mut rng = Rng::new(seed);
    let pool = canonical_codes();

    for _ in 0..instances {
        let n = 1 + rng.below(4) as usize;
        let fam: Fam<ElemOf<M>> = (0..n).map(|_| gen_base_prop(core, &mut rng, &pool)).collect();

        // φ ≤ φ via id, uniformly at every index
        let v = tripos_leq(core, &fam, &fam, &Evidence::raw(ev_id()), &[]);
        refl.record(v.outcome());

        // Conj(Conj(a_i, b_i), ⊤) -fst-> Conj(a_i, b_i) -snd-> b_i
        let b: Fam<ElemOf<M>> = (0..n).map(|_| gen_base_prop(core, &mut rng, &pool)).collect();
        let pairs: Fam<ElemOf<M>> = fam
            .iter()
            .zip(&b)
            .map(|(p, q)| Prop::conj(p.clone(), q.clone()))
            .collect();
        let nested: Fam<ElemOf<M>> = pairs
            .iter()
            .map(|pq| Prop::conj(pq.clone(), Prop::top()))
            .collect();
        let probes = [tuple_code(
            &tuple_code(&pool[0], &pool[1]),
            &pool[2],
        )];
        let pre1 = tripos_leq(core, &nested, &pairs, &Evidence::raw(ev_fst()), &probes);
        let pre2 = tripos_leq(core, &pairs, &b, &Evidence::raw(ev_snd()), &probes);
        if pre1.passed() && pre2.passed() {
            let v = tripos_leq(
                core,
                &nested,
                &b,
                &Evidence::raw(ev_comp(&ev_fst(), &ev_snd())),
                &probes,
            );
            trans.record(v.outcome());
        } else {
            trans.record(Outcome::Indeterminate("premise did not pass".into()));
        }

        // functoriality, exactly on the family tables
        let id: Vec<usize> = (0..n).collect();
        reidx_id.record_bool(tripos_reindex(&id, &fam) == fam, || format!("|I|={n}"));
        let f: Vec<usize> = (0..n).map(|_| rng.below(n as u64) as usize).collect();
        let g: Vec<usize> = (0..1 + rng.below(3) as usize)
            .map(|_| rng.below(f.len() as u64) as usize)
            .collect();
        let fg: Vec<usize> = g.iter().map(|&k| f[k]).collect();
        reidx_comp.record_bool(
            tripos_reindex(&fg, &fam) == tripos_reindex(&g, &tripos_reindex(&f, &fam)),
            || format!("f={f:?} g={g:?}"),
        );
    }

    report.push(refl);
    report.push(trans);
    report.push(reidx_id);
    report.push(reidx_comp);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::church;
    use crate::frame::{ev_comp, ev_fst, ev_id, ev_snd, gen_base_prop, tuple_code};
    use crate::gen::{canonical_codes, Rng};
    use crate::modality::{PartialModality, SeparatorSpec};

    fn core() -> Core<PartialModality> {
        Core::new(PartialModality::default(), SeparatorSpec::pure(), 4_000)
    }

    fn gen_fam(core: &Core<PartialModality>, rng: &mut Rng, n: usize) -> Fam<bool> {
        let pool = canonical_codes();
        (0..n).map(|_| gen_base_prop(core, rng, &pool)).collect()
    }

    #[test]
    fn reflexivity_lifts_uniformly_to_families() {
        let core = core();
        let mut rng = Rng::new(31);
        for _ in 0..50 {
            let n = 1 + rng.below(4) as usize;
            let fam = gen_fam(&core, &mut rng, n);
            let e = Evidence::raw(ev_id());
            let v = tripos_leq(&core, &fam, &fam, &e, &[]);
            assert!(v.passed(), "{v:?}");
        }
    }

    #[test]
    fn transitivity_composes_uniform_evidence() {
        // Conj(Conj(a,b), c) -fst-> Conj(a,b) -snd-> b, uniformly at
        // every index of a two-element family.
        let core = core();
        let mut rng = Rng::new(37);
        for _ in 0..20 {
            let a = gen_fam(&core, &mut rng, 2);
            let b = gen_fam(&core, &mut rng, 2);
            let pairs: Vec<Rc<Prop<bool>>> = a
                .iter()
                .zip(&b)
                .map(|(p, q)| Prop::conj(p.clone(), q.clone()))
                .collect();
            let nested: Fam<bool> = pairs
                .iter()
                .map(|pq| Prop::conj(pq.clone(), Prop::top()))
                .collect();
            let probes = [tuple_code(&tuple_code(&church(0), &church(1)), &church(2))];
            let mid = tripos_leq(&core, &nested, &pairs, &Evidence::raw(ev_fst()), &probes);
            let tail = tripos_leq(&core, &pairs, &b, &Evidence::raw(ev_snd()), &probes);
            assert!(mid.passed() && tail.passed());
            let v = tripos_leq(
                &core,
                &nested,
                &b,
                &Evidence::raw(ev_comp(&ev_fst(), &ev_snd())),
                &probes,
            );
            assert!(v.passed(), "{v:?}");
        }
    }

    #[test]
    fn reindex_along_identity_is_identity() {
        let core = core();
        let mut rng = Rng::new(41);
        let fam = gen_fam(&core, &mut rng, 4);
        let id: Vec<usize> = (0..4).collect();
        assert_eq!(tripos_reindex(&id, &fam), fam);
    }

    #[test]
    fn reindex_composes_functorially() {
        let core = core();
        let mut rng = Rng::new(43);
        let fam = gen_fam(&core, &mut rng, 4);
        let f = [2usize, 0, 3, 1]; // J → I
        let g = [1usize, 1, 2];    // K → J
        let fg: Vec<usize> = g.iter().map(|&k| f[k]).collect();
        assert_eq!(
            tripos_reindex(&fg, &fam),
            tripos_reindex(&g, &tripos_reindex(&f, &fam))
        );
    }

    #[test]
    fn reindexing_preserves_the_preorder() {
        let core = core();
        let mut rng = Rng::new(47);
        let fam = gen_fam(&core, &mut rng, 3);
        let f = [0usize, 2];
        let v = tripos_leq(
            &core,
            &tripos_reindex(&f, &fam),
            &tripos_reindex(&f, &fam),
            &Evidence::raw(ev_id()),
            &[],
        );
        assert!(v.passed());
    }
}
