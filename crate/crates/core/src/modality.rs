//! Post-condition modalities: lifting predicates on codes to truth values
//! on computations.
//!
//! `after(m, φ)` reads "after m yields a value x, φ(x) holds". Each
//! shipped effect gets the modality of its realizability model: joins for
//! the partial and angelic readings, termination-guarded meets for the
//! demonic ones, a probe-bounded infimum over future states for the
//! stateful ones, double orthogonality against a pole for continuations,
//! and an intersection over parameters for the reader.
//!
//! Infinite infima over all codes are made exact by the finite-support
//! scheme: base predicates carry an explicit default, so a global infimum
//! is the infimum over the support union, met with the default term. The
//! continuation modality's infimum over all continuations is approximated
//! by the configured dictionary; growing the dictionary only tightens it.

use std::collections::BTreeSet;

use crate::algebra::{Code, Effect, EvalResult, Fuel};
use crate::effects::cps::{CpsComp, CpsEffect, RVal};
use crate::effects::reader::{ReaderComp, ReaderEffect};
use crate::effects::state::{StateComp, StateEffect};
use crate::effects::{PartialComp, PartialEffect, PowerComp, PowerEffect};
use crate::order::{Heyting, StatePred, StatePreds, TwoPoint};

pub mod laws;
pub mod separator;

pub use laws::{
    check_after_bind, check_after_return, check_derived_lemmas, check_internal_monotonicity,
    ModSampleSpec,
};
pub use separator::{check_pole_consistency, check_separator_progress, SeparatorKind, SeparatorSpec};

pub type CompOf<M> = <<M as Modality>::Eff as Effect>::Comp;
pub type ElemOf<M> = <<M as Modality>::Alg as Heyting>::Elem;

/// A predicate on codes, as the modalities consume it: an evaluation
/// function plus the probe codes on which it may deviate from its tail
/// behavior. Only the continuation modality reads the probes; set-like
/// modalities evaluate the function at the codes their computations
/// actually contain.
pub type PredFn<'a, T> = &'a dyn Fn(&Code) -> EvalResult<T>;

/// A finite-support predicate: explicit values on `entries`, `default`
/// everywhere else. The carrier of every exact global infimum.
#[derive(Clone, Debug, PartialEq)]
pub struct FinPred<T: Clone> {
    pub entries: Vec<(Code, T)>,
    pub default: T,
}

impl<T: Clone> FinPred<T> {
    pub fn constant(v: T) -> Self {
        FinPred {
            entries: Vec::new(),
            default: v,
        }
    }

    pub fn eval(&self, c: &Code) -> T {
        self.entries
            .iter()
            .find(|(k, _)| k == c)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| self.default.clone())
    }

    pub fn support(&self) -> Vec<Code> {
        self.entries.iter().map(|(k, _)| k.clone()).collect()
    }

    /// Pointwise image under `f`.
    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> FinPred<U> {
        FinPred {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
            default: f(&self.default),
        }
    }
}

/// Exact global infimum of `implies(φ₁(c), φ₂(c))` over all codes: the
/// support union carries every deviation, the defaults carry the tail.
pub fn global_implication_inf<H: Heyting>(
    alg: &H,
    p1: &FinPred<H::Elem>,
    p2: &FinPred<H::Elem>,
) -> H::Elem {
    let mut support: Vec<Code> = p1.support();
    for c in p2.support() {
        if !support.contains(&c) {
            support.push(c);
        }
    }
    let mut acc = alg.implies(&p1.default, &p2.default);
    for c in &support {
        acc = alg.meet(&acc, &alg.implies(&p1.eval(c), &p2.eval(c)));
    }
    acc
}

/// An M-modality over a fixed effect and Heyting prealgebra.
pub trait Modality: Clone + 'static {
    type Eff: Effect;
    type Alg: Heyting;

    fn name(&self) -> &'static str;
    fn effect(&self) -> &Self::Eff;
    fn algebra(&self) -> &Self::Alg;

    /// `after x ← m. φ(x)`, with `probes` naming the predicate's support
    /// and `budget` metering each run of the computation.
    fn after(
        &self,
        m: &CompOf<Self>,
        phi: PredFn<'_, ElemOf<Self>>,
        probes: &[Code],
        budget: u64,
    ) -> EvalResult<ElemOf<Self>>;

    /// Convenience for finite-support predicates.
    fn after_fin(
        &self,
        m: &CompOf<Self>,
        phi: &FinPred<ElemOf<Self>>,
        budget: u64,
    ) -> EvalResult<ElemOf<Self>> {
        self.after(m, &|c| Ok(phi.eval(c)), &phi.support(), budget)
    }

    /// Whether the computation stays inside this modality's observation
    /// window; a diagnostic for configurations whose predicates need to
    /// distinguish codes produced past the window edge.
    fn within_window(&self, _m: &CompOf<Self>, _budget: u64) -> EvalResult<bool> {
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// Partial
// ---------------------------------------------------------------------------

/// Join over the at-most-one result: the standard PCA modality.
#[derive(Clone, Debug, Default)]
pub struct PartialModality {
    pub eff: PartialEffect,
}

impl Modality for PartialModality {
    type Eff = PartialEffect;
    type Alg = TwoPoint;

    fn name(&self) -> &'static str {
        "partial"
    }

    fn effect(&self) -> &PartialEffect {
        &self.eff
    }

    fn algebra(&self) -> &TwoPoint {
        &TwoPoint
    }

    fn after(
        &self,
        m: &PartialComp,
        phi: PredFn<'_, bool>,
        _probes: &[Code],
        _budget: u64,
    ) -> EvalResult<bool> {
        match m {
            None => Ok(false),
            Some(c) => phi(c),
        }
    }
}

/// The infimum-only reading, with no termination guard. Shipped as a
/// negative control: the diverging code scores `after ⊥` as the empty
/// infimum (top), so no nontrivial algebra admits a separator for it.
#[derive(Clone, Debug, Default)]
pub struct InfOnlyModality {
    pub eff: PartialEffect,
}

impl Modality for InfOnlyModality {
    type Eff = PartialEffect;
    type Alg = TwoPoint;

    fn name(&self) -> &'static str {
        "inf-only"
    }

    fn effect(&self) -> &PartialEffect {
        &self.eff
    }

    fn algebra(&self) -> &TwoPoint {
        &TwoPoint
    }

    fn after(
        &self,
        m: &PartialComp,
        phi: PredFn<'_, bool>,
        _probes: &[Code],
        _budget: u64,
    ) -> EvalResult<bool> {
        match m {
            None => Ok(true), // empty infimum
            Some(c) => phi(c),
        }
    }
}

// ---------------------------------------------------------------------------
// Power
// ---------------------------------------------------------------------------

/// Some branch satisfies the predicate.
#[derive(Clone, Debug, Default)]
pub struct PowerAngelic {
    pub eff: PowerEffect,
}

impl Modality for PowerAngelic {
    type Eff = PowerEffect;
    type Alg = TwoPoint;

    fn name(&self) -> &'static str {
        "power-angelic"
    }

    fn effect(&self) -> &PowerEffect {
        &self.eff
    }

    fn algebra(&self) -> &TwoPoint {
        &TwoPoint
    }

    fn after(
        &self,
        m: &PowerComp,
        phi: PredFn<'_, bool>,
        _probes: &[Code],
        _budget: u64,
    ) -> EvalResult<bool> {
        for c in m {
            if phi(c)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// The demonic reading without the termination conjunct: the empty set
/// scores top. Shipped as the second negative control; a separator
/// containing `#fail` breaks progress under it.
#[derive(Clone, Debug, Default)]
pub struct PowerInfOnly {
    pub eff: PowerEffect,
}

impl Modality for PowerInfOnly {
    type Eff = PowerEffect;
    type Alg = TwoPoint;

    fn name(&self) -> &'static str {
        "power-inf-only"
    }

    fn effect(&self) -> &PowerEffect {
        &self.eff
    }

    fn algebra(&self) -> &TwoPoint {
        &TwoPoint
    }

    fn after(
        &self,
        m: &PowerComp,
        phi: PredFn<'_, bool>,
        _probes: &[Code],
        _budget: u64,
    ) -> EvalResult<bool> {
        for c in m {
            if !phi(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Every branch satisfies the predicate, and at least one branch exists.
/// The termination conjunct `m⇓` is nonemptiness, the weakest choice
/// that lets the full code set separate.
#[derive(Clone, Debug, Default)]
pub struct PowerDemonic {
    pub eff: PowerEffect,
}

impl Modality for PowerDemonic {
    type Eff = PowerEffect;
    type Alg = TwoPoint;

    fn name(&self) -> &'static str {
        "power-demonic"
    }

    fn effect(&self) -> &PowerEffect {
        &self.eff
    }

    fn algebra(&self) -> &TwoPoint {
        &TwoPoint
    }

    fn after(
        &self,
        m: &PowerComp,
        phi: PredFn<'_, bool>,
        _probes: &[Code],
        _budget: u64,
    ) -> EvalResult<bool> {
        if m.is_empty() {
            return Ok(false);
        }
        for c in m {
            if !phi(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

fn state_after(
    eff: &StateEffect,
    per_state: impl Fn(u64) -> EvalResult<bool>,
) -> EvalResult<StatePred> {
    // Evaluate the inner condition at each probe (ascending), then take
    // the infimum over future probes: a suffix conjunction. The window
    // edge persists beyond the last probe, keeping the summary a valid
    // threshold; results are meaningful on the probe window.
    let mut probes: Vec<u64> = eff.probes.as_ref().clone();
    probes.sort_unstable();
    probes.dedup();
    let mut per: Vec<bool> = Vec::with_capacity(probes.len());
    for &s in &probes {
        per.push(per_state(s)?);
    }
    let mut samples: Vec<(u64, bool)> = Vec::with_capacity(per.len());
    let mut suffix = true;
    for i in (0..probes.len()).rev() {
        suffix &= per[i];
        samples.push((probes[i], suffix));
    }
    samples.reverse();
    Ok(StatePreds::from_samples(&samples))
}

/// Whether every transition reachable from the probe states stays inside
/// the probe window; nested modality reads are only meaningful there.
fn state_within_window(eff: &StateEffect, m: &StateComp, budget: u64) -> EvalResult<bool> {
    let max = eff.probes.iter().copied().max().unwrap_or(0);
    for &s in eff.probes.iter() {
        for (s1, _) in m.run_fresh(s, budget)? {
            if s1 > max {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// At every reachable future state, some outcome satisfies the predicate
/// at its result state.
#[derive(Clone, Debug, Default)]
pub struct StateAngelic {
    pub eff: StateEffect,
    pub alg: StatePreds,
}

impl Modality for StateAngelic {
    type Eff = StateEffect;
    type Alg = StatePreds;

    fn name(&self) -> &'static str {
        "state-angelic"
    }

    fn effect(&self) -> &StateEffect {
        &self.eff
    }

    fn algebra(&self) -> &StatePreds {
        &self.alg
    }

    fn after(
        &self,
        m: &StateComp,
        phi: PredFn<'_, StatePred>,
        _probes: &[Code],
        budget: u64,
    ) -> EvalResult<StatePred> {
        state_after(&self.eff, |s1| {
            let mut any = false;
            for (s2, x) in m.run_fresh(s1, budget)? {
                if phi(&x)?.at(s2) {
                    any = true;
                    break;
                }
            }
            Ok(any)
        })
    }

    fn within_window(&self, m: &StateComp, budget: u64) -> EvalResult<bool> {
        state_within_window(&self.eff, m, budget)
    }
}

/// At every reachable future state the computation makes progress and
/// every outcome satisfies the predicate at its result state.
#[derive(Clone, Debug, Default)]
pub struct StateDemonic {
    pub eff: StateEffect,
    pub alg: StatePreds,
}

impl Modality for StateDemonic {
    type Eff = StateEffect;
    type Alg = StatePreds;

    fn name(&self) -> &'static str {
        "state-demonic"
    }

    fn effect(&self) -> &StateEffect {
        &self.eff
    }

    fn algebra(&self) -> &StatePreds {
        &self.alg
    }

    fn after(
        &self,
        m: &StateComp,
        phi: PredFn<'_, StatePred>,
        _probes: &[Code],
        budget: u64,
    ) -> EvalResult<StatePred> {
        state_after(&self.eff, |s1| {
            let outcomes = m.run_fresh(s1, budget)?;
            if outcomes.is_empty() {
                return Ok(false);
            }
            for (s2, x) in outcomes {
                if !phi(&x)?.at(s2) {
                    return Ok(false);
                }
            }
            Ok(true)
        })
    }

    fn within_window(&self, m: &StateComp, budget: u64) -> EvalResult<bool> {
        state_within_window(&self.eff, m, budget)
    }
}

// ---------------------------------------------------------------------------
// Continuations
// ---------------------------------------------------------------------------

/// The pole: the subset of answers considered valid.
#[derive(Clone, Debug)]
pub struct Pole {
    pub tokens: BTreeSet<String>,
    pub all_codes: bool,
    pub codes: BTreeSet<Code>,
}

impl Default for Pole {
    fn default() -> Self {
        Pole {
            tokens: BTreeSet::from(["abort".to_string()]),
            all_codes: false,
            codes: BTreeSet::new(),
        }
    }
}

impl Pole {
    pub fn contains(&self, r: &RVal) -> bool {
        match r {
            RVal::Token(t) => self.tokens.contains(t),
            RVal::Code(c) => self.all_codes || self.codes.contains(c),
        }
    }
}

/// Double orthogonality against the pole: a computation satisfies the
/// predicate when, against every dictionary continuation that sends
/// predicate-satisfying codes into the pole, it lands in the pole itself.
/// The infimum over all continuations is sampled by the dictionary; the
/// infimum over all codes runs over the predicate's support plus one
/// designated default code.
#[derive(Clone)]
pub struct CpsModality {
    pub eff: CpsEffect,
    pub pole: Pole,
    pub default_probe: Code,
}

impl Default for CpsModality {
    fn default() -> Self {
        CpsModality {
            eff: CpsEffect::default(),
            pole: Pole::default(),
            default_probe: crate::effects::church(17),
        }
    }
}

impl Modality for CpsModality {
    type Eff = CpsEffect;
    type Alg = TwoPoint;

    fn name(&self) -> &'static str {
        "cps"
    }

    fn effect(&self) -> &CpsEffect {
        &self.eff
    }

    fn algebra(&self) -> &TwoPoint {
        &TwoPoint
    }

    fn after(
        &self,
        m: &CpsComp,
        phi: PredFn<'_, bool>,
        probes: &[Code],
        budget: u64,
    ) -> EvalResult<bool> {
        let mut inner_probes: Vec<&Code> = probes.iter().collect();
        if !probes.contains(&self.default_probe) {
            inner_probes.push(&self.default_probe);
        }
        for k in self.eff.dict.iter() {
            // ⨅_a (φ(a) ⊐ k⊥a)
            let mut orthogonal = true;
            for a in &inner_probes {
                if phi(a)? && !self.pole.contains(&(k.f)(a, &Fuel::new(budget))?) {
                    orthogonal = false;
                    break;
                }
            }
            if orthogonal && !self.pole.contains(&m.run_fresh(&k.f, budget)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

/// Under every parameter, the fiber yields a value satisfying the
/// predicate. An empty parameter set makes the intersection trivially
/// top; the induced logic is only meaningful when parameters exist.
#[derive(Clone, Debug, Default)]
pub struct ReaderModality {
    pub eff: ReaderEffect,
}

impl ReaderModality {
    /// Flags the degenerate configuration the intersection glosses over.
    pub fn params_nonempty(&self) -> bool {
        !self.eff.params.is_empty()
    }
}

impl Modality for ReaderModality {
    type Eff = ReaderEffect;
    type Alg = TwoPoint;

    fn name(&self) -> &'static str {
        "reader"
    }

    fn effect(&self) -> &ReaderEffect {
        &self.eff
    }

    fn algebra(&self) -> &TwoPoint {
        &TwoPoint
    }

    fn after(
        &self,
        m: &ReaderComp,
        phi: PredFn<'_, bool>,
        _probes: &[Code],
        budget: u64,
    ) -> EvalResult<bool> {
        for p in self.eff.params.iter() {
            let fiber_ok = match m.run_fresh(p, budget)? {
                None => false, // empty join under the intersection
                Some(c) => phi(&c)?,
            };
            if !fiber_ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{apply, eval, PrimCode};
    use crate::effects::{church, select_first};
    use crate::syntax::parse;

    #[test]
    fn partial_modality_joins_over_at_most_one_element() {
        let m = PartialModality::default();
        let top_pred = FinPred::constant(true);
        assert!(m.after_fin(&Some(select_first()), &top_pred, 500).unwrap());
        assert!(!m.after_fin(&None, &top_pred, 500).unwrap());
        // After-Return instance: φ(c) ≤ after(ret c, φ)
        let phi = FinPred {
            entries: vec![(church(1), true)],
            default: false,
        };
        let ret = m.effect().ret(church(1));
        assert!(m.after_fin(&ret, &phi, 500).unwrap());
    }

    #[test]
    fn angelic_and_demonic_split_on_flip() {
        let ang = PowerAngelic::default();
        let dem = PowerDemonic::default();
        let flip_result = eval(&ang.eff, &parse("#flip <1|0>").unwrap(), 100).unwrap();
        // φ true on exactly one branch
        let phi = FinPred {
            entries: vec![(select_first(), true)],
            default: false,
        };
        assert!(ang.after_fin(&flip_result, &phi, 500).unwrap());
        assert!(!dem.after_fin(&flip_result, &phi, 500).unwrap());
    }

    #[test]
    fn demonic_of_empty_is_bottom_inf_only_is_top() {
        let dem = PowerDemonic::default();
        let empty = eval(&dem.eff, &parse("#fail <1|0>").unwrap(), 100).unwrap();
        assert!(!dem.after_fin(&empty, &FinPred::constant(true), 500).unwrap());

        crate::with_deep_stack(|| {
            let inf_only = InfOnlyModality {
                eff: PartialEffect {
                    timeout_as_bottom: true,
                },
            };
            let diverged =
                apply(&inf_only.eff, &crate::algebra::looping_code(), &church(0), 200).unwrap();
            assert_eq!(diverged, None);
            // after x ← ∅. ⊥ = ⊤: the entailment the separator exists to block
            assert!(inf_only
                .after_fin(&diverged, &FinPred::constant(false), 500)
                .unwrap());
        });
    }

    #[test]
    fn state_angelic_counter_example() {
        // inc·c from σ=0, φ = "counter ≥ 1"
        let sa = StateAngelic::default();
        let m = eval(&sa.eff, &parse("#inc <1|0>").unwrap(), 100).unwrap();
        let phi = FinPred::constant(StatePred::From(1));
        let got = sa.after_fin(&m, &phi, 500).unwrap();
        assert!(got.at(0), "holds at σ=0: the single outcome lands at 1");
        // future-stable by construction
        assert!(got.at(5));
    }

    #[test]
    fn state_demonic_rejects_empty_transitions() {
        let sd = StateDemonic::default();
        let empty = StateComp::new(|_, _| Ok(BTreeSet::new()));
        let got = sd.after_fin(&empty, &FinPred::constant(StatePred::From(0)), 500).unwrap();
        assert_eq!(got, StatePred::Never);
        assert!(!got.at(0));
        assert!(!got.at(100));
    }

    #[test]
    fn cps_after_return_against_default_pole() {
        let cm = CpsModality::default();
        let c = church(2);
        let phi = FinPred {
            entries: vec![(c.clone(), true)],
            default: false,
        };
        let ret = cm.effect().ret(c);
        assert!(cm.after_fin(&ret, &phi, 500).unwrap());
    }

    #[test]
    fn cps_captured_pole_continuation_realizes_bottom() {
        // K_k for a pole-hitting k certifies ⊥ of anything: the reason
        // evidence is restricted to proof-like codes.
        let cm = CpsModality::default();
        let aborter = cm.eff.dict[1].f.clone();
        let kk = cm.eff.capture(aborter);
        let m = apply(&cm.eff, &kk, &church(0), 100).unwrap();
        let bot = FinPred::constant(false);
        assert!(cm.after_fin(&m, &bot, 500).unwrap());
    }

    #[test]
    fn reader_search_satisfies_numeral_predicate() {
        let rm = ReaderModality::default();
        let m = eval(&rm.eff, &parse("#search <1|0>").unwrap(), 100).unwrap();
        // φ true of both selectors
        let phi = FinPred {
            entries: vec![(select_first(), true), (crate::effects::select_second(), true)],
            default: false,
        };
        assert!(rm.after_fin(&m, &phi, 500).unwrap());
        // one empty fiber forces bottom
        let empty_fiber = ReaderComp::new(|p, _| {
            Ok(if p.name == "p0" { None } else { Some(select_first()) })
        });
        assert!(!rm.after_fin(&empty_fiber, &FinPred::constant(true), 500).unwrap());
    }

    #[test]
    fn reader_with_one_parameter_degenerates_to_partial() {
        use crate::effects::reader::ParamPred;
        let rm = ReaderModality {
            eff: ReaderEffect::with_params(vec![ParamPred::new("only", vec![], false)]),
        };
        let pm = PartialModality::default();
        let phi = FinPred {
            entries: vec![(church(0), true)],
            default: false,
        };
        for src in ["<0|0> <1|1>", "<1|0> <1|1>", "#search <1|0>"] {
            let e = parse(src).unwrap();
            let mr = eval(&rm.eff, &e, 100).unwrap();
            let fiber = mr.run_fresh(&rm.eff.params[0], 100).unwrap();
            let mp: PartialComp = fiber;
            assert_eq!(
                rm.after_fin(&mr, &phi, 500).unwrap(),
                pm.after_fin(&mp, &phi, 500).unwrap(),
                "{src}"
            );
        }
    }

    #[test]
    fn flip_is_independent_of_its_argument() {
        let eff = PowerEffect::default();
        let flip = Code::Prim(PrimCode::Flip);
        let a = apply(&eff, &flip, &church(0), 10).unwrap();
        let b = apply(&eff, &flip, &select_first(), 10).unwrap();
        assert!(eff.eq_comp(&a, &b, 100).unwrap());
    }
}
