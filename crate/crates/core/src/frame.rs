//! Propositions over codes, evidence, and the evidenced-frame structure
//! induced by a monadic core.
//!
//! A proposition is an evaluable AST: finite-support base predicates,
//! top, bottom, conjunction, and universal implication over a finite
//! family. Conjunction and implication evaluate through the modality by
//! the frame formulas, so every proposition denotes a function from
//! codes to truth values.
//!
//! Evidence is a separator member; the ternary relation `φ₁ →_e φ₂`
//! holds when every code in φ₁ is mapped by `e` into a computation that,
//! after it yields, lands in φ₂. The universal quantifier over codes is
//! exact for base propositions with bottom default (deviations live in
//! the support, the tail is vacuous) and probe-sampled otherwise; each
//! verdict records which of the two it was.

use std::fmt;
use std::rc::Rc;

use crate::algebra::{apply, Code, Effect, EvalError, EvalResult};
use crate::effects::{select_first, select_second};
use crate::gen::{canonical_codes, gen_closure, Rng};
use crate::modality::{CompOf, ElemOf, FinPred, Modality, SeparatorSpec};
use crate::order::Heyting;
use crate::report::Outcome;
use crate::syntax::Expr;

pub mod laws;
pub mod tripos;

pub use laws::{check_consistency, check_ef_laws, FrameSampleSpec};
pub use tripos::{check_tripos_laws, tripos_leq, tripos_reindex, Fam};

// ---------------------------------------------------------------------------
// Propositions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum Prop<T: Clone> {
    /// Finite-support predicate: explicit values plus a default tail.
    Base(FinPred<T>),
    Top,
    Bot,
    /// `(φ₁ ∧ φ₂)(e) = after(e·p̂₁, φ₁) ⊓ after(e·p̂₂, φ₂)`.
    Conj(Rc<Prop<T>>, Rc<Prop<T>>),
    /// `(φ ⊃ F)(e) = ⨅_{ψ∈F} ⨅_c (φ(c) ⊐ after(e·c, ψ))`.
    UImpl(Rc<Prop<T>>, Vec<Rc<Prop<T>>>),
}

impl<T: Clone> Prop<T> {
    pub fn base(entries: Vec<(Code, T)>, default: T) -> Rc<Prop<T>> {
        Rc::new(Prop::Base(FinPred { entries, default }))
    }

    pub fn top() -> Rc<Prop<T>> {
        Rc::new(Prop::Top)
    }

    pub fn bot() -> Rc<Prop<T>> {
        Rc::new(Prop::Bot)
    }

    pub fn conj(p1: Rc<Prop<T>>, p2: Rc<Prop<T>>) -> Rc<Prop<T>> {
        Rc::new(Prop::Conj(p1, p2))
    }

    pub fn uimpl(p: Rc<Prop<T>>, family: Vec<Rc<Prop<T>>>) -> Rc<Prop<T>> {
        Rc::new(Prop::UImpl(p, family))
    }

    /// Support codes of every base node reachable in the AST.
    pub fn collect_support(&self, out: &mut Vec<Code>) {
        match self {
            Prop::Base(fp) => {
                for c in fp.support() {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
            Prop::Top | Prop::Bot => {}
            Prop::Conj(a, b) => {
                a.collect_support(out);
                b.collect_support(out);
            }
            Prop::UImpl(p, fam) => {
                p.collect_support(out);
                for q in fam {
                    q.collect_support(out);
                }
            }
        }
    }
}

impl<T: Clone + fmt::Debug> fmt::Display for Prop<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Base(fp) => {
                write!(f, "base{{")?;
                for (i, (c, v)) in fp.entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}: {v:?}")?;
                }
                write!(f, "; default {:?}}}", fp.default)
            }
            Prop::Top => write!(f, "top"),
            Prop::Bot => write!(f, "bot"),
            Prop::Conj(a, b) => write!(f, "conj({a}, {b})"),
            Prop::UImpl(p, fam) => {
                write!(f, "uimpl({p}, [")?;
                for (i, q) in fam.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{q}")?;
                }
                write!(f, "])")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Evidence builders — the proof-sketch closures, verbatim
// ---------------------------------------------------------------------------

/// `p̂₁ = ⟨λ¹.0⟩`: sent to a pair code, projects the first component.
pub fn proj1_code() -> Code {
    select_first()
}

/// `p̂₂ = ⟨λ¹.1⟩`.
pub fn proj2_code() -> Code {
    select_second()
}

/// `⟨λ⁰.0 c₁ c₂⟩`: the pair of two codes.
pub fn tuple_code(c1: &Code, c2: &Code) -> Code {
    Code::closure_unchecked(
        0,
        Expr::apps(Expr::Var(0), [Expr::lit(c1.clone()), Expr::lit(c2.clone())]),
    )
}

/// Reflexivity evidence `⟨λ⁰.0⟩`.
pub fn ev_id() -> Code {
    Code::closure_unchecked(0, Expr::Var(0))
}

/// Transitivity evidence `⟨λ⁰.e₂ (e₁ 0)⟩`: run `e₁`, then `e₂`.
pub fn ev_comp(e1: &Code, e2: &Code) -> Code {
    Code::closure_unchecked(
        0,
        Expr::app(
            Expr::lit(e2.clone()),
            Expr::app(Expr::lit(e1.clone()), Expr::Var(0)),
        ),
    )
}

/// Top-introduction evidence.
pub fn ev_top() -> Code {
    ev_id()
}

/// Pairing evidence `⟨λ¹.1 (e₁ 0) (e₂ 0)⟩`.
pub fn ev_pair(e1: &Code, e2: &Code) -> Code {
    Code::closure_unchecked(
        1,
        Expr::apps(
            Expr::Var(1),
            [
                Expr::app(Expr::lit(e1.clone()), Expr::Var(0)),
                Expr::app(Expr::lit(e2.clone()), Expr::Var(0)),
            ],
        ),
    )
}

/// First projection evidence `⟨λ⁰.0 p̂₁⟩`.
pub fn ev_fst() -> Code {
    Code::closure_unchecked(0, Expr::app(Expr::Var(0), Expr::lit(proj1_code())))
}

/// Second projection evidence `⟨λ⁰.0 p̂₂⟩`.
pub fn ev_snd() -> Code {
    Code::closure_unchecked(0, Expr::app(Expr::Var(0), Expr::lit(proj2_code())))
}

/// Currying evidence `⟨λ¹.e (⟨λ².2 0 1⟩ 0 1)⟩`: feeds `e` the pair of
/// the two collected arguments.
pub fn ev_curry(e: &Code) -> Code {
    let tupler = Code::closure_unchecked(
        2,
        Expr::apps(Expr::Var(2), [Expr::Var(0), Expr::Var(1)]),
    );
    Code::closure_unchecked(
        1,
        Expr::app(
            Expr::lit(e.clone()),
            Expr::apps(Expr::lit(tupler), [Expr::Var(0), Expr::Var(1)]),
        ),
    )
}

/// Uncurrying evidence `⟨λ⁰.e (0 p̂₁) (0 p̂₂)⟩`.
pub fn ev_uncurry(e: &Code) -> Code {
    Code::closure_unchecked(
        0,
        Expr::apps(
            Expr::lit(e.clone()),
            [
                Expr::app(Expr::Var(0), Expr::lit(proj1_code())),
                Expr::app(Expr::Var(0), Expr::lit(proj2_code())),
            ],
        ),
    )
}

/// Implication-elimination evidence; structurally `ev_uncurry(ev_id())`.
pub fn ev_eval() -> Code {
    ev_uncurry(&ev_id())
}

// ---------------------------------------------------------------------------
// The monadic core and proposition evaluation
// ---------------------------------------------------------------------------

/// An effect, its modality and algebra, a separator, and a fuel budget:
/// everything the realizability constructions need.
#[derive(Clone)]
pub struct Core<M: Modality> {
    pub modality: M,
    pub separator: SeparatorSpec,
    pub fuel: u64,
    /// Probe witness standing in for the tail of a quantifier over all
    /// codes: a code no generated support contains.
    pub witness: Code,
}

impl<M: Modality> Core<M> {
    pub fn new(modality: M, separator: SeparatorSpec, fuel: u64) -> Self {
        Core {
            modality,
            separator,
            fuel,
            witness: crate::effects::church(19),
        }
    }

    pub fn effect(&self) -> &M::Eff {
        self.modality.effect()
    }

    pub fn alg(&self) -> &M::Alg {
        self.modality.algebra()
    }

    /// Evaluate a proposition at a code.
    pub fn prop_eval(&self, p: &Prop<ElemOf<M>>, c: &Code) -> EvalResult<ElemOf<M>> {
        match p {
            Prop::Base(fp) => Ok(fp.eval(c)),
            Prop::Top => Ok(self.alg().top()),
            Prop::Bot => Ok(self.alg().bottom()),
            Prop::Conj(p1, p2) => {
                let a = self.after_applied(c, &proj1_code(), p1)?;
                let b = self.after_applied(c, &proj2_code(), p2)?;
                Ok(self.alg().meet(&a, &b))
            }
            Prop::UImpl(ante, family) => {
                let probes = self.quantifier_probes(ante);
                let mut acc = self.alg().top();
                for psi in family {
                    for q in &probes {
                        let lhs = self.prop_eval(ante, q)?;
                        let rhs = self.after_applied(c, q, psi)?;
                        acc = self.alg().meet(&acc, &self.alg().implies(&lhs, &rhs));
                    }
                }
                Ok(acc)
            }
        }
    }

    /// `after r ← (c · arg). ψ(r)`.
    fn after_applied(
        &self,
        c: &Code,
        arg: &Code,
        psi: &Prop<ElemOf<M>>,
    ) -> EvalResult<ElemOf<M>> {
        let m = apply(self.effect(), c, arg, self.fuel)?;
        self.after_prop(&m, psi)
    }

    /// `after r ← m. ψ(r)`.
    pub fn after_prop(&self, m: &CompOf<M>, psi: &Prop<ElemOf<M>>) -> EvalResult<ElemOf<M>> {
        let mut probes = Vec::new();
        psi.collect_support(&mut probes);
        self.modality
            .after(m, &|x| self.prop_eval(psi, x), &probes, self.fuel)
    }

    /// Codes a `∀c` over the antecedent ranges over: the full support
    /// plus the designated witness; exact when the antecedent is a base
    /// proposition with bottom default (the tail is then vacuous).
    fn quantifier_probes(&self, p: &Prop<ElemOf<M>>) -> Vec<Code> {
        let mut probes = Vec::new();
        p.collect_support(&mut probes);
        if !matches!(p, Prop::Base(_)) {
            for c in canonical_codes() {
                if !probes.contains(&c) {
                    probes.push(c);
                }
            }
        }
        if !probes.contains(&self.witness) {
            probes.push(self.witness.clone());
        }
        probes
    }

    fn quantifier_is_exact(&self, p: &Prop<ElemOf<M>>) -> bool {
        match p {
            Prop::Base(fp) => self.alg().leq(&fp.default, &self.alg().bottom()),
            Prop::Bot => true,
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Evidence and the evidence relation
// ---------------------------------------------------------------------------

/// A code admitted as evidence: a member of the core's separator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evidence {
    pub code: Code,
}

#[derive(Clone, Debug)]
pub struct NotInSeparator(pub Code);

impl fmt::Display for NotInSeparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "code {} is not a separator member", self.0)
    }
}

impl std::error::Error for NotInSeparator {}

impl Evidence {
    pub fn new(sep: &SeparatorSpec, code: Code) -> Result<Evidence, NotInSeparator> {
        if sep.membership(&code) {
            Ok(Evidence { code })
        } else {
            Err(NotInSeparator(code))
        }
    }

    /// Admit an arbitrary code without the separator check. Unsafe in
    /// the logical sense: verdicts obtained with it say nothing about
    /// the induced frame.
    pub fn raw(code: Code) -> Evidence {
        Evidence { code }
    }
}

/// Outcome of an evidence-relation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The `∀c` was decided exactly.
    ExactPass,
    /// Held on every probe; a larger probe set could still refute it.
    SampledPass,
    Fail(String),
    /// Fuel ran out before a verdict.
    Indeterminate(String),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::ExactPass | Verdict::SampledPass)
    }

    pub fn outcome(&self) -> Outcome {
        match self {
            Verdict::ExactPass => Outcome::Pass,
            Verdict::SampledPass => Outcome::PassSampled,
            Verdict::Fail(w) => Outcome::Fail(w.clone()),
            Verdict::Indeterminate(w) => Outcome::Indeterminate(w.clone()),
        }
    }
}

/// Check `φ₁ →_e φ₂`: for all codes `c`, `φ₁(c) ≤ after(e·c, φ₂)`.
pub fn check_evidence<M: Modality>(
    core: &Core<M>,
    p1: &Prop<ElemOf<M>>,
    e: &Evidence,
    p2: &Prop<ElemOf<M>>,
    user_probes: &[Code],
) -> Verdict {
    let mut probes = core.quantifier_probes(p1);
    for c in user_probes {
        if !probes.contains(c) {
            probes.push(c.clone());
        }
    }
    for c in &probes {
        let lhs = match core.prop_eval(p1, c) {
            Ok(v) => v,
            Err(EvalError::FuelExhausted) => {
                return Verdict::Indeterminate(format!("φ₁ at {c}"))
            }
            Err(err) => return Verdict::Fail(format!("φ₁ at {c}: {err}")),
        };
        // skip trivially-satisfied probes cheaply
        if core.alg().leq(&lhs, &core.alg().bottom()) {
            continue;
        }
        let rhs = match apply(core.effect(), &e.code, c, core.fuel)
            .and_then(|m| core.after_prop(&m, p2))
        {
            Ok(v) => v,
            Err(EvalError::FuelExhausted) => {
                return Verdict::Indeterminate(format!("after {} · {c}", e.code))
            }
            Err(err) => return Verdict::Fail(format!("after {} · {c}: {err}", e.code)),
        };
        if !core.alg().leq(&lhs, &rhs) {
            return Verdict::Fail(format!(
                "c={c}: φ₁(c)={} ⋠ after={}",
                core.alg().render(&lhs),
                core.alg().render(&rhs)
            ));
        }
    }
    if core.quantifier_is_exact(p1) {
        Verdict::ExactPass
    } else {
        Verdict::SampledPass
    }
}

/// Convenience: random base proposition with bottom default, so that
/// evidence checks against it are exact. Support codes come from the
/// pool when one is given; a divergent support code would make every
/// verdict that probes it indeterminate.
pub fn gen_base_prop<M: Modality>(
    core: &Core<M>,
    rng: &mut Rng,
    pool: &[Code],
) -> Rc<Prop<ElemOf<M>>> {
    let elems = core.alg().elements();
    let k = 1 + rng.below(3) as usize;
    let mut entries: Vec<(Code, ElemOf<M>)> = Vec::new();
    for _ in 0..k {
        let c = if pool.is_empty() {
            gen_closure(rng, 2, &[])
        } else {
            rng.pick(pool).clone()
        };
        if entries.iter().any(|(q, _)| *q == c) {
            continue;
        }
        let v = rng.pick(&elems).clone();
        entries.push((c, v));
    }
    Prop::base(entries, core.alg().bottom())
}

/// Whether a code can serve as law-suite probe material: applying it to
/// the canonical projections terminates on every observation point.
pub fn observation_tame<M: Modality>(core: &Core<M>, c: &Code) -> bool {
    let budget = core.fuel.min(800);
    for arg in [proj1_code(), proj2_code(), core.witness.clone()] {
        if !application_terminates(core, c, &arg, budget) {
            return false;
        }
    }
    true
}

fn application_terminates<M: Modality>(core: &Core<M>, f: &Code, a: &Code, budget: u64) -> bool {
    match apply(core.effect(), f, a, budget) {
        Ok(m) => core.effect().observe(&m, budget).is_ok(),
        Err(_) => false,
    }
}

/// Greedily select a pool whose members terminate under application to
/// each other (in both orders, and to themselves) on every observation
/// point. Law instances built over such a pool stay decidable instead
/// of drowning in honest-but-uninformative fuel verdicts.
pub fn mutually_tame_pool<M: Modality>(core: &Core<M>, candidates: Vec<Code>, cap: usize) -> Vec<Code> {
    let budget = core.fuel.min(800);
    let mut kept: Vec<Code> = Vec::new();
    'candidates: for c in candidates {
        if !observation_tame(core, &c) || !application_terminates(core, &c, &c, budget) {
            continue;
        }
        for d in &kept {
            if !application_terminates(core, &c, d, budget)
                || !application_terminates(core, d, &c, budget)
            {
                continue 'candidates;
            }
        }
        kept.push(c);
        if kept.len() >= cap {
            break;
        }
    }
    kept
}
