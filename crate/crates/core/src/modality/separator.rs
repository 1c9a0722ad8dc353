//! Separators: the combinatory-complete pools of legal evidence, with the
//! progress check that keeps the induced logic consistent.

use crate::algebra::{apply, eval, Code, Effect, EvalError, PrimCode};
use crate::gen::{canonical_codes, gen_closure, Rng};
use crate::modality::{CpsModality, FinPred, Modality};
use crate::order::Heyting;
use crate::report::{LawItem, LawReport, Outcome};
use crate::syntax::Expr;

#[derive(Clone, Debug)]
pub enum SeparatorKind {
    /// Every code, including captured continuations.
    All,
    /// Pure closures only.
    Pure,
    /// Pure closures plus the listed primitives.
    PureWith(Vec<PrimCode>),
    /// Proof-like codes: pure closures extended with `#cc`. The CPS
    /// separator.
    ProofLike,
}

#[derive(Clone, Debug)]
pub struct SeparatorSpec {
    pub kind: SeparatorKind,
}

impl SeparatorSpec {
    pub fn all() -> Self {
        SeparatorSpec {
            kind: SeparatorKind::All,
        }
    }

    pub fn pure() -> Self {
        SeparatorSpec {
            kind: SeparatorKind::Pure,
        }
    }

    pub fn pure_with(prims: Vec<PrimCode>) -> Self {
        SeparatorSpec {
            kind: SeparatorKind::PureWith(prims),
        }
    }

    pub fn proof_like() -> Self {
        SeparatorSpec {
            kind: SeparatorKind::ProofLike,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SeparatorKind::All => "all".to_string(),
            SeparatorKind::Pure => "pure".to_string(),
            SeparatorKind::ProofLike => "pl".to_string(),
            SeparatorKind::PureWith(ps) => {
                let names: Vec<&str> = ps.iter().map(|p| p.name()).collect();
                format!("pure+{}", names.join("+"))
            }
        }
    }

    fn allowed_prims(&self) -> Vec<PrimCode> {
        match &self.kind {
            SeparatorKind::All => Vec::new(),
            SeparatorKind::Pure => Vec::new(),
            SeparatorKind::PureWith(ps) => ps.clone(),
            SeparatorKind::ProofLike => vec![PrimCode::Cc],
        }
    }

    pub fn membership(&self, c: &Code) -> bool {
        match &self.kind {
            SeparatorKind::All => true,
            _ => built_from(c, &self.allowed_prims()),
        }
    }

    /// Deterministically generate member codes: canonical combinators,
    /// the designated primitives, random closures over them, compositions
    /// of earlier members, and whatever `extras` the caller supplies
    /// (filtered by membership). The diverging code is always included
    /// when it is a member; it is the critical progress witness.
    pub fn generate(&self, seed: u64, budget: usize, extras: &[Code]) -> Vec<Code> {
        let mut rng = Rng::new(seed);
        let mut out: Vec<Code> = Vec::new();
        let push = |out: &mut Vec<Code>, c: Code| {
            if !out.contains(&c) {
                out.push(c);
            }
        };

        for c in canonical_codes() {
            if self.membership(&c) {
                push(&mut out, c);
            }
        }
        let looping = crate::algebra::looping_code();
        if self.membership(&looping) {
            push(&mut out, looping);
        }
        for p in self.allowed_prims() {
            push(&mut out, Code::Prim(p));
        }
        for c in extras {
            if self.membership(c) {
                push(&mut out, c.clone());
            }
        }

        let prim_pool: Vec<Code> = self
            .allowed_prims()
            .into_iter()
            .map(Code::Prim)
            .chain(extras.iter().filter(|c| self.membership(c)).cloned())
            .collect();
        while out.len() < budget.saturating_sub(budget / 4) {
            let c = gen_closure(&mut rng, 3, &prim_pool);
            if self.membership(&c) {
                push(&mut out, c);
            }
        }
        // close under a round of composition: ⟨λ⁰.e₂ (e₁ 0)⟩
        let base = out.clone();
        while out.len() < budget && base.len() >= 2 {
            let e1 = rng.pick(&base).clone();
            let e2 = rng.pick(&base).clone();
            let comp = Code::closure_unchecked(
                0,
                Expr::app(Expr::lit(e2), Expr::app(Expr::lit(e1), Expr::Var(0))),
            );
            push(&mut out, comp);
        }
        out.truncate(budget);
        out
    }
}

fn built_from(c: &Code, allowed: &[PrimCode]) -> bool {
    match c {
        Code::Closure(_, body) => expr_built_from(body, allowed),
        Code::Prim(p) => allowed.contains(p),
    }
}

fn expr_built_from(e: &Expr, allowed: &[PrimCode]) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Lit(c) => built_from(c, allowed),
        Expr::App(f, a) => expr_built_from(f, allowed) && expr_built_from(a, allowed),
    }
}

/// Progress: for all members `c_f, c_a`, `after(c_f · c_a, const ⊥) ≤ ⊥`.
/// Fuel exhaustion on a pair is indeterminate — divergence cannot be
/// told apart from a short budget without the timeout approximation.
pub fn check_separator_progress<M: Modality>(
    moda: &M,
    sep: &SeparatorSpec,
    budget: usize,
    seed: u64,
    fuel: u64,
    extras: &[Code],
) -> LawReport {
    let mut report = LawReport::new(format!("progress[{} sep={}]", moda.name(), sep.name()));
    let mut item = LawItem::new("progress");
    let members = sep.generate(seed, budget, extras);
    let mut rng = Rng::new(seed.wrapping_add(7));
    let bot = FinPred::constant(moda.algebra().bottom());

    for cf in &members {
        for _ in 0..3.min(members.len()) {
            let ca = rng.pick(&members);
            match apply(moda.effect(), cf, ca, fuel) {
                Ok(m) => match moda.after_fin(&m, &bot, fuel) {
                    Ok(v) => {
                        let ok = moda.algebra().leq(&v, &moda.algebra().bottom());
                        item.record_bool(ok, || {
                            format!("{cf} · {ca}: after ⊥ = {}", moda.algebra().render(&v))
                        });
                    }
                    Err(EvalError::FuelExhausted) => {
                        item.record(Outcome::Indeterminate(format!("{cf} · {ca}")))
                    }
                    Err(e) => item.record(Outcome::Fail(format!("{cf} · {ca}: {e}"))),
                },
                Err(EvalError::FuelExhausted) => {
                    item.record(Outcome::Indeterminate(format!("{cf} · {ca}")))
                }
                Err(e) => item.record(Outcome::Fail(format!("{cf} · {ca}: {e}"))),
            }
        }
    }
    report.push(item);
    report
}

/// Pole consistency: every generated proof-like computation escapes the
/// pole under some dictionary continuation. When this fails, the CPS
/// frame tests must be skipped, not silently run.
pub fn check_pole_consistency(
    moda: &CpsModality,
    sep: &SeparatorSpec,
    budget: usize,
    seed: u64,
    fuel: u64,
) -> LawReport {
    let mut report = LawReport::new(format!("pole-consistency[sep={}]", sep.name()));
    let mut item = LawItem::new("pole-consistency");
    let members = sep.generate(seed, budget, &[]);
    let mut rng = Rng::new(seed.wrapping_add(13));

    let check_comp = |item: &mut LawItem, label: String, m: &crate::effects::CpsComp| {
        let mut escaped = false;
        let mut fuel_hit = false;
        for k in moda.eff.dict.iter() {
            match m.run_fresh(&k.f, fuel) {
                Ok(r) => {
                    if !moda.pole.contains(&r) {
                        escaped = true;
                        break;
                    }
                }
                Err(EvalError::FuelExhausted) => fuel_hit = true,
                Err(_) => {}
            }
        }
        if escaped {
            item.record(Outcome::Pass);
        } else if fuel_hit {
            item.record(Outcome::Indeterminate(label));
        } else {
            item.record(Outcome::Fail(label));
        }
    };

    for c in &members {
        let m = moda.eff.ret(c.clone());
        check_comp(&mut item, format!("ret {c}"), &m);
    }
    for _ in 0..members.len() {
        let cf = rng.pick(&members);
        let ca = rng.pick(&members);
        if let Ok(m) = apply(&moda.eff, cf, ca, fuel) {
            check_comp(&mut item, format!("{cf} · {ca}"), &m);
        }
    }
    report.push(item);
    report
}

/// Evaluate a closed pure term in the CPS effect and check whether some
/// dictionary continuation sees it outside the pole; a helper for pole
/// diagnostics.
pub fn escapes_pole(moda: &CpsModality, e: &Expr, fuel: u64) -> Result<bool, EvalError> {
    let m = eval(&moda.eff, e, fuel)?;
    for k in moda.eff.dict.iter() {
        match m.run_fresh(&k.f, fuel) {
            Ok(r) if !moda.pole.contains(&r) => return Ok(true),
            Ok(_) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::cps::{DictCont, RVal};

    #[test]
    fn membership_distinguishes_pure_pl_and_primitive_codes() {
        let pure = SeparatorSpec::pure();
        let pl = SeparatorSpec::proof_like();
        let cc = Code::Prim(PrimCode::Cc);
        let fail = Code::Prim(PrimCode::Fail);
        let id = Code::closure_unchecked(0, Expr::Var(0));
        let with_cc = Code::closure_unchecked(0, Expr::app(Expr::lit(cc.clone()), Expr::Var(0)));

        assert!(pure.membership(&id));
        assert!(!pure.membership(&cc));
        assert!(!pure.membership(&with_cc));
        assert!(pl.membership(&id));
        assert!(pl.membership(&cc));
        assert!(pl.membership(&with_cc));
        assert!(!pl.membership(&fail));
        assert!(SeparatorSpec::all().membership(&fail));
    }

    #[test]
    fn fail_not_in_default_power_separator() {
        let sep = SeparatorSpec::pure_with(vec![PrimCode::Flip]);
        assert!(!sep.membership(&Code::Prim(PrimCode::Fail)));
        assert!(sep.membership(&Code::Prim(PrimCode::Flip)));
    }

    #[test]
    fn generation_is_deterministic_and_members_are_members() {
        let sep = SeparatorSpec::proof_like();
        let a = sep.generate(42, 50, &[]);
        let b = sep.generate(42, 50, &[]);
        assert_eq!(a, b);
        assert!(a.len() >= 40);
        for c in &a {
            assert!(sep.membership(c), "{c}");
        }
    }

    #[test]
    fn default_pole_is_consistent_for_proof_like_codes() {
        crate::with_deep_stack(|| {
            let moda = CpsModality::default();
            let report = check_pole_consistency(&moda, &SeparatorSpec::proof_like(), 60, 9, 2_000);
            assert!(report.passed(), "{report}");
        });
    }

    #[test]
    fn all_codes_pole_is_inconsistent() {
        crate::with_deep_stack(|| {
            // with every code in the pole, nothing escapes
            let moda = CpsModality {
                pole: crate::modality::Pole {
                    tokens: std::collections::BTreeSet::from(["abort".to_string()]),
                    all_codes: true,
                    codes: Default::default(),
                },
                ..CpsModality::default()
            };
            let report = check_pole_consistency(&moda, &SeparatorSpec::proof_like(), 30, 9, 2_000);
            assert!(!report.passed());
        });
    }

    #[test]
    fn captured_pole_continuation_breaks_progress_for_all_separator() {
        crate::with_deep_stack(|| {
            let moda = CpsModality::default();
            let aborter = moda.eff.dict[1].f.clone();
            let kk = moda.eff.capture(aborter);
            let report = check_separator_progress(
                &moda,
                &SeparatorSpec::all(),
                40,
                3,
                2_000,
                &[kk],
            );
            assert!(!report.passed(), "{report}");
        });
    }

    #[test]
    fn progress_holds_for_pl_separator_under_default_pole() {
        crate::with_deep_stack(|| {
            let moda = CpsModality::default();
            let report =
                check_separator_progress(&moda, &SeparatorSpec::proof_like(), 40, 3, 2_000, &[]);
            assert!(report.passed(), "{report}");
        });
    }

    #[test]
    fn dict_table_continuation_constructor_works() {
        let k = DictCont::table(
            "t",
            vec![(Code::closure_unchecked(0, Expr::Var(0)), "hit".to_string())],
        );
        let fuel = crate::algebra::Fuel::new(10);
        let id = Code::closure_unchecked(0, Expr::Var(0));
        assert_eq!((k.f)(&id, &fuel).unwrap(), RVal::Token("hit".to_string()));
        let other = crate::effects::church(1);
        assert_eq!((k.f)(&other, &fuel).unwrap(), RVal::Code(other.clone()));
    }
}
