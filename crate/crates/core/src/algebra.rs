//! Codes, effect-parameterized application, and call-by-value evaluation.
//!
//! A code is a closure `⟨λⁿ.e⟩` over an open expression or an effect
//! primitive. Application is Kleisli: it returns a computation in the
//! chosen effect. Evaluation runs function first, then argument, then
//! application, connecting the two through the effect's `bind`.
//!
//! Both `eval` and `apply` carry an explicit fuel budget, decremented on
//! each beta step (a nullary closure meeting its last argument).
//! Exhaustion is a distinct outcome, never an effect value: a diverging
//! term is reported as out of budget rather than silently empty.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use crate::effects::cps::CapturedCont;
use crate::machine::CapturedStack;
use crate::syntax::{scope_check, subst, Expr, ScopeViolation};

pub mod bracket;
pub mod laws;

/// A code: the closure of an open expression, or an effect primitive.
#[derive(Clone)]
pub enum Code {
    /// `⟨λⁿ.e⟩` with body in `E_{n+1}`: accepts `n+1` arguments, the last
    /// of which triggers evaluation of the closed body.
    Closure(u32, Rc<Expr>),
    Prim(PrimCode),
}

/// Effect primitives. The named ones are interpreted by their effect's
/// `apply_prim`; captured continuations and stacks are created during
/// evaluation and compare by fresh id, since neither is extensionally
/// comparable.
#[derive(Clone)]
pub enum PrimCode {
    Flip,
    Fail,
    Get,
    Inc,
    Cc,
    Search,
    /// `K_u`: a continuation captured by the CPS evaluator.
    Cont(CapturedCont),
    /// `k_π`: a stack captured by the abstract machine.
    StackK(CapturedStack),
}

impl PrimCode {
    pub fn name(&self) -> &'static str {
        match self {
            PrimCode::Flip => "flip",
            PrimCode::Fail => "fail",
            PrimCode::Get => "get",
            PrimCode::Inc => "inc",
            PrimCode::Cc => "cc",
            PrimCode::Search => "search",
            PrimCode::Cont(_) => "k",
            PrimCode::StackK(_) => "k",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            PrimCode::Flip => 0,
            PrimCode::Fail => 1,
            PrimCode::Get => 2,
            PrimCode::Inc => 3,
            PrimCode::Cc => 4,
            PrimCode::Search => 5,
            PrimCode::Cont(_) => 6,
            PrimCode::StackK(_) => 7,
        }
    }

    fn id(&self) -> u64 {
        match self {
            PrimCode::Cont(c) => c.id,
            PrimCode::StackK(s) => s.id,
            _ => 0,
        }
    }
}

impl PartialEq for PrimCode {
    fn eq(&self, other: &Self) -> bool {
        self.rank() == other.rank() && self.id() == other.id()
    }
}

impl Eq for PrimCode {}

impl PartialOrd for PrimCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimCode {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rank(), self.id()).cmp(&(other.rank(), other.id()))
    }
}

impl fmt::Debug for PrimCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PrimCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimCode::Cont(c) => write!(f, "#k:{}", c.id),
            PrimCode::StackK(s) => write!(f, "#k:{}", s.id),
            other => write!(f, "#{}", other.name()),
        }
    }
}

impl Code {
    /// Construct `⟨λⁿ.body⟩`, checking `body ∈ E_{n+1}`.
    pub fn closure(n: u32, body: Expr) -> Result<Code, ScopeViolation> {
        match body.max_level() {
            Some(level) if level > n => Err(ScopeViolation {
                level,
                bound: n + 1,
            }),
            _ => Ok(Code::Closure(n, Rc::new(body))),
        }
    }

    /// Construction without the scope check, for bodies produced by
    /// substitution (which preserves scope by construction).
    pub fn closure_unchecked(n: u32, body: Expr) -> Code {
        debug_assert!(scope_check(&body, n + 1));
        Code::Closure(n, Rc::new(body))
    }

    pub fn prim_by_name(name: &str) -> Option<Code> {
        let p = match name {
            "flip" => PrimCode::Flip,
            "fail" => PrimCode::Fail,
            "get" => PrimCode::Get,
            "inc" => PrimCode::Inc,
            "cc" => PrimCode::Cc,
            "search" => PrimCode::Search,
            _ => return None,
        };
        Some(Code::Prim(p))
    }

    pub fn is_closure(&self) -> bool {
        matches!(self, Code::Closure(..))
    }

    /// True for captured continuations and captured stacks.
    pub fn is_captured_continuation(&self) -> bool {
        matches!(
            self,
            Code::Prim(PrimCode::Cont(_)) | Code::Prim(PrimCode::StackK(_))
        )
    }
}

impl PartialEq for Code {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Code::Closure(n, b), Code::Closure(m, c)) => n == m && b == c,
            (Code::Prim(p), Code::Prim(q)) => p == q,
            _ => false,
        }
    }
}

impl Eq for Code {}

impl PartialOrd for Code {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Code {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Code::Closure(n, b), Code::Closure(m, c)) => n.cmp(m).then_with(|| b.cmp(c)),
            (Code::Closure(..), Code::Prim(_)) => Ordering::Less,
            (Code::Prim(_), Code::Closure(..)) => Ordering::Greater,
            (Code::Prim(p), Code::Prim(q)) => p.cmp(q),
        }
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::Closure(n, body) => write!(f, "<{n}|{body}>"),
            Code::Prim(p) => write!(f, "{p}"),
        }
    }
}

/// Structural equality that identifies all captured continuations and
/// captured stacks with one another. Used by differential tests where the
/// two evaluation routes mint their own fresh capture ids.
pub fn eq_mod_captures(a: &Code, b: &Code) -> bool {
    match (a, b) {
        (Code::Closure(n, x), Code::Closure(m, y)) => n == m && expr_eq_mod_captures(x, y),
        (Code::Prim(p), Code::Prim(q)) => {
            if a.is_captured_continuation() && b.is_captured_continuation() {
                true
            } else {
                p == q
            }
        }
        _ => false,
    }
}

fn expr_eq_mod_captures(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Var(i), Expr::Var(j)) => i == j,
        (Expr::Lit(c), Expr::Lit(d)) => eq_mod_captures(c, d),
        (Expr::App(f, x), Expr::App(g, y)) => {
            expr_eq_mod_captures(f, g) && expr_eq_mod_captures(x, y)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    /// The step budget ran out. Distinct from every effect value: the
    /// caller decides whether to retry with more fuel or treat the term
    /// as divergent.
    FuelExhausted,
    Scope(ScopeViolation),
    /// The effect has no interpretation for this primitive.
    UnsupportedPrim {
        prim: &'static str,
        effect: &'static str,
    },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::FuelExhausted => write!(f, "fuel exhausted"),
            EvalError::Scope(s) => write!(f, "{s}"),
            EvalError::UnsupportedPrim { prim, effect } => {
                write!(f, "primitive #{prim} is not supported by the {effect} effect")
            }
        }
    }
}

impl std::error::Error for EvalError {}

impl From<ScopeViolation> for EvalError {
    fn from(s: ScopeViolation) -> Self {
        EvalError::Scope(s)
    }
}

pub type EvalResult<T> = Result<T, EvalError>;

/// A shared work budget. Every application — beta step, parameter peel,
/// or primitive dispatch — costs one unit, so evaluation time and stack
/// depth are both bounded by the budget even when substitution makes
/// terms grow. Lazy computations do not capture budgets; their `run`
/// methods take one, which keeps them pure functions of their probes.
#[derive(Clone, Debug)]
pub struct Fuel(Rc<Cell<u64>>);

impl Fuel {
    pub fn new(budget: u64) -> Fuel {
        Fuel(Rc::new(Cell::new(budget)))
    }

    pub fn tick(&self) -> EvalResult<()> {
        let left = self.0.get();
        if left == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.0.set(left - 1);
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.0.get()
    }
}

/// Continuation passed to `Effect::bind`; the budget is supplied by
/// whichever run invokes it.
pub type Kont<C> = Rc<dyn Fn(Code, &Fuel) -> EvalResult<C>>;

// ---------------------------------------------------------------------------
// The effect interface
// ---------------------------------------------------------------------------

/// A monadic effect backend: return, bind, primitive dispatch, and an
/// observation-based computation equality. Probes for observation (states,
/// continuations, parameters) are configured on the instance once per run.
pub trait Effect: Clone + 'static {
    type Comp: Clone;

    fn name(&self) -> &'static str;

    fn ret(&self, c: Code) -> Self::Comp;

    /// For eager effects the continuation is invoked during the call;
    /// for function-shaped effects it is deferred into the computation
    /// and receives the budget of whichever run reaches it.
    fn bind(&self, m: Self::Comp, k: Kont<Self::Comp>, fuel: &Fuel) -> EvalResult<Self::Comp>;

    fn apply_prim(&self, prim: &PrimCode, arg: Code, fuel: &Fuel) -> EvalResult<Self::Comp>;

    /// Observation-based equality on the instance's probe set, with a
    /// fresh budget per observation.
    fn eq_comp(&self, a: &Self::Comp, b: &Self::Comp, fuel: u64) -> EvalResult<bool>;

    /// Force the computation at every observation point, discarding the
    /// values: answers "does it complete within budget" without paying
    /// for any comparison.
    fn observe(&self, m: &Self::Comp, fuel: u64) -> EvalResult<()>;

    /// Hook for the `timeout-as-bottom` approximation: effects with a
    /// bottom computation may map `FuelExhausted` into it. The default
    /// leaves results untouched.
    fn absorb_fuel(&self, r: EvalResult<Self::Comp>) -> EvalResult<Self::Comp> {
        r
    }
}

// ---------------------------------------------------------------------------
// Application and evaluation
// ---------------------------------------------------------------------------

/// Apply one code to another in the given effect, spending one unit of
/// the budget: `⟨λ^{n+1}.e⟩·a` returns `ret ⟨λⁿ.e[a]⟩`; `⟨λ⁰.e⟩·a`
/// evaluates `e[a]`; primitives dispatch to the effect.
pub fn apply_with<E: Effect>(eff: &E, f: &Code, a: &Code, fuel: &Fuel) -> EvalResult<E::Comp> {
    fuel.tick()?;
    match f {
        Code::Closure(0, body) => {
            let closed = subst(body, 0, a)?;
            eff.absorb_fuel(eval_with(eff, &closed, fuel))
        }
        Code::Closure(n, body) => {
            let next = subst(body, *n, a)?;
            Ok(eff.ret(Code::closure_unchecked(n - 1, next)))
        }
        Code::Prim(p) => eff.apply_prim(p, a.clone(), fuel),
    }
}

/// [`apply_with`] against a fresh budget.
pub fn apply<E: Effect>(eff: &E, f: &Code, a: &Code, fuel: u64) -> EvalResult<E::Comp> {
    apply_with(eff, f, a, &Fuel::new(fuel))
}

/// Call-by-value evaluation of a closed expression: a literal returns its
/// code, an application binds the function's computation, then the
/// argument's, then applies.
pub fn eval_with<E: Effect>(eff: &E, e: &Expr, fuel: &Fuel) -> EvalResult<E::Comp> {
    match e {
        Expr::Lit(c) => Ok(eff.ret(c.clone())),
        Expr::Var(i) => Err(EvalError::Scope(ScopeViolation {
            level: *i,
            bound: 0,
        })),
        Expr::App(fun, arg) => {
            let mf = eff.absorb_fuel(eval_with(eff, fun, fuel))?;
            let eff_outer = eff.clone();
            let arg = arg.clone();
            eff.bind(
                mf,
                Rc::new(move |cf, fuel: &Fuel| {
                    let ma = eff_outer.absorb_fuel(eval_with(&eff_outer, &arg, fuel))?;
                    let eff_inner = eff_outer.clone();
                    eff_outer.bind(
                        ma,
                        Rc::new(move |ca, fuel: &Fuel| apply_with(&eff_inner, &cf, &ca, fuel)),
                        fuel,
                    )
                }),
                fuel,
            )
        }
    }
}

/// [`eval_with`] against a fresh budget.
pub fn eval<E: Effect>(eff: &E, e: &Expr, fuel: u64) -> EvalResult<E::Comp> {
    eval_with(eff, e, &Fuel::new(fuel))
}

// ---------------------------------------------------------------------------
// The SK presentation
// ---------------------------------------------------------------------------

/// `S = ⟨λ².(0 2)(1 2)⟩`.
pub fn s_code() -> Code {
    let body = Expr::app(
        Expr::app(Expr::Var(0), Expr::Var(2)),
        Expr::app(Expr::Var(1), Expr::Var(2)),
    );
    Code::closure_unchecked(2, body)
}

/// `K = ⟨λ¹.0⟩`.
pub fn k_code() -> Code {
    Code::closure_unchecked(1, Expr::Var(0))
}

pub fn sk_codes() -> (Code, Code) {
    (s_code(), k_code())
}

/// First partial application of `S`: `S₁(c₁) = ⟨λ¹.(c₁ 1)(0 1)⟩`.
pub fn s1_code(c1: &Code) -> Code {
    let body = Expr::app(
        Expr::app(Expr::lit(c1.clone()), Expr::Var(1)),
        Expr::app(Expr::Var(0), Expr::Var(1)),
    );
    Code::closure_unchecked(1, body)
}

/// Second partial application of `S`: `S₂(c₁,c₂) = ⟨λ⁰.(c₁ 0)(c₂ 0)⟩`.
pub fn s2_code(c1: &Code, c2: &Code) -> Code {
    let body = Expr::app(
        Expr::app(Expr::lit(c1.clone()), Expr::Var(0)),
        Expr::app(Expr::lit(c2.clone()), Expr::Var(0)),
    );
    Code::closure_unchecked(0, body)
}

/// Partial application of `K`: `K₁(c₁) = ⟨λ⁰.c₁⟩`.
pub fn k1_code(c1: &Code) -> Code {
    Code::closure_unchecked(0, Expr::lit(c1.clone()))
}

/// The diverging code `c↻ = ⟨λ⁰.⟨λ⁰.0 0⟩ ⟨λ⁰.0 0⟩⟩`: applying it to any
/// argument loops forever.
pub fn looping_code() -> Code {
    let omega = Code::closure_unchecked(0, Expr::app(Expr::Var(0), Expr::Var(0)));
    Code::closure_unchecked(
        0,
        Expr::app(Expr::lit(omega.clone()), Expr::lit(omega)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::PartialEffect;
    use crate::syntax::parse;

    fn partial() -> PartialEffect {
        PartialEffect::default()
    }

    fn ident() -> Code {
        Code::closure_unchecked(0, Expr::Var(0))
    }

    #[test]
    fn apply_peels_one_parameter() {
        // ⟨λ¹.0⟩ · c = ret ⟨λ⁰.c⟩
        let c = k_code();
        let got = apply(&partial(), &k_code(), &c, 100).unwrap();
        assert_eq!(got, Some(k1_code(&c)));
    }

    #[test]
    fn apply_nullary_closure_evaluates_body() {
        let c = k_code();
        let got = apply(&partial(), &ident(), &c, 100).unwrap();
        assert_eq!(got, Some(c));
    }

    #[test]
    fn eval_of_literal_returns_code() {
        let c = s_code();
        let got = eval(&partial(), &Expr::lit(c.clone()), 10).unwrap();
        assert_eq!(got, Some(c));
    }

    #[test]
    fn eval_identity_applied_to_value() {
        let e = parse("<0|0> <1|0>").unwrap();
        let got = eval(&partial(), &e, 100).unwrap();
        assert_eq!(got, Some(k_code()));
    }

    #[test]
    fn looping_term_exhausts_any_finite_fuel() {
        crate::with_deep_stack(|| {
            let c = looping_code();
            for fuel in [1u64, 10, 100, 1000] {
                let got = apply(&partial(), &c, &k_code(), fuel);
                assert_eq!(got, Err(EvalError::FuelExhausted), "fuel={fuel}");
            }
        });
    }

    #[test]
    fn sk_axioms_hold_pointwise() {
        let eff = partial();
        let (s, k) = sk_codes();
        let c1 = ident();
        let c2 = k_code();
        let c3 = s_code();

        // S · c₁ = ret S₁(c₁)
        assert_eq!(apply(&eff, &s, &c1, 100).unwrap(), Some(s1_code(&c1)));
        // K · c₁ = ret K₁(c₁)
        assert_eq!(apply(&eff, &k, &c1, 100).unwrap(), Some(k1_code(&c1)));
        // S₁(c₁) · c₂ = ret S₂(c₁,c₂)
        assert_eq!(
            apply(&eff, &s1_code(&c1), &c2, 100).unwrap(),
            Some(s2_code(&c1, &c2))
        );
        // K₁(c₁) · c₂ = ret c₁
        assert_eq!(apply(&eff, &k1_code(&c1), &c2, 100).unwrap(), Some(c1.clone()));
        // S₂(c₁,c₂) · c₃ = ν((c₁ c₃)(c₂ c₃))
        let direct = Expr::app(
            Expr::app(Expr::lit(c1.clone()), Expr::lit(c3.clone())),
            Expr::app(Expr::lit(c2.clone()), Expr::lit(c3.clone())),
        );
        assert_eq!(
            apply(&eff, &s2_code(&c1, &c2), &c3, 1000).unwrap(),
            eval(&eff, &direct, 1000).unwrap()
        );
    }

    #[test]
    fn code_ordering_is_total_on_prims() {
        let mut codes = vec![Code::Prim(PrimCode::Search), k_code(), Code::Prim(PrimCode::Flip)];
        codes.sort();
        assert!(codes[0].is_closure());
    }
}
