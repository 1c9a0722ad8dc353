//! The continuation-passing backend: control is explicit.
//!
//! A computation consumes a continuation `Code -> R` and produces a final
//! answer in `R`. `#cc` saves the current continuation as a fresh code
//! `K_u`; applying `K_u` discards whatever continuation is current and
//! resumes `u` instead. Since arbitrary functions cannot be compared,
//! observation equality probes a finite continuation dictionary
//! configured on the instance.

use std::cell::Cell;
use std::fmt;
use std::rc::Rc;

use crate::algebra::{apply_with, eq_mod_captures, Code, Effect, EvalError, EvalResult, Fuel, Kont, PrimCode};

/// A final answer: either a code handed to the halting continuation, or a
/// designated token from the configured answer alphabet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RVal {
    Code(Code),
    Token(String),
}

impl fmt::Display for RVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RVal::Code(c) => write!(f, "{c}"),
            RVal::Token(t) => write!(f, "!{t}"),
        }
    }
}

/// Answers are compared up to the identity of captured continuations,
/// which carry fresh ids on every run.
pub fn rval_eq(a: &RVal, b: &RVal) -> bool {
    match (a, b) {
        (RVal::Code(x), RVal::Code(y)) => eq_mod_captures(x, y),
        (RVal::Token(s), RVal::Token(t)) => s == t,
        _ => false,
    }
}

pub type ContFn = Rc<dyn Fn(&Code, &Fuel) -> EvalResult<RVal>>;

/// A continuation captured by `#cc`, compared by fresh id.
#[derive(Clone)]
pub struct CapturedCont {
    pub id: u64,
    pub f: ContFn,
}

/// A named dictionary continuation used for probing.
#[derive(Clone)]
pub struct DictCont {
    pub name: String,
    pub f: ContFn,
}

impl DictCont {
    /// The halting continuation: wraps the result code as the answer.
    pub fn halt() -> DictCont {
        DictCont {
            name: "halt".to_string(),
            f: Rc::new(|c, _| Ok(RVal::Code(c.clone()))),
        }
    }

    /// Maps every code to a fixed token of the answer alphabet.
    pub fn token(name: &str, token: &str) -> DictCont {
        let token = token.to_string();
        DictCont {
            name: name.to_string(),
            f: Rc::new(move |_, _| Ok(RVal::Token(token.clone()))),
        }
    }

    /// Finite-support table: specific codes map to tokens, everything
    /// else falls through to the halting behavior.
    pub fn table(name: &str, entries: Vec<(Code, String)>) -> DictCont {
        DictCont {
            name: name.to_string(),
            f: Rc::new(move |c, _| {
                for (code, token) in &entries {
                    if code == c {
                        return Ok(RVal::Token(token.clone()));
                    }
                }
                Ok(RVal::Code(c.clone()))
            }),
        }
    }
}

/// A function from continuations to answers.
#[derive(Clone)]
pub struct CpsComp(Rc<dyn Fn(&ContFn, &Fuel) -> EvalResult<RVal>>);

impl CpsComp {
    pub fn new(f: impl Fn(&ContFn, &Fuel) -> EvalResult<RVal> + 'static) -> Self {
        CpsComp(Rc::new(f))
    }

    pub fn run(&self, k: &ContFn, fuel: &Fuel) -> EvalResult<RVal> {
        (self.0)(k, fuel)
    }

    /// Probe with a fresh budget.
    pub fn run_fresh(&self, k: &ContFn, budget: u64) -> EvalResult<RVal> {
        (self.0)(k, &Fuel::new(budget))
    }
}

impl fmt::Debug for CpsComp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CpsComp(..)")
    }
}

#[derive(Clone)]
pub struct CpsEffect {
    next_id: Rc<Cell<u64>>,
    /// Probe continuations; the first entry is conventionally `halt`.
    pub dict: Rc<Vec<DictCont>>,
}

impl Default for CpsEffect {
    fn default() -> Self {
        CpsEffect::with_dict(vec![DictCont::halt(), DictCont::token("aborter", "abort")])
    }
}

impl CpsEffect {
    pub fn with_dict(dict: Vec<DictCont>) -> Self {
        CpsEffect {
            next_id: Rc::new(Cell::new(0)),
            dict: Rc::new(dict),
        }
    }

    fn fresh_id(&self) -> u64 {
        let id = self.next_id.get();
        self.next_id.set(id + 1);
        id
    }

    pub fn halting(&self) -> ContFn {
        Rc::new(|c, _| Ok(RVal::Code(c.clone())))
    }

    /// Capture a continuation as a `K_u` code.
    pub fn capture(&self, u: ContFn) -> Code {
        Code::Prim(PrimCode::Cont(CapturedCont {
            id: self.fresh_id(),
            f: u,
        }))
    }

    /// Run a computation with the halting continuation and a fresh
    /// budget.
    pub fn run_halting(&self, m: &CpsComp, budget: u64) -> EvalResult<RVal> {
        m.run_fresh(&self.halting(), budget)
    }
}

impl Effect for CpsEffect {
    type Comp = CpsComp;

    fn name(&self) -> &'static str {
        "cps"
    }

    fn ret(&self, c: Code) -> CpsComp {
        CpsComp::new(move |k, fuel| k(&c, fuel))
    }

    fn bind(&self, m: CpsComp, kont: Kont<CpsComp>, _fuel: &Fuel) -> EvalResult<CpsComp> {
        Ok(CpsComp::new(move |k, fuel| {
            let k = k.clone();
            let kont = kont.clone();
            m.run(
                &(Rc::new(move |c: &Code, fuel: &Fuel| kont(c.clone(), fuel)?.run(&k, fuel))
                    as ContFn),
                fuel,
            )
        }))
    }

    fn apply_prim(&self, prim: &PrimCode, arg: Code, _fuel: &Fuel) -> EvalResult<CpsComp> {
        match prim {
            // (cc · c_a)(u) = (c_a · K_u)(u)
            PrimCode::Cc => {
                let eff = self.clone();
                Ok(CpsComp::new(move |u, fuel| {
                    let ku = eff.capture(u.clone());
                    apply_with(&eff, &arg, &ku, fuel)?.run(u, fuel)
                }))
            }
            // (K_u · c_a)(u') = u(c_a)
            PrimCode::Cont(cap) => {
                let saved = cap.f.clone();
                Ok(CpsComp::new(move |_current, fuel| saved(&arg, fuel)))
            }
            other => Err(EvalError::UnsupportedPrim {
                prim: other.name(),
                effect: "cps",
            }),
        }
    }

    fn eq_comp(&self, a: &CpsComp, b: &CpsComp, fuel: u64) -> EvalResult<bool> {
        for entry in self.dict.iter() {
            if !rval_eq(&a.run_fresh(&entry.f, fuel)?, &b.run_fresh(&entry.f, fuel)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn observe(&self, m: &CpsComp, fuel: u64) -> EvalResult<()> {
        for entry in self.dict.iter() {
            m.run_fresh(&entry.f, fuel)?;
        }
        Ok(())
    }
}

pub fn render_cps(eff: &CpsEffect, m: &CpsComp, budget: u64) -> String {
    let mut out = String::new();
    for entry in eff.dict.iter() {
        let line = match m.run_fresh(&entry.f, budget) {
            Ok(v) => v.to_string(),
            Err(e) => format!("<{e}>"),
        };
        out.push_str(&format!("{} -> {line}\n", entry.name));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::eval;
    use crate::effects::{select_first, PartialEffect};
    use crate::gen::{gen_closed_pure_expr, Rng};
    use crate::syntax::parse;

    #[test]
    fn cc_passes_the_captured_continuation_to_its_argument() {
        // cc ⟨λ⁰.0⟩ returns the captured continuation itself.
        let eff = CpsEffect::default();
        let e = parse("#cc <0|0>").unwrap();
        let m = eval(&eff, &e, 100).unwrap();
        match eff.run_halting(&m, 1000).unwrap() {
            RVal::Code(c) => assert!(c.is_captured_continuation()),
            other => panic!("expected a captured continuation, got {other}"),
        }
    }

    #[test]
    fn captured_continuation_discards_context_built_after_capture() {
        // cc ⟨λ⁰.⟨λ¹.1⟩ (0 ⟨λ¹.0⟩)⟩: inside the body, K_u fires on
        // ⟨λ¹.0⟩ and the pending ⟨λ¹.1⟩ application around it is
        // dropped; the capture-time continuation here is just halt.
        let eff = CpsEffect::default();
        let e = parse("#cc <0|<1|1> (0 <1|0>)>").unwrap();
        let m = eval(&eff, &e, 1000).unwrap();
        match eff.run_halting(&m, 1000).unwrap() {
            RVal::Code(c) => assert_eq!(c, select_first()),
            other => panic!("unexpected {other}"),
        }
        // without the jump, the same shape applied to a plain value
        // would be eaten by ⟨λ¹.1⟩ into a partial application
        let e = parse("<0|<1|1> (<0|0> <1|0>)>  <1|1>").unwrap();
        let m = eval(&eff, &e, 1000).unwrap();
        match eff.run_halting(&m, 1000).unwrap() {
            RVal::Code(c) => assert!(c.is_closure() && c != select_first()),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn k_code_applies_saved_continuation_under_any_current_one() {
        let eff = CpsEffect::default();
        let target = select_first();
        let saved: ContFn = Rc::new(|c, _| Ok(RVal::Code(c.clone())));
        let ku = eff.capture(saved);
        let m = crate::algebra::apply(&eff, &ku, &target, 100).unwrap();
        // Run under a continuation that would tokenize everything: the
        // saved continuation wins.
        let smash: ContFn = Rc::new(|_, _| Ok(RVal::Token("smashed".into())));
        assert_eq!(m.run_fresh(&smash, 100).unwrap(), RVal::Code(select_first()));
    }

    #[test]
    fn pure_terms_agree_with_the_partial_evaluator() {
        crate::with_deep_stack(|| {
            let cps = CpsEffect::default();
            let partial = PartialEffect::default();
            let mut rng = Rng::new(7);
            let mut compared = 0;
            for _ in 0..200 {
                let e = gen_closed_pure_expr(&mut rng, 5);
                let lhs = eval(&cps, &e, 2000).and_then(|m| cps.run_halting(&m, 2000));
                let rhs = eval(&partial, &e, 2000);
                match (lhs, rhs) {
                    (Ok(RVal::Code(c)), Ok(Some(d))) => {
                        assert_eq!(c, d, "term {e}");
                        compared += 1;
                    }
                    (Err(EvalError::FuelExhausted), Err(EvalError::FuelExhausted)) => {}
                    (l, r) => panic!("disagreement on {e}: {l:?} vs {r:?}"),
                }
            }
            assert!(compared > 50);
        });
    }
}
