//! The parameterized backend: partial computations with oracle access.
//!
//! A computation maps each parameter — a finite-support predicate over
//! codes — to a sub-singleton set of results. `#search` consults the
//! parameter on its argument and returns one of the two selectors.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::algebra::{Code, Effect, EvalError, EvalResult, Fuel, Kont, PrimCode};
use crate::effects::{select_first, select_second};

/// A predicate over codes with finite support and a default value for
/// everything outside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPred {
    pub name: String,
    pub entries: Rc<BTreeMap<Code, bool>>,
    pub default: bool,
}

impl ParamPred {
    pub fn new(name: &str, entries: Vec<(Code, bool)>, default: bool) -> Self {
        ParamPred {
            name: name.to_string(),
            entries: Rc::new(entries.into_iter().collect()),
            default,
        }
    }

    pub fn eval(&self, c: &Code) -> bool {
        self.entries.get(c).copied().unwrap_or(self.default)
    }
}

/// A function from parameters to sub-singleton result sets.
#[derive(Clone)]
pub struct ReaderComp(Rc<dyn Fn(&ParamPred, &Fuel) -> EvalResult<Option<Code>>>);

impl ReaderComp {
    pub fn new(f: impl Fn(&ParamPred, &Fuel) -> EvalResult<Option<Code>> + 'static) -> Self {
        ReaderComp(Rc::new(f))
    }

    pub fn run(&self, p: &ParamPred, fuel: &Fuel) -> EvalResult<Option<Code>> {
        (self.0)(p, fuel)
    }

    /// Probe with a fresh budget.
    pub fn run_fresh(&self, p: &ParamPred, budget: u64) -> EvalResult<Option<Code>> {
        (self.0)(p, &Fuel::new(budget))
    }
}

impl fmt::Debug for ReaderComp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReaderComp(..)")
    }
}

#[derive(Clone, Debug)]
pub struct ReaderEffect {
    pub params: Rc<Vec<ParamPred>>,
}

impl Default for ReaderEffect {
    fn default() -> Self {
        // Two default oracles: one satisfied exactly by ⟨λ¹.0⟩, one by
        // nothing at all.
        ReaderEffect::with_params(vec![
            ParamPred::new("p0", vec![(select_first(), true)], false),
            ParamPred::new("p1", vec![], false),
        ])
    }
}

impl ReaderEffect {
    pub fn with_params(params: Vec<ParamPred>) -> Self {
        ReaderEffect {
            params: Rc::new(params),
        }
    }
}

impl Effect for ReaderEffect {
    type Comp = ReaderComp;

    fn name(&self) -> &'static str {
        "reader"
    }

    fn ret(&self, c: Code) -> ReaderComp {
        ReaderComp::new(move |_, _| Ok(Some(c.clone())))
    }

    fn bind(&self, m: ReaderComp, k: Kont<ReaderComp>, _fuel: &Fuel) -> EvalResult<ReaderComp> {
        Ok(ReaderComp::new(move |p, fuel| match m.run(p, fuel)? {
            None => Ok(None),
            Some(c) => k(c, fuel)?.run(p, fuel),
        }))
    }

    fn apply_prim(&self, prim: &PrimCode, arg: Code, _fuel: &Fuel) -> EvalResult<ReaderComp> {
        match prim {
            // (search · c)(p) = {⟨λ¹.0⟩} if p(c) = 0 else {⟨λ¹.1⟩}
            PrimCode::Search => Ok(ReaderComp::new(move |p, _| {
                Ok(Some(if p.eval(&arg) {
                    select_second()
                } else {
                    select_first()
                }))
            })),
            other => Err(EvalError::UnsupportedPrim {
                prim: other.name(),
                effect: "reader",
            }),
        }
    }

    fn eq_comp(&self, a: &ReaderComp, b: &ReaderComp, fuel: u64) -> EvalResult<bool> {
        for p in self.params.iter() {
            if a.run_fresh(p, fuel)? != b.run_fresh(p, fuel)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn observe(&self, m: &ReaderComp, fuel: u64) -> EvalResult<()> {
        for p in self.params.iter() {
            m.run_fresh(p, fuel)?;
        }
        Ok(())
    }
}

pub fn render_reader(eff: &ReaderEffect, m: &ReaderComp, budget: u64) -> String {
    let mut out = String::new();
    for p in eff.params.iter() {
        let line = match m.run_fresh(p, budget) {
            Ok(None) => "∅".to_string(),
            Ok(Some(c)) => format!("{{{c}}}"),
            Err(e) => format!("<{e}>"),
        };
        out.push_str(&format!("{} -> {line}\n", p.name));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{apply, eval};
    use crate::syntax::parse;

    #[test]
    fn search_follows_the_parameter() {
        let eff = ReaderEffect::default();
        let search = Code::Prim(PrimCode::Search);
        let m = apply(&eff, &search, &select_first(), 10).unwrap();
        // p0 holds exactly of ⟨λ¹.0⟩; p1 of nothing.
        assert_eq!(m.run_fresh(&eff.params[0], 100).unwrap(), Some(select_second()));
        assert_eq!(m.run_fresh(&eff.params[1], 100).unwrap(), Some(select_first()));
    }

    #[test]
    fn fibers_stay_subsingleton_through_binds() {
        let eff = ReaderEffect::default();
        let e = parse("<1|0> (#search <1|1>) (#search <1|0>)").unwrap();
        let m = eval(&eff, &e, 100).unwrap();
        for p in eff.params.iter() {
            assert!(m.run_fresh(p, 100).unwrap().is_some());
        }
    }
}
