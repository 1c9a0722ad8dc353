//! The increasing-state backend: counters over natural-number states.
//!
//! A computation maps a start state to the finite set of (state, code)
//! outcomes, with every outcome state at least the start state. `#get`
//! returns the Church numeral of the current state and leaves it intact;
//! `#inc` bumps the state and returns its argument.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use crate::algebra::{Code, Effect, EvalError, EvalResult, Fuel, Kont, PrimCode};
use crate::effects::church;

pub type StateOutcomes = BTreeSet<(u64, Code)>;

/// A state transition table, probe-able at any start state against a
/// caller-supplied budget.
#[derive(Clone)]
pub struct StateComp(Rc<dyn Fn(u64, &Fuel) -> EvalResult<StateOutcomes>>);

impl StateComp {
    pub fn new(f: impl Fn(u64, &Fuel) -> EvalResult<StateOutcomes> + 'static) -> Self {
        StateComp(Rc::new(f))
    }

    pub fn run(&self, state: u64, fuel: &Fuel) -> EvalResult<StateOutcomes> {
        (self.0)(state, fuel)
    }

    /// Probe with a fresh budget.
    pub fn run_fresh(&self, state: u64, budget: u64) -> EvalResult<StateOutcomes> {
        (self.0)(state, &Fuel::new(budget))
    }
}

impl fmt::Debug for StateComp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateComp(..)")
    }
}

#[derive(Clone, Debug)]
pub struct StateEffect {
    /// States used for observation equality and invariant checks.
    pub probes: Rc<Vec<u64>>,
}

impl Default for StateEffect {
    fn default() -> Self {
        StateEffect {
            probes: Rc::new((0..=8).collect()),
        }
    }
}

impl StateEffect {
    pub fn with_probes(probes: Vec<u64>) -> Self {
        StateEffect {
            probes: Rc::new(probes),
        }
    }

    /// The increasing-state invariant: every outcome state dominates the
    /// start state, checked on every probe.
    pub fn check_increasing(&self, m: &StateComp, budget: u64) -> EvalResult<bool> {
        for &s0 in self.probes.iter() {
            for (s1, _) in m.run_fresh(s0, budget)? {
                if s1 < s0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl Effect for StateEffect {
    type Comp = StateComp;

    fn name(&self) -> &'static str {
        "state"
    }

    fn ret(&self, c: Code) -> StateComp {
        StateComp::new(move |s, _| Ok(BTreeSet::from([(s, c.clone())])))
    }

    fn bind(&self, m: StateComp, k: Kont<StateComp>, _fuel: &Fuel) -> EvalResult<StateComp> {
        Ok(StateComp::new(move |s0, fuel| {
            let mut out = BTreeSet::new();
            for (s1, c) in m.run(s0, fuel)? {
                out.extend(k(c, fuel)?.run(s1, fuel)?);
            }
            Ok(out)
        }))
    }

    fn apply_prim(&self, prim: &PrimCode, arg: Code, _fuel: &Fuel) -> EvalResult<StateComp> {
        match prim {
            PrimCode::Get => Ok(StateComp::new(move |s, _| {
                Ok(BTreeSet::from([(s, church(s))]))
            })),
            PrimCode::Inc => Ok(StateComp::new(move |s, _| {
                Ok(BTreeSet::from([(s + 1, arg.clone())]))
            })),
            other => Err(EvalError::UnsupportedPrim {
                prim: other.name(),
                effect: "state",
            }),
        }
    }

    fn eq_comp(&self, a: &StateComp, b: &StateComp, fuel: u64) -> EvalResult<bool> {
        for &s in self.probes.iter() {
            if a.run_fresh(s, fuel)? != b.run_fresh(s, fuel)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn observe(&self, m: &StateComp, fuel: u64) -> EvalResult<()> {
        for &s in self.probes.iter() {
            m.run_fresh(s, fuel)?;
        }
        Ok(())
    }
}

pub fn render_state(eff: &StateEffect, m: &StateComp, budget: u64) -> String {
    let mut out = String::new();
    for &s in eff.probes.iter() {
        let line = match m.run_fresh(s, budget) {
            Ok(set) => {
                let items: Vec<String> = set
                    .iter()
                    .map(|(s1, c)| format!("({s1}, {c})"))
                    .collect();
                format!("{{{}}}", items.join(", "))
            }
            Err(e) => format!("<{e}>"),
        };
        out.push_str(&format!("σ={s}: {line}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::eval;
    use crate::syntax::parse;

    #[test]
    fn get_returns_current_state_numeral() {
        let eff = StateEffect::default();
        let e = parse("#get <0|0>").unwrap();
        let m = eval(&eff, &e, 100).unwrap();
        assert_eq!(m.run_fresh(3, 100).unwrap(), BTreeSet::from([(3, church(3))]));
    }

    #[test]
    fn inc_bumps_state_and_returns_argument() {
        let eff = StateEffect::default();
        let e = parse("#inc <1|1>").unwrap();
        let m = eval(&eff, &e, 100).unwrap();
        assert_eq!(
            m.run_fresh(0, 100).unwrap(),
            BTreeSet::from([(1, crate::effects::select_second())])
        );
    }

    #[test]
    fn counter_demo_reaches_two() {
        // run inc twice, then read: (2̄, 2) from state 0
        let eff = StateEffect::default();
        let e = parse("#get (#inc (#inc <0|0>))").unwrap();
        let m = eval(&eff, &e, 100).unwrap();
        assert_eq!(m.run_fresh(0, 100).unwrap(), BTreeSet::from([(2, church(2))]));
    }

    #[test]
    fn increasing_invariant_holds_for_programs() {
        let eff = StateEffect::default();
        for src in ["#get <0|0>", "#inc (#get <0|0>)", "#get (#inc (#inc <1|0>))"] {
            let m = eval(&eff, &parse(src).unwrap(), 100).unwrap();
            assert!(eff.check_increasing(&m, 100).unwrap(), "{src}");
        }
    }
}
