//! The concrete effect backends and their primitive codes.
//!
//! Each backend fixes a computation shape, the monad operations over it,
//! the primitives it interprets, and an observation-based equality on the
//! instance's probe set. Pure terms behave identically in every backend;
//! effects enter only through the primitive codes.

use std::collections::BTreeSet;

use crate::algebra::{Code, Effect, EvalError, EvalResult, Fuel, Kont, PrimCode};
use crate::syntax::Expr;

pub mod cps;
pub mod reader;
pub mod state;

pub use cps::{render_cps, CpsComp, CpsEffect, DictCont, RVal};
pub use reader::{render_reader, ParamPred, ReaderComp, ReaderEffect};
pub use state::{render_state, StateComp, StateEffect};

/// `⟨λ¹.0⟩`: takes two arguments, keeps the first.
pub fn select_first() -> Code {
    Code::closure_unchecked(1, Expr::Var(0))
}

/// `⟨λ¹.1⟩`: takes two arguments, keeps the second.
pub fn select_second() -> Code {
    Code::closure_unchecked(1, Expr::Var(1))
}

/// The call-by-value Church numeral `n̄ = ⟨λ¹.0 (0 … (0 1))⟩` with `n`
/// applications of level 0; `0̄ = ⟨λ¹.1⟩`.
pub fn church(n: u64) -> Code {
    let mut body = Expr::Var(1);
    for _ in 0..n {
        body = Expr::app(Expr::Var(0), body);
    }
    Code::closure_unchecked(1, body)
}

/// Inverse of [`church`]: recognizes canonical numerals.
pub fn church_value(c: &Code) -> Option<u64> {
    let Code::Closure(1, body) = c else {
        return None;
    };
    let mut n = 0;
    let mut cur: &Expr = body;
    loop {
        match cur {
            Expr::Var(1) => return Some(n),
            Expr::App(f, a) if matches!(**f, Expr::Var(0)) => {
                n += 1;
                cur = a;
            }
            _ => return None,
        }
    }
}

// ---------------------------------------------------------------------------
// Partial: sub-singleton computations
// ---------------------------------------------------------------------------

/// A set of codes with at most one element; `None` is the empty set.
pub type PartialComp = Option<Code>;

/// The sub-singleton backend. Pure and primitive-free: this is the PCA
/// instance. With `timeout_as_bottom` set, fuel exhaustion inside a
/// computation is approximated by the empty sub-singleton.
#[derive(Clone, Debug, Default)]
pub struct PartialEffect {
    pub timeout_as_bottom: bool,
}

impl Effect for PartialEffect {
    type Comp = PartialComp;

    fn name(&self) -> &'static str {
        "partial"
    }

    fn ret(&self, c: Code) -> PartialComp {
        Some(c)
    }

    fn bind(&self, m: PartialComp, k: Kont<PartialComp>, fuel: &Fuel) -> EvalResult<PartialComp> {
        match m {
            None => Ok(None),
            Some(c) => self.absorb_fuel(k(c, fuel)),
        }
    }

    fn apply_prim(&self, prim: &PrimCode, _arg: Code, _fuel: &Fuel) -> EvalResult<PartialComp> {
        Err(EvalError::UnsupportedPrim {
            prim: prim.name(),
            effect: "partial",
        })
    }

    fn eq_comp(&self, a: &PartialComp, b: &PartialComp, _fuel: u64) -> EvalResult<bool> {
        Ok(a == b)
    }

    fn observe(&self, _m: &PartialComp, _fuel: u64) -> EvalResult<()> {
        Ok(())
    }

    fn absorb_fuel(&self, r: EvalResult<PartialComp>) -> EvalResult<PartialComp> {
        match r {
            Err(EvalError::FuelExhausted) if self.timeout_as_bottom => Ok(None),
            other => other,
        }
    }
}

pub fn render_partial(m: &PartialComp) -> String {
    match m {
        None => "∅".to_string(),
        Some(c) => c.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Power: finite sets of codes (demonic/angelic nondeterminism)
// ---------------------------------------------------------------------------

/// A finite set of codes, kept in canonical order for printing.
pub type PowerComp = BTreeSet<Code>;

/// The powerset backend, interpreting `#flip` and `#fail`.
#[derive(Clone, Debug, Default)]
pub struct PowerEffect {
    pub timeout_as_bottom: bool,
}

impl Effect for PowerEffect {
    type Comp = PowerComp;

    fn name(&self) -> &'static str {
        "power"
    }

    fn ret(&self, c: Code) -> PowerComp {
        BTreeSet::from([c])
    }

    fn bind(&self, m: PowerComp, k: Kont<PowerComp>, fuel: &Fuel) -> EvalResult<PowerComp> {
        let mut out = BTreeSet::new();
        for c in m {
            out.extend(self.absorb_fuel(k(c, fuel))?);
        }
        Ok(out)
    }

    fn apply_prim(&self, prim: &PrimCode, _arg: Code, _fuel: &Fuel) -> EvalResult<PowerComp> {
        match prim {
            // flip ignores its argument and offers both selectors
            PrimCode::Flip => Ok(BTreeSet::from([select_first(), select_second()])),
            PrimCode::Fail => Ok(BTreeSet::new()),
            other => Err(EvalError::UnsupportedPrim {
                prim: other.name(),
                effect: "power",
            }),
        }
    }

    fn eq_comp(&self, a: &PowerComp, b: &PowerComp, _fuel: u64) -> EvalResult<bool> {
        Ok(a == b)
    }

    fn observe(&self, _m: &PowerComp, _fuel: u64) -> EvalResult<()> {
        Ok(())
    }

    fn absorb_fuel(&self, r: EvalResult<PowerComp>) -> EvalResult<PowerComp> {
        match r {
            Err(EvalError::FuelExhausted) if self.timeout_as_bottom => Ok(BTreeSet::new()),
            other => other,
        }
    }
}

pub fn render_power(m: &PowerComp) -> String {
    let mut out = String::from("{");
    for (i, c) in m.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&c.to_string());
    }
    out.push('}');
    out
}
