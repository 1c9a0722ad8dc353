//! The defunctionalized eval/apply stack machine.
//!
//! Three state shapes — evaluating a closed term against a stack,
//! applying a code against a stack, and a final code — with six
//! transition rules for the pure fragment plus two derived rules for
//! `#cc` and captured stacks `k_π`. Fuel is spent exactly when a value
//! entry is consumed from the stack — one unit per application, the
//! same metering as the evaluator — so the two routes exhaust together
//! on diverging terms.

use std::cell::Cell;
use std::fmt;
use std::rc::Rc;

use crate::algebra::{Code, PrimCode};
use crate::syntax::{subst, Expr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StackEntry {
    /// A term waiting to be evaluated, tagged `t(e)`.
    T(Rc<Expr>),
    /// A code waiting for its argument, tagged `v(c)`.
    V(Code),
}

impl fmt::Display for StackEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackEntry::T(e) => write!(f, "t({e})"),
            StackEntry::V(c) => write!(f, "v({c})"),
        }
    }
}

/// A stack captured by the machine's `#cc` rule, compared by fresh id.
#[derive(Clone)]
pub struct CapturedStack {
    pub id: u64,
    pub stack: Rc<Vec<StackEntry>>,
}

/// Stacks grow towards the end of the vector: the last element is the top.
pub type Stack = Vec<StackEntry>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineState {
    Eval(Rc<Expr>, Stack),
    Apply(Code, Stack),
    Final(Code),
}

impl MachineState {
    pub fn start(e: Expr) -> MachineState {
        MachineState::Eval(Rc::new(e), Vec::new())
    }

    pub fn is_final(&self) -> bool {
        matches!(self, MachineState::Final(_))
    }
}

fn fmt_stack(stack: &Stack, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if stack.is_empty() {
        return write!(f, "∅");
    }
    for (i, entry) in stack.iter().rev().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{entry}")?;
    }
    Ok(())
}

impl fmt::Display for MachineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineState::Eval(e, stack) => {
                write!(f, "E\t{e}\t")?;
                fmt_stack(stack, f)
            }
            MachineState::Apply(c, stack) => {
                write!(f, "A\t{c}\t")?;
                fmt_stack(stack, f)
            }
            MachineState::Final(c) => write!(f, "F\t{c}\t∅"),
        }
    }
}

/// Why a run stopped without a final code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Final(Code),
    FuelExhausted,
    /// No rule applies: an effect primitive the pure machine does not
    /// interpret sat in function position, or an open term slipped in.
    Stuck(String),
}

enum Step {
    /// The next state; the flag records whether an application was
    /// performed (a value entry consumed).
    Next(MachineState, bool),
    NeedsFuel,
    Stuck(String),
}

pub struct Machine {
    next_id: Cell<u64>,
}

impl Default for Machine {
    fn default() -> Self {
        Machine {
            next_id: Cell::new(0),
        }
    }
}

impl Machine {
    pub fn new() -> Self {
        Machine::default()
    }

    fn capture(&self, stack: &Stack) -> Code {
        let id = self.next_id.get();
        self.next_id.set(id + 1);
        Code::Prim(PrimCode::StackK(CapturedStack {
            id,
            stack: Rc::new(stack.clone()),
        }))
    }

    /// One transition. At most one rule applies to any non-final state.
    pub fn step(&self, s: MachineState) -> Result<MachineState, String> {
        match self.step_inner(s, true) {
            Step::Next(n, _) => Ok(n),
            Step::NeedsFuel => unreachable!("spending was allowed"),
            Step::Stuck(msg) => Err(msg),
        }
    }

    fn step_inner(&self, s: MachineState, spend_allowed: bool) -> Step {
        match s {
            MachineState::Final(_) => Step::Stuck("step on a final state".to_string()),
            MachineState::Eval(e, mut stack) => match &*e {
                // (e_f e_a ▷ π) ↪ (e_f ▷ t(e_a):π)
                Expr::App(f, a) => {
                    stack.push(StackEntry::T(a.clone()));
                    Step::Next(MachineState::Eval(f.clone(), stack), false)
                }
                // (c ▷ π) ↪ (c ◀ π)
                Expr::Lit(c) => Step::Next(MachineState::Apply(c.clone(), stack), false),
                Expr::Var(i) => Step::Stuck(format!("open term: level {i} in eval position")),
            },
            MachineState::Apply(c, mut stack) => match stack.pop() {
                // (c ◀ ∅) ↪ c
                None => Step::Next(MachineState::Final(c), false),
                // (c_f ◀ t(e_a):π) ↪ (e_a ▷ v(c_f):π)
                Some(StackEntry::T(e)) => {
                    stack.push(StackEntry::V(c));
                    Step::Next(MachineState::Eval(e, stack), false)
                }
                Some(StackEntry::V(fun)) => {
                    if !spend_allowed {
                        return Step::NeedsFuel;
                    }
                    match &fun {
                        // (c_a ◀ v(⟨λ⁰.e⟩):π) ↪ (e[c_a] ▷ π)  — the beta step
                        Code::Closure(0, body) => match subst(body, 0, &c) {
                            Ok(closed) => {
                                Step::Next(MachineState::Eval(Rc::new(closed), stack), true)
                            }
                            Err(e) => Step::Stuck(e.to_string()),
                        },
                        // (c_a ◀ v(⟨λ^{n+1}.e⟩):π) ↪ (⟨λⁿ.e[c_a]⟩ ◀ π)
                        Code::Closure(n, body) => match subst(body, *n, &c) {
                            Ok(next) => Step::Next(
                                MachineState::Apply(Code::closure_unchecked(n - 1, next), stack),
                                true,
                            ),
                            Err(e) => Step::Stuck(e.to_string()),
                        },
                        // (c_a ◀ v(cc):π) ↪ (k_π ◀ v(c_a):π)
                        Code::Prim(PrimCode::Cc) => {
                            let k = self.capture(&stack);
                            stack.push(StackEntry::V(c));
                            Step::Next(MachineState::Apply(k, stack), true)
                        }
                        // (c_a ◀ v(k_π):π') ↪ (c_a ◀ π)
                        Code::Prim(PrimCode::StackK(captured)) => Step::Next(
                            MachineState::Apply(c, captured.stack.as_ref().clone()),
                            true,
                        ),
                        Code::Prim(p) => Step::Stuck(format!(
                            "no machine rule for #{} in function position",
                            p.name()
                        )),
                    }
                }
            },
        }
    }

    /// Iterate to a final code, fuel exhaustion, or a stuck state.
    pub fn run(&self, e: Expr, fuel: u64) -> RunOutcome {
        let mut state = MachineState::start(e);
        let mut fuel = fuel;
        loop {
            if let MachineState::Final(c) = state {
                return RunOutcome::Final(c);
            }
            match self.step_inner(state, fuel > 0) {
                Step::Next(next, spent) => {
                    if spent {
                        fuel -= 1;
                    }
                    state = next;
                }
                Step::NeedsFuel => return RunOutcome::FuelExhausted,
                Step::Stuck(msg) => return RunOutcome::Stuck(msg),
            }
        }
    }

    /// All states in visit order: first is the initial eval state, last is
    /// the final state or wherever the run stopped.
    pub fn trace(&self, e: Expr, fuel: u64) -> (Vec<MachineState>, RunOutcome) {
        let mut states = vec![MachineState::start(e)];
        let mut fuel = fuel;
        loop {
            let current = states.last().expect("nonempty").clone();
            if let MachineState::Final(c) = current {
                return (states, RunOutcome::Final(c));
            }
            match self.step_inner(current, fuel > 0) {
                Step::Next(next, spent) => {
                    if spent {
                        fuel -= 1;
                    }
                    states.push(next);
                }
                Step::NeedsFuel => return (states, RunOutcome::FuelExhausted),
                Step::Stuck(msg) => return (states, RunOutcome::Stuck(msg)),
            }
        }
    }
}

/// Render a trace as line-oriented text: `E|A|F <tab> term-or-code <tab>
/// stack`, stack entries top first.
pub fn render_trace(states: &[MachineState]) -> String {
    let mut out = String::new();
    for s in states {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}
