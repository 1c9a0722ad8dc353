//! Differential tests for the machine: agreement with the direct
//! evaluator on the pure fragment, agreement with the CPS evaluator on
//! the `#cc` fragment, the golden trace, and stack discipline.

use mca::algebra::{eq_mod_captures, eval, Code, EvalError};
use mca::effects::cps::{CpsEffect, RVal};
use mca::effects::PartialEffect;
use mca::gen::{gen_closed_pure_expr, gen_closure, Rng};
use mca::machine::{render_trace, Machine, MachineState, RunOutcome, StackEntry};
use mca::syntax::{parse, Expr};

#[test]
fn golden_trace_for_the_skk_demo() {
    let m = Machine::new();
    let e = parse("S K K <1|1>").unwrap();
    let (states, out) = m.trace(e, 1_000);
    assert!(matches!(out, RunOutcome::Final(_)));
    let expected = include_str!("golden/skk_trace.txt");
    assert_eq!(render_trace(&states), expected);
}

#[test]
fn trace_is_one_longer_than_the_step_count() {
    let m = Machine::new();
    for src in ["<1|0>", "<0|0> <1|0>", "S K K <1|1>"] {
        let (states, _) = m.trace(parse(src).unwrap(), 1_000);
        assert!(states.len() >= 2, "{src}");
        assert!(states.last().unwrap().is_final(), "{src}");
    }
    // the literal trace has exactly three states
    let (states, _) = m.trace(parse("<1|0>").unwrap(), 10);
    assert_eq!(states.len(), 3);
}

#[test]
fn machine_agrees_with_partial_evaluator_on_thousand_terms() {
    mca::with_deep_stack(|| {
        let eff = PartialEffect::default();
        let mut rng = Rng::new(0xd1ff);
        let fuel = 10_000;
        let mut finals = 0;
        let mut exhausted = 0;
        for i in 0..1000 {
            let e = gen_closed_pure_expr(&mut rng, 7);
            let machine_out = Machine::new().run(e.clone(), fuel);
            let eval_out = eval(&eff, &e, fuel);
            match (machine_out, eval_out) {
                (RunOutcome::Final(c), Ok(Some(d))) => {
                    assert_eq!(c, d, "sample {i}: {e}");
                    finals += 1;
                }
                (RunOutcome::FuelExhausted, Err(EvalError::FuelExhausted)) => exhausted += 1,
                (mo, eo) => panic!("sample {i} disagrees on {e}: {mo:?} vs {eo:?}"),
            }
        }
        assert!(finals >= 900, "only {finals} terminating samples");
        assert!(finals + exhausted == 1000);
    });
}

/// Random closed terms over pure closures plus `#cc` in applied
/// positions.
fn gen_cc_term(rng: &mut Rng, depth: u32) -> Expr {
    let cc = Expr::Lit(Code::Prim(mca::algebra::PrimCode::Cc));
    match rng.below(4) {
        0 => Expr::app(cc, gen_cc_body(rng, depth)),
        1 => Expr::app(
            gen_cc_body(rng, depth),
            Expr::app(cc, gen_cc_body(rng, depth)),
        ),
        2 => Expr::app(
            Expr::app(cc, gen_cc_body(rng, depth)),
            gen_cc_body(rng, depth),
        ),
        _ => Expr::app(
            Expr::lit(gen_closure(rng, depth, &[])),
            Expr::app(cc, gen_cc_body(rng, depth)),
        ),
    }
}

fn gen_cc_body(rng: &mut Rng, depth: u32) -> Expr {
    if depth == 0 || rng.chance(1, 2) {
        Expr::lit(gen_closure(rng, depth, &[]))
    } else {
        Expr::app(gen_cc_body(rng, depth - 1), gen_cc_body(rng, depth - 1))
    }
}

#[test]
fn machine_agrees_with_cps_evaluator_on_cc_terms() {
    mca::with_deep_stack(|| {
        let mut rng = Rng::new(0xcc);
        let fuel = 10_000;
        let mut agreed = 0;
        let mut i = 0;
        while agreed < 120 && i < 600 {
            i += 1;
            let e = gen_cc_term(&mut rng, 3);
            let eff = CpsEffect::default();
            let cps_out = eval(&eff, &e, fuel).and_then(|m| eff.run_halting(&m, fuel));
            let machine_out = Machine::new().run(e.clone(), fuel);
            match (machine_out, cps_out) {
                (RunOutcome::Final(c), Ok(RVal::Code(d))) => {
                    // capture ids are minted independently on each route
                    assert!(eq_mod_captures(&c, &d), "term {e}: {c} vs {d}");
                    agreed += 1;
                }
                (RunOutcome::FuelExhausted, Err(EvalError::FuelExhausted)) => {}
                (mo, co) => panic!("term {e}: {mo:?} vs {co:?}"),
            }
        }
        assert!(agreed >= 120, "only {agreed} agreeing cc samples");
    });
}

#[test]
fn stack_discipline_no_rule_reads_below_the_top() {
    // every pushed term entry is later consumed by the argument rule or
    // survives to the end; depth below the top never shrinks by more
    // than one entry per step (except the k_π jump, which swaps stacks)
    let m = Machine::new();
    let mut rng = Rng::new(0x57ac);
    for _ in 0..100 {
        let e = gen_closed_pure_expr(&mut rng, 5);
        let (states, _) = m.trace(e, 300);
        for pair in states.windows(2) {
            let before = stack_of(&pair[0]);
            let after = stack_of(&pair[1]);
            if let (Some(b), Some(a)) = (before, after) {
                // a step may push or pop at most one entry
                let diff = a.len() as i64 - b.len() as i64;
                assert!((-1..=1).contains(&diff));
                // everything below the touched top is untouched
                let shared = b.len().min(a.len());
                let keep = shared.saturating_sub(1);
                assert_eq!(&b[..keep], &a[..keep]);
            }
        }
    }
}

fn stack_of(s: &MachineState) -> Option<&[StackEntry]> {
    match s {
        MachineState::Eval(_, stack) | MachineState::Apply(_, stack) => Some(stack),
        MachineState::Final(_) => None,
    }
}

#[test]
fn machine_and_evaluator_exhaust_together_on_step_limited_budgets() {
    // metering parity: for every budget F, the two routes agree on
    // whether F suffices
    mca::with_deep_stack(|| {
        let eff = PartialEffect::default();
        let mut rng = Rng::new(0xf0e1);
        for _ in 0..60 {
            let e = gen_closed_pure_expr(&mut rng, 5);
            for fuel in [1u64, 2, 4, 8, 16, 64, 256] {
                let machine_out = Machine::new().run(e.clone(), fuel);
                let eval_out = eval(&eff, &e, fuel);
                match (&machine_out, &eval_out) {
                    (RunOutcome::Final(c), Ok(Some(d))) => assert_eq!(c, d, "{e} fuel={fuel}"),
                    (RunOutcome::FuelExhausted, Err(EvalError::FuelExhausted)) => {}
                    (mo, eo) => panic!("{e} at fuel {fuel}: {mo:?} vs {eo:?}"),
                }
            }
        }
    });
}
