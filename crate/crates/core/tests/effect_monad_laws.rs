//! Monad-law probes for every shipped effect, under each effect's
//! observation equality: left identity, right identity, and
//! associativity of bind.

use std::rc::Rc;

use mca::algebra::{apply_with, Code, Effect, Fuel, Kont};
use mca::effects::{CpsEffect, PartialEffect, PowerEffect, ReaderEffect, StateEffect};
use mca::gen::{canonical_codes, gen_closed_pure_expr, gen_closure, Rng};
use mca::modality::laws::{gen_computation, ModSampleSpec};
use mca::algebra::PrimCode;

const FUEL: u64 = 1_500;

fn kont_from_code<E: Effect>(eff: &E, code: Code) -> Kont<E::Comp> {
    let eff = eff.clone();
    Rc::new(move |x, fuel: &Fuel| apply_with(&eff, &code, &x, fuel))
}

fn check_monad_laws<E: Effect>(eff: E, pool: Vec<Code>, seed: u64) {
    let mut rng = Rng::new(seed);
    let spec = ModSampleSpec {
        count: 0,
        seed,
        depth: 4,
        pool,
        fuel: FUEL,
    };
    let mut checked = 0;
    for _ in 0..200 {
        let c = if rng.chance(1, 2) {
            gen_closure(&mut rng, 3, &[])
        } else {
            canonical_codes()[rng.below(7) as usize].clone()
        };
        let kf = gen_closure(&mut rng, 3, &[]);
        let k = kont_from_code(&eff, kf.clone());

        // left identity: bind(ret c, k) ≡ k(c)
        let fuel = Fuel::new(FUEL);
        let lhs = eff.bind(eff.ret(c.clone()), k.clone(), &fuel);
        let rhs = k(c.clone(), &Fuel::new(FUEL));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => {
                assert!(
                    eff.eq_comp(&a, &b, FUEL).unwrap_or(false),
                    "left identity failed for {} at {c} with {kf}",
                    eff.name()
                );
                checked += 1;
            }
            (Err(_), Err(_)) => {}
            (a, b) => panic!("one-sided error: {} vs {}", a.is_ok(), b.is_ok()),
        }

        // right identity: bind(m, ret) ≡ m
        let Some(m) = gen_computation(&eff, &mut rng, &spec) else {
            continue;
        };
        let eff2 = eff.clone();
        let ret_k: Kont<E::Comp> = Rc::new(move |x, _| Ok(eff2.ret(x)));
        if let Ok(bound) = eff.bind(m.clone(), ret_k, &Fuel::new(FUEL)) {
            match eff.eq_comp(&bound, &m, FUEL) {
                Ok(equal) => {
                    assert!(equal, "right identity failed for {}", eff.name());
                    checked += 1;
                }
                Err(_) => {}
            }
        }

        // associativity: bind(bind(m, k1), k2) ≡ bind(m, λx. bind(k1 x, k2))
        let k1_code = gen_closure(&mut rng, 2, &[]);
        let k2_code = gen_closure(&mut rng, 2, &[]);
        let k1 = kont_from_code(&eff, k1_code);
        let k2 = kont_from_code(&eff, k2_code);
        let left = eff
            .bind(m.clone(), k1.clone(), &Fuel::new(FUEL))
            .and_then(|inner| eff.bind(inner, k2.clone(), &Fuel::new(FUEL)));
        let eff3 = eff.clone();
        let k1c = k1.clone();
        let k2c = k2.clone();
        let fused: Kont<E::Comp> = Rc::new(move |x, fuel: &Fuel| {
            let inner = k1c(x, fuel)?;
            eff3.bind(inner, k2c.clone(), fuel)
        });
        let right = eff.bind(m, fused, &Fuel::new(FUEL));
        match (left, right) {
            (Ok(a), Ok(b)) => {
                if let Ok(equal) = eff.eq_comp(&a, &b, FUEL) {
                    assert!(equal, "associativity failed for {}", eff.name());
                    checked += 1;
                }
            }
            _ => {}
        }
    }
    assert!(checked > 150, "only {checked} decided instances for {}", eff.name());
}

#[test]
fn partial_monad_laws() {
    mca::with_deep_stack(|| check_monad_laws(PartialEffect::default(), vec![], 1));
}

#[test]
fn power_monad_laws() {
    mca::with_deep_stack(|| {
        check_monad_laws(
            PowerEffect::default(),
            vec![Code::Prim(PrimCode::Flip), Code::Prim(PrimCode::Fail)],
            2,
        )
    });
}

#[test]
fn state_monad_laws() {
    mca::with_deep_stack(|| {
        check_monad_laws(
            StateEffect::default(),
            vec![Code::Prim(PrimCode::Get), Code::Prim(PrimCode::Inc)],
            3,
        )
    });
}

#[test]
fn cps_monad_laws() {
    mca::with_deep_stack(|| {
        check_monad_laws(CpsEffect::default(), vec![Code::Prim(PrimCode::Cc)], 4)
    });
}

#[test]
fn reader_monad_laws() {
    mca::with_deep_stack(|| {
        check_monad_laws(
            ReaderEffect::default(),
            vec![Code::Prim(PrimCode::Search)],
            5,
        )
    });
}

#[test]
fn power_bind_is_the_union_of_branch_continuations() {
    // brute force on sets of size ≤ 4: bind(m, k) = ⋃_{c∈m} k(c)
    mca::with_deep_stack(|| {
        let eff = PowerEffect::default();
        let mut rng = Rng::new(6);
        for _ in 0..100 {
            let n = rng.below(5);
            let mut m = std::collections::BTreeSet::new();
            for _ in 0..n {
                m.insert(gen_closure(&mut rng, 2, &[]));
            }
            let kf = gen_closure(&mut rng, 3, &[]);
            let k = kont_from_code(&eff, kf);
            let bound = eff.bind(m.clone(), k.clone(), &Fuel::new(FUEL));
            let mut union = std::collections::BTreeSet::new();
            let mut failed = false;
            for c in &m {
                match k(c.clone(), &Fuel::new(FUEL)) {
                    Ok(part) => union.extend(part),
                    Err(_) => failed = true,
                }
            }
            if let (Ok(b), false) = (bound, failed) {
                assert_eq!(b, union);
            }
        }
    });
}

#[test]
fn subsingleton_invariants_survive_bind_chains() {
    mca::with_deep_stack(|| {
        // partial computations and reader fibers stay sub-singleton
        let reader = ReaderEffect::default();
        let mut rng = Rng::new(7);
        for _ in 0..100 {
            let e = mca::gen::gen_expr(
                &mut rng,
                0,
                4,
                &[Code::Prim(PrimCode::Search)],
            );
            if let Ok(m) = mca::algebra::eval(&reader, &e, FUEL) {
                for p in reader.params.iter() {
                    // Option is sub-singleton by construction; forcing it
                    // checks the chain completes without widening
                    let _ = m.run_fresh(p, FUEL);
                }
            }
            let e = gen_closed_pure_expr(&mut rng, 5);
            if let Ok(m) = mca::algebra::eval(&PowerEffect::default(), &e, FUEL) {
                assert!(m.len() <= 1, "pure power result widened: {e}");
            }
        }
    });
}
